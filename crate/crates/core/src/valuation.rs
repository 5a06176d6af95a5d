//! Valuation functions over bundles of goods.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest good count for which an explicit subset table is accepted.
pub const ORACLE_MAX_GOODS: usize = 20;
/// Largest good count for the exhaustive cancelability validator.
pub const CANCELABLE_MAX_GOODS: usize = 10;

/// Explicit value table indexed by subset bitmask (bit `g` set iff good `g`
/// is in the bundle).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    goods: usize,
    table: Vec<Rational>,
}

impl OracleTable {
    /// Validates size, normalization and monotonicity.
    pub fn new(goods: usize, table: Vec<Rational>) -> Result<Self> {
        if goods > ORACLE_MAX_GOODS {
            return Err(Error::InvalidInstance(format!(
                "oracle valuations support at most {ORACLE_MAX_GOODS} goods, got {goods}"
            )));
        }
        if table.len() != 1 << goods {
            return Err(Error::InvalidInstance(format!(
                "oracle table has {} entries, expected 2^{goods}",
                table.len()
            )));
        }
        let table = OracleTable { goods, table };
        table.validate(usize::MAX)?;
        Ok(table)
    }

    /// Builds a table by evaluating `f` on every subset.
    pub fn from_fn(goods: usize, f: impl Fn(&[usize]) -> Rational) -> Result<Self> {
        let table = (0..1usize << goods)
            .map(|mask| f(&goods_of_mask(mask)))
            .collect();
        Self::new(goods, table)
    }

    fn validate(&self, agent: usize) -> Result<()> {
        if !self.table[0].is_zero() {
            return Err(Error::BadOracle {
                agent,
                property: "normalized (v(empty) must be 0)",
            });
        }
        for (mask, value) in self.table.iter().enumerate() {
            if value.is_negative() {
                return Err(Error::NegativeValue {
                    agent,
                    value: value.clone(),
                });
            }
            // Checking single-good extensions is enough for monotonicity.
            for g in 0..self.goods {
                if mask & (1 << g) == 0 && self.table[mask | (1 << g)] < *value {
                    return Err(Error::BadOracle {
                        agent,
                        property: "monotone",
                    });
                }
            }
        }
        Ok(())
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn entries(&self) -> &[Rational] {
        &self.table
    }

    pub fn at_mask(&self, mask: usize) -> &Rational {
        &self.table[mask]
    }
}

pub(crate) fn goods_of_mask(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|g| mask & (1 << g) != 0)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    Additive(Vec<Rational>),
    /// Sum of the `k` most valuable goods of the bundle.
    MultiDemand { k: usize, values: Vec<Rational> },
    /// Pointwise maximum of additive clauses.
    Xos(Vec<Vec<Rational>>),
    Oracle(OracleTable),
}

impl Valuation {
    pub fn kind(&self) -> &'static str {
        match self {
            Valuation::Additive(_) => "additive",
            Valuation::MultiDemand { .. } => "multidemand",
            Valuation::Xos(_) => "xos",
            Valuation::Oracle(_) => "oracle",
        }
    }

    pub fn goods(&self) -> usize {
        match self {
            Valuation::Additive(v) => v.len(),
            Valuation::MultiDemand { values, .. } => values.len(),
            Valuation::Xos(clauses) => clauses.first().map_or(0, Vec::len),
            Valuation::Oracle(t) => t.goods,
        }
    }

    pub fn is_additive(&self) -> bool {
        match self {
            Valuation::Additive(_) => true,
            Valuation::MultiDemand { k, values } => *k >= values.len(),
            Valuation::Xos(clauses) => clauses.len() == 1,
            Valuation::Oracle(_) => false,
        }
    }

    /// Per-good values when the valuation is additive in disguise.
    pub fn additive_values(&self) -> Option<&[Rational]> {
        match self {
            Valuation::Additive(v) => Some(v),
            Valuation::MultiDemand { k, values } if *k >= values.len() => Some(values),
            Valuation::Xos(clauses) if clauses.len() == 1 => Some(&clauses[0]),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, agent: usize, goods: usize) -> Result<()> {
        let check_values = |values: &[Rational]| -> Result<()> {
            if values.len() != goods {
                return Err(Error::InvalidInstance(format!(
                    "agent {agent}: {} values for {goods} goods",
                    values.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| v.is_negative()) {
                return Err(Error::NegativeValue {
                    agent,
                    value: v.clone(),
                });
            }
            Ok(())
        };
        match self {
            Valuation::Additive(values) => check_values(values),
            Valuation::MultiDemand { k, values } => {
                if *k == 0 {
                    return Err(Error::InvalidInstance(format!(
                        "agent {agent}: multi-demand k must be positive"
                    )));
                }
                check_values(values)
            }
            Valuation::Xos(clauses) => {
                if clauses.is_empty() {
                    return Err(Error::InvalidInstance(format!(
                        "agent {agent}: XOS valuation needs at least one clause"
                    )));
                }
                clauses.iter().try_for_each(|c| check_values(c))
            }
            Valuation::Oracle(table) => {
                if table.goods != goods {
                    return Err(Error::InvalidInstance(format!(
                        "agent {agent}: oracle over {} goods, instance has {goods}",
                        table.goods
                    )));
                }
                table.validate(agent)
            }
        }
    }

    /// Value of a single good, `v({g})`.
    pub fn single(&self, good: usize) -> Rational {
        match self {
            Valuation::Additive(v) => v[good].clone(),
            Valuation::MultiDemand { values, .. } => values[good].clone(),
            Valuation::Xos(clauses) => clauses
                .iter()
                .map(|c| &c[good])
                .max()
                .cloned()
                .unwrap_or_else(Rational::zero),
            Valuation::Oracle(t) => t.table[1 << good].clone(),
        }
    }

    /// Value of a bundle; errors if a good is outside the valuation's domain.
    pub fn value_of(&self, bundle: &[usize]) -> Result<Rational> {
        let goods = self.goods();
        if let Some(&good) = bundle.iter().find(|&&g| g >= goods) {
            return Err(Error::GoodOutOfRange { good, goods });
        }
        Ok(self.value(bundle))
    }

    /// Value of a bundle whose goods are known to be in range. Duplicate
    /// entries are not allowed.
    pub fn value(&self, bundle: &[usize]) -> Rational {
        match self {
            Valuation::Additive(v) => bundle.iter().map(|&g| &v[g]).sum(),
            Valuation::MultiDemand { k, values } => {
                let mut vals: Vec<&Rational> = bundle.iter().map(|&g| &values[g]).collect();
                vals.sort_unstable_by(|a, b| b.cmp(a));
                vals.into_iter().take(*k).sum()
            }
            Valuation::Xos(clauses) => clauses
                .iter()
                .map(|c| bundle.iter().map(|&g| &c[g]).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero),
            Valuation::Oracle(t) => t.table[bundle.iter().fold(0usize, |m, &g| m | (1 << g))].clone(),
        }
    }

    /// The clause attaining `v(G)`; first such clause on ties. This is the
    /// additive lower bound used for threshold guarantees.
    pub fn xos_witness(&self) -> Option<&[Rational]> {
        match self {
            Valuation::Xos(clauses) => {
                let total = |c: &Vec<Rational>| c.iter().sum::<Rational>();
                let mut best = 0;
                for (idx, c) in clauses.iter().enumerate().skip(1) {
                    if total(c) > total(&clauses[best]) {
                        best = idx;
                    }
                }
                Some(&clauses[best])
            }
            Valuation::Additive(v) => Some(v),
            _ => None,
        }
    }

    /// Checks `v(S ∪ {g}) > v(T ∪ {g}) ⟹ v(S) > v(T)` on every triple with
    /// `g ∉ S ∪ T`. Only defined for up to [`CANCELABLE_MAX_GOODS`] goods.
    pub fn is_cancelable(&self) -> Result<bool> {
        let goods = self.goods();
        if goods > CANCELABLE_MAX_GOODS {
            return Err(Error::InvalidParameter(format!(
                "cancelability check supports at most {CANCELABLE_MAX_GOODS} goods"
            )));
        }
        let table: Vec<Rational> = match self {
            Valuation::Oracle(t) => t.table.clone(),
            other => (0..1usize << goods)
                .map(|mask| other.value(&goods_of_mask(mask)))
                .collect(),
        };
        let full = (1usize << goods) - 1;
        for g in 0..goods {
            let bit = 1 << g;
            let rest = full & !bit;
            // Enumerate subsets S, T of G \ {g}.
            let mut s = rest;
            loop {
                let mut t = rest;
                loop {
                    if table[s | bit] > table[t | bit] && table[s] <= table[t] {
                        return Ok(false);
                    }
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & rest;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn additive_value_of_table_one_agent_one() {
        let v = Valuation::Additive(ints(&[8, 8, 5, 2]));
        assert_eq!(v.value_of(&[0, 2]).unwrap(), int(13));
        assert_eq!(v.value_of(&[]).unwrap(), int(0));
    }

    #[test]
    fn multi_demand_takes_k_best() {
        let v = Valuation::MultiDemand {
            k: 2,
            values: ints(&[4, 7, 6, 2]),
        };
        assert_eq!(v.value_of(&[0, 1, 2]).unwrap(), int(13));
        assert_eq!(v.value_of(&[3]).unwrap(), int(2));
        assert_eq!(v.value_of(&[]).unwrap(), int(0));
    }

    #[test]
    fn xos_takes_best_clause() {
        let v = Valuation::Xos(vec![ints(&[3, 0, 1]), ints(&[1, 2, 2])]);
        assert_eq!(v.value(&[0]), int(3));
        assert_eq!(v.value(&[1, 2]), int(4));
        assert_eq!(v.value(&[0, 1, 2]), int(5));
        assert_eq!(v.single(1), int(2));
        assert_eq!(v.xos_witness().unwrap(), &ints(&[1, 2, 2])[..]);
    }

    #[test]
    fn oracle_rejects_non_monotone_and_unnormalized_tables() {
        assert!(OracleTable::new(1, ints(&[0, 1])).is_ok());
        assert!(matches!(
            OracleTable::new(1, ints(&[1, 1])),
            Err(Error::BadOracle { .. })
        ));
        assert!(matches!(
            OracleTable::new(2, ints(&[0, 2, 1, 1])),
            Err(Error::BadOracle { .. })
        ));
        assert!(OracleTable::new(2, ints(&[0, 1])).is_err());
    }

    #[test]
    fn oracle_lookup_outside_table_errors() {
        let v = Valuation::Oracle(OracleTable::new(2, ints(&[0, 1, 1, 2])).unwrap());
        assert_eq!(v.value_of(&[0, 1]).unwrap(), int(2));
        assert!(matches!(
            v.value_of(&[2]),
            Err(Error::GoodOutOfRange { good: 2, goods: 2 })
        ));
    }

    #[test]
    fn cancelability_of_known_classes() {
        let additive = Valuation::Additive(ints(&[3, 1, 2]));
        assert!(additive.is_cancelable().unwrap());
        let unit = Valuation::MultiDemand {
            k: 1,
            values: ints(&[3, 1, 2]),
        };
        assert!(unit.is_cancelable().unwrap());
        let budget = OracleTable::from_fn(3, |b| {
            let s: Rational = b.iter().map(|&g| int([3, 1, 2][g])).sum();
            s.min(int(4))
        })
        .unwrap();
        assert!(Valuation::Oracle(budget).is_cancelable().unwrap());
        // v({0,2}) > v({1,2}) but v({0}) = v({1}).
        let bad = OracleTable::new(3, ints(&[0, 1, 1, 1, 1, 3, 2, 3])).unwrap();
        assert!(!Valuation::Oracle(bad).is_cancelable().unwrap());
        let two_demand = Valuation::MultiDemand {
            k: 2,
            values: vec![rat(1, 2), int(1), int(1)],
        };
        assert!(two_demand.is_cancelable().is_ok());
    }
}
