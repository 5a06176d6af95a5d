//! Deterministic allocations, fractional allocations and lotteries.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::instance::zero_matrix;
use crate::rational::{format_rational, to_f64, Rational};

/// An `n × m` matrix with entries in `[0, 1]` whose columns sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FractionalAllocation {
    rows: Vec<Vec<Rational>>,
}

impl FractionalAllocation {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidAllocation("no agents".into()));
        }
        let m = rows[0].len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidAllocation("ragged matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            for (g, x) in row.iter().enumerate() {
                if x.is_negative() || *x > Rational::one() {
                    return Err(Error::InvalidAllocation(format!(
                        "entry ({i}, {g}) = {x} outside [0, 1]"
                    )));
                }
            }
        }
        for g in 0..m {
            let col: Rational = rows.iter().map(|r| &r[g]).sum();
            if !col.is_one() {
                return Err(Error::InvalidAllocation(format!(
                    "column {g} sums to {col}, expected 1"
                )));
            }
        }
        Ok(FractionalAllocation { rows })
    }

    /// Every agent gets the fraction `w_i` of every good.
    pub fn uniform(weights: &[Rational], goods: usize) -> Result<Self> {
        Self::new(weights.iter().map(|w| vec![w.clone(); goods]).collect())
    }

    pub fn agents(&self) -> usize {
        self.rows.len()
    }

    pub fn goods(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, agent: usize, good: usize) -> &Rational {
        &self.rows[agent][good]
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.rows[agent]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(to_f64).collect())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_integer())
    }

    /// Linear value `Σ_g x_ig v_g` for a per-good value vector.
    pub fn linear_value(&self, agent: usize, values: &[Rational]) -> Rational {
        self.rows[agent]
            .iter()
            .zip(values)
            .map(|(x, v)| x * v)
            .sum()
    }
}

impl fmt::Display for FractionalAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A partition of the goods among the agents, stored as the owner of each
/// good so disjointness and completeness hold by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralAllocation {
    agents: usize,
    owner: Vec<usize>,
}

impl IntegralAllocation {
    pub fn from_owners(agents: usize, owner: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = owner.iter().find(|&&o| o >= agents) {
            return Err(Error::InvalidAllocation(format!(
                "owner {bad} outside {agents} agents"
            )));
        }
        Ok(IntegralAllocation { agents, owner })
    }

    /// Bundles must be pairwise disjoint and cover `0..goods`.
    pub fn from_bundles(bundles: &[Vec<usize>], goods: usize) -> Result<Self> {
        let mut owner = vec![usize::MAX; goods];
        for (i, bundle) in bundles.iter().enumerate() {
            for &g in bundle {
                if g >= goods {
                    return Err(Error::InvalidAllocation(format!(
                        "good {g} outside {goods} goods"
                    )));
                }
                if owner[g] != usize::MAX {
                    return Err(Error::InvalidAllocation(format!(
                        "good {g} assigned to agents {} and {i}",
                        owner[g]
                    )));
                }
                owner[g] = i;
            }
        }
        if let Some(g) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidAllocation(format!("good {g} unassigned")));
        }
        Ok(IntegralAllocation {
            agents: bundles.len(),
            owner,
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn goods(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, good: usize) -> usize {
        self.owner[good]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// Goods of `agent` in increasing index order.
    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        (0..self.owner.len())
            .filter(|&g| self.owner[g] == agent)
            .collect()
    }

    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut bundles = vec![Vec::new(); self.agents];
        for (g, &o) in self.owner.iter().enumerate() {
            bundles[o].push(g);
        }
        bundles
    }

    pub fn contains(&self, agent: usize, good: usize) -> bool {
        self.owner[good] == agent
    }

    /// The 0/1 matrix view.
    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        let mut rows = zero_matrix(self.agents, self.owner.len());
        for (g, &o) in self.owner.iter().enumerate() {
            rows[o][g] = Rational::one();
        }
        rows
    }

    pub fn to_fractional(&self) -> FractionalAllocation {
        FractionalAllocation {
            rows: self.to_matrix(),
        }
    }
}

impl fmt::Display for IntegralAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bundles()
            .iter()
            .map(|b| {
                let goods: Vec<String> = b.iter().map(|g| g.to_string()).collect();
                format!("{{{}}}", goods.join(","))
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A probability distribution over deterministic allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    support: Vec<(Rational, IntegralAllocation)>,
}

impl Lottery {
    /// Probabilities must be positive and sum to exactly one; all allocations
    /// must have the same shape.
    pub fn new(support: Vec<(Rational, IntegralAllocation)>) -> Result<Self> {
        let Some((_, first)) = support.first() else {
            return Err(Error::InvalidLottery("empty support".into()));
        };
        let (n, m) = (first.agents(), first.goods());
        if support
            .iter()
            .any(|(_, y)| y.agents() != n || y.goods() != m)
        {
            return Err(Error::InvalidLottery("allocations differ in shape".into()));
        }
        if let Some((p, _)) = support.iter().find(|(p, _)| !p.is_positive()) {
            return Err(Error::InvalidLottery(format!(
                "non-positive probability {p}"
            )));
        }
        let total: Rational = support.iter().map(|(p, _)| p).sum();
        if !total.is_one() {
            return Err(Error::InvalidLottery(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Lottery { support })
    }

    pub fn certain(allocation: IntegralAllocation) -> Self {
        Lottery {
            support: vec![(Rational::one(), allocation)],
        }
    }

    /// Sums probabilities of identical allocations; keeps first-seen order.
    pub fn merged(self) -> Self {
        let mut index: BTreeMap<IntegralAllocation, usize> = BTreeMap::new();
        let mut support: Vec<(Rational, IntegralAllocation)> = Vec::new();
        for (p, y) in self.support {
            match index.get(&y) {
                Some(&k) => support[k].0 += p,
                None => {
                    index.insert(y.clone(), support.len());
                    support.push((p, y));
                }
            }
        }
        Lottery { support }
    }

    pub fn support(&self) -> &[(Rational, IntegralAllocation)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn agents(&self) -> usize {
        self.support[0].1.agents()
    }

    pub fn goods(&self) -> usize {
        self.support[0].1.goods()
    }

    pub fn allocations(&self) -> impl Iterator<Item = &IntegralAllocation> {
        self.support.iter().map(|(_, y)| y)
    }

    /// `Σ_h λ_h Y^h`, exact.
    pub fn marginal_matrix(&self) -> FractionalAllocation {
        let mut rows = zero_matrix(self.agents(), self.goods());
        for (p, y) in &self.support {
            for (g, &o) in y.owners().iter().enumerate() {
                rows[o][g] += p;
            }
        }
        FractionalAllocation { rows }
    }
}

impl fmt::Display for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, y) in &self.support {
            writeln!(f, "{:>10}  {}", format_rational(p), y)?;
        }
        Ok(())
    }
}
