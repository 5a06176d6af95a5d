use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuation::Valuation;

/// A fair division instance with entitlements.
///
/// Weights are strictly positive and sum to exactly one; they are never
/// renormalized on load.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    goods: usize,
    weights: Vec<Rational>,
    valuations: Vec<Valuation>,
    good_order: Vec<usize>,
    /// `rank[g]` is the position of good `g` in `good_order`.
    rank: Vec<usize>,
}

impl Instance {
    pub fn new(
        weights: Vec<Rational>,
        valuations: Vec<Valuation>,
        good_order: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidInstance("at least one agent required".into()));
        }
        if valuations.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{n} weights but {} valuations",
                valuations.len()
            )));
        }
        let goods = valuations[0].goods();
        if goods == 0 {
            return Err(Error::InvalidInstance("at least one good required".into()));
        }
        for (agent, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight {
                    agent,
                    weight: w.clone(),
                });
            }
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::WeightSum(total));
        }
        for (agent, v) in valuations.iter().enumerate() {
            v.validate(agent, goods)?;
        }
        let good_order = good_order.unwrap_or_else(|| (0..goods).collect());
        let mut rank = vec![usize::MAX; goods];
        if good_order.len() != goods {
            return Err(Error::InvalidInstance(format!(
                "good_order has {} entries for {goods} goods",
                good_order.len()
            )));
        }
        for (pos, &g) in good_order.iter().enumerate() {
            if g >= goods || rank[g] != usize::MAX {
                return Err(Error::InvalidInstance(
                    "good_order is not a permutation of the goods".into(),
                ));
            }
            rank[g] = pos;
        }
        Ok(Instance {
            goods,
            weights,
            valuations,
            good_order,
            rank,
        })
    }

    /// Same goods, weights `1/n` for all agents.
    pub fn with_equal_weights(valuations: Vec<Valuation>) -> Result<Self> {
        let n = valuations.len() as i64;
        Self::new(
            vec![crate::rational::rat(1, n.max(1)); valuations.len()],
            valuations,
            None,
        )
    }

    pub fn agents(&self) -> usize {
        self.weights.len()
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, agent: usize) -> &Rational {
        &self.weights[agent]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    pub fn good_order(&self) -> &[usize] {
        &self.good_order
    }

    pub fn has_equal_weights(&self) -> bool {
        self.weights.iter().all(|w| *w == self.weights[0])
    }

    pub fn all_additive(&self) -> bool {
        self.valuations.iter().all(Valuation::is_additive)
    }

    /// `v_i(G)`.
    pub fn grand_value(&self, agent: usize) -> Rational {
        let all: Vec<usize> = (0..self.goods).collect();
        self.valuations[agent].value(&all)
    }

    /// Agent's ranking of single goods, best first; ties follow `good_order`.
    pub fn preference_order(&self, agent: usize) -> Vec<usize> {
        preference_order(&self.valuations[agent], &self.good_order)
    }

    pub fn preference_orders(&self) -> Vec<Vec<usize>> {
        (0..self.agents()).map(|i| self.preference_order(i)).collect()
    }

    pub(crate) fn tie_rank(&self, good: usize) -> usize {
        self.rank[good]
    }
}

/// Sorts goods by non-increasing single-good value, breaking ties by
/// position in `good_order`.
pub fn preference_order(valuation: &Valuation, good_order: &[usize]) -> Vec<usize> {
    let singles: Vec<Rational> = (0..good_order.len()).map(|g| valuation.single(g)).collect();
    order_by_values(&singles, good_order)
}

pub(crate) fn order_by_values(values: &[Rational], good_order: &[usize]) -> Vec<usize> {
    // good_order is already the tie-break order, so a stable sort of it by
    // decreasing value gives the answer.
    let mut order = good_order.to_vec();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]));
    order
}

pub(crate) fn zero_matrix(rows: usize, cols: usize) -> Vec<Vec<Rational>> {
    vec![vec![Rational::zero(); cols]; rows]
}
