//! Picking sequences: greedy execution, the prefix characterization of
//! WEF(x, y), recursive balance, and reconstruction of a sequence from the
//! stopping times of an allocation drawn from the eating lottery.

use std::fmt;

use num_traits::Zero;

use crate::allocation::IntegralAllocation;
use crate::decomp::{build_ug_bihierarchy_with_orders, check_feasible, Feasibility};
use crate::eating::EatingTrace;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{format_rational, int, Rational};
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PickingSequence {
    order: Vec<usize>,
}

impl PickingSequence {
    pub fn new(order: Vec<usize>, agents: usize) -> Result<Self> {
        if let Some(&a) = order.iter().find(|&&a| a >= agents) {
            return Err(Error::InvalidParameter(format!(
                "picking sequence names agent {a} but there are only {agents}"
            )));
        }
        Ok(PickingSequence { order })
    }

    /// `0 1 2 0 1 2 ...` of length `goods`.
    pub fn round_robin(agents: usize, goods: usize) -> Self {
        PickingSequence {
            order: (0..goods).map(|h| h % agents).collect(),
        }
    }

    /// Agent indices separated by whitespace or commas.
    pub fn parse(text: &str, agents: usize) -> Result<Self> {
        let order = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad agent index {tok:?} in picking sequence")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order, agents)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

impl fmt::Display for PickingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// At step `h` agent `π(h)` takes her most preferred available good, by
/// single-good ranking with ties broken by the instance's good order.
pub fn run_picking_sequence(instance: &Instance, pi: &PickingSequence) -> Result<IntegralAllocation> {
    let m = instance.goods();
    if pi.len() != m {
        return Err(Error::InvalidParameter(format!(
            "picking sequence has {} picks for {m} goods",
            pi.len()
        )));
    }
    if let Some(&a) = pi.order.iter().find(|&&a| a >= instance.agents()) {
        return Err(Error::InvalidParameter(format!("picking sequence names agent {a}")));
    }
    let orders = instance.preference_orders();
    let mut taken = vec![false; m];
    let mut owner = vec![0; m];
    for &a in &pi.order {
        let g = *orders[a].iter().find(|&&g| !taken[g]).expect("a good is left");
        taken[g] = true;
        owner[g] = a;
    }
    IntegralAllocation::from_owners(instance.agents(), owner)
}

/// A prefix and agent pair with `(t_i + y)/w_i < (t_j − x)/w_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixViolation {
    /// Number of picks in the prefix.
    pub prefix: usize,
    pub i: usize,
    pub j: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for PrefixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prefix {} i={} j={}: (t_i+y)/w_i = {} < (t_j-x)/w_j = {}",
            self.prefix,
            self.i,
            self.j,
            format_rational(&self.lhs),
            format_rational(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixVerdict {
    /// First violating prefix, if any.
    pub violation: Option<PrefixViolation>,
}

impl PrefixVerdict {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

fn prefix_violation(counts: &[i64], len: usize, weights: &[Rational], x: &Rational, y: &Rational) -> Option<PrefixViolation> {
    let n = weights.len();
    for i in 0..n {
        let lhs = (int(counts[i]) + y) / &weights[i];
        for j in (0..n).filter(|&j| j != i) {
            let rhs = (int(counts[j]) - x) / &weights[j];
            if lhs < rhs {
                return Some(PrefixViolation {
                    prefix: len,
                    i,
                    j,
                    lhs,
                    rhs,
                });
            }
        }
    }
    None
}

/// Every prefix violating the condition, each with its first failing pair.
pub fn violating_prefixes(pi: &PickingSequence, weights: &[Rational], x: &Rational, y: &Rational) -> Vec<PrefixViolation> {
    let mut counts = vec![0i64; weights.len()];
    let mut out = Vec::new();
    for (h, &a) in pi.order.iter().enumerate() {
        counts[a] += 1;
        out.extend(prefix_violation(&counts, h + 1, weights, x, y));
    }
    out
}

/// Checks `(t_i + y)/w_i ≥ (t_j − x)/w_j` on every prefix and pair; the
/// empty prefix always passes for `x, y ≥ 0`.
pub fn prefix_wef_condition(pi: &PickingSequence, weights: &[Rational], x: &Rational, y: &Rational) -> PrefixVerdict {
    let mut counts = vec![0i64; weights.len()];
    for (h, &a) in pi.order.iter().enumerate() {
        counts[a] += 1;
        if let Some(v) = prefix_violation(&counts, h + 1, weights, x, y) {
            return PrefixVerdict { violation: Some(v) };
        }
    }
    PrefixVerdict { violation: None }
}

/// Additive instance on which a prefix violating the condition produces a
/// WEF(x, y) failure: everyone values the first `prefix` goods at 1 and the
/// rest at 0, so greedy picks give each agent utility equal to her pick
/// count within the prefix.
pub fn adversarial_instance(weights: &[Rational], goods: usize, prefix: usize) -> Result<Instance> {
    let values: Vec<Rational> = (0..goods).map(|g| int((g < prefix) as i64)).collect();
    Instance::new(weights.to_vec(), vec![Valuation::Additive(values); weights.len()], None)
}

/// All prefixes have pick counts differing by at most one.
pub fn is_recursively_balanced(pi: &PickingSequence, agents: usize) -> bool {
    let mut counts = vec![0usize; agents];
    for &a in &pi.order {
        counts[a] += 1;
        let lo = counts.iter().min().expect("agents > 0");
        let hi = counts.iter().max().expect("agents > 0");
        if hi - lo > 1 {
            return false;
        }
    }
    true
}

/// Per agent, her goods in preference order with stopping times
/// `s(g_k) = min(t(g_k), k/w_i)`.
pub fn stopping_times(
    instance: &Instance,
    trace: &EatingTrace,
    alloc: &IntegralAllocation,
) -> Result<Vec<Vec<(usize, Rational)>>> {
    let x = trace.matrix(instance.weights())?;
    let h = build_ug_bihierarchy_with_orders(&trace.orders, &x);
    if let Feasibility::Violated(v) = check_feasible(alloc, &h) {
        return Err(Error::InfeasibleAllocation(v.to_string()));
    }
    Ok((0..instance.agents())
        .map(|i| {
            let w = instance.weight(i);
            trace.orders[i]
                .iter()
                .filter(|&&g| alloc.owner(g) == i)
                .enumerate()
                .map(|(k, &g)| {
                    let cap = int(k as i64 + 1) / w;
                    let t = &trace.finish_time[g];
                    (g, if *t < cap { t.clone() } else { cap })
                })
                .collect()
        })
        .collect())
}

/// Owners of the goods sorted by ascending stopping time, ties broken by
/// the instance's good order. Replaying it reproduces `alloc`.
pub fn stopping_time_sequence(
    instance: &Instance,
    trace: &EatingTrace,
    alloc: &IntegralAllocation,
) -> Result<PickingSequence> {
    let times = stopping_times(instance, trace, alloc)?;
    let mut picks: Vec<(Rational, usize, usize)> = times
        .into_iter()
        .enumerate()
        .flat_map(|(i, goods)| goods.into_iter().map(move |(g, s)| (s, g, i)))
        .map(|(s, g, i)| (s, instance.tie_rank(g), i))
        .collect();
    picks.sort();
    debug_assert!(picks.iter().all(|(s, _, _)| !s.is_zero()));
    PickingSequence::new(picks.into_iter().map(|(_, _, i)| i).collect(), instance.agents())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::check_wef_xy;
    use crate::eating::dse;
    use crate::rational::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn example_one() -> Instance {
        Instance::new(
            vec![rat(1, 2), rat(1, 3), rat(1, 6)],
            vec![
                Valuation::Additive(ints(&[8, 8, 5, 2])),
                Valuation::Additive(ints(&[3, 5, 4, 1])),
                Valuation::Additive(ints(&[4, 7, 6, 2])),
            ],
            None,
        )
        .unwrap()
    }

    fn alloc(bundles: &[&[usize]]) -> IntegralAllocation {
        let b: Vec<Vec<usize>> = bundles.iter().map(|b| b.to_vec()).collect();
        IntegralAllocation::from_bundles(&b, 4).unwrap()
    }

    #[test]
    fn greedy_replay_on_example_one() {
        let pi = PickingSequence::new(vec![0, 1, 2, 0], 3).unwrap();
        let y = run_picking_sequence(&example_one(), &pi).unwrap();
        assert_eq!(y, alloc(&[&[0, 3], &[1], &[2]]));
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::new(vec![int(1)], vec![Valuation::Additive(ints(&[1, 2, 3]))], None).unwrap();
        let y = run_picking_sequence(&inst, &PickingSequence::round_robin(1, 3)).unwrap();
        assert_eq!(y.bundle(0), vec![0, 1, 2]);
    }

    #[test]
    fn prefix_condition_examples() {
        let half = [rat(1, 2), rat(1, 2)];
        let rr = PickingSequence::round_robin(2, 6);
        assert!(prefix_wef_condition(&rr, &half, &int(1), &int(0)).holds());
        let greedy = PickingSequence::new(vec![0, 0, 0, 0], 2).unwrap();
        let v = prefix_wef_condition(&greedy, &half, &int(0), &int(0)).violation.unwrap();
        assert_eq!((v.prefix, v.i, v.j), (1, 1, 0));
        assert_eq!((v.lhs, v.rhs), (int(0), int(2)));
        let empty = PickingSequence::new(vec![], 2).unwrap();
        assert!(prefix_wef_condition(&empty, &half, &int(0), &int(0)).holds());
    }

    #[test]
    fn recursive_balance() {
        assert!(is_recursively_balanced(&PickingSequence::round_robin(3, 7), 3));
        assert!(!is_recursively_balanced(&PickingSequence::new(vec![0, 0, 1], 2).unwrap(), 2));
        assert!(is_recursively_balanced(&PickingSequence::new(vec![0, 1, 1, 0], 2).unwrap(), 2));
    }

    #[test]
    fn stopping_times_on_worked_supports() {
        let inst = example_one();
        let (_, trace) = dse(&inst);
        let y1 = alloc(&[&[0, 3], &[1], &[2]]);
        let s = stopping_times(&inst, &trace, &y1).unwrap();
        assert_eq!(s[0], vec![(0, int(2)), (3, int(4))]);
        let y3 = alloc(&[&[0, 3], &[2], &[1]]);
        let s = stopping_times(&inst, &trace, &y3).unwrap();
        assert_eq!(s[2], vec![(1, int(2))]);
    }

    #[test]
    fn stopping_sequences_replay_the_worked_supports() {
        let inst = example_one();
        let (_, trace) = dse(&inst);
        for y in [
            alloc(&[&[0, 3], &[1], &[2]]),
            alloc(&[&[0, 2], &[1], &[3]]),
            alloc(&[&[0, 3], &[2], &[1]]),
            alloc(&[&[0, 2], &[1, 3], &[]]),
        ] {
            let pi = stopping_time_sequence(&inst, &trace, &y).unwrap();
            assert_eq!(run_picking_sequence(&inst, &pi).unwrap(), y, "sequence {pi}");
            assert!(prefix_wef_condition(&pi, inst.weights(), &int(1), &int(1)).holds());
        }
    }

    #[test]
    fn infeasible_allocation_has_no_stopping_times() {
        let inst = example_one();
        let (_, trace) = dse(&inst);
        let bad = alloc(&[&[0, 2, 3], &[1], &[]]);
        assert!(matches!(stopping_times(&inst, &trace, &bad), Err(Error::InfeasibleAllocation(_))));
    }

    #[test]
    fn adversarial_instance_exposes_a_violating_prefix() {
        let w = [rat(1, 2), rat(1, 2)];
        let pi = PickingSequence::new(vec![0, 0, 1, 1], 2).unwrap();
        let (x, y) = (int(0), int(0));
        let v = prefix_wef_condition(&pi, &w, &x, &y).violation.unwrap();
        let inst = adversarial_instance(&w, 4, v.prefix).unwrap();
        let out = run_picking_sequence(&inst, &pi).unwrap();
        assert!(!check_wef_xy(&inst, &out, &x, &y).unwrap().holds);
    }
}
