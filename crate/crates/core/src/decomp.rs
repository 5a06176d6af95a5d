//! Bihierarchy constraints and decomposition of a fractional allocation into
//! a lottery over integral allocations that respect the same quotas.
//!
//! Both families are laminar, so each one forms a forest. The first forest
//! is hung below a super-source and the second above a super-sink; every
//! cell becomes one arc between the two. Integral points of the quota
//! polytope are then integral feasible circulations.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::allocation::{FractionalAllocation, IntegralAllocation, Lottery};
use crate::error::{Error, Result};
use crate::flow::{feasible_circulation, BoundedArc};
use crate::instance::Instance;
use crate::rational::{ceil_i64, floor_i64, format_rational, frac_part, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintLabel {
    Column(usize),
    Row(usize),
    /// The first `len` goods of `agent`'s preference order.
    Prefix { agent: usize, len: usize },
    Cell { agent: usize, good: usize },
    Named(String),
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintLabel::Column(g) => write!(f, "column[{g}]"),
            ConstraintLabel::Row(i) => write!(f, "row[{i}]"),
            ConstraintLabel::Prefix { agent, len } => write!(f, "prefix[agent={agent},len={len}]"),
            ConstraintLabel::Cell { agent, good } => write!(f, "cell[{agent},{good}]"),
            ConstraintLabel::Named(s) => f.write_str(s),
        }
    }
}

/// A set of cells `(agent, good)` whose sum must lie in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub label: ConstraintLabel,
    pub cells: Vec<(usize, usize)>,
    pub lower: i64,
    pub upper: i64,
}

impl Constraint {
    pub fn new(label: ConstraintLabel, cells: Vec<(usize, usize)>, lower: i64, upper: i64) -> Self {
        Constraint {
            label,
            cells,
            lower,
            upper,
        }
    }

    /// Quotas `⌊x_S⌋, ⌈x_S⌉` taken from the matrix.
    pub fn rounding(label: ConstraintLabel, cells: Vec<(usize, usize)>, x: &[Vec<Rational>]) -> Self {
        let sum = cell_sum(&cells, x);
        Constraint {
            label,
            cells,
            lower: floor_i64(&sum),
            upper: ceil_i64(&sum),
        }
    }

    pub fn sum(&self, x: &[Vec<Rational>]) -> Rational {
        cell_sum(&self.cells, x)
    }

    fn integral_sum(&self, y: &IntegralAllocation) -> i64 {
        self.cells.iter().filter(|&&(i, g)| y.owner(g) == i).count() as i64
    }
}

fn cell_sum(cells: &[(usize, usize)], x: &[Vec<Rational>]) -> Rational {
    cells.iter().map(|&(i, g)| &x[i][g]).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bihierarchy {
    agents: usize,
    goods: usize,
    family_one: Vec<Constraint>,
    family_two: Vec<Constraint>,
    /// Order in which cell arcs are offered to the flow search.
    cell_order: Vec<(usize, usize)>,
    parents_one: Vec<Option<usize>>,
    parents_two: Vec<Option<usize>>,
    /// Smallest set of each family containing a cell, indexed `i * m + g`.
    leaf_one: Vec<Option<usize>>,
    leaf_two: Vec<Option<usize>>,
}

impl Bihierarchy {
    /// Validates cell ranges, quota order and laminarity of both families.
    pub fn new(
        agents: usize,
        goods: usize,
        family_one: Vec<Constraint>,
        family_two: Vec<Constraint>,
    ) -> Result<Self> {
        for c in family_one.iter().chain(&family_two) {
            if c.lower > c.upper {
                return Err(Error::InvalidParameter(format!(
                    "constraint {} has lower {} above upper {}",
                    c.label, c.lower, c.upper
                )));
            }
            if let Some(&(i, g)) = c.cells.iter().find(|&&(i, g)| i >= agents || g >= goods) {
                return Err(Error::InvalidParameter(format!(
                    "constraint {} names cell ({i},{g}) outside {agents}x{goods}",
                    c.label
                )));
            }
        }
        let (parents_one, leaf_one) = forest("one", &family_one, agents, goods)?;
        let (parents_two, leaf_two) = forest("two", &family_two, agents, goods)?;
        let cell_order = (0..agents)
            .flat_map(|i| (0..goods).map(move |g| (i, g)))
            .collect();
        Ok(Bihierarchy {
            agents,
            goods,
            family_one,
            family_two,
            cell_order,
            parents_one,
            parents_two,
            leaf_one,
            leaf_two,
        })
    }

    /// Columns in the first family and rows in the second, with quotas
    /// rounded from `x`.
    pub fn rows_and_columns(x: &FractionalAllocation) -> Self {
        let (n, m) = (x.agents(), x.goods());
        let cols = (0..m)
            .map(|g| {
                Constraint::rounding(
                    ConstraintLabel::Column(g),
                    (0..n).map(|i| (i, g)).collect(),
                    x.rows(),
                )
            })
            .collect();
        let rows = (0..n)
            .map(|i| {
                Constraint::rounding(
                    ConstraintLabel::Row(i),
                    (0..m).map(|g| (i, g)).collect(),
                    x.rows(),
                )
            })
            .collect();
        Self::new(n, m, cols, rows).expect("rows and columns are laminar")
    }

    /// Replaces the cell scan order; must be a permutation of all cells.
    pub fn with_cell_order(mut self, order: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; self.agents * self.goods];
        for &(i, g) in &order {
            if i >= self.agents || g >= self.goods || std::mem::replace(&mut seen[i * self.goods + g], true) {
                return Err(Error::InvalidParameter("cell order is not a permutation".into()));
            }
        }
        if order.len() != seen.len() {
            return Err(Error::InvalidParameter("cell order is not a permutation".into()));
        }
        self.cell_order = order;
        Ok(self)
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn goods(&self) -> usize {
        self.goods
    }

    pub fn family_one(&self) -> &[Constraint] {
        &self.family_one
    }

    pub fn family_two(&self) -> &[Constraint] {
        &self.family_two
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.family_one.iter().chain(&self.family_two)
    }

    pub fn find(&self, label: &ConstraintLabel) -> Option<&Constraint> {
        self.constraints().find(|c| &c.label == label)
    }

    /// Verifies that a fractional matrix respects every quota.
    pub fn check_matrix(&self, x: &[Vec<Rational>]) -> Result<()> {
        for c in self.constraints() {
            let sum = c.sum(x);
            if sum < int(c.lower) || sum > int(c.upper) {
                return Err(Error::QuotaViolated {
                    label: c.label.to_string(),
                    sum,
                    lower: c.lower,
                    upper: c.upper,
                });
            }
        }
        Ok(())
    }

    /// One line per constraint: label, quotas and the sum achieved by `x`.
    pub fn dump(&self, x: &[Vec<Rational>]) -> String {
        let mut out = String::new();
        for (family, cs) in [("H1", &self.family_one), ("H2", &self.family_two)] {
            for c in cs {
                out.push_str(&format!(
                    "{family} {} lower={} upper={} sum={}\n",
                    c.label,
                    c.lower,
                    c.upper,
                    format_rational(&c.sum(x))
                ));
            }
        }
        out
    }

    fn node_name(&self, node: usize) -> String {
        match node {
            SOURCE => "source".into(),
            SINK => "sink".into(),
            v if v - 2 < self.family_one.len() => format!("H1 {}", self.family_one[v - 2].label),
            v => format!("H2 {}", self.family_two[v - 2 - self.family_one.len()].label),
        }
    }

    /// An integral matrix with each constraint sum inside the given bounds and
    /// each cell inside `cell_bounds[i * m + g]`.
    fn solve(
        &self,
        bounds_one: &[(i64, i64)],
        bounds_two: &[(i64, i64)],
        cell_bounds: &[(i64, i64)],
    ) -> Result<Vec<Vec<bool>>> {
        let k1 = self.family_one.len();
        let nodes = 2 + k1 + self.family_two.len();
        let one = |s: Option<usize>| s.map_or(SOURCE, |s| 2 + s);
        let two = |s: Option<usize>| s.map_or(SINK, |s| 2 + k1 + s);
        let mut arcs = Vec::with_capacity(nodes + cell_bounds.len());
        let cell_start = arcs.len();
        for &(i, g) in &self.cell_order {
            let c = i * self.goods + g;
            let (lower, upper) = cell_bounds[c];
            arcs.push(BoundedArc {
                from: one(self.leaf_one[c]),
                to: two(self.leaf_two[c]),
                lower,
                upper,
            });
        }
        for (s, &(lower, upper)) in bounds_one.iter().enumerate() {
            arcs.push(BoundedArc {
                from: one(self.parents_one[s]),
                to: 2 + s,
                lower,
                upper,
            });
        }
        for (s, &(lower, upper)) in bounds_two.iter().enumerate() {
            arcs.push(BoundedArc {
                from: 2 + k1 + s,
                to: two(self.parents_two[s]),
                lower,
                upper,
            });
        }
        let big = (self.agents * self.goods) as i64 + 1;
        arcs.push(BoundedArc {
            from: SINK,
            to: SOURCE,
            lower: 0,
            upper: big,
        });
        let flows = feasible_circulation(nodes, &arcs).map_err(|inf| Error::NoIntegralPoint {
            deficit: inf.deficit,
            cut: inf.cut.iter().map(|&v| self.node_name(v)).collect(),
        })?;
        let mut y = vec![vec![false; self.goods]; self.agents];
        for (k, &(i, g)) in self.cell_order.iter().enumerate() {
            y[i][g] = flows[cell_start + k] == 1;
        }
        Ok(y)
    }
}

const SOURCE: usize = 0;
const SINK: usize = 1;

type Forest = (Vec<Option<usize>>, Vec<Option<usize>>);

/// Parent links and, per cell, the smallest containing set. Sets are placed
/// largest first; a set is laminar with everything placed before it iff all
/// its cells currently share the same smallest container.
fn forest(name: &'static str, family: &[Constraint], n: usize, m: usize) -> Result<Forest> {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(family[s].cells.len()));
    let mut parents = vec![None; family.len()];
    let mut leaf: Vec<Option<usize>> = vec![None; n * m];
    for s in order {
        let cells = &family[s].cells;
        let mut seen = std::collections::HashSet::new();
        if !cells.iter().all(|c| seen.insert(*c)) {
            return Err(Error::NotLaminar(
                name,
                format!("constraint {} repeats a cell", family[s].label),
            ));
        }
        let Some(&(i0, g0)) = cells.first() else {
            continue;
        };
        let parent = leaf[i0 * m + g0];
        if let Some(&(i, g)) = cells.iter().find(|&&(i, g)| leaf[i * m + g] != parent) {
            let other = leaf[i * m + g].or(parent).expect("one side is a set");
            return Err(Error::NotLaminar(
                name,
                format!("{} crosses {} at cell ({i},{g})", family[s].label, family[other].label),
            ));
        }
        parents[s] = parent;
        for &(i, g) in cells {
            leaf[i * m + g] = Some(s);
        }
    }
    Ok((parents, leaf))
}

/// The utility-guarantee bihierarchy of `x` for the instance's preference
/// orders.
pub fn build_ug_bihierarchy(instance: &Instance, x: &FractionalAllocation) -> Bihierarchy {
    build_ug_bihierarchy_with_orders(&instance.preference_orders(), x)
}

/// Columns in the first family; in the second, every prefix of every
/// agent's order plus all singleton cells. Quotas round the sums of `x`.
pub fn build_ug_bihierarchy_with_orders(orders: &[Vec<usize>], x: &FractionalAllocation) -> Bihierarchy {
    let (n, m) = (x.agents(), x.goods());
    let rows = x.rows();
    let columns = (0..m)
        .map(|g| Constraint::rounding(ConstraintLabel::Column(g), (0..n).map(|i| (i, g)).collect(), rows))
        .collect();
    let mut second = Vec::with_capacity(2 * n * m);
    for (i, order) in orders.iter().enumerate() {
        for len in 1..=m {
            let cells = order[..len].iter().map(|&g| (i, g)).collect();
            second.push(Constraint::rounding(ConstraintLabel::Prefix { agent: i, len }, cells, rows));
        }
    }
    for (i, order) in orders.iter().enumerate() {
        for &g in order {
            second.push(Constraint::rounding(ConstraintLabel::Cell { agent: i, good: g }, vec![(i, g)], rows));
        }
    }
    let cell_order = orders
        .iter()
        .enumerate()
        .flat_map(|(i, o)| o.iter().map(move |&g| (i, g)))
        .collect();
    Bihierarchy::new(n, m, columns, second)
        .expect("prefix chains and singletons are laminar")
        .with_cell_order(cell_order)
        .expect("orders are permutations")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub label: ConstraintLabel,
    pub sum: i64,
    pub lower: i64,
    pub upper: i64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: sum {} outside [{}, {}]", self.label, self.sum, self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Violated(Violation),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Checks every constraint of `h` against `y`, reporting the first failure
/// (first family, then second, in construction order).
pub fn check_feasible(y: &IntegralAllocation, h: &Bihierarchy) -> Feasibility {
    for c in h.constraints() {
        let sum = c.integral_sum(y);
        if sum < c.lower || sum > c.upper {
            return Feasibility::Violated(Violation {
                label: c.label.clone(),
                sum,
                lower: c.lower,
                upper: c.upper,
            });
        }
    }
    Feasibility::Feasible
}

/// An integral allocation within the quotas of `h`, using only cells where
/// `support_mask[i][g]` holds.
pub fn integral_point(h: &Bihierarchy, support_mask: &[Vec<bool>]) -> Result<IntegralAllocation> {
    let cell_bounds: Vec<(i64, i64)> = (0..h.agents)
        .flat_map(|i| (0..h.goods).map(move |g| (0, support_mask[i][g] as i64)))
        .collect();
    let quotas = |cs: &[Constraint]| cs.iter().map(|c| (c.lower, c.upper)).collect::<Vec<_>>();
    let y = h.solve(&quotas(&h.family_one), &quotas(&h.family_two), &cell_bounds)?;
    to_allocation(&y)
}

fn to_allocation(y: &[Vec<bool>]) -> Result<IntegralAllocation> {
    let (n, m) = (y.len(), y[0].len());
    let owner = (0..m)
        .map(|g| {
            let holders: Vec<usize> = (0..n).filter(|&i| y[i][g]).collect();
            match holders[..] {
                [i] => Ok(i),
                _ => Err(Error::InvalidAllocation(format!(
                    "good {g} assigned to {} agents; the bihierarchy does not pin column sums to 1",
                    holders.len()
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    IntegralAllocation::from_owners(n, owner)
}

/// Writes `x` as a lottery over integral allocations, each feasible under
/// the quotas of `h`, whose marginal is exactly `x`.
///
/// Every round rounds the residual matrix's constraint sums to their floor
/// and ceiling, extracts an integral point of that box, and removes the
/// largest multiple that keeps the residual inside it. At least one
/// fractional sum becomes integral per round. Supports larger than
/// `cells + 1` are then thinned by affine dependence.
pub fn decompose(x: &FractionalAllocation, h: &Bihierarchy) -> Result<Lottery> {
    let (n, m) = (x.agents(), x.goods());
    if (n, m) != (h.agents, h.goods) {
        return Err(Error::InvalidParameter(format!(
            "matrix is {n}x{m} but bihierarchy is {}x{}",
            h.agents, h.goods
        )));
    }
    h.check_matrix(x.rows())?;

    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |g| (i, g))).collect();
    let mut z: Vec<Vec<Rational>> = x.rows().to_vec();
    let mut mass = Rational::one();
    let mut support: Vec<(Rational, IntegralAllocation)> = Vec::new();

    loop {
        let sums_one: Vec<Rational> = h.family_one.iter().map(|c| c.sum(&z)).collect();
        let sums_two: Vec<Rational> = h.family_two.iter().map(|c| c.sum(&z)).collect();
        let sums_cell: Vec<&Rational> = cells.iter().map(|&(i, g)| &z[i][g]).collect();
        let round = |s: &Rational| (floor_i64(s), ceil_i64(s));
        let y = h.solve(
            &sums_one.iter().map(round).collect::<Vec<_>>(),
            &sums_two.iter().map(round).collect::<Vec<_>>(),
            &sums_cell.iter().map(|s| round(s)).collect::<Vec<_>>(),
        )?;
        let alloc = to_allocation(&y)?;

        let achieved_one = h.family_one.iter().map(|c| c.integral_sum(&alloc));
        let achieved_two = h.family_two.iter().map(|c| c.integral_sum(&alloc));
        let achieved_cell = cells.iter().map(|&(i, g)| y[i][g] as i64);
        let mut lambda: Option<Rational> = None;
        let all_sums = sums_one.iter().chain(&sums_two).chain(sums_cell.iter().copied());
        for (s, achieved) in all_sums.zip(achieved_one.chain(achieved_two).chain(achieved_cell)) {
            let phi = frac_part(s);
            if phi.is_zero() {
                continue;
            }
            let room = if achieved == ceil_i64(s) { phi } else { Rational::one() - phi };
            if lambda.as_ref().map_or(true, |l| room < *l) {
                lambda = Some(room);
            }
        }
        let Some(lambda) = lambda else {
            support.push((mass, alloc));
            break;
        };
        support.push((&mass * &lambda, alloc));
        let rest = Rational::one() - &lambda;
        for (i, row) in z.iter_mut().enumerate() {
            for (g, v) in row.iter_mut().enumerate() {
                if y[i][g] {
                    *v -= &lambda;
                }
                *v /= &rest;
            }
        }
        mass *= rest;
    }

    let mut lottery = Lottery::new(support)?.merged();
    if lottery.len() > n * m + 1 {
        lottery = thin_support(lottery)?;
    }
    Ok(lottery)
}

/// Removes allocations while an affine dependence among the support exists,
/// keeping the marginal matrix unchanged.
fn thin_support(lottery: Lottery) -> Result<Lottery> {
    let mut support: Vec<(Rational, IntegralAllocation)> = lottery.support().to_vec();
    let (n, m) = (lottery.agents(), lottery.goods());
    while let Some(mu) = affine_dependence(&support, n, m) {
        let step = support
            .iter()
            .zip(&mu)
            .filter(|(_, u)| u.is_positive())
            .map(|((p, _), u)| p / u)
            .min()
            .expect("dependence sums to zero so has a positive entry");
        let mut next = Vec::with_capacity(support.len());
        for ((p, y), u) in support.into_iter().zip(&mu) {
            let q = p - &step * u;
            if q.is_positive() {
                next.push((q, y));
            }
        }
        support = next;
    }
    Lottery::new(support)
}

/// A nonzero `μ` with `Σ μ_h Y^h = 0` and `Σ μ_h = 0`, if the support is
/// affinely dependent.
fn affine_dependence(support: &[(Rational, IntegralAllocation)], n: usize, m: usize) -> Option<Vec<Rational>> {
    let k = support.len();
    let mut rows: Vec<Vec<Rational>> = (0..n * m)
        .map(|c| {
            support
                .iter()
                .map(|(_, y)| if y.owner(c % m) == c / m { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    rows.push(vec![Rational::one(); k]);
    let pivots = reduce_rows(&mut rows, k);
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut mu = vec![Rational::zero(); k];
    mu[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        mu[pc] = -rows[r][free].clone();
    }
    Some(mu)
}

/// In-place reduced row echelon form; returns the pivot column of each
/// leading row.
fn reduce_rows(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&p| !rows[p][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (q, row) in rows.iter_mut().enumerate() {
            if q != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eating::dse;
    use crate::rational::rat;
    use crate::valuation::Valuation;

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

    fn quota(h: &Bihierarchy, label: ConstraintLabel) -> (i64, i64) {
        let c = h.find(&label).unwrap();
        (c.lower, c.upper)
    }

    #[test]
    fn agent_one_quotas_match_the_worked_example() {
        let inst = example_one();
        let (x, _) = dse(&inst);
        let h = build_ug_bihierarchy(&inst, &x);
        let p = |len| ConstraintLabel::Prefix { agent: 0, len };
        assert_eq!(quota(&h, p(1)), (1, 1));
        assert_eq!(quota(&h, p(2)), (1, 1));
        assert_eq!(quota(&h, p(3)), (1, 2));
        assert_eq!(quota(&h, p(4)), (2, 2));
        assert_eq!(quota(&h, ConstraintLabel::Cell { agent: 0, good: 1 }), (0, 0));
        assert_eq!(quota(&h, ConstraintLabel::Prefix { agent: 2, len: 4 }), (0, 1));
        assert_eq!(quota(&h, ConstraintLabel::Cell { agent: 2, good: 0 }), (0, 0));
    }

    #[test]
    fn worked_example_allocations_are_feasible() {
        let inst = example_one();
        let (x, _) = dse(&inst);
        let h = build_ug_bihierarchy(&inst, &x);
        for y in [
            alloc(&[&[0, 3], &[1], &[2]]),
            alloc(&[&[0, 2], &[1], &[3]]),
            alloc(&[&[0, 3], &[2], &[1]]),
            alloc(&[&[0, 2], &[1, 3], &[]]),
        ] {
            assert!(check_feasible(&y, &h).is_feasible(), "{y}");
        }
        match check_feasible(&alloc(&[&[0, 2, 3], &[1], &[]]), &h) {
            Feasibility::Violated(v) => {
                assert_eq!(v.label, ConstraintLabel::Prefix { agent: 0, len: 4 });
                assert_eq!(v.sum, 3);
            }
            Feasibility::Feasible => panic!("agent 0 cannot hold three goods"),
        }
    }

    #[test]
    fn decomposes_example_one_exactly() {
        let inst = example_one();
        let (x, _) = dse(&inst);
        let h = build_ug_bihierarchy(&inst, &x);
        let lottery = decompose(&x, &h).unwrap();
        assert_eq!(lottery.marginal_matrix(), x);
        assert!(lottery.len() <= 13);
        for y in lottery.allocations() {
            assert!(check_feasible(y, &h).is_feasible());
        }
    }

    #[test]
    fn integral_matrix_gives_a_certain_lottery() {
        let y = alloc(&[&[0, 2], &[1], &[3]]);
        let x = y.to_fractional();
        let inst = example_one();
        let h = build_ug_bihierarchy(&inst, &x);
        assert!(h.constraints().all(|c| c.lower == c.upper));
        let lottery = decompose(&x, &h).unwrap();
        assert_eq!(lottery, Lottery::certain(y.clone()));
        let mask: Vec<Vec<bool>> = x.rows().iter().map(|r| r.iter().map(|v| v.is_one()).collect()).collect();
        assert_eq!(integral_point(&h, &mask).unwrap(), y);
    }

    #[test]
    fn birkhoff_two_by_two() {
        let half = rat(1, 2);
        let x = FractionalAllocation::new(vec![vec![half.clone(), half.clone()], vec![half.clone(), half]]).unwrap();
        let h = Bihierarchy::rows_and_columns(&x);
        let lottery = decompose(&x, &h).unwrap();
        assert_eq!(lottery.len(), 2);
        assert!(lottery.support().iter().all(|(p, _)| *p == rat(1, 2)));
        assert_eq!(lottery.marginal_matrix(), x);
    }

    #[test]
    fn pinned_cell_outside_mask_yields_a_certificate() {
        let inst = example_one();
        let (x, _) = dse(&inst);
        let h = build_ug_bihierarchy(&inst, &x);
        let mut mask = vec![vec![true; 4]; 3];
        mask[0][0] = false;
        match integral_point(&h, &mask) {
            Err(Error::NoIntegralPoint { deficit, cut }) => {
                assert!(deficit > 0);
                assert!(!cut.is_empty());
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn rejects_crossing_sets() {
        let a = Constraint::new(ConstraintLabel::Named("a".into()), vec![(0, 0), (0, 1)], 0, 2);
        let b = Constraint::new(ConstraintLabel::Named("b".into()), vec![(0, 1), (0, 2)], 0, 2);
        let err = Bihierarchy::new(1, 3, vec![a, b], vec![]).unwrap_err();
        assert!(matches!(err, Error::NotLaminar("one", _)), "{err}");
    }

    #[test]
    fn matrix_outside_quotas_is_reported() {
        let inst = example_one();
        let (x, _) = dse(&inst);
        let h = build_ug_bihierarchy(&inst, &x);
        let other = FractionalAllocation::uniform(inst.weights(), 4).unwrap();
        assert!(matches!(decompose(&other, &h), Err(Error::QuotaViolated { .. })));
    }

    #[test]
    fn trivial_quotas_accept_everything() {
        let x = FractionalAllocation::uniform(&[rat(1, 2), rat(1, 2)], 3).unwrap();
        let wide = |label, cells| Constraint::new(label, cells, 0, 3);
        let h = Bihierarchy::new(
            2,
            3,
            (0..3).map(|g| wide(ConstraintLabel::Column(g), vec![(0, g), (1, g)])).collect(),
            (0..2).map(|i| wide(ConstraintLabel::Row(i), (0..3).map(|g| (i, g)).collect())).collect(),
        )
        .unwrap();
        for owners in [[0, 0, 0], [1, 0, 1], [1, 1, 1]] {
            let y = IntegralAllocation::from_owners(2, owners.to_vec()).unwrap();
            assert!(check_feasible(&y, &h).is_feasible());
        }
        assert!(h.dump(x.rows()).lines().count() == 5);
    }
}
