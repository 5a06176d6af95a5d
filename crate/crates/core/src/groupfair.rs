//! Weighted maximum Nash welfare, competitive-equilibrium prices, and the
//! group-fair lottery.
//!
//! The fractional optimum of `∑ w_i ln v_i(X_i)` is the equilibrium of a
//! linear Fisher market in which agent `i` has budget `w_i`. It is
//! approximated by proportional-response dynamics. The approximate prices
//! then determine which goods are maximum bang-per-buck for whom, and from
//! that graph exact equilibrium prices and spending are recovered whenever
//! the dynamics got close enough. Otherwise the approximate matrix is
//! rounded to nearby rationals.

use std::collections::VecDeque;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::allocation::{FractionalAllocation, Lottery};
use crate::checkers::{FairnessReport, Num, Witness};
use crate::decomp::{build_ug_bihierarchy, decompose};
use crate::error::{Error, Result};
use crate::instance::{zero_matrix, Instance};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{approximate_f64, to_f64, Rational};

pub const GAP_TOLERANCE: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 1_000_000;
pub const MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverLog {
    pub iteration: usize,
    pub objective: f64,
    pub gap: f64,
}

/// Exact equilibrium allocation and prices.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactEquilibrium {
    pub allocation: FractionalAllocation,
    pub prices: Vec<Rational>,
}

/// Weighted MNW allocation: the proportional-response iterate, replaced by
/// the exact equilibrium whenever that could be recovered from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MwnSolution {
    /// Best available allocation: the exact one if recovered, else the
    /// final iterate.
    pub allocation: Vec<Vec<f64>>,
    pub prices: Vec<f64>,
    pub exact: Option<ExactEquilibrium>,
    /// Final iterate of the dynamics, kept for diagnostics.
    pub iterate: Vec<Vec<f64>>,
    pub iterate_prices: Vec<f64>,
    /// Final bids `b_ig`; agent `i` spends `w_i` in total.
    pub bids: Vec<Vec<f64>>,
    pub iterations: usize,
    pub gap: f64,
    /// Goods nobody values; given to agent 0 and left out of the market.
    pub unvalued: Vec<usize>,
    /// Objective and gap at geometrically spaced iterations.
    pub log: Vec<SolverLog>,
}

impl MwnSolution {
    pub fn converged(&self) -> bool {
        self.gap <= GAP_TOLERANCE
    }

    /// The exact allocation if recovered, else continued-fraction rounding
    /// of the iterate with denominators up to `MAX_DENOMINATOR`.
    pub fn rationalized(&self) -> Result<FractionalAllocation> {
        match &self.exact {
            Some(e) => Ok(e.allocation.clone()),
            None => rationalize(&self.iterate, MAX_DENOMINATOR),
        }
    }
}

fn additive_rows(instance: &Instance) -> Result<Vec<Vec<f64>>> {
    (0..instance.agents())
        .map(|i| {
            let v = instance.valuation(i);
            let vals = v.additive_values().ok_or_else(|| {
                Error::UnsupportedValuation(format!("weighted MNW needs additive valuations; agent {i} is {}", v.kind()))
            })?;
            Ok(vals.iter().map(to_f64).collect())
        })
        .collect()
}

fn exact_rows(instance: &Instance) -> Result<Vec<&[Rational]>> {
    (0..instance.agents())
        .map(|i| {
            instance
                .valuation(i)
                .additive_values()
                .ok_or_else(|| Error::UnsupportedValuation(format!("agent {i} is not additive")))
        })
        .collect()
}

/// Proportional-response dynamics until the duality gap drops to
/// `GAP_TOLERANCE` or `MAX_ITERATIONS` rounds have run, followed by exact
/// recovery of the equilibrium (see [`exact_equilibrium`]).
pub fn max_weighted_nash(instance: &Instance) -> Result<MwnSolution> {
    max_weighted_nash_with(instance, GAP_TOLERANCE, MAX_ITERATIONS)
}

pub fn max_weighted_nash_with(instance: &Instance, tolerance: f64, max_iterations: usize) -> Result<MwnSolution> {
    let mut sol = proportional_response(instance, tolerance, max_iterations)?;
    if let Some((allocation, prices)) = exact_equilibrium(instance, &sol)? {
        sol.allocation = allocation.to_f64_rows();
        sol.prices = prices.iter().map(to_f64).collect();
        sol.exact = Some(ExactEquilibrium { allocation, prices });
    }
    Ok(sol)
}

/// The dynamics alone; `exact` is left empty.
pub fn proportional_response(instance: &Instance, tolerance: f64, max_iterations: usize) -> Result<MwnSolution> {
    let v = additive_rows(instance)?;
    let (n, m) = (instance.agents(), instance.goods());
    let w: Vec<f64> = instance.weights().iter().map(to_f64).collect();
    if let Some(i) = (0..n).find(|&i| v[i].iter().all(|&x| x == 0.0)) {
        return Err(Error::ZeroValuation(i));
    }
    let unvalued: Vec<usize> = (0..m).filter(|&g| (0..n).all(|i| v[i][g] == 0.0)).collect();
    let market: Vec<usize> = (0..m).filter(|g| !unvalued.contains(g)).collect();

    let mut bids = vec![vec![0.0; m]; n];
    for i in 0..n {
        let total: f64 = market.iter().map(|&g| v[i][g]).sum();
        for &g in &market {
            bids[i][g] = w[i] * v[i][g] / total;
        }
    }
    let mut prices = vec![0.0; m];
    let mut x = vec![vec![0.0; m]; n];
    let mut log = Vec::new();
    let mut next_log = 1;
    let mut gap;
    let mut iterations = 0;
    loop {
        for &g in &market {
            prices[g] = (0..n).map(|i| bids[i][g]).sum();
            for i in 0..n {
                x[i][g] = if prices[g] > 0.0 { bids[i][g] / prices[g] } else { 0.0 };
            }
        }
        let utility: Vec<f64> = (0..n).map(|i| market.iter().map(|&g| v[i][g] * x[i][g]).sum()).collect();
        let primal: f64 = (0..n).map(|i| w[i] * utility[i].ln()).sum();
        let dual: f64 = market.iter().map(|&g| prices[g]).sum::<f64>()
            + (0..n)
                .map(|i| {
                    let beta = market
                        .iter()
                        .filter(|&&g| v[i][g] > 0.0)
                        .map(|&g| v[i][g] / prices[g])
                        .fold(0.0, f64::max);
                    w[i] * (beta * w[i]).ln() - w[i]
                })
                .sum::<f64>();
        gap = dual - primal;
        if iterations + 1 >= next_log || gap <= tolerance || iterations >= max_iterations {
            log.push(SolverLog {
                iteration: iterations,
                objective: primal,
                gap,
            });
            next_log *= 2;
        }
        if gap <= tolerance || iterations >= max_iterations {
            break;
        }
        for i in 0..n {
            for &g in &market {
                bids[i][g] = w[i] * v[i][g] * x[i][g] / utility[i];
            }
        }
        iterations += 1;
    }
    for &g in &unvalued {
        x[0][g] = 1.0;
    }
    Ok(MwnSolution {
        allocation: x.clone(),
        prices: prices.clone(),
        exact: None,
        iterate: x,
        iterate_prices: prices,
        bids,
        iterations,
        gap,
        unvalued,
        log,
    })
}

/// Rounds every entry to a nearby fraction with bounded denominator, then
/// restores exact column sums by adjusting each column's largest entry.
pub fn rationalize(rows: &[Vec<f64>], max_den: u64) -> Result<FractionalAllocation> {
    let (n, m) = (rows.len(), rows.first().map_or(0, Vec::len));
    let mut x = zero_matrix(n, m);
    for g in 0..m {
        for i in 0..n {
            x[i][g] = approximate_f64(rows[i][g].clamp(0.0, 1.0), max_den);
        }
        let total: Rational = (0..n).map(|i| &x[i][g]).sum();
        let top = (0..n).max_by(|&a, &b| x[a][g].cmp(&x[b][g]).then(b.cmp(&a))).expect("n > 0");
        x[top][g] += Rational::one() - total;
        if x[top][g].is_negative() {
            return Err(Error::InvalidAllocation(format!("column {g} cannot be renormalized")));
        }
    }
    FractionalAllocation::new(x)
}

/// `p_g = ∑_i x_ig · w_i · v_i(g) / v_i(X_i)`.
pub fn ce_prices(instance: &Instance, x: &FractionalAllocation) -> Result<Vec<Rational>> {
    let v = exact_rows(instance)?;
    let (n, m) = (instance.agents(), instance.goods());
    let mut prices = vec![Rational::zero(); m];
    for i in 0..n {
        let u = x.linear_value(i, v[i]);
        if !u.is_positive() {
            return Err(Error::ZeroUtility(i));
        }
        let scale = instance.weight(i) / u;
        for (g, p) in prices.iter_mut().enumerate() {
            *p += x.get(i, g) * &v[i][g] * &scale;
        }
    }
    Ok(prices)
}

fn tolerance(tol: f64) -> Rational {
    Rational::from_float(tol.max(0.0)).expect("finite tolerance")
}

/// Checks the three equilibrium conditions up to `tol`: prices are positive
/// exactly on goods somebody values; every held share (`x_ig > tol`) is
/// maximum bang-per-buck for its holder up to relative error `tol`; and
/// every agent spends her weight up to `tol`.
pub fn verify_ce(instance: &Instance, x: &FractionalAllocation, prices: &[Rational], tol: f64) -> Result<FairnessReport> {
    let v = exact_rows(instance)?;
    let (n, m) = (instance.agents(), instance.goods());
    let eps = tolerance(tol);
    for g in 0..m {
        let valued = (0..n).any(|i| v[i][g].is_positive());
        let positive = if eps.is_zero() { prices[g].is_positive() } else { prices[g] > eps };
        if valued != positive {
            return Ok(FairnessReport::fail(
                "ce",
                Witness::default()
                    .good(Some(g))
                    .sides(prices[g].clone(), Rational::zero())
                    .detail(if valued { "valued good without a positive price" } else { "unvalued good with a price" }),
            ));
        }
    }
    for i in 0..n {
        for g in (0..m).filter(|&g| x.get(i, g) > &eps && prices[g].is_positive()) {
            for h in (0..m).filter(|&h| prices[h].is_positive()) {
                // v_ig / p_g ≥ (1 − tol) v_ih / p_h, cross-multiplied.
                let lhs = &v[i][g] * &prices[h];
                let rhs = (Rational::one() - &eps) * &v[i][h] * &prices[g];
                if lhs < rhs {
                    return Ok(FairnessReport::fail(
                        "ce",
                        Witness::agent(i)
                            .good(Some(g))
                            .sides(&v[i][g] / &prices[g], &v[i][h] / &prices[h])
                            .detail(format!("good {h} has better bang per buck")),
                    ));
                }
            }
            if v[i][g].is_zero() {
                return Ok(FairnessReport::fail(
                    "ce",
                    Witness::agent(i).good(Some(g)).detail("holds a good she does not value"),
                ));
            }
        }
        let spend: Rational = (0..m).map(|g| x.get(i, g) * &prices[g]).sum();
        let w = instance.weight(i);
        if (&spend - w).abs() > eps {
            return Ok(FairnessReport::fail(
                "ce",
                Witness::agent(i).sides(spend, w.clone()).detail("spending differs from budget"),
            ));
        }
    }
    Ok(FairnessReport::pass("ce"))
}

/// First-order optimality of weighted MNW: for every `g` held by `j`
/// (`x_jg > tol`) and every `i`,
/// `w_j·v_j(g)/v_j(X_j) ≥ (1 − tol)·w_i·v_i(g)/v_i(X_i)`. An agent with zero
/// utility who values `g` makes the right side infinite.
pub fn mwn_gradient_inequality_check(instance: &Instance, x: &FractionalAllocation, tol: f64) -> Result<FairnessReport> {
    let v = exact_rows(instance)?;
    let (n, m) = (instance.agents(), instance.goods());
    let eps = tolerance(tol);
    let utility: Vec<Rational> = (0..n).map(|i| x.linear_value(i, v[i])).collect();
    let marginal = |i: usize, g: usize| -> Option<Rational> {
        if utility[i].is_positive() {
            Some(instance.weight(i) * &v[i][g] / &utility[i])
        } else if v[i][g].is_zero() {
            Some(Rational::zero())
        } else {
            None
        }
    };
    for j in 0..n {
        for g in (0..m).filter(|&g| x.get(j, g) > &eps) {
            let lhs = marginal(j, g);
            for i in (0..n).filter(|&i| i != j) {
                let rhs = marginal(i, g);
                let violated = match (&lhs, &rhs) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(l), Some(r)) => *l < (Rational::one() - &eps) * r,
                };
                if violated {
                    let mut w = Witness::pair(i, j).good(Some(g));
                    w.lhs = Some(lhs.clone().map_or(Num::Approx(f64::INFINITY), Num::Exact));
                    w.rhs = Some(rhs.map_or(Num::Approx(f64::INFINITY), Num::Exact));
                    return Ok(FairnessReport::fail("mwn-gradient", w));
                }
            }
        }
    }
    Ok(FairnessReport::pass("mwn-gradient"))
}

/// Relative tie thresholds tried when reading the bang-per-buck graph off
/// approximate prices.
const TIE_THRESHOLDS: [f64; 6] = [1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3];

/// Exact equilibrium recovered from approximate prices, if the dynamics
/// identified the right bang-per-buck graph.
///
/// Edges within a tie threshold of each agent's best ratio are joined into
/// a spanning forest, heaviest spending first. Along the forest the exact
/// price ratios are forced; each tree's scale follows from its budget. The
/// candidate prices are kept only if every agent's forest goods are exactly
/// maximum bang-per-buck and spending can be routed exactly along tight
/// edges, which an exact LP decides.
pub fn exact_equilibrium(instance: &Instance, solution: &MwnSolution) -> Result<Option<(FractionalAllocation, Vec<Rational>)>> {
    let v = exact_rows(instance)?;
    for tie in TIE_THRESHOLDS {
        if let Some(found) = snap(instance, &v, solution, tie) {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn snap(
    instance: &Instance,
    v: &[&[Rational]],
    sol: &MwnSolution,
    tie: f64,
) -> Option<(FractionalAllocation, Vec<Rational>)> {
    let (n, m) = (instance.agents(), instance.goods());
    let market: Vec<usize> = (0..m).filter(|g| !sol.unvalued.contains(g)).collect();
    let vf: Vec<Vec<f64>> = v.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        let beta = market
            .iter()
            .filter(|&&g| sol.iterate_prices[g] > 0.0)
            .map(|&g| vf[i][g] / sol.iterate_prices[g])
            .fold(0.0, f64::max);
        for &g in &market {
            let p = sol.iterate_prices[g];
            if vf[i][g] > 0.0 && p > 0.0 && vf[i][g] / p >= beta * (1.0 - tie) {
                edges.push((sol.bids[i][g], i, g));
            }
        }
    }
    edges.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Nodes: agents 0..n, goods n..n+m. Kruskal by spending.
    let mut parent: Vec<usize> = (0..n + m).collect();
    fn root(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for &(_, i, g) in &edges {
        let (a, b) = (root(&mut parent, i), root(&mut parent, n + g));
        if a != b {
            parent[a] = b;
            adj[i].push(n + g);
            adj[n + g].push(i);
        }
    }

    // Relative bang-per-buck α_i and prices p_g = v_ig / α_i per tree.
    let mut alpha: Vec<Option<Rational>> = vec![None; n];
    let mut price: Vec<Option<Rational>> = vec![None; m];
    let mut tree = vec![usize::MAX; n + m];
    let mut trees = 0;
    for start in 0..n {
        if alpha[start].is_some() {
            continue;
        }
        alpha[start] = Some(Rational::one());
        tree[start] = trees;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if tree[w] != usize::MAX {
                    continue;
                }
                tree[w] = trees;
                if u < n {
                    let g = w - n;
                    price[g] = Some(&v[u][g] / alpha[u].as_ref().expect("visited"));
                } else {
                    let g = u - n;
                    alpha[w] = Some(&v[w][g] / price[g].as_ref().expect("visited"));
                }
                queue.push_back(w);
            }
        }
        trees += 1;
    }
    if market.iter().any(|&g| price[g].is_none()) {
        return None;
    }
    let mut budget = vec![Rational::zero(); trees];
    let mut value = vec![Rational::zero(); trees];
    for i in 0..n {
        budget[tree[i]] += instance.weight(i);
    }
    for &g in &market {
        value[tree[n + g]] += price[g].as_ref().expect("priced");
    }
    let mut prices = vec![Rational::zero(); m];
    for &g in &market {
        let t = tree[n + g];
        prices[g] = price[g].as_ref().expect("priced") * &budget[t] / &value[t];
    }
    let mbb: Vec<Rational> = (0..n)
        .map(|i| {
            market
                .iter()
                .map(|&g| &v[i][g] / &prices[g])
                .max()
                .expect("market nonempty")
        })
        .collect();
    let tight: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| market.iter().map(move |&g| (i, g)))
        .filter(|&(i, g)| v[i][g].is_positive() && &v[i][g] / &prices[g] == mbb[i])
        .collect();

    let mut lp = LinearProgram::new(tight.len());
    for i in 0..n {
        let terms: Vec<(usize, Rational)> = tight
            .iter()
            .enumerate()
            .filter(|(_, e)| e.0 == i)
            .map(|(k, _)| (k, Rational::one()))
            .collect();
        lp.add_sparse(&terms, Relation::Eq, instance.weight(i).clone());
    }
    for &g in &market {
        let terms: Vec<(usize, Rational)> = tight
            .iter()
            .enumerate()
            .filter(|(_, e)| e.1 == g)
            .map(|(k, _)| (k, Rational::one()))
            .collect();
        lp.add_sparse(&terms, Relation::Eq, prices[g].clone());
    }
    let LpOutcome::Optimal { point, .. } = lp.feasibility() else {
        return None;
    };
    let mut x = zero_matrix(n, m);
    for (k, &(i, g)) in tight.iter().enumerate() {
        x[i][g] = &point[k] / &prices[g];
    }
    for &g in &sol.unvalued {
        x[0][g] = Rational::one();
    }
    let x = FractionalAllocation::new(x).ok()?;
    Some((x, prices))
}

/// Output of the group-fair pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFairOutcome {
    /// The matrix that was decomposed: the exact equilibrium allocation when
    /// it could be recovered, otherwise the rounded solver output.
    pub fractional: FractionalAllocation,
    pub lottery: Lottery,
    /// Equilibrium prices of `fractional`.
    pub prices: Vec<Rational>,
    /// Whether `fractional` is an exact equilibrium allocation.
    pub exact: bool,
    pub solver: MwnSolution,
}

/// Weighted MNW, made exact or rounded, then decomposed along the
/// utility-guarantee bihierarchy.
pub fn groupfair_lottery(instance: &Instance) -> Result<GroupFairOutcome> {
    let solver = max_weighted_nash(instance)?;
    let fractional = solver.rationalized()?;
    let exact = solver.exact.is_some();
    let prices = ce_prices(instance, &fractional)?;
    let h = build_ug_bihierarchy(instance, &fractional);
    let lottery = decompose(&fractional, &h)?;
    Ok(GroupFairOutcome {
        fractional,
        lottery,
        prices,
        exact,
        solver,
    })
}

/// Largest absolute entry-wise difference between two matrices.
pub fn max_deviation(a: &FractionalAllocation, b: &[Vec<f64>]) -> f64 {
    a.rows()
        .iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x.to_f64().unwrap_or(f64::NAN) - y).abs()))
        .fold(0.0, f64::max)
}
