//! Decision procedures for ex-post and ex-ante fairness notions.
//!
//! Every checker returns a [`FairnessReport`]. A failing report carries the
//! first violating agent pair in lexicographic order together with both
//! sides of the violated inequality, evaluated exactly.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::allocation::{FractionalAllocation, IntegralAllocation, Lottery};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{format_rational, int, Rational};

/// A number inside a witness: exact when the check was exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(Rational),
    Approx(f64),
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(r) => f.write_str(&format_rational(r)),
            Num::Approx(x) => write!(f, "{x:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Witness {
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub g: Option<usize>,
    pub lhs: Option<Num>,
    pub rhs: Option<Num>,
    pub detail: Option<String>,
}

impl Witness {
    pub fn pair(i: usize, j: usize) -> Self {
        Witness {
            i: Some(i),
            j: Some(j),
            ..Default::default()
        }
    }

    pub fn agent(i: usize) -> Self {
        Witness {
            i: Some(i),
            ..Default::default()
        }
    }

    pub fn good(mut self, g: Option<usize>) -> Self {
        self.g = g;
        self
    }

    pub fn sides(mut self, lhs: Rational, rhs: Rational) -> Self {
        self.lhs = Some(Num::Exact(lhs));
        self.rhs = Some(Num::Exact(rhs));
        self
    }

    pub fn approx_sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = Some(Num::Approx(lhs));
        self.rhs = Some(Num::Approx(rhs));
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("witness")?;
        if let Some(i) = self.i {
            write!(f, " i={i}")?;
        }
        if let Some(j) = self.j {
            write!(f, " j={j}")?;
        }
        if let Some(g) = self.g {
            write!(f, " g={g}")?;
        }
        if let Some(l) = &self.lhs {
            write!(f, " lhs={l}")?;
        }
        if let Some(r) = &self.rhs {
            write!(f, " rhs={r}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, " detail=\"{d}\"")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub notion: String,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl FairnessReport {
    pub fn pass(notion: impl Into<String>) -> Self {
        FairnessReport {
            notion: notion.into(),
            holds: true,
            witness: None,
        }
    }

    pub fn fail(notion: impl Into<String>, witness: Witness) -> Self {
        FairnessReport {
            notion: notion.into(),
            holds: false,
            witness: Some(witness),
        }
    }

    /// A passing report that still names what certified it.
    pub fn pass_with(notion: impl Into<String>, witness: Witness) -> Self {
        FairnessReport {
            notion: notion.into(),
            holds: true,
            witness: Some(witness),
        }
    }

    pub fn renamed(mut self, notion: impl Into<String>) -> Self {
        self.notion = notion.into();
        self
    }
}

impl fmt::Display for FairnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.notion, self.holds)?;
        if let Some(w) = &self.witness {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// Runs `check` on every support allocation and reports the first failure,
/// tagging the witness with the allocation's index.
pub fn check_support(
    lottery: &Lottery,
    mut check: impl FnMut(&IntegralAllocation) -> Result<FairnessReport>,
) -> Result<FairnessReport> {
    let mut notion = None;
    for (h, y) in lottery.allocations().enumerate() {
        let r = check(y)?;
        if !r.holds {
            let mut w = r.witness.unwrap_or_default();
            let d = match w.detail.take() {
                Some(d) => format!("support allocation {h}; {d}"),
                None => format!("support allocation {h}"),
            };
            return Ok(FairnessReport::fail(r.notion, w.detail(d)));
        }
        notion = Some(r.notion);
    }
    Ok(FairnessReport::pass(notion.unwrap_or_default()))
}

/// Prints a rational compactly: integers without a denominator.
fn short(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format_rational(r)
    }
}

pub fn wef_xy_notion(x: &Rational, y: &Rational) -> String {
    format!("wef({},{})", short(x), short(y))
}

fn with_good(bundle: &[usize], g: usize) -> Vec<usize> {
    let mut b = bundle.to_vec();
    if !b.contains(&g) {
        b.push(g);
    }
    b
}

fn without_good(bundle: &[usize], g: usize) -> Vec<usize> {
    bundle.iter().copied().filter(|&h| h != g).collect()
}

/// `WEF(x, y)`: for all `i, j` some `g ∈ A_j` has
/// `w_j (v_i(A_i) + y·v_i(g)) ≥ w_i (v_i(A_j) − x·v_i(g))`; an empty `A_j`
/// is fine.
///
/// Additive agents are checked with `g` their most valuable good of `A_j`,
/// which is optimal for the linear form. Other valuations are accepted only
/// at the four corners `x, y ∈ {0, 1}`, read as the set form
/// `w_j·v_i(A_i ∪ {g}) ≥ w_i·v_i(A_j \ {g})` with the added or removed good
/// dropped where its coefficient is zero; there every `g ∈ A_j` is tried.
pub fn check_wef_xy(
    instance: &Instance,
    alloc: &IntegralAllocation,
    x: &Rational,
    y: &Rational,
) -> Result<FairnessReport> {
    let unit = |r: &Rational| !r.is_negative() && *r <= Rational::one();
    if !unit(x) || !unit(y) {
        return Err(Error::InvalidParameter(format!(
            "WEF(x,y) needs x, y in [0,1], got ({}, {})",
            short(x),
            short(y)
        )));
    }
    let corner = |r: &Rational| r.is_zero() || r.is_one();
    let notion = wef_xy_notion(x, y);
    let n = instance.agents();
    if let Some(i) = (0..n).find(|&i| !instance.valuation(i).is_additive()) {
        if !(corner(x) && corner(y)) {
            return Err(Error::UnsupportedValuation(format!(
                "WEF({}, {}) for the {} valuation of agent {i}: only x, y in {{0, 1}} have a set form",
                short(x),
                short(y),
                instance.valuation(i).kind()
            )));
        }
    }
    let bundles = alloc.bundles();
    for i in 0..n {
        let v = instance.valuation(i);
        let order = instance.preference_order(i);
        for j in (0..n).filter(|&j| j != i) {
            let aj = &bundles[j];
            if aj.is_empty() {
                continue;
            }
            let (wi, wj) = (instance.weight(i), instance.weight(j));
            let sides = |g: usize| -> (Rational, Rational) {
                if let Some(vals) = v.additive_values() {
                    let own: Rational = bundles[i].iter().map(|&h| &vals[h]).sum();
                    let other: Rational = aj.iter().map(|&h| &vals[h]).sum();
                    (wj * (own + y * &vals[g]), wi * (other - x * &vals[g]))
                } else {
                    let own = if y.is_one() { with_good(&bundles[i], g) } else { bundles[i].clone() };
                    let other = if x.is_one() { without_good(aj, g) } else { aj.clone() };
                    (wj * v.value(&own), wi * v.value(&other))
                }
            };
            let candidates: Vec<usize> = if v.is_additive() {
                // First of i's preference order inside A_j: her most valuable.
                vec![*order.iter().find(|g| aj.contains(g)).expect("A_j nonempty")]
            } else {
                order.iter().copied().filter(|g| aj.contains(g)).collect()
            };
            let mut best: Option<(usize, Rational, Rational)> = None;
            for g in candidates {
                let (l, r) = sides(g);
                if l >= r {
                    best = None;
                    break;
                }
                if best.as_ref().map_or(true, |(_, bl, br)| &l - &r > bl - br) {
                    best = Some((g, l, r));
                }
            }
            if let Some((g, l, r)) = best {
                return Ok(FairnessReport::fail(notion, Witness::pair(i, j).good(Some(g)).sides(l, r)));
            }
        }
    }
    Ok(FairnessReport::pass(notion))
}

/// `WPROP1`: every agent reaches `w_i·v_i(G)` after adding at most one good.
pub fn check_wprop1(instance: &Instance, alloc: &IntegralAllocation) -> FairnessReport {
    check_wprop1_with_slack(instance, alloc, &Rational::zero())
}

/// `WPROP1` with the left side raised by `slack·v_i(G)`.
pub fn check_wprop1_with_slack(
    instance: &Instance,
    alloc: &IntegralAllocation,
    slack: &Rational,
) -> FairnessReport {
    let notion = "wprop1";
    for i in 0..instance.agents() {
        let v = instance.valuation(i);
        let grand = instance.grand_value(i);
        let target = instance.weight(i) * &grand;
        let extra = slack * &grand;
        let own = alloc.bundle(i);
        let base = v.value(&own);
        if &base + &extra >= target {
            continue;
        }
        let best = (0..instance.goods())
            .filter(|&g| alloc.owner(g) != i)
            .map(|g| (g, v.value(&with_good(&own, g))))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let (g, lhs) = match best {
            Some((g, val)) => (Some(g), val),
            None => (None, base),
        };
        if &lhs + &extra < target {
            return FairnessReport::fail(notion, Witness::agent(i).good(g).sides(lhs + extra, target));
        }
    }
    FairnessReport::pass(notion)
}

pub const WEF_MORE_LESS: &str = "wef1_1";

/// `WEF₁¹`: for all `i, j` some `g_i ∈ G` and `g_j` satisfy
/// `w_j·v_i(A_i ∪ {g_i}) ≥ w_i·v_i(A_j \ {g_j})`.
pub fn check_wef_one_one_more_less(instance: &Instance, alloc: &IntegralAllocation) -> FairnessReport {
    check_wef_one_one_more_less_with_slack(instance, alloc, &Rational::zero())
}

/// `WEF₁¹` with `v_i(A_i ∪ {g_i})` raised by `slack·v_i(G)`.
pub fn check_wef_one_one_more_less_with_slack(
    instance: &Instance,
    alloc: &IntegralAllocation,
    slack: &Rational,
) -> FairnessReport {
    let n = instance.agents();
    let m = instance.goods();
    let bundles = alloc.bundles();
    for i in 0..n {
        let v = instance.valuation(i);
        let extra = slack * instance.grand_value(i);
        let (add, gain) = (0..m)
            .map(|g| (g, v.value(&with_good(&bundles[i], g))))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("at least one good");
        let lhs_base = gain + extra;
        for j in (0..n).filter(|&j| j != i) {
            let (removed, rest) = match bundles[j].is_empty() {
                true => (None, Rational::zero()),
                false => bundles[j]
                    .iter()
                    .map(|&g| (Some(g), v.value(&without_good(&bundles[j], g))))
                    .min_by(|a, b| a.1.cmp(&b.1))
                    .expect("nonempty"),
            };
            let lhs = instance.weight(j) * &lhs_base;
            let rhs = instance.weight(i) * rest;
            if lhs < rhs {
                return FairnessReport::fail(
                    WEF_MORE_LESS,
                    Witness::pair(i, j)
                        .good(removed)
                        .sides(lhs, rhs)
                        .detail(format!("added good {add}")),
                );
            }
        }
    }
    FairnessReport::pass(WEF_MORE_LESS)
}

/// Unweighted `EF1` via bundle queries, scanning every `g ∈ A_j`.
pub fn check_ef1_general(instance: &Instance, alloc: &IntegralAllocation) -> FairnessReport {
    let n = instance.agents();
    let bundles = alloc.bundles();
    for i in 0..n {
        let v = instance.valuation(i);
        let own = v.value(&bundles[i]);
        for j in (0..n).filter(|&j| j != i) {
            if bundles[j].is_empty() {
                continue;
            }
            let (g, rest) = bundles[j]
                .iter()
                .map(|&g| (g, v.value(&without_good(&bundles[j], g))))
                .min_by(|a, b| a.1.cmp(&b.1))
                .expect("nonempty");
            if own < rest {
                return FairnessReport::fail("ef1", Witness::pair(i, j).good(Some(g)).sides(own, rest));
            }
        }
    }
    FairnessReport::pass("ef1")
}

/// What an ex-ante check is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum ExAnte<'a> {
    /// Only meaningful for additive valuations.
    Matrix(&'a FractionalAllocation),
    Lottery(&'a Lottery),
}

/// `U[i][j]`, agent `i`'s expected value for agent `j`'s bundle.
pub fn expected_utilities(instance: &Instance, input: ExAnte<'_>) -> Result<Vec<Vec<Rational>>> {
    let n = instance.agents();
    match input {
        ExAnte::Matrix(x) => (0..n)
            .map(|i| {
                let vals = instance.valuation(i).additive_values().ok_or_else(|| {
                    Error::UnsupportedValuation(format!(
                        "expected {} utility of agent {i} is not determined by a matrix; pass a lottery",
                        instance.valuation(i).kind()
                    ))
                })?;
                Ok((0..n).map(|j| x.linear_value(j, vals)).collect())
            })
            .collect(),
        ExAnte::Lottery(l) => {
            let mut u = vec![vec![Rational::zero(); n]; n];
            for (p, y) in l.support() {
                let bundles = y.bundles();
                for (i, row) in u.iter_mut().enumerate() {
                    let v = instance.valuation(i);
                    for (j, cell) in row.iter_mut().enumerate() {
                        *cell += p * v.value(&bundles[j]);
                    }
                }
            }
            Ok(u)
        }
    }
}

/// Ex-ante `WEF`: `w_j·E[v_i(X_i)] ≥ w_i·E[v_i(X_j)]` for all `i, j`.
pub fn check_exante_wef(instance: &Instance, input: ExAnte<'_>) -> Result<FairnessReport> {
    let u = expected_utilities(instance, input)?;
    let n = instance.agents();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let lhs = instance.weight(j) * &u[i][i];
            let rhs = instance.weight(i) * &u[i][j];
            if lhs < rhs {
                return Ok(FairnessReport::fail(
                    "exante-wef",
                    Witness::pair(i, j)
                        .sides(lhs, rhs)
                        .detail(format!("E[v_i(own)]={} E[v_i(other)]={}", format_rational(&u[i][i]), format_rational(&u[i][j]))),
                ));
            }
        }
    }
    Ok(FairnessReport::pass("exante-wef"))
}

/// Weighted stochastic-dominance envy-freeness: for each `i`, `j` and
/// prefix `G_k` of `i`'s order, `w_j·X_i(G_k) ≥ w_i·X_j(G_k)`.
pub fn check_wsd_ef(instance: &Instance, x: &FractionalAllocation) -> FairnessReport {
    let n = instance.agents();
    for i in 0..n {
        let order = instance.preference_order(i);
        for j in (0..n).filter(|&j| j != i) {
            let (mut own, mut other) = (Rational::zero(), Rational::zero());
            for (k, &g) in order.iter().enumerate() {
                own += x.get(i, g);
                other += x.get(j, g);
                let lhs = instance.weight(j) * &own;
                let rhs = instance.weight(i) * &other;
                if lhs < rhs {
                    return FairnessReport::fail(
                        "wsd-ef",
                        Witness::pair(i, j)
                            .good(Some(g))
                            .sides(lhs, rhs)
                            .detail(format!("prefix length {}", k + 1)),
                    );
                }
            }
        }
    }
    FairnessReport::pass("wsd-ef")
}

/// Ex-ante `WPROP` of a matrix: additive values are linear; an XOS agent is
/// evaluated through the clause maximizing her value of all goods, which
/// lower-bounds her expected value for any lottery with these marginals.
pub fn check_wprop_fractional(instance: &Instance, x: &FractionalAllocation) -> Result<FairnessReport> {
    for i in 0..instance.agents() {
        let v = instance.valuation(i);
        let vals = v.additive_values().or_else(|| v.xos_witness()).ok_or_else(|| {
            Error::UnsupportedValuation(format!("ex-ante WPROP of a matrix for a {} valuation", v.kind()))
        })?;
        let lhs = x.linear_value(i, vals);
        let rhs = instance.weight(i) * instance.grand_value(i);
        if lhs < rhs {
            return Ok(FairnessReport::fail("exante-wprop", Witness::agent(i).sides(lhs, rhs)));
        }
    }
    Ok(FairnessReport::pass("exante-wprop"))
}

pub const WGF_MAX_AGENTS: usize = 6;

/// Result of the reallocation LP for one pair of groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupImprovement {
    /// Maximum total slack of a weak improvement, if one exists.
    pub best_slack: Option<Rational>,
    /// An optimal reallocation, `cells[(i, g)]` for `i ∈ S`.
    pub reallocation: Vec<(usize, usize, Rational)>,
}

impl GroupImprovement {
    pub fn is_strict(&self) -> bool {
        self.best_slack.as_ref().is_some_and(|s| s.is_positive())
    }
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Decides whether the holdings of group `t` can be reallocated to group
/// `s` so that `w_S·v_i(X'_i) ≥ w_T·v_i(X_i)` for all `i ∈ S`, maximizing
/// the total slack exactly.
pub fn wgf_pair(instance: &Instance, x: &FractionalAllocation, s: &[usize], t: &[usize]) -> Result<GroupImprovement> {
    let values: Vec<&[Rational]> = s
        .iter()
        .map(|&i| {
            instance
                .valuation(i)
                .additive_values()
                .ok_or_else(|| Error::UnsupportedValuation("WGF needs additive valuations".into()))
        })
        .collect::<Result<_>>()?;
    let m = instance.goods();
    let pool: Vec<Rational> = (0..m).map(|g| t.iter().map(|&j| x.get(j, g)).sum()).collect();
    let goods: Vec<usize> = (0..m).filter(|&g| pool[g].is_positive()).collect();
    let w_s: Rational = s.iter().map(|&i| instance.weight(i)).sum();
    let w_t: Rational = t.iter().map(|&j| instance.weight(j)).sum();
    let k = goods.len();
    let var = |a: usize, gi: usize| a * k + gi;
    let slack = |a: usize| s.len() * k + a;
    let mut lp = LinearProgram::new(s.len() * k + s.len());
    for (gi, &g) in goods.iter().enumerate() {
        let terms: Vec<(usize, Rational)> = (0..s.len()).map(|a| (var(a, gi), Rational::one())).collect();
        lp.add_sparse(&terms, Relation::Le, pool[g].clone());
    }
    for (a, &i) in s.iter().enumerate() {
        let mut terms: Vec<(usize, Rational)> = goods
            .iter()
            .enumerate()
            .filter(|(_, &g)| !values[a][g].is_zero())
            .map(|(gi, &g)| (var(a, gi), &w_s * &values[a][g]))
            .collect();
        terms.push((slack(a), -Rational::one()));
        lp.add_sparse(&terms, Relation::Eq, &w_t * x.linear_value(i, values[a]));
    }
    let mut objective = vec![Rational::zero(); lp.vars()];
    for a in 0..s.len() {
        objective[slack(a)] = Rational::one();
    }
    Ok(match lp.maximize(&objective) {
        LpOutcome::Optimal { point, value } => GroupImprovement {
            best_slack: Some(value),
            reallocation: s
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| goods.iter().enumerate().map(move |(gi, &g)| (a, i, gi, g)))
                .filter(|&(a, _, gi, _)| point[var(a, gi)].is_positive())
                .map(|(a, i, gi, g)| (i, g, point[var(a, gi)].clone()))
                .collect(),
        },
        LpOutcome::Infeasible(_) => GroupImprovement {
            best_slack: None,
            reallocation: Vec::new(),
        },
        LpOutcome::Unbounded => unreachable!("reallocation LP is bounded by the pool"),
    })
}

fn set_string(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Weighted group fairness, exhaustively over all pairs of nonempty groups.
pub fn check_wgf(instance: &Instance, x: &FractionalAllocation) -> Result<FairnessReport> {
    let n = instance.agents();
    if n > WGF_MAX_AGENTS {
        return Err(Error::TooManyAgents { n, max: WGF_MAX_AGENTS });
    }
    if let Some(i) = (0..n).find(|&i| instance.valuation(i).additive_values().is_none()) {
        return Err(Error::UnsupportedValuation(format!(
            "WGF needs additive valuations; agent {i} is {}",
            instance.valuation(i).kind()
        )));
    }
    for sm in 1..1usize << n {
        let s = members(sm, n);
        for tm in 1..1usize << n {
            let t = members(tm, n);
            let out = wgf_pair(instance, x, &s, &t)?;
            if out.is_strict() {
                let slack = out.best_slack.expect("strict implies a value");
                return Ok(FairnessReport::fail(
                    "wgf",
                    Witness::default()
                        .sides(slack, Rational::zero())
                        .detail(format!("S={} T={}", set_string(&s), set_string(&t))),
                ));
            }
        }
    }
    Ok(FairnessReport::pass("wgf"))
}

/// Shorthand used by pipelines: WEF(1,1).
pub fn check_wef11(instance: &Instance, alloc: &IntegralAllocation) -> Result<FairnessReport> {
    check_wef_xy(instance, alloc, &int(1), &int(1))
}
