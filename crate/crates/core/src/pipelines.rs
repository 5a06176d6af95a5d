//! End-to-end lottery constructions and replays of the impossibility
//! instances.
//!
//! Every pipeline returns the fractional matrix it decomposed, the lottery,
//! and one report per promised guarantee. Ex-post notions are evaluated on
//! every support allocation.

use std::fmt;

use num_traits::{One, Zero};

use crate::allocation::{FractionalAllocation, IntegralAllocation, Lottery};
use crate::checkers::{
    check_ef1_general, check_exante_wef, check_support, check_wef11, check_wef_one_one_more_less,
    check_wef_one_one_more_less_with_slack, check_wef_xy, check_wgf, check_wprop1, check_wprop1_with_slack,
    check_wprop_fractional, check_wsd_ef, expected_utilities, wef_xy_notion, ExAnte, FairnessReport,
};
use crate::decomp::{build_ug_bihierarchy, build_ug_bihierarchy_with_orders, decompose};
use crate::eating::{dse, EatingTrace};
use crate::error::{Error, Result};
use crate::groupfair::{groupfair_lottery, verify_ce};
use crate::instance::{preference_order, Instance};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{format_rational, int, rat, Rational};
use crate::valuation::{OracleTable, Valuation};

/// Slack (as a fraction of `v_i(G)`) for ex-post checks on a matrix that
/// was rounded rather than solved exactly.
pub const ROUNDING_SLACK: (i64, i64) = (1, 10_000);

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub fractional: FractionalAllocation,
    pub lottery: Lottery,
    pub reports: Vec<FairnessReport>,
    /// Notions that are deliberately not claimed for this input class.
    pub unverified: Vec<String>,
    pub trace: Option<EatingTrace>,
    /// Free-form diagnostics (solver status and the like).
    pub notes: Vec<String>,
}

impl PipelineResult {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }
}

impl fmt::Display for PipelineResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fractional:\n{}", self.fractional)?;
        writeln!(f, "lottery:\n{}", self.lottery)?;
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        for u in &self.unverified {
            writeln!(f, "{u} unverified")?;
        }
        Ok(())
    }
}

fn require_additive(instance: &Instance) -> Result<()> {
    match (0..instance.agents()).find(|&i| !instance.valuation(i).is_additive()) {
        Some(i) => Err(Error::UnsupportedValuation(format!(
            "agent {i} has a {} valuation; this pipeline needs additive ones",
            instance.valuation(i).kind()
        ))),
        None => Ok(()),
    }
}

fn require_equal_weights(instance: &Instance) -> Result<()> {
    if instance.has_equal_weights() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("this pipeline needs equal entitlements".into()))
    }
}

/// Eating, then the utility-guarantee decomposition of its matrix.
fn eat_and_decompose(instance: &Instance) -> Result<(FractionalAllocation, Lottery, EatingTrace)> {
    let (x, trace) = dse(instance);
    let h = build_ug_bihierarchy_with_orders(&trace.orders, &x);
    let lottery = decompose(&x, &h)?;
    Ok((x, lottery, trace))
}

/// Additive valuations, arbitrary entitlements: ex-ante WSD-EF and WEF,
/// ex-post WEF(1,1) and WPROP1.
pub fn bobw_additive(instance: &Instance) -> Result<PipelineResult> {
    require_additive(instance)?;
    let (x, lottery, trace) = eat_and_decompose(instance)?;
    let reports = vec![
        check_wsd_ef(instance, &x),
        check_exante_wef(instance, ExAnte::Matrix(&x))?,
        check_support(&lottery, |y| check_wef11(instance, y))?,
        check_support(&lottery, |y| Ok(check_wprop1(instance, y)))?,
    ];
    Ok(PipelineResult {
        fractional: x,
        lottery,
        reports,
        unverified: Vec::new(),
        trace: Some(trace),
        notes: Vec::new(),
    })
}

/// XOS valuations: the matrix `x_ig = w_i` decomposed along the bihierarchy
/// of each agent's additive witness clause. Ex-ante WPROP, ex-post WPROP1.
pub fn bobw_xos(instance: &Instance) -> Result<PipelineResult> {
    let mut orders = Vec::with_capacity(instance.agents());
    for i in 0..instance.agents() {
        let v = instance.valuation(i);
        let f = v.xos_witness().ok_or_else(|| {
            Error::UnsupportedValuation(format!("agent {i} has a {} valuation; expected XOS", v.kind()))
        })?;
        orders.push(preference_order(&Valuation::Additive(f.to_vec()), instance.good_order()));
    }
    let x = FractionalAllocation::uniform(instance.weights(), instance.goods())?;
    let h = build_ug_bihierarchy_with_orders(&orders, &x);
    let lottery = decompose(&x, &h)?;
    let reports = vec![
        check_wprop_fractional(instance, &x)?,
        check_support(&lottery, |y| Ok(check_wprop1(instance, y)))?,
    ];
    Ok(PipelineResult {
        fractional: x,
        lottery,
        reports,
        unverified: Vec::new(),
        trace: None,
        notes: Vec::new(),
    })
}

/// Equal entitlements with additive or multi-demand agents: ex-ante EF
/// computed over the produced lottery and ex-post EF1.
pub fn bobw_multidemand(instance: &Instance) -> Result<PipelineResult> {
    require_equal_weights(instance)?;
    if let Some(i) = (0..instance.agents())
        .find(|&i| !matches!(instance.valuation(i), Valuation::Additive(_) | Valuation::MultiDemand { .. }))
    {
        return Err(Error::UnsupportedValuation(format!(
            "agent {i} has a {} valuation; expected additive or multi-demand",
            instance.valuation(i).kind()
        )));
    }
    let (x, lottery, trace) = eat_and_decompose(instance)?;
    let reports = vec![
        check_exante_wef(instance, ExAnte::Lottery(&lottery))?.renamed("exante-ef"),
        check_support(&lottery, |y| Ok(check_ef1_general(instance, y)))?,
    ];
    Ok(PipelineResult {
        fractional: x,
        lottery,
        reports,
        unverified: Vec::new(),
        trace: Some(trace),
        notes: Vec::new(),
    })
}

/// Equal entitlements with cancelable set-function valuations. Reports
/// SD-EF of the matrix and EF1 on every support allocation; ex-ante EF is
/// not claimed for this class and is listed as unverified.
pub fn bobw_cancelable(instance: &Instance) -> Result<PipelineResult> {
    require_equal_weights(instance)?;
    for i in 0..instance.agents() {
        if !instance.valuation(i).is_cancelable()? {
            return Err(Error::UnsupportedValuation(format!("agent {i} is not cancelable")));
        }
    }
    let (x, lottery, trace) = eat_and_decompose(instance)?;
    let reports = vec![
        check_wsd_ef(instance, &x),
        check_support(&lottery, |y| Ok(check_ef1_general(instance, y)))?,
    ];
    Ok(PipelineResult {
        fractional: x,
        lottery,
        reports,
        unverified: vec!["exante-ef".into()],
        trace: Some(trace),
        notes: Vec::new(),
    })
}

/// Additive valuations: weighted MNW decomposed along the utility-guarantee
/// bihierarchy. Ex-ante WGF and equilibrium prices, ex-post WPROP1 and
/// WEF₁¹. If the equilibrium could only be approximated, ex-post checks get
/// [`ROUNDING_SLACK`].
pub fn bobw_groupfair(instance: &Instance) -> Result<PipelineResult> {
    require_additive(instance)?;
    let out = groupfair_lottery(instance)?;
    let ce_tol = if out.exact { 0.0 } else { 1e-6 };
    let slack = if out.exact { Rational::zero() } else { rat(ROUNDING_SLACK.0, ROUNDING_SLACK.1) };
    let reports = vec![
        check_wgf(instance, &out.fractional)?,
        verify_ce(instance, &out.fractional, &out.prices, ce_tol)?,
        check_support(&out.lottery, |y| Ok(check_wprop1_with_slack(instance, y, &slack)))?,
        check_support(&out.lottery, |y| Ok(check_wef_one_one_more_less_with_slack(instance, y, &slack)))?,
    ];
    let notes = vec![
        format!(
            "solver iterations={} gap={:.3e} equilibrium={}",
            out.solver.iterations,
            out.solver.gap,
            if out.exact { "exact" } else { "rounded" }
        ),
        format!("prices {}", out.prices.iter().map(format_rational).collect::<Vec<_>>().join(" ")),
    ];
    Ok(PipelineResult {
        fractional: out.fractional,
        lottery: out.lottery,
        reports,
        unverified: Vec::new(),
        trace: None,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Impossibility replays.

/// Outcome of a counterexample replay.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub name: String,
    /// Whether every claim the replay sets out to check came out as stated.
    pub reproduced: bool,
    /// Whether every infeasibility certificate re-verified.
    pub certificates_verified: bool,
    pub transcript: Vec<String>,
}

impl Replay {
    pub fn certified(&self) -> bool {
        self.reproduced && self.certificates_verified
    }
}

impl fmt::Display for Replay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.transcript {
            writeln!(f, "{line}")?;
        }
        write!(
            f,
            "{} reproduced={} certificates={}",
            self.name, self.reproduced, self.certificates_verified
        )
    }
}

pub const COUNTEREXAMPLES: [&str; 4] = ["wef-xy-incompatibility", "general-valuations", "groupfair-remark", "multidemand-sd"];

/// Runs a named replay. `x`, `y` parametrize the WEF(x,y) replays and
/// default to `1/2` and `1` respectively where omitted.
pub fn replay_counterexample(name: &str, x: Option<Rational>, y: Option<Rational>) -> Result<Replay> {
    match name {
        "wef-xy-incompatibility" => replay_wef_xy(
            &x.unwrap_or_else(|| rat(1, 2)),
            &y.unwrap_or_else(|| rat(1, 2)),
            None,
        ),
        "general-valuations" => replay_general_valuations(),
        "groupfair-remark" => replay_groupfair_remark(&x.unwrap_or_else(Rational::one), &y.unwrap_or_else(Rational::one)),
        "multidemand-sd" => replay_multidemand_sd(),
        other => Err(Error::UnknownCounterexample(other.to_string())),
    }
}

/// All `n^m` deterministic allocations, in lexicographic owner order.
pub fn all_allocations(agents: usize, goods: usize) -> Vec<IntegralAllocation> {
    let total = agents.checked_pow(goods as u32).expect("small instance");
    (0..total)
        .map(|mut code| {
            let owners = (0..goods)
                .map(|_| {
                    let o = code % agents;
                    code /= agents;
                    o
                })
                .collect();
            IntegralAllocation::from_owners(agents, owners).expect("owners in range")
        })
        .collect()
}

/// LP over distributions `p ≥ 0`, `∑ p = 1`, on `allocations` that is
/// ex-ante WEF: `∑_a p_a (w_j v_i(A_i) − w_i v_i(A_j)) ≥ 0` for `i ≠ j`.
pub fn exante_wef_lp(instance: &Instance, allocations: &[IntegralAllocation]) -> LinearProgram {
    let mut lp = LinearProgram::new(allocations.len());
    lp.add(vec![Rational::one(); allocations.len()], Relation::Eq, Rational::one());
    let n = instance.agents();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let v = instance.valuation(i);
            let row = allocations
                .iter()
                .map(|a| instance.weight(j) * v.value(&a.bundle(i)) - instance.weight(i) * v.value(&a.bundle(j)))
                .collect();
            lp.add(row, Relation::Ge, Rational::zero());
        }
    }
    lp
}

fn describe_lp(lp: &LinearProgram, outcome: &LpOutcome, transcript: &mut Vec<String>) -> bool {
    match outcome {
        LpOutcome::Infeasible(cert) => {
            let ok = lp.verify_certificate(cert);
            transcript.push(format!("  infeasible; certificate {cert} verified={ok}"));
            ok
        }
        LpOutcome::Optimal { point, value } => {
            transcript.push(format!("  feasible; value {} point satisfies={}", format_rational(value), lp.satisfies(point)));
            lp.satisfies(point)
        }
        LpOutcome::Unbounded => {
            transcript.push("  unbounded".into());
            false
        }
    }
}

fn unit_instance(weights: Vec<Rational>, goods: usize) -> Result<Instance> {
    let n = weights.len();
    Instance::new(weights, vec![Valuation::Additive(vec![int(1); goods]); n], None)
}

/// Two agents, two goods worth 1 to both, `w_1` inside
/// `(y/(2+y−x), 1/2)` (the midpoint unless given). The LP over WEF(x,y)
/// allocations that is ex-ante WEF must be infeasible. At `x = y = 1` the
/// interval is empty and the replay instead runs with `w_1 = 1/4` and
/// expects a feasible LP.
pub fn replay_wef_xy(x: &Rational, y: &Rational, w1: Option<Rational>) -> Result<Replay> {
    let unit = |r: &Rational| *r >= Rational::zero() && *r <= Rational::one();
    if !unit(x) || !unit(y) {
        return Err(Error::InvalidParameter("x and y must lie in [0,1]".into()));
    }
    let two = int(2);
    let sanity = x + y >= two;
    let half = rat(1, 2);
    let low = y / (&two + y - x);
    let w1 = match w1 {
        Some(w) if sanity || (w > low && w < half) => w,
        Some(w) => {
            return Err(Error::InvalidParameter(format!(
                "w_1 = {} is outside ({}, 1/2)",
                format_rational(&w),
                format_rational(&low)
            )))
        }
        None if sanity => rat(1, 4),
        None => (&low + &half) / &two,
    };
    let instance = unit_instance(vec![w1.clone(), Rational::one() - &w1], 2)?;
    let notion = wef_xy_notion(x, y);
    let mut transcript = vec![
        format!("instance: 2 agents, 2 goods of value 1, w = ({}, {})", format_rational(&w1), format_rational(instance.weight(1))),
        format!("interval for w_1: ({}, 1/2){}", format_rational(&low), if sanity { " is empty; sanity run" } else { "" }),
    ];
    let mut kept = Vec::new();
    for a in all_allocations(2, 2) {
        let r = check_wef_xy(&instance, &a, x, y)?;
        transcript.push(format!("  {a} {notion}={}", r.holds));
        if r.holds {
            kept.push(a);
        }
    }
    let lp = exante_wef_lp(&instance, &kept);
    let outcome = lp.feasibility();
    transcript.push(format!("LP: lottery over {} {notion} allocations that is ex-ante wef", kept.len()));
    let verified = describe_lp(&lp, &outcome, &mut transcript);
    let reproduced = outcome.is_feasible() == sanity;
    Ok(Replay {
        name: format!("wef-xy-incompatibility x={} y={}", format_rational(x), format_rational(y)),
        reproduced,
        certificates_verified: verified,
        transcript,
    })
}

/// The two-agent instance with a unit-demand and a cardinality valuation.
pub fn general_valuations_instance() -> Result<Instance> {
    let m = 4;
    let nonempty = OracleTable::from_fn(m, |b| if b.is_empty() { int(0) } else { int(1) })?;
    Instance::new(
        vec![rat(2, 3), rat(1, 3)],
        vec![Valuation::Oracle(nonempty), Valuation::Additive(vec![int(1); m])],
        None,
    )
}

/// Unequal weights and one non-additive agent: no ex-ante WEF lottery is
/// supported on WPROP1 allocations, nor on WEF(1,1) ones. Among ex-ante WEF
/// lotteries that never leave agent 1 empty, the all-to-agent-1 allocation
/// has probability at least 1/2, and it fails both ex-post notions.
pub fn replay_general_valuations() -> Result<Replay> {
    let instance = general_valuations_instance()?;
    let all = all_allocations(2, 4);
    let mut transcript = vec!["instance: w = (2/3, 1/3); v_1(S) = [S nonempty], v_2(S) = |S|; 4 goods".to_string()];
    let mut reproduced = true;
    let mut verified = true;

    let wprop1: Vec<_> = all.iter().filter(|a| check_wprop1(&instance, a).holds).cloned().collect();
    let lp = exante_wef_lp(&instance, &wprop1);
    transcript.push(format!("LP: ex-ante wef lottery over {} wprop1 allocations", wprop1.len()));
    let outcome = lp.feasibility();
    verified &= describe_lp(&lp, &outcome, &mut transcript);
    reproduced &= !outcome.is_feasible();

    let mut wef11 = Vec::new();
    for a in &all {
        if check_wef11(&instance, a)?.holds {
            wef11.push(a.clone());
        }
    }
    let lp = exante_wef_lp(&instance, &wef11);
    transcript.push(format!("LP: ex-ante wef lottery over {} wef(1,1) allocations", wef11.len()));
    let outcome = lp.feasibility();
    verified &= describe_lp(&lp, &outcome, &mut transcript);
    reproduced &= !outcome.is_feasible();

    // Agent 1 never empty; minimize the probability that she gets all goods.
    let nonempty: Vec<_> = all.iter().filter(|a| !a.bundle(0).is_empty()).cloned().collect();
    let lp = exante_wef_lp(&instance, &nonempty);
    let objective: Vec<Rational> = nonempty
        .iter()
        .map(|a| if a.bundle(0).len() == 4 { Rational::one() } else { Rational::zero() })
        .collect();
    transcript.push("LP: minimize p_4 over ex-ante wef lotteries with p_0 = 0".into());
    let outcome = lp.minimize(&objective);
    verified &= describe_lp(&lp, &outcome, &mut transcript);
    reproduced &= outcome.value() == Some(&rat(1, 2));

    let everything = IntegralAllocation::from_owners(2, vec![0; 4])?;
    for r in [check_wprop1(&instance, &everything), check_wef11(&instance, &everything)?] {
        transcript.push(format!("  {everything}: {r}"));
        reproduced &= !r.holds && r.witness.as_ref().and_then(|w| w.i) == Some(1);
    }
    Ok(Replay {
        name: "general-valuations".into(),
        reproduced,
        certificates_verified: verified,
        transcript,
    })
}

/// Three agents, one heavy and three light goods.
pub fn groupfair_remark_instance() -> Result<Instance> {
    let heavy = |h: i64| Valuation::Additive(vec![int(h), int(1), int(1), int(1)]);
    Instance::with_equal_weights(vec![heavy(6), heavy(6), heavy(0)])
}

/// The group-fair matrix gives every light good to the third agent, so no
/// lottery implementing it is supported on WEF(x,y) allocations.
pub fn replay_groupfair_remark(x: &Rational, y: &Rational) -> Result<Replay> {
    let instance = groupfair_remark_instance()?;
    let out = groupfair_lottery(&instance)?;
    let notion = wef_xy_notion(x, y);
    let mut transcript = vec![
        "instance: agents 1,2 value (6,1,1,1), agent 3 values (0,1,1,1); equal weights".to_string(),
        format!("group-fair X ({}):", if out.exact { "exact equilibrium" } else { "rounded" }),
    ];
    transcript.extend(out.fractional.to_string().lines().map(|l| format!("  {l}")));
    transcript.push(format!("prices {}", out.prices.iter().map(format_rational).collect::<Vec<_>>().join(" ")));
    let light_to_third = (1..4).all(|g| out.fractional.get(2, g).is_one());
    let wgf = check_wgf(&instance, &out.fractional)?;
    transcript.push(format!("{wgf}"));

    let mut support_fails = true;
    for (p, a) in out.lottery.support() {
        let r = check_wef_xy(&instance, a, x, y)?;
        transcript.push(format!("  p={} {a}: {r}", format_rational(p)));
        support_fails &= !r.holds;
    }

    // Any lottery over WEF(x,y) allocations with marginals X.
    let mut kept = Vec::new();
    for a in all_allocations(3, 4) {
        if check_wef_xy(&instance, &a, x, y)?.holds {
            kept.push(a);
        }
    }
    let mut lp = LinearProgram::new(kept.len());
    lp.add(vec![Rational::one(); kept.len()], Relation::Eq, Rational::one());
    for i in 0..3 {
        for g in 0..4 {
            let row = kept.iter().map(|a| if a.contains(i, g) { Rational::one() } else { Rational::zero() }).collect();
            lp.add(row, Relation::Eq, out.fractional.get(i, g).clone());
        }
    }
    transcript.push(format!("LP: lottery over {} {notion} allocations with marginals X", kept.len()));
    let outcome = lp.feasibility();
    let verified = describe_lp(&lp, &outcome, &mut transcript);
    Ok(Replay {
        name: "groupfair-remark".into(),
        reproduced: light_to_third && wgf.holds && support_fails && !outcome.is_feasible(),
        certificates_verified: verified,
        transcript,
    })
}

/// Three identical unit-demand agents and three goods.
pub fn multidemand_sd_instance() -> Result<Instance> {
    let unit = Valuation::MultiDemand { k: 1, values: vec![int(1); 3] };
    Instance::with_equal_weights(vec![unit.clone(), unit.clone(), unit])
}

/// The hand-built decomposition of the uniform eating matrix.
pub fn multidemand_sd_lottery() -> Result<Lottery> {
    let third = rat(1, 3);
    let y = |bundles: [&[usize]; 3]| IntegralAllocation::from_bundles(&bundles.map(<[usize]>::to_vec), 3);
    Lottery::new(vec![
        (third.clone(), y([&[0, 1], &[2], &[]])?),
        (third.clone(), y([&[2], &[0], &[1]])?),
        (third, y([&[], &[1], &[0, 2]])?),
    ])
}

/// A decomposition of the same SD-EF matrix can fail ex-ante EF for
/// unit-demand agents, while the utility-guarantee decomposition does not.
pub fn replay_multidemand_sd() -> Result<Replay> {
    let instance = multidemand_sd_instance()?;
    let hand = multidemand_sd_lottery()?;
    let (x, _) = dse(&instance);
    let mut transcript = vec!["instance: 3 identical unit-demand agents, 3 goods of value 1".to_string()];
    let same_matrix = hand.marginal_matrix() == x;
    transcript.push(format!("hand lottery has the eating matrix as marginals: {same_matrix}"));
    transcript.push(format!("{}", check_wsd_ef(&instance, &x)));
    let u = expected_utilities(&instance, ExAnte::Lottery(&hand))?;
    transcript.push(format!(
        "agent 1: E[v(own)] = {}, E[v(agent 2's bundle)] = {}",
        format_rational(&u[0][0]),
        format_rational(&u[0][1])
    ));
    let hand_report = check_exante_wef(&instance, ExAnte::Lottery(&hand))?.renamed("exante-ef");
    transcript.push(format!("hand lottery: {hand_report}"));
    let h = build_ug_bihierarchy(&instance, &x);
    let ug = decompose(&x, &h)?;
    let ug_report = check_exante_wef(&instance, ExAnte::Lottery(&ug))?.renamed("exante-ef");
    transcript.push(format!("decomposed lottery: {ug_report}"));
    Ok(Replay {
        name: "multidemand-sd".into(),
        reproduced: same_matrix
            && u[0][0] == rat(2, 3)
            && u[0][1] == int(1)
            && !hand_report.holds
            && ug_report.holds,
        certificates_verified: true,
        transcript,
    })
}

/// Checks a lottery against named notions. Known names: `wsd-ef`,
/// `exante-wef`, `exante-wprop`, `wgf`, `wef11`, `wef(x,y)`, `wprop1`,
/// `wef1_1`, `ef1`.
pub fn verify_lottery(instance: &Instance, lottery: &Lottery, notions: &[String]) -> Result<Vec<FairnessReport>> {
    let x = lottery.marginal_matrix();
    notions
        .iter()
        .map(|name| match name.as_str() {
            "wsd-ef" => Ok(check_wsd_ef(instance, &x)),
            "exante-wef" => check_exante_wef(instance, ExAnte::Lottery(lottery)),
            "exante-wprop" => check_wprop_fractional(instance, &x),
            "wgf" => check_wgf(instance, &x),
            "wef11" | "wef(1,1)" => check_support(lottery, |y| check_wef11(instance, y)),
            "wprop1" => check_support(lottery, |y| Ok(check_wprop1(instance, y))),
            "wef1_1" => check_support(lottery, |y| Ok(check_wef_one_one_more_less(instance, y))),
            "ef1" => check_support(lottery, |y| Ok(check_ef1_general(instance, y))),
            other => match parse_wef_xy(other) {
                Some((a, b)) => check_support(lottery, |y| check_wef_xy(instance, y, &a, &b)),
                None => Err(Error::InvalidParameter(format!("unknown notion {other}"))),
            },
        })
        .collect()
}

fn parse_wef_xy(name: &str) -> Option<(Rational, Rational)> {
    let inner = name.strip_prefix("wef(")?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((
        crate::rational::parse_rational(a.trim()).ok()?,
        crate::rational::parse_rational(b.trim()).ok()?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn example1() -> Instance {
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

    #[test]
    fn additive_pipeline_on_worked_instance() {
        let r = bobw_additive(&example1()).unwrap();
        assert!(r.all_hold(), "{r}");
        assert_eq!(r.fractional.row(0), &[int(1), int(0), rat(1, 2), rat(1, 2)]);
        assert_eq!(r.lottery.marginal_matrix(), r.fractional);
        let names: Vec<_> = r.reports.iter().map(|r| r.notion.as_str()).collect();
        assert_eq!(names, ["wsd-ef", "exante-wef", "wef(1,1)", "wprop1"]);
    }

    #[test]
    fn single_agent_lottery_is_certain() {
        let inst = Instance::new(vec![int(1)], vec![Valuation::Additive(ints(&[1, 2]))], None).unwrap();
        let r = bobw_additive(&inst).unwrap();
        assert_eq!(r.lottery.len(), 1);
        assert_eq!(r.lottery.support()[0].1.bundle(0), vec![0, 1]);
    }

    #[test]
    fn xos_pipeline_holds_with_two_clauses() {
        let inst = Instance::new(
            vec![rat(1, 3), rat(2, 3)],
            vec![
                Valuation::Xos(vec![ints(&[3, 0, 1, 2]), ints(&[1, 4, 1, 0])]),
                Valuation::Xos(vec![ints(&[2, 2, 2, 2]), ints(&[5, 0, 0, 1])]),
            ],
            None,
        )
        .unwrap();
        let r = bobw_xos(&inst).unwrap();
        assert!(r.all_hold(), "{r}");
        assert_eq!(r.lottery.marginal_matrix(), r.fractional);
    }

    #[test]
    fn xos_pipeline_rejects_oracles() {
        let inst = general_valuations_instance().unwrap();
        assert!(matches!(bobw_xos(&inst), Err(Error::UnsupportedValuation(_))));
    }

    #[test]
    fn multidemand_pipeline_gives_one_good_each() {
        let inst = multidemand_sd_instance().unwrap();
        let r = bobw_multidemand(&inst).unwrap();
        assert!(r.all_hold(), "{r}");
        for y in r.lottery.allocations() {
            assert!((0..3).all(|i| y.bundle(i).len() == 1));
        }
        assert!(matches!(bobw_multidemand(&example1()), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn groupfair_pipeline_on_remark() {
        let r = bobw_groupfair(&groupfair_remark_instance().unwrap()).unwrap();
        assert!(r.all_hold(), "{r}");
    }

    #[test]
    fn wef_xy_replays() {
        let r = replay_wef_xy(&rat(1, 2), &rat(1, 2), Some(rat(2, 5))).unwrap();
        assert!(r.certified(), "{r}");
        for (x, y) in [(0, 0), (1, 0), (0, 1)] {
            let r = replay_wef_xy(&int(x), &int(y), None).unwrap();
            assert!(r.certified(), "{r}");
        }
        let sanity = replay_wef_xy(&int(1), &int(1), None).unwrap();
        assert!(sanity.certified(), "{sanity}");
        assert!(replay_wef_xy(&rat(1, 2), &rat(1, 2), Some(rat(1, 5))).is_err());
        assert!(replay_wef_xy(&int(2), &int(0), None).is_err());
    }

    #[test]
    fn general_valuations_replay() {
        let r = replay_general_valuations().unwrap();
        assert!(r.certified(), "{r}");
    }

    #[test]
    fn groupfair_remark_replay() {
        let r = replay_counterexample("groupfair-remark", None, None).unwrap();
        assert!(r.certified(), "{r}");
    }

    #[test]
    fn multidemand_replay() {
        let r = replay_counterexample("multidemand-sd", None, None).unwrap();
        assert!(r.certified(), "{r}");
        assert!(r.transcript.iter().any(|l| l.contains("= 2/3") && l.contains("= 1")));
    }

    #[test]
    fn unknown_replay_is_an_error() {
        assert!(matches!(replay_counterexample("nope", None, None), Err(Error::UnknownCounterexample(_))));
    }

    #[test]
    fn verify_named_notions() {
        let inst = example1();
        let r = bobw_additive(&inst).unwrap();
        let names: Vec<String> = ["wsd-ef", "exante-wef", "wef(1,1)", "wprop1", "wef(1,0)"].map(String::from).to_vec();
        let reports = verify_lottery(&inst, &r.lottery, &names).unwrap();
        assert!(reports[..4].iter().all(|r| r.holds));
        assert!(verify_lottery(&inst, &r.lottery, &["bogus".to_string()]).is_err());
    }
}
