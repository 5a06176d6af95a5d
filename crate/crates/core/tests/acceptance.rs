//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line, then exits non-zero if any
//! criterion failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fairlot::allocation::IntegralAllocation;
use fairlot::checkers::{
    check_ef1_general, check_exante_wef, check_wef11, check_wef_one_one_more_less_with_slack, check_wef_xy,
    check_wgf, check_wprop1, check_wprop1_with_slack, check_wsd_ef, expected_utilities, ExAnte,
};
use fairlot::decomp::{build_ug_bihierarchy, decompose};
use fairlot::groupfair::{ce_prices, groupfair_lottery, max_weighted_nash, mwn_gradient_inequality_check, verify_ce};
use fairlot::io::load_instance;
use fairlot::picking::{
    adversarial_instance, is_recursively_balanced, prefix_wef_condition, run_picking_sequence, stopping_time_sequence,
    violating_prefixes,
};
use fairlot::pipelines::{
    bobw_additive, bobw_cancelable, bobw_multidemand, bobw_xos, groupfair_remark_instance, multidemand_sd_instance,
    multidemand_sd_lottery, replay_counterexample, replay_wef_xy,
};
use fairlot::rational::{int, rat};
use fairlot::{dse, Instance, Rational};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn example1() -> Instance {
    load_instance(&std::fs::read_to_string(data("example1.json")).expect("data file")).expect("valid instance")
}

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if elapsed < budget => (true, d),
        Ok(d) => (false, format!("{d}; over time budget")),
        Err(d) => (false, d),
    };
    println!(
        "{} {id:>2} {title} [{:.2}s / {}s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn c1_example_reproduction() -> Check {
    let inst = example1();
    let r = bobw_additive(&inst).map_err(|e| e.to_string())?;
    let expected = [
        [int(1), int(0), rat(1, 2), rat(1, 2)],
        [int(0), rat(2, 3), rat(1, 3), rat(1, 3)],
        [int(0), rat(1, 3), rat(1, 6), rat(1, 6)],
    ];
    for (i, row) in expected.iter().enumerate() {
        ensure(r.fractional.row(i) == row, || format!("row {i} is {:?}", r.fractional.row(i)))?;
    }
    let trace = r.trace.as_ref().expect("eating trace");
    ensure(trace.finish_time == [int(2), int(2), int(3), int(4)], || {
        format!("finish times {:?}", trace.finish_time)
    })?;
    ensure(r.all_hold(), || format!("{r}"))?;

    let out = Command::new(env!("CARGO_BIN_EXE_fairlot"))
        .args(["solve", "bobw", &data("example1.json"), "--trace"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success(), || format!("cli exit {:?}", out.status.code()))?;
    for line in ["[1, 0, 1/2, 1/2]", "[0, 2/3, 1/3, 1/3]", "[0, 1/3, 1/6, 1/6]", "t=2/1 finished={0,1}", "t=3/1 finished={2}", "t=4/1 finished={3}"] {
        ensure(text.contains(line), || format!("cli output lacks {line:?}"))?;
    }
    Ok("matrix and finish times 2,2,3,4 exact; cli agrees".into())
}

fn c2_decomposition() -> Check {
    let inst = example1();
    let (x, _) = dse(&inst);
    let lottery = decompose(&x, &build_ug_bihierarchy(&inst, &x)).map_err(|e| e.to_string())?;
    ensure(lottery.len() <= 13, || format!("support size {}", lottery.len()))?;
    let total: Rational = lottery.support().iter().map(|(p, _)| p).sum();
    ensure(total == int(1), || format!("probabilities sum to {total}"))?;
    ensure(lottery.marginal_matrix() == x, || "marginals differ".into())?;
    for y in lottery.allocations() {
        let b: Vec<Vec<usize>> = y.bundles();
        let ok = b[0].contains(&0)
            && !b[0].contains(&1)
            && b[0].len() == 2
            && !b[1].contains(&0)
            && b[1].iter().filter(|g| [1, 2].contains(*g)).count() == 1
            && b[2].len() <= 1
            && !b[2].contains(&0);
        ensure(ok, || format!("{y} breaks an agent constraint"))?;
        let r = check_wef11(&inst, y).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{y}: {r}"))?;
        let r = check_wprop1(&inst, y);
        ensure(r.holds, || format!("{y}: {r}"))?;
    }
    Ok(format!("{} support allocations, all constraints and checks hold", lottery.len()))
}

fn c3_property_suite() -> Check {
    let mut rng = common::rng(3);
    let mut equal_count = 0;
    let mut supports = 0;
    for k in 0..500 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=8);
        let equal = rng.gen_bool(0.3);
        let inst = common::additive(&mut rng, n, m, equal);
        let (x, trace) = dse(&inst);
        let lottery = decompose(&x, &build_ug_bihierarchy(&inst, &x)).map_err(|e| format!("#{k}: {e}"))?;
        let r = check_wsd_ef(&inst, &x);
        ensure(r.holds, || format!("#{k}: {r}"))?;
        let r = check_exante_wef(&inst, ExAnte::Matrix(&x)).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("#{k}: {r}"))?;
        equal_count += equal as usize;
        for y in lottery.allocations() {
            supports += 1;
            let r = check_wef11(&inst, y).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("#{k} {y}: {r}"))?;
            let r = check_wprop1(&inst, y);
            ensure(r.holds, || format!("#{k} {y}: {r}"))?;
            if equal {
                let r = check_wef_xy(&inst, y, &int(1), &int(0)).map_err(|e| e.to_string())?;
                ensure(r.holds, || format!("#{k} {y}: {r}"))?;
                let pi = stopping_time_sequence(&inst, &trace, y).map_err(|e| format!("#{k}: {e}"))?;
                let replay = run_picking_sequence(&inst, &pi).map_err(|e| e.to_string())?;
                ensure(is_recursively_balanced(&pi, n) && replay == *y, || format!("#{k} {y}: sequence ({pi}) not an RB replay"))?;
            }
        }
    }
    Ok(format!("500 instances ({equal_count} equal-weight), {supports} support allocations"))
}

fn c4_impossibility() -> Check {
    let cases = [(int(0), int(0)), (int(1), int(0)), (int(0), int(1)), (rat(1, 2), rat(1, 2)), (rat(9, 10), rat(9, 10))];
    for (x, y) in &cases {
        let r = replay_wef_xy(x, y, None).map_err(|e| e.to_string())?;
        ensure(r.certified(), || format!("{r}"))?;
        ensure(r.transcript.iter().any(|l| l.contains("infeasible")), || format!("{r}"))?;
    }
    let r = replay_wef_xy(&rat(1, 2), &rat(1, 2), Some(rat(2, 5))).map_err(|e| e.to_string())?;
    ensure(r.certified(), || format!("{r}"))?;
    let r = replay_wef_xy(&int(1), &int(1), None).map_err(|e| e.to_string())?;
    ensure(r.certified() && r.transcript.iter().any(|l| l.trim_start().starts_with("feasible;")), || format!("{r}"))?;
    let r = replay_counterexample("general-valuations", None, None).map_err(|e| e.to_string())?;
    ensure(r.certified(), || format!("{r}"))?;
    ensure(r.transcript.iter().any(|l| l.contains("value 1/2")), || format!("{r}"))?;
    Ok("5 infeasible with verified certificates, (1,1) feasible, min p_4 = 1/2 and ex-post failure".into())
}

fn c5_groupfair() -> Check {
    let inst = groupfair_remark_instance().map_err(|e| e.to_string())?;
    let sol = max_weighted_nash(&inst).map_err(|e| e.to_string())?;
    let x = &sol.allocation;
    for g in 1..4 {
        ensure(x[2][g] >= 1.0 - 1e-6, || format!("light good {g}: agent 3 share {}", x[2][g]))?;
    }
    ensure((x[0][0] - 0.5).abs() <= 1e-6 && (x[1][0] - 0.5).abs() <= 1e-6, || {
        format!("heavy split {} : {}", x[0][0], x[1][0])
    })?;
    let leak = (1..4).map(|g| 1.0 - sol.iterate[2][g]).fold(0.0, f64::max);
    let out = groupfair_lottery(&inst).map_err(|e| e.to_string())?;
    let r = verify_ce(&inst, &out.fractional, &out.prices, 1e-6).map_err(|e| e.to_string())?;
    ensure(r.holds, || format!("{r}"))?;
    let r = check_wgf(&inst, &out.fractional).map_err(|e| e.to_string())?;
    ensure(r.holds, || format!("{r}"))?;
    let slack = rat(1, 10_000);
    let mut wef11_fails = 0;
    for y in out.lottery.allocations() {
        let r = check_wprop1_with_slack(&inst, y, &slack);
        ensure(r.holds, || format!("{y}: {r}"))?;
        let r = check_wef_one_one_more_less_with_slack(&inst, y, &slack);
        ensure(r.holds, || format!("{y}: {r}"))?;
        if !check_wef_xy(&inst, y, &int(1), &int(1)).map_err(|e| e.to_string())?.holds {
            wef11_fails += 1;
        }
    }
    ensure(wef11_fails > 0, || "no support allocation fails wef(1,1)".into())?;
    Ok(format!(
        "equilibrium {}; raw iterate light-good leak {leak:.1e} after {} iterations; {wef11_fails}/{} supports fail wef(1,1)",
        if sol.exact.is_some() { "recovered exactly" } else { "rounded" },
        sol.iterations,
        out.lottery.len()
    ))
}

fn c6_ce_certificates() -> Check {
    let mut rng = common::rng(6);
    let mut exact = 0;
    for k in 0..50 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=6);
        let inst = common::additive(&mut rng, n, m, k % 2 == 0);
        let out = groupfair_lottery(&inst).map_err(|e| format!("#{k}: {e}"))?;
        exact += out.exact as usize;
        let x = &out.fractional;
        let r = mwn_gradient_inequality_check(&inst, x, 1e-6).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("#{k}: {r}"))?;
        let p = ce_prices(&inst, x).map_err(|e| e.to_string())?;
        let r = verify_ce(&inst, x, &p, 1e-6).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("#{k}: {r}"))?;
        let r = check_wgf(&inst, x).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("#{k}: {r}"))?;
    }
    Ok(format!("50 instances, {exact} equilibria recovered exactly"))
}

fn c7_picking() -> Check {
    let mut rng = common::rng(7);
    let (mut forward, mut converse) = (0, 0);
    for k in 0..1000 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=8);
        let equal = rng.gen_bool(0.3);
        let inst = common::additive(&mut rng, n, m, equal);
        let pi = common::sequence(&mut rng, n, m);
        let (x, y) = common::pick_xy(&mut rng);
        let w = inst.weights();
        if prefix_wef_condition(&pi, w, &x, &y).holds() {
            forward += 1;
            let a = run_picking_sequence(&inst, &pi).map_err(|e| e.to_string())?;
            let r = check_wef_xy(&inst, &a, &x, &y).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("#{k} ({pi}): {r}"))?;
        }
        for v in violating_prefixes(&pi, w, &x, &y) {
            converse += 1;
            let adv = adversarial_instance(w, m, v.prefix).map_err(|e| e.to_string())?;
            let a = run_picking_sequence(&adv, &pi).map_err(|e| e.to_string())?;
            let r = check_wef_xy(&adv, &a, &x, &y).map_err(|e| e.to_string())?;
            ensure(!r.holds, || format!("#{k} ({pi}) prefix {}: adversarial outcome passes", v.prefix))?;
        }
    }
    Ok(format!("1000 triples: {forward} forward implications, {converse} violating prefixes confirmed"))
}

fn c8_multidemand() -> Check {
    let mut rng = common::rng(8);
    for k in 0..200 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=7);
        let inst = common::multidemand_mix(&mut rng, n, m);
        let r = bobw_multidemand(&inst).map_err(|e| format!("#{k}: {e}"))?;
        ensure(r.all_hold(), || format!("#{k}: {r}"))?;
    }
    let inst = multidemand_sd_instance().map_err(|e| e.to_string())?;
    let hand = multidemand_sd_lottery().map_err(|e| e.to_string())?;
    let u = expected_utilities(&inst, ExAnte::Lottery(&hand)).map_err(|e| e.to_string())?;
    ensure(u[0][0] == rat(2, 3) && u[0][1] == int(1), || format!("expected values {} vs {}", u[0][0], u[0][1]))?;
    let r = check_exante_wef(&inst, ExAnte::Lottery(&hand)).map_err(|e| e.to_string())?;
    ensure(!r.holds, || "hand-built lottery passes ex-ante EF".into())?;
    Ok("200 instances pass ex-ante EF and EF1; hand-built lottery 2/3 vs 1".into())
}

fn c9_xos() -> Check {
    let mut rng = common::rng(9);
    for k in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=6);
        let inst = common::xos(&mut rng, n, m);
        let r = bobw_xos(&inst).map_err(|e| format!("#{k}: {e}"))?;
        ensure(r.all_hold(), || format!("#{k}: {r}"))?;
        ensure(r.lottery.marginal_matrix() == r.fractional, || format!("#{k}: marginals differ"))?;
    }
    Ok("100 instances pass ex-ante WPROP and WPROP1".into())
}

fn c10_cancelable() -> Check {
    let mut rng = common::rng(10);
    let mut sequences = 0;
    for k in 0..50 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=6);
        let inst = common::cancelable(&mut rng, n, m);
        for i in 0..n {
            ensure(inst.valuation(i).is_cancelable().map_err(|e| e.to_string())?, || format!("#{k}: agent {i} not cancelable"))?;
        }
        for pi in common::all_rb_sequences(n, m) {
            sequences += 1;
            let a: IntegralAllocation = run_picking_sequence(&inst, &pi).map_err(|e| e.to_string())?;
            let r = check_ef1_general(&inst, &a);
            ensure(r.holds, || format!("#{k} ({pi}): {r}"))?;
        }
        let r = bobw_cancelable(&inst).map_err(|e| format!("#{k}: {e}"))?;
        ensure(r.all_hold(), || format!("#{k}: {r}"))?;
    }
    Ok(format!("50 instances, {sequences} RB sequences EF1; lotteries SD-EF"))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "example reproduction", secs(1), c1_example_reproduction),
        run(2, "decomposition of the worked instance", secs(1), c2_decomposition),
        run(3, "additive property suite", secs(60), c3_property_suite),
        run(4, "impossibility replays", secs(5), c4_impossibility),
        run(5, "group-fair pipeline", secs(10), c5_groupfair),
        run(6, "equilibrium certificates", secs(120), c6_ce_certificates),
        run(7, "picking-sequence characterization", secs(30), c7_picking),
        run(8, "multi-demand", secs(60), c8_multidemand),
        run(9, "xos", secs(30), c9_xos),
        run(10, "cancelable", secs(60), c10_cancelable),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
