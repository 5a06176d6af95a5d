//! Every support allocation of the eating lottery is the outcome of a
//! picking sequence read off its stopping times, and that sequence meets
//! the prefix condition for WEF(1,1).

use fairlot::decomp::{build_ug_bihierarchy, decompose};
use fairlot::io::load_instance;
use fairlot::picking::{
    adversarial_instance, prefix_wef_condition, run_picking_sequence, stopping_time_sequence, PickingSequence,
};
use fairlot::checkers::check_wef_xy;
use fairlot::rational::int;
use fairlot::{dse, Result};

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.json")))?;
    let (x, trace) = dse(&instance);
    let lottery = decompose(&x, &build_ug_bihierarchy(&instance, &x))?;
    let (one, zero) = (int(1), int(0));
    for y in lottery.allocations() {
        let pi = stopping_time_sequence(&instance, &trace, y)?;
        let replay = run_picking_sequence(&instance, &pi)?;
        let ok = prefix_wef_condition(&pi, instance.weights(), &one, &one).holds();
        println!("{y}  <-  pi = ({pi})  replays={}  prefix wef(1,1)={ok}", replay == *y);
    }

    // A sequence that favours the small agent breaks WEF(0,0), and the
    // matching adversarial instance shows it.
    let pi = PickingSequence::new(vec![2, 2, 0, 1], 3)?;
    let verdict = prefix_wef_condition(&pi, instance.weights(), &zero, &zero);
    let v = verdict.violation.expect("violated");
    println!("\n({pi}) fails at {v}");
    let adv = adversarial_instance(instance.weights(), 4, v.prefix)?;
    let y = run_picking_sequence(&adv, &pi)?;
    println!("on the adversarial instance: {}", check_wef_xy(&adv, &y, &zero, &zero)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
