//! Exhaustive-search replays of the impossibility instances, each with an
//! exact LP and a re-checked infeasibility certificate.

use fairlot::pipelines::{replay_counterexample, replay_wef_xy, COUNTEREXAMPLES};
use fairlot::rational::rat;
use fairlot::Result;

pub fn run_example() -> Result<()> {
    for name in COUNTEREXAMPLES {
        println!("== {name}");
        println!("{}\n", replay_counterexample(name, None, None)?);
    }
    println!("== same instance, x = y = 1/2, w_1 = 2/5");
    println!("{}", replay_wef_xy(&rat(1, 2), &rat(1, 2), Some(rat(2, 5)))?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
