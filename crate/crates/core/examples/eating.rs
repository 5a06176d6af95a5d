//! Simultaneous eating with entitlements on a three-agent instance.
//!
//! ```text
//! cargo run --example eating
//! ```

use fairlot::io::load_instance;
use fairlot::rational::int;
use fairlot::{dse, Result};

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.json")))?;
    let (x, trace) = dse(&instance);
    println!("eating trace:\n{trace}");
    println!("fractional allocation:\n{x}");
    for t in 1..=instance.goods() as i64 {
        let eaten = trace.eaten(0, &int(t))?;
        println!("agent 0 has finished {eaten:?} by t={t}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
