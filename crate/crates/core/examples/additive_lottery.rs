//! The additive pipeline: ex-ante WSD-EF and WEF, ex-post WEF(1,1) and
//! WPROP1. Also writes the lottery as JSON and reads it back.

use fairlot::io::{load_instance, load_lottery, lottery_to_json};
use fairlot::pipelines::{bobw_additive, verify_lottery};
use fairlot::Result;

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.json")))?;
    let result = bobw_additive(&instance)?;
    print!("{result}");
    assert!(result.all_hold());

    let json = lottery_to_json(&result.lottery);
    let back = load_lottery(&json, instance.goods())?;
    let notions: Vec<String> = ["wef(1,0)", "wef(0,1)"].map(String::from).to_vec();
    println!("\nstronger notions on the same lottery (not guaranteed with entitlements):");
    for r in verify_lottery(&instance, &back, &notions)? {
        println!("{r}");
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
