//! Weighted maximum Nash welfare as a market equilibrium, and the group-fair
//! lottery built from it.

use fairlot::checkers::{check_wef11, check_wgf};
use fairlot::groupfair::{groupfair_lottery, max_weighted_nash, mwn_gradient_inequality_check, verify_ce};
use fairlot::io::load_instance;
use fairlot::Result;

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/remark.json")))?;
    let solver = max_weighted_nash(&instance)?;
    for entry in &solver.log {
        println!("iter {:>6}  objective {:.9}  gap {:.2e}", entry.iteration, entry.objective, entry.gap);
    }
    let out = groupfair_lottery(&instance)?;
    println!("\nX ({}):\n{}", if out.exact { "exact equilibrium" } else { "rounded" }, out.fractional);
    let prices: Vec<String> = out.prices.iter().map(ToString::to_string).collect();
    println!("prices: {}", prices.join(" "));
    println!("{}", verify_ce(&instance, &out.fractional, &out.prices, 0.0)?);
    println!("{}", mwn_gradient_inequality_check(&instance, &out.fractional, 0.0)?);
    println!("{}", check_wgf(&instance, &out.fractional)?);
    println!("\nlottery:\n{}", out.lottery);
    // Light goods all go to the third agent, so someone is left empty.
    for y in out.lottery.allocations() {
        println!("{y}: {}", check_wef11(&instance, y)?);
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
