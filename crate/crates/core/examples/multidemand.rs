//! Equal entitlements with unit-demand agents: the decomposition used by
//! the pipeline is ex-ante EF, while another lottery with the same
//! marginals is not.

use fairlot::checkers::{check_exante_wef, ExAnte};
use fairlot::io::load_instance;
use fairlot::pipelines::{bobw_multidemand, multidemand_sd_lottery};
use fairlot::Result;

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/unit_demand.json")))?;
    let result = bobw_multidemand(&instance)?;
    print!("{result}");
    let hand = multidemand_sd_lottery()?;
    println!("\nhand-built lottery with the same marginals:\n{hand}");
    println!("{}", check_exante_wef(&instance, ExAnte::Lottery(&hand))?.renamed("exante-ef"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
