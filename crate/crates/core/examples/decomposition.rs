//! Decomposing a fractional allocation into a lottery whose every support
//! allocation respects the utility-guarantee bihierarchy.

use fairlot::decomp::{build_ug_bihierarchy, check_feasible, decompose};
use fairlot::io::load_instance;
use fairlot::{dse, Result};

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.json")))?;
    let (x, _) = dse(&instance);
    let h = build_ug_bihierarchy(&instance, &x);
    print!("{}", h.dump(x.rows()));
    let lottery = decompose(&x, &h)?;
    println!("\nlottery with {} allocations:\n{lottery}", lottery.len());
    for y in lottery.allocations() {
        assert!(check_feasible(y, &h).is_feasible());
    }
    assert_eq!(lottery.marginal_matrix(), x);
    println!("marginals match the fractional allocation exactly");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
