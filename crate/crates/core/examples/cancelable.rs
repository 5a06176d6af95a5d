//! Cancelable set functions given as value tables: eating plus
//! decomposition still yields SD-EF ex ante and EF1 ex post.

use fairlot::pipelines::bobw_cancelable;
use fairlot::rational::int;
use fairlot::{Instance, OracleTable, Result, Valuation};

pub fn run_example() -> Result<()> {
    // A strictly increasing transform of an additive function is cancelable.
    let table = |w: [i64; 4]| {
        OracleTable::from_fn(4, move |s| {
            let a: i64 = s.iter().map(|&g| w[g]).sum();
            int(a * a + a)
        })
    };
    let instance = Instance::with_equal_weights(vec![
        Valuation::Oracle(table([5, 3, 2, 1])?),
        Valuation::Oracle(table([1, 4, 4, 2])?),
    ])?;
    let result = bobw_cancelable(&instance)?;
    print!("{result}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
