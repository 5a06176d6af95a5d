//! XOS valuations: the uniform-by-weight matrix decomposed along each
//! agent's additive witness clause.

use fairlot::io::load_instance;
use fairlot::pipelines::bobw_xos;
use fairlot::Result;

pub fn run_example() -> Result<()> {
    let instance = load_instance(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/xos.json")))?;
    for i in 0..instance.agents() {
        let f = instance.valuation(i).xos_witness().expect("xos");
        let f: Vec<String> = f.iter().map(ToString::to_string).collect();
        println!("agent {i} witness clause: ({})", f.join(", "));
    }
    let result = bobw_xos(&instance)?;
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
