pub mod allocation;
pub mod checkers;
pub mod decomp;
pub mod eating;
pub mod error;
pub mod groupfair;
mod flow;
pub mod instance;
pub mod io;
pub mod lp;
pub mod pipelines;
pub mod picking;
pub mod rational;
pub mod valuation;

pub use allocation::{FractionalAllocation, IntegralAllocation, Lottery};
pub use eating::{dse, eaten, EatingTrace};
pub use error::{Error, Result};
pub use instance::Instance;
pub use rational::Rational;
pub use valuation::{OracleTable, Valuation};
