use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid rational literal {0:?}")]
    BadRational(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("weights sum to {0}, expected exactly 1")]
    WeightSum(Rational),

    #[error("weight of agent {agent} is {weight}, must be strictly positive")]
    NonPositiveWeight { agent: usize, weight: Rational },

    #[error("negative value {value} for agent {agent}")]
    NegativeValue { agent: usize, value: Rational },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("oracle table of agent {agent} is not {property}")]
    BadOracle { agent: usize, property: &'static str },

    #[error("good {good} is outside the valuation table of {goods} goods")]
    GoodOutOfRange { good: usize, goods: usize },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid lottery: {0}")]
    InvalidLottery(String),

    #[error("unsupported valuation: {0}")]
    UnsupportedValuation(String),

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: Rational, horizon: usize },

    #[error("family {0} is not laminar: {1}")]
    NotLaminar(&'static str, String),

    #[error("matrix violates constraint {label}: sum {sum} outside [{lower}, {upper}]")]
    QuotaViolated {
        label: String,
        sum: Rational,
        lower: i64,
        upper: i64,
    },

    #[error("no integral point: demand short by {deficit}; cut side: {cut:?}")]
    NoIntegralPoint { deficit: i64, cut: Vec<String> },

    #[error("allocation is not feasible under the utility-guarantee bihierarchy: {0}")]
    InfeasibleAllocation(String),

    #[error("too many agents for exhaustive check: {n} > {max}")]
    TooManyAgents { n: usize, max: usize },

    #[error("agent {0} values every good at zero")]
    ZeroValuation(usize),

    #[error("agent {0} has zero utility")]
    ZeroUtility(usize),

    #[error("unknown counterexample {0:?}")]
    UnknownCounterexample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
