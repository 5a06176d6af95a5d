//! JSON file formats for instances and lotteries.
//!
//! Instance:
//!
//! ```json
//! {
//!   "agents": 2, "goods": 2,
//!   "weights": ["1/3", "2/3"],
//!   "valuations": [
//!     {"kind": "additive", "values": ["1", "2"]},
//!     {"kind": "multidemand", "k": 1, "values": ["3", "1"]}
//!   ],
//!   "good_order": [0, 1]
//! }
//! ```
//!
//! `xos` valuations carry `clauses` (a list of value vectors) and `oracle`
//! valuations carry `table`, the value of every subset indexed by bitmask.
//!
//! Lottery: `{"support": [{"prob": "1/2", "bundles": [[0], [1]]}, ...]}`.

use serde::{Deserialize, Serialize};

use crate::allocation::{IntegralAllocation, Lottery};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{serde_rational, Rational};
use crate::valuation::{OracleTable, Valuation};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    agents: usize,
    goods: usize,
    #[serde(with = "serde_rational::vec")]
    weights: Vec<Rational>,
    valuations: Vec<ValuationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    good_order: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ValuationDoc {
    Additive {
        #[serde(with = "serde_rational::vec")]
        values: Vec<Rational>,
    },
    Multidemand {
        k: usize,
        #[serde(with = "serde_rational::vec")]
        values: Vec<Rational>,
    },
    Xos {
        #[serde(with = "serde_rational::vec_vec")]
        clauses: Vec<Vec<Rational>>,
    },
    Oracle {
        #[serde(with = "serde_rational::vec")]
        table: Vec<Rational>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LotteryDoc {
    support: Vec<SupportDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportDoc {
    #[serde(with = "serde_rational")]
    prob: Rational,
    bundles: Vec<Vec<usize>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses and validates an instance document.
pub fn load_instance(source: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(source).map_err(parse_error)?;
    if doc.weights.len() != doc.agents || doc.valuations.len() != doc.agents {
        return Err(Error::InvalidInstance(format!(
            "agents = {} but {} weights and {} valuations given",
            doc.agents,
            doc.weights.len(),
            doc.valuations.len()
        )));
    }
    let valuations = doc
        .valuations
        .into_iter()
        .enumerate()
        .map(|(agent, v)| {
            Ok(match v {
                ValuationDoc::Additive { values } => Valuation::Additive(values),
                ValuationDoc::Multidemand { k, values } => Valuation::MultiDemand { k, values },
                ValuationDoc::Xos { clauses } => Valuation::Xos(clauses),
                ValuationDoc::Oracle { table } => {
                    Valuation::Oracle(OracleTable::new(doc.goods, table).map_err(|e| match e {
                        Error::BadOracle { property, .. } => Error::BadOracle { agent, property },
                        Error::NegativeValue { value, .. } => Error::NegativeValue { agent, value },
                        other => other,
                    })?)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(v) = valuations.iter().find(|v| v.goods() != doc.goods) {
        return Err(Error::InvalidInstance(format!(
            "goods = {} but a {} valuation covers {} goods",
            doc.goods,
            v.kind(),
            v.goods()
        )));
    }
    Instance::new(doc.weights, valuations, doc.good_order)
}

pub fn instance_to_json(instance: &Instance) -> String {
    let doc = InstanceDoc {
        agents: instance.agents(),
        goods: instance.goods(),
        weights: instance.weights().to_vec(),
        valuations: instance
            .valuations()
            .iter()
            .map(|v| match v {
                Valuation::Additive(values) => ValuationDoc::Additive {
                    values: values.clone(),
                },
                Valuation::MultiDemand { k, values } => ValuationDoc::Multidemand {
                    k: *k,
                    values: values.clone(),
                },
                Valuation::Xos(clauses) => ValuationDoc::Xos {
                    clauses: clauses.clone(),
                },
                Valuation::Oracle(t) => ValuationDoc::Oracle {
                    table: t.entries().to_vec(),
                },
            })
            .collect(),
        good_order: Some(instance.good_order().to_vec()),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes")
}

pub fn lottery_to_json(lottery: &Lottery) -> String {
    let doc = LotteryDoc {
        support: lottery
            .support()
            .iter()
            .map(|(p, y)| SupportDoc {
                prob: p.clone(),
                bundles: y.bundles(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("lottery serializes")
}

/// Parses a lottery over `goods` goods and validates it.
pub fn load_lottery(source: &str, goods: usize) -> Result<Lottery> {
    let doc: LotteryDoc = serde_json::from_str(source).map_err(parse_error)?;
    let support = doc
        .support
        .into_iter()
        .map(|s| Ok((s.prob, IntegralAllocation::from_bundles(&s.bundles, goods)?)))
        .collect::<Result<Vec<_>>>()?;
    Lottery::new(support)
}
