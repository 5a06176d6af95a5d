//! Simultaneous eating at entitlement speeds.
//!
//! Every agent eats her most preferred remaining good at speed `w_i`. The
//! simulation is event driven: between two consecutive finish times the set
//! of goods being eaten is constant, so each event advances time to the next
//! finish time exactly.

use std::fmt;

use num_traits::{One, Zero};

use crate::allocation::FractionalAllocation;
use crate::error::{Error, Result};
use crate::instance::{zero_matrix, Instance};
use crate::rational::{format_rational, int, Rational};

/// One contiguous stretch during which an agent eats a single good.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub good: usize,
    pub start: Rational,
    pub end: Rational,
}

/// One event: the time at which a set of goods was used up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EatingEvent {
    pub time: Rational,
    pub finished: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EatingTrace {
    /// Eating time `t(g)` of every good.
    pub finish_time: Vec<Rational>,
    /// Per agent, in eating order; never contains zero-length segments.
    pub segments: Vec<Vec<Segment>>,
    pub events: Vec<EatingEvent>,
    /// Per agent preference orders used during the run.
    pub orders: Vec<Vec<usize>>,
}

impl EatingTrace {
    /// Total run time, which is always the number of goods.
    pub fn horizon(&self) -> usize {
        self.finish_time.len()
    }

    /// The prefix of `agent`'s preference order consumed by time `t`.
    ///
    /// At time `t` the agent is about to eat (or is eating) the good of the
    /// segment with `start <= t < end`; everything strictly before that good
    /// in her order is already gone. At `t = m` every good is returned.
    pub fn eaten(&self, agent: usize, t: &Rational) -> Result<Vec<usize>> {
        let horizon = int(self.horizon() as i64);
        if *t < Rational::zero() || *t > horizon {
            return Err(Error::TimeOutOfRange {
                t: t.clone(),
                horizon: self.horizon(),
            });
        }
        let order = &self.orders[agent];
        if *t == horizon {
            return Ok(order.clone());
        }
        let current = self.segments[agent]
            .iter()
            .find(|s| s.start <= *t && *t < s.end)
            .expect("segments cover [0, m)");
        let pos = order
            .iter()
            .position(|&g| g == current.good)
            .expect("segment good is ranked");
        Ok(order[..pos].to_vec())
    }

    /// Rebuilds `x_ig = w_i · (time i spent on g)` from the segments.
    pub fn matrix(&self, weights: &[Rational]) -> Result<FractionalAllocation> {
        let mut x = zero_matrix(self.segments.len(), self.horizon());
        for (i, segs) in self.segments.iter().enumerate() {
            for s in segs {
                x[i][s.good] += &weights[i] * (&s.end - &s.start);
            }
        }
        FractionalAllocation::new(x)
    }

    /// Human-readable event log: one `t=<p/q> finished={goods}` line per
    /// event, then the per-agent segment table.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EatingTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ev in &self.events {
            let goods: Vec<String> = ev.finished.iter().map(|g| g.to_string()).collect();
            writeln!(
                f,
                "t={} finished={{{}}}",
                format_rational(&ev.time),
                goods.join(",")
            )?;
        }
        for (i, segs) in self.segments.iter().enumerate() {
            let parts: Vec<String> = segs
                .iter()
                .map(|s| {
                    format!(
                        "g{}[{}, {}]",
                        s.good,
                        format_rational(&s.start),
                        format_rational(&s.end)
                    )
                })
                .collect();
            writeln!(f, "agent {i}: {}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Runs the eating procedure and returns the fractional allocation together
/// with its trace. Only single-good rankings are consulted.
pub fn dse(instance: &Instance) -> (FractionalAllocation, EatingTrace) {
    let n = instance.agents();
    let m = instance.goods();
    let orders = instance.preference_orders();
    dse_with_orders(instance.weights(), &orders, m, n)
}

pub(crate) fn dse_with_orders(
    weights: &[Rational],
    orders: &[Vec<usize>],
    m: usize,
    n: usize,
) -> (FractionalAllocation, EatingTrace) {
    let mut x = zero_matrix(n, m);
    let mut supply = vec![Rational::one(); m];
    let mut removed = vec![false; m];
    let mut finish_time = vec![Rational::zero(); m];
    let mut segments: Vec<Vec<Segment>> = vec![Vec::new(); n];
    let mut events = Vec::new();
    // Position in each agent's order of the good she is eating.
    let mut cursor = vec![0usize; n];
    let mut started = vec![Rational::zero(); n];
    let mut now = Rational::zero();
    let mut remaining = m;

    while remaining > 0 {
        let mut speed = vec![Rational::zero(); m];
        for i in 0..n {
            while removed[orders[i][cursor[i]]] {
                cursor[i] += 1;
            }
            speed[orders[i][cursor[i]]] += &weights[i];
        }
        let step = (0..m)
            .filter(|&g| !removed[g] && !speed[g].is_zero())
            .map(|g| &supply[g] / &speed[g])
            .min()
            .expect("some good is being eaten");
        for i in 0..n {
            let g = orders[i][cursor[i]];
            let bite = &weights[i] * &step;
            x[i][g] += &bite;
            supply[g] -= bite;
        }
        now += &step;
        let finished: Vec<usize> = (0..m)
            .filter(|&g| !removed[g] && !speed[g].is_zero() && supply[g].is_zero())
            .collect();
        for &g in &finished {
            removed[g] = true;
            finish_time[g] = now.clone();
        }
        for i in 0..n {
            let g = orders[i][cursor[i]];
            if removed[g] {
                segments[i].push(Segment {
                    good: g,
                    start: std::mem::replace(&mut started[i], now.clone()),
                    end: now.clone(),
                });
            }
        }
        remaining -= finished.len();
        let mut sorted = finished;
        sorted.sort_unstable();
        events.push(EatingEvent {
            time: now.clone(),
            finished: sorted,
        });
    }

    let alloc = FractionalAllocation::new(x).expect("eating allocates every good exactly once");
    (
        alloc,
        EatingTrace {
            finish_time,
            segments,
            events,
            orders: orders.to_vec(),
        },
    )
}

/// Free-function form of [`EatingTrace::eaten`].
pub fn eaten(trace: &EatingTrace, agent: usize, t: &Rational) -> Result<Vec<usize>> {
    trace.eaten(agent, t)
}
