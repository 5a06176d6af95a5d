//! Seeded instance generators shared by the integration tests.
#![allow(dead_code)]

use fairlot::allocation::IntegralAllocation;
use fairlot::picking::PickingSequence;
use fairlot::rational::{int, rat};
use fairlot::{Instance, OracleTable, Rational, Valuation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive integer draws normalized to sum to exactly one.
pub fn weights(rng: &mut impl Rng, n: usize, equal: bool) -> Vec<Rational> {
    if equal {
        return vec![rat(1, n as i64); n];
    }
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|r| rat(r, total)).collect()
}

/// Small integers, so ties are common; at least one entry is positive.
pub fn values(rng: &mut impl Rng, m: usize, max: i64) -> Vec<Rational> {
    let mut v: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=max)).collect();
    if v.iter().all(|&x| x == 0) {
        let g = rng.gen_range(0..m);
        v[g] = rng.gen_range(1..=max);
    }
    v.into_iter().map(int).collect()
}

pub fn additive(rng: &mut impl Rng, n: usize, m: usize, equal: bool) -> Instance {
    let w = weights(rng, n, equal);
    let vals = (0..n).map(|_| Valuation::Additive(values(rng, m, 9))).collect();
    Instance::new(w, vals, None).expect("valid instance")
}

pub fn multidemand_mix(rng: &mut impl Rng, n: usize, m: usize) -> Instance {
    let vals = (0..n)
        .map(|_| {
            let v = values(rng, m, 6);
            if rng.gen_bool(0.5) {
                Valuation::Additive(v)
            } else {
                Valuation::MultiDemand { k: rng.gen_range(1..=3), values: v }
            }
        })
        .collect();
    Instance::with_equal_weights(vals).expect("valid instance")
}

pub fn xos(rng: &mut impl Rng, n: usize, m: usize) -> Instance {
    let equal = rng.gen_bool(0.3);
    let w = weights(rng, n, equal);
    let vals = (0..n)
        .map(|_| {
            let clauses = rng.gen_range(1..=4);
            Valuation::Xos((0..clauses).map(|_| values(rng, m, 6)).collect())
        })
        .collect();
    Instance::new(w, vals, None).expect("valid instance")
}

/// Strictly increasing transforms of additive functions, and unit demand;
/// all of these are cancelable.
pub fn cancelable_valuation(rng: &mut impl Rng, m: usize) -> Valuation {
    let a: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=5)).collect();
    let kind = rng.gen_range(0..4);
    let table = OracleTable::from_fn(m, move |s| {
        let t: i64 = s.iter().map(|&g| a[g]).sum();
        match kind {
            0 => int(t),
            1 => int(t * t + t),
            2 => int(t * t * t),
            _ => int(s.iter().map(|&g| a[g]).max().unwrap_or(0)),
        }
    })
    .expect("monotone table");
    Valuation::Oracle(table)
}

pub fn cancelable(rng: &mut impl Rng, n: usize, m: usize) -> Instance {
    Instance::with_equal_weights((0..n).map(|_| cancelable_valuation(rng, m)).collect()).expect("valid instance")
}

pub fn sequence(rng: &mut impl Rng, n: usize, m: usize) -> PickingSequence {
    PickingSequence::new((0..m).map(|_| rng.gen_range(0..n)).collect(), n).expect("agents in range")
}

pub fn pick_xy(rng: &mut impl Rng) -> (Rational, Rational) {
    let grid = [int(0), rat(1, 2), int(1)];
    (grid.choose(rng).unwrap().clone(), grid.choose(rng).unwrap().clone())
}

/// Every recursively balanced sequence of length `m` over `n` agents.
pub fn all_rb_sequences(n: usize, m: usize) -> Vec<PickingSequence> {
    fn go(n: usize, m: usize, counts: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<PickingSequence>) {
        if cur.len() == m {
            out.push(PickingSequence::new(cur.clone(), n).unwrap());
            return;
        }
        let lo = *counts.iter().min().unwrap();
        for a in 0..n {
            if counts[a] == lo {
                counts[a] += 1;
                cur.push(a);
                go(n, m, counts, cur, out);
                cur.pop();
                counts[a] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut vec![0; n], &mut Vec::new(), &mut out);
    out
}

/// Unweighted EF1 by brute force over removed goods, written independently
/// of the library's checkers.
pub fn ef1_oracle(instance: &Instance, alloc: &IntegralAllocation) -> bool {
    let n = instance.agents();
    (0..n).all(|i| {
        let v = instance.valuation(i);
        let own = v.value(&alloc.bundle(i));
        (0..n).filter(|&j| j != i).all(|j| {
            let other = alloc.bundle(j);
            other.is_empty()
                || other.iter().any(|&g| {
                    let rest: Vec<usize> = other.iter().copied().filter(|&h| h != g).collect();
                    own >= v.value(&rest)
                })
        })
    })
}
