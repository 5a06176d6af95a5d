//! Exact linear programming over rationals.
//!
//! Dense two-phase tableau simplex with Bland's rule, so it always
//! terminates. All variables are nonnegative. Infeasible systems come back
//! with a Farkas certificate that can be checked independently of the
//! solver.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `{ x >= 0 : A x (<=|>=|=) b }`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    vars: usize,
    constraints: Vec<LinearConstraint>,
}

/// Row multipliers `y` with `yᵀA ≤ 0` column-wise, `y_r ≤ 0` on `<=` rows,
/// `y_r ≥ 0` on `>=` rows and `yᵀb > 0`. Any `x ≥ 0` satisfying the rows
/// would give `0 ≥ yᵀAx ≥ yᵀb > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rational>, value: Rational },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.vars, "constraint width");
        self.constraints.push(LinearConstraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a constraint given as `(variable, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.vars];
        for (v, c) in terms {
            coeffs[*v] += c;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn feasibility(&self) -> LpOutcome {
        self.minimize(&vec![Rational::zero(); self.vars])
    }

    pub fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
        match self.minimize(&neg) {
            LpOutcome::Optimal { point, value } => LpOutcome::Optimal { point, value: -value },
            other => other,
        }
    }

    pub fn minimize(&self, objective: &[Rational]) -> LpOutcome {
        assert_eq!(objective.len(), self.vars, "objective width");
        Tableau::build(self).solve(objective)
    }

    /// True iff `point` is nonnegative and satisfies every row exactly.
    pub fn satisfies(&self, point: &[Rational]) -> bool {
        point.len() == self.vars
            && point.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    /// Checks a Farkas certificate against this system without using the
    /// solver.
    pub fn verify_certificate(&self, cert: &FarkasCertificate) -> bool {
        let y = &cert.multipliers;
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, yr)| match c.relation {
            Relation::Le => !yr.is_positive(),
            Relation::Ge => !yr.is_negative(),
            Relation::Eq => true,
        });
        let columns_ok = (0..self.vars).all(|j| {
            let s: Rational = self.constraints.iter().zip(y).map(|(c, yr)| &c.coeffs[j] * yr).sum();
            !s.is_positive()
        });
        let rhs: Rational = self.constraints.iter().zip(y).map(|(c, yr)| &c.rhs * yr).sum();
        signs_ok && columns_ok && rhs.is_positive()
    }
}

impl fmt::Display for FarkasCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multipliers.iter().map(format_rational).collect();
        write!(f, "y = [{}]", parts.join(", "))
    }
}

struct Tableau {
    /// Rows of `[A | slack | artificial | rhs]`, sign-normalized so rhs ≥ 0.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    vars: usize,
    /// First artificial column; artificials occupy `art..art + rows`.
    art: usize,
    /// `-1` where a row was negated to make its rhs nonnegative.
    flipped: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let slacks = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let art = lp.vars + slacks;
        let width = art + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut slack = lp.vars;
        for (r, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            row[..lp.vars].clone_from_slice(&c.coeffs);
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width - 1] = c.rhs.clone();
            let flip = c.rhs.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            row[art + r] = Rational::one();
            rows.push(row);
            flipped.push(flip);
        }
        Tableau {
            rows,
            basis: (art..art + m).collect(),
            vars: lp.vars,
            art,
            flipped,
        }
    }

    fn width(&self) -> usize {
        self.art + self.rows.len() + 1
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational]) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &nonzero {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (q, row) in self.rows.iter_mut().enumerate() {
            if q != r {
                eliminate(row);
            }
        }
        let mut o = obj.to_vec();
        eliminate(&mut o);
        obj.clone_from_slice(&o);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Reduced-cost row for minimizing `cost` over the current basis; the
    /// last entry is minus the current objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.resize(self.width(), Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let cb = cost[b].clone();
            for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                if !v.is_zero() {
                    *o -= &cb * v;
                }
            }
        }
        obj
    }

    /// Bland's rule simplex on columns `< limit`. Returns false if unbounded.
    fn run(&mut self, obj: &mut [Rational], limit: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(c) = (0..limit).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &best {
                    None => true,
                    Some((b, _, var)) => ratio < *b || (ratio == *b && self.basis[r] < *var),
                };
                if better {
                    best = Some((ratio, r, self.basis[r]));
                }
            }
            let Some((_, r, _)) = best else {
                return false;
            };
            self.pivot(r, c, obj);
        }
    }

    fn solve(mut self, objective: &[Rational]) -> LpOutcome {
        let m = self.rows.len();
        let width = self.width();
        let rhs = width - 1;
        let mut phase_one_cost = vec![Rational::zero(); width - 1];
        for c in phase_one_cost[self.art..].iter_mut() {
            *c = Rational::one();
        }
        let mut obj = self.reduced_costs(&phase_one_cost);
        self.run(&mut obj, width - 1);
        let infeasibility = -&obj[rhs];
        if infeasibility.is_positive() {
            // π = c_B B⁻¹, read off the artificial block where B⁻¹ lives.
            let multipliers = (0..m)
                .map(|k| {
                    let pi: Rational = (0..m)
                        .filter(|&r| self.basis[r] >= self.art)
                        .map(|r| self.rows[r][self.art + k].clone())
                        .sum();
                    if self.flipped[k] {
                        -pi
                    } else {
                        pi
                    }
                })
                .collect();
            return LpOutcome::Infeasible(FarkasCertificate { multipliers });
        }

        for r in 0..m {
            if self.basis[r] < self.art {
                continue;
            }
            if let Some(c) = (0..self.art).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, c, &mut obj);
            }
        }
        let mut cost = objective.to_vec();
        cost.resize(width - 1, Rational::zero());
        let mut obj = self.reduced_costs(&cost);
        if !self.run(&mut obj, self.art) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Rational::zero(); self.vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.vars {
                point[b] = self.rows[r][rhs].clone();
            }
        }
        LpOutcome::Optimal {
            point,
            value: -&obj[rhs],
        }
    }
}
