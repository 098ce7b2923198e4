//! Exact rational simplex for `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! Dense tableau, two phases, Bland's rule for entering and leaving
//! variables so degenerate problems cannot cycle. Every quantity is an exact
//! rational; results carry their own certificates (duals on optimality, a
//! Farkas vector on infeasibility).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct LinearProgram {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// `y` with `Aᵀy ≤ c` and `b·y = value`.
    pub duals: Vec<Rational>,
    /// Basic column per row; `None` for rows found to be linearly redundant.
    pub basis: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// `y` with `yᵀA ≤ 0` and `yᵀb > 0`, so no `x ≥ 0` solves `A x = b`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

impl LinearProgram {
    pub fn new(rows: Vec<Vec<Rational>>, rhs: Vec<Rational>, cost: Vec<Rational>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: rhs.len(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cost.len()) {
            return Err(Error::DimensionMismatch {
                expected: cost.len(),
                found: bad.len(),
            });
        }
        Ok(Self { rows, rhs, cost })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cost.len()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::new(self).run(&self.cost)
    }

    /// Phase one only: a basic feasible point or a Farkas certificate.
    pub fn feasible_point(&self) -> LpOutcome {
        let zero = vec![Rational::zero(); self.n_cols()];
        Tableau::new(self).run(&zero)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// `m` rows of width `n + m + 1`; the last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    /// Reduced costs, same width; last entry is minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    /// Sign applied to each original row so the right-hand side is nonnegative.
    sign: Vec<bool>,
    redundant: Vec<bool>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.cost.len();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let flip = b.is_negative();
            let mut r = vec![Rational::zero(); width];
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    r[j] = if flip { -a } else { a.clone() };
                }
            }
            r[n + i] = Rational::one();
            r[n + m] = if flip { -b } else { b.clone() };
            t.push(r);
            sign.push(flip);
        }
        Self {
            m,
            n,
            t,
            obj: vec![Rational::zero(); width],
            basis: (n..n + m).collect(),
            sign,
            redundant: vec![false; m],
        }
    }

    fn rhs(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.t[r][c];
        let mut nonzero = Vec::new();
        for j in 0..=self.rhs() {
            if !self.t[r][j].is_zero() {
                self.t[r][j] *= &inv;
                nonzero.push(j);
            }
        }
        let pivot_row = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nonzero {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nonzero {
                self.obj[j] -= &f * &pivot_row[j];
            }
        }
        self.t[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland's rule over original columns. Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let Some(c) = (0..self.n).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if self.redundant[i] || !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / &self.t[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    /// `y_i` recovered from the reduced cost of artificial column `i`, whose
    /// cost is `artificial_cost`; undoes the row sign flip.
    fn multipliers(&self, artificial_cost: &Rational) -> Vec<Rational> {
        (0..self.m)
            .map(|i| {
                let y = artificial_cost - &self.obj[self.n + i];
                if self.sign[i] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn run(mut self, cost: &[Rational]) -> LpOutcome {
        let (n, m, rhs) = (self.n, self.m, self.rhs());

        // Phase one: minimize the sum of artificials.
        for j in (0..n).chain(std::iter::once(rhs)) {
            let s: Rational = self.t.iter().map(|row| &row[j]).sum();
            self.obj[j] = -s;
        }
        self.optimize();
        if self.obj[rhs].is_negative() {
            return LpOutcome::Infeasible {
                farkas: self.multipliers(&Rational::one()),
            };
        }

        // Drive zero-level artificials out of the basis, or retire their rows.
        for r in 0..m {
            if self.basis[r] < n {
                continue;
            }
            match (0..n).find(|&j| !self.t[r][j].is_zero()) {
                Some(c) => self.pivot(r, c),
                None => self.redundant[r] = true,
            }
        }

        // Phase two.
        for j in 0..=rhs {
            self.obj[j] = if j < n { cost[j].clone() } else { Rational::zero() };
        }
        for r in 0..m {
            let b = self.basis[r];
            if b >= n || cost[b].is_zero() {
                continue;
            }
            let f = cost[b].clone();
            for j in 0..=rhs {
                if !self.t[r][j].is_zero() {
                    self.obj[j] -= &f * &self.t[r][j];
                }
            }
        }
        if !self.optimize() {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![Rational::zero(); n];
        for r in 0..m {
            if self.basis[r] < n {
                x[self.basis[r]] = self.t[r][rhs].clone();
            }
        }
        let value = -self.obj[rhs].clone();
        let duals = self.multipliers(&Rational::zero());
        let basis = (0..m)
            .map(|r| (!self.redundant[r]).then_some(self.basis[r]))
            .collect();
        LpOutcome::Optimal(LpSolution {
            x,
            value,
            duals,
            basis,
        })
    }
}
