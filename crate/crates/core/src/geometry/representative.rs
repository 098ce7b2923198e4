use num_traits::{One, Zero};

use super::affine::AffineHull;
use super::inequality::{canonicalize, LinearInequality};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::Rational;

/// Picks one ambient form of an inequality among all forms that agree on the
/// affine hull: the one with least `Σ|c_i|`.
///
/// An inequality only matters up to adding multiples of the hull equations,
/// so the input is first reduced to have zero pivot coefficients (a unique
/// form per half-space). That reduced form feeds a fixed LP, which makes the
/// result a function of the half-space alone. Positivity facets come out as
/// `−p_i ≤ 0`.
pub fn sparse_representative(
    hull: &AffineHull,
    coeffs: &[Rational],
    bound: &Rational,
) -> Result<LinearInequality> {
    let (c, b) = hull.reduce(coeffs, bound);
    let eqs: Vec<(&[Rational], &Rational)> = hull.raw_equalities().collect();
    let m = eqs.len();
    if m == 0 {
        return canonicalize(&c, &b);
    }
    let n = c.len();
    // Columns: u⁺ (n), u⁻ (n), t⁺ (m), t⁻ (m);
    // row j: −u⁺_j + u⁻_j + Σ_i E_ij (t⁺_i − t⁻_i) = −c_j.
    let width = 2 * n + 2 * m;
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = vec![Rational::zero(); width];
        row[j] = -Rational::one();
        row[n + j] = Rational::one();
        for (i, (e, _)) in eqs.iter().enumerate() {
            if !e[j].is_zero() {
                row[2 * n + i] = e[j].clone();
                row[2 * n + m + i] = -e[j].clone();
            }
        }
        rows.push(row);
        rhs.push(-c[j].clone());
    }
    let mut cost = vec![Rational::zero(); width];
    for x in cost.iter_mut().take(2 * n) {
        *x = Rational::one();
    }
    let lp = LinearProgram::new(rows, rhs, cost)?;
    let LpOutcome::Optimal(sol) = lp.solve() else {
        return Err(Error::Internal("L1 representative LP did not reach an optimum".into()));
    };
    let mut c = c;
    let mut b = b;
    for (i, (e, rhs_i)) in eqs.iter().enumerate() {
        let t = &sol.x[2 * n + i] - &sol.x[2 * n + m + i];
        if t.is_zero() {
            continue;
        }
        for (cj, ej) in c.iter_mut().zip(e.iter()) {
            if !ej.is_zero() {
                *cj += &t * ej;
            }
        }
        b += &t * *rhs_i;
    }
    canonicalize(&c, &b)
}
