use num_traits::{One, Zero};

use super::inequality::{canonicalize_equality, LinearInequality};
use super::linalg::{dot, null_space, rref};
use crate::error::{Error, Result};
use crate::strategies::Vertex;
use crate::Rational;

/// Affine hull of a point set as a reduced system `x_p + Σ_f E_pf·x_f = e_p`,
/// one row per pivot coordinate `p`. The remaining (free) coordinates
/// parametrize the hull, which gives the projection used by facet
/// enumeration and the LPs.
#[derive(Clone, Debug)]
pub struct AffineHull {
    ambient: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl AffineHull {
    pub fn of_points(points: &[Vec<Rational>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Internal("affine hull of an empty point set".into()));
        };
        let ambient = first.len();
        if let Some(bad) = points.iter().find(|p| p.len() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: bad.len(),
            });
        }
        // (c, β) with c·v − β = 0 for every v.
        let homogeneous: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| {
                let mut row = p.clone();
                row.push(-Rational::one());
                row
            })
            .collect();
        let kernel = null_space(homogeneous, ambient + 1);
        let reduced = rref(kernel, ambient + 1);
        let mut rows = Vec::with_capacity(reduced.rows.len());
        let mut rhs = Vec::with_capacity(reduced.rows.len());
        for mut row in reduced.rows {
            rhs.push(row.pop().expect("homogeneous column"));
            rows.push(row);
        }
        if reduced.pivots.iter().any(|&p| p >= ambient) {
            return Err(Error::Internal("affine hull pivot on the constant column".into()));
        }
        let pivots = reduced.pivots;
        let free = (0..ambient).filter(|j| !pivots.contains(j)).collect();
        Ok(Self {
            ambient,
            rows,
            rhs,
            pivots,
            free,
        })
    }

    /// The solution set of `coeffs·x = bound` for each given equation.
    /// Fails when the system is inconsistent.
    pub fn of_equations(equations: &[LinearInequality], ambient: usize) -> Result<Self> {
        if let Some(bad) = equations.iter().find(|e| e.dimension() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: bad.dimension(),
            });
        }
        let augmented: Vec<Vec<Rational>> = equations
            .iter()
            .map(|e| {
                let mut row = e.coeffs_rational();
                row.push(e.bound_rational());
                row
            })
            .collect();
        let reduced = rref(augmented, ambient + 1);
        if reduced.pivots.contains(&ambient) {
            return Err(Error::InvalidTable("the equations have no common solution".into()));
        }
        let mut rows = Vec::with_capacity(reduced.rows.len());
        let mut rhs = Vec::with_capacity(reduced.rows.len());
        for mut row in reduced.rows {
            rhs.push(row.pop().expect("augmented column"));
            rows.push(row);
        }
        let pivots = reduced.pivots;
        let free = (0..ambient).filter(|j| !pivots.contains(j)).collect();
        Ok(Self {
            ambient,
            rows,
            rhs,
            pivots,
            free,
        })
    }

    pub fn of_vertices(vertices: &[Vertex]) -> Result<Self> {
        let points: Vec<Vec<Rational>> = vertices.iter().map(Vertex::to_rational).collect();
        Self::of_points(&points)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    pub fn free_coords(&self) -> &[usize] {
        &self.free
    }

    pub fn pivot_coords(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduced rows as `(coeffs, rhs)` in ambient coordinates.
    pub(crate) fn raw_equalities(&self) -> impl Iterator<Item = (&[Rational], &Rational)> {
        self.rows.iter().map(Vec::as_slice).zip(&self.rhs)
    }

    /// Canonical integer equations, ordered by pivot coordinate.
    pub fn equalities(&self) -> Vec<LinearInequality> {
        self.raw_equalities()
            .map(|(c, e)| canonicalize_equality(c, e).expect("hull rows are nonzero"))
            .collect()
    }

    /// First equation the point breaks, with residual `coeffs·x − rhs`.
    pub fn violated_equality(&self, point: &[Rational]) -> Option<(usize, Rational)> {
        self.raw_equalities().enumerate().find_map(|(i, (c, e))| {
            let r = dot(c, point) - e;
            (!r.is_zero()).then_some((i, r))
        })
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.ambient && self.violated_equality(point).is_none()
    }

    /// Free coordinates of a point.
    pub fn project(&self, point: &[Rational]) -> Vec<Rational> {
        self.free.iter().map(|&j| point[j].clone()).collect()
    }

    /// Point of the hull with the given free coordinates.
    pub fn lift(&self, free_values: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ambient];
        for (&j, v) in self.free.iter().zip(free_values) {
            x[j] = v.clone();
        }
        for ((row, e), &p) in self.rows.iter().zip(&self.rhs).zip(&self.pivots) {
            let s: Rational = self
                .free
                .iter()
                .filter(|&&j| !row[j].is_zero())
                .map(|&j| &row[j] * &x[j])
                .sum();
            x[p] = e - s;
        }
        x
    }

    /// Equivalent inequality on the hull with zero pivot coefficients.
    pub fn reduce(&self, coeffs: &[Rational], bound: &Rational) -> (Vec<Rational>, Rational) {
        let mut c = coeffs.to_vec();
        let mut b = bound.clone();
        for ((row, e), &p) in self.rows.iter().zip(&self.rhs).zip(&self.pivots) {
            if c[p].is_zero() {
                continue;
            }
            let f = c[p].clone();
            for (cj, rj) in c.iter_mut().zip(row) {
                if !rj.is_zero() {
                    *cj -= &f * rj;
                }
            }
            b -= &f * e;
        }
        (c, b)
    }

    /// Inequality in free coordinates.
    pub fn project_inequality(&self, coeffs: &[Rational], bound: &Rational) -> (Vec<Rational>, Rational) {
        let (c, b) = self.reduce(coeffs, bound);
        (self.project(&c), b)
    }

    /// Ambient inequality with the given free-coordinate coefficients.
    pub fn embed_inequality(&self, free_coeffs: &[Rational]) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.ambient];
        for (&j, v) in self.free.iter().zip(free_coeffs) {
            c[j] = v.clone();
        }
        c
    }
}

/// Equations satisfied by every vertex (canonical, pivot order) and the
/// dimension of their affine hull.
pub fn affine_hull(vertices: &[Vertex]) -> Result<(Vec<LinearInequality>, usize)> {
    let hull = AffineHull::of_vertices(vertices)?;
    Ok((hull.equalities(), hull.dimension()))
}
