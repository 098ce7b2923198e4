//! Independent checks of an H-representation against its vertex set.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::affine::AffineHull;
use super::dd::{extreme_rays, DdError, DdOptions};
use super::linalg::{dot, primitive_integer, rank};
use super::HRepresentation;
use crate::error::{Error, Result};
use crate::exec;
use crate::lp::{LinearProgram, LpOutcome};
use crate::strategies::Vertex;
use crate::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseReport {
    pub passed: bool,
    /// Human-readable witnesses, one per failure.
    pub failures: Vec<String>,
}

impl ClauseReport {
    fn from_failures(failures: Vec<String>) -> Self {
        Self {
            passed: failures.is_empty(),
            failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Every vertex satisfies every equation exactly and every facet.
    pub valid: ClauseReport,
    /// Every facet is tight on `dimension` affinely independent vertices.
    pub tight: ClauseReport,
    /// No facet is implied by the remaining rows (one LP per facet).
    pub irredundant: ClauseReport,
    /// The described polytope has no vertex outside the input set.
    pub complete: ClauseReport,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.valid.passed && self.tight.passed && self.irredundant.passed && self.complete.passed
    }

    pub fn clauses(&self) -> [(&'static str, &ClauseReport); 4] {
        [
            ("valid", &self.valid),
            ("tight", &self.tight),
            ("irredundant", &self.irredundant),
            ("complete", &self.complete),
        ]
    }
}

pub fn verify_h_representation(
    vertices: &[Vertex],
    hrep: &HRepresentation,
) -> Result<VerificationReport> {
    if let Some(v) = vertices.iter().find(|v| v.len() != hrep.ambient) {
        return Err(Error::DimensionMismatch {
            expected: hrep.ambient,
            found: v.len(),
        });
    }
    if let Some(f) = hrep
        .equalities
        .iter()
        .chain(&hrep.facets)
        .find(|f| f.dimension() != hrep.ambient)
    {
        return Err(Error::DimensionMismatch {
            expected: hrep.ambient,
            found: f.dimension(),
        });
    }
    let valid = check_valid(vertices, hrep);
    let tight = check_tight(vertices, hrep);
    let (irredundant, complete) = match AffineHull::of_equations(&hrep.equalities, hrep.ambient) {
        Ok(space) if space.dimension() == hrep.dimension => {
            let projected = project_facets(&space, hrep);
            (
                check_irredundant(&projected),
                check_complete(vertices, &space, &projected),
            )
        }
        Ok(space) => {
            let msg = format!(
                "equations leave dimension {}, representation claims {}",
                space.dimension(),
                hrep.dimension
            );
            (
                ClauseReport::from_failures(vec![msg.clone()]),
                ClauseReport::from_failures(vec![msg]),
            )
        }
        Err(e) => {
            let msg = e.to_string();
            (
                ClauseReport::from_failures(vec![msg.clone()]),
                ClauseReport::from_failures(vec![msg]),
            )
        }
    };
    Ok(VerificationReport {
        valid,
        tight,
        irredundant,
        complete,
    })
}

fn check_valid(vertices: &[Vertex], hrep: &HRepresentation) -> ClauseReport {
    let mut failures = Vec::new();
    for (i, eq) in hrep.equalities.iter().enumerate() {
        if let Some(k) = vertices
            .iter()
            .position(|v| eq.value_at_01(v.coords()) != *eq.bound())
        {
            failures.push(format!("vertex {k} breaks equality {i}"));
        }
    }
    for (i, f) in hrep.facets.iter().enumerate() {
        if let Some(k) = vertices
            .iter()
            .position(|v| f.value_at_01(v.coords()) > *f.bound())
        {
            failures.push(format!("vertex {k} violates facet {i}"));
        }
    }
    ClauseReport::from_failures(failures)
}

fn check_tight(vertices: &[Vertex], hrep: &HRepresentation) -> ClauseReport {
    let ranks = exec::map_slice(&hrep.facets, |f| {
        let rows: Vec<Vec<Rational>> = vertices
            .iter()
            .filter(|v| f.value_at_01(v.coords()) == *f.bound())
            .map(|v| {
                let mut r = v.to_rational();
                r.push(Rational::one());
                r
            })
            .collect();
        rank(rows, hrep.ambient + 1)
    });
    let failures = ranks
        .iter()
        .enumerate()
        .filter(|(_, &r)| r < hrep.dimension)
        .map(|(i, r)| {
            format!(
                "facet {i} is tight on only {r} affinely independent vertices, need {}",
                hrep.dimension
            )
        })
        .collect();
    ClauseReport::from_failures(failures)
}

/// Facets as `(a, b)` over the free coordinates of the equation space.
fn project_facets(space: &AffineHull, hrep: &HRepresentation) -> Vec<(Vec<Rational>, Rational)> {
    hrep.facets
        .iter()
        .map(|f| space.project_inequality(&f.coeffs_rational(), &f.bound_rational()))
        .collect()
}

fn check_irredundant(projected: &[(Vec<Rational>, Rational)]) -> ClauseReport {
    let outcomes = exec::map_range(projected.len(), |i| redundant_row(projected, i));
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(false) => {}
            Ok(true) => failures.push(format!("facet {i} is implied by the other rows")),
            Err(e) => failures.push(format!("facet {i}: {e}")),
        }
    }
    ClauseReport::from_failures(failures)
}

/// Whether `max a_i·x` over the other rows stays within `b_i`.
fn redundant_row(projected: &[(Vec<Rational>, Rational)], i: usize) -> Result<bool> {
    let (target, bound) = &projected[i];
    let d = target.len();
    if target.iter().all(Zero::is_zero) {
        // Constant row on the equation space: redundant unless infeasible.
        return Ok(!bound.is_negative());
    }
    let others: Vec<&(Vec<Rational>, Rational)> = projected
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, r)| r)
        .collect();
    let m = others.len();
    // x = x⁺ − x⁻, one slack per row.
    let width = 2 * d + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (k, (a, b)) in others.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (j, aj) in a.iter().enumerate() {
            if !aj.is_zero() {
                row[j] = aj.clone();
                row[d + j] = -aj.clone();
            }
        }
        row[2 * d + k] = Rational::one();
        rows.push(row);
        rhs.push(b.clone());
    }
    let mut cost = vec![Rational::zero(); width];
    for (j, tj) in target.iter().enumerate() {
        cost[j] = -tj.clone();
        cost[d + j] = tj.clone();
    }
    match LinearProgram::new(rows, rhs, cost)?.solve() {
        LpOutcome::Optimal(sol) => Ok(-sol.value <= *bound),
        LpOutcome::Unbounded => Ok(false),
        LpOutcome::Infeasible { .. } => Ok(true),
    }
}

fn check_complete(
    vertices: &[Vertex],
    space: &AffineHull,
    projected: &[(Vec<Rational>, Rational)],
) -> ClauseReport {
    let known: BTreeSet<Vec<u8>> = vertices.iter().map(|v| v.coords().to_vec()).collect();
    let outside = |x: &[Rational]| -> Option<String> {
        let as_01: Option<Vec<u8>> = x
            .iter()
            .map(|c| {
                if c.is_zero() {
                    Some(0)
                } else if c.is_one() {
                    Some(1)
                } else {
                    None
                }
            })
            .collect();
        match as_01 {
            Some(p) if known.contains(&p) => None,
            _ => Some(format!(
                "point {} satisfies every row but lies outside the hull",
                format_point(x)
            )),
        }
    };

    let d = space.dimension();
    if d == 0 {
        let x = space.lift(&[]);
        return ClauseReport::from_failures(outside(&x).into_iter().collect());
    }
    // Cone {(x, t) : a·x − b·t ≤ 0, −t ≤ 0}.
    let mut constraints: Vec<Vec<BigInt>> = projected
        .iter()
        .map(|(a, b)| {
            let mut w = a.clone();
            w.push(-b.clone());
            primitive_integer(&w)
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); d + 1];
    t_row[d] = -BigInt::one();
    constraints.push(t_row);

    let cone = match extreme_rays(&constraints, DdOptions::default()) {
        Ok(c) => c,
        Err(DdError::NotPointed { .. }) => {
            return ClauseReport::from_failures(vec![
                "the rows leave a whole line free: the described set is unbounded".into(),
            ])
        }
        Err(DdError::Failed(e)) => return ClauseReport::from_failures(vec![e.to_string()]),
    };
    let mut failures = Vec::new();
    for ray in &cone.rays {
        let t = Rational::from_integer(ray[d].clone());
        if t.is_zero() {
            let dir: Vec<Rational> = ray[..d].iter().map(|c| Rational::from_integer(c.clone())).collect();
            failures.push(format!(
                "the described set is unbounded along {}",
                format_point(&space.embed_inequality(&dir))
            ));
            continue;
        }
        let free: Vec<Rational> = ray[..d]
            .iter()
            .map(|c| Rational::from_integer(c.clone()) / &t)
            .collect();
        failures.extend(outside(&space.lift(&free)));
    }
    ClauseReport::from_failures(failures)
}

fn format_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Vertices of the H-representation found by brute force: every choice of
/// `dimension` facets is solved as an equation system and kept when the
/// solution satisfies all rows. Exponential in the number of facets; meant
/// for small instances and cross-checks only.
pub fn basic_feasible_points(hrep: &HRepresentation) -> Result<Vec<Vec<Rational>>> {
    let space = AffineHull::of_equations(&hrep.equalities, hrep.ambient)?;
    let d = space.dimension();
    if d == 0 {
        return Ok(vec![space.lift(&[])]);
    }
    let rows: Vec<Vec<BigInt>> = project_facets(&space, hrep)
        .into_iter()
        .map(|(a, b)| {
            let mut w = a;
            w.push(b);
            primitive_integer(&w)
        })
        .collect();
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect())
        .collect();

    let combos = combinations(rows.len(), d);
    let found: Vec<Vec<Rational>> = exec::flat_map_chunks(combos.len(), 2048, |range| {
        range
            .filter_map(|c| {
                let pick = &combos[c];
                small
                    .as_ref()
                    .and_then(|s| solve_small(s, pick))
                    .unwrap_or_else(|| solve_exact(&rows, pick))
            })
            .collect()
    });
    let unique: BTreeSet<Vec<Rational>> = found.into_iter().collect();
    Ok(unique.into_iter().map(|x| space.lift(&x)).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Fraction-free elimination in `i128`. Outer `None` means overflow (retry
/// exactly); inner `None` means singular or infeasible.
fn solve_small(rows: &[Vec<i128>], pick: &[usize]) -> Option<Option<Vec<Rational>>> {
    let d = pick.len();
    let mut m: Vec<Vec<i128>> = pick.iter().map(|&i| rows[i].clone()).collect();
    let mut prev: i128 = 1;
    for k in 0..d {
        let Some(p) = (k..d).find(|&i| m[i][k] != 0) else {
            return Some(None);
        };
        m.swap(k, p);
        for i in k + 1..d {
            for j in k + 1..=d {
                let v = m[k][k].checked_mul(m[i][j])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    let det = m[d - 1][d - 1];
    let mut num = vec![0i128; d];
    for i in (0..d).rev() {
        let mut acc = det.checked_mul(m[i][d])?;
        for j in i + 1..d {
            acc = acc.checked_sub(m[i][j].checked_mul(num[j])?)?;
        }
        if acc % m[i][i] != 0 {
            return None;
        }
        num[i] = acc / m[i][i];
    }
    for row in rows {
        let mut lhs: i128 = 0;
        for (a, x) in row[..d].iter().zip(&num) {
            lhs = lhs.checked_add(a.checked_mul(*x)?)?;
        }
        let rhs = row[d].checked_mul(det)?;
        let ok = if det > 0 { lhs <= rhs } else { lhs >= rhs };
        if !ok {
            return Some(None);
        }
    }
    Some(Some(
        num.into_iter()
            .map(|x| Rational::new(BigInt::from(x), BigInt::from(det)))
            .collect(),
    ))
}

fn solve_exact(rows: &[Vec<BigInt>], pick: &[usize]) -> Option<Vec<Rational>> {
    let d = pick.len();
    let aug: Vec<Vec<Rational>> = pick
        .iter()
        .map(|&i| rows[i].iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let r = super::linalg::rref(aug, d + 1);
    if r.pivots.len() != d || r.pivots.contains(&d) {
        return None;
    }
    let x: Vec<Rational> = r.rows.iter().map(|row| row[d].clone()).collect();
    let feasible = rows.iter().all(|row| {
        let a: Vec<Rational> = row[..d].iter().map(|v| Rational::from_integer(v.clone())).collect();
        dot(&a, &x) <= Rational::from_integer(row[d].clone())
    });
    feasible.then_some(x)
}
