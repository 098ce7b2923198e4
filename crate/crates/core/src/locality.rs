//! Exact membership test for the local polytope.
//!
//! A table is local when some probability distribution over deterministic
//! strategies reproduces it. That is an LP feasibility question over the
//! distinct vertices; the answer comes with a certificate either way: the
//! strategy weights, or an inequality every local model obeys and the table
//! breaks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, evaluate, sparse_representative, AffineHull, LinearInequality};
use crate::lp::{LinearProgram, LpOutcome};
use crate::model::{validate_table, ProbabilityTable};
use crate::strategies::{
    enumerate_vertices, strategy_count, strategy_from_index, vertex_of, VertexSet,
    DEFAULT_ENUMERATION_CAP,
};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalityVerdict {
    /// Weight per strategy index, nonzero entries only. A vertex shared by
    /// several strategies carries its weight on the smallest index.
    Local { weights: BTreeMap<u64, Rational> },
    /// `certificate.coeffs·v ≤ local_bound` for every vertex, while the
    /// table reaches `table_value = local_bound + violation`.
    Nonlocal {
        certificate: LinearInequality,
        violation: Rational,
        table_value: Rational,
        local_bound: Rational,
    },
}

impl LocalityVerdict {
    pub fn is_local(&self) -> bool {
        matches!(self, Self::Local { .. })
    }
}

/// Decides whether the table lies within `slack` (componentwise) of the
/// local polytope of its own selection.
pub fn test_locality(table: &ProbabilityTable, slack: &Rational) -> Result<LocalityVerdict> {
    let vertices = enumerate_vertices(table.selection(), DEFAULT_ENUMERATION_CAP)?;
    test_locality_in(&vertices, table, slack)
}

/// Same as [`test_locality`] with the vertex set supplied by the caller, so
/// repeated tests on one selection enumerate only once.
pub fn test_locality_in(
    vertices: &VertexSet,
    table: &ProbabilityTable,
    slack: &Rational,
) -> Result<LocalityVerdict> {
    if table.selection() != vertices.selection() {
        return Err(Error::ClassMismatch {
            expected: format!("{} {:?}", vertices.selection().class(), vertices.selection().pairs()),
            found: format!("{} {:?}", table.class(), table.selection().pairs()),
        });
    }
    let report = validate_table(table);
    if !report.is_valid() {
        return Err(Error::InvalidTable(report.defects().join("; ")));
    }
    test_point(vertices, table.entries(), slack)
}

/// Membership test for an arbitrary rational point of the ambient space.
/// No normalization is assumed, so points outside the probability simplex
/// (e.g. pushed across a facet) are accepted.
pub fn test_point(vertices: &VertexSet, point: &[Rational], slack: &Rational) -> Result<LocalityVerdict> {
    let n = vertices.ambient_dimension();
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: point.len(),
        });
    }
    if slack.is_negative() {
        return Err(Error::NegativeSlack(slack.to_string()));
    }
    if vertices.is_empty() {
        return Err(Error::Internal("empty vertex set".into()));
    }
    if slack.is_zero() {
        exact_test(vertices, point)
    } else {
        slack_test(vertices, point, slack)
    }
}

fn exact_test(vertices: &VertexSet, point: &[Rational]) -> Result<LocalityVerdict> {
    let n = vertices.ambient_dimension();
    let v = vertices.len();
    // Σ_v w_v·v_i = p_i for each coordinate, Σ_v w_v = 1.
    let mut rows = vec![vec![Rational::zero(); v]; n + 1];
    for (j, vertex) in vertices.vertices().iter().enumerate() {
        for i in vertex.support() {
            rows[i][j] = Rational::one();
        }
        rows[n][j] = Rational::one();
    }
    let mut rhs = point.to_vec();
    rhs.push(Rational::one());
    match LinearProgram::new(rows, rhs, vec![Rational::zero(); v])?.feasible_point() {
        LpOutcome::Optimal(sol) => Ok(local_verdict(vertices, &sol.x[..v])),
        LpOutcome::Infeasible { .. } => {
            let (coeffs, bound) = separating_facet(vertices, point)?;
            nonlocal_verdict(vertices, point, &Rational::zero(), &coeffs, &bound)
        }
        LpOutcome::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

fn slack_test(vertices: &VertexSet, point: &[Rational], slack: &Rational) -> Result<LocalityVerdict> {
    let n = vertices.ambient_dimension();
    let v = vertices.len();
    // Columns: w (v), t (n), r (n).
    //   Σ_v w_v·v_i − t_i = p_i − s      (so t_i = reconstruction − p_i + s)
    //   t_i + r_i = 2s                   (0 ≤ t_i ≤ 2s)
    //   Σ_v w_v = 1
    let width = v + 2 * n;
    let mut rows = vec![vec![Rational::zero(); width]; 2 * n + 1];
    for (j, vertex) in vertices.vertices().iter().enumerate() {
        for i in vertex.support() {
            rows[i][j] = Rational::one();
        }
        rows[2 * n][j] = Rational::one();
    }
    let twice = slack * Rational::from_integer(2.into());
    let mut rhs = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        rows[i][v + i] = -Rational::one();
        rows[n + i][v + i] = Rational::one();
        rows[n + i][v + n + i] = Rational::one();
        rhs.push(&point[i] - slack);
    }
    rhs.extend(std::iter::repeat_n(twice, n));
    rhs.push(Rational::one());
    match LinearProgram::new(rows, rhs, vec![Rational::zero(); width])?.feasible_point() {
        LpOutcome::Optimal(sol) => Ok(local_verdict(vertices, &sol.x[..v])),
        LpOutcome::Infeasible { farkas } => {
            // Columns of w give y₁·v + y₃ ≤ 0; those of t and r give
            // y₂ ≤ min(0, y₁), which turns yᵀb > 0 into
            // y₁·p − s‖y₁‖₁ > −y₃.
            let coeffs = farkas[..n].to_vec();
            let bound = -farkas[2 * n].clone();
            nonlocal_verdict(vertices, point, slack, &coeffs, &bound)
        }
        LpOutcome::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

fn local_verdict(vertices: &VertexSet, w: &[Rational]) -> LocalityVerdict {
    let weights = w
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (vertices.representative_strategy(j), x.clone()))
        .collect();
    LocalityVerdict::Local { weights }
}

/// A facet of the polytope (or a hull equation) that the point violates.
///
/// Off the affine hull, the broken equation oriented against the point is
/// returned. On the hull, the ray from the vertex barycenter `x₀` through the
/// point leaves the polytope through some facet; the dual of
/// `min Σλ  s.t.  Σ_v λ_v (v − x₀) = p − x₀, λ ≥ 0` is a vertex `y` of the
/// polar, i.e. the facet `y·(x − x₀) ≤ 1`.
fn separating_facet(vertices: &VertexSet, point: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
    let hull = AffineHull::of_vertices(vertices.vertices())?;
    if let Some((i, residual)) = hull.violated_equality(point) {
        let (c, e) = hull
            .raw_equalities()
            .nth(i)
            .expect("index from violated_equality");
        return Ok(if residual.is_positive() {
            (c.to_vec(), e.clone())
        } else {
            (c.iter().map(|x| -x).collect(), -e)
        });
    }
    // Gauge of the point about the barycenter x0 = S/V, written so the
    // matrix stays 0/1 apart from one integer column:
    //   min Σλ  s.t.  Σ λ_v v − ν S = p,  Σ λ_v − ν V = 1,  λ, ν ≥ 0.
    // The gauge exceeds one, so ν > 0 is basic at the optimum and the dual
    // (y, z) gives a facet y·x ≤ 1 − z tight on d independent vertices.
    let free = hull.free_coords();
    let d = free.len();
    let n = vertices.len();
    let mut rows = vec![vec![Rational::zero(); n + 1]; d + 1];
    for (col, vertex) in vertices.vertices().iter().enumerate() {
        for (k, &j) in free.iter().enumerate() {
            if vertex.coords()[j] == 1 {
                rows[k][col] = Rational::one();
                rows[k][n] -= Rational::one();
            }
        }
        rows[d][col] = Rational::one();
    }
    rows[d][n] = -Rational::from_integer(BigInt::from(n));
    let mut rhs: Vec<Rational> = free.iter().map(|&j| point[j].clone()).collect();
    rhs.push(Rational::one());
    let mut cost = vec![Rational::one(); n];
    cost.push(Rational::zero());
    let LpOutcome::Optimal(sol) = LinearProgram::new(rows, rhs, cost)?.solve() else {
        return Err(Error::Internal("gauge LP has no optimum".into()));
    };
    if sol.value <= Rational::one() {
        return Err(Error::Internal(format!(
            "gauge {} of an infeasible point is at most one",
            sol.value
        )));
    }
    let coeffs = hull.embed_inequality(&sol.duals[..d]);
    let bound = Rational::one() - &sol.duals[d];
    let rep = sparse_representative(&hull, &coeffs, &bound)?;
    Ok((rep.coeffs_rational(), rep.bound_rational()))
}

/// Canonicalizes, tightens the bound to the vertex maximum and re-checks
/// separation exactly before anything is reported.
fn nonlocal_verdict(
    vertices: &VertexSet,
    point: &[Rational],
    slack: &Rational,
    coeffs: &[Rational],
    bound: &Rational,
) -> Result<LocalityVerdict> {
    let raw = canonicalize(coeffs, bound)?;
    let local_max = vertices
        .vertices()
        .iter()
        .map(|v| raw.value_at_01(v.coords()))
        .max()
        .expect("nonempty vertex set");
    if local_max > *raw.bound() {
        return Err(Error::Internal(format!(
            "certificate is violated by a vertex ({local_max} > {})",
            raw.bound()
        )));
    }
    let certificate = LinearInequality::from_parts_unchecked(raw.coeffs().to_vec(), local_max);
    let table_value = certificate.value_at(point)?;
    let local_bound = certificate.bound_rational();
    let l1: Rational = certificate
        .coeffs()
        .iter()
        .map(|c| Rational::from_integer(c.abs()))
        .sum();
    if &table_value - slack * l1 <= local_bound {
        return Err(Error::Internal(
            "certificate does not separate the point from the local polytope".into(),
        ));
    }
    Ok(LocalityVerdict::Nonlocal {
        certificate,
        violation: &table_value - &local_bound,
        table_value,
        local_bound,
    })
}

/// Rebuilds `Σ_F w_F·δ_F` from scratch and compares it with the table.
pub fn verify_local_model(
    weights: &BTreeMap<u64, Rational>,
    table: &ProbabilityTable,
    slack: &Rational,
) -> Result<bool> {
    let selection = table.selection();
    let total = strategy_count(selection.class())?;
    if let Some(&bad) = weights.keys().find(|&&k| k >= total) {
        return Err(Error::UnknownStrategy(bad));
    }
    if weights.values().any(Signed::is_negative) {
        return Ok(false);
    }
    if weights.values().sum::<Rational>() != Rational::one() {
        return Ok(false);
    }
    let mut rebuilt = vec![Rational::zero(); selection.ambient_dimension()];
    for (&index, w) in weights {
        let strategy = strategy_from_index(selection.class(), index)?;
        for i in vertex_of(&strategy, selection)?.support() {
            rebuilt[i] += w;
        }
    }
    Ok(rebuilt
        .iter()
        .zip(table.entries())
        .all(|(r, p)| (r - p).abs() <= *slack))
}

/// The inequality with the smallest slack at the table point, and that
/// slack (negative when violated). Ties go to the smallest inequality in
/// canonical order.
pub fn max_violation(
    table: &ProbabilityTable,
    inequalities: &[LinearInequality],
) -> Result<(LinearInequality, Rational)> {
    let mut best: Option<(&LinearInequality, Rational)> = None;
    for ineq in inequalities {
        let s = evaluate(ineq, table.entries())?;
        let better = match &best {
            None => true,
            Some((b, bs)) => s < *bs || (s == *bs && ineq < *b),
        };
        if better {
            best = Some((ineq, s));
        }
    }
    best.map(|(i, s)| (i.clone(), s)).ok_or(Error::EmptyInequalities)
}
