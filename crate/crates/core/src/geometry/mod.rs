//! Exact polytope engine: affine hulls, vertex-to-facet conversion,
//! canonical inequality forms and independent verification.

mod affine;
mod dd;
mod inequality;
pub(crate) mod linalg;
mod representative;
mod verify;

use num_bigint::BigInt;
use num_traits::One;

pub use affine::{affine_hull, AffineHull};
pub use dd::DEFAULT_MEMORY_CAP;
pub use inequality::{canonicalize, canonicalize_equality, evaluate, LinearInequality};
pub use representative::sparse_representative;
pub use verify::{
    basic_feasible_points, verify_h_representation, ClauseReport, VerificationReport,
};

use crate::error::{Error, Result};
use crate::exec;
use crate::strategies::Vertex;
use crate::Rational;
use dd::{extreme_rays, DdError, DdOptions};

/// Equations of the affine hull plus the irredundant facet inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRepresentation {
    pub ambient: usize,
    pub dimension: usize,
    pub equalities: Vec<LinearInequality>,
    pub facets: Vec<LinearInequality>,
}

#[derive(Clone, Copy, Debug)]
pub struct FacetOptions {
    /// Upper bound on the intermediate description, in bytes.
    pub memory_cap: u64,
}

impl Default for FacetOptions {
    fn default() -> Self {
        Self {
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

pub fn facet_enumeration(vertices: &[Vertex]) -> Result<HRepresentation> {
    facet_enumeration_with(vertices, FacetOptions::default())
}

pub fn facet_enumeration_with(vertices: &[Vertex], options: FacetOptions) -> Result<HRepresentation> {
    let hull = AffineHull::of_vertices(vertices)?;
    let equalities = hull.equalities();
    let dimension = hull.dimension();
    if dimension == 0 {
        return Ok(HRepresentation {
            ambient: hull.ambient(),
            dimension,
            equalities,
            facets: Vec::new(),
        });
    }

    let constraints: Vec<Vec<BigInt>> = vertices
        .iter()
        .map(|v| {
            let mut w: Vec<BigInt> = hull
                .free_coords()
                .iter()
                .map(|&j| BigInt::from(v.coords()[j]))
                .collect();
            w.push(BigInt::one());
            w
        })
        .collect();
    let cone = extreme_rays(
        &constraints,
        DdOptions {
            memory_cap: options.memory_cap,
        },
    )
    .map_err(|e| match e {
        DdError::Failed(e) => e,
        DdError::NotPointed { rank } => Error::Internal(format!(
            "projected vertices have rank {rank}, expected {}",
            dimension + 1
        )),
    })?;

    let mut facets = exec::map_slice(&cone.rays, |ray| {
        let (free, minus_bound) = ray.split_at(dimension);
        let free: Vec<Rational> = free.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let coeffs = hull.embed_inequality(&free);
        let bound = -Rational::from_integer(minus_bound[0].clone());
        sparse_representative(&hull, &coeffs, &bound)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    facets.sort();
    facets.dedup();

    Ok(HRepresentation {
        ambient: hull.ambient(),
        dimension,
        equalities,
        facets,
    })
}

/// Indices of the vertices on which an inequality is tight.
pub fn tight_vertices(ineq: &LinearInequality, vertices: &[Vertex]) -> Vec<usize> {
    vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| ineq.value_at_01(v.coords()) == *ineq.bound())
        .map(|(i, _)| i)
        .collect()
}

/// Coordinate `i` when the inequality cuts out exactly the vertices with
/// `v_i = 0`, i.e. it is the facet `p_i ≥ 0` written in some form.
pub fn positivity_coordinate(ineq: &LinearInequality, vertices: &[Vertex]) -> Option<usize> {
    let tight = tight_vertices(ineq, vertices);
    let ambient = vertices.first()?.len();
    (0..ambient).find(|&i| {
        let zeros: Vec<usize> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.coords()[i] == 0)
            .map(|(k, _)| k)
            .collect();
        zeros == tight
    })
}
