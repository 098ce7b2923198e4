//! Double-description method for the extreme rays of a pointed cone
//! `{h : h·w ≤ 0 for every constraint w}`.
//!
//! With constraints `w = (v, 1)` for the points `v` of a full-dimensional
//! polytope the extreme rays `h = (c, −b)` are exactly its facets `c·x ≤ b`;
//! with constraints `(a, −b)` and `(0, −1)` for an inequality system the rays
//! `(x, t)` with `t > 0` are its vertices `x/t`. Constraints are inserted one
//! at a time starting from a simplicial cone; adjacency of rays is decided by
//! the combinatorial test on their sets of tight constraints. Arithmetic is
//! exact: an `i64` pass with checked operations is tried first and the whole
//! run restarts on `BigInt` if any intermediate value would overflow.

use std::fmt::Debug;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::linalg::{primitive_integer, rref};
use crate::error::{Error, Result};
use crate::exec;
use crate::Rational;

/// Default bound on the working description, in bytes.
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

pub(crate) trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn mul(&self, other: &Self) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn zero() -> Self;
    fn signum(&self) -> i8;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, other: &Self) -> Self;
    fn is_one(&self) -> bool;
    fn byte_size(&self) -> usize;
}

impl Scalar for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64().filter(|x| *x != i64::MIN)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other).filter(|x| *x != i64::MIN)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other).filter(|x| *x != i64::MIN)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn zero() -> Self {
        0
    }
    fn signum(&self) -> i8 {
        i64::signum(*self) as i8
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn byte_size(&self) -> usize {
        8
    }
}

impl Scalar for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn signum(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn byte_size(&self) -> usize {
        24 + (self.bits() as usize).div_ceil(64) * 8
    }
}

/// Extreme rays of the cone, one per row.
#[derive(Clone, Debug)]
pub(crate) struct ConeRays {
    pub rays: Vec<Vec<BigInt>>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DdOptions {
    pub memory_cap: u64,
}

impl Default for DdOptions {
    fn default() -> Self {
        Self {
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

#[derive(Debug)]
pub(crate) enum DdError {
    /// The constraint vectors do not span the space: the cone has a lineality space.
    NotPointed { rank: usize },
    Failed(Error),
}

impl From<Error> for DdError {
    fn from(e: Error) -> Self {
        DdError::Failed(e)
    }
}

struct Overflow;

struct Ray<T> {
    coeffs: Vec<T>,
    tight: FixedBitSet,
}

pub(crate) fn extreme_rays(constraints: &[Vec<BigInt>], options: DdOptions) -> Result<ConeRays, DdError> {
    let small: Option<Vec<Vec<i64>>> = constraints
        .iter()
        .map(|w| w.iter().map(<i64 as Scalar>::from_big).collect())
        .collect();
    if let Some(small) = small {
        if let Ok(out) = run::<i64>(&small, options) {
            return out;
        }
    }
    let big: Vec<Vec<BigInt>> = constraints.to_vec();
    match run::<BigInt>(&big, options) {
        Ok(out) => out,
        Err(Overflow) => unreachable!("BigInt arithmetic does not overflow"),
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.signum() == 0 || y.signum() == 0 {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Some(acc)
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        if x.signum() != 0 {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.signum() == 0 || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = x.div_exact(&g);
    }
}

/// Basis rows and their rays, or the dimension of a cone that is not pointed.
type InitialRays<T> = std::result::Result<(Vec<usize>, Vec<Ray<T>>), usize>;

fn initial_rays<T: Scalar>(constraints: &[Vec<T>]) -> Result<InitialRays<T>, Overflow> {
    let dim = constraints.first().map_or(0, Vec::len);
    // Greedy independent subset in input order.
    let mut basis_rows: Vec<Vec<Rational>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, w) in constraints.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut candidate = basis_rows.clone();
        candidate.push(w.iter().map(|x| Rational::from_integer(x.to_big())).collect());
        if rref(candidate.clone(), dim).pivots.len() > basis_rows.len() {
            basis_rows = candidate;
            chosen.push(i);
        }
    }
    if chosen.len() < dim {
        return Ok(Err(chosen.len()));
    }
    // Rays of the simplicial cone are the negated columns of W⁻¹.
    let mut aug: Vec<Vec<Rational>> = basis_rows
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    aug = rref(aug, 2 * dim).rows;
    let m = constraints.len();
    let mut rays = Vec::with_capacity(dim);
    for j in 0..dim {
        let column: Vec<Rational> = (0..dim).map(|i| -aug[i][dim + j].clone()).collect();
        let coeffs: Option<Vec<T>> = primitive_integer(&column).iter().map(T::from_big).collect();
        let coeffs = coeffs.ok_or(Overflow)?;
        let mut tight = FixedBitSet::with_capacity(m);
        for (k, &c) in chosen.iter().enumerate() {
            if k != j {
                tight.insert(c);
            }
        }
        rays.push(Ray { coeffs, tight });
    }
    Ok(Ok((chosen, rays)))
}

fn estimate_bytes<T: Scalar>(rays: &[Ray<T>]) -> u64 {
    rays.iter()
        .map(|r| {
            let coeffs: usize = r.coeffs.iter().map(Scalar::byte_size).sum();
            (coeffs + r.tight.len().div_ceil(8) + 64) as u64
        })
        .sum()
}

fn run<T: Scalar>(
    constraints: &[Vec<T>],
    options: DdOptions,
) -> std::result::Result<Result<ConeRays, DdError>, Overflow> {
    let dim = constraints.first().map_or(0, Vec::len);
    let m = constraints.len();
    let (chosen, mut rays) = match initial_rays(constraints)? {
        Ok(start) => start,
        Err(rank) => return Ok(Err(DdError::NotPointed { rank })),
    };
    let mut done = FixedBitSet::with_capacity(m);
    for &c in &chosen {
        done.insert(c);
    }
    let order: Vec<usize> = (0..m).filter(|i| !done.contains(*i)).collect();
    let min_common = dim.saturating_sub(2);

    for (step, &c) in order.iter().enumerate() {
        let w = &constraints[c];
        let signs: Vec<Option<(i8, T)>> = exec::map_slice(&rays, |r| {
            let s = dot(&r.coeffs, w)?;
            Some((s.signum(), s))
        });
        let signs: Vec<(i8, T)> = signs.into_iter().collect::<Option<_>>().ok_or(Overflow)?;
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].0 > 0).collect();
        if plus.is_empty() {
            for (r, (s, _)) in rays.iter_mut().zip(&signs) {
                if *s == 0 {
                    r.tight.insert(c);
                }
            }
            done.insert(c);
            continue;
        }
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].0 < 0).collect();

        let produced: Vec<Option<Vec<Ray<T>>>> = exec::map_slice(&plus, |&p| {
            let mut out = Vec::new();
            for &n in &minus {
                let mut common = rays[p].tight.clone();
                common.intersect_with(&rays[n].tight);
                if common.count_ones(..) < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(r, ray)| r == p || r == n || !common.is_subset(&ray.tight));
                if !adjacent {
                    continue;
                }
                // (h_p·w)·h_n − (h_n·w)·h_p vanishes on w.
                let sp = &signs[p].1;
                let sn_neg = signs[n].1.neg()?;
                let mut coeffs = Vec::with_capacity(dim);
                for (a, b) in rays[n].coeffs.iter().zip(&rays[p].coeffs) {
                    coeffs.push(sp.mul(a)?.add(&sn_neg.mul(b)?)?);
                }
                normalize(&mut coeffs);
                common.insert(c);
                out.push(Ray {
                    coeffs,
                    tight: common,
                });
            }
            Some(out)
        });
        let mut fresh = Vec::new();
        for batch in produced {
            fresh.extend(batch.ok_or(Overflow)?);
        }

        let mut next = Vec::with_capacity(rays.len() - plus.len() + fresh.len());
        for (mut r, (s, _)) in rays.into_iter().zip(signs) {
            match s {
                0 => {
                    r.tight.insert(c);
                    next.push(r);
                }
                s if s < 0 => next.push(r),
                _ => {}
            }
        }
        next.extend(fresh);
        rays = next;
        done.insert(c);

        let bytes = estimate_bytes(&rays);
        if bytes > options.memory_cap {
            return Ok(Err(DdError::Failed(Error::MemoryCap {
                rays: rays.len(),
                bytes,
                inserted: chosen.len() + step + 1,
                total: m,
                cap: options.memory_cap,
            })));
        }
    }

    Ok(Ok(ConeRays {
        rays: rays
            .iter()
            .map(|r| r.coeffs.iter().map(Scalar::to_big).collect())
            .collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn facets_of(points: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        let constraints: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                let mut w = big(p);
                w.push(BigInt::one());
                w
            })
            .collect();
        let mut rays = extreme_rays(&constraints, DdOptions::default()).unwrap().rays;
        rays.sort();
        rays
    }

    #[test]
    fn square() {
        let rays = facets_of(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        // (c, −b): −x ≤ 0, −y ≤ 0, x ≤ 1, y ≤ 1
        assert_eq!(
            rays,
            vec![big(&[-1, 0, 0]), big(&[0, -1, 0]), big(&[0, 1, -1]), big(&[1, 0, -1])]
        );
    }

    #[test]
    fn cube_with_interior_and_repeated_points() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![2 * (i & 1), 2 * ((i >> 1) & 1), 2 * ((i >> 2) & 1)]);
        }
        pts.push(vec![1, 1, 1]);
        pts.push(vec![2, 2, 2]);
        pts.push(vec![1, 1, 2]);
        assert_eq!(facets_of(&pts).len(), 6);
    }

    #[test]
    fn cross_polytope_has_eight_facets() {
        let pts = vec![
            vec![1, 0, 0],
            vec![-1, 0, 0],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![0, 0, 1],
            vec![0, 0, -1],
        ];
        let rays = facets_of(&pts);
        assert_eq!(rays.len(), 8);
        assert!(rays.iter().all(|r| r[..3].iter().all(|c| c.abs() == BigInt::one())));
    }

    #[test]
    fn lineality_is_reported() {
        let constraints = vec![big(&[1, 0, 0]), big(&[0, 1, 0])];
        assert!(matches!(
            extreme_rays(&constraints, DdOptions::default()),
            Err(DdError::NotPointed { rank: 2 })
        ));
    }

    #[test]
    fn bigint_fallback_matches() {
        let pts: Vec<Vec<i64>> = vec![vec![0, 0], vec![1 << 40, 0], vec![0, 1 << 40], vec![1 << 40, 1 << 40]];
        let rays = facets_of(&pts);
        assert_eq!(rays.len(), 4);
        assert!(rays.contains(&big(&[1, 0, -(1 << 40)])));
    }

    #[test]
    fn memory_cap() {
        let pts = [vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let constraints: Vec<Vec<BigInt>> = pts
            .iter()
            .map(|p| {
                let mut w = big(p);
                w.push(BigInt::one());
                w
            })
            .collect();
        let err = extreme_rays(&constraints, DdOptions { memory_cap: 10 }).unwrap_err();
        assert!(matches!(err, DdError::Failed(Error::MemoryCap { .. })));
    }
}
