//! Fixtures and independent oracles shared by the integration tests. The
//! oracles use their own elimination code so they do not inherit bugs from
//! the crate's geometry module.
#![allow(dead_code)]

use std::collections::BTreeSet;

use belltest::model::{ExperimentClass, ProbabilityTable, SettingsSelection};
use belltest::strategies::{strategy_from_index, vertex_of};
use belltest::Rational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Pell convergent `p/q` of √2 with `q ≥ min_den`.
pub fn sqrt2(min_den: u64) -> Rational {
    let (mut p, mut q) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(1));
    while q < min_den.into() {
        let next_p = &p + 2 * &q;
        let next_q = &p + &q;
        p = next_p;
        q = next_q;
    }
    Rational::new(p, q)
}

pub fn sqrt2_fixture() -> Rational {
    sqrt2(1_000_000_000_000)
}

/// Probability of equal outcomes for the singlet at CHSH settings:
/// cos²(π/8) = (2+√2)/4 on three pairs, cos²(3π/8) = (2−√2)/4 on (1,1).
pub fn same_outcome(pair: (usize, usize), s: &Rational) -> Rational {
    let two = r(2, 1);
    if pair == (1, 1) {
        (two - s) / r(4, 1)
    } else {
        (two + s) / r(4, 1)
    }
}

/// Class (1,1,2), all pairs: outcome 1 is "fired", 0 is "did not fire".
pub fn singlet_112(s: &Rational) -> ProbabilityTable {
    let sel = SettingsSelection::all_pairs(ExperimentClass::new(1, 1, 2).unwrap());
    let mut entries = vec![Rational::zero(); sel.ambient_dimension()];
    for (k, &pair) in sel.pairs().iter().enumerate() {
        let same = same_outcome(pair, s) / r(2, 1);
        let diff = r(1, 2) - &same;
        for a in 0..2 {
            for b in 0..2 {
                entries[sel.coordinate(k, a, b).unwrap()] = if a == b { same.clone() } else { diff.clone() };
            }
        }
    }
    ProbabilityTable::from_entries(sel, entries).unwrap()
}

/// Class (2,2,2), all pairs. Each party's particle reaches one of its two
/// detectors (channel +: detector 0, output 1; channel −: detector 1,
/// output 2) with efficiency η, otherwise nothing fires (output 0). Both
/// detectors firing (output 3) never happens.
pub fn efficiency_222(eta: &Rational, s: &Rational) -> ProbabilityTable {
    let sel = SettingsSelection::all_pairs(ExperimentClass::new(2, 2, 2).unwrap());
    let mut entries = vec![Rational::zero(); sel.ambient_dimension()];
    let miss = Rational::one() - eta;
    for (k, &pair) in sel.pairs().iter().enumerate() {
        let same = same_outcome(pair, s) / r(2, 1);
        let diff = r(1, 2) - &same;
        let mut set = |a: usize, b: usize, p: Rational| {
            entries[sel.coordinate(k, a, b).unwrap()] = p;
        };
        for a in [1, 2] {
            for b in [1, 2] {
                let q = if a == b { &same } else { &diff };
                set(a, b, eta * eta * q);
            }
            set(a, 0, eta * &miss / r(2, 1));
            set(0, a, eta * &miss / r(2, 1));
        }
        set(0, 0, &miss * &miss);
    }
    ProbabilityTable::from_entries(sel, entries).unwrap()
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("finite")
}

/// Reduced row echelon form; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = Rational::one() / &rows[row][col];
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let delta = &f * &rows[row][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    rows.truncate(row);
    pivots
}

pub fn rank(mut rows: Vec<Vec<Rational>>, ncols: usize) -> usize {
    rref(&mut rows, ncols).len()
}

pub fn kernel(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let pivots = rref(&mut rows, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

fn homogeneous(v: &[u8]) -> Vec<Rational> {
    let mut row: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
    row.push(Rational::one());
    row
}

/// Facets by brute force over hyperplanes: every `dim`-subset of affinely
/// independent vertices spans a hyperplane of the hull; keep it when all
/// vertices lie on one side. Returns the tight sets (vertex indices).
pub fn hyperplane_oracle(vertices: &[Vec<u8>]) -> BTreeSet<Vec<usize>> {
    let n = vertices[0].len();
    let all: Vec<Vec<Rational>> = vertices.iter().map(|v| homogeneous(v)).collect();
    let dim = rank(all.clone(), n + 1) - 1;
    let mut found = BTreeSet::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| all[i].clone()).collect();
        if rank(rows.clone(), n + 1) == dim {
            // The kernel is the hull equations plus one facet functional;
            // any member that is not constant on the vertices will do.
            for k in kernel(rows, n + 1) {
                let values: Vec<Rational> = all
                    .iter()
                    .map(|v| v.iter().zip(&k).map(|(a, b)| a * b).sum())
                    .collect();
                if values.iter().all(Zero::is_zero) {
                    continue;
                }
                let one_side = values.iter().all(|x| !x.is_negative()) || values.iter().all(|x| !x.is_positive());
                if one_side {
                    found.insert((0..all.len()).filter(|&i| values[i].is_zero()).collect());
                }
                break;
            }
        }
        let Some(i) = (0..dim).rev().find(|&i| subset[i] != i + all.len() - dim) else {
            return found;
        };
        subset[i] += 1;
        for j in i + 1..dim {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Random mixture of `1..=max_terms` deterministic strategies with small
/// integer weights.
pub fn random_mixture<R: Rng>(
    rng: &mut R,
    selection: &SettingsSelection,
    strategy_count: u64,
    max_terms: usize,
) -> ProbabilityTable {
    let terms = rng.random_range(1..=max_terms);
    let picks: Vec<(u64, i64)> = (0..terms)
        .map(|_| (rng.random_range(0..strategy_count), rng.random_range(1..=20)))
        .collect();
    let total: i64 = picks.iter().map(|(_, w)| w).sum();
    let mut entries = vec![Rational::zero(); selection.ambient_dimension()];
    for (index, w) in picks {
        let s = strategy_from_index(selection.class(), index).unwrap();
        for i in vertex_of(&s, selection).unwrap().support() {
            entries[i] += r(w, total);
        }
    }
    ProbabilityTable::from_entries(selection.clone(), entries).unwrap()
}

/// Orthogonal projection of `c` onto the direction space of the affine hull
/// of the vertices (the null space of the hull's homogeneous equations).
pub struct HullDirections {
    /// Orthonormal-free basis of the equation normals, in RREF.
    normals: Vec<Vec<Rational>>,
}

impl HullDirections {
    pub fn new(vertices: &[Vec<u8>]) -> Self {
        let n = vertices[0].len();
        let rows: Vec<Vec<Rational>> = vertices.iter().map(|v| homogeneous(v)).collect();
        // (c, −β) with c·v = β on all vertices.
        let mut normals: Vec<Vec<Rational>> = kernel(rows, n + 1)
            .into_iter()
            .map(|mut k| {
                k.pop();
                k
            })
            .collect();
        rref(&mut normals, n);
        Self { normals }
    }

    pub fn project(&self, c: &[Rational]) -> Vec<Rational> {
        // Solve (E Eᵀ) y = E c and return c − Eᵀ y.
        let m = self.normals.len();
        let dot = |a: &[Rational], b: &[Rational]| -> Rational { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut system: Vec<Vec<Rational>> = (0..m)
            .map(|i| {
                let mut row: Vec<Rational> = (0..m).map(|j| dot(&self.normals[i], &self.normals[j])).collect();
                row.push(dot(&self.normals[i], c));
                row
            })
            .collect();
        rref(&mut system, m + 1);
        let mut out = c.to_vec();
        for (i, row) in system.iter().enumerate() {
            let y = &row[m];
            for (o, e) in out.iter_mut().zip(&self.normals[i]) {
                *o -= y * e;
            }
        }
        out
    }
}
