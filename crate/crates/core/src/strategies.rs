//! Deterministic local transfer functions and their 0/1 vertex vectors.
//!
//! A strategy is a pair of maps `f_a: setting → output of A` and
//! `f_b: setting → output of B`. Strategies are labelled by a mixed-radix
//! integer whose digits, most significant first, are
//! `f_a(0), …, f_a(n−1), f_b(0), …, f_b(n−1)`.

use std::cmp::Reverse;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{ExperimentClass, ProbabilityTable, SettingsSelection};
use crate::Rational;

/// Default limit on the number of strategies [`enumerate_vertices`] visits.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    class: ExperimentClass,
    f_a: Vec<usize>,
    f_b: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(class: ExperimentClass, f_a: Vec<usize>, f_b: Vec<usize>) -> Result<Self> {
        let n = class.n_settings();
        if f_a.len() != n || f_b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if f_a.len() != n { f_a.len() } else { f_b.len() },
            });
        }
        if let Some(&a) = f_a.iter().find(|&&a| a >= class.outputs_a()) {
            return Err(Error::OutOfRange {
                what: "output a",
                value: a,
                limit: class.outputs_a(),
            });
        }
        if let Some(&b) = f_b.iter().find(|&&b| b >= class.outputs_b()) {
            return Err(Error::OutOfRange {
                what: "output b",
                value: b,
                limit: class.outputs_b(),
            });
        }
        Ok(Self { class, f_a, f_b })
    }

    pub fn class(&self) -> ExperimentClass {
        self.class
    }

    /// Output of A under setting `alpha`.
    pub fn output_a(&self, alpha: usize) -> usize {
        self.f_a[alpha]
    }

    /// Output of B under setting `beta`.
    pub fn output_b(&self, beta: usize) -> usize {
        self.f_b[beta]
    }

    pub fn f_a(&self) -> &[usize] {
        &self.f_a
    }

    pub fn f_b(&self) -> &[usize] {
        &self.f_b
    }
}

/// `N_a^n · N_b^n`, or an error when that does not fit in 64 bits.
pub fn strategy_count(class: ExperimentClass) -> Result<u64> {
    let n = class.n_settings() as u32;
    let overflow = || Error::EnumerationCap {
        required: format!("2^{}", (class.n_det_a() + class.n_det_b()) as u64 * n as u64),
        cap: u64::MAX,
    };
    let a = (class.outputs_a() as u64).checked_pow(n).ok_or_else(overflow)?;
    let b = (class.outputs_b() as u64).checked_pow(n).ok_or_else(overflow)?;
    a.checked_mul(b).ok_or_else(overflow)
}

pub fn strategy_from_index(class: ExperimentClass, index: u64) -> Result<DeterministicStrategy> {
    let count = strategy_count(class)?;
    if index >= count {
        return Err(Error::UnknownStrategy(index));
    }
    let n = class.n_settings();
    let (na, nb) = (class.outputs_a() as u64, class.outputs_b() as u64);
    let mut rest = index;
    let mut f_b = vec![0; n];
    for slot in f_b.iter_mut().rev() {
        *slot = (rest % nb) as usize;
        rest /= nb;
    }
    let mut f_a = vec![0; n];
    for slot in f_a.iter_mut().rev() {
        *slot = (rest % na) as usize;
        rest /= na;
    }
    Ok(DeterministicStrategy { class, f_a, f_b })
}

pub fn strategy_to_index(strategy: &DeterministicStrategy) -> u64 {
    let (na, nb) = (
        strategy.class.outputs_a() as u64,
        strategy.class.outputs_b() as u64,
    );
    let high = strategy.f_a.iter().fold(0u64, |acc, &a| acc * na + a as u64);
    strategy.f_b.iter().fold(high, |acc, &b| acc * nb + b as u64)
}

/// A 0/1 point of the local polytope: exactly one 1 in each setting-pair block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    coords: Vec<u8>,
}

impl Vertex {
    fn from_support(support: &[usize], block: usize) -> Self {
        let mut coords = vec![0u8; support.len() * block];
        for (k, &j) in support.iter().enumerate() {
            coords[k * block + j] = 1;
        }
        Self { coords }
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Positions of the ones.
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.coords
            .iter()
            .map(|&c| if c == 1 { Rational::one() } else { Rational::zero() })
            .collect()
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords)
    }
}

fn check_class(strategy: &DeterministicStrategy, selection: &SettingsSelection) -> Result<()> {
    if strategy.class != selection.class() {
        return Err(Error::ClassMismatch {
            expected: selection.class().to_string(),
            found: strategy.class.to_string(),
        });
    }
    Ok(())
}

/// Joint-output position of the strategy's 1 inside each pair's block.
fn block_support(strategy: &DeterministicStrategy, selection: &SettingsSelection) -> Vec<usize> {
    let nb = selection.class().outputs_b();
    selection
        .pairs()
        .iter()
        .map(|&(alpha, beta)| nb * strategy.f_a[alpha] + strategy.f_b[beta])
        .collect()
}

pub fn vertex_of(strategy: &DeterministicStrategy, selection: &SettingsSelection) -> Result<Vertex> {
    check_class(strategy, selection)?;
    Ok(Vertex::from_support(
        &block_support(strategy, selection),
        selection.block_size(),
    ))
}

/// The deterministic table `p(a,b|α,β) = δ(a, f_a(α))·δ(b, f_b(β))`.
pub fn strategy_distribution(
    strategy: &DeterministicStrategy,
    selection: &SettingsSelection,
) -> Result<ProbabilityTable> {
    let vertex = vertex_of(strategy, selection)?;
    ProbabilityTable::from_entries(selection.clone(), vertex.to_rational())
}

/// Distinct vertices of a selection's local polytope, ascending
/// lexicographically, each with the strategy indices that produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    selection: SettingsSelection,
    vertices: Vec<Vertex>,
    strategies: Vec<Vec<u64>>,
    strategy_total: u64,
}

impl VertexSet {
    pub fn selection(&self) -> &SettingsSelection {
        &self.selection
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Strategy indices attached to vertex `i`, ascending.
    pub fn strategies_of(&self, i: usize) -> &[u64] {
        &self.strategies[i]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn strategy_total(&self) -> u64 {
        self.strategy_total
    }

    pub fn ambient_dimension(&self) -> usize {
        self.selection.ambient_dimension()
    }

    /// Smallest strategy index mapping to vertex `i`.
    pub fn representative_strategy(&self, i: usize) -> u64 {
        self.strategies[i][0]
    }

    /// Index of the vertex a strategy maps to.
    pub fn vertex_of_strategy(&self, strategy: u64) -> Result<usize> {
        let s = strategy_from_index(self.selection.class(), strategy)?;
        let v = vertex_of(&s, &self.selection)?;
        self.vertices
            .binary_search(&v)
            .map_err(|_| Error::Internal(format!("strategy {strategy} has no vertex")))
    }
}

pub fn enumerate_vertices(selection: &SettingsSelection, cap: u64) -> Result<VertexSet> {
    let class = selection.class();
    let total = strategy_count(class)?;
    if total > cap {
        return Err(Error::EnumerationCap {
            required: total.to_string(),
            cap,
        });
    }
    let n = usize::try_from(total).map_err(|_| Error::EnumerationCap {
        required: total.to_string(),
        cap,
    })?;

    // Ascending 0/1 vectors with one-hot blocks correspond to descending
    // support positions, so sort on the reversed compact key.
    let mut keyed: Vec<(Reverse<Vec<u32>>, u64)> = exec::flat_map_chunks(n, 4096, |range| {
        range
            .map(|i| {
                let s = strategy_from_index(class, i as u64).expect("index below count");
                let key = block_support(&s, selection).into_iter().map(|j| j as u32).collect();
                (Reverse(key), i as u64)
            })
            .collect()
    });
    exec::sort_unstable(&mut keyed);

    let block = selection.block_size();
    let mut vertices = Vec::new();
    let mut strategies: Vec<Vec<u64>> = Vec::new();
    let mut last: Option<&Vec<u32>> = None;
    for (Reverse(key), index) in &keyed {
        if last != Some(key) {
            let support: Vec<usize> = key.iter().map(|&j| j as usize).collect();
            vertices.push(Vertex::from_support(&support, block));
            strategies.push(Vec::new());
            last = Some(key);
        }
        strategies.last_mut().expect("pushed above").push(*index);
    }
    Ok(VertexSet {
        selection: selection.clone(),
        vertices,
        strategies,
        strategy_total: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_table;
    use std::collections::HashSet;

    fn class(a: u32, b: u32, i: u32) -> ExperimentClass {
        ExperimentClass::new(a, b, i).unwrap()
    }

    fn three_pair_selection() -> SettingsSelection {
        SettingsSelection::new(class(2, 2, 2), vec![(0, 0), (0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(strategy_count(class(2, 2, 2)).unwrap(), 256);
        assert_eq!(strategy_count(class(1, 1, 1)).unwrap(), 4);
        assert_eq!(strategy_count(class(1, 1, 2)).unwrap(), 16);
        assert!(strategy_count(class(16, 16, 64)).is_err());
    }

    #[test]
    fn index_examples() {
        let s = strategy_from_index(class(1, 1, 1), 0).unwrap();
        assert_eq!((s.output_a(0), s.output_b(0)), (0, 0));
        let s = strategy_from_index(class(1, 1, 1), 3).unwrap();
        assert_eq!((s.output_a(0), s.output_b(0)), (1, 1));
        let s = strategy_from_index(class(1, 1, 1), 2).unwrap();
        assert_eq!((s.output_a(0), s.output_b(0)), (1, 0), "f_a is the high digit");
        assert!(matches!(
            strategy_from_index(class(1, 1, 1), 4),
            Err(Error::UnknownStrategy(4))
        ));
    }

    #[test]
    fn index_round_trip_exhaustive() {
        let c = class(2, 2, 2);
        let mut seen = HashSet::new();
        for i in 0..256 {
            let s = strategy_from_index(c, i).unwrap();
            assert_eq!(strategy_to_index(&s), i);
            assert!(seen.insert((s.f_a().to_vec(), s.f_b().to_vec())));
        }
    }

    #[test]
    fn vertex_examples() {
        let sel = three_pair_selection();
        let zero = strategy_from_index(sel.class(), 0).unwrap();
        let v = vertex_of(&zero, &sel).unwrap();
        assert_eq!(v.support(), vec![0, 16, 32]);

        let c = class(1, 1, 1);
        let sel1 = SettingsSelection::new(c, vec![(0, 0)]).unwrap();
        let s = DeterministicStrategy::new(c, vec![1], vec![0]).unwrap();
        assert_eq!(vertex_of(&s, &sel1).unwrap().coords(), &[0, 0, 1, 0]);

        let other = strategy_from_index(c, 0).unwrap();
        assert!(matches!(vertex_of(&other, &sel), Err(Error::ClassMismatch { .. })));
    }

    #[test]
    fn block_sums_equal_pair_count() {
        let sel = three_pair_selection();
        for i in 0..256 {
            let v = vertex_of(&strategy_from_index(sel.class(), i).unwrap(), &sel).unwrap();
            let ones: usize = v.coords().iter().map(|&c| c as usize).sum();
            assert_eq!(ones, sel.len());
            for block in v.coords().chunks(sel.block_size()) {
                assert_eq!(block.iter().filter(|&&c| c == 1).count(), 1);
            }
        }
    }

    #[test]
    fn three_pair_selection_has_256_vertices() {
        let set = enumerate_vertices(&three_pair_selection(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(set.len(), 256);
        assert_eq!(set.ambient_dimension(), 48);
        assert!(set.vertices().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_pair_merges_strategies() {
        // Brute force: map every strategy to its vertex and count the classes.
        let sel = SettingsSelection::new(class(2, 2, 2), vec![(0, 0)]).unwrap();
        let mut classes: std::collections::BTreeMap<Vec<u8>, Vec<u64>> = Default::default();
        for i in 0..256 {
            let v = vertex_of(&strategy_from_index(sel.class(), i).unwrap(), &sel).unwrap();
            classes.entry(v.coords().to_vec()).or_default().push(i);
        }
        assert_eq!(classes.len(), 16);

        let set = enumerate_vertices(&sel, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(set.len(), 16);
        for (i, (coords, members)) in classes.iter().enumerate() {
            assert_eq!(set.vertices()[i].coords(), coords.as_slice());
            assert_eq!(set.strategies_of(i), members.as_slice());
            assert_eq!(members.len(), 16);
        }
    }

    #[test]
    fn simplex_vertices() {
        let sel = SettingsSelection::new(class(1, 1, 1), vec![(0, 0)]).unwrap();
        let set = enumerate_vertices(&sel, DEFAULT_ENUMERATION_CAP).unwrap();
        let coords: Vec<&[u8]> = set.vertices().iter().map(|v| v.coords()).collect();
        assert_eq!(
            coords,
            vec![&[0, 0, 0, 1][..], &[0, 0, 1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]
        );
        // vertex [0,0,0,1] is a = 1, b = 1: strategy 3
        assert_eq!(set.strategies_of(0), &[3]);
        assert_eq!(set.vertex_of_strategy(0).unwrap(), 3);
    }

    #[test]
    fn cap_is_enforced() {
        let sel = SettingsSelection::new(class(2, 2, 10), vec![(0, 0)]).unwrap();
        assert!(matches!(
            enumerate_vertices(&sel, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationCap { .. })
        ));
        let small = three_pair_selection();
        assert!(enumerate_vertices(&small, 255).is_err());
        assert!(enumerate_vertices(&small, 256).is_ok());
    }

    #[test]
    fn distribution_examples() {
        let sel = three_pair_selection();
        let zero = strategy_from_index(sel.class(), 0).unwrap();
        let t = strategy_distribution(&zero, &sel).unwrap();
        for k in 0..sel.len() {
            assert_eq!(*t.get(k, 0, 0).unwrap(), Rational::one());
        }
        assert!(validate_table(&t).is_valid());

        for i in [0u64, 17, 200, 255] {
            let s = strategy_from_index(sel.class(), i).unwrap();
            let t = strategy_distribution(&s, &sel).unwrap();
            assert_eq!(t.entries(), vertex_of(&s, &sel).unwrap().to_rational().as_slice());
        }

        let c = class(1, 1, 1);
        let sel1 = SettingsSelection::new(c, vec![(0, 0)]).unwrap();
        let mut sum = vec![Rational::zero(); 4];
        for i in 0..4 {
            let t = strategy_distribution(&strategy_from_index(c, i).unwrap(), &sel1).unwrap();
            for (acc, p) in sum.iter_mut().zip(t.entries()) {
                *acc += p;
            }
        }
        let avg: Vec<Rational> = sum.into_iter().map(|x| x / Rational::from_integer(4.into())).collect();
        assert_eq!(avg, ProbabilityTable::uniform(sel1).into_entries());
    }

    #[test]
    fn no_signalling_holds_on_every_vertex() {
        let c = class(2, 1, 2);
        let sel = SettingsSelection::all_pairs(c);
        let set = enumerate_vertices(&sel, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(set.len() as u64, strategy_count(c).unwrap());
        for v in set.vertices() {
            let marginal_a = |k: usize, a: usize| -> u8 {
                (0..c.outputs_b()).map(|b| v.coords()[sel.coordinate(k, a, b).unwrap()]).sum()
            };
            let marginal_b = |k: usize, b: usize| -> u8 {
                (0..c.outputs_a()).map(|a| v.coords()[sel.coordinate(k, a, b).unwrap()]).sum()
            };
            for (k, &(alpha, beta)) in sel.pairs().iter().enumerate() {
                for (l, &(alpha2, beta2)) in sel.pairs().iter().enumerate() {
                    if alpha == alpha2 {
                        for a in 0..c.outputs_a() {
                            assert_eq!(marginal_a(k, a), marginal_a(l, a));
                        }
                    }
                    if beta == beta2 {
                        for b in 0..c.outputs_b() {
                            assert_eq!(marginal_b(k, b), marginal_b(l, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fewer_vertices_when_a_setting_is_unused() {
        let sel = SettingsSelection::new(class(1, 1, 2), vec![(0, 0), (0, 1)]).unwrap();
        let set = enumerate_vertices(&sel, DEFAULT_ENUMERATION_CAP).unwrap();
        // f_a(1) is never observed: 16 strategies collapse onto 8 vertices.
        assert_eq!(set.len(), 8);
        let covered: usize = (0..set.len()).map(|i| set.strategies_of(i).len()).sum();
        assert_eq!(covered, 16);
    }
}
