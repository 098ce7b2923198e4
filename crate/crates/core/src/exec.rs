//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they are plain sequential loops. Output order always
//! matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    F: Fn(&S) -> T,
{
    items.iter().map(f).collect()
}

/// Chunked map over `0..n` whose per-chunk outputs are concatenated.
#[cfg(feature = "parallel")]
pub(crate) fn flat_map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> Vec<T> + Sync + Send,
{
    let chunks = n.div_ceil(chunk.max(1));
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(n)))
        .flatten_iter()
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn flat_map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    F: Fn(std::ops::Range<usize>) -> Vec<T>,
{
    let chunks = n.div_ceil(chunk.max(1));
    (0..chunks)
        .flat_map(|c| f(c * chunk..((c + 1) * chunk).min(n)))
        .collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn sort_unstable<T: Ord + Send>(items: &mut [T]) {
    items.par_sort_unstable();
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sort_unstable<T: Ord>(items: &mut [T]) {
    items.sort_unstable();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
        assert_eq!(map_slice(&[3, 1, 2], |x| x + 1), vec![4, 2, 3]);
        assert_eq!(flat_map_chunks(7, 3, |r| r.collect()), (0..7).collect::<Vec<_>>());
        assert!(flat_map_chunks(0, 3, |r| r.collect::<Vec<_>>()).is_empty());
    }
}
