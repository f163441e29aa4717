//! Thread-count control and deterministic reductions.

use rayon::prelude::*;

use crate::{Error, Result};

/// Fixed chunk length for reductions, independent of the worker count so
/// floating-point sums come out bit-identical.
pub const REDUCTION_CHUNK: usize = 1 << 14;

/// Runs `f` on a dedicated pool of `threads` workers (`0` = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// `Σ f(item)` with a fixed chunking and in-order combination of partials.
pub fn deterministic_sum<T, A>(items: &[T], zero: A, f: impl Fn(&T) -> A + Sync) -> A
where
    T: Sync,
    A: Copy + Send + Sync + std::ops::Add<Output = A>,
{
    let partials: Vec<A> = items
        .par_chunks(REDUCTION_CHUNK)
        .map(|chunk| chunk.iter().fold(zero, |acc, x| acc + f(x)))
        .collect();
    partials.into_iter().fold(zero, |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_thread_independent() {
        let xs: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.37).sin() / (1.0 + i as f64)).collect();
        let one = with_threads(1, || deterministic_sum(&xs, 0.0, |x| *x)).unwrap();
        let four = with_threads(4, || deterministic_sum(&xs, 0.0, |x| *x)).unwrap();
        assert_eq!(one.to_bits(), four.to_bits());
    }
}
