//! Order-fixed floating point reductions.
//!
//! Sums are split into fixed-size chunks, each chunk is reduced with
//! Neumaier compensation, and the chunk partials are combined pairwise.
//! Chunk boundaries depend only on the input length, so the result is
//! bit-identical no matter how rayon schedules the chunks.

use num_complex::Complex64;
use rayon::prelude::*;

/// Elements per leaf of the reduction tree.
pub const CHUNK: usize = 4096;

#[inline]
fn neumaier_add(sum: &mut f64, c: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *c += (*sum - t) + v;
    } else {
        *c += (v - t) + *sum;
    }
    *sum = t;
}

/// Neumaier-compensated sequential sum.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        neumaier_add(&mut sum, &mut c, v);
    }
    sum + c
}

fn pairwise(partials: &[f64]) -> f64 {
    match partials.len() {
        0 => 0.0,
        1 => partials[0],
        n => {
            let mid = n / 2;
            pairwise(&partials[..mid]) + pairwise(&partials[mid..])
        }
    }
}

/// Deterministic parallel sum of a slice.
pub fn sum(values: &[f64]) -> f64 {
    let partials: Vec<f64> = values.par_chunks(CHUNK).map(compensated_sum).collect();
    pairwise(&partials)
}

/// Deterministic parallel sum of `f(i)` for `i in 0..n`.
pub fn sum_map<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let (mut s, mut c) = (0.0, 0.0);
            for i in k * CHUNK..((k + 1) * CHUNK).min(n) {
                neumaier_add(&mut s, &mut c, f(i));
            }
            s + c
        })
        .collect();
    pairwise(&partials)
}

/// Deterministic parallel complex sum of `f(i)` for `i in 0..n`.
pub fn sum_map_complex<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let (mut re, mut cre, mut im, mut cim) = (0.0, 0.0, 0.0, 0.0);
            for i in k * CHUNK..((k + 1) * CHUNK).min(n) {
                let z = f(i);
                neumaier_add(&mut re, &mut cre, z.re);
                neumaier_add(&mut im, &mut cim, z.im);
            }
            (re + cre, im + cim)
        })
        .collect();
    let re: Vec<f64> = partials.iter().map(|p| p.0).collect();
    let im: Vec<f64> = partials.iter().map(|p| p.1).collect();
    Complex64::new(pairwise(&re), pairwise(&im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&v), 2.0);
    }

    #[test]
    fn parallel_sum_is_thread_count_independent() {
        let values: Vec<f64> = (0..100_003).map(|i| ((i as f64) * 0.37).sin() * 1e3).collect();
        let reference = sum(&values);
        for threads in [1, 2, 3, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let s = pool.install(|| sum(&values));
            assert_eq!(s.to_bits(), reference.to_bits());
            let m = pool.install(|| sum_map(values.len(), |i| values[i]));
            assert_eq!(m.to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sum(&[]), 0.0);
        assert_eq!(sum_map_complex(0, |_| Complex64::new(1.0, 1.0)), Complex64::new(0.0, 0.0));
    }
}
