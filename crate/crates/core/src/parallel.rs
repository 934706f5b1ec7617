//! Reproducible batch execution.
//!
//! Batch `i` always draws from ChaCha8 stream `i` of the master seed, and
//! results come back in batch order, so output is independent of the number
//! of worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default number of batches for batch-means error estimates.
pub const DEFAULT_BATCHES: usize = 100;

/// Execution knobs shared by the Monte-Carlo routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McOptions {
    pub batches: usize,
    /// Worker cap; 0 means all available cores.
    pub threads: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { batches: DEFAULT_BATCHES, threads: 0 }
    }
}

impl McOptions {
    pub fn with_threads(threads: usize) -> McOptions {
        McOptions { threads, ..McOptions::default() }
    }

    fn worker_count(&self, jobs: usize) -> usize {
        let cap = if self.threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.threads
        };
        cap.clamp(1, jobs.max(1))
    }
}

/// Generator for substream `stream` of `master`.
pub fn substream(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Split `total` into `parts` counts differing by at most one, larger first.
pub fn split_counts(total: u64, parts: usize) -> Vec<u64> {
    let parts = parts.max(1) as u64;
    (0..parts).map(|i| total / parts + u64::from(i < total % parts)).collect()
}

/// Run `job(i, rng_i)` for `i in 0..batches` and return results in order.
pub fn run_batches<T, F>(master: u64, batches: usize, options: &McOptions, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    let workers = options.worker_count(batches);
    if workers == 1 {
        return (0..batches)
            .map(|i| job(i, &mut substream(master, i as u64)))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..batches).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= batches {
                    break;
                }
                let out = job(i, &mut substream(master, i as u64));
                *slots[i].lock().expect("batch slot poisoned") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("batch slot poisoned").expect("batch ran"))
        .collect()
}

/// Pairwise sum in a fixed tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Mean and standard error of the mean from batch values.
pub fn batch_mean_stderr(values: &[f64]) -> (f64, f64) {
    let b = values.len();
    if b == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / b as f64;
    if b == 1 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    #[test]
    fn thread_count_does_not_change_results() {
        let job = |i: usize, rng: &mut ChaCha8Rng| (i, rng.random::<u64>());
        let one = run_batches(9, 37, &McOptions::with_threads(1), job);
        let many = run_batches(9, 37, &McOptions::with_threads(8), job);
        assert_eq!(one, many);
        assert!(one.iter().enumerate().all(|(i, (j, _))| i == *j));
        assert_ne!(one[0].1, one[1].1);
    }

    #[test]
    fn splitting_and_stats() {
        assert_eq!(split_counts(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(split_counts(3, 5).iter().sum::<u64>(), 3);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
        let (m, s) = batch_mean_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
