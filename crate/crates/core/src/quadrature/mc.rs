//! Monte Carlo plumbing: seeded worker fan-out and mergeable moment accumulators.
//!
//! A run is identified by `(seed, threads)`. Worker `w` of path `p` draws from
//! stream `p · STREAMS_PER_PATH + w` (workers are numbered from 1), and the
//! per-worker accumulators are merged in worker order, so results are
//! bit-identical for a fixed plan regardless of scheduling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::RngState;

/// Stream stride between independent estimator paths of one check.
pub const STREAMS_PER_PATH: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McPlan {
    pub seed: u64,
    pub threads: usize,
}

impl McPlan {
    pub fn new(seed: u64, threads: usize) -> Result<Self> {
        if threads == 0 || threads as u64 >= STREAMS_PER_PATH {
            return Err(Error::Domain(format!(
                "threads must be in 1..{STREAMS_PER_PATH}, got {threads}"
            )));
        }
        Ok(Self { seed, threads })
    }

    pub fn single(seed: u64) -> Self {
        Self { seed, threads: 1 }
    }

    /// Samples assigned to worker `w` (1-based) out of `total`.
    fn share(&self, total: usize, w: usize) -> usize {
        let base = total / self.threads;
        base + usize::from(w <= total % self.threads)
    }

    /// Runs `work(rng, count)` once per worker on its own stream and returns
    /// the results in worker order. Never spawns a thread when `threads == 1`.
    pub fn fan_out<T, F>(&self, path: u64, total: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RngState, usize) -> T + Sync,
    {
        let stream = |w: usize| path * STREAMS_PER_PATH + w as u64;
        if self.threads == 1 {
            let mut rng = RngState::new(self.seed, stream(1));
            return vec![work(&mut rng, total)];
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = (1..=self.threads)
                .map(|w| {
                    let work = &work;
                    let count = self.share(total, w);
                    let seed = self.seed;
                    scope.spawn(move || {
                        let mut rng = RngState::new(seed, stream(w));
                        work(&mut rng, count)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("Monte Carlo worker panicked"))
                .collect()
        })
    }

    /// Mean and standard error of `draw` over `total` samples.
    ///
    /// `draw` returns the sample value and the number of redraws it needed.
    pub fn estimate<F>(&self, path: u64, total: usize, draw: F) -> Result<McEstimate>
    where
        F: Fn(&mut RngState) -> Result<(f64, u64)> + Sync,
    {
        if total < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 samples, got {total}"
            )));
        }
        let parts = self.fan_out(path, total, |rng, count| -> Result<McAccumulator> {
            let mut acc = McAccumulator::default();
            for _ in 0..count {
                let (x, redraws) = draw(rng)?;
                if !x.is_finite() {
                    return Err(Error::NonFinite(acc.count as usize));
                }
                acc.push(x);
                acc.redraws += redraws;
            }
            Ok(acc)
        });
        let mut total_acc = McAccumulator::default();
        for part in parts {
            total_acc.merge(&part?);
        }
        Ok(total_acc.finish())
    }
}

impl Default for McPlan {
    fn default() -> Self {
        Self::single(0)
    }
}

/// Running count, mean and centered second moment (Welford), mergeable
/// with Chan's pairwise update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct McAccumulator {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub redraws: u64,
}

impl McAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &McAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
        self.redraws += other.redraws;
    }

    pub fn finish(&self) -> McEstimate {
        let n = self.count as f64;
        let var = if self.count > 1 {
            (self.m2 / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            stderr: (var / n).sqrt(),
            count: self.count,
            redraws: self.redraws,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`.
    pub stderr: f64,
    pub count: u64,
    pub redraws: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25];
        let mut acc = McAccumulator::default();
        xs.iter().for_each(|&x| acc.push(x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        let est = acc.finish();
        assert!((est.mean - mean).abs() < 1e-14);
        assert!((est.stderr - (var / 5.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn merge_is_order_consistent() {
        let mut a = McAccumulator::default();
        let mut b = McAccumulator::default();
        let mut all = McAccumulator::default();
        for k in 0..10 {
            let x = (k as f64).sin();
            all.push(x);
            if k < 3 {
                a.push(x)
            } else {
                b.push(x)
            }
        }
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-15);
        assert!((a.m2 - all.m2).abs() < 1e-13);
        let mut empty = McAccumulator::default();
        empty.merge(&all);
        assert_eq!(empty, all);
    }

    #[test]
    fn constant_has_zero_stderr() {
        let est = McPlan::single(1)
            .estimate(0, 100, |_| Ok((1.0, 0)))
            .unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.count, 100);
    }

    #[test]
    fn threaded_runs_are_reproducible_and_split_work() {
        let plan = McPlan::new(9, 3).unwrap();
        let run = || {
            plan.estimate(0, 1000, |rng| Ok((rng.uniform(), 0)))
                .unwrap()
        };
        let (x, y) = (run(), run());
        assert_eq!(x, y);
        assert_eq!(x.count, 1000);
        assert!((x.mean - 0.5).abs() < 4.0 * x.stderr);
        let counts = plan.fan_out(0, 1000, |_, c| c);
        assert_eq!(counts, vec![334, 333, 333]);
    }

    #[test]
    fn rejects_tiny_runs_and_bad_plans() {
        assert!(McPlan::single(0).estimate(0, 1, |_| Ok((0.0, 0))).is_err());
        assert!(McPlan::new(0, 0).is_err());
        assert!(McPlan::single(0)
            .estimate(0, 5, |_| Ok((f64::NAN, 0)))
            .is_err());
    }
}
