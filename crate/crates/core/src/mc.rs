//! Seeded, partitioned Monte Carlo.
//!
//! Work is split into a fixed number of partitions. Partition `k` draws from
//! ChaCha8 seeded with the master seed on stream `k`, and partition results are
//! combined in index order, so estimates are bit-for-bit reproducible for a
//! given `(seed, samples, partitions)` whatever the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: u64,
    pub partitions: u64,
}

impl McConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        McConfig {
            seed,
            samples,
            partitions: 64,
        }
    }

    /// Samples drawn by partition `k`.
    pub fn share(&self, k: u64) -> u64 {
        let base = self.samples / self.partitions;
        base + u64::from(k < self.samples % self.partitions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    /// Half-width of a 95% confidence interval.
    pub half_width: f64,
    pub samples: u64,
    pub seed: u64,
    pub partitions: u64,
}

impl McEstimate {
    /// One standard error.
    pub fn sigma(&self) -> f64 {
        self.half_width / Z95
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    /// Multiplies value and half-width by `s > 0`.
    pub fn scaled(self, s: f64) -> Self {
        McEstimate {
            value: self.value * s,
            half_width: self.half_width * s,
            ..self
        }
    }
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fraction of draws for which `hit` returns true.
pub fn bernoulli<F>(cfg: &McConfig, stream_base: u64, hit: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let counts: Vec<u64> = (0..cfg.partitions)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, stream_base + k);
            (0..cfg.share(k)).filter(|_| hit(&mut rng)).count() as u64
        })
        .collect();
    let hits: u64 = counts.iter().sum();
    let n = cfg.samples.max(1) as f64;
    let p = hits as f64 / n;
    // all-or-nothing outcomes still get a nonzero width (rule of three)
    let half_width = (Z95 * (p * (1.0 - p) / n).sqrt()).max(3.0 / n);
    McEstimate {
        value: p,
        half_width,
        samples: cfg.samples,
        seed: cfg.seed,
        partitions: cfg.partitions,
    }
}

/// Mean of a real-valued sample with a normal-theory interval.
pub fn mean<F>(cfg: &McConfig, stream_base: u64, draw: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let sums: Vec<(f64, f64)> = (0..cfg.partitions)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, stream_base + k);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..cfg.share(k) {
                let x = draw(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = cfg.samples.max(2) as f64;
    let m = s / n;
    let var = ((s2 - n * m * m) / (n - 1.0)).max(0.0);
    McEstimate {
        value: m,
        half_width: (Z95 * (var / n).sqrt()).max(f64::EPSILON),
        samples: cfg.samples,
        seed: cfg.seed,
        partitions: cfg.partitions,
    }
}

/// Each partition produces one independent replicate estimate from its
/// share of the samples; the interval comes from the spread of replicates
/// (Student t with `partitions − 1` degrees of freedom).
pub fn replicated<F>(cfg: &McConfig, stream_base: u64, replicate: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng, u64) -> f64 + Sync,
{
    let reps: Vec<f64> = (0..cfg.partitions)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, stream_base + k);
            replicate(&mut rng, cfg.share(k))
        })
        .collect();
    let r = reps.len() as f64;
    let m = reps.iter().sum::<f64>() / r;
    let var = reps.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (r - 1.0);
    McEstimate {
        value: m,
        half_width: (student_t95(r - 1.0) * (var / r).sqrt()).max(f64::EPSILON),
        samples: cfg.samples,
        seed: cfg.seed,
        partitions: cfg.partitions,
    }
}

/// Two-sided 95% Student t quantile (Cornish–Fisher expansion in `1/ν`).
pub fn student_t95(nu: f64) -> f64 {
    let z = Z95;
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    let z7 = z5 * z * z;
    z + (z3 + z) / (4.0 * nu)
        + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu)
        + (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * nu * nu * nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn shares_add_up() {
        let cfg = McConfig {
            seed: 1,
            samples: 1003,
            partitions: 10,
        };
        assert_eq!((0..10).map(|k| cfg.share(k)).sum::<u64>(), 1003);
    }

    #[test]
    fn estimates_are_reproducible() {
        let cfg = McConfig::new(9, 100_000);
        let a = bernoulli(&cfg, 0, |r| r.gen::<f64>() < 0.3);
        let b = bernoulli(&cfg, 0, |r| r.gen::<f64>() < 0.3);
        assert_eq!(a, b);
        assert!((a.value - 0.3).abs() < 3.0 * a.sigma() + 1e-12);
        let c = mean(&cfg, 0, |r| r.gen::<f64>());
        assert!((c.value - 0.5).abs() < 4.0 * c.sigma());
    }

    #[test]
    fn t_quantiles() {
        // tabulated: t(0.975, 10) = 2.228, t(0.975, 63) = 1.998
        assert!((student_t95(10.0) - 2.228).abs() < 2e-3);
        assert!((student_t95(63.0) - 1.998).abs() < 1e-3);
    }
}
