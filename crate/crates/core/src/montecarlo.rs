//! Seeded Monte Carlo sampling used as an independent oracle for the
//! deterministic integrators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }

    pub fn scaled(&self, factor: f64) -> McEstimate {
        McEstimate {
            mean: self.mean * factor,
            std_err: self.std_err * factor.abs(),
            samples: self.samples,
        }
    }
}

/// Mean and standard error of `sample(rng)` over `n` draws. Work is split
/// into fixed chunks, each on its own ChaCha stream, and reduced in chunk
/// order, so the result is independent of the thread count.
pub fn estimate<F>(n: u64, seed: u64, sample: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(n - c * CHUNK);
            let (mut s, mut s2) = (0.0f64, 0.0f64);
            for _ in 0..count {
                let v = sample(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    McEstimate {
        mean,
        std_err: (var / nf).sqrt(),
        samples: n,
    }
}

/// `∬_{[x0,x1]×[y0,y1]} f` by uniform sampling of the rectangle.
pub fn integrate_rect<F>(f: F, x: (f64, f64), y: (f64, f64), n: u64, seed: u64) -> McEstimate
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let area = (x.1 - x.0) * (y.1 - y.0);
    estimate(n, seed, |rng| {
        let px = rng.gen_range(x.0..x.1);
        let py = rng.gen_range(y.0..y.1);
        f(px, py)
    })
    .scaled(area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_accurate() {
        let a = integrate_rect(|x, y| x * y, (0.0, 1.0), (0.0, 2.0), 200_000, 7);
        let b = integrate_rect(|x, y| x * y, (0.0, 1.0), (0.0, 2.0), 200_000, 7);
        assert_eq!(a, b);
        assert!(a.agrees_with(1.0, 4.0), "{a:?}");
    }

    #[test]
    fn seed_changes_stream() {
        let a = estimate(1000, 1, |r| r.gen::<f64>());
        let b = estimate(1000, 2, |r| r.gen::<f64>());
        assert_ne!(a.mean, b.mean);
    }
}
