//! Reproducible parallel sampling.
//!
//! A run with `samples` draws is cut into fixed-size chunks. Chunk `k` gets
//! its own ChaCha stream (`seed`, stream `k`), so every chunk sees the same
//! numbers no matter which thread runs it, and the partial results are
//! returned in chunk order for a sequential reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub const CHUNK: usize = 8192;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `f(rng, count)` on each chunk in parallel; results come back in chunk order.
pub fn chunked<A, F>(seed: u64, samples: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> A + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK.min(samples - k * CHUNK);
            let mut rng = chunk_rng(seed, k as u64);
            f(&mut rng, count)
        })
        .collect()
}

/// Uniform point on the unit sphere of `R^n`, written into `out`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        if norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Running mean and standard error of weighted ratio estimates `Σ w h / Σ w`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatioAccumulator {
    pub count: f64,
    pub sum_w: f64,
    pub sum_wh: f64,
    pub sum_w2: f64,
    pub sum_wh2: f64,
    pub sum_w2h: f64,
}

impl RatioAccumulator {
    pub fn push(&mut self, w: f64, h: f64) {
        self.count += 1.0;
        self.sum_w += w;
        self.sum_wh += w * h;
        self.sum_w2 += w * w;
        self.sum_wh2 += (w * h) * (w * h);
        self.sum_w2h += w * w * h;
    }

    pub fn merge(&mut self, o: &Self) {
        self.count += o.count;
        self.sum_w += o.sum_w;
        self.sum_wh += o.sum_wh;
        self.sum_w2 += o.sum_w2;
        self.sum_wh2 += o.sum_wh2;
        self.sum_w2h += o.sum_w2h;
    }

    /// Ratio estimate and its delta-method standard error.
    pub fn ratio(&self) -> (f64, f64) {
        let n = self.count;
        if n < 2.0 || self.sum_w <= 0.0 {
            return (f64::NAN, f64::INFINITY);
        }
        let r = self.sum_wh / self.sum_w;
        let mw = self.sum_w / n;
        // Var of (wh - r w) per sample.
        let v = (self.sum_wh2 - 2.0 * r * self.sum_w2h + r * r * self.sum_w2) / n;
        let se = (v.max(0.0) / (n - 1.0)).sqrt() / mw;
        (r, se)
    }

    /// Plain mean of `w·h` and its standard error.
    pub fn mean(&self) -> (f64, f64) {
        let n = self.count;
        if n < 2.0 {
            return (f64::NAN, f64::INFINITY);
        }
        let m = self.sum_wh / n;
        let var = (self.sum_wh2 / n - m * m).max(0.0) * n / (n - 1.0);
        (m, (var / n).sqrt())
    }
}
