//! Monte Carlo estimation of a path-sum amplitude.
//!
//! Each sample draws a uniform assignment `x` of the `h` path variables and
//! scores `s = 2^(h/2) * [B(x) = b] * (-1)^phase(x)`, whose mean is exactly
//! `<b|U|a>`. The per-sample variance can be as large as `2^h`, so the
//! number of samples needed for fixed precision grows exponentially with
//! the Hadamard count.
//!
//! Samples are drawn in fixed chunks, chunk `i` from its own ChaCha8 stream
//! `i` under the user seed, so results do not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::BasisString;
use crate::compile::PathSystem;
use crate::counting::{check_target, in_pool, CountOptions, Z2Kernel, MAX_VARS};
use crate::error::{Error, Result};

pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha), seed_from_u64(seed), stream = chunk index";
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleEstimate {
    pub estimate: f64,
    /// Sample standard deviation of the per-sample score over `sqrt(M)`.
    pub std_error: f64,
    pub num_samples: u64,
    pub h: u32,
    /// Samples scoring `+2^(h/2)` and `-2^(h/2)`; all others score 0.
    pub positive: u64,
    pub negative: u64,
    pub generator: &'static str,
}

pub fn estimate_amplitude(
    ps: &PathSystem,
    b: &BasisString,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<SampleEstimate> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    check_target(ps, b)?;
    let h = ps.num_path_vars();
    CountOptions::with_cap(MAX_VARS).check(h)?;
    let kernel = Z2Kernel::new(ps)?;
    let target = b.to_index();
    let var_mask = if h == 0 { 0 } else { u64::MAX >> (64 - h) };

    let chunk = |i: u64| -> (u64, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let len = CHUNK.min(samples - i * CHUNK);
        let (mut pos, mut neg) = (0u64, 0u64);
        for _ in 0..len {
            let x = rng.random::<u64>() & var_mask;
            let s = kernel.tables.state_at(x);
            if s & kernel.out_mask == target {
                if s & kernel.phase_bit == 0 {
                    pos += 1;
                } else {
                    neg += 1;
                }
            }
        }
        (pos, neg)
    };
    let chunks = samples.div_ceil(CHUNK);
    let (positive, negative) = if threads > 1 && chunks > 1 {
        in_pool(threads, || {
            (0..chunks)
                .into_par_iter()
                .map(chunk)
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
        })
    } else {
        (0..chunks)
            .map(chunk)
            .fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };

    // mean = 2^(h/2) (p - q) / M,  sum of squares = 2^h (p + q)
    let m = samples as f64;
    let gap = positive as f64 - negative as f64;
    let hits = (positive + negative) as f64;
    let estimate = gap / m * 2f64.powf(h as f64 / 2.0);
    let var = 2f64.powi(h as i32) * (hits - gap * gap / m) / (m - 1.0);
    Ok(SampleEstimate {
        estimate,
        std_error: (var.max(0.0) / m).sqrt(),
        num_samples: samples,
        h,
        positive,
        negative,
        generator: GENERATOR,
    })
}
