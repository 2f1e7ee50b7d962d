//! Wall-clock comparison of factored versus dense application.

use std::hint::black_box;
use std::time::Instant;

use hhfactor::{DVector, Distribution, GeneratorSpec};
use serde::Serialize;

use crate::Result;

/// Each timed sample repeats the operation until roughly this many flops.
const FLOPS_PER_SAMPLE: f64 = 2e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApplyTiming {
    pub n: usize,
    pub m: usize,
    /// Median seconds per `H₁…Hₘx`.
    pub factored_secs: f64,
    /// Median seconds per dense `Vx`.
    pub dense_secs: f64,
}

impl ApplyTiming {
    pub fn speedup(&self) -> f64 {
        self.dense_secs / self.factored_secs
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

fn reps_for(flops_per_call: f64) -> usize {
    (FLOPS_PER_SAMPLE / flops_per_call.max(1.0)).ceil().max(1.0) as usize
}

/// Median per-call time over `trials` seeded Gaussian products.
pub fn time_apply(n: usize, m: usize, trials: usize, seed: u64) -> Result<ApplyTiming> {
    let trials = trials.max(1);
    let factored_reps = reps_for(4.0 * (m * n) as f64);
    let dense_reps = reps_for(2.0 * (n * n) as f64);
    let mut factored = Vec::with_capacity(trials);
    let mut dense = Vec::with_capacity(trials);

    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let inst = GeneratorSpec::new(Distribution::Gaussian, n, m, trial_seed)?.generate()?;
        let probe = GeneratorSpec::new(Distribution::Gaussian, n, 1, !trial_seed)?.directions()?;
        let x: DVector<f64> = probe[0].direction().clone();

        let mut buf = x.clone();
        let start = Instant::now();
        for _ in 0..factored_reps {
            inst.factors.apply_in_place(black_box(buf.as_mut_slice()))?;
        }
        black_box(&buf);
        factored.push(start.elapsed().as_secs_f64() / factored_reps as f64);

        let v = inst.matrix.matrix();
        let mut y = DVector::zeros(n);
        let start = Instant::now();
        for _ in 0..dense_reps {
            y.gemv(1.0, v, black_box(&x), 0.0);
            black_box(&y);
        }
        dense.push(start.elapsed().as_secs_f64() / dense_reps as f64);
    }

    Ok(ApplyTiming {
        n,
        m,
        factored_secs: median(factored),
        dense_secs: median(dense),
    })
}

/// `t(m_hi)/t(m_lo)` divided by `m_hi/m_lo`; 1 means exactly linear.
pub fn normalized_scaling(lo: &ApplyTiming, hi: &ApplyTiming) -> f64 {
    (hi.factored_secs / lo.factored_secs) / (hi.m as f64 / lo.m as f64)
}
