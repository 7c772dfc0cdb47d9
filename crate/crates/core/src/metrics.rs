//! Success probability, expected expensive-oracle calls and efficiency.
//!
//! `⟨#U_B⟩` counts branch executions: the fixed-order circuit runs `U_B` on
//! both coherent branches every iteration, `2k` in total. The skip-gate
//! circuit saves `P(a = 1 @ t) / P(C = 1)` calls in iteration `t`, with the
//! nominal `P(C = 1) = 1/2`.

use serde::{Deserialize, Serialize};

use crate::builders::{labels, ExperimentConfig, SuccessRule, Variant};
use crate::circuit::ProbeReadings;
use crate::error::{Error, Result};
use crate::noise::Histogram;

/// Outcome bits of the benchmark circuits.
pub const FA_BIT: usize = 0b01;
pub const FB_BIT: usize = 0b10;

/// Nominal probability of the control branch `C = 1`.
pub const CONTROL_PRIOR: f64 = 0.5;

/// Binomial standard error `sqrt(p (1 - p) / shots)`.
pub fn binomial_stderr(p: f64, shots: u64) -> f64 {
    (p * (1.0 - p) / shots as f64).sqrt()
}

/// Fraction of successful shots and its standard error.
pub fn p_succ(histogram: &Histogram, rule: SuccessRule) -> Result<(f64, f64)> {
    let shots = histogram.shots();
    if shots == 0 {
        return Err(Error::Metrics("histogram has no shots".into()));
    }
    if histogram.num_bits() < 2 {
        return Err(Error::Metrics(format!(
            "success needs flag bits 0 and 1, histogram has {} bits",
            histogram.num_bits()
        )));
    }
    let mask = match rule {
        SuccessRule::BothFlags => FA_BIT | FB_BIT,
        SuccessRule::FbOnly => FB_BIT,
    };
    let p = histogram.count_with(mask) as f64 / shots as f64;
    Ok((p, binomial_stderr(p, shots)))
}

/// Expected number of expensive-oracle executions over `k` iterations.
pub fn expected_ub(probes: &ProbeReadings, k: usize, variant: Variant) -> Result<f64> {
    let baseline = 2.0 * k as f64;
    if variant == Variant::Fixed {
        return Ok(baseline);
    }
    let mut saved = 0.0;
    for t in 1..=k {
        let label = labels::anc_after_compute(t);
        let p = probes
            .get(&label)
            .ok_or_else(|| Error::Metrics(format!("missing probe `{label}`")))?;
        saved += p / CONTROL_PRIOR;
    }
    Ok(baseline - saved)
}

/// `p_succ / expected_ub`, absent when no oracle call is expected.
pub fn efficiency(p_succ: f64, expected_ub: f64) -> Option<f64> {
    (expected_ub > 0.0).then(|| p_succ / expected_ub)
}

/// Headline numbers of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub config: ExperimentConfig,
    pub shots: u64,
    pub successes: u64,
    pub p_succ: f64,
    pub stderr: f64,
    pub expected_ub: f64,
    pub efficiency: Option<f64>,
    pub depth: usize,
    pub twoq_count: usize,
    pub oneq_count: usize,
}

impl RunMetrics {
    pub fn compute(
        config: &ExperimentConfig,
        histogram: &Histogram,
        probes: &ProbeReadings,
        cost: &crate::transpile::CostReport,
    ) -> Result<Self> {
        let (p, stderr) = p_succ(histogram, config.success_rule)?;
        let ub = expected_ub(probes, config.k, config.variant)?;
        let shots = histogram.shots();
        Ok(Self {
            config: config.clone(),
            shots,
            successes: (p * shots as f64).round() as u64,
            p_succ: p,
            stderr,
            expected_ub: ub,
            efficiency: efficiency(p, ub),
            depth: cost.depth,
            twoq_count: cost.twoq_count,
            oneq_count: cost.oneq_count,
        })
    }
}
