//! Configuration sweeps: build, lower, cost, sample and score every
//! `(R, variant)` point, then render the rows as CSV or JSON.
//!
//! Rows are ordered by `reps` first and `variant` second, as listed in the
//! configuration. Each point draws its shots from a seed derived from the
//! master seed and the row index.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::builders::{build, ExperimentConfig, SuccessRule, Variant};
use crate::circuit::ProbeReadings;
use crate::error::{config, Error, Result};
use crate::metrics::{expected_ub, RunMetrics};
use crate::noise::{sample_shots, Histogram, NoiseConfig};
use crate::transpile::{cost, lower, SegmentCost};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(config(format!(
                "format: expected `csv` or `json`, got `{s}`"
            ))),
        }
    }
}

/// A mask written as an integer or as a binary string such as `"1011"` or
/// `"0b1011"` (most significant bit first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Mask {
    Int(u64),
    Bits(String),
}

impl Mask {
    fn value(&self, field: &str) -> Result<u64> {
        match self {
            Mask::Int(v) => Ok(*v),
            Mask::Bits(s) => {
                let digits = s.trim().trim_start_matches("0b").replace('_', "");
                u64::from_str_radix(&digits, 2)
                    .map_err(|_| config(format!("{field}: `{s}` is not a binary string")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub p1: f64,
    pub p2: f64,
    pub p_ro: f64,
    pub shots: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            p1: NoiseConfig::DEVICE_P1,
            p2: NoiseConfig::DEVICE_P2,
            p_ro: NoiseConfig::DEVICE_P_RO,
            shots: 4000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A sweep over expensive-oracle costs and circuit variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    #[serde(alias = "R")]
    pub reps: Vec<usize>,
    /// Defaults to all ones.
    #[serde(default)]
    pub oa_mask: Option<Mask>,
    #[serde(default)]
    pub ob_mask: Option<Mask>,
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub success_rule: SuccessRule,
    /// Master seed; required.
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Command-line replacements applied after loading.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub variant: Option<Variant>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| config(format!("invalid TOML config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| config(format!("invalid JSON config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses by extension; `.json` is JSON, anything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read config {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(shots) = o.shots {
            self.noise.shots = shots;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(v) = o.variant {
            self.variants = vec![v];
        }
        self.validate()
    }

    fn masks(&self) -> Result<(u64, u64)> {
        let ones = if self.n >= 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let get = |m: &Option<Mask>, field| m.as_ref().map_or(Ok(ones), |m| m.value(field));
        Ok((
            get(&self.oa_mask, "oa_mask")?,
            get(&self.ob_mask, "ob_mask")?,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(config("n: must be >= 1"));
        }
        if self.reps.is_empty() {
            return Err(config("reps: list is empty"));
        }
        if let Some(i) = self.reps.iter().position(|&r| r == 0) {
            return Err(config(format!("reps[{i}]: must be >= 1")));
        }
        if self.variants.is_empty() {
            return Err(config("variants: list is empty"));
        }
        for (name, p) in [
            ("noise.p1", self.noise.p1),
            ("noise.p2", self.noise.p2),
            ("noise.p_ro", self.noise.p_ro),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(config(format!("{name}: {p} is not a probability")));
            }
        }
        if self.noise.shots == 0 {
            return Err(config("noise.shots: must be positive"));
        }
        let (oa, ob) = self.masks()?;
        for &variant in &self.variants {
            let point = ExperimentConfig {
                n: self.n,
                k: self.k,
                reps: self.reps[0],
                oa_mask: oa,
                ob_mask: ob,
                variant,
                success_rule: self.success_rule,
            };
            point.validate().map_err(|e| match e {
                Error::Config(msg) if msg.starts_with("oa_mask") || msg.starts_with("ob_mask") => {
                    Error::Config(msg.replacen(' ', ": ", 1))
                }
                Error::Config(msg) if msg.starts_with("n = ") => Error::Config(format!("n: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Sweep points in output order.
    pub fn points(&self) -> Result<Vec<ExperimentConfig>> {
        let (oa, ob) = self.masks()?;
        let mut out = Vec::new();
        for &reps in &self.reps {
            for &variant in &self.variants {
                out.push(ExperimentConfig {
                    n: self.n,
                    k: self.k,
                    reps,
                    oa_mask: oa,
                    ob_mask: ob,
                    variant,
                    success_rule: self.success_rule,
                });
            }
        }
        Ok(out)
    }

    pub fn noise_for(&self, point_seed: u64) -> NoiseConfig {
        NoiseConfig {
            p1: self.noise.p1,
            p2: self.noise.p2,
            p_ro: self.noise.p_ro,
            shots: self.noise.shots,
            seed: point_seed,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of row `index` under `master`.
pub fn point_seed(master: u64, index: usize) -> u64 {
    splitmix64(master ^ splitmix64(index as u64))
}

/// Everything measured at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub metrics: RunMetrics,
    pub point_seed: u64,
    pub noise: NoiseConfig,
    /// `⟨#U_B⟩` from the noiseless probe readings.
    pub expected_ub_noiseless: f64,
    pub histogram: Histogram,
    pub probes: ProbeReadings,
    pub noiseless_probes: ProbeReadings,
    pub per_iteration: Vec<SegmentCost>,
    pub error_free_shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub success_rule: SuccessRule,
    pub points: Vec<PointResult>,
}

/// Build, lower, cost, sample and score one point.
pub fn run_point(cfg: &ExperimentConfig, noise: &NoiseConfig) -> Result<PointResult> {
    let circuit = build(cfg)?;
    let report = cost(&lower(&circuit)?);
    let shots = sample_shots(&circuit, noise)?;
    let metrics = RunMetrics::compute(cfg, &shots.histogram, &shots.probes, &report)?;
    Ok(PointResult {
        expected_ub_noiseless: expected_ub(&shots.noiseless_probes, cfg.k, cfg.variant)?,
        metrics,
        point_seed: noise.seed,
        noise: *noise,
        histogram: shots.histogram,
        probes: shots.probes,
        noiseless_probes: shots.noiseless_probes,
        per_iteration: report.per_iteration,
        error_free_shots: shots.error_free_shots,
    })
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let points = cfg
        .points()?
        .iter()
        .enumerate()
        .map(|(i, p)| run_point(p, &cfg.noise_for(point_seed(cfg.seed, i))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        seed: cfg.seed,
        success_rule: cfg.success_rule,
        points,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    variant: &'a str,
    #[serde(rename = "R")]
    reps: usize,
    n: usize,
    k: usize,
    oa_mask: u64,
    ob_mask: u64,
    success_rule: &'a str,
    p1: f64,
    p2: f64,
    p_ro: f64,
    shots: u64,
    seed: u64,
    point_seed: u64,
    depth: usize,
    twoq: usize,
    oneq: usize,
    successes: u64,
    p_succ: f64,
    stderr: f64,
    expected_ub: f64,
    efficiency: Option<f64>,
    expected_ub_noiseless: f64,
}

impl SweepReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.points {
            let m = &p.metrics;
            w.serialize(CsvRow {
                variant: m.config.variant.as_str(),
                reps: m.config.reps,
                n: m.config.n,
                k: m.config.k,
                oa_mask: m.config.oa_mask,
                ob_mask: m.config.ob_mask,
                success_rule: m.config.success_rule.as_str(),
                p1: p.noise.p1,
                p2: p.noise.p2,
                p_ro: p.noise.p_ro,
                shots: m.shots,
                seed: self.seed,
                point_seed: p.point_seed,
                depth: m.depth,
                twoq: m.twoq_count,
                oneq: m.oneq_count,
                successes: m.successes,
                p_succ: m.p_succ,
                stderr: m.stderr,
                expected_ub: m.expected_ub,
                efficiency: m.efficiency,
                expected_ub_noiseless: p.expected_ub_noiseless,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}
