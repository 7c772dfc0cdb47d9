//! Invariant batteries behind `qsg verify`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::{
    build, labels, skip_block, variant_equivalence_check, Equivalence, ExperimentConfig, Variant,
    EQUIVALENCE_TOLERANCE,
};
use crate::circuit::{run, Circuit, RegisterLayout};
use crate::error::{config, Error, Result};
use crate::gate::Gate;
use crate::metrics::{binomial_stderr, efficiency, expected_ub};
use crate::state::Statevector;
use crate::transpile::lower;
use crate::unitary::{to_unitary, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Unitarity,
    SwapEquivalence,
    Ancilla,
    BlockStructure,
    Metrics,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Unitarity,
        Suite::SwapEquivalence,
        Suite::Ancilla,
        Suite::BlockStructure,
        Suite::Metrics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitarity => "unitarity",
            Suite::SwapEquivalence => "swap-equivalence",
            Suite::Ancilla => "ancilla",
            Suite::BlockStructure => "block-structure",
            Suite::Metrics => "metrics",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                config(format!(
                    "unknown suite `{s}`, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// One measured quantity against its bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    /// Passes when `|value - target| <= tolerance`; `value` keeps the raw reading.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: (value - target).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<52} value={:.3e} tol={:.1e}",
            self.name, self.value, self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite.name())?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

pub fn run_suite(suite: Suite) -> Result<Report> {
    let checks = match suite {
        Suite::Unitarity => unitarity()?,
        Suite::SwapEquivalence => swap_equivalence()?,
        Suite::Ancilla => ancilla()?,
        Suite::BlockStructure => block_structure()?,
        Suite::Metrics => metrics()?,
    };
    Ok(Report { suite, checks })
}

/// A random circuit over the whole logical gate set.
pub fn random_circuit(rng: &mut impl Rng, num_qubits: usize, len: usize) -> Result<Circuit> {
    let mut c = Circuit::new(num_qubits)?;
    for _ in 0..len {
        let mut wires: Vec<usize> = (0..num_qubits).collect();
        for i in 0..wires.len() {
            let j = rng.random_range(i..wires.len());
            wires.swap(i, j);
        }
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let w = &wires;
        let choices = if num_qubits >= 3 {
            16
        } else if num_qubits == 2 {
            12
        } else {
            8
        };
        let g = match rng.random_range(0..choices) {
            0 => Gate::h(w[0]),
            1 => Gate::x(w[0]),
            2 => Gate::y(w[0]),
            3 => Gate::z(w[0]),
            4 => Gate::s(w[0]),
            5 => Gate::tdg(w[0]),
            6 => Gate::sx(w[0]),
            7 => Gate::rz(angle, w[0]),
            8 => Gate::cx(w[0], w[1]),
            9 => Gate::cz(w[0], w[1]),
            10 => Gate::cphase(angle, w[0], w[1]),
            11 => Gate::mcz(&w[..2]),
            12 => Gate::ccx(w[0], w[1], w[2]),
            13 => Gate::rccx(w[0], w[1], w[2]),
            14 => Gate::cswap(w[0], w[1], w[2]),
            _ => {
                let k = rng.random_range(1..num_qubits);
                Gate::phase_flip(rng.random_range(0..1u64 << k), &w[..k])
            }
        };
        c.push(g)?;
    }
    Ok(c)
}

fn unitarity_deviation(u: &Matrix) -> f64 {
    u.adjoint().mul(u).max_abs_diff(&Matrix::identity(u.dim()))
}

fn unitarity() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();
    for i in 0..24 {
        let n = 1 + i % 8;
        let c = random_circuit(&mut rng, n, 40)?;
        let u = to_unitary(&c)?;
        checks.push(Check::at_most(
            format!("random circuit #{i} ({n} qubits): |U'U - I|"),
            unitarity_deviation(&u),
            1e-10,
        ));
    }
    let mut points = Vec::new();
    for variant in Variant::ALL {
        points.push(ExperimentConfig::new(1, 1, 2, variant)?.with_masks(1, 1)?);
        points.push(ExperimentConfig::new(1, 2, 1, variant)?.with_masks(0, 1)?);
    }
    points.push(ExperimentConfig::new(2, 1, 2, Variant::Fixed)?.with_masks(0b01, 0b10)?);
    points.push(ExperimentConfig::new(2, 1, 1, Variant::QsgSwapout)?.with_masks(0b10, 0b11)?);
    points.push(ExperimentConfig::new(2, 1, 1, Variant::QsgControlled)?);
    for cfg in points {
        let c = build(&cfg)?.without_probes();
        let d = to_unitary(&c)?.max_abs_diff_up_to_phase(&to_unitary(&lower(&c)?)?);
        checks.push(Check::at_most(
            format!(
                "lowering {} n={} k={} R={}: |U - U_native|",
                cfg.variant, cfg.n, cfg.k, cfg.reps
            ),
            d,
            1e-9,
        ));
    }
    Ok(checks)
}

fn swap_equivalence() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=3 {
        for reps in [1, 3] {
            let cfg = ExperimentConfig::new(n, 1, reps, Variant::QsgSwapout)?;
            let name = format!("swap-out vs controlled layer n={n} R={reps}");
            match variant_equivalence_check(&cfg)? {
                Equivalence::Checked { max_deviation, .. } => {
                    checks.push(Check::at_most(name, max_deviation, EQUIVALENCE_TOLERANCE))
                }
                Equivalence::Unsupported(why) => {
                    return Err(Error::Capability(format!("{name}: {why}")))
                }
            }
        }
    }
    Ok(checks)
}

/// `(P(anc = 1), P(dB != 0))` after each iteration of a noiseless run.
pub fn ancilla_trace(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>> {
    let (_, readings) = build(cfg)?.simulate()?;
    (1..=cfg.k)
        .map(|t| {
            let get = |label: String| {
                readings
                    .get(&label)
                    .copied()
                    .ok_or_else(|| Error::Metrics(format!("missing probe `{label}`")))
            };
            Ok((get(labels::anc_at_end(t))?, get(labels::dummy_at_end(t))?))
        })
        .collect()
}

fn ancilla() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for variant in [Variant::QsgSwapout, Variant::QsgControlled] {
        let cfg = ExperimentConfig::new(4, 3, 35, variant)?;
        for (t, (anc, db)) in ancilla_trace(&cfg)?.into_iter().enumerate() {
            let t = t + 1;
            checks.push(Check::at_most(
                format!("{variant} n=4 k=3 R=35 P(a=1) after iter {t}"),
                anc,
                1e-10,
            ));
            checks.push(Check::at_most(
                format!("{variant} n=4 k=3 R=35 P(dB!=0) after iter {t}"),
                db,
                1e-10,
            ));
        }
    }
    Ok(checks)
}

/// Largest deviation of the `n = 1` skip block on the `C = 1, anc = 0,
/// dB = 0` inputs from the block-diagonal form: `U_B U_A` where `fA = 0`,
/// `U_A` alone where `fA = 1`.
pub fn block_structure_deviation(cfg: &ExperimentConfig) -> Result<f64> {
    if cfg.n != 1 {
        return Err(config("block structure is defined for n = 1"));
    }
    let layout = RegisterLayout::qsg(1);
    let block = skip_block(cfg)?;
    let width = layout.width();
    let (c, xa, xb, fa, fb) = (
        layout.control.expect("qsg"),
        layout.xa[0],
        layout.xb[0],
        layout.fa,
        layout.fb,
    );
    let sign = |hit: bool| if hit { -1.0 } else { 1.0 };

    let mut worst = 0.0f64;
    for bits in 0..16usize {
        let (a, b, f, g) = (bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1);
        let input = 1 << c | a << xa | b << xb | f << fa | g << fb;
        let (out, _) = run(&block, Statevector::basis(width, input)?)?;
        let u_a = sign(a as u64 == cfg.oa_mask);
        let u_b = if f == 0 {
            sign(b as u64 == cfg.ob_mask)
        } else {
            1.0
        };
        let mut want = vec![Complex64::new(0.0, 0.0); 1 << width];
        want[input] = Complex64::new(u_a * u_b, 0.0);
        let d = out
            .amplitudes()
            .iter()
            .zip(&want)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    Ok(worst)
}

fn block_structure() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for variant in [Variant::QsgSwapout, Variant::QsgControlled] {
        for reps in [1, 3] {
            for oa in [0, 1] {
                let cfg = ExperimentConfig::new(1, 1, reps, variant)?.with_masks(oa, 1)?;
                checks.push(Check::at_most(
                    format!("{variant} n=1 R={reps} OA={oa}: C=1 block deviation"),
                    block_structure_deviation(&cfg)?,
                    1e-10,
                ));
            }
        }
    }
    Ok(checks)
}

fn metrics() -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::near(
            "stderr(p=0.7565, 4000 shots)",
            binomial_stderr(0.7565, 4000),
            0.0068,
            5e-5,
        ),
        Check::near("stderr(p=1, 10 shots)", binomial_stderr(1.0, 10), 0.0, 0.0),
        Check::near(
            "efficiency 0.751 / 4.53",
            efficiency(0.751, 4.53).unwrap_or(f64::NAN),
            0.166,
            5e-4,
        ),
        Check::near(
            "efficiency 0.763 / 4.49",
            efficiency(0.763, 4.49).unwrap_or(f64::NAN),
            0.170,
            5e-4,
        ),
    ];
    let fixed = ExperimentConfig::new(4, 3, 1, Variant::Fixed)?;
    let (_, readings) = build(&fixed)?.simulate()?;
    checks.push(Check::near(
        "FIXED k=3 <#U_B>",
        expected_ub(&readings, 3, Variant::Fixed)?,
        6.0,
        0.0,
    ));
    for variant in [Variant::QsgSwapout, Variant::QsgControlled] {
        let cfg = ExperimentConfig::new(4, 3, 1, variant)?;
        let (_, readings) = build(&cfg)?.simulate()?;
        let ub = expected_ub(&readings, 3, variant)?;
        checks.push(Check {
            name: format!("{variant} k=3 noiseless <#U_B> in [k, 2k]"),
            value: ub,
            tolerance: 0.0,
            passed: (3.0..=6.0).contains(&ub),
        });
    }
    Ok(checks)
}
