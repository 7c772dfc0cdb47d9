//! The three benchmark circuits: fixed-order Grover and the skip-gate
//! Grover with either a multi-controlled or a swap-out expensive oracle.
//!
//! Gate order within an iteration follows the reference listings: oracle A,
//! flag A, skip-condition compute, expensive oracle (skip realization),
//! flag B, skip-condition uncompute, diffusion over `xA + xB`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, RegisterLayout};
use crate::error::{config, Error, Result};
use crate::gate::Gate;
use crate::library::{
    cswap_block, diffusion, expensive_oracle, phase_oracle, set_flag, OracleSpec,
};
use crate::state::{ProjectorQuery, Statevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    Fixed,
    QsgControlled,
    QsgSwapout,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Fixed, Variant::QsgControlled, Variant::QsgSwapout];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Fixed => "FIXED",
            Variant::QsgControlled => "QSG_CONTROLLED",
            Variant::QsgSwapout => "QSG_SWAPOUT",
        }
    }

    pub fn is_qsg(self) -> bool {
        self != Variant::Fixed
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == norm)
            .ok_or_else(|| {
                config(format!(
                    "unknown variant `{s}` (FIXED, QSG_CONTROLLED, QSG_SWAPOUT)"
                ))
            })
    }
}

/// Which measured flag pattern counts as a successful shot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuccessRule {
    FbOnly,
    #[default]
    BothFlags,
}

impl SuccessRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SuccessRule::FbOnly => "FB_ONLY",
            SuccessRule::BothFlags => "BOTH_FLAGS",
        }
    }
}

impl fmt::Display for SuccessRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuccessRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "FB_ONLY" => Ok(SuccessRule::FbOnly),
            "BOTH_FLAGS" => Ok(SuccessRule::BothFlags),
            _ => Err(config(format!(
                "unknown success rule `{s}` (FB_ONLY, BOTH_FLAGS)"
            ))),
        }
    }
}

/// One benchmark point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Data qubits per oracle register.
    pub n: usize,
    /// Grover iterations.
    pub k: usize,
    /// Expensive-oracle repetitions.
    pub reps: usize,
    pub oa_mask: u64,
    pub ob_mask: u64,
    pub variant: Variant,
    #[serde(default)]
    pub success_rule: SuccessRule,
}

impl ExperimentConfig {
    /// Both masks default to all ones.
    pub fn new(n: usize, k: usize, reps: usize, variant: Variant) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(config(format!("n = {n} out of range 1..=20")));
        }
        let ones = (1u64 << n) - 1;
        let c = Self {
            n,
            k,
            reps,
            oa_mask: ones,
            ob_mask: ones,
            variant,
            success_rule: SuccessRule::default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_masks(mut self, oa_mask: u64, ob_mask: u64) -> Result<Self> {
        self.oa_mask = oa_mask;
        self.ob_mask = ob_mask;
        self.validate()?;
        Ok(self)
    }

    pub fn with_variant(mut self, variant: Variant) -> Result<Self> {
        self.variant = variant;
        self.validate()?;
        Ok(self)
    }

    pub fn with_reps(mut self, reps: usize) -> Result<Self> {
        self.reps = reps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(config("n must be >= 1"));
        }
        if self.reps == 0 {
            return Err(config("reps must be >= 1"));
        }
        let width = match self.variant {
            Variant::Fixed => 2 * self.n + 3,
            _ => 3 * self.n + 4,
        };
        if width > crate::state::MAX_QUBITS {
            return Err(config(format!(
                "n = {} needs {width} qubits, more than the simulator's {}",
                self.n,
                crate::state::MAX_QUBITS
            )));
        }
        for (name, mask) in [("oa_mask", self.oa_mask), ("ob_mask", self.ob_mask)] {
            if mask >> self.n != 0 {
                return Err(config(format!(
                    "{name} {mask:#b} does not fit in n = {} bits",
                    self.n
                )));
            }
        }
        if self.variant == Variant::QsgSwapout && self.ob_mask == 0 {
            return Err(config(
                "ob_mask must be nonzero for QSG_SWAPOUT: the dummy register |0...0> would be marked",
            ));
        }
        Ok(())
    }

    fn oracle_a(&self) -> OracleSpec {
        OracleSpec {
            num_qubits: self.n,
            mask: self.oa_mask,
            reps: 1,
        }
    }

    fn oracle_b(&self) -> OracleSpec {
        OracleSpec {
            num_qubits: self.n,
            mask: self.ob_mask,
            reps: self.reps,
        }
    }
}

/// Probe labels shared by the builders, the metrics and the verifiers.
pub mod labels {
    /// `P(anc = 1)` right after the skip condition is computed in iteration `t` (1-based).
    pub fn anc_after_compute(t: usize) -> String {
        format!("a=1@iter{t}")
    }

    /// `P(C = 1)` at the same point.
    pub fn control_after_compute(t: usize) -> String {
        format!("C=1@iter{t}")
    }

    /// `P(anc = 1)` after iteration `t` completes.
    pub fn anc_at_end(t: usize) -> String {
        format!("a=1@end{t}")
    }

    /// `P(dB != 0...0)` after iteration `t` completes.
    pub fn dummy_at_end(t: usize) -> String {
        format!("dB!=0@end{t}")
    }

    pub fn fa_at_end(t: usize) -> String {
        format!("fA=1@end{t}")
    }

    /// Iteration boundary; `t = 0` sits after state preparation.
    pub fn fb_at_end(t: usize) -> String {
        format!("{}{t}", crate::transpile::BOUNDARY_PREFIX)
    }
}

fn end_of_iteration_probes(c: &mut Circuit, layout: &RegisterLayout, t: usize) -> Result<()> {
    c.probe(labels::fa_at_end(t), ProjectorQuery::one(layout.fa, true))?;
    c.probe(labels::fb_at_end(t), ProjectorQuery::one(layout.fb, true))?;
    if let Some(anc) = layout.anc {
        c.probe(labels::anc_at_end(t), ProjectorQuery::one(anc, true))?;
        if !layout.db.is_empty() {
            c.probe_complement(
                labels::dummy_at_end(t),
                ProjectorQuery::all_zero(&layout.db),
            )?;
        }
    }
    Ok(())
}

fn measure_flags(c: &mut Circuit, layout: &RegisterLayout) -> Result<()> {
    c.measure(layout.fa, "fA")?;
    c.measure(layout.fb, "fB")
}

/// Fixed-order Grover on `2n + 3` qubits; both oracles run every iteration.
pub fn build_fixed(cfg: &ExperimentConfig) -> Result<Circuit> {
    cfg.validate()?;
    let layout = RegisterLayout::fixed(cfg.n);
    let mut c = Circuit::with_layout(layout.clone())?;
    let data: Vec<usize> = layout.xa.iter().chain(&layout.xb).copied().collect();
    c.extend(data.iter().map(|&q| Gate::h(q)))?;
    end_of_iteration_probes(&mut c, &layout, 0)?;

    let oracle_a = phase_oracle(&cfg.oracle_a())?.on(&layout.xa)?;
    let oracle_b = expensive_oracle(&cfg.oracle_b())?.on(&layout.xb)?;
    let flag_a = set_flag(&layout.xa, layout.fa, cfg.oa_mask)?.into_gates();
    let flag_b = set_flag(&layout.xb, layout.fb, cfg.ob_mask)?.into_gates();
    let diff = diffusion(&data)?.into_gates();
    for t in 1..=cfg.k {
        c.extend(oracle_a.clone())?;
        c.extend(flag_a.clone())?;
        c.extend(oracle_b.clone())?;
        c.extend(flag_b.clone())?;
        c.extend(diff.clone())?;
        end_of_iteration_probes(&mut c, &layout, t)?;
    }
    measure_flags(&mut c, &layout)?;
    Ok(c)
}

/// The expensive oracle run only on the `anc = 0` branch, realized per variant.
pub fn skip_realization(cfg: &ExperimentConfig, layout: &RegisterLayout) -> Result<Vec<Gate>> {
    let anc = layout.anc.ok_or_else(|| config("layout has no ancilla"))?;
    let oracle_b = expensive_oracle(&cfg.oracle_b())?.on(&layout.xb)?;
    match cfg.variant {
        Variant::QsgSwapout => {
            let swap = cswap_block(anc, &layout.xb, &layout.db)?.into_gates();
            let mut gates = swap.clone();
            gates.extend(oracle_b);
            gates.extend(swap);
            Ok(gates)
        }
        Variant::QsgControlled => {
            let mut gates = vec![Gate::x(anc)];
            for g in &oracle_b {
                gates.push(g.controlled_by(anc)?);
            }
            gates.push(Gate::x(anc));
            Ok(gates)
        }
        Variant::Fixed => Err(config("FIXED has no skip realization")),
    }
}

/// Skip-gate Grover on `3n + 4` qubits.
pub fn build_qsg(cfg: &ExperimentConfig) -> Result<Circuit> {
    cfg.validate()?;
    if !cfg.variant.is_qsg() {
        return Err(config("build_qsg needs a QSG variant"));
    }
    let layout = RegisterLayout::qsg(cfg.n);
    let control = layout.control.expect("qsg layout");
    let anc = layout.anc.expect("qsg layout");
    let mut c = Circuit::with_layout(layout.clone())?;
    let data: Vec<usize> = layout.xa.iter().chain(&layout.xb).copied().collect();
    c.extend(data.iter().chain([&control]).map(|&q| Gate::h(q)))?;
    end_of_iteration_probes(&mut c, &layout, 0)?;

    let oracle_a = phase_oracle(&cfg.oracle_a())?.on(&layout.xa)?;
    let flag_a = set_flag(&layout.xa, layout.fa, cfg.oa_mask)?.into_gates();
    let flag_b = set_flag(&layout.xb, layout.fb, cfg.ob_mask)?.into_gates();
    let condition = Gate::rccx(control, layout.fa, anc);
    let skip = skip_realization(cfg, &layout)?;
    let diff = diffusion(&data)?.into_gates();
    for t in 1..=cfg.k {
        c.extend(oracle_a.clone())?;
        c.extend(flag_a.clone())?;
        c.push(condition.clone())?;
        c.probe(labels::anc_after_compute(t), ProjectorQuery::one(anc, true))?;
        c.probe(
            labels::control_after_compute(t),
            ProjectorQuery::one(control, true),
        )?;
        c.extend(skip.clone())?;
        c.extend(flag_b.clone())?;
        c.push(condition.clone())?;
        c.extend(diff.clone())?;
        end_of_iteration_probes(&mut c, &layout, t)?;
    }
    measure_flags(&mut c, &layout)?;
    Ok(c)
}

/// Dispatches on the configured variant.
pub fn build(cfg: &ExperimentConfig) -> Result<Circuit> {
    match cfg.variant {
        Variant::Fixed => build_fixed(cfg),
        _ => build_qsg(cfg),
    }
}

/// One QSG iteration without state preparation, probes or measurements.
pub fn qsg_layer(cfg: &ExperimentConfig) -> Result<Circuit> {
    let one = ExperimentConfig {
        k: 1,
        ..cfg.clone()
    };
    let full = build_qsg(&one)?;
    let prep = 2 * cfg.n + 1;
    let mut layer = Circuit::with_layout(RegisterLayout::qsg(cfg.n))?;
    layer.extend(full.gates()[prep..].iter().cloned())?;
    Ok(layer)
}

/// Oracle A, then the skip condition, skip realization and uncompute.
/// The flag setters are left out so that `fA` is preserved.
pub fn skip_block(cfg: &ExperimentConfig) -> Result<Circuit> {
    cfg.validate()?;
    let layout = RegisterLayout::qsg(cfg.n);
    let control = layout.control.expect("qsg layout");
    let anc = layout.anc.expect("qsg layout");
    let mut c = Circuit::with_layout(layout.clone())?;
    c.extend(phase_oracle(&cfg.oracle_a())?.on(&layout.xa)?)?;
    c.push(Gate::rccx(control, layout.fa, anc))?;
    c.extend(skip_realization(cfg, &layout)?)?;
    c.push(Gate::rccx(control, layout.fa, anc))?;
    Ok(c)
}

/// Result of comparing the swap-out layer against the controlled layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    /// Largest amplitude deviation over all `dB = 0` basis inputs.
    Checked {
        max_deviation: f64,
        equivalent: bool,
    },
    Unsupported(String),
}

impl Equivalence {
    pub fn passed(&self) -> bool {
        matches!(
            self,
            Equivalence::Checked {
                equivalent: true,
                ..
            }
        )
    }
}

pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;
pub const EQUIVALENCE_MAX_N: usize = 3;

/// Column-by-column comparison of one swap-out layer against one controlled
/// layer on every basis input whose dummy register is `|0...0>`.
pub fn variant_equivalence_check(cfg: &ExperimentConfig) -> Result<Equivalence> {
    if cfg.n > EQUIVALENCE_MAX_N {
        return Err(Error::Capability(format!(
            "equivalence check supports n <= {EQUIVALENCE_MAX_N}, got n = {}",
            cfg.n
        )));
    }
    if cfg.ob_mask == 0 {
        return Ok(Equivalence::Unsupported(
            "ob_mask = 0 marks the dummy register, swap-out is not defined".into(),
        ));
    }
    let swap = qsg_layer(&ExperimentConfig {
        variant: Variant::QsgSwapout,
        ..cfg.clone()
    })?;
    let ctrl = qsg_layer(&ExperimentConfig {
        variant: Variant::QsgControlled,
        ..cfg.clone()
    })?;
    let worst = max_deviation_on_empty_dummy(&swap, &ctrl, cfg.n)?;
    Ok(Equivalence::Checked {
        max_deviation: worst,
        equivalent: worst <= EQUIVALENCE_TOLERANCE,
    })
}

/// Largest output amplitude difference of two `3n + 4`-qubit circuits over
/// basis inputs whose dummy register is `|0...0>`.
fn max_deviation_on_empty_dummy(a: &Circuit, b: &Circuit, n: usize) -> Result<f64> {
    let layout = RegisterLayout::qsg(n);
    let width = layout.width();
    let db_mask: usize = layout.db.iter().map(|&q| 1usize << q).sum();
    let mut worst = 0.0f64;
    for input in (0..1usize << width).filter(|i| i & db_mask == 0) {
        let (x, _) = crate::circuit::run(a, Statevector::basis(width, input)?)?;
        let (y, _) = crate::circuit::run(b, Statevector::basis(width, input)?)?;
        let d = x
            .amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, reps: usize, variant: Variant) -> ExperimentConfig {
        ExperimentConfig::new(n, k, reps, variant).unwrap()
    }

    #[test]
    fn widths() {
        assert_eq!(
            build_fixed(&cfg(4, 3, 1, Variant::Fixed))
                .unwrap()
                .num_qubits(),
            11
        );
        assert_eq!(
            build_qsg(&cfg(4, 3, 1, Variant::QsgSwapout))
                .unwrap()
                .num_qubits(),
            16
        );
        assert_eq!(
            build_qsg(&cfg(4, 3, 1, Variant::QsgControlled))
                .unwrap()
                .num_qubits(),
            16
        );
    }

    #[test]
    fn swapout_rejects_zero_ob_mask() {
        let c = cfg(2, 1, 1, Variant::QsgSwapout);
        assert!(c.clone().with_masks(1, 0).is_err());
        assert!(c
            .with_variant(Variant::QsgControlled)
            .unwrap()
            .with_masks(1, 0)
            .is_ok());
    }

    #[test]
    fn k_zero_leaves_flags_clear() {
        let c = build_fixed(&cfg(3, 0, 1, Variant::Fixed)).unwrap();
        assert_eq!(c.len(), 6);
        let (s, _) = c.simulate().unwrap();
        assert!(s.probability(&ProjectorQuery::one(7, true)).unwrap() < 1e-15);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            "qsg-swapout".parse::<Variant>().unwrap(),
            Variant::QsgSwapout
        );
        assert_eq!("FIXED".parse::<Variant>().unwrap(), Variant::Fixed);
        assert!("qsg".parse::<Variant>().is_err());
        assert_eq!(
            "fb_only".parse::<SuccessRule>().unwrap(),
            SuccessRule::FbOnly
        );
    }

    #[test]
    fn equivalence_detects_a_wrong_oracle() {
        let swap = qsg_layer(
            &cfg(2, 1, 1, Variant::QsgSwapout)
                .with_masks(0b11, 0b01)
                .unwrap(),
        )
        .unwrap();
        let ctrl = qsg_layer(
            &cfg(2, 1, 1, Variant::QsgControlled)
                .with_masks(0b11, 0b10)
                .unwrap(),
        )
        .unwrap();
        assert!(max_deviation_on_empty_dummy(&swap, &ctrl, 2).unwrap() > 0.1);
    }

    #[test]
    fn equivalence_small() {
        assert!(
            variant_equivalence_check(&cfg(1, 1, 1, Variant::QsgSwapout))
                .unwrap()
                .passed()
        );
        let zero_b = ExperimentConfig {
            ob_mask: 0,
            ..cfg(2, 1, 1, Variant::QsgControlled)
        };
        assert!(matches!(
            variant_equivalence_check(&zero_b).unwrap(),
            Equivalence::Unsupported(_)
        ));
        assert!(matches!(
            variant_equivalence_check(&cfg(4, 1, 1, Variant::QsgSwapout)),
            Err(Error::Capability(_))
        ));
    }
}
