//! Gate kinds and their qubit conventions.
//!
//! Qubit lists are ordered controls first, then targets. For `Mcx` every
//! qubit but the last is a control; `Mcz` and `PhaseFlip` are symmetric in
//! their qubits. `Cswap` is `[control, a, b]`. `Rccx` is `[c1, c2, target]`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{circuit, Error, Result};

/// 2x2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Sx,
    Sxdg,
    Rz {
        angle: f64,
    },
    Cx,
    Cz,
    /// Controlled phase `diag(1, 1, 1, e^{i angle})`.
    Cphase {
        angle: f64,
    },
    Ccx,
    /// Relative-phase Toffoli, defined by its three-CX decomposition.
    Rccx,
    Cswap,
    Mcx,
    Mcz,
    /// Sign flip on the single basis state where qubit `i` reads bit `i` of `mask`.
    PhaseFlip {
        mask: u64,
    },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Sx => "sx",
            GateKind::Sxdg => "sxdg",
            GateKind::Rz { .. } => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Cphase { .. } => "cphase",
            GateKind::Ccx => "ccx",
            GateKind::Rccx => "rccx",
            GateKind::Cswap => "cswap",
            GateKind::Mcx => "mcx",
            GateKind::Mcz => "mcz",
            GateKind::PhaseFlip { .. } => "phase_flip",
        }
    }

    /// Fixed arity, or `None` for the variable-width kinds.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Cphase { .. } => Some(2),
            GateKind::Ccx | GateKind::Rccx | GateKind::Cswap => Some(3),
            GateKind::Mcx | GateKind::Mcz | GateKind::PhaseFlip { .. } => None,
            _ => Some(1),
        }
    }

    /// Matrix of the single-qubit kinds.
    pub fn matrix(&self) -> Option<Mat2> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let p = |theta: f64| Complex64::from_polar(1.0, theta);
        let m = match *self {
            GateKind::H => [[h, h], [h, -h]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -Complex64::i()], [Complex64::i(), ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::S => [[ONE, ZERO], [ZERO, p(FRAC_PI_2)]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, p(-FRAC_PI_2)]],
            GateKind::T => [[ONE, ZERO], [ZERO, p(FRAC_PI_4)]],
            GateKind::Tdg => [[ONE, ZERO], [ZERO, p(-FRAC_PI_4)]],
            GateKind::Sx => {
                let a = Complex64::new(0.5, 0.5);
                let b = Complex64::new(0.5, -0.5);
                [[a, b], [b, a]]
            }
            GateKind::Sxdg => {
                let a = Complex64::new(0.5, -0.5);
                let b = Complex64::new(0.5, 0.5);
                [[a, b], [b, a]]
            }
            GateKind::Rz { angle } => [[p(-angle / 2.0), ZERO], [ZERO, p(angle / 2.0)]],
            _ => return None,
        };
        Some(m)
    }
}

/// A gate kind applied to an ordered list of qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(flatten)]
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::Sdg, vec![q])
    }
    pub fn t(q: usize) -> Self {
        Self::new(GateKind::T, vec![q])
    }
    pub fn tdg(q: usize) -> Self {
        Self::new(GateKind::Tdg, vec![q])
    }
    pub fn sx(q: usize) -> Self {
        Self::new(GateKind::Sx, vec![q])
    }
    pub fn rz(angle: f64, q: usize) -> Self {
        Self::new(GateKind::Rz { angle }, vec![q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, vec![a, b])
    }
    pub fn cphase(angle: f64, control: usize, target: usize) -> Self {
        Self::new(GateKind::Cphase { angle }, vec![control, target])
    }
    pub fn ccx(c1: usize, c2: usize, target: usize) -> Self {
        Self::new(GateKind::Ccx, vec![c1, c2, target])
    }
    pub fn rccx(c1: usize, c2: usize, target: usize) -> Self {
        Self::new(GateKind::Rccx, vec![c1, c2, target])
    }
    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::new(GateKind::Cswap, vec![control, a, b])
    }
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        let mut qubits = controls.to_vec();
        qubits.push(target);
        Self::new(GateKind::Mcx, qubits)
    }
    pub fn mcz(qubits: &[usize]) -> Self {
        Self::new(GateKind::Mcz, qubits.to_vec())
    }
    pub fn phase_flip(mask: u64, qubits: &[usize]) -> Self {
        Self::new(GateKind::PhaseFlip { mask }, qubits.to_vec())
    }

    /// Checks arity, distinctness and range against a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let n = self.qubits.len();
        match self.kind.arity() {
            Some(a) if a != n => {
                return Err(circuit(format!("{self}: expects {a} qubits, got {n}")));
            }
            None if n == 0 => return Err(circuit(format!("{self}: needs at least one qubit"))),
            _ => {}
        }
        if let GateKind::PhaseFlip { mask } = self.kind {
            if n < 64 && mask >> n != 0 {
                return Err(circuit(format!(
                    "{self}: mask {mask:#b} wider than {n} qubits"
                )));
            }
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(circuit(format!(
                    "{self}: qubit {q} out of range for {num_qubits} qubits"
                )));
            }
            if self.qubits[..i].contains(&q) {
                return Err(circuit(format!("{self}: qubit {q} used more than once")));
            }
        }
        Ok(())
    }

    /// Number of controls for the controlled-X/Z families.
    pub fn num_controls(&self) -> usize {
        match self.kind {
            GateKind::Cx | GateKind::Cz | GateKind::Cphase { .. } => 1,
            GateKind::Ccx | GateKind::Rccx => 2,
            GateKind::Cswap => 1,
            GateKind::Mcx | GateKind::Mcz => self.qubits.len() - 1,
            _ => 0,
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(
            self.kind,
            GateKind::Rz { .. } | GateKind::Sx | GateKind::X | GateKind::Cx
        )
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Sx => GateKind::Sxdg,
            GateKind::Sxdg => GateKind::Sx,
            GateKind::Rz { angle } => GateKind::Rz { angle: -angle },
            GateKind::Cphase { angle } => GateKind::Cphase { angle: -angle },
            // Hermitian kinds, including the Rccx sequence (checked in tests).
            k => k,
        };
        Gate::new(kind, self.qubits.clone())
    }

    /// The same gate with `control` added as an extra (positive) control.
    pub fn controlled_by(&self, control: usize) -> Result<Gate> {
        if self.qubits.contains(&control) {
            return Err(circuit(format!(
                "{self}: cannot add control on its own qubit {control}"
            )));
        }
        let mut qubits = Vec::with_capacity(self.qubits.len() + 1);
        qubits.push(control);
        qubits.extend_from_slice(&self.qubits);
        let kind = match self.kind {
            GateKind::X => GateKind::Cx,
            GateKind::Cx => GateKind::Ccx,
            GateKind::Ccx | GateKind::Mcx => GateKind::Mcx,
            GateKind::Z => GateKind::Cz,
            GateKind::Cz | GateKind::Mcz => GateKind::Mcz,
            GateKind::S => GateKind::Cphase { angle: FRAC_PI_2 },
            GateKind::Sdg => GateKind::Cphase { angle: -FRAC_PI_2 },
            GateKind::T => GateKind::Cphase { angle: FRAC_PI_4 },
            GateKind::Tdg => GateKind::Cphase { angle: -FRAC_PI_4 },
            GateKind::PhaseFlip { mask } => GateKind::PhaseFlip {
                mask: (mask << 1) | 1,
            },
            _ => {
                return Err(Error::Circuit(format!(
                    "{self}: no controlled form in the gate set"
                )))
            }
        };
        Ok(Gate::new(kind, qubits))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        match self.kind {
            GateKind::Rz { angle } | GateKind::Cphase { angle } => write!(f, "({angle:.6})")?,
            GateKind::PhaseFlip { mask } => write!(f, "({mask:#b})")?,
            _ => {}
        }
        write!(f, "[")?;
        for (i, q) in self.qubits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "q{q}")?;
        }
        write!(f, "]")
    }
}
