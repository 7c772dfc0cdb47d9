//! Named sub-circuits: oracles, flag setter, relative-phase Toffoli,
//! controlled-swap layers and Grover diffusion.
//!
//! Register values are little-endian over the listed wires: wire `i` of a
//! data register carries bit `i` of the marked string.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{circuit, config, Result};
use crate::gate::Gate;
use crate::state::rccx_sequence;

/// Marked bitstring oracle on `num_qubits` wires. `reps` only matters for
/// the expensive oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub num_qubits: usize,
    pub mask: u64,
    pub reps: usize,
}

impl OracleSpec {
    pub fn new(num_qubits: usize, mask: u64, reps: usize) -> Result<Self> {
        let s = Self {
            num_qubits,
            mask,
            reps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > 63 {
            return Err(config(format!(
                "oracle width {} out of range",
                self.num_qubits
            )));
        }
        if self.mask >> self.num_qubits != 0 {
            return Err(config(format!(
                "mask {:#b} does not fit in {} bits",
                self.mask, self.num_qubits
            )));
        }
        if self.reps == 0 {
            return Err(config("reps must be >= 1"));
        }
        Ok(())
    }
}

/// A gate sequence over local wires `0..width`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    width: usize,
    gates: Vec<Gate>,
}

impl Block {
    fn new(width: usize, gates: Vec<Gate>) -> Self {
        Self { width, gates }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn inverse(&self) -> Block {
        Block::new(
            self.width,
            self.gates.iter().rev().map(Gate::inverse).collect(),
        )
    }

    /// The gates with local wire `i` renamed to `wires[i]`.
    pub fn on(&self, wires: &[usize]) -> Result<Vec<Gate>> {
        if wires.len() != self.width {
            return Err(circuit(format!(
                "block of width {} mapped onto {} wires",
                self.width,
                wires.len()
            )));
        }
        Ok(self
            .gates
            .iter()
            .map(|g| Gate::new(g.kind, g.qubits.iter().map(|&q| wires[q]).collect()))
            .collect())
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.width)?;
        c.extend(self.gates.iter().cloned())?;
        Ok(c)
    }
}

fn distinct(wires: &[usize]) -> bool {
    wires
        .iter()
        .enumerate()
        .all(|(i, w)| !wires[..i].contains(w))
}

fn zero_bit_flips(wires: &[usize], mask: u64) -> Vec<Gate> {
    wires
        .iter()
        .enumerate()
        .filter(|(i, _)| (mask >> i) & 1 == 0)
        .map(|(_, &w)| Gate::x(w))
        .collect()
}

fn span(wires: &[usize]) -> usize {
    wires.iter().max().map_or(0, |m| m + 1)
}

/// `|x> -> -|x>` iff `x == mask`: X-conjugated MCZ on the zero bits.
pub fn phase_oracle(spec: &OracleSpec) -> Result<Block> {
    spec.validate()?;
    let wires: Vec<usize> = (0..spec.num_qubits).collect();
    let flips = zero_bit_flips(&wires, spec.mask);
    let mut gates = flips.clone();
    gates.push(Gate::mcz(&wires));
    gates.extend(flips);
    Ok(Block::new(spec.num_qubits, gates))
}

/// Phase oracle followed by `reps - 1` identity-acting padding blocks, each
/// a `(T, Tdg)` pair on every wire. Same unitary for every `reps`.
pub fn expensive_oracle(spec: &OracleSpec) -> Result<Block> {
    let mut gates = phase_oracle(spec)?.into_gates();
    for _ in 1..spec.reps {
        for q in 0..spec.num_qubits {
            gates.push(Gate::t(q));
            gates.push(Gate::tdg(q));
        }
    }
    Ok(Block::new(spec.num_qubits, gates))
}

/// Padding gates contributed by `reps` over a plain phase oracle.
pub fn padding_gate_count(num_qubits: usize, reps: usize) -> usize {
    2 * num_qubits * reps.saturating_sub(1)
}

/// Relative-phase Toffoli on local wires `[c1, c2, target]` as its
/// three-CX sequence.
pub fn rccx() -> Block {
    Block::new(3, rccx_sequence(0, 1, 2))
}

/// Pairwise controlled swaps of `reg1[i]` with `reg2[i]`.
pub fn cswap_block(control: usize, reg1: &[usize], reg2: &[usize]) -> Result<Block> {
    if reg1.len() != reg2.len() {
        return Err(circuit(format!(
            "cswap registers differ in length: {} vs {}",
            reg1.len(),
            reg2.len()
        )));
    }
    let mut all = vec![control];
    all.extend(reg1);
    all.extend(reg2);
    if !distinct(&all) {
        return Err(circuit("cswap control and registers must be distinct"));
    }
    let gates = reg1
        .iter()
        .zip(reg2)
        .map(|(&a, &b)| Gate::cswap(control, a, b))
        .collect();
    Ok(Block::new(span(&all), gates))
}

/// Toggles `flag` iff `data` reads `mask`.
pub fn set_flag(data: &[usize], flag: usize, mask: u64) -> Result<Block> {
    if data.is_empty() || data.contains(&flag) || !distinct(data) {
        return Err(circuit(
            "set_flag needs distinct data wires not including the flag",
        ));
    }
    if data.len() < 64 && mask >> data.len() != 0 {
        return Err(config(format!(
            "mask {mask:#b} does not fit in {} bits",
            data.len()
        )));
    }
    let flips = zero_bit_flips(data, mask);
    let mut gates = flips.clone();
    gates.push(Gate::mcx(data, flag));
    gates.extend(flips);
    let mut all = data.to_vec();
    all.push(flag);
    Ok(Block::new(span(&all), gates))
}

/// `H^m X^m MCZ X^m H^m`, which equals `I - 2|s><s|`.
pub fn diffusion(qubits: &[usize]) -> Result<Block> {
    if qubits.is_empty() || !distinct(qubits) {
        return Err(circuit("diffusion needs at least one distinct qubit"));
    }
    let layer = |f: fn(usize) -> Gate| qubits.iter().map(|&q| f(q)).collect::<Vec<_>>();
    let mut gates = layer(Gate::h);
    gates.extend(layer(Gate::x));
    gates.push(Gate::mcz(qubits));
    gates.extend(layer(Gate::x));
    gates.extend(layer(Gate::h));
    Ok(Block::new(span(qubits), gates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;
    use crate::state::Statevector;
    use crate::unitary::{to_unitary, Matrix};
    use num_complex::Complex64;

    fn unitary(gates: &[Gate], width: usize) -> Matrix {
        let mut c = Circuit::new(width).unwrap();
        c.extend(gates.iter().cloned()).unwrap();
        to_unitary(&c).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn phase_oracle_marks_three_on_uniform() {
        let o = phase_oracle(&OracleSpec::new(2, 3, 1).unwrap()).unwrap();
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        for g in o.gates() {
            s.apply(g).unwrap();
        }
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a - c(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_oracle_single_qubit_mask_zero() {
        let o = phase_oracle(&OracleSpec::new(1, 0, 1).unwrap()).unwrap();
        let u = unitary(o.gates(), 1);
        let want = Matrix::from_rows(&[vec![c(-1.0), c(0.0)], vec![c(0.0), c(1.0)]]);
        assert!(u.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn expensive_oracle_padding_count() {
        let spec = |n, reps| OracleSpec::new(n, 1, reps).unwrap();
        assert_eq!(
            expensive_oracle(&spec(2, 1)).unwrap(),
            phase_oracle(&spec(2, 1)).unwrap()
        );
        let d = expensive_oracle(&spec(1, 30)).unwrap().len()
            - expensive_oracle(&spec(1, 10)).unwrap().len();
        assert_eq!(d, 40);
        let d4 = expensive_oracle(&spec(4, 30)).unwrap().len()
            - expensive_oracle(&spec(4, 10)).unwrap().len();
        assert_eq!(d4, 40 * 4);
        assert_eq!(padding_gate_count(4, 30) - padding_gate_count(4, 10), d4);
    }

    #[test]
    fn oracle_spec_rejects_bad_values() {
        assert!(OracleSpec::new(2, 4, 1).is_err());
        assert!(OracleSpec::new(2, 1, 0).is_err());
        assert!(OracleSpec::new(0, 0, 1).is_err());
    }

    #[test]
    fn rccx_has_three_cx() {
        let r = rccx();
        let cx = r.gates().iter().filter(|g| g.kind == GateKind::Cx).count();
        assert_eq!(cx, 3);
        assert!(r.gates().iter().all(|g| g.qubits.len() <= 2));
    }

    #[test]
    fn cswap_block_length_mismatch() {
        assert!(cswap_block(0, &[1, 2], &[3]).is_err());
        assert!(cswap_block(1, &[1], &[2]).is_err());
    }

    #[test]
    fn cswap_block_exchanges_registers() {
        // control 0; reg1 = [1,2] holds |10> as value 0b01; reg2 = [3,4] holds 0b10.
        let b = cswap_block(0, &[1, 2], &[3, 4]).unwrap();
        let start = 0b1 | (0b01 << 1) | (0b10 << 3);
        let mut s = Statevector::basis(5, start).unwrap();
        for g in b.gates() {
            s.apply(g).unwrap();
        }
        assert_eq!(s.amplitudes()[0b1 | (0b10 << 1) | (0b01 << 3)], c(1.0));

        let start = (0b01 << 1) | (0b10 << 3);
        let mut s = Statevector::basis(5, start).unwrap();
        for g in b.gates() {
            s.apply(g).unwrap();
        }
        assert_eq!(s.amplitudes()[start], c(1.0));
    }

    #[test]
    fn set_flag_toggles() {
        let b = set_flag(&[0, 1], 2, 0b10).unwrap();
        let run = |input: usize| {
            let mut s = Statevector::basis(3, input).unwrap();
            for g in b.gates() {
                s.apply(g).unwrap();
            }
            s.amplitudes().iter().position(|a| a.norm() > 0.5).unwrap()
        };
        assert_eq!(run(0b010), 0b110);
        assert_eq!(run(0b001), 0b001);
        assert_eq!(run(0b110), 0b010);
        assert!(set_flag(&[0, 1], 1, 0).is_err());
    }

    #[test]
    fn diffusion_fixes_uniform_and_reflects_orthogonal() {
        let d = diffusion(&[0, 1]).unwrap();
        let u = unitary(d.gates(), 2);
        // I - 2|s><s| for m = 2: diagonal 1/2, off-diagonal -1/2.
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == col { 0.5 } else { -0.5 };
                assert!((u.get(r, col) - c(want)).norm() < 1e-12, "entry {r},{col}");
            }
        }
    }
}
