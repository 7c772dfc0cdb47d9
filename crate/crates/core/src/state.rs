//! Dense statevector with in-place gate kernels.
//!
//! Basis ordering is little-endian: qubit `k` is bit `k` of the amplitude
//! index, so qubit 0 is the least significant bit.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{circuit, config, Result};
use crate::gate::{Gate, GateKind, Mat2};

pub const MAX_QUBITS: usize = 24;

/// Conjunction of `(qubit, bit)` constraints; its probability is the weight
/// of all basis states satisfying every constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectorQuery {
    pub constraints: Vec<(usize, bool)>,
}

impl ProjectorQuery {
    pub fn new(constraints: Vec<(usize, bool)>) -> Self {
        Self { constraints }
    }

    pub fn one(qubit: usize, value: bool) -> Self {
        Self::new(vec![(qubit, value)])
    }

    /// All listed qubits read zero.
    pub fn all_zero(qubits: &[usize]) -> Self {
        Self::new(qubits.iter().map(|&q| (q, false)).collect())
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for (i, &(q, _)) in self.constraints.iter().enumerate() {
            if q >= num_qubits {
                return Err(circuit(format!(
                    "projector qubit {q} out of range for {num_qubits} qubits"
                )));
            }
            if self.constraints[..i].iter().any(|&(p, _)| p == q) {
                return Err(circuit(format!("projector constrains qubit {q} twice")));
            }
        }
        Ok(())
    }

    fn mask_and_value(&self) -> (usize, usize) {
        self.constraints.iter().fold((0, 0), |(m, v), &(q, b)| {
            (m | 1 << q, if b { v | 1 << q } else { v })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(config(format!(
                "num_qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(num_qubits)?;
        if index >= s.amps.len() {
            return Err(config(format!("basis index {index} out of range")));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(config(format!(
                "amplitude count must be a power of two >= 2, got {len}"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(config(format!("{num_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` after validating its qubits against this register.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn probability(&self, query: &ProjectorQuery) -> Result<f64> {
        query.validate(self.num_qubits)?;
        Ok(self.probability_unchecked(query))
    }

    pub(crate) fn probability_unchecked(&self, query: &ProjectorQuery) -> f64 {
        let (mask, value) = query.mask_and_value();
        if mask.is_power_of_two() {
            let half = usize::from(value != 0);
            return self
                .amps
                .chunks_exact(mask)
                .skip(half)
                .step_by(2)
                .flatten()
                .map(|a| a.norm_sqr())
                .sum();
        }
        let mut total = 0.0;
        for_each_with_bits(self.num_qubits, mask, value, |i| {
            total += self.amps[i].norm_sqr();
        });
        total
    }

    /// Joint outcome distribution of `qubits`; outcome bit `j` is `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut outcome = 0;
            for (j, &q) in qubits.iter().enumerate() {
                outcome |= ((i >> q) & 1) << j;
            }
            dist[outcome] += p;
        }
        dist
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let q = &gate.qubits;
        match gate.kind {
            GateKind::X => self.flip(q[0], 0),
            GateKind::Z => self.phase(1 << q[0], Complex64::new(-1.0, 0.0)),
            GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg => {
                let m = gate.kind.matrix().expect("single-qubit kind");
                self.phase(1 << q[0], m[1][1]);
            }
            GateKind::Rz { .. } => {
                let m = gate.kind.matrix().expect("single-qubit kind");
                self.diag(q[0], m[0][0], m[1][1]);
            }
            GateKind::H | GateKind::Y | GateKind::Sx | GateKind::Sxdg => {
                let m = gate.kind.matrix().expect("single-qubit kind");
                self.dense1(q[0], &m);
            }
            GateKind::Cx | GateKind::Ccx | GateKind::Mcx => {
                let (target, controls) = q.split_last().expect("non-empty");
                self.flip(*target, bits(controls));
            }
            GateKind::Cz | GateKind::Mcz => self.phase(bits(q), Complex64::new(-1.0, 0.0)),
            GateKind::Cphase { angle } => self.phase(bits(q), Complex64::from_polar(1.0, angle)),
            GateKind::Cswap => self.swap(q[1], q[2], 1 << q[0]),
            GateKind::Rccx => self.monomial3([q[0], q[1], q[2]], rccx_map()),
            GateKind::PhaseFlip { mask } => {
                let mut value = 0;
                for (j, &qb) in q.iter().enumerate() {
                    if (mask >> j) & 1 == 1 {
                        value |= 1 << qb;
                    }
                }
                let all = bits(q);
                for_each_with_bits(self.num_qubits, all, value, |i| {
                    self.amps[i] = -self.amps[i]
                });
            }
        }
    }

    /// X on `target` wherever every bit of `controls` is set.
    fn flip(&mut self, target: usize, controls: usize) {
        let tbit = 1 << target;
        if controls == 0 {
            for chunk in self.amps.chunks_exact_mut(tbit << 1) {
                let (lo, hi) = chunk.split_at_mut(tbit);
                lo.swap_with_slice(hi);
            }
        } else {
            let amps = &mut self.amps;
            for_each_with_bits(self.num_qubits, controls | tbit, controls, |i| {
                amps.swap(i, i | tbit)
            });
        }
    }

    /// Multiplies by `phase` every amplitude whose index has all `mask` bits set.
    fn phase(&mut self, mask: usize, phase: Complex64) {
        if mask.is_power_of_two() {
            let tbit = mask;
            for chunk in self.amps.chunks_exact_mut(tbit << 1) {
                for a in &mut chunk[tbit..] {
                    *a *= phase;
                }
            }
        } else {
            let amps = &mut self.amps;
            for_each_with_bits(self.num_qubits, mask, mask, |i| amps[i] *= phase);
        }
    }

    fn diag(&mut self, target: usize, d0: Complex64, d1: Complex64) {
        let tbit = 1 << target;
        for chunk in self.amps.chunks_exact_mut(tbit << 1) {
            let (lo, hi) = chunk.split_at_mut(tbit);
            lo.iter_mut().for_each(|a| *a *= d0);
            hi.iter_mut().for_each(|a| *a *= d1);
        }
    }

    fn dense1(&mut self, target: usize, m: &Mat2) {
        let tbit = 1 << target;
        if m.iter().flatten().all(|c| c.im == 0.0) {
            let [[a, b], [c, d]] = m.map(|row| row.map(|z| z.re));
            for chunk in self.amps.chunks_exact_mut(tbit << 1) {
                let (lo, hi) = chunk.split_at_mut(tbit);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = Complex64::new(a * u.re + b * v.re, a * u.im + b * v.im);
                    *y = Complex64::new(c * u.re + d * v.re, c * u.im + d * v.im);
                }
            }
            return;
        }
        let [[m00, m01], [m10, m11]] = *m;
        for chunk in self.amps.chunks_exact_mut(tbit << 1) {
            let (lo, hi) = chunk.split_at_mut(tbit);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m00 * x + m01 * y;
                *b = m10 * x + m11 * y;
            }
        }
    }

    /// Exchanges qubits `a` and `b` wherever every bit of `controls` is set.
    fn swap(&mut self, a: usize, b: usize, controls: usize) {
        let (abit, bbit) = (1 << a, 1 << b);
        let amps = &mut self.amps;
        for_each_with_bits(
            self.num_qubits,
            controls | abit | bbit,
            controls | abit,
            |i| amps.swap(i, i ^ abit ^ bbit),
        );
    }

    /// Permutation with phases on `qubits`: output `r` is `m[r].1` times
    /// input `m[r].0`. Local index bit `j` is `qubits[j]`.
    fn monomial3(&mut self, qubits: [usize; 3], m: &Monomial3) {
        let offsets: [usize; 8] =
            std::array::from_fn(|k| (0..3).fold(0, |acc, j| acc | (((k >> j) & 1) << qubits[j])));
        let amps = &mut self.amps;
        for_each_with_bits(self.num_qubits, bits(&qubits), 0, |base| {
            let v: [Complex64; 8] = std::array::from_fn(|k| amps[base | offsets[k]]);
            for (r, &(src, phase)) in m.iter().enumerate() {
                amps[base | offsets[r]] = phase * v[src];
            }
        });
    }
}

fn bits(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | 1 << q)
}

/// Calls `f` on every index below `2^n` whose `mask` bits equal `value`,
/// in increasing order.
#[inline]
fn for_each_with_bits(n: usize, mask: usize, value: usize, mut f: impl FnMut(usize)) {
    let limit = 1usize << n;
    let mut j = 0usize;
    while j < limit {
        f(j | value);
        j = ((j | mask) + 1) & !mask;
    }
}

/// The relative-phase Toffoli as the gate sequence its matrix is defined by.
pub(crate) fn rccx_sequence(c1: usize, c2: usize, target: usize) -> Vec<Gate> {
    vec![
        Gate::h(target),
        Gate::t(target),
        Gate::cx(c2, target),
        Gate::tdg(target),
        Gate::cx(c1, target),
        Gate::t(target),
        Gate::cx(c2, target),
        Gate::tdg(target),
        Gate::h(target),
    ]
}

type Monomial3 = [(usize, Complex64); 8];

fn rccx_map() -> &'static Monomial3 {
    static M: OnceLock<Monomial3> = OnceLock::new();
    M.get_or_init(|| {
        let mut m = [(0usize, Complex64::new(0.0, 0.0)); 8];
        let seq = rccx_sequence(0, 1, 2);
        for col in 0..8 {
            let mut s = Statevector::basis(3, col).expect("3 qubits");
            for g in &seq {
                s.apply_unchecked(g);
            }
            let hits: Vec<usize> = (0..8).filter(|&r| s.amps[r].norm() > 1e-9).collect();
            assert_eq!(
                hits.len(),
                1,
                "relative-phase Toffoli maps basis states to basis states"
            );
            m[hits[0]] = (col, s.amps[hits[0]]);
        }
        m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn init_state_is_ground() {
        let s = Statevector::new(1).unwrap();
        assert_eq!(s.amplitudes(), &[1.0.into(), 0.0.into()]);
        let s = Statevector::new(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_eq!(s.amplitudes()[0], 1.0.into());
        let s = Statevector::new(16).unwrap();
        assert_eq!(s.amplitudes().len(), 65536);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn init_state_range() {
        assert!(matches!(Statevector::new(0), Err(crate::Error::Config(_))));
        assert!(matches!(Statevector::new(25), Err(crate::Error::Config(_))));
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = Statevector::new(1).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(s.amplitudes()[0], r) && close(s.amplitudes()[1], r));
    }

    #[test]
    fn little_endian_x_and_cx() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::x(0)).unwrap();
        assert_eq!(s.amplitudes()[0b01], 1.0.into());
        s.apply(&Gate::cx(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[0b11], 1.0.into());
    }

    #[test]
    fn overlapping_qubits_is_circuit_error() {
        let mut s = Statevector::new(3).unwrap();
        assert!(matches!(
            s.apply(&Gate::ccx(0, 1, 1)),
            Err(crate::Error::Circuit(_))
        ));
    }

    #[test]
    fn probability_queries() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        let p = s.probability(&ProjectorQuery::one(0, true)).unwrap();
        assert!((p - 0.5).abs() < 1e-12);

        let s = Statevector::basis(2, 0b11).unwrap();
        let q = ProjectorQuery::new(vec![(0, true), (1, true)]);
        assert!((s.probability(&q).unwrap() - 1.0).abs() < 1e-15);
        assert!(s
            .probability(&ProjectorQuery::new(vec![(0, true), (0, false)]))
            .is_err());
        assert!(s.probability(&ProjectorQuery::one(2, true)).is_err());
    }

    #[test]
    fn cswap_exchanges_only_when_controlled() {
        // qubits: control 0, a 1, b 2; |a=1, b=0>
        let mut s = Statevector::basis(3, 0b010).unwrap();
        s.apply(&Gate::cswap(0, 1, 2)).unwrap();
        assert_eq!(s.amplitudes()[0b010], 1.0.into());
        let mut s = Statevector::basis(3, 0b011).unwrap();
        s.apply(&Gate::cswap(0, 1, 2)).unwrap();
        assert_eq!(s.amplitudes()[0b101], 1.0.into());
    }

    #[test]
    fn phase_flip_marks_pattern() {
        let mut s = Statevector::new(2).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::h(1)).unwrap();
        s.apply(&Gate::phase_flip(0b01, &[0, 1])).unwrap();
        let a = s.amplitudes();
        assert!(a[0b01].re < 0.0 && a[0b00].re > 0.0 && a[0b10].re > 0.0 && a[0b11].re > 0.0);
    }

    #[test]
    fn marginal_orders_outcome_bits_by_argument() {
        let s = Statevector::basis(3, 0b100).unwrap();
        let d = s.marginal(&[2, 0]);
        assert_eq!(d, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn enumeration_hits_each_index_once() {
        let mut seen = vec![0; 64];
        for_each_with_bits(6, 0b100101, 0b000100, |i| seen[i] += 1);
        for (i, c) in seen.iter().enumerate() {
            assert_eq!(*c, usize::from(i & 0b100101 == 0b000100));
        }
    }
}
