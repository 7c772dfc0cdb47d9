//! Ordered gate list with register layout, non-collapsing probes and
//! measurement declarations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{circuit, config, Result};
use crate::gate::Gate;
use crate::state::{ProjectorQuery, Statevector};

/// Qubit roles of the benchmark circuits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    /// Branch control `C`; absent in fixed-order circuits.
    pub control: Option<usize>,
    pub xa: Vec<usize>,
    pub xb: Vec<usize>,
    pub fa: usize,
    pub fb: usize,
    /// Skip-condition ancilla.
    pub anc: Option<usize>,
    /// Dummy register swapped against `xb`; empty in fixed-order circuits.
    pub db: Vec<usize>,
    /// Allocated but logically unused wires.
    #[serde(default)]
    pub spare: Vec<usize>,
}

impl RegisterLayout {
    /// `3n + 4` qubits: `C, xA, xB, fA, fB, anc, dB` in that order.
    pub fn qsg(n: usize) -> Self {
        Self {
            control: Some(0),
            xa: (1..=n).collect(),
            xb: (n + 1..=2 * n).collect(),
            fa: 2 * n + 1,
            fb: 2 * n + 2,
            anc: Some(2 * n + 3),
            db: (2 * n + 4..3 * n + 4).collect(),
            spare: Vec::new(),
        }
    }

    /// `2n + 3` qubits: `xA, xB, fA, fB` plus one spare wire.
    pub fn fixed(n: usize) -> Self {
        Self {
            control: None,
            xa: (0..n).collect(),
            xb: (n..2 * n).collect(),
            fa: 2 * n,
            fb: 2 * n + 1,
            anc: None,
            db: Vec::new(),
            spare: vec![2 * n + 2],
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.control.into_iter().collect();
        all.extend(&self.xa);
        all.extend(&self.xb);
        all.push(self.fa);
        all.push(self.fb);
        all.extend(self.anc);
        all.extend(&self.db);
        all.extend(&self.spare);
        all
    }

    pub fn width(&self) -> usize {
        self.qubits().len()
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.qubits();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(circuit("register layout reuses a qubit"));
        }
        if sorted.last().copied() != Some(all.len() - 1) {
            return Err(circuit("register layout must cover 0..width exactly"));
        }
        Ok(())
    }
}

/// A projector reading recorded after the first `position` gates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub position: usize,
    pub label: String,
    pub query: ProjectorQuery,
    /// Report `1 - P(query)` instead.
    #[serde(default)]
    pub complement: bool,
}

impl Probe {
    pub(crate) fn read(&self, state: &Statevector) -> f64 {
        let p = state.probability_unchecked(&self.query);
        if self.complement {
            (1.0 - p).max(0.0)
        } else {
            p
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub qubit: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    probes: Vec<Probe>,
    #[serde(default)]
    measurements: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<RegisterLayout>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(config("circuit needs at least one qubit"));
        }
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
            probes: Vec::new(),
            measurements: Vec::new(),
            layout: None,
        })
    }

    pub fn with_layout(layout: RegisterLayout) -> Result<Self> {
        layout.validate()?;
        let mut c = Self::new(layout.width())?;
        c.layout = Some(layout);
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
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

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn layout(&self) -> Option<&RegisterLayout> {
        self.layout.as_ref()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Records `P(query)` at the current end of the gate stream.
    pub fn probe(&mut self, label: impl Into<String>, query: ProjectorQuery) -> Result<()> {
        self.add_probe(label.into(), query, false)
    }

    /// Records `1 - P(query)` at the current end of the gate stream.
    pub fn probe_complement(
        &mut self,
        label: impl Into<String>,
        query: ProjectorQuery,
    ) -> Result<()> {
        self.add_probe(label.into(), query, true)
    }

    fn add_probe(&mut self, label: String, query: ProjectorQuery, complement: bool) -> Result<()> {
        query.validate(self.num_qubits)?;
        if self.probes.iter().any(|p| p.label == label) {
            return Err(circuit(format!("duplicate probe label `{label}`")));
        }
        self.probes.push(Probe {
            position: self.gates.len(),
            label,
            query,
            complement,
        });
        Ok(())
    }

    pub fn measure(&mut self, qubit: usize, label: impl Into<String>) -> Result<()> {
        let label = label.into();
        if qubit >= self.num_qubits {
            return Err(circuit(format!("measured qubit {qubit} out of range")));
        }
        if self
            .measurements
            .iter()
            .any(|m| m.qubit == qubit || m.label == label)
        {
            return Err(circuit(format!(
                "qubit {qubit} or label `{label}` already measured"
            )));
        }
        self.measurements.push(Measurement { qubit, label });
        Ok(())
    }

    pub fn measured_qubits(&self) -> Vec<usize> {
        self.measurements.iter().map(|m| m.qubit).collect()
    }

    /// Reversed, inverted gate list; probes and measurements are dropped.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            probes: Vec::new(),
            measurements: Vec::new(),
            layout: self.layout.clone(),
        }
    }

    /// Same circuit without probes.
    pub fn without_probes(&self) -> Circuit {
        Circuit {
            probes: Vec::new(),
            ..self.clone()
        }
    }

    /// Re-checks every structural invariant, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(config("circuit needs at least one qubit"));
        }
        if let Some(l) = &self.layout {
            l.validate()?;
            if l.width() != self.num_qubits {
                return Err(circuit("layout width differs from circuit width"));
            }
        }
        for g in &self.gates {
            g.validate(self.num_qubits)?;
        }
        for (i, p) in self.probes.iter().enumerate() {
            p.query.validate(self.num_qubits)?;
            if p.position > self.gates.len() {
                return Err(circuit(format!(
                    "probe `{}` past end of gate stream",
                    p.label
                )));
            }
            if self.probes[..i].iter().any(|q| q.label == p.label) {
                return Err(circuit(format!("duplicate probe label `{}`", p.label)));
            }
        }
        for (i, m) in self.measurements.iter().enumerate() {
            if m.qubit >= self.num_qubits {
                return Err(circuit(format!("measured qubit {} out of range", m.qubit)));
            }
            if self.measurements[..i]
                .iter()
                .any(|o| o.qubit == m.qubit || o.label == m.label)
            {
                return Err(circuit(format!("qubit {} measured twice", m.qubit)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    /// Gates by kind name, e.g. `{"cx": 12, "h": 8}`.
    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.kind.name()).or_insert(0) += 1;
        }
        m
    }

    pub(crate) fn set_layout(&mut self, layout: Option<RegisterLayout>) {
        self.layout = layout;
    }

    pub(crate) fn push_probe_raw(&mut self, probe: Probe) {
        self.probes.push(probe);
    }

    pub(crate) fn push_measurement_raw(&mut self, m: Measurement) {
        self.measurements.push(m);
    }
}

/// Probe readings keyed by label.
pub type ProbeReadings = BTreeMap<String, f64>;

/// Applies every gate in order, reading probes without disturbing the state.
pub fn run(circuit: &Circuit, mut state: Statevector) -> Result<(Statevector, ProbeReadings)> {
    if state.num_qubits() != circuit.num_qubits() {
        return Err(config(format!(
            "state has {} qubits, circuit has {}",
            state.num_qubits(),
            circuit.num_qubits()
        )));
    }
    let mut readings = ProbeReadings::new();
    let mut probes = circuit.probes().iter().peekable();
    for (i, g) in circuit.gates().iter().enumerate() {
        while let Some(p) = probes.next_if(|p| p.position == i) {
            readings.insert(p.label.clone(), p.read(&state));
        }
        state.apply_unchecked(g);
    }
    for p in probes {
        readings.insert(p.label.clone(), p.read(&state));
    }
    Ok((state, readings))
}

impl Circuit {
    /// Runs from `|0...0>`.
    pub fn simulate(&self) -> Result<(Statevector, ProbeReadings)> {
        run(self, Statevector::new(self.num_qubits)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_leaves_state() {
        let c = Circuit::new(2).unwrap();
        let s = Statevector::basis(2, 3).unwrap();
        let (out, readings) = run(&c, s.clone()).unwrap();
        assert_eq!(out, s);
        assert!(readings.is_empty());
    }

    #[test]
    fn probe_after_hadamard() {
        let mut c = Circuit::new(1).unwrap();
        c.push(Gate::h(0)).unwrap();
        c.probe("q0=1", ProjectorQuery::one(0, true)).unwrap();
        let (_, r) = c.simulate().unwrap();
        assert!((r["q0=1"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probes_sit_between_gates() {
        let mut c = Circuit::new(1).unwrap();
        c.probe("before", ProjectorQuery::one(0, true)).unwrap();
        c.push(Gate::x(0)).unwrap();
        c.probe("after", ProjectorQuery::one(0, true)).unwrap();
        let (_, r) = c.simulate().unwrap();
        assert_eq!(r["before"], 0.0);
        assert_eq!(r["after"], 1.0);
    }

    #[test]
    fn width_mismatch_is_config_error() {
        let c = Circuit::new(2).unwrap();
        let s = Statevector::new(3).unwrap();
        assert!(matches!(run(&c, s), Err(crate::Error::Config(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut c = Circuit::new(2).unwrap();
        c.probe("p", ProjectorQuery::one(0, true)).unwrap();
        assert!(c.probe("p", ProjectorQuery::one(1, true)).is_err());
        c.measure(0, "fA").unwrap();
        assert!(c.measure(0, "fB").is_err());
        assert!(c.measure(1, "fA").is_err());
    }

    #[test]
    fn layout_widths() {
        assert_eq!(RegisterLayout::qsg(4).width(), 16);
        assert_eq!(RegisterLayout::fixed(4).width(), 11);
        RegisterLayout::qsg(3).validate().unwrap();
        RegisterLayout::fixed(1).validate().unwrap();
    }

    #[test]
    fn json_rejects_invalid_gate() {
        let bad = r#"{"num_qubits":2,"gates":[{"name":"cx","qubits":[0,0]}]}"#;
        assert!(Circuit::from_json(bad).is_err());
        let ok = r#"{"num_qubits":2,"gates":[{"name":"cx","qubits":[0,1]}]}"#;
        assert_eq!(Circuit::from_json(ok).unwrap().len(), 1);
    }
}
