//! Pauli-trajectory noise and shot sampling.
//!
//! Errors are attached to native gates of the lowered circuit. Each shot
//! draws its error locations up front, then replays the lowering tree:
//! subtrees without an interior error are applied as their logical gate,
//! adjacent inverse pairs without an interior error are skipped, and the
//! error-free prefix is resumed from a cached noiseless checkpoint.
//!
//! Shot `i` uses a ChaCha8 generator seeded with the master seed on stream
//! `i`, so results do not depend on scheduling or thread count.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, ProbeReadings};
use crate::error::{config, Result};
use crate::gate::Gate;
use crate::state::Statevector;
use crate::transpile::{lower_with_tree, Lowering, Node};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Probability of a uniform X/Y/Z after each single-qubit native gate.
    pub p1: f64,
    /// Probability of one of the 15 non-identity two-qubit Paulis after each CX.
    pub p2: f64,
    /// Independent flip probability of each measured bit.
    pub p_ro: f64,
    pub shots: u64,
    pub seed: u64,
}

impl NoiseConfig {
    pub const DEVICE_P1: f64 = 2e-4;
    pub const DEVICE_P2: f64 = 2e-3;
    pub const DEVICE_P_RO: f64 = 1e-2;

    /// The default noise point.
    pub fn device_like(shots: u64, seed: u64) -> Self {
        Self {
            p1: Self::DEVICE_P1,
            p2: Self::DEVICE_P2,
            p_ro: Self::DEVICE_P_RO,
            shots,
            seed,
        }
    }

    pub fn ideal(shots: u64, seed: u64) -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            p_ro: 0.0,
            shots,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_ro", self.p_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(config(format!("{name} = {p} is not a probability")));
            }
        }
        if self.shots == 0 {
            return Err(config("shots must be positive"));
        }
        Ok(())
    }
}

/// Outcome counts over the measured bits. Outcome bit `j` is measurement `j`;
/// bitstrings print bit 0 rightmost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    num_bits: usize,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(num_bits: usize) -> Self {
        Self {
            num_bits,
            counts: vec![0; 1 << num_bits],
        }
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
    }

    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Shots whose outcome has every bit of `mask` set.
    pub fn count_with(&self, mask: usize) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(o, _)| o & mask == mask)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(
            self.num_bits, other.num_bits,
            "histograms over different bit counts"
        );
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        (0..self.num_bits)
            .rev()
            .map(|j| if (outcome >> j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Nonzero entries keyed by bitstring.
    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(o, &c)| (self.bitstring(o), c))
            .collect()
    }
}

impl Serialize for Histogram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_map().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotResult {
    pub histogram: Histogram,
    /// Probe readings averaged over trajectories.
    pub probes: ProbeReadings,
    /// Probe readings of the noiseless run.
    pub noiseless_probes: ProbeReadings,
    /// Shots that drew no gate error.
    pub error_free_shots: u64,
}

#[derive(Clone, Copy, Debug)]
enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_index(i: u32) -> Option<Pauli> {
        match i {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    fn gate(self, q: usize) -> Gate {
        match self {
            Pauli::X => Gate::x(q),
            Pauli::Y => Gate::y(q),
            Pauli::Z => Gate::z(q),
        }
    }
}

/// Pauli error inserted right after native gate `position`.
#[derive(Clone, Debug)]
struct Fault {
    position: usize,
    ops: Vec<Gate>,
}

struct Plan {
    lowering: Lowering,
    oneq: Vec<usize>,
    twoq: Vec<usize>,
    /// Probe indices read before root `r`; index `roots.len()` is the end.
    probes_at: Vec<Vec<usize>>,
    labels: Vec<String>,
    /// Root `r` and `r + 1` multiply to the identity.
    cancels: Vec<bool>,
    checkpoints: Vec<(usize, Statevector)>,
    noiseless_probes: Vec<f64>,
    noiseless_marginal: Vec<f64>,
    measured: Vec<usize>,
}

const CHECKPOINT_BYTES: usize = 64 << 20;
const MAX_CHECKPOINTS: usize = 64;

impl Plan {
    fn new(circuit: &Circuit) -> Result<Self> {
        let lowering = lower_with_tree(circuit)?;
        let native = lowering.native();
        let (mut oneq, mut twoq) = (Vec::new(), Vec::new());
        for (i, g) in native.gates().iter().enumerate() {
            match g.qubits.len() {
                1 => oneq.push(i),
                _ => twoq.push(i),
            }
        }
        let roots = &lowering.roots;
        let mut probes_at = vec![Vec::new(); roots.len() + 1];
        for (i, p) in native.probes().iter().enumerate() {
            let r = roots.partition_point(|n| n.start < p.position);
            probes_at[r].push(i);
        }
        let labels = native.probes().iter().map(|p| p.label.clone()).collect();
        let cancels = (0..roots.len())
            .map(|r| {
                r + 1 < roots.len()
                    && probes_at[r + 1].is_empty()
                    && roots[r + 1].gate == roots[r].gate.inverse()
            })
            .collect();

        let mut plan = Plan {
            measured: native.measured_qubits(),
            lowering,
            oneq,
            twoq,
            probes_at,
            labels,
            cancels,
            checkpoints: Vec::new(),
            noiseless_probes: Vec::new(),
            noiseless_marginal: Vec::new(),
        };
        plan.record_noiseless()?;
        Ok(plan)
    }

    fn roots(&self) -> &[Node] {
        &self.lowering.roots
    }

    fn record_noiseless(&mut self) -> Result<()> {
        let n = self.lowering.native().num_qubits();
        let roots = self.roots().len();
        let state_bytes = (16usize << n).max(1);
        let budget = (CHECKPOINT_BYTES / state_bytes).clamp(1, MAX_CHECKPOINTS);
        let stride = roots.div_ceil(budget).max(1);

        let mut state = Statevector::new(n)?;
        let mut probes = vec![0.0; self.labels.len()];
        let mut checkpoints = Vec::new();
        let (mut r, mut next_checkpoint) = (0, 0);
        while r <= roots {
            if r >= next_checkpoint && r < roots {
                checkpoints.push((r, state.clone()));
                next_checkpoint = r + stride;
            }
            self.read_probes(r, &state, &mut probes);
            if r == roots {
                break;
            }
            r = self.step_clean(r, &mut state);
        }
        self.noiseless_marginal = state.marginal(&self.measured);
        self.noiseless_probes = probes;
        self.checkpoints = checkpoints;
        Ok(())
    }

    fn read_probes(&self, r: usize, state: &Statevector, out: &mut [f64]) {
        let native = self.lowering.native();
        for &i in &self.probes_at[r] {
            out[i] = native.probes()[i].read(state);
        }
    }

    /// Applies root `r` without errors; returns the next root index.
    fn step_clean(&self, r: usize, state: &mut Statevector) -> usize {
        if self.cancels[r] {
            return r + 2;
        }
        state.apply_unchecked(&self.roots()[r].gate);
        r + 1
    }

    fn sample_faults(&self, noise: &NoiseConfig, rng: &mut ChaCha8Rng) -> Vec<Fault> {
        let native = self.lowering.native().gates();
        let mut faults = Vec::new();
        for (p, sites, two) in [(noise.p1, &self.oneq, false), (noise.p2, &self.twoq, true)] {
            if p <= 0.0 || sites.is_empty() {
                continue;
            }
            let geo = Geometric::new(p).expect("validated probability");
            let mut idx = geo.sample(rng);
            while let Some(&position) = usize::try_from(idx).ok().and_then(|i| sites.get(i)) {
                let q = &native[position].qubits;
                let ops = if two {
                    let v = rng.random_range(1..16u32);
                    [
                        Pauli::from_index(v / 4).map(|p| p.gate(q[0])),
                        Pauli::from_index(v % 4).map(|p| p.gate(q[1])),
                    ]
                    .into_iter()
                    .flatten()
                    .collect()
                } else {
                    vec![Pauli::from_index(rng.random_range(1..4u32))
                        .expect("1..4")
                        .gate(q[0])]
                };
                faults.push(Fault { position, ops });
                idx = idx.saturating_add(1).saturating_add(geo.sample(rng));
            }
        }
        faults.sort_by_key(|f| f.position);
        faults
    }

    fn trajectory(&self, noise: &NoiseConfig, shot: u64) -> (usize, Option<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        rng.set_stream(shot);
        let faults = self.sample_faults(noise, &mut rng);

        let (marginal, probes) = if faults.is_empty() {
            (None, None)
        } else {
            let (state, probes) = self.replay(&faults);
            (Some(state.marginal(&self.measured)), Some(probes))
        };
        let dist = marginal.as_deref().unwrap_or(&self.noiseless_marginal);
        let mut outcome = sample_index(dist, rng.random::<f64>());
        for j in 0..self.measured.len() {
            if noise.p_ro > 0.0 && rng.random_bool(noise.p_ro) {
                outcome ^= 1 << j;
            }
        }
        (outcome, probes)
    }

    fn replay(&self, faults: &[Fault]) -> (Statevector, Vec<f64>) {
        let roots = self.roots();
        let first = roots.partition_point(|n| n.end <= faults[0].position);
        let ci = self.checkpoints.partition_point(|(r, _)| *r <= first) - 1;
        let (mut r, ref start) = self.checkpoints[ci];
        let mut state = start.clone();
        while r < first {
            if self.cancels[r] && r + 1 == first {
                state.apply_unchecked(&roots[r].gate);
                r += 1;
            } else {
                r = self.step_clean(r, &mut state);
            }
        }

        let mut probes = self.noiseless_probes.clone();
        let mut pending = faults.iter().peekable();
        let mut started = false;
        while r <= roots.len() {
            if started {
                self.read_probes(r, &state, &mut probes);
            }
            started = true;
            if r == roots.len() {
                break;
            }
            if self.cancels[r] {
                let last = roots[r + 1].end - 1;
                if pending.peek().is_none_or(|f| f.position >= last) {
                    apply_faults_at(&mut pending, last, &mut state);
                    r += 2;
                    continue;
                }
            }
            walk(&roots[r], &mut state, &mut pending);
            r += 1;
        }
        (state, probes)
    }
}

fn apply_faults_at<'a>(
    pending: &mut std::iter::Peekable<impl Iterator<Item = &'a Fault>>,
    position: usize,
    state: &mut Statevector,
) {
    while let Some(f) = pending.next_if(|f| f.position == position) {
        for g in &f.ops {
            state.apply_unchecked(g);
        }
    }
}

/// Applies `node`, descending only where a fault sits strictly inside its span.
fn walk<'a>(
    node: &Node,
    state: &mut Statevector,
    pending: &mut std::iter::Peekable<impl Iterator<Item = &'a Fault>>,
) {
    let last = node.end - 1;
    let inner = pending.peek().is_some_and(|f| f.position < last);
    if inner && !node.children.is_empty() {
        for child in &node.children {
            walk(child, state, pending);
        }
    } else {
        state.apply_unchecked(&node.gate);
        apply_faults_at(pending, last, state);
    }
}

fn sample_index(dist: &[f64], u: f64) -> usize {
    let total: f64 = dist.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, p) in dist.iter().enumerate() {
        acc += p;
        if target < acc {
            return i;
        }
    }
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Runs `noise.shots` trajectories of `circuit` and samples its measured bits.
pub fn sample_shots(circuit: &Circuit, noise: &NoiseConfig) -> Result<ShotResult> {
    noise.validate()?;
    circuit.validate()?;
    let plan = Plan::new(circuit)?;

    let outcomes: Vec<(usize, Option<Vec<f64>>)> = (0..noise.shots)
        .into_par_iter()
        .map(|s| plan.trajectory(noise, s))
        .collect();

    let mut histogram = Histogram::new(plan.measured.len());
    let mut sums = vec![0.0; plan.labels.len()];
    let mut error_free = 0;
    for (outcome, probes) in &outcomes {
        histogram.record(*outcome);
        let p = probes.as_deref().unwrap_or_else(|| {
            error_free += 1;
            &plan.noiseless_probes
        });
        for (s, v) in sums.iter_mut().zip(p) {
            *s += v;
        }
    }
    let shots = noise.shots as f64;
    let label = |v: &[f64]| -> ProbeReadings {
        plan.labels.iter().cloned().zip(v.iter().copied()).collect()
    };
    Ok(ShotResult {
        histogram,
        probes: label(&sums.iter().map(|s| s / shots).collect::<Vec<_>>()),
        noiseless_probes: label(&plan.noiseless_probes),
        error_free_shots: error_free,
    })
}
