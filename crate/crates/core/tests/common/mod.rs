//! Reduced-register reference model of the benchmark circuits.
//!
//! Tracks only `(C, xA, xB, fA, fB)` with real amplitudes and ideal
//! operations. The ancilla and dummy register are implied by the ideal
//! semantics, so no library gate, lowering or kernel is exercised.

#![allow(dead_code)]

pub struct Reduced {
    pub n: usize,
    pub amps: Vec<f64>,
}

pub struct Trace {
    /// `P(C = 1, fA = 1)` right after the skip condition is computed, per iteration.
    pub skip: Vec<f64>,
    /// `P(fA = 1)` and `P(fB = 1)` at the end of iterations `0..=k`.
    pub fa_end: Vec<f64>,
    pub fb_end: Vec<f64>,
    pub last: Reduced,
}

impl Reduced {
    fn xa(&self, i: usize) -> u64 {
        ((i >> 1) & ((1 << self.n) - 1)) as u64
    }
    fn xb(&self, i: usize) -> u64 {
        ((i >> (1 + self.n)) & ((1 << self.n) - 1)) as u64
    }
    pub fn c(&self, i: usize) -> bool {
        i & 1 == 1
    }
    pub fn fa_bit(&self) -> usize {
        1 << (1 + 2 * self.n)
    }
    pub fn fb_bit(&self) -> usize {
        1 << (2 + 2 * self.n)
    }
    pub fn data_of(&self, i: usize) -> usize {
        (i >> 1) & ((1 << (2 * self.n)) - 1)
    }

    fn prob(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a * a)
            .sum()
    }

    fn phase_where(&mut self, pred: impl Fn(&Self, usize) -> bool) {
        for i in 0..self.amps.len() {
            if pred(self, i) {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    fn toggle_where(&mut self, bit: usize, pred: impl Fn(&Self, usize) -> bool) {
        for i in 0..self.amps.len() {
            if i & bit == 0 && pred(self, i) {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// `I - 2|s><s|` on the joint `2n`-bit data register.
    fn diffuse(&mut self) {
        let data_mask = ((1usize << (2 * self.n)) - 1) << 1;
        let dim = (1usize << (2 * self.n)) as f64;
        for rest in 0..self.amps.len() {
            if rest & data_mask != 0 {
                continue;
            }
            let mean: f64 = (0..1usize << (2 * self.n))
                .map(|d| self.amps[rest | d << 1])
                .sum::<f64>()
                / dim;
            for d in 0..1usize << (2 * self.n) {
                let i = rest | d << 1;
                self.amps[i] -= 2.0 * mean;
            }
        }
    }
}

/// Runs `k` iterations. With `qsg = false` the control stays 0 and nothing is skipped.
pub fn reference(n: usize, k: usize, oa: u64, ob: u64, qsg: bool) -> Trace {
    let width = 2 * n + 3;
    let mut s = Reduced {
        n,
        amps: vec![0.0; 1 << width],
    };
    let data = 1usize << (2 * n);
    let branches: Vec<usize> = if qsg { vec![0, 1] } else { vec![0] };
    let amp = 1.0 / ((data * branches.len()) as f64).sqrt();
    for d in 0..data {
        for &c in &branches {
            s.amps[c | d << 1] = amp;
        }
    }
    let (fa, fb) = (s.fa_bit(), s.fb_bit());
    let mut trace = Trace {
        skip: vec![],
        fa_end: vec![],
        fb_end: vec![],
        last: Reduced { n, amps: vec![] },
    };
    let record = |s: &Reduced, t: &mut Trace| {
        t.fa_end.push(s.prob(|i| i & fa != 0));
        t.fb_end.push(s.prob(|i| i & fb != 0));
    };
    record(&s, &mut trace);
    for _ in 0..k {
        s.phase_where(|s, i| s.xa(i) == oa);
        s.toggle_where(fa, |s, i| s.xa(i) == oa);
        let skipped = |s: &Reduced, i: usize| s.c(i) && i & fa != 0;
        trace.skip.push(s.prob(|i| skipped(&s, i)));
        s.phase_where(|s, i| !skipped(s, i) && s.xb(i) == ob);
        s.toggle_where(fb, |s, i| s.xb(i) == ob);
        s.diffuse();
        record(&s, &mut trace);
    }
    trace.last = s;
    trace
}

/// `2k - sum_t P(skip at t) / P(C = 1)`.
pub fn reference_ub(n: usize, k: usize, oa: u64, ob: u64) -> f64 {
    let t = reference(n, k, oa, ob, true);
    2.0 * k as f64 - t.skip.iter().sum::<f64>() / 0.5
}
