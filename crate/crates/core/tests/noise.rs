use qsg_core::metrics::{p_succ, FA_BIT, FB_BIT};
use qsg_core::{
    build, sample_shots, Circuit, ExperimentConfig, Gate, NoiseConfig, SuccessRule, Variant,
};

fn within_3_sigma(count: u64, shots: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / shots as f64).sqrt();
    (count as f64 / shots as f64 - p).abs() <= 3.0 * sigma
}

fn single(gates: Vec<Gate>, width: usize, measured: &[usize]) -> Circuit {
    let mut c = Circuit::new(width).unwrap();
    c.extend(gates).unwrap();
    for &q in measured {
        c.measure(q, format!("q{q}")).unwrap();
    }
    c
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn zero_noise_matches_noiseless_distribution() {
    let cfg = ExperimentConfig::new(2, 1, 1, Variant::QsgSwapout).unwrap();
    let circuit = build(&cfg).unwrap();
    let (state, _) = circuit.simulate().unwrap();
    let expected = state.marginal(&circuit.measured_qubits());
    let shots = 100_000;
    let result = sample_shots(&circuit, &NoiseConfig::ideal(shots, 11)).unwrap();
    assert_eq!(result.error_free_shots, shots);
    let chi2: f64 = expected
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(o, &p)| {
            let e = p * shots as f64;
            (result.histogram.count(o) as f64 - e).powi(2) / e
        })
        .sum();
    // 99.9% quantile of chi-squared with 3 degrees of freedom.
    assert!(chi2 < 16.27, "chi2 = {chi2}");
    for (o, &p) in expected.iter().enumerate() {
        if p == 0.0 {
            assert_eq!(result.histogram.count(o), 0);
        }
    }
}

#[test]
fn readout_flip_half_on_one() {
    let c = single(vec![Gate::x(0)], 1, &[0]);
    let shots = 20_000;
    let noise = NoiseConfig {
        p1: 0.0,
        p2: 0.0,
        p_ro: 0.5,
        shots,
        seed: 3,
    };
    let h = sample_shots(&c, &noise).unwrap().histogram;
    assert!(within_3_sigma(h.count(1), shots, 0.5), "{}", h.count(1));
}

#[test]
fn full_depolarizing_after_hadamard_is_uniform() {
    let c = single(vec![Gate::h(0)], 1, &[0]);
    let shots = 20_000;
    let noise = NoiseConfig {
        p1: 1.0,
        p2: 0.0,
        p_ro: 0.0,
        shots,
        seed: 5,
    };
    let r = sample_shots(&c, &noise).unwrap();
    assert_eq!(r.error_free_shots, 0);
    assert!(within_3_sigma(r.histogram.count(1), shots, 0.5));
}

#[test]
fn single_qubit_faults_are_uniform_paulis() {
    // After X: an X or Y fault returns |0>, a Z fault keeps |1>.
    let c = single(vec![Gate::x(0)], 1, &[0]);
    let shots = 30_000;
    let noise = NoiseConfig {
        p1: 1.0,
        p2: 0.0,
        p_ro: 0.0,
        shots,
        seed: 9,
    };
    let h = sample_shots(&c, &noise).unwrap().histogram;
    assert!(
        within_3_sigma(h.count(1), shots, 1.0 / 3.0),
        "{}",
        h.count(1)
    );
}

#[test]
fn two_qubit_faults_are_uniform_over_fifteen_paulis() {
    let c = single(vec![Gate::x(0), Gate::cx(0, 1)], 2, &[0, 1]);
    let shots = 30_000;
    let noise = NoiseConfig {
        p1: 0.0,
        p2: 1.0,
        p_ro: 0.0,
        shots,
        seed: 13,
    };
    let h = sample_shots(&c, &noise).unwrap().histogram;
    // Outcome 0b11 survives iff neither qubit picks up an X-type factor.
    for (outcome, p) in [
        (0b11, 3.0 / 15.0),
        (0b10, 4.0 / 15.0),
        (0b01, 4.0 / 15.0),
        (0b00, 4.0 / 15.0),
    ] {
        assert!(
            within_3_sigma(h.count(outcome), shots, p),
            "{outcome:#b}: {}",
            h.count(outcome)
        );
    }
}

#[test]
fn identical_across_runs_and_thread_counts() {
    let cfg = ExperimentConfig::new(2, 2, 3, Variant::QsgControlled).unwrap();
    let circuit = build(&cfg).unwrap();
    let noise = NoiseConfig {
        p1: 0.01,
        p2: 0.03,
        p_ro: 0.02,
        shots: 3000,
        seed: 21,
    };
    let base = sample_shots(&circuit, &noise).unwrap();
    for threads in [1, 2, 7] {
        let r = in_pool(threads, || sample_shots(&circuit, &noise).unwrap());
        assert_eq!(r.histogram, base.histogram, "{threads} threads");
        assert_eq!(r.probes, base.probes, "{threads} threads");
    }
    let other = sample_shots(&circuit, &NoiseConfig { seed: 22, ..noise }).unwrap();
    assert_ne!(other.histogram, base.histogram);
}

#[test]
fn zero_shots_is_a_config_error() {
    let c = single(vec![Gate::h(0)], 1, &[0]);
    let err = sample_shots(&c, &NoiseConfig::ideal(0, 1)).unwrap_err();
    assert!(matches!(err, qsg_core::Error::Config(_)), "{err}");
}

#[test]
fn noisy_probes_stay_probabilities() {
    let cfg = ExperimentConfig::new(2, 2, 2, Variant::QsgSwapout).unwrap();
    let r = sample_shots(
        &build(&cfg).unwrap(),
        &NoiseConfig {
            p1: 0.05,
            p2: 0.1,
            p_ro: 0.1,
            shots: 500,
            seed: 2,
        },
    )
    .unwrap();
    assert!(r.probes.values().all(|p| (0.0..=1.0 + 1e-12).contains(p)));
    assert_eq!(r.histogram.shots(), 500);
    assert_eq!(
        r.histogram.count_with(FA_BIT | FB_BIT),
        r.histogram.count(0b11)
    );
    assert_eq!(
        r.histogram.count_with(FB_BIT),
        r.histogram.count(0b10) + r.histogram.count(0b11)
    );
}

fn degradation(rule: SuccessRule) -> Vec<(f64, f64, f64)> {
    let cfg = ExperimentConfig::new(4, 3, 30, Variant::Fixed).unwrap();
    let circuit = build(&cfg).unwrap();
    [0.0, 1e-4, 1e-3]
        .into_iter()
        .map(|p2| {
            let noise = NoiseConfig {
                p1: 0.0,
                p2,
                p_ro: 0.0,
                shots: 4000,
                seed: 17,
            };
            let (p, se) = p_succ(&sample_shots(&circuit, &noise).unwrap().histogram, rule).unwrap();
            (p2, p, se)
        })
        .collect()
}

fn assert_non_increasing(rule: SuccessRule) {
    let rows = degradation(rule);
    for (p2, p, se) in &rows {
        println!("{rule} p2={p2}: P_succ = {p:.4} +- {se:.4}");
    }
    for (i, &(p2a, pa, sa)) in rows.iter().enumerate() {
        for &(p2b, pb, sb) in &rows[i + 1..] {
            let slack = 3.0 * (sa * sa + sb * sb).sqrt();
            assert!(
            pb <= pa + slack,
            "{rule}: P_succ rises from {pa:.4} (p2={p2a}) to {pb:.4} (p2={p2b}), beyond 3 sigma = {slack:.4}"
        );
        }
    }
}

/// Under the default rule the marked-state probability is small at k = 3,
/// so depolarization pushes it up toward 1/4.
#[test]
fn fixed_success_degrades_with_two_qubit_noise() {
    assert_non_increasing(SuccessRule::default());
}

#[test]
fn fixed_fb_only_success_degrades_with_two_qubit_noise() {
    assert_non_increasing(SuccessRule::FbOnly);
}
