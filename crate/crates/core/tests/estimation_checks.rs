use num_complex::Complex64;

use nucorr_core::estimation::{
    deviation_bound, estimate_correlator, exact_series, exact_trotter_series, measurement_budget,
    quality_metrics, trotter_epsilon, Variant,
};
use nucorr_core::mitigation::MitigationConfig;
use nucorr_core::model::{build_excitation, build_qubit_hamiltonian, correlator_terms};
use nucorr_core::noisy_sim::NoiseModel;
use nucorr_core::oracle::{diagonalize, sum_rule};
use nucorr_core::{ModelParams, MomentumVector, TrotterOrdering};

fn ground(p: &ModelParams) -> Vec<Complex64> {
    diagonalize(&build_qubit_hamiltonian(p)).unwrap().ground_state()
}

#[test]
fn zero_momentum_series_is_constant_with_zero_variance() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let taus = [0.0, 0.1, 0.2];
    let (bare, mit) = estimate_correlator(
        MomentumVector::new(0, 0),
        TrotterOrdering::A2,
        &taus,
        100,
        &NoiseModel::default(),
        &MitigationConfig::default(),
        &psi,
        &p,
        3,
    )
    .unwrap();
    let want = (p.e_a + p.e_b).powi(2);
    for series in [&bare, &mit] {
        for (v, s) in series.values.iter().zip(&series.sigmas) {
            assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-14);
            assert_eq!(*s, (0.0, 0.0), "identity terms must not consume shots");
        }
    }
}

#[test]
fn b_type_sum_rule_is_exact_at_tau_zero() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let eigs = diagonalize(&build_qubit_hamiltonian(&p)).unwrap();
    for q in [MomentumVector::new(0, 1), MomentumVector::new(1, 1)] {
        let h_i = build_excitation(q, &p);
        let want = sum_rule(&eigs, &h_i, &psi, 0).unwrap();
        for ordering in [TrotterOrdering::B1, TrotterOrdering::B2] {
            let series = exact_trotter_series(q, ordering, &[0.0], &psi, &p).unwrap();
            assert!(
                (series.values[0].re - want).abs() < 1e-10 && series.values[0].im.abs() < 1e-10,
                "{ordering:?} q={q:?}: {} vs ⟨H_I²⟩ = {want}",
                series.values[0]
            );
        }
    }
}

#[test]
fn sampled_estimate_tracks_the_dense_trotter_oracle() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let q = MomentumVector::new(0, 1);
    let taus = [0.0, 0.1, 0.25];
    let reference = exact_trotter_series(q, TrotterOrdering::A2, &taus, &psi, &p).unwrap();
    let (bare, _) = estimate_correlator(
        q,
        TrotterOrdering::A2,
        &taus,
        100_000,
        &NoiseModel::noiseless(),
        &MitigationConfig::default(),
        &psi,
        &p,
        17,
    )
    .unwrap();
    assert_eq!(bare.variant, Variant::Bare);
    for i in 0..taus.len() {
        let (s_re, s_im) = bare.sigmas[i];
        let d = bare.values[i] - reference.values[i];
        assert!(
            d.re.abs() < 4.0 * s_re.max(1e-6) && d.im.abs() < 4.0 * s_im.max(1e-6),
            "τ = {}: deviation {d} vs σ = ({s_re:.2e}, {s_im:.2e})",
            taus[i]
        );
    }
    // each |s| ≤ 1 before mitigation, so |C̃| ≤ Σ|w|
    let wsum: f64 = correlator_terms(q, &p).iter().map(|t| t.weight.abs() * 2f64.sqrt()).sum();
    for v in &bare.values {
        assert!(v.norm() <= wsum + 1e-9);
    }
}

#[test]
fn trotter_series_converges_to_exact_dynamics() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let q = MomentumVector::new(0, 1);
    let taus = [0.05];
    let exact = exact_series(q, TrotterOrdering::A2, &taus, &psi, &p).unwrap();
    let d_of = |tau_scale: f64| {
        let scaled = [taus[0] * tau_scale];
        let tr = exact_trotter_series(q, TrotterOrdering::A2, &scaled, &psi, &p).unwrap();
        let ex = exact_series(q, TrotterOrdering::A2, &scaled, &psi, &p).unwrap();
        (tr.values[0] - ex.values[0]).norm()
    };
    assert_eq!(exact.variant, Variant::Exact);
    // first-order product formula: correlator deviation shrinks ≥ ×3
    // when τ halves (O(τ²) per step)
    assert!(d_of(1.0) / d_of(0.5) > 3.0);
}

#[test]
fn measurement_budget_matches_closed_forms() {
    let b = measurement_budget(0.01, &[vec![1.0, 1.0]]).unwrap();
    assert_eq!(b.tight, 160_000);
    assert_eq!(b.per_term, 40_000);
    let single = measurement_budget(0.02, &[vec![1.0]]).unwrap();
    assert_eq!(single.tight, 2_500);
    assert_eq!(single.tight, (1.0f64 / 0.02 / 0.02).round() as u64);
    // loose form dominates the tight one
    let both = measurement_budget(0.05, &[vec![0.3, 1.0], vec![0.7, 0.7]]).unwrap();
    assert!(both.loose >= both.tight);
    assert!(measurement_budget(0.0, &[vec![1.0]]).is_err());
    assert!(measurement_budget(0.1, &[]).is_err());
}

#[test]
fn deviation_bound_closed_forms_and_trotter_sweep() {
    let p = ModelParams::default();
    let q = MomentumVector::new(0, 1);
    let h_i = build_excitation(q, &p);
    assert_eq!(deviation_bound(0.0, 1.0, &h_i).unwrap(), 0.0);
    let b = deviation_bound(0.0, 0.962, &h_i).unwrap();
    assert!((b - 4.0 * 0.038f64.sqrt()).abs() < 1e-12, "got {b}");
    assert!(deviation_bound(0.0, 1.5, &h_i).is_err());

    // |C − C̃| must stay below the bound with ε(τ) = 2‖V − e^{−iHτ}‖
    let psi = ground(&p);
    let taus: Vec<f64> = (0..=6).map(|i| 0.05 * i as f64).collect();
    for ordering in [TrotterOrdering::A2, TrotterOrdering::B2] {
        let tr = exact_trotter_series(q, ordering, &taus, &psi, &p).unwrap();
        let ex = exact_series(q, ordering, &taus, &psi, &p).unwrap();
        for (i, &tau) in taus.iter().enumerate() {
            let eps = trotter_epsilon(ordering, tau, &p).unwrap();
            let bound = deviation_bound(eps, 1.0, &h_i).unwrap();
            let dev = (tr.values[i] - ex.values[i]).norm();
            assert!(dev <= bound + 1e-12, "{ordering:?} τ={tau}: {dev} > {bound}");
        }
    }
}

#[test]
fn quality_metrics_closed_forms() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let q = MomentumVector::new(0, 1);
    let taus: Vec<f64> = (1..=5).map(|i| 0.05 * i as f64).collect();
    let reference = exact_series(q, TrotterOrdering::A2, &taus, &psi, &p).unwrap();
    let mut exp = reference.clone();
    exp.sigmas = vec![(0.01, 0.01); taus.len()];
    let rep = quality_metrics(&exp, &reference, 0.1, false).unwrap();
    assert_eq!(rep.chi2, (0.0, 0.0));
    assert_eq!(rep.nssd, (0.0, 0.0));

    // exp = ref·(1 + r) → nssd = 1 by construction
    let r = 0.1;
    let mut inflated = exp.clone();
    for v in inflated.values.iter_mut() {
        *v *= 1.0 + r;
    }
    let rep = quality_metrics(&inflated, &reference, r, false).unwrap();
    assert!((rep.nssd.0 - 1.0).abs() < 1e-12 && (rep.nssd.1 - 1.0).abs() < 1e-12);
    assert!(rep.chi2.0 > 0.0);

    // zero σ rejected for χ²
    let mut bad = exp.clone();
    bad.sigmas[2] = (0.0, 0.01);
    assert!(quality_metrics(&bad, &reference, r, false).is_err());
    // grid mismatch rejected
    let mut off = exp.clone();
    off.taus[0] += 1e-3;
    assert!(quality_metrics(&off, &reference, r, false).is_err());
}

#[test]
fn chi2_of_honest_gaussian_noise_has_the_right_scale() {
    use rand::{Rng, SeedableRng};
    let p = ModelParams::default();
    let psi = ground(&p);
    let q = MomentumVector::new(0, 1);
    let taus: Vec<f64> = (0..20).map(|i| 0.02 * i as f64).collect();
    let reference = exact_series(q, TrotterOrdering::A2, &taus, &psi, &p).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let sigma = 0.02;
    let mut hits = 0;
    let trials = 60;
    for _ in 0..trials {
        let mut exp = reference.clone();
        for v in exp.values.iter_mut() {
            let g = |r: &mut rand_chacha::ChaCha8Rng| {
                let (u1, u2): (f64, f64) = (r.gen(), r.gen());
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            };
            *v += Complex64::new(sigma * g(&mut rng), sigma * g(&mut rng));
        }
        exp.sigmas = vec![(sigma, sigma); taus.len()];
        let rep = quality_metrics(&exp, &reference, 0.1, false).unwrap();
        if (6.0..=40.0).contains(&rep.chi2.0) {
            hits += 1;
        }
    }
    assert!(hits as f64 >= 0.9 * trials as f64, "χ²₍₂₀₎ coverage too low: {hits}/{trials}");
}

#[test]
fn nssd_denominator_flag_flips_the_normalization() {
    let p = ModelParams::default();
    let psi = ground(&p);
    let q = MomentumVector::new(0, 1);
    let taus = [0.05, 0.1];
    let reference = exact_series(q, TrotterOrdering::A2, &taus, &psi, &p).unwrap();
    let mut exp = reference.clone();
    for v in exp.values.iter_mut() {
        *v *= 2.0;
    }
    exp.sigmas = vec![(0.01, 0.01); 2];
    let on_ref = quality_metrics(&exp, &reference, 0.1, false).unwrap();
    let on_exp = quality_metrics(&exp, &reference, 0.1, true).unwrap();
    assert!((on_ref.nssd.0 / on_exp.nssd.0 - 2.0).abs() < 1e-12);
}
