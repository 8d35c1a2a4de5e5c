//! Correlator estimation from Hadamard-test runs, measurement-budget and
//! deviation bounds, and the χ²/nssd quality metrics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuits::{
    hadamard_test_circuit, trotter_step, trotter_unitary, Circuit, MeasureBasis, TrotterOrdering,
};
use crate::error::CoreError;
use crate::mitigation::{
    calibrate_readout, fold_circuit, mitigate_readout, zne_extrapolate, MitigationConfig,
    ValueWithSigma,
};
use crate::model::{correlator_terms, ModelParams, MomentumVector};
use crate::noisy_sim::{
    run_ideal, run_noisy, sample_ancilla, DensityMatrix, NoiseModel, StateRef, StateVector,
};
use crate::oracle::{diagonalize, CorrelatorEngine};
use crate::pauli::QubitOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Bare,
    Mitigated,
    ExactTrotter,
    Exact,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CorrelatorSeries {
    pub q: MomentumVector,
    pub ordering: TrotterOrdering,
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
    /// (σ_re, σ_im) per point; zero for exact variants.
    pub sigmas: Vec<(f64, f64)>,
    pub variant: Variant,
}

impl CorrelatorSeries {
    fn check(&self) -> Result<(), CoreError> {
        if self.taus.len() != self.values.len() || self.taus.len() != self.sigmas.len() {
            return Err(CoreError::Internal("ragged correlator series".into()));
        }
        if self.sigmas.iter().any(|&(a, b)| a < 0.0 || b < 0.0) {
            return Err(CoreError::Internal("negative σ in series".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct QualityReport {
    /// (re, im)
    pub chi2: (f64, f64),
    /// (re, im)
    pub nssd: (f64, f64),
    pub r: f64,
    pub n_points: usize,
}

/// splitmix64 step, used to derive independent per-task seeds.
fn mix_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

enum Backend {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

/// Measure the circuit-level ancilla expectation ⟨Z⟩ in the rotated basis.
fn measure(
    circuit: &Circuit,
    init: &StateVector,
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ValueWithSigma, CoreError> {
    let backend = if noise.p1 == 0.0 && noise.p2 == 0.0 {
        Backend::Pure(run_ideal(circuit, init)?)
    } else {
        Backend::Mixed(run_noisy(circuit, &DensityMatrix::from_pure(init), noise)?)
    };
    let state = match &backend {
        Backend::Pure(sv) => StateRef::Pure(sv),
        Backend::Mixed(dm) => StateRef::Mixed(dm),
    };
    // basis rotation is already part of the circuit; sample in Z
    let rec = sample_ancilla(&state, MeasureBasis::Z, shots, noise, seed)?;
    Ok(ValueWithSigma::new(rec.expectation_z(), rec.sigma_z()))
}

/// Hadamard-test assembly of C̃(τ, q) = Σ α_{i'} α_i s_{i',i}(τ), bare
/// and readout+ZNE-mitigated, from seeded shot sampling.
///
/// `shots_per_point` is the budget M per (term, basis, scale);
/// `init_state` is the 16-dim target register state.
#[allow(clippy::too_many_arguments)]
pub fn estimate_correlator(
    q: MomentumVector,
    ordering: TrotterOrdering,
    taus: &[f64],
    shots_per_point: u64,
    noise: &NoiseModel,
    mitigation: &MitigationConfig,
    init_state: &[Complex64],
    params: &ModelParams,
    seed: u64,
) -> Result<(CorrelatorSeries, CorrelatorSeries), CoreError> {
    if taus.is_empty() {
        return Err(CoreError::Invalid("empty τ grid".into()));
    }
    if shots_per_point == 0 {
        return Err(CoreError::Invalid("shots must be ≥ 1".into()));
    }
    noise.validate()?;
    mitigation.validate()?;
    let terms = correlator_terms(q, params);
    let init = StateVector::with_targets(init_state)?;
    let empty_prep = Circuit::new(4);

    let confusion = calibrate_readout(
        noise,
        mitigation.readout_calibration_shots,
        mix_seed(seed, u64::MAX),
    )?;

    let mut bare_vals = Vec::with_capacity(taus.len());
    let mut bare_sig = Vec::with_capacity(taus.len());
    let mut mit_vals = Vec::with_capacity(taus.len());
    let mut mit_sig = Vec::with_capacity(taus.len());

    for (ti, &tau) in taus.iter().enumerate() {
        let evo = trotter_step(ordering, tau, params);
        let mut bare = Complex64::new(0.0, 0.0);
        let mut bare_var = (0.0, 0.0);
        let mut mit = Complex64::new(0.0, 0.0);
        let mut mit_var = (0.0, 0.0);
        for (ki, term) in terms.iter().enumerate() {
            if term.left.is_identity() && term.right.is_identity() {
                // s ≡ 1: no circuit, no variance
                bare += term.weight;
                mit += term.weight;
                continue;
            }
            let mut s_bare = [0.0f64; 2];
            let mut s_mit = [ValueWithSigma::new(0.0, 0.0); 2];
            for (bi, basis) in [MeasureBasis::X, MeasureBasis::Y].into_iter().enumerate() {
                let base = hadamard_test_circuit(&term.right, &term.left, &evo, &empty_prep, basis)?;
                let mut per_scale = Vec::with_capacity(mitigation.scales.len());
                for (si, &scale) in mitigation.scales.iter().enumerate() {
                    let circuit =
                        if scale == 1 { base.clone() } else { fold_circuit(&base, scale)? };
                    let task = mix_seed(
                        seed,
                        (((ti * terms.len() + ki) * 2 + bi) * mitigation.scales.len() + si) as u64,
                    );
                    let raw = measure(&circuit, &init, shots_per_point, noise, task)?;
                    if scale == 1 {
                        s_bare[bi] = raw.value;
                        let w2 = term.weight * term.weight * raw.sigma * raw.sigma;
                        if bi == 0 {
                            bare_var.0 += w2;
                        } else {
                            bare_var.1 += w2;
                        }
                    }
                    let rec = crate::noisy_sim::ShotRecord {
                        shots: shots_per_point,
                        counts: counts_from(raw.value, shots_per_point),
                    };
                    per_scale.push((scale, mitigate_readout(&rec, &confusion)?));
                }
                s_mit[bi] = zne_extrapolate(&per_scale, mitigation.extrapolant)?;
            }
            bare += term.weight * Complex64::new(s_bare[0], -s_bare[1]);
            mit += term.weight * Complex64::new(s_mit[0].value, -s_mit[1].value);
            mit_var.0 += term.weight * term.weight * s_mit[0].sigma * s_mit[0].sigma;
            mit_var.1 += term.weight * term.weight * s_mit[1].sigma * s_mit[1].sigma;
        }
        bare_vals.push(bare);
        bare_sig.push((bare_var.0.sqrt(), bare_var.1.sqrt()));
        mit_vals.push(mit);
        mit_sig.push((mit_var.0.sqrt(), mit_var.1.sqrt()));
    }

    let bare = CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values: bare_vals,
        sigmas: bare_sig,
        variant: Variant::Bare,
    };
    let mitigated = CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values: mit_vals,
        sigmas: mit_sig,
        variant: Variant::Mitigated,
    };
    bare.check()?;
    mitigated.check()?;
    Ok((bare, mitigated))
}

/// Hadamard-test estimate of C(τ, q₀₁) from the T-connectivity reference
/// circuits. The model and its ground state are invariant under the
/// species exchange (1↔3, 2↔4), so s₃₃ = s₁₁ and s₃₁ = s₁₃ and the two
/// lowered cells ⟨Z₁(τ)Z₁⟩, ⟨Z₁(τ)Z₃⟩ cover all four ordered pairs:
/// C = (e_A² + e_B²)·s₁₁ + 2e_Ae_B·s₁₃.
#[allow(clippy::too_many_arguments)]
pub fn estimate_correlator_native(
    ordering: TrotterOrdering,
    taus: &[f64],
    shots_per_point: u64,
    noise: &NoiseModel,
    mitigation: &MitigationConfig,
    init_state: &[Complex64],
    params: &ModelParams,
    seed: u64,
) -> Result<(CorrelatorSeries, CorrelatorSeries), CoreError> {
    if taus.is_empty() || shots_per_point == 0 {
        return Err(CoreError::Invalid("empty τ grid or zero shots".into()));
    }
    noise.validate()?;
    mitigation.validate()?;
    let q = MomentumVector::new(0, 1);
    let rows = [
        (1usize, params.e_a * params.e_a + params.e_b * params.e_b),
        (2usize, 2.0 * params.e_a * params.e_b),
    ];
    let init = StateVector::with_targets(init_state)?;
    let confusion = calibrate_readout(
        noise,
        mitigation.readout_calibration_shots,
        mix_seed(seed, u64::MAX),
    )?;
    let mut bare_vals = Vec::new();
    let mut bare_sig = Vec::new();
    let mut mit_vals = Vec::new();
    let mut mit_sig = Vec::new();
    for (ti, &tau) in taus.iter().enumerate() {
        let mut bare = Complex64::new(0.0, 0.0);
        let mut bare_var = (0.0, 0.0);
        let mut mit = Complex64::new(0.0, 0.0);
        let mut mit_var = (0.0, 0.0);
        for (ki, &(row, w)) in rows.iter().enumerate() {
            let mut s_bare = [0.0f64; 2];
            let mut s_mit = [ValueWithSigma::new(0.0, 0.0); 2];
            for (bi, basis) in [MeasureBasis::X, MeasureBasis::Y].into_iter().enumerate() {
                let base = crate::circuits::reference::table_circuit(ordering, row, tau, params, basis)?;
                let mut per_scale = Vec::new();
                for (si, &scale) in mitigation.scales.iter().enumerate() {
                    let circuit =
                        if scale == 1 { base.clone() } else { fold_circuit(&base, scale)? };
                    let task = mix_seed(
                        seed,
                        (((ti * rows.len() + ki) * 2 + bi) * mitigation.scales.len() + si) as u64,
                    );
                    let raw = measure(&circuit, &init, shots_per_point, noise, task)?;
                    if scale == 1 {
                        s_bare[bi] = raw.value;
                        let w2 = w * w * raw.sigma * raw.sigma;
                        if bi == 0 {
                            bare_var.0 += w2;
                        } else {
                            bare_var.1 += w2;
                        }
                    }
                    let rec = crate::noisy_sim::ShotRecord {
                        shots: shots_per_point,
                        counts: counts_from(raw.value, shots_per_point),
                    };
                    per_scale.push((scale, mitigate_readout(&rec, &confusion)?));
                }
                s_mit[bi] = zne_extrapolate(&per_scale, mitigation.extrapolant)?;
            }
            bare += w * Complex64::new(s_bare[0], -s_bare[1]);
            mit += w * Complex64::new(s_mit[0].value, -s_mit[1].value);
            mit_var.0 += w * w * s_mit[0].sigma * s_mit[0].sigma;
            mit_var.1 += w * w * s_mit[1].sigma * s_mit[1].sigma;
        }
        bare_vals.push(bare);
        bare_sig.push((bare_var.0.sqrt(), bare_var.1.sqrt()));
        mit_vals.push(mit);
        mit_sig.push((mit_var.0.sqrt(), mit_var.1.sqrt()));
    }
    let bare = CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values: bare_vals,
        sigmas: bare_sig,
        variant: Variant::Bare,
    };
    let mitigated = CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values: mit_vals,
        sigmas: mit_sig,
        variant: Variant::Mitigated,
    };
    bare.check()?;
    mitigated.check()?;
    Ok((bare, mitigated))
}

fn counts_from(expectation_z: f64, shots: u64) -> std::collections::BTreeMap<String, u64> {
    // reconstruct the count pair from ⟨Z⟩ = (n₀ − n₁)/M
    let n0 = ((expectation_z + 1.0) / 2.0 * shots as f64).round() as u64;
    let mut m = std::collections::BTreeMap::new();
    m.insert("0".to_string(), n0.min(shots));
    m.insert("1".to_string(), shots - n0.min(shots));
    m
}

/// Infinite-shot, noiseless series through the dense single-step Trotter
/// unitary: C̃(τ) = Σ α_{i'} α_i ⟨ψ|V† P_{i'} V P_i|ψ⟩.
pub fn exact_trotter_series(
    q: MomentumVector,
    ordering: TrotterOrdering,
    taus: &[f64],
    init_state: &[Complex64],
    params: &ModelParams,
) -> Result<CorrelatorSeries, CoreError> {
    if init_state.len() != 16 {
        return Err(CoreError::DimensionMismatch(16, init_state.len()));
    }
    let terms = correlator_terms(q, params);
    let psi = nalgebra::DVector::from_column_slice(init_state);
    let mut values = Vec::with_capacity(taus.len());
    for &tau in taus {
        let v = trotter_unitary(ordering, tau, params);
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &terms {
            let pl = term.left.to_matrix();
            let pr = term.right.to_matrix();
            let s = (psi.adjoint() * (v.adjoint() * pl * &v * pr * &psi))[(0, 0)];
            acc += term.weight * s;
        }
        values.push(acc);
    }
    Ok(CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values,
        sigmas: vec![(0.0, 0.0); taus.len()],
        variant: Variant::ExactTrotter,
    })
}

/// Exact-dynamics series through the eigenbasis engine.
pub fn exact_series(
    q: MomentumVector,
    ordering: TrotterOrdering,
    taus: &[f64],
    init_state: &[Complex64],
    params: &ModelParams,
) -> Result<CorrelatorSeries, CoreError> {
    let h = crate::model::build_qubit_hamiltonian(params);
    let h_i = crate::model::build_excitation(q, params);
    let eigs = diagonalize(&h)?;
    let engine = CorrelatorEngine::new(&eigs, &h_i, init_state)?;
    let values: Vec<Complex64> = taus.iter().map(|&t| engine.eval(t)).collect();
    Ok(CorrelatorSeries {
        q,
        ordering,
        taus: taus.to_vec(),
        values,
        sigmas: vec![(0.0, 0.0); taus.len()],
        variant: Variant::Exact,
    })
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct MeasurementBudget {
    /// N = ceil((L²/ε²)·max_k (Σ_i α_i²)²)
    pub tight: u64,
    /// looser (L⁴/ε²)·max|α|⁴ form
    pub loose: u64,
    /// uniform per-(pair, basis) allocation M = N/L²
    pub per_term: u64,
    pub n_terms: usize,
}

/// Total measurement count guaranteeing statistical precision ε on every
/// C̃(τ, q_k), uniform allocation over the L² ordered pairs.
pub fn measurement_budget(
    epsilon: f64,
    excitations: &[Vec<f64>],
) -> Result<MeasurementBudget, CoreError> {
    if epsilon <= 0.0 {
        return Err(CoreError::Invalid(format!("precision target ε = {epsilon}")));
    }
    if excitations.is_empty() || excitations.iter().any(|a| a.is_empty()) {
        return Err(CoreError::Invalid("empty excitation coefficient list".into()));
    }
    let l = excitations.iter().map(|a| a.len()).max().unwrap();
    let max_sq: f64 = excitations
        .iter()
        .map(|a| a.iter().map(|x| x * x).sum::<f64>())
        .fold(0.0, f64::max);
    let max_abs: f64 = excitations
        .iter()
        .flat_map(|a| a.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let l2 = (l * l) as f64;
    let tight = (l2 / (epsilon * epsilon) * max_sq * max_sq).ceil() as u64;
    let loose = (l2 * l2 / (epsilon * epsilon) * max_abs.powi(4)).ceil() as u64;
    Ok(MeasurementBudget { tight, loose, per_term: tight / (l * l) as u64, n_terms: l })
}

/// ‖H̄_I‖₁²·(ε(τ) + √(1−F)) — the rigorous deviation bound combining
/// Trotter error and initial-state infidelity.
pub fn deviation_bound(
    trotter_eps: f64,
    fidelity: f64,
    excitation: &QubitOperator,
) -> Result<f64, CoreError> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(CoreError::Invalid(format!("fidelity {fidelity} out of [0,1]")));
    }
    if trotter_eps < 0.0 {
        return Err(CoreError::Invalid(format!("negative Trotter error {trotter_eps}")));
    }
    let one_norm = excitation.coeff_one_norm();
    Ok(one_norm * one_norm * (trotter_eps + (1.0 - fidelity).sqrt()))
}

/// ε(τ) = 2‖V(τ) − e^{−iHτ}‖ (dense operator norm), the single-step
/// Trotter error entering the deviation bound.
pub fn trotter_epsilon(
    ordering: TrotterOrdering,
    tau: f64,
    params: &ModelParams,
) -> Result<f64, CoreError> {
    let h = crate::model::build_qubit_hamiltonian(params);
    let eigs = diagonalize(&h)?;
    let dim = eigs.dim();
    let mut exact = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &e) in eigs.energies.iter().enumerate() {
        exact[(i, i)] = Complex64::from_polar(1.0, -e * tau);
    }
    let exact = &eigs.vectors * exact * eigs.vectors.adjoint();
    let diff = trotter_unitary(ordering, tau, params) - exact;
    Ok(2.0 * operator_norm(&diff))
}

fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let sym = (&gram + gram.adjoint()).scale(0.5);
    nalgebra::SymmetricEigen::new(sym).eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l)).sqrt()
}

/// χ² against the experimental σ and the normalized sum of squared
/// deviations with relative-error parameter r, real and imaginary parts
/// separately. `denominator_on_experiment` flips the nssd normalization
/// from the reference curve onto the experimental one.
pub fn quality_metrics(
    experiment: &CorrelatorSeries,
    reference: &CorrelatorSeries,
    r: f64,
    denominator_on_experiment: bool,
) -> Result<QualityReport, CoreError> {
    if r <= 0.0 {
        return Err(CoreError::Invalid(format!("relative-error parameter r = {r}")));
    }
    experiment.check()?;
    reference.check()?;
    if experiment.taus.len() != reference.taus.len()
        || experiment
            .taus
            .iter()
            .zip(&reference.taus)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(CoreError::Invalid("τ grids do not match".into()));
    }
    let n = experiment.taus.len();
    let mut chi2 = (0.0, 0.0);
    let mut num = (0.0, 0.0);
    let mut den = (0.0, 0.0);
    for i in 0..n {
        let d_re = experiment.values[i].re - reference.values[i].re;
        let d_im = experiment.values[i].im - reference.values[i].im;
        let (s_re, s_im) = experiment.sigmas[i];
        if s_re <= 0.0 || s_im <= 0.0 {
            return Err(CoreError::Invalid("χ² needs strictly positive σ".into()));
        }
        chi2.0 += d_re * d_re / (s_re * s_re);
        chi2.1 += d_im * d_im / (s_im * s_im);
        num.0 += d_re * d_re;
        num.1 += d_im * d_im;
        let base = if denominator_on_experiment { experiment } else { reference };
        den.0 += (r * base.values[i].re).powi(2);
        den.1 += (r * base.values[i].im).powi(2);
    }
    let nssd = |n: f64, d: f64| if d == 0.0 { f64::INFINITY } else { (n / d).sqrt() };
    Ok(QualityReport {
        chi2,
        nssd: (nssd(num.0, den.0), nssd(num.1, den.1)),
        r,
        n_points: n,
    })
}
