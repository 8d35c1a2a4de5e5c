//! Time-to-frequency reconstruction: two-time correlator grid, finite-
//! window Riemann-sum transform, resolution/cost accounting, and the
//! midpoint error bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuits::{hadamard_test_circuit, trotter_step, trotter_unitary, Circuit, MeasureBasis, TrotterOrdering};
use crate::error::CoreError;
use crate::noisy_sim::{ancilla_report_p0, run_noisy, DensityMatrix, NoiseModel, StateRef, StateVector};
use crate::oracle::diagonalize;
use crate::pauli::{PauliString, QubitOperator};

/// C(τ_j, t_l) on the square grid j, l ∈ −N_t..N_t, τ_j = jΔ.
#[derive(Clone, Debug)]
pub struct TwoTimeGrid {
    pub delta: f64,
    pub n_t: usize,
    /// row j (τ), column l (t)
    pub values: DMatrix<Complex64>,
    /// number of correlator evaluations performed to fill the grid
    pub evaluations: u64,
}

impl TwoTimeGrid {
    pub fn side(&self) -> usize {
        2 * self.n_t + 1
    }

    /// Half-window T = (2N_t+1)Δ/2.
    pub fn half_window(&self) -> f64 {
        self.side() as f64 * self.delta / 2.0
    }

    pub fn check(&self) -> Result<(), CoreError> {
        if self.delta <= 0.0 {
            return Err(CoreError::Invalid(format!("grid step Δ = {}", self.delta)));
        }
        if self.values.nrows() != self.side() || self.values.ncols() != self.side() {
            return Err(CoreError::Internal("two-time grid is not square".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SpectralGrid {
    pub omegas: Vec<f64>,
    pub s_values: Vec<Complex64>,
    pub resolution: f64,
}

#[derive(Clone, Debug)]
pub enum SpectralSource {
    Exact,
    Trotter { ordering: TrotterOrdering },
    Noisy { ordering: TrotterOrdering, noise: NoiseModel },
}

/// C(τ,t) = ⟨Ψ|H_I(t) H_I(t+τ)|Ψ⟩ with H_I(s) = U(s) H_I U†(s),
/// U(s) = e^{−iHs}. The t = −τ diagonal reproduces the single-time
/// correlator; eigenstate input makes the t dependence drop out.
pub fn two_time_correlator(
    h: &QubitOperator,
    h_i: &QubitOperator,
    state: &[Complex64],
    delta: f64,
    n_t: usize,
    source: &SpectralSource,
) -> Result<TwoTimeGrid, CoreError> {
    if delta <= 0.0 {
        return Err(CoreError::Invalid(format!("grid step Δ = {delta}")));
    }
    let side = 2 * n_t + 1;
    let mut values = DMatrix::<Complex64>::zeros(side, side);
    match source {
        SpectralSource::Exact => {
            let eigs = diagonalize(h)?;
            let a = eigs.vectors.adjoint() * h_i.to_matrix()? * &eigs.vectors;
            let c = DVector::from_column_slice(&eigs.coefficients_of(state));
            for (jj, j) in (-(n_t as i64)..=n_t as i64).enumerate() {
                let tau = j as f64 * delta;
                for (ll, l) in (-(n_t as i64)..=n_t as i64).enumerate() {
                    let t = l as f64 * delta;
                    // Σ c̄_m e^{−iE_m t} A_mn e^{−iE_n τ} A_nk e^{iE_k(t+τ)} c_k
                    let right = DVector::from_iterator(
                        eigs.dim(),
                        c.iter()
                            .zip(&eigs.energies)
                            .map(|(ck, &e)| ck * Complex64::from_polar(1.0, e * (t + tau))),
                    );
                    let mid = &a * right;
                    let mid = DVector::from_iterator(
                        eigs.dim(),
                        mid.iter()
                            .zip(&eigs.energies)
                            .map(|(x, &e)| x * Complex64::from_polar(1.0, -e * tau)),
                    );
                    let v = &a * mid;
                    values[(jj, ll)] = c
                        .iter()
                        .zip(v.iter())
                        .zip(&eigs.energies)
                        .map(|((cm, vm), &e)| cm.conj() * Complex64::from_polar(1.0, -e * t) * vm)
                        .sum();
                }
            }
        }
        SpectralSource::Trotter { ordering } => {
            let hi = h_i.to_matrix()?;
            let psi = DVector::from_column_slice(state);
            let params = ordering_params(h)?;
            for (jj, j) in (-(n_t as i64)..=n_t as i64).enumerate() {
                let tau = j as f64 * delta;
                for (ll, l) in (-(n_t as i64)..=n_t as i64).enumerate() {
                    let t = l as f64 * delta;
                    // circuit form: evolve to t, then one V(τ) step —
                    // ⟨Ψ|V(t) H_I V(τ) H_I V(τ)† V(t)†|Ψ⟩
                    let vt = trotter_unitary(*ordering, t, &params);
                    let vtau = trotter_unitary(*ordering, tau, &params);
                    let op = &vt * &hi * &vtau * &hi * vtau.adjoint() * vt.adjoint();
                    values[(jj, ll)] = (psi.adjoint() * op * &psi)[(0, 0)];
                }
            }
        }
        SpectralSource::Noisy { ordering, noise } => {
            let params = ordering_params(h)?;
            let terms = pauli_pairs(h_i)?;
            for (jj, j) in (-(n_t as i64)..=n_t as i64).enumerate() {
                let tau = j as f64 * delta;
                for (ll, l) in (-(n_t as i64)..=n_t as i64).enumerate() {
                    let t = l as f64 * delta;
                    values[(jj, ll)] =
                        noisy_point(&terms, state, tau, t, *ordering, &params, noise)?;
                }
            }
        }
    }
    let grid =
        TwoTimeGrid { delta, n_t, values, evaluations: (side * side) as u64 };
    grid.check()?;
    Ok(grid)
}

/// Recover the model parameters a Hamiltonian was built from, so the
/// Trotter backends can share the single-step circuit builders.
fn ordering_params(h: &QubitOperator) -> Result<crate::model::ModelParams, CoreError> {
    let n = 4;
    let t = -h.coeff(&PauliString::x(n, 0)).re / 2.0;
    let u = -4.0 * h.coeff(&PauliString::z_on(n, &[0, 3])).re;
    let p = crate::model::ModelParams { t, u, ..Default::default() };
    let rebuilt = crate::model::build_qubit_hamiltonian(&p);
    let diff = rebuilt.add(&h.scaled(Complex64::new(-1.0, 0.0)));
    if diff.coeff_one_norm() > 1e-9 {
        return Err(CoreError::Invalid(
            "Trotter spectral backends need a Hamiltonian of the model form".into(),
        ));
    }
    Ok(p)
}

fn pauli_pairs(h_i: &QubitOperator) -> Result<Vec<(f64, PauliString)>, CoreError> {
    h_i.terms()
        .map(|(p, c)| {
            if c.im.abs() > 1e-12 {
                Err(CoreError::Invalid("interaction must have real Pauli coefficients".into()))
            } else {
                Ok((c.re, p))
            }
        })
        .collect()
}

/// One noisy grid point: prepare V(t)†|Ψ⟩, then for each ordered Pauli
/// pair run the Hadamard test with evolution V(τ)† and conjugate the
/// weighted sum (which maps the test amplitude onto the H_I(t)H_I(t+τ)
/// ordering).
fn noisy_point(
    terms: &[(f64, PauliString)],
    state: &[Complex64],
    tau: f64,
    t: f64,
    ordering: TrotterOrdering,
    params: &crate::model::ModelParams,
    noise: &NoiseModel,
) -> Result<Complex64, CoreError> {
    let prep = inverse_circuit(&trotter_step(ordering, t, params));
    let evo = inverse_circuit(&trotter_step(ordering, tau, params));
    let init = StateVector::with_targets(state)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (wl, pl) in terms {
        for (wr, pr) in terms {
            let w = wl * wr;
            if pl.is_identity() && pr.is_identity() {
                acc += w;
                continue;
            }
            let mut s = [0.0f64; 2];
            for (bi, basis) in [MeasureBasis::X, MeasureBasis::Y].into_iter().enumerate() {
                // test amplitude ⟨V P_r V† P_l⟩ on V(t)†|Ψ⟩
                let circuit = hadamard_test_circuit(pl, pr, &evo, &prep, basis)?;
                let rho = run_noisy(&circuit, &DensityMatrix::from_pure(&init), noise)?;
                let p0 = ancilla_report_p0(&StateRef::Mixed(&rho), MeasureBasis::Z, noise);
                s[bi] = 2.0 * p0 - 1.0;
            }
            acc += w * Complex64::new(s[0], -s[1]);
        }
    }
    Ok(acc.conj())
}

fn inverse_circuit(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.n_qubits);
    out.extend(c.gates.iter().rev().map(|g| g.inverse()));
    out
}

/// S̃(ω) = (Δ²/4T²) Σ_j Σ_l e^{iτ_jω} C(τ_j, t_l), T = (2N_t+1)Δ/2.
pub fn riemann_spectrum(grid: &TwoTimeGrid, omegas: &[f64]) -> Result<SpectralGrid, CoreError> {
    grid.check()?;
    let t_half = grid.half_window();
    let norm = grid.delta * grid.delta / (4.0 * t_half * t_half);
    let n = grid.n_t as i64;
    let mut s_values = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let mut acc = Complex64::new(0.0, 0.0);
        for (jj, j) in (-n..=n).enumerate() {
            let phase = Complex64::from_polar(1.0, j as f64 * grid.delta * omega);
            let row_sum: Complex64 = grid.values.row(jj).iter().sum();
            acc += phase * row_sum;
        }
        s_values.push(acc * norm);
    }
    let resolution = if omegas.len() > 1 { omegas[1] - omegas[0] } else { 0.0 };
    Ok(SpectralGrid { omegas: omegas.to_vec(), s_values, resolution })
}

/// Default Nyquist-limited frequency grid: uniform over [−π/Δ, π/Δ]
/// with spacing Δω/2.
pub fn default_omega_grid(delta: f64, delta_omega: f64) -> Result<Vec<f64>, CoreError> {
    if delta <= 0.0 || delta_omega <= 0.0 {
        return Err(CoreError::Invalid("Δ and Δω must be positive".into()));
    }
    let lim = std::f64::consts::PI / delta;
    let step = delta_omega / 2.0;
    let n = (lim / step).floor() as i64;
    Ok((-n..=n).map(|k| k as f64 * step).collect())
}

/// N_t = ceil(1/(Δ·Δω)) and the (2N_t+1)² correlator evaluations the
/// grid costs — the quadratic price of frequency resolution Δω.
pub fn resolution_cost(delta: f64, delta_omega: f64) -> Result<(usize, u64), CoreError> {
    if delta <= 0.0 || delta_omega <= 0.0 {
        return Err(CoreError::Invalid("Δ and Δω must be positive".into()));
    }
    let n_t = (1.0 / (delta * delta_omega)).ceil() as usize;
    let side = 2 * n_t as u64 + 1;
    Ok((n_t, side * side))
}

/// Midpoint-rule Riemann bound (M₂/24)·T³τ̃³/(N_T² N_τ²).
pub fn midpoint_error_bound(
    m2: f64,
    t_half: f64,
    tau_tilde: f64,
    n_t: usize,
    n_tau: usize,
) -> Result<f64, CoreError> {
    if n_t == 0 || n_tau == 0 {
        return Err(CoreError::Invalid("zero subdivisions".into()));
    }
    if m2 < 0.0 {
        return Err(CoreError::Invalid(format!("negative curvature bound M₂ = {m2}")));
    }
    Ok(m2 / 24.0 * t_half.powi(3) * tau_tilde.powi(3) / ((n_t * n_t * n_tau * n_tau) as f64))
}

/// Position of the largest |S̃| on the grid.
pub fn peak_omega(spectrum: &SpectralGrid) -> f64 {
    spectrum
        .omegas
        .iter()
        .zip(&spectrum.s_values)
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(&w, _)| w)
        .unwrap_or(0.0)
}
