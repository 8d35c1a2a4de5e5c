//! Exact brute-force reference: dense diagonalization, eigenbasis
//! real/imaginary-time evolution, exact correlators, spectral response,
//! sum rules, and the contaminated-state generator. Every other module
//! is tested against this one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::pauli::QubitOperator;

pub struct EigenSystem {
    /// Ascending energies.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors, column i ↔ energies[i].
    pub vectors: DMatrix<Complex64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_state(&self) -> Vec<Complex64> {
        self.vectors.column(0).iter().cloned().collect()
    }

    /// State vector from eigenbasis coefficients.
    pub fn state_from_coefficients(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.dim());
        let cv = DVector::from_column_slice(c);
        (&self.vectors * cv).iter().cloned().collect()
    }

    /// Eigenbasis coefficients of a state vector.
    pub fn coefficients_of(&self, state: &[Complex64]) -> Vec<Complex64> {
        let sv = DVector::from_column_slice(state);
        (self.vectors.adjoint() * sv).iter().cloned().collect()
    }

    /// e^{−iHτ}|ψ⟩ through the eigenbasis.
    pub fn evolve(&self, state: &[Complex64], tau: f64) -> Vec<Complex64> {
        let mut c = self.coefficients_of(state);
        for (ci, &e) in c.iter_mut().zip(&self.energies) {
            *ci *= Complex64::from_polar(1.0, -e * tau);
        }
        self.state_from_coefficients(&c)
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn diagonalize_dense(h: &DMatrix<Complex64>) -> Result<EigenSystem, CoreError> {
    let defect = hermiticity_defect(h);
    if defect > 1e-10 {
        return Err(CoreError::NotHermitian(defect));
    }
    if h.nrows() > 4096 {
        return Err(CoreError::TooLarge(h.nrows()));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let energies: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| se.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    // residual guard
    for (i, &e) in energies.iter().enumerate() {
        let v = vectors.column(i);
        let r = h * v - v * Complex64::new(e, 0.0);
        if r.norm() > 1e-10 {
            return Err(CoreError::Internal(format!("eigen residual {:.2e}", r.norm())));
        }
    }
    Ok(EigenSystem { energies, vectors })
}

pub fn diagonalize(h: &QubitOperator) -> Result<EigenSystem, CoreError> {
    diagonalize_dense(&h.to_matrix()?)
}

/// C(τ) = ⟨ψ|e^{iHτ} H_I e^{−iHτ} H_I|ψ⟩, evaluated in the eigenbasis.
/// Build once, evaluate per τ in O(dim²).
pub struct CorrelatorEngine {
    energies: Vec<f64>,
    /// H_I in the eigenbasis.
    a: DMatrix<Complex64>,
    /// ψ in the eigenbasis.
    s: DVector<Complex64>,
    /// (A·s) in the eigenbasis — the H_I|ψ⟩ side.
    r: DVector<Complex64>,
}

impl CorrelatorEngine {
    pub fn new(
        eigs: &EigenSystem,
        h_i: &QubitOperator,
        state: &[Complex64],
    ) -> Result<Self, CoreError> {
        let hi = h_i.to_matrix()?;
        if hi.nrows() != eigs.dim() || state.len() != eigs.dim() {
            return Err(CoreError::DimensionMismatch(state.len(), eigs.dim()));
        }
        let a = eigs.vectors.adjoint() * hi * &eigs.vectors;
        let s = DVector::from_column_slice(&eigs.coefficients_of(state));
        let r = &a * &s;
        Ok(CorrelatorEngine { energies: eigs.energies.clone(), a, s, r })
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        // C(τ) = Σ_{m,n} conj(s_m) e^{iE_mτ} A_{mn} e^{−iE_nτ} r_n
        let dim = self.energies.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            let pm = Complex64::from_polar(1.0, self.energies[m] * tau);
            let mut row = Complex64::new(0.0, 0.0);
            for n in 0..dim {
                let pn = Complex64::from_polar(1.0, -self.energies[n] * tau);
                row += self.a[(m, n)] * pn * self.r[n];
            }
            acc += self.s[m].conj() * pm * row;
        }
        acc
    }
}

pub fn exact_correlator(
    h: &QubitOperator,
    h_i: &QubitOperator,
    state: &[Complex64],
    tau: f64,
) -> Result<Complex64, CoreError> {
    let eigs = diagonalize(h)?;
    Ok(CorrelatorEngine::new(&eigs, h_i, state)?.eval(tau))
}

/// Discrete response: lines at ω_n = E_n − E_0 with weights
/// |⟨Ψ₀|H_I|n⟩|² for eigenstate input, the general double sum otherwise.
pub fn spectral_response(
    eigs: &EigenSystem,
    h_i: &QubitOperator,
    state: &[Complex64],
) -> Result<Vec<(f64, f64)>, CoreError> {
    let hi = h_i.to_matrix()?;
    let sv = DVector::from_column_slice(state);
    let w = &hi * &sv;
    let e0 = state_energy(eigs, state);
    let mut lines = Vec::with_capacity(eigs.dim());
    for n in 0..eigs.dim() {
        let amp: Complex64 = eigs.vectors.column(n).dotc(&w);
        lines.push((eigs.energies[n] - e0, amp.norm_sqr()));
    }
    Ok(lines)
}

fn state_energy(eigs: &EigenSystem, state: &[Complex64]) -> f64 {
    let c = eigs.coefficients_of(state);
    c.iter().zip(&eigs.energies).map(|(ci, &e)| ci.norm_sqr() * e).sum()
}

/// ⟨Ψ|H_I H^m H_I|Ψ⟩ (unshifted Hamiltonian powers).
pub fn sum_rule(
    eigs: &EigenSystem,
    h_i: &QubitOperator,
    state: &[Complex64],
    m: u32,
) -> Result<f64, CoreError> {
    let hi = h_i.to_matrix()?;
    let sv = DVector::from_column_slice(state);
    let r = eigs.vectors.adjoint() * (&hi * &sv);
    Ok(r.iter().zip(&eigs.energies).map(|(ri, &e)| ri.norm_sqr() * e.powi(m as i32)).sum())
}

/// Euclidean correlator for a state given by eigenbasis coefficients c:
/// C_E(τ_E) = Σ_{i,j,m} c_i† a_{i,j} a_{j,m} e^{−(E_i+E_j)τ_E} c_m,
/// with a_{i,j} = ⟨i|H_I|j⟩. Eigenstate input reduces to
/// e^{−E_0τ_E} Σ_l e^{−E_lτ_E} |a_{0,l}|².
pub fn euclidean_correlator(
    eigs: &EigenSystem,
    h_i: &QubitOperator,
    coeffs: &[Complex64],
    tau_e: f64,
) -> Result<f64, CoreError> {
    if tau_e < 0.0 {
        return Err(CoreError::Invalid("negative imaginary time".into()));
    }
    let hi = h_i.to_matrix()?;
    let a = eigs.vectors.adjoint() * hi * &eigs.vectors;
    let c = DVector::from_column_slice(coeffs);
    let u = &a * &c;
    let w = DVector::from_iterator(
        eigs.dim(),
        u.iter().zip(&eigs.energies).map(|(ui, &e)| ui * (-e * tau_e).exp()),
    );
    let v = &a * w;
    let acc: Complex64 = c
        .iter()
        .zip(v.iter())
        .zip(&eigs.energies)
        .map(|((ci, vi), &e)| ci.conj() * vi * (-e * tau_e).exp())
        .sum();
    Ok(acc.re)
}

#[derive(Clone, Debug)]
pub struct ContaminatedState {
    /// Eigenbasis coefficients, c_0 real = √F.
    pub coefficients: Vec<Complex64>,
    pub fidelity: f64,
}

impl ContaminatedState {
    pub fn to_state_vector(&self, eigs: &EigenSystem) -> Vec<Complex64> {
        eigs.state_from_coefficients(&self.coefficients)
    }
}

/// c_0 = √F; the remaining weight is spread pseudo-randomly (seeded)
/// over the excited states with uniform random phases.
pub fn make_contaminated_state(
    eigs: &EigenSystem,
    target_fidelity: f64,
    seed: u64,
) -> Result<ContaminatedState, CoreError> {
    if !(target_fidelity > 0.0 && target_fidelity <= 1.0) {
        return Err(CoreError::Invalid(format!("fidelity {target_fidelity} out of (0,1]")));
    }
    let dim = eigs.dim();
    let mut c = vec![Complex64::new(0.0, 0.0); dim];
    c[0] = Complex64::new(target_fidelity.sqrt(), 0.0);
    let rest = 1.0 - target_fidelity;
    if rest > 0.0 && dim > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<(f64, f64)> =
            (1..dim).map(|_| (rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU)).collect();
        let norm2: f64 = raw.iter().map(|(m, _)| m * m).sum();
        for (k, (mag, ph)) in raw.into_iter().enumerate() {
            c[k + 1] = Complex64::from_polar(mag * (rest / norm2).sqrt(), ph);
        }
    }
    Ok(ContaminatedState { coefficients: c, fidelity: target_fidelity })
}
