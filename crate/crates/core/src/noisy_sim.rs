//! Circuit execution: ideal state-vector runs, density-matrix evolution
//! under a depolarizing-after-gate noise model, and seeded shot
//! sampling of the ancilla.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{Circuit, Gate, MeasureBasis};
use crate::error::CoreError;

#[derive(Clone, Debug)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, CoreError> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(CoreError::DimensionMismatch(1 << n_qubits, amplitudes.len()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CoreError::Unnormalized(norm));
        }
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amplitudes }
    }

    /// Ancilla |0⟩ ⊗ 4-qubit target state (ancilla = qubit 0).
    pub fn with_targets(target: &[Complex64]) -> Result<Self, CoreError> {
        if target.len() != 16 {
            return Err(CoreError::DimensionMismatch(16, target.len()));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 32];
        for (b, amp) in target.iter().enumerate() {
            amplitudes[b << 1] = *amp;
        }
        StateVector::new(5, amplitudes)
    }
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(&psi.amplitudes);
        DensityMatrix { n_qubits: psi.n_qubits, matrix: &v * v.adjoint() }
    }

    pub fn check_invariants(&self, tol: f64) -> Result<(), CoreError> {
        let m = &self.matrix;
        let herm_defect = (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if herm_defect > tol {
            return Err(CoreError::Internal(format!("density matrix not Hermitian: {herm_defect:.3e}")));
        }
        let tr: Complex64 = m.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(CoreError::Internal(format!("density matrix trace {tr}")));
        }
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = nalgebra::SymmetricEigen::new(sym);
        if eig.eigenvalues.iter().any(|&l| l < -1e-9) {
            return Err(CoreError::Internal("density matrix has negative eigenvalue".into()));
        }
        Ok(())
    }

    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        (op * &self.matrix).diagonal().iter().sum()
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    /// depolarizing probability after each single-qubit gate
    pub p1: f64,
    /// depolarizing probability after each two-qubit gate
    pub p2: f64,
    /// readout confusion, rows = true bit, columns = reported bit
    pub readout: [[f64; 2]; 2],
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { p1: 0.001, p2: 0.01, readout: [[0.98, 0.02], [0.02, 0.98]] }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0, readout: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        for p in [self.p1, self.p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(CoreError::Invalid(format!("depolarizing probability {p}")));
            }
        }
        for row in &self.readout {
            if row.iter().any(|&x| !(0.0..=1.0).contains(&x))
                || (row[0] + row[1] - 1.0).abs() > 1e-9
            {
                return Err(CoreError::Invalid(format!("confusion row {row:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotRecord {
    pub fn frequency(&self, outcome: &str) -> f64 {
        *self.counts.get(outcome).unwrap_or(&0) as f64 / self.shots as f64
    }

    /// (n₀ − n₁)/M for a single measured bit.
    pub fn expectation_z(&self) -> f64 {
        self.frequency("0") - self.frequency("1")
    }

    /// Binomial standard error of expectation_z.
    pub fn sigma_z(&self) -> f64 {
        let v = self.expectation_z();
        ((1.0 - v * v).max(0.0) / self.shots as f64).sqrt()
    }
}

pub fn run_ideal(c: &Circuit, init: &StateVector) -> Result<StateVector, CoreError> {
    if init.n_qubits != c.n_qubits {
        return Err(CoreError::QubitMismatch(c.n_qubits, init.n_qubits));
    }
    let mut amps = init.amplitudes.clone();
    c.apply(&mut amps);
    Ok(StateVector { n_qubits: c.n_qubits, amplitudes: amps })
}

/// ρ → UρU† for a single gate, in place.
fn apply_gate_dm(rho: &mut DMatrix<Complex64>, g: &Gate, n_qubits: usize) {
    // columns first: ρ ← Uρ
    let dim = 1usize << n_qubits;
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        for (i, c) in col.iter_mut().enumerate() {
            *c = rho[(i, j)];
        }
        g.apply(&mut col);
        for i in 0..dim {
            rho[(i, j)] = col[i];
        }
    }
    // rows: ρ ← ρU† — apply U to conjugated rows
    for i in 0..dim {
        for (j, c) in col.iter_mut().enumerate() {
            *c = rho[(i, j)].conj();
        }
        g.apply(&mut col);
        for j in 0..dim {
            rho[(i, j)] = col[j].conj();
        }
    }
}

/// Depolarizing channel on a qubit subset: (1−p)ρ + p·(I/2^k ⊗ Tr_S ρ).
fn depolarize(rho: &mut DMatrix<Complex64>, qubits: &[usize], p: f64) {
    if p == 0.0 {
        return;
    }
    let dim = rho.nrows();
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let k = qubits.len() as u32;
    let sub = 1usize << k;
    let mut out = rho.clone() * Complex64::new(1.0 - p, 0.0);
    // enumerate index pairs with the S-bits stripped
    for r in 0..dim {
        if r & mask != 0 {
            continue;
        }
        for c in 0..dim {
            if c & mask != 0 {
                continue;
            }
            // Tr_S ρ entry at (r̄, c̄)
            let mut tr = Complex64::new(0.0, 0.0);
            for s in 0..sub {
                let bits = expand_bits(s, qubits);
                tr += rho[(r | bits, c | bits)];
            }
            let w = tr * Complex64::new(p / sub as f64, 0.0);
            for s in 0..sub {
                let bits = expand_bits(s, qubits);
                out[(r | bits, c | bits)] += w;
            }
        }
    }
    *rho = out;
}

fn expand_bits(s: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().map(|(i, &q)| ((s >> i) & 1) << q).sum()
}

pub fn run_noisy(
    c: &Circuit,
    init: &DensityMatrix,
    noise: &NoiseModel,
) -> Result<DensityMatrix, CoreError> {
    noise.validate()?;
    if init.n_qubits != c.n_qubits {
        return Err(CoreError::QubitMismatch(c.n_qubits, init.n_qubits));
    }
    let mut rho = init.matrix.clone();
    for g in &c.gates {
        apply_gate_dm(&mut rho, g, c.n_qubits);
        let (a, b) = g.qubits();
        match b {
            None => depolarize(&mut rho, &[a], noise.p1),
            Some(b) => depolarize(&mut rho, &[a, b], noise.p2),
        }
    }
    let out = DensityMatrix { n_qubits: c.n_qubits, matrix: rho };
    out.check_invariants(1e-8)?;
    Ok(out)
}

/// Either execution backend, borrowed for measurement.
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

/// Probability that the ancilla (qubit 0) reads 0 after the basis
/// change, before readout errors.
fn ancilla_p0(state: &StateRef, basis: MeasureBasis) -> f64 {
    let rot: Vec<Gate> = match basis {
        MeasureBasis::X => vec![Gate::H(0)],
        MeasureBasis::Y => vec![Gate::Sdg(0), Gate::H(0)],
        MeasureBasis::Z => vec![],
    };
    match state {
        StateRef::Pure(sv) => {
            let mut amps = sv.amplitudes.clone();
            for g in &rot {
                g.apply(&mut amps);
            }
            amps.iter().enumerate().filter(|(b, _)| b & 1 == 0).map(|(_, a)| a.norm_sqr()).sum()
        }
        StateRef::Mixed(dm) => {
            let mut rho = dm.matrix.clone();
            for g in &rot {
                apply_gate_dm(&mut rho, g, dm.n_qubits);
            }
            (0..rho.nrows()).filter(|b| b & 1 == 0).map(|b| rho[(b, b)].re).sum()
        }
    }
}

/// Basis-rotated, readout-confused, seeded shot sampling of the ancilla.
pub fn sample_ancilla(
    state: &StateRef,
    basis: MeasureBasis,
    shots: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ShotRecord, CoreError> {
    if shots == 0 {
        return Err(CoreError::Invalid("shots must be ≥ 1".into()));
    }
    noise.validate()?;
    let p0 = ancilla_p0(state, basis).clamp(0.0, 1.0);
    let p_report0 = p0 * noise.readout[0][0] + (1.0 - p0) * noise.readout[1][0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n0 = 0u64;
    for _ in 0..shots {
        if rng.gen::<f64>() < p_report0 {
            n0 += 1;
        }
    }
    let mut counts = BTreeMap::new();
    counts.insert("0".to_string(), n0);
    counts.insert("1".to_string(), shots - n0);
    Ok(ShotRecord { shots, counts })
}

/// Exact reported-outcome probability of reading 0 (the ∞-shot limit of
/// sample_ancilla), used by mitigation tests and exact pipelines.
pub fn ancilla_report_p0(state: &StateRef, basis: MeasureBasis, noise: &NoiseModel) -> f64 {
    let p0 = ancilla_p0(state, basis).clamp(0.0, 1.0);
    p0 * noise.readout[0][0] + (1.0 - p0) * noise.readout[1][0]
}
