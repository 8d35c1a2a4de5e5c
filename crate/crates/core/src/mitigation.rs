//! Error mitigation: readout-confusion inversion with first-order error
//! propagation, CNOT folding, and zero-noise extrapolation.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{Circuit, Gate};
use crate::error::CoreError;
use crate::noisy_sim::{NoiseModel, ShotRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolant {
    Linear,
    Richardson2,
    Exponential,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct MitigationConfig {
    /// odd noise-amplification factors, strictly increasing, first = 1
    pub scales: Vec<u32>,
    pub extrapolant: Extrapolant,
    pub readout_calibration_shots: u64,
}

impl Default for MitigationConfig {
    fn default() -> Self {
        MitigationConfig {
            scales: vec![1, 3],
            extrapolant: Extrapolant::Linear,
            readout_calibration_shots: 100_000,
        }
    }
}

impl MitigationConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.scales.first() != Some(&1) {
            return Err(CoreError::Invalid("first ZNE scale must be 1".into()));
        }
        if !self.scales.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::Invalid("ZNE scales must be strictly increasing".into()));
        }
        if self.scales.iter().any(|s| s % 2 == 0) {
            return Err(CoreError::Invalid("ZNE scales must be odd".into()));
        }
        let need = match self.extrapolant {
            Extrapolant::Linear => 2,
            Extrapolant::Richardson2 | Extrapolant::Exponential => 3,
        };
        if self.scales.len() < need {
            return Err(CoreError::Invalid(format!(
                "{:?} extrapolation needs ≥ {need} scales",
                self.extrapolant
            )));
        }
        if self.readout_calibration_shots == 0 {
            return Err(CoreError::Invalid("calibration shots must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ValueWithSigma {
    pub value: f64,
    pub sigma: f64,
}

impl ValueWithSigma {
    pub fn new(value: f64, sigma: f64) -> Self {
        ValueWithSigma { value, sigma }
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct MitigatedValue {
    pub bare: ValueWithSigma,
    pub per_scale: Vec<(u32, ValueWithSigma)>,
    pub mitigated: ValueWithSigma,
}

/// Estimated 2×2 confusion matrix with per-entry standard errors.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct ConfusionEstimate {
    /// rows = true bit, columns = reported bit
    pub matrix: [[f64; 2]; 2],
    pub sigma: [[f64; 2]; 2],
}

impl ConfusionEstimate {
    pub fn exact(readout: [[f64; 2]; 2]) -> Self {
        ConfusionEstimate { matrix: readout, sigma: [[0.0; 2]; 2] }
    }

    fn det_t(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }
}

/// Standard calibration: prepare each basis state, measure, tally the
/// reported-bit frequencies.
pub fn calibrate_readout(
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<ConfusionEstimate, CoreError> {
    if shots == 0 {
        return Err(CoreError::Invalid("calibration shots must be ≥ 1".into()));
    }
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = [[0.0; 2]; 2];
    let mut sigma = [[0.0; 2]; 2];
    for (truth, row) in noise.readout.iter().enumerate() {
        let mut n0 = 0u64;
        for _ in 0..shots {
            if rng.gen::<f64>() < row[0] {
                n0 += 1;
            }
        }
        let f0 = n0 as f64 / shots as f64;
        let se = (f0 * (1.0 - f0) / shots as f64).sqrt();
        matrix[truth] = [f0, 1.0 - f0];
        sigma[truth] = [se, se];
    }
    let est = ConfusionEstimate { matrix, sigma };
    if est.det_t().abs() < 1e-6 {
        return Err(CoreError::Invalid("estimated confusion matrix is singular".into()));
    }
    Ok(est)
}

/// ⟨Z'⟩ = p₀ − p₁ from inverse-confusion frequencies, given reported
/// frequency f₀ of outcome 0 and the confusion rows.
fn mitigated_expectation(f0: f64, a00: f64, a11: f64) -> f64 {
    // A^T p = f with A row-stochastic: p0 = (a11·f0 − a10·f1)/det
    let (a01, a10) = (1.0 - a00, 1.0 - a11);
    let f1 = 1.0 - f0;
    let det = a00 * a11 - a10 * a01;
    let p0 = (a11 * f0 - a10 * f1) / det;
    let p1 = (-a01 * f0 + a00 * f1) / det;
    p0 - p1
}

/// Inverse-confusion readout mitigation with first-order propagation of
/// both shot noise and calibration uncertainty. Quasi-probability
/// results outside [−1, 1] are returned unclipped.
pub fn mitigate_readout(
    record: &ShotRecord,
    confusion: &ConfusionEstimate,
) -> Result<ValueWithSigma, CoreError> {
    if confusion.det_t().abs() < 1e-9 {
        return Err(CoreError::Invalid("confusion matrix is singular".into()));
    }
    let f0 = record.frequency("0");
    let (a00, a11) = (confusion.matrix[0][0], confusion.matrix[1][1]);
    let value = mitigated_expectation(f0, a00, a11);

    let var_f0 = f0 * (1.0 - f0) / record.shots as f64;
    let h = 1e-7;
    let d_f0 = (mitigated_expectation(f0 + h, a00, a11) - mitigated_expectation(f0 - h, a00, a11))
        / (2.0 * h);
    let d_a00 = (mitigated_expectation(f0, a00 + h, a11) - mitigated_expectation(f0, a00 - h, a11))
        / (2.0 * h);
    let d_a11 = (mitigated_expectation(f0, a00, a11 + h) - mitigated_expectation(f0, a00, a11 - h))
        / (2.0 * h);
    let var = d_f0 * d_f0 * var_f0
        + d_a00 * d_a00 * confusion.sigma[0][0].powi(2)
        + d_a11 * d_a11 * confusion.sigma[1][1].powi(2);
    Ok(ValueWithSigma::new(value, var.sqrt()))
}

/// Entangling-gate folding: each CNOT/CZ/SWAP repeated `scale` times;
/// the unitary is unchanged for odd scales and per-pair noise is
/// amplified by the repetition.
pub fn fold_circuit(c: &Circuit, scale: u32) -> Result<Circuit, CoreError> {
    if scale % 2 == 0 || scale == 0 {
        return Err(CoreError::Invalid(format!("fold scale must be odd, got {scale}")));
    }
    let mut out = Circuit::new(c.n_qubits);
    for g in &c.gates {
        let reps = match g {
            Gate::Cnot(..) | Gate::Cz(..) | Gate::Swap(..) => scale,
            _ => 1,
        };
        for _ in 0..reps {
            out.push(*g);
        }
    }
    Ok(out)
}

/// Weighted least-squares in the scale variable, evaluated at scale 0.
pub fn zne_extrapolate(
    points: &[(u32, ValueWithSigma)],
    method: Extrapolant,
) -> Result<ValueWithSigma, CoreError> {
    let need = match method {
        Extrapolant::Linear => 2,
        Extrapolant::Richardson2 | Extrapolant::Exponential => 3,
    };
    if points.len() < need {
        return Err(CoreError::Invalid(format!(
            "{method:?} extrapolation needs ≥ {need} points, got {}",
            points.len()
        )));
    }
    match method {
        Extrapolant::Linear => polynomial_fit_at_zero(points, 2),
        Extrapolant::Richardson2 => polynomial_fit_at_zero(points, 3),
        Extrapolant::Exponential => exponential_fit_at_zero(points),
    }
}

const SIGMA_FLOOR: f64 = 1e-12;

fn polynomial_fit_at_zero(
    points: &[(u32, ValueWithSigma)],
    n_coeff: usize,
) -> Result<ValueWithSigma, CoreError> {
    let n = points.len();
    let mut xtwx = DMatrix::<f64>::zeros(n_coeff, n_coeff);
    let mut xtwy = DMatrix::<f64>::zeros(n_coeff, 1);
    let floored = points.iter().any(|(_, v)| v.sigma < SIGMA_FLOOR);
    for &(scale, v) in points {
        let w = 1.0 / v.sigma.max(SIGMA_FLOOR).powi(2);
        let mut row = vec![0.0; n_coeff];
        let mut xp = 1.0;
        for r in row.iter_mut() {
            *r = xp;
            xp *= scale as f64;
        }
        for i in 0..n_coeff {
            for j in 0..n_coeff {
                xtwx[(i, j)] += w * row[i] * row[j];
            }
            xtwy[(i, 0)] += w * row[i] * v.value;
        }
    }
    let cov = xtwx
        .try_inverse()
        .ok_or_else(|| CoreError::Invalid("degenerate ZNE design matrix".into()))?;
    let beta = &cov * xtwy;
    // exact-fit case (n == n_coeff) or floored sigmas: check consistency
    if floored && n > n_coeff {
        let mut chi2 = 0.0;
        for &(scale, v) in points {
            let mut pred = 0.0;
            let mut xp = 1.0;
            for k in 0..n_coeff {
                pred += beta[(k, 0)] * xp;
                xp *= scale as f64;
            }
            chi2 += ((v.value - pred) / SIGMA_FLOOR).powi(2);
        }
        if chi2 > 1.0 {
            return Err(CoreError::Invalid(
                "zero uncertainties with values inconsistent with the fit model".into(),
            ));
        }
    }
    Ok(ValueWithSigma::new(beta[(0, 0)], cov[(0, 0)].max(0.0).sqrt()))
}

/// v(c) = a·e^{bc} fit through weighted log-linear LSQ; falls back to
/// linear when the values change sign (log undefined).
fn exponential_fit_at_zero(points: &[(u32, ValueWithSigma)]) -> Result<ValueWithSigma, CoreError> {
    let sign = points[0].1.value.signum();
    if points.iter().any(|(_, v)| v.value == 0.0 || v.value.signum() != sign) {
        return polynomial_fit_at_zero(points, 2);
    }
    let log_points: Vec<(u32, ValueWithSigma)> = points
        .iter()
        .map(|&(s, v)| (s, ValueWithSigma::new(v.value.abs().ln(), v.sigma / v.value.abs())))
        .collect();
    let log_fit = polynomial_fit_at_zero(&log_points, 2)?;
    let value = sign * log_fit.value.exp();
    Ok(ValueWithSigma::new(value, value.abs() * log_fit.sigma))
}
