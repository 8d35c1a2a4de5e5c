//! Bit-encoded Pauli-string algebra and dense lowering.
//!
//! A `PauliString` is stored in symplectic form: per-qubit factors
//! `W(x,z) = i^{xz} X^x Z^z` (so `W(1,1) = Y`) together with a global
//! phase that is a fourth root of unity. Products are O(n) bit
//! arithmetic and strings hash canonically, which is what the term
//! maps in `QubitOperator` rely on.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::CoreError;

pub const PRUNE_TOL: f64 = 1e-14;

/// Maximum qubit count for dense lowering (2^12 = 4096 dims).
pub const MAX_DENSE_QUBITS: usize = 12;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub n_qubits: usize,
    /// Bit k set iff the factor on qubit k has X or Y support.
    pub x_mask: u64,
    /// Bit k set iff the factor on qubit k has Z or Y support.
    pub z_mask: u64,
    /// Exponent e in the global phase i^e, e ∈ {0,1,2,3}.
    pub phase_exp: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString { n_qubits, x_mask: 0, z_mask: 0, phase_exp: 0 }
    }

    /// Single Z on qubit `k` (0-based).
    pub fn z(n_qubits: usize, k: usize) -> Self {
        assert!(k < n_qubits);
        PauliString { n_qubits, x_mask: 0, z_mask: 1 << k, phase_exp: 0 }
    }

    pub fn x(n_qubits: usize, k: usize) -> Self {
        assert!(k < n_qubits);
        PauliString { n_qubits, x_mask: 1 << k, z_mask: 0, phase_exp: 0 }
    }

    pub fn y(n_qubits: usize, k: usize) -> Self {
        assert!(k < n_qubits);
        PauliString { n_qubits, x_mask: 1 << k, z_mask: 1 << k, phase_exp: 0 }
    }

    /// Z on every qubit listed (0-based indices).
    pub fn z_on(n_qubits: usize, ks: &[usize]) -> Self {
        let mut m = 0u64;
        for &k in ks {
            assert!(k < n_qubits);
            m |= 1 << k;
        }
        PauliString { n_qubits, x_mask: 0, z_mask: m, phase_exp: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// True when the string contains only I/Z factors.
    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    pub fn phase(&self) -> Complex64 {
        match self.phase_exp & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Same string with phase forced to +1 (for use as a map key).
    pub fn unphased(&self) -> Self {
        PauliString { phase_exp: 0, ..*self }
    }

    /// Group product: matrix(self) · matrix(rhs), exact phase included.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString, CoreError> {
        if self.n_qubits != rhs.n_qubits {
            return Err(CoreError::QubitMismatch(self.n_qubits, rhs.n_qubits));
        }
        // W(x1,z1)·W(x2,z2) = i^{x1z1 + x2z2 - (x1^x2)(z1^z2)} (-1)^{z1·x2} W(x1^x2, z1^z2)
        let xm = self.x_mask ^ rhs.x_mask;
        let zm = self.z_mask ^ rhs.z_mask;
        let mut e = self.phase_exp as u32 + rhs.phase_exp as u32;
        e += (self.x_mask & self.z_mask).count_ones();
        e += (rhs.x_mask & rhs.z_mask).count_ones();
        e += 2 * (self.z_mask & rhs.x_mask).count_ones();
        // subtract the normalization of the result (mod 4)
        e += 4 - ((xm & zm).count_ones() % 4);
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_mask: xm,
            z_mask: zm,
            phase_exp: (e % 4) as u8,
        })
    }

    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        ((self.x_mask & rhs.z_mask).count_ones() + (self.z_mask & rhs.x_mask).count_ones()) % 2 == 0
    }

    /// Action on a computational basis state: P|b⟩ = amp·|b ^ x_mask⟩.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let mut e = self.phase_exp as u32 + (self.x_mask & self.z_mask).count_ones();
        e += 2 * (self.z_mask & b).count_ones();
        let amp = match e % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (b ^ self.x_mask, amp)
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim as u64 {
            let (row, amp) = self.apply_to_basis(col);
            m[(row as usize, col as usize)] = amp;
        }
        m
    }

    /// Parse a label like "ZIIZ": character k addresses qubit k.
    pub fn from_label(label: &str) -> Result<PauliString, CoreError> {
        let mut x = 0u64;
        let mut z = 0u64;
        let n = label.chars().count();
        if n == 0 || n > 64 {
            return Err(CoreError::Parse(format!("bad Pauli label {label:?}")));
        }
        for (k, c) in label.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << k,
                'Y' => {
                    x |= 1 << k;
                    z |= 1 << k;
                }
                'Z' => z |= 1 << k,
                _ => return Err(CoreError::Parse(format!("bad Pauli label {label:?}"))),
            }
        }
        Ok(PauliString { n_qubits: n, x_mask: x, z_mask: z, phase_exp: 0 })
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .map(|k| {
                match ((self.x_mask >> k) & 1, (self.z_mask >> k) & 1) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (1, 1) => 'Y',
                    _ => 'Z',
                }
            })
            .collect()
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i·", "-", "-i·"][(self.phase_exp & 3) as usize];
        write!(f, "{}{}", p, self.label())
    }
}

/// Weighted sum of Pauli strings. Keys are phase-free; any phase on an
/// inserted string is folded into its coefficient. Zero coefficients
/// (|c| < 1e-14) are pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    pub n_qubits: usize,
    // BTreeMap keeps iteration deterministic, which keeps floating-point
    // reductions and file output reproducible.
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        QubitOperator { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity_times(n_qubits: usize, c: Complex64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(PauliString::identity(n_qubits), c);
        op
    }

    pub fn add_term(&mut self, p: PauliString, coeff: Complex64) {
        assert_eq!(p.n_qubits, self.n_qubits, "term qubit count mismatch");
        let c = coeff * p.phase();
        let key = (p.x_mask, p.z_mask);
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.terms.iter().map(|(&(x, z), &c)| {
            (PauliString { n_qubits: self.n_qubits, x_mask: x, z_mask: z, phase_exp: 0 }, c)
        })
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        let c = self.terms.get(&(p.x_mask, p.z_mask)).copied().unwrap_or_default();
        c * p.phase().conj()
    }

    pub fn scaled(&self, s: Complex64) -> QubitOperator {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
        out
    }

    pub fn add(&self, rhs: &QubitOperator) -> QubitOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        let mut out = self.clone();
        for (p, c) in rhs.terms() {
            out.add_term(p, c);
        }
        out
    }

    pub fn multiply(&self, rhs: &QubitOperator) -> QubitOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        let mut out = QubitOperator::zero(self.n_qubits);
        for (pa, ca) in self.terms() {
            for (pb, cb) in rhs.terms() {
                let prod = pa.multiply(&pb).expect("equal n_qubits");
                out.add_term(prod, ca * cb);
            }
        }
        out
    }

    /// Hermiticity check: every phase-normalized coefficient real.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(x, z), c)| {
            // key string carries normalization i^{x·z}; i^{xz}X^xZ^z is
            // Hermitian, so Hermiticity of the sum means real coefficients.
            let _ = (x, z);
            c.im.abs() <= tol
        })
    }

    /// 1-norm of the coefficient vector, Σ|α_i|.
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>, CoreError> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(CoreError::TooLarge(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in self.terms() {
            for col in 0..dim as u64 {
                let (row, amp) = p.apply_to_basis(col);
                m[(row as usize, col as usize)] += c * amp;
            }
        }
        Ok(m)
    }

    /// ⟨ψ|Op|ψ⟩ without building the dense matrix.
    pub fn expectation(&self, state: &[Complex64]) -> Result<Complex64, CoreError> {
        let dim = 1usize << self.n_qubits;
        if state.len() != dim {
            return Err(CoreError::DimensionMismatch(state.len(), dim));
        }
        let norm2: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(CoreError::Unnormalized(norm2.sqrt()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, c) in self.terms() {
            let mut term = Complex64::new(0.0, 0.0);
            for b in 0..dim as u64 {
                let (row, amp) = p.apply_to_basis(b);
                term += state[row as usize].conj() * amp * state[b as usize];
            }
            acc += c * term;
        }
        Ok(acc)
    }

    /// Parse the operator text format: one `coeff_re coeff_im LABEL` per
    /// line; blank lines and `#` comments ignored.
    pub fn from_text(text: &str) -> Result<QubitOperator, CoreError> {
        let mut op: Option<QubitOperator> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (re, im, label) = (it.next(), it.next(), it.next());
            let (re, im, label) = match (re, im, label, it.next()) {
                (Some(re), Some(im), Some(l), None) => (re, im, l),
                _ => {
                    return Err(CoreError::Parse(format!(
                        "line {}: expected `coeff_re coeff_im LABEL`",
                        lineno + 1
                    )))
                }
            };
            let re: f64 = re
                .replace('\u{2212}', "-")
                .parse()
                .map_err(|_| CoreError::Parse(format!("line {}: bad real part", lineno + 1)))?;
            let im: f64 = im
                .replace('\u{2212}', "-")
                .parse()
                .map_err(|_| CoreError::Parse(format!("line {}: bad imag part", lineno + 1)))?;
            let p = PauliString::from_label(label)?;
            let op = op.get_or_insert_with(|| QubitOperator::zero(p.n_qubits));
            if p.n_qubits != op.n_qubits {
                return Err(CoreError::QubitMismatch(p.n_qubits, op.n_qubits));
            }
            op.add_term(p, Complex64::new(re, im));
        }
        op.ok_or_else(|| CoreError::Parse("empty operator text".into()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in self.terms() {
            out.push_str(&format!("{:.17e} {:.17e} {}\n", c.re, c.im, p.label()));
        }
        out
    }
}
