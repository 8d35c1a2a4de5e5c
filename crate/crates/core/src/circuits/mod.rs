//! Gate-level synthesis: Trotter-step circuits for the four orderings,
//! the three-body propagator ladder, Hadamard-test assembly, rewrite
//! passes, and CNOT accounting.
//!
//! Index conventions: standalone evolution circuits act on 4 qubits
//! 0..3 ↔ target labels T₁..T₄. Assembled measurement circuits put the
//! ancilla at index 0 and shift targets to 1..4. Basis states are
//! little-endian (qubit k ↔ bit k).

pub mod kak;
pub mod reference;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::model::ModelParams;
use crate::pauli::PauliString;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Rz(usize, f64),
    Rx(usize, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) => (q, None),
            Gate::Rz(q, _) | Gate::Rx(q, _) => (q, None),
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }

    /// Entangling-gate weight under the declared counting convention:
    /// CNOT and CZ count 1, SWAP counts 3 (its standard CNOT lowering),
    /// single-qubit gates count 0.
    pub fn entangling_weight(&self) -> usize {
        match self {
            Gate::Cnot(..) | Gate::Cz(..) => 1,
            Gate::Swap(..) => 3,
            _ => 0,
        }
    }

    /// Diagonal in the computational basis?
    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gate::Z(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Rz(..) | Gate::Cz(..))
    }

    pub fn shifted(&self, by: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + by),
            Gate::X(q) => Gate::X(q + by),
            Gate::Z(q) => Gate::Z(q + by),
            Gate::S(q) => Gate::S(q + by),
            Gate::Sdg(q) => Gate::Sdg(q + by),
            Gate::Rz(q, t) => Gate::Rz(q + by, t),
            Gate::Rx(q, t) => Gate::Rx(q + by, t),
            Gate::Cnot(a, b) => Gate::Cnot(a + by, b + by),
            Gate::Cz(a, b) => Gate::Cz(a + by, b + by),
            Gate::Swap(a, b) => Gate::Swap(a + by, b + by),
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::Rx(q, t) => Gate::Rx(q, -t),
            g => g,
        }
    }

    /// Apply in place to a state vector (little-endian).
    pub fn apply(&self, state: &mut [Complex64]) {
        let i = Complex64::new(0.0, 1.0);
        match *self {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                apply_1q(state, q, |a, b| ((a + b) * s, (a - b) * s));
            }
            Gate::X(q) => apply_1q(state, q, |a, b| (b, a)),
            Gate::Z(q) => apply_1q(state, q, |a, b| (a, -b)),
            Gate::S(q) => apply_1q(state, q, move |a, b| (a, b * i)),
            Gate::Sdg(q) => apply_1q(state, q, move |a, b| (a, -b * i)),
            Gate::Rz(q, t) => {
                let (p0, p1) =
                    (Complex64::from_polar(1.0, -t / 2.0), Complex64::from_polar(1.0, t / 2.0));
                apply_1q(state, q, move |a, b| (a * p0, b * p1));
            }
            Gate::Rx(q, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                apply_1q(state, q, move |a, b| (a * c - i * s * b, b * c - i * s * a));
            }
            Gate::Cnot(c, t) => {
                let (mc, mt) = (1u64 << c, 1u64 << t);
                for b in 0..state.len() as u64 {
                    if b & mc != 0 && b & mt == 0 {
                        state.swap(b as usize, (b | mt) as usize);
                    }
                }
            }
            Gate::Cz(u, v) => {
                let m = (1u64 << u) | (1u64 << v);
                for b in 0..state.len() as u64 {
                    if b & m == m {
                        state[b as usize] = -state[b as usize];
                    }
                }
            }
            Gate::Swap(u, v) => {
                let (mu, mv) = (1u64 << u, 1u64 << v);
                for b in 0..state.len() as u64 {
                    if b & mu != 0 && b & mv == 0 {
                        state.swap(b as usize, ((b ^ mu) | mv) as usize);
                    }
                }
            }
        }
    }
}

#[inline]
fn apply_1q(
    state: &mut [Complex64],
    q: usize,
    f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64),
) {
    let m = 1usize << q;
    for b in 0..state.len() {
        if b & m == 0 {
            let (a0, a1) = (state[b], state[b | m]);
            let (n0, n1) = f(a0, a1);
            state[b] = n0;
            state[b | m] = n1;
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) {
        let (a, b) = g.qubits();
        assert!(a < self.n_qubits && b.map_or(true, |b| b < self.n_qubits && b != a));
        self.gates.push(g);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    /// Same gates re-indexed onto a wider register.
    pub fn shifted(&self, by: usize, n_qubits: usize) -> Circuit {
        let mut c = Circuit::new(n_qubits);
        c.extend(self.gates.iter().map(|g| g.shifted(by)));
        c
    }

    pub fn apply(&self, state: &mut [Complex64]) {
        assert_eq!(state.len(), 1 << self.n_qubits);
        for g in &self.gates {
            g.apply(state);
        }
    }

    /// Dense unitary (columns = images of basis states). n ≤ 5 use only.
    pub fn unitary(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[col] = Complex64::new(1.0, 0.0);
            self.apply(&mut v);
            for row in 0..dim {
                m[(row, col)] = v[row];
            }
        }
        m
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().map(|g| g.entangling_weight()).sum()
    }

    /// Text dump, one `KIND q0 [q1] [theta]` per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let line = match *g {
                Gate::H(q) => format!("H {q}"),
                Gate::X(q) => format!("X {q}"),
                Gate::Z(q) => format!("Z {q}"),
                Gate::S(q) => format!("S {q}"),
                Gate::Sdg(q) => format!("SDG {q}"),
                Gate::Rz(q, t) => format!("RZ {q} {t:.17e}"),
                Gate::Rx(q, t) => format!("RX {q} {t:.17e}"),
                Gate::Cnot(c, t) => format!("CNOT {c} {t}"),
                Gate::Cz(a, b) => format!("CZ {a} {b}"),
                Gate::Swap(a, b) => format!("SWAP {a} {b}"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Circuit, CoreError> {
        let mut gates = Vec::new();
        let mut max_q = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || CoreError::Parse(format!("circuit line {}: {line:?}", lineno + 1));
            let q = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let th = |s: &str| s.parse::<f64>().map_err(|_| bad());
            let g = match (toks[0], toks.len()) {
                ("H", 2) => Gate::H(q(toks[1])?),
                ("X", 2) => Gate::X(q(toks[1])?),
                ("Z", 2) => Gate::Z(q(toks[1])?),
                ("S", 2) => Gate::S(q(toks[1])?),
                ("SDG", 2) => Gate::Sdg(q(toks[1])?),
                ("RZ", 3) => Gate::Rz(q(toks[1])?, th(toks[2])?),
                ("RX", 3) => Gate::Rx(q(toks[1])?, th(toks[2])?),
                ("CNOT", 3) => Gate::Cnot(q(toks[1])?, q(toks[2])?),
                ("CZ", 3) => Gate::Cz(q(toks[1])?, q(toks[2])?),
                ("SWAP", 3) => Gate::Swap(q(toks[1])?, q(toks[2])?),
                _ => return Err(bad()),
            };
            let (a, b) = g.qubits();
            max_q = max_q.max(a).max(b.unwrap_or(0));
            gates.push(g);
        }
        Ok(Circuit { n_qubits: max_q + 1, gates })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TrotterOrdering {
    A1,
    A2,
    B1,
    B2,
}

impl TrotterOrdering {
    pub const ALL: [TrotterOrdering; 4] =
        [TrotterOrdering::A1, TrotterOrdering::A2, TrotterOrdering::B1, TrotterOrdering::B2];

    pub fn tag(&self) -> &'static str {
        match self {
            TrotterOrdering::A1 => "A1",
            TrotterOrdering::A2 => "A2",
            TrotterOrdering::B1 => "B1",
            TrotterOrdering::B2 => "B2",
        }
    }
}

impl std::str::FromStr for TrotterOrdering {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "A1" | "a1" => Ok(TrotterOrdering::A1),
            "A2" | "a2" => Ok(TrotterOrdering::A2),
            "B1" | "b1" => Ok(TrotterOrdering::B1),
            "B2" | "b2" => Ok(TrotterOrdering::B2),
            _ => Err(CoreError::Parse(format!("unknown ordering {s:?}"))),
        }
    }
}

/// The published ladder circuit for the three-body propagator on wires
/// T₁..T₄ = 0..3 (chain layout T₁–T₄–T₃–T₂). 18 entangling gates
/// (15 CNOT + 1 SWAP); implements P_rev · exp(+i(U/4)τ ΣZZZ) where
/// P_rev = SWAP(T₁,T₄)·SWAP(T₂,T₃) — the rotations ride the parities
/// {234},{134},{124},{123} and the wires finish bit-reversed.
pub fn three_body_ladder(tau: f64, u: f64) -> Circuit {
    ladder_18(tau, u, false)
}

/// Ladder variant with the two-body rotations riding for free: wire 2
/// holds parity {2,3} right after the first CNOT and wire 3 holds
/// {1,4} after the fifth, so two extra Rz there extend the ladder to
/// the full A-ordering diagonal, P_rev · exp(−i(H_2bd+H_3bd)τ), at the
/// same entangling count.
pub fn a_diagonal_ladder(tau: f64, u: f64) -> Circuit {
    ladder_18(tau, u, true)
}

fn ladder_18(tau: f64, u: f64, with_pairs: bool) -> Circuit {
    let th = -tau * u / 2.0;
    let mut c = Circuit::new(4);
    c.push(Gate::Cnot(1, 2));
    if with_pairs {
        c.push(Gate::Rz(2, th));
    }
    c.extend([Gate::Cnot(2, 3)]);
    c.extend([Gate::Rz(3, th), Gate::Cnot(2, 3), Gate::Cnot(0, 3)]);
    if with_pairs {
        c.push(Gate::Rz(3, th));
    }
    c.extend([
        Gate::Cnot(1, 2),
        Gate::Cnot(3, 2),
        Gate::Rz(2, th),
        Gate::Cnot(3, 2),
        Gate::Cnot(3, 0),
        Gate::Swap(2, 1),
        Gate::Cnot(2, 3),
        Gate::Rz(3, th),
        Gate::Cnot(2, 3),
        Gate::Cnot(0, 3),
        Gate::Cnot(1, 2),
        Gate::Cnot(3, 2),
        Gate::Rz(2, th),
        Gate::Cnot(3, 2),
        Gate::Cnot(1, 2),
    ]);
    c
}

/// exp(+i(U/4)τ Σ_{i<j<k} Z_iZ_jZ_k) exactly (ladder + restoring swaps).
pub fn three_body_propagator(tau: f64, u: f64) -> Circuit {
    let mut c = three_body_ladder(tau, u);
    c.push(Gate::Swap(0, 3));
    c.push(Gate::Swap(1, 2));
    c
}

/// Chain-native 12-CNOT ladder visiting all six diagonal parities with
/// identity wire restore. Entries are (control, target); the parity
/// held by the target wire immediately after each CNOT is noted.
const DIAG12: [(usize, usize); 12] = [
    (0, 3), // {14}
    (2, 3), // {134}
    (3, 2),
    (0, 3),
    (1, 2), // {124}
    (2, 3), // {123}
    (3, 2),
    (0, 3), // {23}  (wire 3 holds b2⊕b3 here)
    (1, 2), // {234}
    (2, 3),
    (1, 2),
    (3, 2),
];

/// Which ladder steps carry a rotation: bit set k → insert Rz on the
/// target of DIAG12[k] right after it.
const DIAG12_TRIPLES: u16 = 1 << 1 | 1 << 4 | 1 << 5 | 1 << 8; // {134},{124},{123},{234}
const DIAG12_PAIRS: u16 = 1 << 0 | 1 << 7; // {14},{23}

fn diag12_circuit(theta: f64, rotation_steps: u16) -> Circuit {
    let mut c = Circuit::new(4);
    for (k, &(ctl, tgt)) in DIAG12.iter().enumerate() {
        c.push(Gate::Cnot(ctl, tgt));
        if rotation_steps >> k & 1 != 0 {
            c.push(Gate::Rz(tgt, theta));
        }
    }
    c
}

/// exp(+i(U/4)τ ΣZZZ) on the chain layout, 12 CNOTs, identity restore.
pub fn three_body_chain(tau: f64, u: f64) -> Circuit {
    diag12_circuit(-tau * u / 2.0, DIAG12_TRIPLES)
}

/// exp(−i(H_2bd + H_3bd)τ): the full diagonal part of the A splitting,
/// H_2bd = −(U/4)(Z₁Z₄+Z₂Z₃), H_3bd = −(U/4)ΣZZZ. Same ladder, six
/// rotations, all with the same angle.
pub fn a_diagonal_block(tau: f64, u: f64) -> Circuit {
    diag12_circuit(-tau * u / 2.0, DIAG12_TRIPLES | DIAG12_PAIRS)
}

/// One-body layer: e^{+2itτ X_k} on every target = Rx(−4tτ)⊗4.
pub fn one_body_layer(tau: f64, t: f64) -> Circuit {
    let mut c = Circuit::new(4);
    for q in 0..4 {
        c.push(Gate::Rx(q, -4.0 * t * tau));
    }
    c
}

/// Dense 4×4 of e^{−iH_B τ}, H_B = −2t(X_a+X_b) − (U/4) Z_aZ_b on a
/// qubit pair (little-endian within the pair).
pub fn hb_block_matrix(tau: f64, p: &ModelParams) -> DMatrix<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut h = DMatrix::zeros(4, 4);
    // X_a + X_b
    for b in 0..4usize {
        h[(b ^ 1, b)] += c(-2.0 * p.t);
        h[(b ^ 2, b)] += c(-2.0 * p.t);
    }
    for b in 0..4usize {
        let za = if b & 1 == 0 { 1.0 } else { -1.0 };
        let zb = if b & 2 == 0 { 1.0 } else { -1.0 };
        h[(b, b)] += c(-p.u / 4.0 * za * zb);
    }
    matrix_exp_i(&h, -tau)
}

/// exp(i·s·H) for Hermitian H via dense eigendecomposition.
pub fn matrix_exp_i(h: &DMatrix<Complex64>, s: f64) -> DMatrix<Complex64> {
    let sym = (h.clone() + h.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(sym);
    let dim = h.nrows();
    let mut d = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        d[(k, k)] = Complex64::from_polar(1.0, s * se.eigenvalues[k]);
    }
    &se.eigenvectors * d * se.eigenvectors.adjoint()
}

/// e^{−iH_B^{(i,j)}τ} synthesized onto qubits (lo, hi) of a 4-qubit
/// register through the two-qubit KAK decomposition (3 CNOTs).
pub fn hb_block_circuit(tau: f64, p: &ModelParams, pair: (usize, usize)) -> Circuit {
    let m = hb_block_matrix(tau, p);
    let (two, _phase) = kak::synthesize_two_qubit(&m).expect("H_B block synthesis");
    embed_pair(&two, pair)
}

/// Re-index a 2-qubit circuit (qubits 0,1) onto (pair.0, pair.1) of a
/// 4-qubit register.
pub fn embed_pair(c2: &Circuit, pair: (usize, usize)) -> Circuit {
    let map = [pair.0, pair.1];
    let mut c = Circuit::new(4);
    for g in &c2.gates {
        c.push(match *g {
            Gate::H(q) => Gate::H(map[q]),
            Gate::X(q) => Gate::X(map[q]),
            Gate::Z(q) => Gate::Z(map[q]),
            Gate::S(q) => Gate::S(map[q]),
            Gate::Sdg(q) => Gate::Sdg(map[q]),
            Gate::Rz(q, t) => Gate::Rz(map[q], t),
            Gate::Rx(q, t) => Gate::Rx(map[q], t),
            Gate::Cnot(a, b) => Gate::Cnot(map[a], map[b]),
            Gate::Cz(a, b) => Gate::Cz(map[a], map[b]),
            Gate::Swap(a, b) => Gate::Swap(map[a], map[b]),
        });
    }
    c
}

/// Single first-order Trotter step U(τ) for the chosen ordering, fully
/// lowered to the gate set. Global phase from the constant term of H is
/// dropped throughout. Qubits 0..3 ↔ T₁..T₄.
pub fn trotter_step(ordering: TrotterOrdering, tau: f64, p: &ModelParams) -> Circuit {
    let mut c = Circuit::new(4);
    match ordering {
        // circuit-time order: diagonal block, then one-body layer
        TrotterOrdering::A1 => {
            c.extend(a_diagonal_block(tau, p.u).gates);
            c.extend(one_body_layer(tau, p.t).gates);
        }
        TrotterOrdering::A2 => {
            c.extend(one_body_layer(tau, p.t).gates);
            c.extend(a_diagonal_block(tau, p.u).gates);
        }
        // circuit-time order: three-body, H_B(2,3), H_B(1,4)
        TrotterOrdering::B1 => {
            c.extend(three_body_chain(tau, p.u).gates);
            c.extend(hb_block_circuit(tau, p, (1, 2)).gates);
            c.extend(hb_block_circuit(tau, p, (0, 3)).gates);
        }
        TrotterOrdering::B2 => {
            c.extend(hb_block_circuit(tau, p, (1, 2)).gates);
            c.extend(hb_block_circuit(tau, p, (0, 3)).gates);
            c.extend(three_body_chain(tau, p.u).gates);
        }
    }
    c
}

/// Dense 16×16 of the ordering's defining operator product (oracle for
/// the circuit path and input to Trotter-error norms).
pub fn trotter_unitary(ordering: TrotterOrdering, tau: f64, p: &ModelParams) -> DMatrix<Complex64> {
    let h1 = one_body_layer(tau, p.t).unitary();
    let d = a_diagonal_block(tau, p.u).unitary();
    let hb23 = embed_pair_matrix(&hb_block_matrix(tau, p), (1, 2));
    let hb14 = embed_pair_matrix(&hb_block_matrix(tau, p), (0, 3));
    let zzz = three_body_chain(tau, p.u).unitary();
    match ordering {
        TrotterOrdering::A1 => h1 * d,
        TrotterOrdering::A2 => d * h1,
        TrotterOrdering::B1 => hb14 * hb23 * zzz,
        TrotterOrdering::B2 => zzz * hb14 * hb23,
    }
}

/// 4×4 two-qubit matrix placed on qubits (lo, hi) of the 4-qubit space.
pub fn embed_pair_matrix(m: &DMatrix<Complex64>, pair: (usize, usize)) -> DMatrix<Complex64> {
    let dim = 16;
    let (a, b) = pair;
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim as u64 {
        let sub_col = ((col >> a) & 1) | (((col >> b) & 1) << 1);
        let rest = col & !((1 << a) | (1 << b));
        for sub_row in 0..4u64 {
            let row = rest | ((sub_row & 1) << a) | (((sub_row >> 1) & 1) << b);
            out[(row as usize, col as usize)] = m[(sub_row as usize, sub_col as usize)];
        }
    }
    out
}

/// Controlled Pauli string (control = ancilla 0, targets shifted +1).
/// Diagonal strings lower to CZ per Z factor; X/Y factors conjugate a
/// CNOT with H / S†·H.
pub fn controlled_pauli(p: &PauliString) -> Result<Vec<Gate>, CoreError> {
    if p.phase_exp != 0 {
        return Err(CoreError::Invalid("controlled phased Pauli not supported".into()));
    }
    let mut gates = Vec::new();
    for k in 0..p.n_qubits {
        let q = k + 1;
        match ((p.x_mask >> k) & 1, (p.z_mask >> k) & 1) {
            (0, 0) => {}
            (0, 1) => gates.push(Gate::Cz(0, q)),
            (1, 0) => gates.push(Gate::Cnot(0, q)),
            _ => {
                // CY = (I⊗S)·CX·(I⊗S†)
                gates.push(Gate::Sdg(q));
                gates.push(Gate::Cnot(0, q));
                gates.push(Gate::S(q));
            }
        }
    }
    Ok(gates)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureBasis {
    X,
    Y,
    Z,
}

/// Hadamard-test assembly on 5 qubits (ancilla 0):
/// H(a); X(a); C-P_right; X(a); evolution (uncontrolled, targets);
/// C-P_left; ancilla basis change. P_right is controlled on |0⟩ (the
/// X pair), P_left on |1⟩; the trailing X of the textbook layout is
/// absorbed into the measurement so that ⟨X⟩ − i⟨Y⟩ equals
/// s = ⟨ψ|V† P_left V P_right|ψ⟩ directly.
pub fn hadamard_test_circuit(
    p_right: &PauliString,
    p_left: &PauliString,
    evolution: &Circuit,
    init: &Circuit,
    basis: MeasureBasis,
) -> Result<Circuit, CoreError> {
    if evolution.n_qubits != 4 || init.n_qubits != 4 {
        return Err(CoreError::Invalid("evolution/init must act on the 4 targets".into()));
    }
    let mut c = Circuit::new(5);
    c.extend(init.gates.iter().map(|g| g.shifted(1)));
    c.push(Gate::H(0));
    c.push(Gate::X(0));
    c.extend(controlled_pauli(p_right)?);
    c.push(Gate::X(0));
    c.extend(evolution.gates.iter().map(|g| g.shifted(1)));
    c.extend(controlled_pauli(p_left)?);
    match basis {
        MeasureBasis::X => c.push(Gate::H(0)),
        MeasureBasis::Y => {
            c.push(Gate::Sdg(0));
            c.push(Gate::H(0));
        }
        MeasureBasis::Z => {}
    }
    Ok(c)
}

/// Measurement-preserving rewrite: cancels adjacent inverse pairs and
/// removes target-only gates that commute all the way to the terminal
/// position (ancilla statistics are untouched; this is the SWAP/
/// trailing-diagonal absorption of the hand-compiled circuits).
pub fn optimize(c: &Circuit) -> Circuit {
    let mut gates = c.gates.clone();
    loop {
        let mut changed = false;
        // adjacent inverse pairs
        let mut k = 0;
        while k + 1 < gates.len() {
            if is_inverse_pair(&gates[k], &gates[k + 1]) {
                gates.drain(k..k + 2);
                changed = true;
                k = k.saturating_sub(1);
            } else {
                k += 1;
            }
        }
        // target-only gates that commute past everything after them
        let mut k = gates.len();
        while k > 0 {
            k -= 1;
            if gates[k].touches(0) {
                continue;
            }
            if gates[k + 1..].iter().all(|h| commutes(&gates[k], h)) {
                gates.remove(k);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Circuit { n_qubits: c.n_qubits, gates }
}

fn is_inverse_pair(a: &Gate, b: &Gate) -> bool {
    match (a, b) {
        (Gate::Rz(q1, t1), Gate::Rz(q2, t2)) | (Gate::Rx(q1, t1), Gate::Rx(q2, t2)) => {
            q1 == q2 && (t1 + t2).abs() < 1e-15
        }
        _ => *b == a.inverse() && matches!(
            a,
            Gate::H(_)
                | Gate::X(_)
                | Gate::Z(_)
                | Gate::S(_)
                | Gate::Sdg(_)
                | Gate::Cnot(..)
                | Gate::Cz(..)
                | Gate::Swap(..)
        ),
    }
}

/// Conservative commutation test: disjoint supports always commute;
/// diagonal gates commute with each other.
fn commutes(a: &Gate, b: &Gate) -> bool {
    let (a0, a1) = a.qubits();
    let (b0, b1) = b.qubits();
    let overlap = a0 == b0 || Some(a0) == b1 || a1 == Some(b0) || (a1.is_some() && a1 == b1);
    !overlap || (a.is_diagonal() && b.is_diagonal())
}

/// Entangling count under the declared convention.
pub fn cnot_count(c: &Circuit) -> usize {
    c.cnot_count()
}
