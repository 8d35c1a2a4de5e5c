//! Two-qubit KAK (Cartan) decomposition and 3-CNOT synthesis.
//!
//! Any U ∈ U(4) factors as e^{iφ}(K1l⊗K1r)·N(a,b,c)·(K2l⊗K2r) with
//! N(a,b,c) = exp(i(a XX + b YY + c ZZ)) and (a,b,c) in the Weyl
//! chamber. The decomposition follows the magic-basis construction:
//! strip the determinant phase, conjugate into the magic basis, and
//! simultaneously diagonalize the real and imaginary parts of
//! m₂ = UᵀU by a random real mixing (retried on degeneracy). The
//! canonical gate is then emitted through a fixed 3-CNOT template and
//! the single-qubit factors through ZXZ Euler angles (the gate set
//! carries Rz and Rx only). Kron order: left factor on qubit 1.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Circuit, Gate};
use crate::error::CoreError;

type CMat = DMatrix<Complex64>;

const PI: f64 = std::f64::consts::PI;
const PI2: f64 = PI / 2.0;
const PI4: f64 = PI / 4.0;
const PI32: f64 = 3.0 * PI2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Non-normalized magic basis (B·B† = 2I).
fn b_matrix() -> CMat {
    CMat::from_row_slice(4, 4, &[
        c(1., 0.), c(0., 1.), c(0., 0.), c(0., 0.),
        c(0., 0.), c(0., 0.), c(0., 1.), c(1., 0.),
        c(0., 0.), c(0., 0.), c(0., 1.), c(-1., 0.),
        c(1., 0.), c(0., -1.), c(0., 0.), c(0., 0.),
    ])
}

fn magic_out_of(u: &CMat) -> CMat {
    let b = b_matrix();
    b.adjoint().scale(0.5) * u * b
}

fn magic_into(u: &CMat) -> CMat {
    let b = b_matrix();
    b.clone() * u * b.adjoint().scale(0.5)
}

pub fn kron2(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn det2(m: &CMat) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn det4(m: &CMat) -> Complex64 {
    let lu = m.clone().lu();
    lu.determinant()
}

/// N(a,b,c) = exp(i(a XX + b YY + c ZZ)), dense (basis: qubit 1 ⊗ qubit 0).
pub fn canonical_gate(a: f64, b: f64, cc: f64) -> CMat {
    // XX, YY, ZZ commute; exponentiate on their shared eigenbasis.
    let mut m = CMat::zeros(4, 4);
    // eigenstructure over computational basis pairs (00,11) and (01,10):
    // XX |00⟩=|11⟩, YY |00⟩=−|11⟩, ZZ diag(1,−1,−1,1)
    let e = |th: f64| Complex64::from_polar(1.0, th);
    let (p, q) = (e(cc), e(-cc));
    m[(0, 0)] = p * c((a - b).cos(), 0.0);
    m[(3, 3)] = p * c((a - b).cos(), 0.0);
    m[(0, 3)] = p * c(0.0, (a - b).sin());
    m[(3, 0)] = p * c(0.0, (a - b).sin());
    m[(1, 1)] = q * c((a + b).cos(), 0.0);
    m[(2, 2)] = q * c((a + b).cos(), 0.0);
    m[(1, 2)] = q * c(0.0, (a + b).sin());
    m[(2, 1)] = q * c(0.0, (a + b).sin());
    m
}

/// Weyl decomposition result.
pub struct KakDecomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub global_phase: f64,
    pub k1l: CMat,
    pub k1r: CMat,
    pub k2l: CMat,
    pub k2r: CMat,
}

impl KakDecomposition {
    /// e^{iφ}(K1l⊗K1r)·N(a,b,c)·(K2l⊗K2r) — should reproduce the input.
    pub fn reassemble(&self) -> CMat {
        let n = canonical_gate(self.a, self.b, self.c);
        let m = kron2(&self.k1l, &self.k1r) * n * kron2(&self.k2l, &self.k2r);
        m * Complex64::from_polar(1.0, self.global_phase)
    }
}

/// Split a special-unitary product U = L⊗R into SU(2) factors plus a
/// residual phase (det L folded out as e^{2iφ}).
fn decompose_product_gate(su: &CMat) -> Result<(CMat, CMat, f64), CoreError> {
    let mut r = CMat::from_fn(2, 2, |i, j| su[(i, j)]);
    let mut det_r = det2(&r);
    if det_r.norm() < 0.1 {
        r = CMat::from_fn(2, 2, |i, j| su[(i + 2, j)]);
        det_r = det2(&r);
    }
    if det_r.norm() < 0.1 {
        return Err(CoreError::Internal("product-gate split: detR < 0.1".into()));
    }
    let s = det_r.sqrt();
    r.iter_mut().for_each(|x| *x /= s);
    let temp = su * kron2(&CMat::identity(2, 2), &r.adjoint());
    let mut l = CMat::from_fn(2, 2, |i, j| temp[(2 * i, 2 * j)]);
    let det_l = det2(&l);
    if det_l.norm() < 0.9 {
        return Err(CoreError::Internal("product-gate split: detL < 0.9".into()));
    }
    let sl = det_l.sqrt();
    l.iter_mut().for_each(|x| *x /= sl);
    Ok((l, r, det_l.arg() / 2.0))
}

fn arg_sort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    idx
}

pub fn kak_decompose(unitary: &CMat) -> Result<KakDecomposition, CoreError> {
    let ipz = CMat::from_row_slice(2, 2, &[c(0., 1.), c(0., 0.), c(0., 0.), c(0., -1.)]);
    let ipy = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)]);
    let ipx = CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]);

    let det_u = det4(unitary);
    let det_pow = det_u.powf(-0.25);
    let u = unitary.map(|x| x * det_pow);
    let mut global_phase = det_u.arg() / 4.0;
    let u_p = magic_out_of(&u);
    let m2 = u_p.transpose() * &u_p;

    // m2 is complex symmetric with m2†m2 = 1: its real and imaginary
    // parts commute and are simultaneously diagonalized by one real
    // orthogonal P. A random real mix breaks degeneracies; retry with
    // fresh draws if the check fails.
    let mut rng = ChaCha8Rng::seed_from_u64(2023);
    let mut found = None;
    for _ in 0..100 {
        let ra: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        let rb: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        let m2_real = DMatrix::<f64>::from_fn(4, 4, |i, j| {
            ra * m2[(i, j)].re + rb * m2[(i, j)].im
        });
        let sym = (&m2_real + m2_real.transpose()).scale(0.5);
        let se = nalgebra::SymmetricEigen::new(sym);
        let p_inner = se.eigenvectors.map(|x| c(x, 0.0));
        let d_full = p_inner.transpose() * &m2 * &p_inner;
        let d_inner: Vec<Complex64> = (0..4).map(|k| d_full[(k, k)]).collect();
        let mut diag = CMat::zeros(4, 4);
        for k in 0..4 {
            diag[(k, k)] = d_inner[k];
        }
        let compare = &p_inner * diag * p_inner.transpose();
        let ok = (&compare - &m2).iter().all(|x| x.norm() < 1.0e-11);
        if ok {
            found = Some((p_inner, d_inner));
            break;
        }
    }
    let (mut p, d_inner) =
        found.ok_or_else(|| CoreError::Internal("KAK: failed to diagonalize m2".into()))?;

    let mut d: Vec<f64> = d_inner.iter().map(|x| -x.arg() / 2.0).collect();
    d[3] = -d[0] - d[1] - d[2];
    let mut cs: Vec<f64> = (0..3).map(|i| ((d[i] + d[3]) / 2.0).rem_euclid(2.0 * PI)).collect();
    let cstemp: Vec<f64> = cs.iter().map(|x| x.rem_euclid(PI2)).map(|x| x.min(PI2 - x)).collect();
    let mut order = arg_sort(&cstemp);
    let (o0, o1, o2) = (order[1], order[2], order[0]);
    order[0] = o0;
    order[1] = o1;
    order[2] = o2;
    let (cs0, cs1, cs2) = (cs[order[0]], cs[order[1]], cs[order[2]]);
    cs[0] = cs0;
    cs[1] = cs1;
    cs[2] = cs2;
    let (d0, d1, d2) = (d[order[0]], d[order[1]], d[order[2]]);
    d[0] = d0;
    d[1] = d1;
    d[2] = d2;
    let p_orig = p.clone();
    for (i, &item) in order.iter().enumerate().take(3) {
        for row in 0..4 {
            p[(row, i)] = p_orig[(row, item)];
        }
    }
    if det4(&p).re < 0.0 {
        for row in 0..4 {
            p[(row, 3)] = -p[(row, 3)];
        }
    }
    let mut temp = CMat::zeros(4, 4);
    for k in 0..4 {
        temp[(k, k)] = Complex64::from_polar(1.0, d[k]);
    }
    let k1 = magic_into(&(&u_p * &p * temp));
    let k2 = magic_into(&p.transpose().into_owned());

    let (mut k1l, mut k1r, phase_l) = decompose_product_gate(&k1)?;
    let (k2l, mut k2r, phase_r) = decompose_product_gate(&k2)?;
    global_phase += phase_l + phase_r;

    // Fold into the Weyl chamber.
    if cs[0] > PI2 {
        cs[0] -= PI32;
        k1l = &k1l * &ipy;
        k1r = &k1r * &ipy;
        global_phase += PI2;
    }
    if cs[1] > PI2 {
        cs[1] -= PI32;
        k1l = &k1l * &ipx;
        k1r = &k1r * &ipx;
        global_phase += PI2;
    }
    let mut conjs = 0;
    if cs[0] > PI4 {
        cs[0] = PI2 - cs[0];
        k1l = &k1l * &ipy;
        k2r = &ipy * &k2r;
        conjs += 1;
        global_phase -= PI2;
    }
    if cs[1] > PI4 {
        cs[1] = PI2 - cs[1];
        k1l = &k1l * &ipx;
        k2r = &ipx * &k2r;
        conjs += 1;
        global_phase += PI2;
        if conjs == 1 {
            global_phase -= PI;
        }
    }
    if cs[2] > PI2 {
        cs[2] -= PI32;
        k1l = &k1l * &ipz;
        k1r = &k1r * &ipz;
        global_phase += PI2;
        if conjs == 1 {
            global_phase -= PI;
        }
    }
    if conjs == 1 {
        cs[2] = PI2 - cs[2];
        k1l = &k1l * &ipz;
        k2r = &ipz * &k2r;
        global_phase += PI2;
    }
    if cs[2] > PI4 {
        cs[2] -= PI2;
        k1l = &k1l * &ipz;
        k1r = &k1r * &ipz;
        global_phase -= PI2;
    }

    Ok(KakDecomposition {
        a: cs[1],
        b: cs[0],
        c: cs[2],
        global_phase,
        k1l,
        k1r,
        k2l,
        k2r,
    })
}

/// ZXZ Euler angles: U = e^{iφ}·Rz(α)·Rx(β)·Rz(γ).
pub fn euler_zxz(u: &CMat) -> (f64, f64, f64, f64) {
    let det = det2(u);
    let phase = det.arg() / 2.0;
    let inv = Complex64::from_polar(1.0, -phase);
    let v00 = u[(0, 0)] * inv;
    let v01 = u[(0, 1)] * inv;
    let (cc, ss) = (v00.norm(), v01.norm());
    let beta = 2.0 * ss.atan2(cc);
    if ss < 1e-12 {
        // pure Rz
        (-2.0 * v00.arg(), 0.0, 0.0, phase)
    } else if cc < 1e-12 {
        // Rx(π) up to Rz's: α−γ = −2 arg(v01) − π, take γ = 0
        (-2.0 * v01.arg() - PI, beta, 0.0, phase)
    } else {
        let sum = -2.0 * v00.arg();
        let diff = -2.0 * v01.arg() - PI;
        ((sum + diff) / 2.0, beta, (sum - diff) / 2.0, phase)
    }
}

/// Append a single-qubit unitary as Rz·Rx·Rz on wire q; returns its
/// dropped global phase.
fn push_1q(circ: &mut Circuit, q: usize, u: &CMat) -> f64 {
    let (alpha, beta, gamma, phase) = euler_zxz(u);
    // circuit time: Rz(γ), Rx(β), Rz(α)
    for g in [Gate::Rz(q, gamma), Gate::Rx(q, beta), Gate::Rz(q, alpha)] {
        let trivial = match g {
            Gate::Rz(_, t) | Gate::Rx(_, t) => t.abs() < 1e-14,
            _ => false,
        };
        if !trivial {
            circ.push(g);
        }
    }
    phase
}

/// Ry(θ) through the available gate set: S·Rx(θ)·S† (matrix order).
fn push_ry(circ: &mut Circuit, q: usize, theta: f64) {
    circ.push(Gate::Sdg(q));
    circ.push(Gate::Rx(q, theta));
    circ.push(Gate::S(q));
}

/// 3-CNOT template locally equivalent to N(a,b,c). Wire 0 is qubit 0
/// (low bit), wire 1 qubit 1 (kron-left).
fn core_circuit(a: f64, b: f64, cc: f64) -> Circuit {
    let mut circ = Circuit::new(2);
    // matrix order: CN10 · Ry(π/2−2b)@q1 · CN01 · (Ry(−2c−π/2)@q1 ⊗ Rz(2a+π/2)@q0) · CN10
    // circuit time reverses that.
    circ.push(Gate::Cnot(1, 0));
    circ.push(Gate::Rz(0, 2.0 * a + PI2));
    push_ry(&mut circ, 1, -2.0 * cc - PI2);
    circ.push(Gate::Cnot(0, 1));
    push_ry(&mut circ, 1, PI2 - 2.0 * b);
    circ.push(Gate::Cnot(1, 0));
    circ
}

/// Synthesize an arbitrary two-qubit unitary into ≤3 CNOTs plus
/// single-qubit Rz/Rx layers. Returns the circuit and the global phase
/// φ such that circuit·e^{iφ} = U (within numerical error).
pub fn synthesize_two_qubit(u: &CMat) -> Result<(Circuit, f64), CoreError> {
    if u.nrows() != 4 || u.ncols() != 4 {
        return Err(CoreError::DimensionMismatch(4, u.nrows()));
    }
    let kd = kak_decompose(u)?;

    // The core template must canonicalize to the same Weyl point as U
    // for the local-factor recovery to be valid. On chamber boundaries
    // (notably a = π/4, where ±c label the same class, and a ≈ b where
    // the coordinate ordering is ambiguous) the canonicalizer may pick
    // a different representative, so retry over the locally-equivalent
    // seed triples — coordinate permutations and the c mirror; the
    // reassembly residual is the authoritative guard.
    let seeds = [
        (kd.a, kd.b, kd.c),
        (kd.a, kd.b, -kd.c),
        (kd.b, kd.a, kd.c),
        (kd.b, kd.a, -kd.c),
        (kd.a, kd.c, kd.b),
        (kd.a, kd.c, -kd.b),
        (kd.c, kd.b, kd.a),
        (kd.c, kd.b, -kd.a),
        (kd.b, kd.c, kd.a),
        (kd.b, kd.c, -kd.a),
        (kd.c, kd.a, kd.b),
        (kd.c, kd.a, -kd.b),
    ];
    let mut last_err = f64::NAN;
    for (sa, sb, sc) in seeds {
        let core = core_circuit(sa, sb, sc);
        let core_u = core.unitary();
        let cd = kak_decompose(&core_u)?;
        // core = e^{iφc}(L1⊗)·N·(L2⊗) ⇒ U = e^{i(φ−φc)}(K1 L1†⊗)·core·(L2† K2⊗)
        let pre_l = cd.k2l.adjoint() * &kd.k2l;
        let pre_r = cd.k2r.adjoint() * &kd.k2r;
        let post_l = &kd.k1l * cd.k1l.adjoint();
        let post_r = &kd.k1r * cd.k1r.adjoint();

        let mut circ = Circuit::new(2);
        let mut phase = kd.global_phase - cd.global_phase;
        phase += push_1q(&mut circ, 1, &pre_l);
        phase += push_1q(&mut circ, 0, &pre_r);
        circ.extend(core.gates.iter().copied());
        phase += push_1q(&mut circ, 1, &post_l);
        phase += push_1q(&mut circ, 0, &post_r);

        let rebuilt = circ.unitary() * Complex64::from_polar(1.0, phase);
        last_err = (&rebuilt - u).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if last_err <= 1e-9 {
            return Ok((circ, phase));
        }
    }
    Err(CoreError::Internal(format!("two-qubit synthesis residual {last_err:.3e}")))
}
