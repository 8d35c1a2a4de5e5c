//! Dense checks of the gate-synthesis layer: two-qubit KAK synthesis on
//! random unitaries, the diagonal ladders against exact exponentials,
//! and full Trotter steps against their defining operator products.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nucorr_core::circuits::{
    self, a_diagonal_block, hb_block_matrix, kak, matrix_exp_i, three_body_chain,
    three_body_propagator, trotter_step, trotter_unitary, TrotterOrdering,
};
use nucorr_core::model::ModelParams;
use nucorr_core::pauli::{PauliString, QubitOperator};

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let h = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let herm = (&h + h.adjoint()).scale(0.5);
    matrix_exp_i(&herm, rng.gen::<f64>() * 4.0 - 2.0)
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Max diff after aligning global phase on the largest entry of `a`.
fn phase_aligned_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if a[(i, j)].norm() > best {
                best = a[(i, j)].norm();
                idx = (i, j);
            }
        }
    }
    let ph = a[idx] / b[idx];
    let ph = ph / ph.norm();
    max_abs_diff(a, &(b * ph))
}

#[test]
fn kak_synthesis_random_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let u = random_unitary(4, &mut rng);
        // synthesize_two_qubit verifies its own residual (≤1e-9) and
        // errors out otherwise; also check the CNOT budget.
        let (circ, phase) = kak::synthesize_two_qubit(&u).unwrap();
        assert!(circ.cnot_count() <= 3);
        let rebuilt = circ.unitary() * Complex64::from_polar(1.0, phase);
        assert!(max_abs_diff(&rebuilt, &u) < 1e-9);
    }
}

#[test]
fn kak_reassembles_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let u = random_unitary(4, &mut rng);
        let kd = kak::kak_decompose(&u).unwrap();
        assert!(kd.a >= kd.b && kd.b >= kd.c.abs() - 1e-12, "chamber violation");
        assert!(kd.a <= std::f64::consts::FRAC_PI_4 + 1e-12);
        assert!(max_abs_diff(&kd.reassemble(), &u) < 1e-10);
    }
}

fn zzz_exponential(tau: f64, u: f64) -> DMatrix<Complex64> {
    let mut op = QubitOperator::zero(4);
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                let mut label = ['I'; 4];
                label[i] = 'Z';
                label[j] = 'Z';
                label[k] = 'Z';
                let s: String = label.iter().collect();
                op.add_term(PauliString::from_label(&s).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
    }
    matrix_exp_i(&op.to_matrix().unwrap(), u / 4.0 * tau)
}

#[test]
fn three_body_ladders_match_exponential() {
    let (tau, u) = (0.37, 2.0);
    let exact = zzz_exponential(tau, u);
    assert!(max_abs_diff(&three_body_propagator(tau, u).unitary(), &exact) < 1e-10);
    assert!(max_abs_diff(&three_body_chain(tau, u).unitary(), &exact) < 1e-10);
    assert_eq!(three_body_chain(tau, u).cnot_count(), 12);
}

#[test]
fn a_diagonal_block_matches_exponential() {
    let (tau, u) = (0.29, 2.0);
    let mut op = QubitOperator::zero(4);
    // H_2bd = −(U/4)(Z₁Z₄ + Z₂Z₃), H_3bd = −(U/4)·ΣZZZ; block is
    // exp(−i(H_2bd+H_3bd)τ) = exp(+i(U/4)τ(Z₁Z₄+Z₂Z₃+ΣZZZ)).
    for label in ["ZIIZ", "IZZI"] {
        op.add_term(PauliString::from_label(label).unwrap(), Complex64::new(1.0, 0.0));
    }
    let pairs = op.to_matrix().unwrap();
    let exact = matrix_exp_i(&pairs, u / 4.0 * tau) * zzz_exponential(tau, u);
    assert!(max_abs_diff(&a_diagonal_block(tau, u).unitary(), &exact) < 1e-10);
}

#[test]
fn hb_block_circuit_matches_matrix() {
    let p = ModelParams::default();
    let tau = 0.13;
    let exact = circuits::embed_pair_matrix(&hb_block_matrix(tau, &p), (1, 2));
    let circ = circuits::hb_block_circuit(tau, &p, (1, 2));
    assert!(phase_aligned_diff(&exact, &circ.unitary()) < 1e-9);
}

#[test]
fn trotter_steps_match_defining_products() {
    let p = ModelParams::default();
    for ordering in TrotterOrdering::ALL {
        for tau in [0.05, 0.2] {
            let exact = trotter_unitary(ordering, tau, &p);
            let circ = trotter_step(ordering, tau, &p);
            assert!(
                phase_aligned_diff(&exact, &circ.unitary()) < 1e-9,
                "{} τ={tau}",
                ordering.tag()
            );
        }
    }
}

#[test]
fn trotter_unitary_is_first_order_accurate() {
    // ‖U_trotter(τ) − e^{−iHτ}‖ = O(τ²) per step; halving τ with two
    // steps roughly halves the error over a fixed interval.
    let p = ModelParams::default();
    let h = nucorr_core::model::build_qubit_hamiltonian(&p).to_matrix().unwrap();
    // strip the constant so phases match the circuit convention
    let shift = 8.0 * p.t + p.u / 2.0;
    let h0 = &h - DMatrix::identity(16, 16) * Complex64::new(shift, 0.0);
    for ordering in TrotterOrdering::ALL {
        let tau = 0.1;
        let exact = matrix_exp_i(&h0, -tau);
        let one = trotter_unitary(ordering, tau, &p);
        let half = trotter_unitary(ordering, tau / 2.0, &p);
        let two = &half * &half;
        let e1 = (&one - &exact).iter().map(|x| x.norm()).fold(0.0, f64::max);
        let e2 = (&two - &exact).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(e1 < 0.1, "{} single-step error too large: {e1}", ordering.tag());
        assert!(e2 < 0.7 * e1, "{} not converging: {e1} → {e2}", ordering.tag());
    }
}
