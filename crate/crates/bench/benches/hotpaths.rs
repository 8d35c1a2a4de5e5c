use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use nucorr_core::circuits::{hadamard_test_circuit, trotter_step, Circuit, MeasureBasis};
use nucorr_core::model::{build_qubit_hamiltonian, correlator_terms};
use nucorr_core::noisy_sim::{run_ideal, run_noisy, DensityMatrix, NoiseModel, StateVector};
use nucorr_core::oracle::{diagonalize, CorrelatorEngine};
use nucorr_core::spectral::{riemann_spectrum, two_time_correlator, SpectralSource};
use nucorr_core::{ModelParams, MomentumVector, TrotterOrdering};

fn ground(p: &ModelParams) -> Vec<Complex64> {
    diagonalize(&build_qubit_hamiltonian(p)).unwrap().ground_state()
}

fn test_circuit(p: &ModelParams) -> Circuit {
    let term = &correlator_terms(MomentumVector::new(0, 1), p)[1];
    let evo = trotter_step(TrotterOrdering::B2, 0.1, p);
    hadamard_test_circuit(&term.right, &term.left, &evo, &Circuit::new(4), MeasureBasis::X)
        .unwrap()
}

fn bench_diagonalize(c: &mut Criterion) {
    let h = build_qubit_hamiltonian(&ModelParams::default());
    c.bench_function("diagonalize_16", |b| b.iter(|| diagonalize(&h).unwrap()));
}

fn bench_correlator_eval(c: &mut Criterion) {
    let p = ModelParams::default();
    let h = build_qubit_hamiltonian(&p);
    let h_i = nucorr_core::model::build_excitation(MomentumVector::new(0, 1), &p);
    let eigs = diagonalize(&h).unwrap();
    let psi = eigs.ground_state();
    let engine = CorrelatorEngine::new(&eigs, &h_i, &psi).unwrap();
    c.bench_function("exact_correlator_eval", |b| b.iter(|| engine.eval(0.17)));
}

fn bench_pure_run(c: &mut Criterion) {
    let p = ModelParams::default();
    let circuit = test_circuit(&p);
    let init = StateVector::with_targets(&ground(&p)).unwrap();
    c.bench_function("statevector_hadamard_test", |b| {
        b.iter(|| run_ideal(&circuit, &init).unwrap())
    });
}

fn bench_noisy_run(c: &mut Criterion) {
    let p = ModelParams::default();
    let circuit = test_circuit(&p);
    let init = DensityMatrix::from_pure(&StateVector::with_targets(&ground(&p)).unwrap());
    let noise = NoiseModel::default();
    c.bench_function("density_matrix_hadamard_test", |b| {
        b.iter(|| run_noisy(&circuit, &init, &noise).unwrap())
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let p = ModelParams::default();
    let h = build_qubit_hamiltonian(&p);
    let h_i = nucorr_core::model::build_excitation(MomentumVector::new(0, 1), &p);
    let psi = ground(&p);
    let grid = two_time_correlator(&h, &h_i, &psi, 0.1, 10, &SpectralSource::Exact).unwrap();
    let omegas: Vec<f64> = (-64..=64).map(|k| k as f64 * 0.25).collect();
    c.bench_function("two_time_grid_21x21", |b| {
        b.iter(|| two_time_correlator(&h, &h_i, &psi, 0.1, 10, &SpectralSource::Exact).unwrap())
    });
    c.bench_function("riemann_spectrum_129", |b| {
        b.iter(|| riemann_spectrum(&grid, &omegas).unwrap())
    });
}

criterion_group!(
    benches,
    bench_diagonalize,
    bench_correlator_eval,
    bench_pure_run,
    bench_noisy_run,
    bench_spectrum
);
criterion_main!(benches);
