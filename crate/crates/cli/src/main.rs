//! Batch experiment driver: parse a flat config, run one of the five
//! pipelines, and emit deterministic CSV/JSON artifacts.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use nucorr_core::circuits::{hadamard_test_circuit, trotter_step, Circuit};
use nucorr_core::circuits::reference::{row_operators, table_cnot_count};
use nucorr_core::estimation::{
    estimate_correlator, exact_series, exact_trotter_series, measurement_budget, quality_metrics,
    CorrelatorSeries, Variant,
};
use nucorr_core::model::{build_excitation, build_qubit_hamiltonian};
use nucorr_core::oracle::{diagonalize, euclidean_correlator, make_contaminated_state};
use nucorr_core::spectral::{
    default_omega_grid, resolution_cost, riemann_spectrum, two_time_correlator, SpectralSource,
};
use nucorr_core::{CoreError, MeasureBasis, TrotterOrdering};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "nucorr", about = "Correlation-function simulator driver", version)]
struct Cli {
    /// Flat key-value config file; defaults apply for missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Report gate counts lowered to the T-shaped device layout only
    /// (default reports both the all-to-all and lowered counts).
    #[arg(long, global = true)]
    t_connectivity: bool,
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand, Clone, Copy)]
enum Mode {
    /// Bare/mitigated/exact correlator series and quality metrics.
    Correlator,
    /// Two-time grid and Riemann-sum frequency reconstruction.
    Spectrum,
    /// Measurement budget for the configured precision target.
    Budget,
    /// Entangling-gate counts of the Hadamard-test circuits.
    Counts,
    /// Euclidean correlator contamination scan.
    Euclidean,
}

enum CliError {
    Config(String),
    Internal(String),
    Io(String),
}

impl CliError {
    fn exit(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Internal(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Internal(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit()
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut cfg = config::parse_config(&text).map_err(CliError::Config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    match cli.mode {
        Mode::Correlator => run_correlator(&cfg, &cli.out),
        Mode::Spectrum => run_spectrum(&cfg, &cli.out),
        Mode::Budget => run_budget(&cfg, &cli.out),
        Mode::Counts => run_counts(&cfg, &cli.out, cli.t_connectivity),
        Mode::Euclidean => run_euclidean(&cfg, &cli.out),
    }
}

fn header(cfg: &ExperimentConfig, mode: &str) -> String {
    format!("# mode = {mode}\n# config_hash = {}\n", cfg.hash())
}

fn write_artifact(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn series_csv(cfg: &ExperimentConfig, series: &CorrelatorSeries) -> String {
    let mut s = header(cfg, "correlator");
    s.push_str("tau, re, re_err, im, im_err\n");
    for i in 0..series.taus.len() {
        let _ = writeln!(
            s,
            "{:.12e}, {:.12e}, {:.12e}, {:.12e}, {:.12e}",
            series.taus[i],
            series.values[i].re,
            series.sigmas[i].0,
            series.values[i].im,
            series.sigmas[i].1
        );
    }
    s
}

fn variant_tag(v: Variant) -> &'static str {
    match v {
        Variant::Bare => "bare",
        Variant::Mitigated => "mitigated",
        Variant::ExactTrotter => "exact_trotter",
        Variant::Exact => "exact",
    }
}

fn ground_state(cfg: &ExperimentConfig) -> Result<Vec<Complex64>, CoreError> {
    let eigs = diagonalize(&build_qubit_hamiltonian(&cfg.model))?;
    if cfg.fidelity < 1.0 {
        let dirty = make_contaminated_state(&eigs, cfg.fidelity, cfg.seed)?;
        Ok(dirty.to_state_vector(&eigs))
    } else {
        Ok(eigs.ground_state())
    }
}

fn run_correlator(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let taus = cfg.tau_grid();
    let psi = ground_state(cfg)?;
    let mut quality = serde_json::Map::new();
    for &q in &cfg.qs {
        for &ordering in &cfg.orderings {
            let (bare, mitigated) = estimate_correlator(
                q,
                ordering,
                &taus,
                cfg.shots,
                &cfg.noise,
                &cfg.mitigation,
                &psi,
                &cfg.model,
                cfg.seed,
            )?;
            let trotter = exact_trotter_series(q, ordering, &taus, &psi, &cfg.model)?;
            let exact = exact_series(q, ordering, &taus, &psi, &cfg.model)?;
            for series in [&bare, &mitigated, &trotter, &exact] {
                let name = format!(
                    "correlator_q{}{}_{}_{}.csv",
                    q.m,
                    q.n,
                    ordering.tag().to_lowercase(),
                    variant_tag(series.variant)
                );
                write_artifact(out, &name, &series_csv(cfg, series))?;
            }
            for series in [&bare, &mitigated] {
                // identity-only series carry zero σ; χ² is undefined there
                if series.sigmas.iter().any(|&(a, b)| a <= 0.0 || b <= 0.0) {
                    continue;
                }
                let rep = quality_metrics(series, &exact, cfg.r, false)?;
                let key = format!(
                    "q{}{}-{}-{}",
                    q.m,
                    q.n,
                    ordering.tag(),
                    variant_tag(series.variant)
                );
                quality.insert(key, serde_json::to_value(rep).unwrap());
            }
        }
    }
    let report = serde_json::json!({
        "config_hash": cfg.hash(),
        "quality": quality,
    });
    write_artifact(out, "quality.json", &format!("{:#}\n", report))?;
    println!("correlator: wrote {} series files + quality.json", 4 * cfg.qs.len() * cfg.orderings.len());
    Ok(())
}

fn run_spectrum(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let h = build_qubit_hamiltonian(&cfg.model);
    let h_i = build_excitation(cfg.qs[0], &cfg.model);
    let psi = ground_state(cfg)?;
    let source = match cfg.source.as_str() {
        "exact" => SpectralSource::Exact,
        "trotter" => SpectralSource::Trotter { ordering: cfg.orderings[0] },
        _ => SpectralSource::Noisy { ordering: cfg.orderings[0], noise: cfg.noise },
    };
    let (n_t, evals) = resolution_cost(cfg.delta, cfg.delta_omega)?;
    let grid = two_time_correlator(&h, &h_i, &psi, cfg.delta, n_t, &source)?;
    if grid.evaluations != evals {
        return Err(CliError::Internal(format!(
            "evaluation counter {} disagrees with cost model {evals}",
            grid.evaluations
        )));
    }
    let omegas = default_omega_grid(cfg.delta, cfg.delta_omega)?;
    let spec = riemann_spectrum(&grid, &omegas)?;
    let mut s = header(cfg, "spectrum");
    let _ = writeln!(s, "# n_t = {n_t}, correlator_evaluations = {evals}");
    s.push_str("omega, re_S, im_S\n");
    for (w, v) in spec.omegas.iter().zip(&spec.s_values) {
        let _ = writeln!(s, "{:.12e}, {:.12e}, {:.12e}", w, v.re, v.im);
    }
    write_artifact(out, "spectrum.csv", &s)?;
    println!("spectrum: N_t = {n_t}, {evals} correlator evaluations, {} frequencies", omegas.len());
    Ok(())
}

fn run_budget(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let alphas: Vec<Vec<f64>> = cfg
        .qs
        .iter()
        .map(|&q| build_excitation(q, &cfg.model).terms().map(|(_, c)| c.re).collect())
        .collect();
    let budget = measurement_budget(cfg.epsilon, &alphas)?;
    let mut s = header(cfg, "budget");
    let _ = writeln!(s, "epsilon = {}", cfg.epsilon);
    let _ = writeln!(s, "n_terms = {}", budget.n_terms);
    let _ = writeln!(s, "total_measurements = {}", budget.tight);
    let _ = writeln!(s, "loose_bound = {}", budget.loose);
    let _ = writeln!(s, "per_term_shots = {}", budget.per_term);
    write_artifact(out, "budget.txt", &s)?;
    print!("{s}");
    Ok(())
}

/// All-to-all assembly count for one table cell: plain Hadamard-test
/// circuit, entangling gates weighted (SWAP = 3 CNOTs).
fn generic_count(
    ordering: TrotterOrdering,
    row: usize,
    cfg: &ExperimentConfig,
) -> Result<usize, CliError> {
    let (left, right) = row_operators(row)?;
    let evo = trotter_step(ordering, 0.1, &cfg.model);
    let c = hadamard_test_circuit(&right, &left, &evo, &Circuit::new(4), MeasureBasis::X)?;
    Ok(c.cnot_count())
}

fn run_counts(cfg: &ExperimentConfig, out: &Path, t_only: bool) -> Result<(), CliError> {
    let row_labels = ["<Z1 Z1>", "<Z1 Z3>", "<Z3Z4 Z1Z2>", "<Z1Z2 Z1Z2>"];
    let mut s = header(cfg, "counts");
    s.push_str("# CNOT counts per Hadamard-test circuit (T-shaped device lowering)\n");
    let _ = writeln!(s, "{:<14} {:>5} {:>5} {:>5} {:>5}", "operator", "A1", "A2", "B1", "B2");
    for row in 1..=4usize {
        let mut line = format!("{:<14}", row_labels[row - 1]);
        for ordering in TrotterOrdering::ALL {
            let _ = write!(line, " {:>5}", table_cnot_count(ordering, row, 0.1, &cfg.model)?);
        }
        s.push_str(&line);
        s.push('\n');
    }
    if !t_only {
        s.push_str("# all-to-all assembly, unlowered (SWAP counted as 3)\n");
        for row in 1..=4usize {
            let mut line = format!("{:<14}", row_labels[row - 1]);
            for ordering in TrotterOrdering::ALL {
                let _ = write!(line, " {:>5}", generic_count(ordering, row, cfg)?);
            }
            s.push_str(&line);
            s.push('\n');
        }
    }
    write_artifact(out, "counts.txt", &s)?;
    print!("{s}");
    Ok(())
}

fn run_euclidean(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let eigs = diagonalize(&build_qubit_hamiltonian(&cfg.model))?;
    let h_i = build_excitation(cfg.qs[0], &cfg.model);
    let step = cfg.tau_e_stop / (cfg.tau_e_points - 1) as f64;
    let mut clean = vec![Complex64::new(0.0, 0.0); eigs.dim()];
    clean[0] = Complex64::new(1.0, 0.0);
    let mut s = header(cfg, "euclidean");
    s.push_str("c_m, tau_e, c_e, c_e_clean, deviation\n");
    for &cm in &cfg.contaminations {
        if !(0.0..1.0).contains(&cm) {
            return Err(CliError::Config(format!("contamination amplitude {cm} out of [0,1)")));
        }
        let dirty = make_contaminated_state(&eigs, 1.0 - cm * cm, cfg.seed)?;
        for i in 0..cfg.tau_e_points {
            let tau_e = step * i as f64;
            let c_e = euclidean_correlator(&eigs, &h_i, &dirty.coefficients, tau_e)?;
            let c_e_clean = euclidean_correlator(&eigs, &h_i, &clean, tau_e)?;
            let _ = writeln!(
                s,
                "{:.12e}, {:.12e}, {:.12e}, {:.12e}, {:.12e}",
                cm,
                tau_e,
                c_e,
                c_e_clean,
                c_e - c_e_clean
            );
        }
    }
    write_artifact(out, "euclidean.csv", &s)?;
    println!(
        "euclidean: {} contamination levels × {} imaginary times",
        cfg.contaminations.len(),
        cfg.tau_e_points
    );
    Ok(())
}
