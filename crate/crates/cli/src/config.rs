//! Flat key-value experiment configuration with `[section]` headers,
//! strict key validation, and a canonical hash for output provenance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nucorr_core::mitigation::{Extrapolant, MitigationConfig};
use nucorr_core::model::ModelParams;
use nucorr_core::noisy_sim::NoiseModel;
use nucorr_core::{MomentumVector, TrotterOrdering};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub qs: Vec<MomentumVector>,
    pub orderings: Vec<TrotterOrdering>,
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_points: usize,
    pub shots: u64,
    pub noise: NoiseModel,
    pub mitigation: MitigationConfig,
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub delta_omega: f64,
    pub source: String,
    pub fidelity: f64,
    pub contaminations: Vec<f64>,
    pub tau_e_stop: f64,
    pub tau_e_points: usize,
    pub r: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelParams::default(),
            qs: vec![MomentumVector::new(0, 1)],
            orderings: vec![TrotterOrdering::A2, TrotterOrdering::B2],
            tau_start: 0.0,
            tau_stop: 0.3,
            tau_points: 7,
            shots: 10_000,
            noise: NoiseModel::default(),
            mitigation: MitigationConfig::default(),
            seed: 0,
            epsilon: 0.01,
            delta: 0.1,
            delta_omega: 0.5,
            source: "exact".to_string(),
            fidelity: 1.0,
            contaminations: vec![1e-3, 1e-2, 1e-1],
            tau_e_stop: 1.0,
            tau_e_points: 11,
            r: 0.1,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "t", "u", "v", "e_a", "e_b", "q", "orderings", "tau_start", "tau_stop", "tau_points",
    "shots", "p1", "p2", "readout_flip", "scales", "extrapolant", "calibration_shots", "seed",
    "epsilon", "delta", "delta_omega", "source", "fidelity", "contaminations", "tau_e_stop",
    "tau_e_points", "r",
];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let mut map = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value, got `{raw}`", ln + 1))?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{key}`", ln + 1));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", ln + 1));
        }
    }
    build(&map)
}

fn build(map: &BTreeMap<String, String>) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    let num = |k: &str, d: f64| -> Result<f64, String> {
        map.get(k).map_or(Ok(d), |v| v.parse().map_err(|_| format!("bad number for `{k}`: {v}")))
    };
    let int = |k: &str, d: u64| -> Result<u64, String> {
        map.get(k).map_or(Ok(d), |v| v.parse().map_err(|_| format!("bad integer for `{k}`: {v}")))
    };
    cfg.model.t = num("t", cfg.model.t)?;
    cfg.model.u = num("u", cfg.model.u)?;
    cfg.model.v = num("v", cfg.model.v)?;
    cfg.model.e_a = num("e_a", cfg.model.e_a)?;
    cfg.model.e_b = num("e_b", cfg.model.e_b)?;
    if let Some(v) = map.get("q") {
        cfg.qs = v
            .split(';')
            .map(|pair| {
                let (m, n) = pair
                    .trim()
                    .split_once(',')
                    .ok_or_else(|| format!("bad momentum `{pair}` (want m,n)"))?;
                let (m, n): (u8, u8) = (
                    m.trim().parse().map_err(|_| format!("bad momentum `{pair}`"))?,
                    n.trim().parse().map_err(|_| format!("bad momentum `{pair}`"))?,
                );
                if m > 1 || n > 1 {
                    return Err(format!("momentum components must be 0 or 1: `{pair}`"));
                }
                Ok(MomentumVector::new(m, n))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = map.get("orderings") {
        cfg.orderings = v
            .split(',')
            .map(|s| s.trim().parse::<TrotterOrdering>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
    }
    cfg.tau_start = num("tau_start", cfg.tau_start)?;
    cfg.tau_stop = num("tau_stop", cfg.tau_stop)?;
    cfg.tau_points = int("tau_points", cfg.tau_points as u64)? as usize;
    cfg.shots = int("shots", cfg.shots)?;
    cfg.noise.p1 = num("p1", cfg.noise.p1)?;
    cfg.noise.p2 = num("p2", cfg.noise.p2)?;
    if let Some(v) = map.get("readout_flip") {
        let p: f64 = v.parse().map_err(|_| format!("bad number for `readout_flip`: {v}"))?;
        cfg.noise.readout = [[1.0 - p, p], [p, 1.0 - p]];
    }
    if let Some(v) = map.get("scales") {
        cfg.mitigation.scales = v
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| format!("bad scale `{s}`")))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = map.get("extrapolant") {
        cfg.mitigation.extrapolant = match v.as_str() {
            "linear" => Extrapolant::Linear,
            "richardson2" => Extrapolant::Richardson2,
            "exponential" => Extrapolant::Exponential,
            _ => return Err(format!("unknown extrapolant `{v}`")),
        };
    }
    cfg.mitigation.readout_calibration_shots =
        int("calibration_shots", cfg.mitigation.readout_calibration_shots)?;
    cfg.seed = int("seed", cfg.seed)?;
    cfg.epsilon = num("epsilon", cfg.epsilon)?;
    cfg.delta = num("delta", cfg.delta)?;
    cfg.delta_omega = num("delta_omega", cfg.delta_omega)?;
    if let Some(v) = map.get("source") {
        if !["exact", "trotter", "noisy"].contains(&v.as_str()) {
            return Err(format!("unknown spectral source `{v}`"));
        }
        cfg.source = v.clone();
    }
    cfg.fidelity = num("fidelity", cfg.fidelity)?;
    if let Some(v) = map.get("contaminations") {
        cfg.contaminations = v
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| format!("bad contamination `{s}`")))
            .collect::<Result<_, _>>()?;
    }
    cfg.tau_e_stop = num("tau_e_stop", cfg.tau_e_stop)?;
    cfg.tau_e_points = int("tau_e_points", cfg.tau_e_points as u64)? as usize;
    cfg.r = num("r", cfg.r)?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), String> {
    if cfg.tau_points == 0 || cfg.qs.is_empty() || cfg.orderings.is_empty() {
        return Err("grids and q/ordering lists must be non-empty".into());
    }
    if cfg.shots == 0 {
        return Err("shots must be ≥ 1".into());
    }
    if cfg.tau_stop < cfg.tau_start {
        return Err("tau_stop < tau_start".into());
    }
    if !(cfg.fidelity > 0.0 && cfg.fidelity <= 1.0) {
        return Err(format!("fidelity {} out of (0,1]", cfg.fidelity));
    }
    cfg.noise.validate().map_err(|e| e.to_string())?;
    cfg.mitigation.validate().map_err(|e| e.to_string())?;
    if cfg.epsilon <= 0.0 || cfg.delta <= 0.0 || cfg.delta_omega <= 0.0 || cfg.r <= 0.0 {
        return Err("epsilon, delta, delta_omega, and r must be positive".into());
    }
    if cfg.tau_e_points < 2 {
        return Err("tau_e_points must be ≥ 2".into());
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn tau_grid(&self) -> Vec<f64> {
        if self.tau_points == 1 {
            return vec![self.tau_start];
        }
        let step = (self.tau_stop - self.tau_start) / (self.tau_points - 1) as f64;
        (0..self.tau_points).map(|i| self.tau_start + step * i as f64).collect()
    }

    /// Canonical rendering: every effective setting, sorted, one per line.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "contaminations = {:?}", self.contaminations);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "delta_omega = {}", self.delta_omega);
        let _ = writeln!(s, "e_a = {}", self.model.e_a);
        let _ = writeln!(s, "e_b = {}", self.model.e_b);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "extrapolant = {:?}", self.mitigation.extrapolant);
        let _ = writeln!(s, "fidelity = {}", self.fidelity);
        let _ = writeln!(
            s,
            "calibration_shots = {}",
            self.mitigation.readout_calibration_shots
        );
        let _ = writeln!(s, "orderings = {:?}", self.orderings);
        let _ = writeln!(s, "p1 = {}", self.noise.p1);
        let _ = writeln!(s, "p2 = {}", self.noise.p2);
        let _ = writeln!(s, "q = {:?}", self.qs.iter().map(|q| (q.m, q.n)).collect::<Vec<_>>());
        let _ = writeln!(s, "r = {}", self.r);
        let _ = writeln!(s, "readout = {:?}", self.noise.readout);
        let _ = writeln!(s, "scales = {:?}", self.mitigation.scales);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "shots = {}", self.shots);
        let _ = writeln!(s, "source = {}", self.source);
        let _ = writeln!(s, "t = {}", self.model.t);
        let _ = writeln!(s, "tau_e_points = {}", self.tau_e_points);
        let _ = writeln!(s, "tau_e_stop = {}", self.tau_e_stop);
        let _ = writeln!(s, "tau_points = {}", self.tau_points);
        let _ = writeln!(s, "tau_start = {}", self.tau_start);
        let _ = writeln!(s, "tau_stop = {}", self.tau_stop);
        let _ = writeln!(s, "u = {}", self.model.u);
        let _ = writeln!(s, "v = {}", self.model.v);
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
