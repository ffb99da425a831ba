//! Experiment configuration shared by all subcommands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::InradiusOptions;
use crate::greedy::{Algorithm, GreedyConfig};
use crate::guarantees::Convention;
use crate::synth::SynthSpec;

/// Subcommands of the `ssc` tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    LemmaValidate,
    ExtremalSolve,
    Trace,
    CcrSweep,
    Certify,
    Cluster,
    Gen,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::LemmaValidate,
        Command::ExtremalSolve,
        Command::Trace,
        Command::CcrSweep,
        Command::Certify,
        Command::Cluster,
        Command::Gen,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::LemmaValidate => "lemma-validate",
            Command::ExtremalSolve => "extremal-solve",
            Command::Trace => "trace",
            Command::CcrSweep => "ccr-sweep",
            Command::Certify => "certify",
            Command::Cluster => "cluster",
            Command::Gen => "gen",
        }
    }
}

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start + step * k as f64).collect()
}

/// All parameters of an experiment. Every field has a default, so `{}` is a
/// valid configuration; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub n: usize,
    pub d: usize,
    pub num_subspaces: usize,
    pub points_per_subspace: usize,
    pub rho: Vec<f64>,
    /// Noise levels; each command falls back to its own grid when absent.
    pub epsilon: Option<Vec<f64>>,
    /// Angles for `lemma-validate` (absent: uniform on (0, π/2)) and
    /// `extremal-solve`.
    pub phi: Option<Vec<f64>>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub mc_trials: usize,
    pub mc_dim: usize,
    pub algorithms: Vec<Algorithm>,
    /// Iteration cap; defaults to `d`.
    pub m_max: Option<usize>,
    pub tau_abs: f64,
    pub tau_rel: f64,
    pub convention: Convention,
    pub oracle_grid: usize,
    pub inradius_directions: usize,
    pub inradius_refine: usize,
    /// Input for `cluster`: a data-set sidecar (`.json`) or a points CSV.
    pub data_path: Option<PathBuf>,
    /// Cluster count for `cluster` when the input has no labels.
    pub num_clusters: Option<usize>,
    /// Rank of per-cluster PCA subspaces used for approximate AoD traces.
    pub pca_rank: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            n: 100,
            d: 20,
            num_subspaces: 3,
            points_per_subspace: 150,
            rho: vec![0.02, 0.5, 0.86],
            epsilon: None,
            phi: None,
            snr_db: grid(0.0, 3.0, 8),
            trials: 20,
            mc_trials: 5000,
            mc_dim: 5,
            algorithms: vec![Algorithm::Mp, Algorithm::Omp],
            m_max: None,
            tau_abs: crate::greedy::DEFAULT_TAU_ABS,
            tau_rel: crate::greedy::DEFAULT_TAU_REL,
            convention: Convention::LemmaConsistent,
            oracle_grid: 1_000_000,
            inradius_directions: 20_000,
            inradius_refine: 16,
            data_path: None,
            num_clusters: None,
            pca_rank: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Compact JSON of the effective configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`Self::to_json`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Multiply `n`, `d` and the points per subspace by `factor`.
    pub fn scale(&mut self, factor: f64) -> Result<()> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Config(format!("scale {factor} must be positive")));
        }
        let s = |v: usize| ((v as f64 * factor).round() as usize).max(1);
        self.n = s(self.n);
        self.d = s(self.d);
        self.points_per_subspace = s(self.points_per_subspace);
        if let Some(m) = self.m_max.as_mut() {
            *m = s(*m);
        }
        Ok(())
    }

    pub fn epsilons(&self, cmd: Command) -> Vec<f64> {
        if let Some(e) = &self.epsilon {
            return e.clone();
        }
        match cmd {
            Command::LemmaValidate => vec![0.2, 0.4, 0.6, 0.8],
            Command::ExtremalSolve => grid(0.05, 0.1, 10),
            _ => vec![0.1, 0.4, 0.7],
        }
    }

    pub fn extremal_phis(&self) -> Vec<f64> {
        self.phi.clone().unwrap_or_else(|| grid(0.05, 0.05, 30))
    }

    pub fn m_max(&self) -> usize {
        self.m_max.unwrap_or(self.d)
    }

    pub fn greedy(&self, algorithm: Algorithm) -> GreedyConfig {
        GreedyConfig {
            m_max: self.m_max(),
            tau_abs: self.tau_abs,
            tau_rel: self.tau_rel,
            algorithm,
            keep_residuals: true,
        }
    }

    pub fn synth_spec(&self, rho: f64, epsilon: f64, seed: u64) -> SynthSpec {
        SynthSpec {
            n: self.n,
            d: self.d,
            num_subspaces: self.num_subspaces,
            rho,
            points_per_subspace: self.points_per_subspace,
            epsilon,
            master_seed: seed,
        }
    }

    pub fn inradius(&self, seed: u64) -> InradiusOptions {
        InradiusOptions {
            directions: self.inradius_directions,
            refine: self.inradius_refine,
            seed,
            ..InradiusOptions::default()
        }
    }

    /// Check everything `cmd` will use before any computation starts.
    pub fn validate(&self, cmd: Command) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let eps = self.epsilons(cmd);
        if eps.is_empty() || eps.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return bad(format!("epsilon list {eps:?} must be nonempty and nonnegative"));
        }
        if self.algorithms.is_empty() {
            return bad("algorithm list is empty".into());
        }
        match cmd {
            Command::LemmaValidate => {
                if self.mc_trials == 0 || self.mc_dim < 2 {
                    return bad("need mc_trials ≥ 1 and mc_dim ≥ 2".into());
                }
                if let Some(p) = &self.phi {
                    if p.is_empty() || p.iter().any(|v| !(*v > 0.0 && *v < std::f64::consts::FRAC_PI_2)) {
                        return bad("phi values must lie in (0, π/2)".into());
                    }
                }
            }
            Command::ExtremalSolve => {
                let p = self.extremal_phis();
                if p.is_empty() || p.iter().any(|v| !(*v > 0.0 && *v < std::f64::consts::PI)) {
                    return bad("phi values must lie in (0, π)".into());
                }
                if self.oracle_grid < 16 {
                    return bad("oracle_grid too small".into());
                }
            }
            Command::Trace | Command::CcrSweep | Command::Certify | Command::Gen => {
                if self.trials == 0 {
                    return bad("trials must be at least 1".into());
                }
                if self.rho.is_empty() {
                    return bad("rho list is empty".into());
                }
                if cmd == Command::CcrSweep && self.snr_db.iter().any(|s| !s.is_finite()) {
                    return bad("snr_db values must be finite".into());
                }
                if cmd == Command::CcrSweep && self.snr_db.is_empty() {
                    return bad("snr_db list is empty".into());
                }
                for &rho in &self.rho {
                    self.synth_spec(rho, eps[0], 0).validate()?;
                }
                self.greedy(Algorithm::Mp).validate()?;
                if cmd == Command::Certify && self.inradius_directions == 0 {
                    return bad("inradius_directions must be positive".into());
                }
            }
            Command::Cluster => {
                if self.data_path.is_none() {
                    return bad("cluster needs data_path".into());
                }
                if self.m_max() == 0 {
                    return bad("m_max must be at least 1".into());
                }
                if self.pca_rank == Some(0) {
                    return bad("pca_rank must be positive".into());
                }
            }
        }
        Ok(())
    }
}
