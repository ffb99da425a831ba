//! Sufficient conditions for correct neighbor selection under bounded noise,
//! and their evaluation along actual MP/OMP runs.
//!
//! The first selection is certified by comparing the worst inter-cluster
//! coherence against the in-radius after a noise penalty built from the
//! extremes of `f_φ`. Each later selection `m + 1` is certified when the
//! residual `r_m` stays angularly closer to the clean points of its own
//! cluster than any other subspace can be, with a `2ε` allowance.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::f_extremes;
use crate::geometry::{aod, mutual_coherence, DataSet, GeometrySummary, SubspaceModel};
use crate::greedy::{Algorithm, Dictionary, GreedyConfig, GreedyTrace};
use crate::numerics::{Mat, Vector};

/// How the `f` extremes enter the first-selection penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Convention {
    /// `max f − min f`, consistent with the noisy inner-product bounds.
    #[default]
    #[serde(rename = "lemma")]
    LemmaConsistent,
    /// `ε (max f − min f)`.
    #[serde(rename = "printed")]
    AsPrinted,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::LemmaConsistent => "lemma",
            Convention::AsPrinted => "printed",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma" => Ok(Convention::LemmaConsistent),
            "printed" => Ok(Convention::AsPrinted),
            other => Err(Error::InvalidArgument(format!("unknown convention {other:?}"))),
        }
    }
}

/// First-selection certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eq9Check {
    pub holds: bool,
    /// `μ_c`.
    pub lhs: f64,
    /// `r_k − penalty`.
    pub rhs: f64,
    pub margin: f64,
    pub penalty: f64,
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} outside (0, 1)")))
    }
}

/// `μ_c < r_k − [max f_{arccos μ_c} − min f_{arccos r_k}]` (times `ε` under
/// [`Convention::AsPrinted`]).
pub fn check_eq9(mu_c: f64, r_k: f64, eps: f64, convention: Convention) -> Result<Eq9Check> {
    open_unit("mu_c", mu_c)?;
    open_unit("r_k", r_k)?;
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise bound {eps} is negative")));
    }
    let penalty = if eps == 0.0 {
        0.0
    } else {
        let spread = f_extremes(mu_c.acos(), eps).f_max - f_extremes(r_k.acos(), eps).f_min;
        match convention {
            Convention::LemmaConsistent => spread,
            Convention::AsPrinted => eps * spread,
        }
    };
    let rhs = r_k - penalty;
    let margin = rhs - mu_c;
    Ok(Eq9Check {
        holds: margin > 0.0,
        lhs: mu_c,
        rhs,
        margin,
        penalty,
    })
}

/// Per-iteration certificate for residual `r_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eq10Check {
    pub m: usize,
    pub holds: bool,
    /// `cos(max{θ_k − φ_m, 0}) + 2ε`.
    pub lhs: f64,
    /// `max_j |cos ∠(r_m, x_j)|` over the clean in-cluster points.
    pub rhs: f64,
    pub aod: f64,
    pub theta_k: f64,
}

/// Evaluate the iteration certificate for residual `r`. `exclude` is the
/// column of `xk_clean` holding the query's own clean point, if present.
pub fn check_eq10(
    r: &Vector,
    model: &SubspaceModel,
    theta_k: f64,
    xk_clean: &Mat,
    exclude: Option<usize>,
    eps: f64,
) -> Result<Eq10Check> {
    if !(theta_k > 0.0 && theta_k <= FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("theta_k = {theta_k} outside (0, π/2]")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise bound {eps} is negative")));
    }
    let phi = aod(r, model)?;
    let lhs = (theta_k - phi).max(0.0).cos() + 2.0 * eps;
    let rn = r.norm();
    let rhs = xk_clean
        .column_iter()
        .enumerate()
        .filter(|&(j, _)| Some(j) != exclude)
        .map(|(_, x)| (x.dot(r) / rn).abs())
        .fold(0.0, f64::max);
    Ok(Eq10Check {
        m: 0,
        holds: rhs - lhs > 0.0,
        lhs,
        rhs,
        aod: phi,
        theta_k,
    })
}

/// Noiseless OMP condition for cluster `k`: the normalized residuals `w_k`
/// are less coherent with every other cluster than the in-radius `r_k`.
pub fn check_noiseless_omp(data: &DataSet, k: usize, w_k: &Mat, r_k: f64) -> Result<bool> {
    let clean = data.clean_required()?;
    let noisy = data.noise_bound.is_some_and(|e| e > 0.0) || &data.points != clean;
    if noisy {
        return Err(Error::NoisyData);
    }
    let l = data.num_clusters().ok_or(Error::MissingGroundTruth("labels"))?;
    let mut worst = 0.0_f64;
    for other in (0..l).filter(|&o| o != k) {
        worst = worst.max(mutual_coherence(w_k, &data.clean_cluster(other)?)?);
    }
    Ok(worst < r_k)
}

/// Every selected neighbor shares the query's label.
pub fn sdp_verdict(trace: &GreedyTrace, labels: &[usize]) -> bool {
    let k = labels[trace.query_index];
    trace.selections.iter().all(|&j| labels[j] == k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub query_index: usize,
    pub cluster: usize,
    pub convention: Convention,
    pub eq9: Eq9Check,
    /// One entry per nonzero residual `r_m`, `m = 1, 2, …`.
    pub eq10_per_iter: Vec<Eq10Check>,
    pub selections: Vec<usize>,
    /// All selections are in the query's cluster.
    pub sdp: bool,
    /// Number of leading selections the certificates guarantee correct.
    pub certified: usize,
    /// A certified selection was nevertheless wrong.
    pub violation: bool,
}

impl CertificateReport {
    pub fn eq9_holds(&self) -> bool {
        self.eq9.holds
    }
}

/// Length of the certified prefix: the first selection needs the
/// first-selection certificate, and selection `m + 1` additionally needs
/// the iteration certificate at every `1..=m`.
fn certified_prefix(eq9: &Eq9Check, eq10: &[Eq10Check], iterations: usize) -> usize {
    if !eq9.holds {
        return 0;
    }
    let chain = eq10.iter().take_while(|c| c.holds).count();
    (1 + chain).min(iterations)
}

/// Certificates for existing traces (which must retain residuals).
pub fn certify_traces(
    data: &DataSet,
    models: &[SubspaceModel],
    geometry: &GeometrySummary,
    traces: &[GreedyTrace],
    convention: Convention,
) -> Result<Vec<CertificateReport>> {
    let labels = data.labels_required()?;
    let clean = data.clean_required()?;
    let eps = data.noise_bound.unwrap_or(0.0);
    let l = data.num_clusters().unwrap_or(0);
    if models.len() != l || geometry.mu_c.len() != l {
        return Err(Error::Dimension(format!("ground truth for {l} clusters expected")));
    }
    let eq9: Vec<Eq9Check> = (0..l)
        .map(|k| check_eq9(geometry.mu_c[k], geometry.r_k[k], eps, convention))
        .collect::<Result<_>>()?;
    let members: Vec<Vec<usize>> = (0..l)
        .map(|k| data.cluster_indices(k))
        .collect::<Result<_>>()?;
    let cluster_clean: Vec<Mat> = members
        .iter()
        .map(|idx| crate::geometry::select_columns(clean, idx))
        .collect();

    traces
        .iter()
        .map(|t| {
            let i = t.query_index;
            let k = labels[i];
            let residuals = t.residuals.as_ref().ok_or(Error::MissingResiduals)?;
            let own = members[k].binary_search(&i).ok();
            let mut eq10 = Vec::with_capacity(residuals.len());
            for (m, r) in residuals.iter().enumerate() {
                if r.norm() <= 1e-12 {
                    break;
                }
                let mut c = check_eq10(r, &models[k], geometry.theta_k[k], &cluster_clean[k], own, eps)?;
                c.m = m + 1;
                eq10.push(c);
            }
            let certified = certified_prefix(&eq9[k], &eq10, t.iterations());
            let violation = t.selections[..certified].iter().any(|&j| labels[j] != k);
            Ok(CertificateReport {
                query_index: i,
                cluster: k,
                convention,
                eq9: eq9[k],
                eq10_per_iter: eq10,
                selections: t.selections.clone(),
                sdp: sdp_verdict(t, labels),
                certified,
                violation,
            })
        })
        .collect()
}

/// Run `algorithm` on every point and certify each run.
pub fn certify_run(
    data: &DataSet,
    models: &[SubspaceModel],
    geometry: &GeometrySummary,
    cfg: &GreedyConfig,
    algorithm: Algorithm,
    convention: Convention,
) -> Result<Vec<CertificateReport>> {
    data.labels_required()?;
    data.clean_required()?;
    let cfg = GreedyConfig {
        algorithm,
        keep_residuals: true,
        ..*cfg
    };
    let dict = Dictionary::with_gram(&data.points)?;
    let traces = (0..data.num_points())
        .map(|i| dict.regress(i, &cfg))
        .collect::<Result<Vec<_>>>()?;
    certify_traces(data, models, geometry, &traces, convention)
}
