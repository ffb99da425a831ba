//! Per-iteration residual, angle-of-deviation and neighbor-correctness
//! averages over greedy traces.

use crate::error::{Error, Result};
use crate::geometry::{aod, SubspaceModel};
use crate::greedy::GreedyTrace;

/// `10 log10(1/ε²)` in decibels.
pub fn snr_db(eps: f64) -> f64 {
    -20.0 * eps.log10()
}

/// Inverse of [`snr_db`].
pub fn epsilon_from_snr_db(snr: f64) -> f64 {
    10f64.powf(-snr / 20.0)
}

/// Averages indexed by iteration `m = 1, 2, …` (entry `m − 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    /// Mean `‖P_{S_k} r_m‖`.
    pub r_par_mean: Vec<f64>,
    /// Mean `‖(I − P_{S_k}) r_m‖`.
    pub r_perp_mean: Vec<f64>,
    /// Mean angle of deviation; NaN when no residual at `m` is nonzero.
    pub aod_mean: Vec<f64>,
    /// Fraction of traces whose `m`-th selection lies in the query's cluster.
    pub p_correct: Vec<f64>,
    /// Number of traces still running at iteration `m`.
    pub active: Vec<usize>,
    pub ccr: Option<f64>,
}

/// Running sums for [`MetricSeries`]; traces from several trials can be
/// pooled before averaging.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricAccumulator {
    par: Vec<f64>,
    perp: Vec<f64>,
    aod: Vec<f64>,
    aod_count: Vec<usize>,
    correct: Vec<usize>,
    active: Vec<usize>,
}

impl MetricAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    fn grow(&mut self, len: usize) {
        if self.active.len() < len {
            self.par.resize(len, 0.0);
            self.perp.resize(len, 0.0);
            self.aod.resize(len, 0.0);
            self.aod_count.resize(len, 0);
            self.correct.resize(len, 0);
            self.active.resize(len, 0);
        }
    }

    /// Add traces of one data set; `labels` index clusters in `models`.
    pub fn add(&mut self, traces: &[GreedyTrace], models: &[SubspaceModel], labels: &[usize]) -> Result<()> {
        for t in traces {
            let k = *labels
                .get(t.query_index)
                .ok_or_else(|| Error::Dimension(format!("no label for point {}", t.query_index)))?;
            let model = models
                .get(k)
                .ok_or_else(|| Error::Dimension(format!("no subspace for cluster {k}")))?;
            let residuals = t.residuals.as_ref().ok_or(Error::MissingResiduals)?;
            self.grow(t.iterations());
            for (m, r) in residuals.iter().enumerate() {
                let (par, perp) = model.split(r);
                self.par[m] += par.norm();
                self.perp[m] += perp.norm();
                if let Ok(a) = aod(r, model) {
                    self.aod[m] += a;
                    self.aod_count[m] += 1;
                }
                let sel = t.selections[m];
                if labels.get(sel) == Some(&k) {
                    self.correct[m] += 1;
                }
                self.active[m] += 1;
            }
        }
        Ok(())
    }

    pub fn finish(&self) -> MetricSeries {
        let div = |s: &[f64], c: &[usize]| -> Vec<f64> {
            s.iter()
                .zip(c)
                .map(|(&v, &n)| if n == 0 { f64::NAN } else { v / n as f64 })
                .collect()
        };
        let correct: Vec<f64> = self.correct.iter().map(|&c| c as f64).collect();
        MetricSeries {
            r_par_mean: div(&self.par, &self.active),
            r_perp_mean: div(&self.perp, &self.active),
            aod_mean: div(&self.aod, &self.aod_count),
            p_correct: div(&correct, &self.active),
            active: self.active.clone(),
            ccr: None,
        }
    }
}

/// Averages over the traces of one data set. Traces that stopped before
/// iteration `m` do not count towards the iteration-`m` averages.
pub fn compute_metrics(
    traces: &[GreedyTrace],
    models: &[SubspaceModel],
    labels: &[usize],
) -> Result<MetricSeries> {
    let mut acc = MetricAccumulator::new();
    acc.add(traces, models, labels)?;
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{regress_all, Algorithm, GreedyConfig};
    use crate::numerics::{Mat, Vector};
    use crate::synth::{generate, SynthSpec};

    #[test]
    fn snr_round_trip() {
        assert!((snr_db(0.1) - 20.0).abs() < 1e-12);
        assert!((epsilon_from_snr_db(snr_db(0.37)) - 0.37).abs() < 1e-14);
    }

    fn small(eps: f64) -> (crate::synth::SynthData, Vec<GreedyTrace>) {
        let s = SynthSpec {
            n: 20,
            d: 4,
            num_subspaces: 3,
            rho: 0.5,
            points_per_subspace: 15,
            epsilon: eps,
            master_seed: 21,
        };
        let sd = generate(&s).unwrap();
        let traces = regress_all(&sd.data.points, &GreedyConfig::new(Algorithm::Omp, 4)).unwrap();
        (sd, traces)
    }

    #[test]
    fn noiseless_residuals_stay_in_subspace_until_wrong() {
        let (sd, traces) = small(0.0);
        let labels = sd.data.labels.clone().unwrap();
        let pure: Vec<GreedyTrace> = traces
            .into_iter()
            .filter(|t| t.selections.iter().all(|&j| labels[j] == labels[t.query_index]))
            .collect();
        assert!(!pure.is_empty());
        let m = compute_metrics(&pure, &sd.models, &labels).unwrap();
        assert!(m.r_perp_mean.iter().all(|&v| v < 1e-12));
        assert!(m.aod_mean.iter().filter(|v| !v.is_nan()).all(|&v| v < 1e-10));
        assert!(m.p_correct.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn single_trace_values() {
        let u = Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let model = SubspaceModel::new(u).unwrap();
        let r = Vector::from_vec(vec![0.3, 0.4, 0.0]);
        let t = GreedyTrace {
            query_index: 0,
            selections: vec![1],
            initial_norm: 1.0,
            residual_norms: vec![0.5],
            residuals: Some(vec![r]),
            coefficients: Vector::zeros(2),
        };
        let m = compute_metrics(&[t.clone()], &[model.clone()], &[0, 0]).unwrap();
        assert!((m.r_par_mean[0] - 0.3).abs() < 1e-15);
        assert!((m.r_perp_mean[0] - 0.4).abs() < 1e-15);
        assert!((m.aod_mean[0] - (0.4f64).atan2(0.3)).abs() < 1e-15);
        assert_eq!(m.p_correct, vec![1.0]);
        let bare = GreedyTrace { residuals: None, ..t };
        assert!(matches!(
            compute_metrics(&[bare], &[model], &[0, 0]),
            Err(Error::MissingResiduals)
        ));
    }

    #[test]
    fn matches_direct_recomputation() {
        let (sd, traces) = small(0.2);
        let labels = sd.data.labels.clone().unwrap();
        let m = compute_metrics(&traces, &sd.models, &labels).unwrap();
        for it in 0..m.active.len() {
            let (mut par, mut perp, mut ang, mut ok, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0usize);
            for t in traces.iter().filter(|t| t.iterations() > it) {
                let r = &t.residuals.as_ref().unwrap()[it];
                let u = sd.models[labels[t.query_index]].basis();
                let p = u * (u.transpose() * r);
                let q = r - &p;
                par += p.norm();
                perp += q.norm();
                ang += (q.norm() / p.norm()).atan();
                ok += f64::from(labels[t.selections[it]] == labels[t.query_index]);
                cnt += 1;
            }
            let c = cnt as f64;
            assert_eq!(m.active[it], cnt);
            assert!((m.r_par_mean[it] - par / c).abs() < 1e-12);
            assert!((m.r_perp_mean[it] - perp / c).abs() < 1e-12);
            assert!((m.aod_mean[it] - ang / c).abs() < 1e-12);
            assert!((m.p_correct[it] - ok / c).abs() < 1e-12);
        }
    }

    #[test]
    fn pooling_two_runs_weights_by_trace_count() {
        let (sd, traces) = small(0.1);
        let labels = sd.data.labels.clone().unwrap();
        let mut acc = MetricAccumulator::new();
        acc.add(&traces, &sd.models, &labels).unwrap();
        acc.add(&traces, &sd.models, &labels).unwrap();
        let pooled = acc.finish();
        let single = compute_metrics(&traces, &sd.models, &labels).unwrap();
        assert_eq!(pooled.active, single.active.iter().map(|a| 2 * a).collect::<Vec<_>>());
        for (a, b) in pooled.r_par_mean.iter().zip(&single.r_par_mean) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
