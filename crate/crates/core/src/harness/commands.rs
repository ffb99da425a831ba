//! Experiment drivers behind the `ssc` subcommands.

use std::path::PathBuf;
use std::time::Instant;

use crate::clustering::{
    build_similarity, ccr, epsilon_from_snr_db, spectral_cluster, MetricAccumulator, MetricSeries,
};
use crate::error::{Error, Result};
use crate::extremal::{
    angle_gap, f_extremes, grid_extremes, in_plane_perturbations, make_pair, mc_samples, stationarity,
    McReport, PhiSampling,
};
use crate::geometry::{pca_subspace, GeometrySummary, SubspaceModel};
use crate::greedy::{Algorithm, Dictionary, GreedyConfig, GreedyTrace};
use crate::guarantees::{certify_traces, CertificateReport};
use crate::numerics::derive_seed;
use crate::synth::generate;

use super::config::{Command, ExperimentConfig};
use super::data::{read_dataset, write_dataset};
use super::table::{Cell, ResultTable};

// First element of every derived-seed path, one per experiment family.
const LEMMA_STREAM: u64 = 1;
const TRACE_STREAM: u64 = 3;
const CCR_DATA_STREAM: u64 = 4;
const CCR_SPECTRAL_STREAM: u64 = 5;
const CERTIFY_DATA_STREAM: u64 = 6;
const CERTIFY_INRADIUS_STREAM: u64 = 7;
const CLUSTER_STREAM: u64 = 8;
const GEN_STREAM: u64 = 9;

/// Regress every column of `y`.
pub fn regress_points(dict: &Dictionary, cfg: &GreedyConfig) -> Result<Vec<GreedyTrace>> {
    (0..dict.len()).map(|i| dict.regress(i, cfg)).collect()
}

/// Similarity → spectral clustering on the sparse codes of `traces`.
pub fn cluster_traces(traces: &[GreedyTrace], num_clusters: usize, seed: u64) -> Result<Vec<usize>> {
    let codes: Vec<_> = traces.iter().map(|t| t.coefficients.clone()).collect();
    spectral_cluster(&build_similarity(&codes)?, num_clusters, seed)
}

fn lemma_validate(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let mut samples_t = ResultTable::new(
        "lemma_validate.csv",
        &["phi", "epsilon", "trial", "inner_product", "bound_max", "bound_min"],
    );
    let mut summary = ResultTable::new(
        "lemma_validate_summary.csv",
        &[
            "phi",
            "epsilon",
            "trials",
            "violations",
            "empirical_max",
            "empirical_min",
            "worst_excess_max",
            "worst_excess_min",
            "attain_phi",
            "attain_gap_max",
            "attain_gap_min",
        ],
    );
    let settings: Vec<(PhiSampling, Cell)> = match &cfg.phi {
        Some(ps) => ps.iter().map(|&p| (PhiSampling::Fixed(p), Cell::Float(p))).collect(),
        None => vec![(PhiSampling::Uniform, Cell::from("uniform"))],
    };
    let mut total = 0;
    for (pi, (sampling, label)) in settings.iter().enumerate() {
        for (ei, &eps) in cfg.epsilons(Command::LemmaValidate).iter().enumerate() {
            let seed = derive_seed(cfg.master_seed, &[LEMMA_STREAM, pi as u64, ei as u64]);
            let samples = mc_samples(*sampling, eps, cfg.mc_dim, cfg.mc_trials, seed)?;
            for (t, s) in samples.iter().enumerate() {
                samples_t.push(vec![
                    s.phi.into(),
                    eps.into(),
                    t.into(),
                    s.inner_product.into(),
                    s.bound_max.into(),
                    s.bound_min.into(),
                ]);
            }
            let rep = McReport::from_samples(&samples);
            total += rep.violations;
            let excess_max = samples
                .iter()
                .map(|s| s.inner_product - s.bound_max)
                .fold(f64::NEG_INFINITY, f64::max);
            let excess_min = samples
                .iter()
                .map(|s| s.bound_min - s.inner_product)
                .fold(f64::NEG_INFINITY, f64::max);
            // Noise placed at the extremizing angles reaches the bounds.
            let attain_phi = match sampling {
                PhiSampling::Fixed(p) => *p,
                PhiSampling::Uniform => std::f64::consts::FRAC_PI_4,
            };
            let ext = f_extremes(attain_phi, eps);
            let (x1, x2) = make_pair(attain_phi, cfg.mc_dim);
            let reach = |theta: f64| {
                let (e1, e2) = in_plane_perturbations(eps, theta, cfg.mc_dim);
                (&x1 + e1).dot(&(&x2 + e2))
            };
            let (hi, lo) = crate::extremal::noisy_inner_bounds(attain_phi.cos(), eps)?;
            summary.push(vec![
                label.clone(),
                eps.into(),
                rep.trials.into(),
                rep.violations.into(),
                rep.empirical_max.into(),
                rep.empirical_min.into(),
                excess_max.into(),
                excess_min.into(),
                attain_phi.into(),
                (reach(ext.theta_max) - hi).abs().into(),
                (reach(ext.theta_min) - lo).abs().into(),
            ]);
        }
    }
    summary.meta("violations", total);
    Ok(vec![samples_t, summary])
}

fn extremal_solve(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let mut t = ResultTable::new(
        "extremal_solve.csv",
        &[
            "phi",
            "epsilon",
            "method",
            "theta_max",
            "f_max",
            "theta_min",
            "f_min",
            "oracle_f_max",
            "oracle_f_min",
            "f_max_err",
            "f_min_err",
            "theta_max_gap",
            "theta_min_gap",
            "stationarity_max",
            "stationarity_min",
        ],
    );
    let mut worst: f64 = 0.0;
    for &phi in &cfg.extremal_phis() {
        for &eps in &cfg.epsilons(Command::ExtremalSolve) {
            let r = f_extremes(phi, eps);
            let g = grid_extremes(phi, eps, cfg.oracle_grid);
            let (emax, emin) = ((r.f_max - g.f_max).abs(), (r.f_min - g.f_min).abs());
            worst = worst.max(emax).max(emin);
            t.push(vec![
                phi.into(),
                eps.into(),
                r.method.as_str().into(),
                r.theta_max.into(),
                r.f_max.into(),
                r.theta_min.into(),
                r.f_min.into(),
                g.f_max.into(),
                g.f_min.into(),
                emax.into(),
                emin.into(),
                angle_gap(r.theta_max, g.theta_max).into(),
                angle_gap(r.theta_min, g.theta_min).into(),
                stationarity(phi, eps, r.theta_max).into(),
                stationarity(phi, eps, r.theta_min).into(),
            ]);
        }
    }
    t.meta("max_value_error", worst);
    Ok(vec![t])
}

/// Per-iteration averages for one `(algorithm, ρ, ε)` pooled over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub algorithm: Algorithm,
    pub rho: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub series: MetricSeries,
}

/// Synthetic MP/OMP runs over the `ρ × ε` grid. Both algorithms see the
/// same data sets.
pub fn trace_series(cfg: &ExperimentConfig) -> Result<Vec<TraceSeries>> {
    let eps_list = cfg.epsilons(Command::Trace);
    let mut out = Vec::new();
    for (ri, &rho) in cfg.rho.iter().enumerate() {
        for (ei, &eps) in eps_list.iter().enumerate() {
            let mut acc = vec![MetricAccumulator::new(); cfg.algorithms.len()];
            for trial in 0..cfg.trials {
                let seed = derive_seed(cfg.master_seed, &[TRACE_STREAM, ri as u64, ei as u64, trial as u64]);
                let sd = generate(&cfg.synth_spec(rho, eps, seed))?;
                let labels = sd.data.labels_required()?;
                let dict = Dictionary::with_gram(&sd.data.points)?;
                for (ai, &alg) in cfg.algorithms.iter().enumerate() {
                    let traces = regress_points(&dict, &cfg.greedy(alg))?;
                    acc[ai].add(&traces, &sd.models, labels)?;
                }
            }
            for (ai, &alg) in cfg.algorithms.iter().enumerate() {
                out.push(TraceSeries {
                    algorithm: alg,
                    rho,
                    epsilon: eps,
                    trials: cfg.trials,
                    series: acc[ai].finish(),
                });
            }
        }
    }
    out.sort_by_key(|s| cfg.algorithms.iter().position(|&a| a == s.algorithm));
    Ok(out)
}

fn series_table(name: &str, lead: &[&str]) -> ResultTable {
    let mut h: Vec<&str> = lead.to_vec();
    h.extend(["m", "r_par_mean", "r_perp_mean", "aod_mean", "p_correct", "active"]);
    ResultTable::new(name, &h)
}

fn push_series(t: &mut ResultTable, lead: Vec<Cell>, s: &MetricSeries) {
    for m in 0..s.active.len() {
        let mut row = lead.clone();
        row.extend([
            (m + 1).into(),
            s.r_par_mean[m].into(),
            s.r_perp_mean[m].into(),
            s.aod_mean[m].into(),
            s.p_correct[m].into(),
            s.active[m].into(),
        ]);
        t.push(row);
    }
}

fn trace(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let mut t = series_table("trace.csv", &["algorithm", "rho", "epsilon"]);
    for s in trace_series(cfg)? {
        push_series(
            &mut t,
            vec![s.algorithm.as_str().into(), s.rho.into(), s.epsilon.into()],
            &s.series,
        );
    }
    Ok(vec![t])
}

/// Clustering accuracy of one full pipeline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcrTrial {
    pub algorithm: Algorithm,
    pub rho: f64,
    pub snr_db: f64,
    pub epsilon: f64,
    pub trial: usize,
    pub ccr: f64,
}

/// Regress → similarity → spectral → CCR over `algorithms × ρ × SNR ×
/// trials`; algorithms share data sets and spectral seeds.
pub fn ccr_trials(cfg: &ExperimentConfig) -> Result<Vec<CcrTrial>> {
    let mut out = Vec::new();
    for (ri, &rho) in cfg.rho.iter().enumerate() {
        for (si, &snr) in cfg.snr_db.iter().enumerate() {
            let eps = epsilon_from_snr_db(snr);
            for trial in 0..cfg.trials {
                let path = [ri as u64, si as u64, trial as u64];
                let data_seed = derive_seed(cfg.master_seed, &[CCR_DATA_STREAM, path[0], path[1], path[2]]);
                let spec_seed = derive_seed(cfg.master_seed, &[CCR_SPECTRAL_STREAM, path[0], path[1], path[2]]);
                let sd = generate(&cfg.synth_spec(rho, eps, data_seed))?;
                let truth = sd.data.labels_required()?;
                let dict = Dictionary::with_gram(&sd.data.points)?;
                for &alg in &cfg.algorithms {
                    let gc = GreedyConfig {
                        keep_residuals: false,
                        ..cfg.greedy(alg)
                    };
                    let traces = regress_points(&dict, &gc)?;
                    let pred = cluster_traces(&traces, cfg.num_subspaces, spec_seed)?;
                    out.push(CcrTrial {
                        algorithm: alg,
                        rho,
                        snr_db: snr,
                        epsilon: eps,
                        trial,
                        ccr: ccr(&pred, truth)?,
                    });
                }
            }
        }
    }
    out.sort_by_key(|c| cfg.algorithms.iter().position(|&a| a == c.algorithm));
    Ok(out)
}

/// Mean and standard error of the mean.
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn ccr_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let trials = ccr_trials(cfg)?;
    let mut per = ResultTable::new(
        "ccr_sweep_trials.csv",
        &["algorithm", "rho", "snr_db", "epsilon", "trial", "ccr"],
    );
    for c in &trials {
        per.push(vec![
            c.algorithm.as_str().into(),
            c.rho.into(),
            c.snr_db.into(),
            c.epsilon.into(),
            c.trial.into(),
            c.ccr.into(),
        ]);
    }
    let mut summary = ResultTable::new(
        "ccr_sweep.csv",
        &["algorithm", "rho", "snr_db", "epsilon", "trials", "ccr_mean", "ccr_stderr"],
    );
    for chunk in trials.chunk_by(|a, b| a.algorithm == b.algorithm && a.rho == b.rho && a.snr_db == b.snr_db) {
        let v: Vec<f64> = chunk.iter().map(|c| c.ccr).collect();
        let (mean, se) = mean_stderr(&v);
        let c = chunk[0];
        summary.push(vec![
            c.algorithm.as_str().into(),
            c.rho.into(),
            c.snr_db.into(),
            c.epsilon.into(),
            v.len().into(),
            mean.into(),
            se.into(),
        ]);
    }
    Ok(vec![summary, per])
}

/// Counts over a batch of certificate reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CertificateTally {
    pub points: usize,
    pub eq9_holds: usize,
    /// Every selection certified.
    pub fully_certified: usize,
    pub sdp: usize,
    pub violations: usize,
}

impl CertificateTally {
    pub fn add(&mut self, reports: &[CertificateReport]) {
        for r in reports {
            self.points += 1;
            self.eq9_holds += usize::from(r.eq9.holds);
            self.fully_certified += usize::from(r.certified == r.selections.len() && r.eq9.holds);
            self.sdp += usize::from(r.sdp);
            self.violations += usize::from(r.violation);
        }
    }
}

fn certify_tables() -> (ResultTable, ResultTable, ResultTable) {
    let points = ResultTable::new(
        "certify.csv",
        &[
            "algorithm",
            "convention",
            "rho",
            "epsilon",
            "trial",
            "point",
            "cluster",
            "eq9_lhs",
            "eq9_rhs",
            "eq9_margin",
            "eq9_holds",
            "iterations",
            "eq10_holds_prefix",
            "certified",
            "sdp",
            "violation",
        ],
    );
    let iters = ResultTable::new(
        "certify_eq10.csv",
        &[
            "algorithm", "rho", "epsilon", "trial", "point", "m", "lhs", "rhs", "margin", "holds", "aod",
            "theta_k",
        ],
    );
    let summary = ResultTable::new(
        "certify_summary.csv",
        &[
            "algorithm",
            "convention",
            "rho",
            "epsilon",
            "points",
            "eq9_holds",
            "fully_certified",
            "sdp",
            "violations",
        ],
    );
    (points, iters, summary)
}

fn push_reports(
    points: &mut ResultTable,
    iters: &mut ResultTable,
    lead: (Algorithm, f64, f64, usize),
    reports: &[CertificateReport],
) {
    let (alg, rho, eps, trial) = lead;
    for r in reports {
        points.push(vec![
            alg.as_str().into(),
            r.convention.as_str().into(),
            rho.into(),
            eps.into(),
            trial.into(),
            r.query_index.into(),
            r.cluster.into(),
            r.eq9.lhs.into(),
            r.eq9.rhs.into(),
            r.eq9.margin.into(),
            r.eq9.holds.into(),
            r.selections.len().into(),
            r.eq10_per_iter.iter().take_while(|c| c.holds).count().into(),
            r.certified.into(),
            r.sdp.into(),
            r.violation.into(),
        ]);
        for c in &r.eq10_per_iter {
            iters.push(vec![
                alg.as_str().into(),
                rho.into(),
                eps.into(),
                trial.into(),
                r.query_index.into(),
                c.m.into(),
                c.lhs.into(),
                c.rhs.into(),
                (c.rhs - c.lhs).into(),
                c.holds.into(),
                c.aod.into(),
                c.theta_k.into(),
            ]);
        }
    }
}

fn certify(cfg: &ExperimentConfig) -> Result<Vec<ResultTable>> {
    let (mut points, mut iters, mut summary) = certify_tables();
    let eps_list = cfg.epsilons(Command::Certify);
    let mut tallies = vec![vec![vec![CertificateTally::default(); eps_list.len()]; cfg.rho.len()]; cfg.algorithms.len()];
    for (ri, &rho) in cfg.rho.iter().enumerate() {
        for (ei, &eps) in eps_list.iter().enumerate() {
            for trial in 0..cfg.trials {
                let path = [ri as u64, ei as u64, trial as u64];
                let seed = derive_seed(cfg.master_seed, &[CERTIFY_DATA_STREAM, path[0], path[1], path[2]]);
                let sd = generate(&cfg.synth_spec(rho, eps, seed))?;
                let inr = derive_seed(cfg.master_seed, &[CERTIFY_INRADIUS_STREAM, path[0], path[1], path[2]]);
                let geo = GeometrySummary::compute(&sd.data, &sd.models, &cfg.inradius(inr))?;
                let dict = Dictionary::with_gram(&sd.data.points)?;
                for (ai, &alg) in cfg.algorithms.iter().enumerate() {
                    let traces = regress_points(&dict, &cfg.greedy(alg))?;
                    let reports = certify_traces(&sd.data, &sd.models, &geo, &traces, cfg.convention)?;
                    tallies[ai][ri][ei].add(&reports);
                    push_reports(&mut points, &mut iters, (alg, rho, eps, trial), &reports);
                }
            }
        }
    }
    let mut total = 0;
    for (ai, &alg) in cfg.algorithms.iter().enumerate() {
        for (ri, &rho) in cfg.rho.iter().enumerate() {
            for (ei, &eps) in eps_list.iter().enumerate() {
                let t = tallies[ai][ri][ei];
                total += t.violations;
                summary.push(vec![
                    alg.as_str().into(),
                    cfg.convention.as_str().into(),
                    rho.into(),
                    eps.into(),
                    t.points.into(),
                    t.eq9_holds.into(),
                    t.fully_certified.into(),
                    t.sdp.into(),
                    t.violations.into(),
                ]);
            }
        }
    }
    for t in [&mut points, &mut summary] {
        t.meta("soundness_violations", total);
    }
    Ok(vec![summary, points, iters])
}

fn cluster(cfg: &ExperimentConfig) -> Result<(Vec<ResultTable>, Vec<String>)> {
    let path = cfg.data_path.as_ref().ok_or_else(|| Error::Config("cluster needs data_path".into()))?;
    let loaded = read_dataset(path)?;
    let data = &loaded.data;
    let truth = data.labels.as_deref();
    let l = match (data.num_clusters(), cfg.num_clusters) {
        (Some(l), _) | (None, Some(l)) => l,
        (None, None) => {
            return Err(Error::Config("unlabelled data needs num_clusters".into()));
        }
    };
    let mut notices = Vec::new();
    let models: Option<(Vec<SubspaceModel>, String)> = match (&loaded.models, cfg.pca_rank, truth) {
        (Some(m), _, Some(_)) => Some((m.clone(), "ground-truth".into())),
        (None, Some(rank), Some(_)) => {
            let ms = (0..l)
                .map(|k| {
                    let idx = data.cluster_indices(k)?;
                    pca_subspace(&crate::geometry::select_columns(&data.points, &idx), rank)
                })
                .collect::<Result<Vec<_>>>()?;
            Some((ms, format!("pca-rank-{rank}")))
        }
        _ => None,
    };
    if models.is_none() {
        notices.push("AoD trace disabled: needs labels and either subspace bases or pca_rank".to_string());
    }
    let certifiable = data.clean_points.is_some() && truth.is_some() && loaded.models.is_some();
    if !certifiable {
        notices.push("certificates disabled: needs clean points, labels and subspace bases".to_string());
    }

    let mut labels_t = ResultTable::new("cluster_labels.csv", &["algorithm", "point", "predicted", "truth"]);
    let mut summary = ResultTable::new(
        "cluster_summary.csv",
        &["algorithm", "num_points", "num_clusters", "ccr"],
    );
    let mut trace_t = series_table("cluster_trace.csv", &["algorithm"]);
    let (mut cert_points, mut cert_iters, mut cert_summary) = certify_tables();
    let geometry = if certifiable {
        let ms = loaded.models.as_deref().unwrap_or_default();
        let inr = derive_seed(cfg.master_seed, &[CLUSTER_STREAM, 1]);
        Some(GeometrySummary::compute(data, ms, &cfg.inradius(inr))?)
    } else {
        None
    };
    let dict = Dictionary::with_gram(&data.points)?;
    let seed = derive_seed(cfg.master_seed, &[CLUSTER_STREAM, 0]);
    // Without an explicit cap, iterate up to the data's subspace dimension.
    let m_max = cfg
        .m_max
        .or_else(|| models.as_ref().map(|(ms, _)| ms.iter().map(|m| m.dim()).max().unwrap_or(1)))
        .unwrap_or(cfg.d)
        .min(data.num_points().saturating_sub(1).max(1));
    let mut total = 0;
    for &alg in &cfg.algorithms {
        let gc = GreedyConfig {
            m_max,
            keep_residuals: models.is_some() || certifiable,
            ..cfg.greedy(alg)
        };
        let traces = regress_points(&dict, &gc)?;
        let pred = cluster_traces(&traces, l, seed)?;
        for (i, &p) in pred.iter().enumerate() {
            let t: Cell = truth.map_or(Cell::from(""), |t| t[i].into());
            labels_t.push(vec![alg.as_str().into(), i.into(), p.into(), t]);
        }
        let acc: Cell = match truth {
            Some(t) => ccr(&pred, t)?.into(),
            None => "".into(),
        };
        summary.push(vec![alg.as_str().into(), data.num_points().into(), l.into(), acc]);
        if let (Some((ms, _)), Some(t)) = (&models, truth) {
            let mut a = MetricAccumulator::new();
            a.add(&traces, ms, t)?;
            push_series(&mut trace_t, vec![alg.as_str().into()], &a.finish());
        }
        if let Some(geo) = &geometry {
            let ms = loaded.models.as_deref().unwrap_or_default();
            let reports = certify_traces(data, ms, geo, &traces, cfg.convention)?;
            let mut tally = CertificateTally::default();
            tally.add(&reports);
            total += tally.violations;
            let eps = data.noise_bound.unwrap_or(0.0);
            push_reports(&mut cert_points, &mut cert_iters, (alg, f64::NAN, eps, 0), &reports);
            cert_summary.push(vec![
                alg.as_str().into(),
                cfg.convention.as_str().into(),
                f64::NAN.into(),
                eps.into(),
                tally.points.into(),
                tally.eq9_holds.into(),
                tally.fully_certified.into(),
                tally.sdp.into(),
                tally.violations.into(),
            ]);
        }
    }
    for n in &notices {
        summary.meta("notice", n);
    }
    let mut tables = vec![summary, labels_t];
    if let Some((_, source)) = &models {
        trace_t.meta("subspaces", source);
        tables.push(trace_t);
    }
    if geometry.is_some() {
        for t in [&mut cert_summary, &mut cert_points, &mut cert_iters] {
            t.name = format!("cluster_{}", t.name);
        }
        cert_summary.meta("soundness_violations", total);
        tables.extend([cert_summary, cert_points, cert_iters]);
    }
    Ok((tables, notices))
}

/// Tables produced by `cmd` (everything except `gen`, which writes data
/// files directly), plus human-readable notices.
pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<(Vec<ResultTable>, Vec<String>)> {
    cfg.validate(cmd)?;
    let tables = match cmd {
        Command::LemmaValidate => lemma_validate(cfg)?,
        Command::ExtremalSolve => extremal_solve(cfg)?,
        Command::Trace => trace(cfg)?,
        Command::CcrSweep => ccr_sweep(cfg)?,
        Command::Certify => certify(cfg)?,
        Command::Cluster => return cluster(cfg),
        Command::Gen => {
            return Err(Error::InvalidArgument("gen writes data files; use run".into()));
        }
    };
    Ok((tables, Vec::new()))
}

fn base_metadata(cmd: Command, cfg: &ExperimentConfig) -> Vec<(String, String)> {
    vec![
        ("command".into(), cmd.as_str().into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("seed".into(), cfg.master_seed.to_string()),
        ("config_sha256".into(), cfg.hash()),
        ("config".into(), cfg.to_json()),
    ]
}

/// Outcome of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub notices: Vec<String>,
}

/// Validate, execute and write all outputs of `cmd` under `cfg.output_dir`.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate(cmd)?;
    let start = Instant::now();
    let meta = base_metadata(cmd, cfg);
    if cmd == Command::Gen {
        let eps = cfg.epsilons(cmd)[0];
        let seed = derive_seed(cfg.master_seed, &[GEN_STREAM]);
        let sd = generate(&cfg.synth_spec(cfg.rho[0], eps, seed))?;
        let sidecar = write_dataset(&cfg.output_dir, &sd.data, Some(&sd.models), &meta)?;
        let dir = &cfg.output_dir;
        let files = vec![
            dir.join(super::data::POINTS_FILE),
            dir.join(super::data::CLEAN_FILE),
            dir.join(super::data::BASES_FILE),
            sidecar,
        ];
        return Ok(RunSummary {
            files,
            notices: Vec::new(),
        });
    }
    let (tables, notices) = execute(cmd, cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut files = Vec::new();
    for mut t in tables {
        let extra = std::mem::take(&mut t.metadata);
        t.metadata = meta.clone();
        t.metadata.extend(extra);
        t.meta("wall_clock_s", format!("{elapsed:.3}"));
        files.push(t.write(&cfg.output_dir)?);
    }
    Ok(RunSummary { files, notices })
}
