//! Matching pursuit and orthogonal matching pursuit neighbor selection.
//!
//! Each point `y_i` is regressed on the remaining columns of `Y`. MP
//! deflates the residual against the latest selected column only and may
//! select a column more than once; OMP keeps the residual orthogonal to
//! every selected column and never repeats a selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{least_squares, Mat, Vector};

pub const DEFAULT_TAU_ABS: f64 = 1e-6;
pub const DEFAULT_TAU_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mp,
    Omp,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mp => "mp",
            Algorithm::Omp => "omp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    pub m_max: usize,
    pub tau_abs: f64,
    /// Fraction of `‖y_i‖`.
    pub tau_rel: f64,
    pub algorithm: Algorithm,
    /// Keep every residual vector in the trace.
    pub keep_residuals: bool,
}

impl GreedyConfig {
    pub fn new(algorithm: Algorithm, m_max: usize) -> Self {
        Self {
            m_max,
            tau_abs: DEFAULT_TAU_ABS,
            tau_rel: DEFAULT_TAU_REL,
            algorithm,
            keep_residuals: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(Error::InvalidArgument("m_max must be at least 1".into()));
        }
        if !(self.tau_abs >= 0.0) {
            return Err(Error::InvalidArgument("tau_abs must be nonnegative".into()));
        }
        if !(0.0..1.0).contains(&self.tau_rel) {
            return Err(Error::InvalidArgument("tau_rel must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Record of one regression.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    pub query_index: usize,
    /// `i_1, i_2, …` in selection order.
    pub selections: Vec<usize>,
    /// `‖r_0‖ = ‖y_i‖`.
    pub initial_norm: f64,
    /// `‖r_m‖` for `m = 1..=selections.len()`.
    pub residual_norms: Vec<f64>,
    /// `r_m` for `m = 1..=selections.len()` when retained.
    pub residuals: Option<Vec<Vector>>,
    /// Sparse code over all `N` columns, zero at `query_index`.
    pub coefficients: Vector,
}

impl GreedyTrace {
    pub fn iterations(&self) -> usize {
        self.selections.len()
    }

    /// Residual after iteration `m ≥ 1`.
    pub fn residual(&self, m: usize) -> Option<&Vector> {
        self.residuals.as_ref()?.get(m.checked_sub(1)?)
    }
}

/// Column index with the largest `|score|` among admissible candidates;
/// ties go to the lowest index.
fn argmax_abs(scores: &[f64], admissible: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &s) in scores.iter().enumerate() {
        if !admissible(j) {
            continue;
        }
        let a = s.abs();
        if best.is_none_or(|(_, b)| a > b) {
            best = Some((j, a));
        }
    }
    best.map(|(j, _)| j)
}

/// Read-only regression dictionary with cached column norms and, optionally,
/// the Gram matrix used by the MP correlation update.
#[derive(Debug, Clone)]
pub struct Dictionary<'a> {
    y: &'a Mat,
    norms_sq: Vec<f64>,
    gram: Option<Mat>,
}

impl<'a> Dictionary<'a> {
    pub fn new(y: &'a Mat) -> Result<Self> {
        if y.ncols() < 2 {
            return Err(Error::InvalidArgument("need at least two points".into()));
        }
        let norms_sq = y.column_iter().map(|c| c.norm_squared()).collect();
        Ok(Self {
            y,
            norms_sq,
            gram: None,
        })
    }

    /// Precompute `YᵀY`; pays off when regressing every column.
    pub fn with_gram(y: &'a Mat) -> Result<Self> {
        let mut d = Self::new(y)?;
        d.gram = Some(y.tr_mul(y));
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.y.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.y.ncols() == 0
    }

    pub fn regress(&self, i: usize, cfg: &GreedyConfig) -> Result<GreedyTrace> {
        cfg.validate()?;
        if i >= self.len() {
            return Err(Error::InvalidArgument(format!("query index {i} out of range")));
        }
        if self.norms_sq[i] == 0.0 {
            return Err(Error::ZeroQuery(i));
        }
        match cfg.algorithm {
            Algorithm::Mp => Ok(self.mp(i, cfg)),
            Algorithm::Omp => self.omp(i, cfg),
        }
    }

    fn correlations(&self, r: &Vector) -> Vec<f64> {
        self.y.tr_mul(r).as_slice().to_vec()
    }

    fn mp(&self, i: usize, cfg: &GreedyConfig) -> GreedyTrace {
        let y_i = self.y.column(i).into_owned();
        let initial_norm = y_i.norm();
        let threshold = cfg.tau_abs.max(cfg.tau_rel * initial_norm);
        let mut r = y_i;
        let mut corr = match &self.gram {
            Some(g) => g.column(i).as_slice().to_vec(),
            None => self.correlations(&r),
        };
        let mut coefficients = Vector::zeros(self.len());
        let mut trace = GreedyTrace {
            query_index: i,
            selections: Vec::new(),
            initial_norm,
            residual_norms: Vec::new(),
            residuals: cfg.keep_residuals.then(Vec::new),
            coefficients: Vector::zeros(0),
        };
        let mut norm = initial_norm;
        while trace.selections.len() < cfg.m_max && norm > threshold {
            let Some(j) = argmax_abs(&corr, |j| j != i && self.norms_sq[j] > 0.0) else {
                break;
            };
            let step = corr[j] / self.norms_sq[j];
            coefficients[j] += step;
            r.axpy(-step, &self.y.column(j), 1.0);
            match &self.gram {
                Some(g) => {
                    for (c, gj) in corr.iter_mut().zip(g.column(j).iter()) {
                        *c -= step * gj;
                    }
                }
                None => corr = self.correlations(&r),
            }
            norm = r.norm();
            trace.selections.push(j);
            trace.residual_norms.push(norm);
            if let Some(res) = trace.residuals.as_mut() {
                res.push(r.clone());
            }
        }
        trace.coefficients = coefficients;
        trace
    }

    fn omp(&self, i: usize, cfg: &GreedyConfig) -> Result<GreedyTrace> {
        let y_i = self.y.column(i).into_owned();
        let initial_norm = y_i.norm();
        let threshold = cfg.tau_abs.max(cfg.tau_rel * initial_norm);
        let mut r = y_i.clone();
        let mut corr = self.correlations(&r);
        let mut selected = vec![false; self.len()];
        let mut basis: Vec<Vector> = Vec::new();
        let mut trace = GreedyTrace {
            query_index: i,
            selections: Vec::new(),
            initial_norm,
            residual_norms: Vec::new(),
            residuals: cfg.keep_residuals.then(Vec::new),
            coefficients: Vector::zeros(0),
        };
        let mut norm = initial_norm;
        while trace.selections.len() < cfg.m_max && norm > threshold {
            let Some(j) = argmax_abs(&corr, |j| j != i && !selected[j] && self.norms_sq[j] > 0.0)
            else {
                break;
            };
            selected[j] = true;
            trace.selections.push(j);

            // Extend the orthonormal basis of the selected span (two passes
            // of Gram-Schmidt); a dependent column leaves the span unchanged.
            let mut q = self.y.column(j).into_owned();
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dot(&q);
                    q.axpy(-p, b, 1.0);
                }
            }
            let qn = q.norm();
            if qn > 1e-10 * self.norms_sq[j].sqrt() {
                q /= qn;
                let alpha = q.dot(&r);
                r.axpy(-alpha, &q, 1.0);
                let yq = self.y.tr_mul(&q);
                for (c, v) in corr.iter_mut().zip(yq.iter()) {
                    *c -= alpha * v;
                }
                basis.push(q);
            }
            norm = r.norm();
            trace.residual_norms.push(norm);
            if let Some(res) = trace.residuals.as_mut() {
                res.push(r.clone());
            }
        }
        let mut coefficients = Vector::zeros(self.len());
        if !trace.selections.is_empty() {
            let cols: Vec<Vector> = trace
                .selections
                .iter()
                .map(|&j| self.y.column(j).into_owned())
                .collect();
            let c = least_squares(&Mat::from_columns(&cols), &y_i)?;
            for (&j, &v) in trace.selections.iter().zip(c.iter()) {
                coefficients[j] = v;
            }
        }
        trace.coefficients = coefficients;
        Ok(trace)
    }
}

pub fn mp_regress(y: &Mat, i: usize, cfg: &GreedyConfig) -> Result<GreedyTrace> {
    let cfg = GreedyConfig {
        algorithm: Algorithm::Mp,
        ..*cfg
    };
    Dictionary::new(y)?.regress(i, &cfg)
}

pub fn omp_regress(y: &Mat, i: usize, cfg: &GreedyConfig) -> Result<GreedyTrace> {
    let cfg = GreedyConfig {
        algorithm: Algorithm::Omp,
        ..*cfg
    };
    Dictionary::new(y)?.regress(i, &cfg)
}

/// Regress every column on the others; traces are returned in index order.
pub fn regress_all(y: &Mat, cfg: &GreedyConfig) -> Result<Vec<GreedyTrace>> {
    let dict = Dictionary::with_gram(y)?;
    (0..y.ncols()).map(|i| dict.regress(i, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rng_stream, sample_unit_sphere};
    use proptest::prelude::*;

    fn cols(v: &[&[f64]]) -> Mat {
        let c: Vec<Vector> = v.iter().map(|s| Vector::from_row_slice(s)).collect();
        Mat::from_columns(&c)
    }

    fn cfg(alg: Algorithm, m_max: usize) -> GreedyConfig {
        GreedyConfig::new(alg, m_max)
    }

    fn random_points(n: usize, count: usize, seed: u64) -> Mat {
        let mut rng = rng_stream(seed, 0);
        let c: Vec<Vector> = (0..count).map(|_| sample_unit_sphere(&mut rng, n)).collect();
        Mat::from_columns(&c)
    }

    #[test]
    fn mp_orthogonal_dictionary() {
        let y = cols(&[&[1.0, 0.0], &[0.0, 1.0], &[0.6, 0.8]]);
        let t = mp_regress(&y, 2, &cfg(Algorithm::Mp, 10)).unwrap();
        assert_eq!(t.selections, vec![1, 0]);
        assert!((t.residual_norms[0] - 0.6).abs() < 1e-15);
        assert!(t.residual_norms[1] < 1e-15);
        assert!((t.coefficients[0] - 0.6).abs() < 1e-15);
        assert!((t.coefficients[1] - 0.8).abs() < 1e-15);
        assert_eq!(t.coefficients[2], 0.0);
        let o = omp_regress(&y, 2, &cfg(Algorithm::Omp, 10)).unwrap();
        assert_eq!(o.selections, t.selections);
        assert!((o.coefficients.clone() - t.coefficients.clone()).amax() < 1e-14);
    }

    /// Hand-computed: a = [1,0], b = [0.5, 0.8660], q at 20°.
    #[test]
    fn mp_reselects_and_omp_does_not() {
        let y = cols(&[&[1.0, 0.0], &[0.5, 0.8660], &[0.9397, 0.3420]]);
        let t = mp_regress(&y, 2, &cfg(Algorithm::Mp, 3)).unwrap();
        assert_eq!(t.selections, vec![0, 1, 0]);
        let r1 = t.residual(1).unwrap();
        assert!((r1[0]).abs() < 1e-12 && (r1[1] - 0.3420).abs() < 1e-12);
        let r2 = t.residual(2).unwrap();
        assert!((r2[0] + 0.1481).abs() < 1e-4 && (r2[1] - 0.0855).abs() < 1e-4);

        let o = omp_regress(&y, 2, &cfg(Algorithm::Omp, 3)).unwrap();
        assert_eq!(o.selections, vec![0, 1]);
        assert!(o.residual_norms[1] < 1e-12);
    }

    #[test]
    fn exact_duplicate_stops_after_one_step() {
        let y = cols(&[&[0.0, 1.0, 0.0], &[0.6, 0.0, 0.8], &[0.6, 0.0, 0.8]]);
        for alg in [Algorithm::Mp, Algorithm::Omp] {
            let t = Dictionary::new(&y).unwrap().regress(2, &cfg(alg, 5)).unwrap();
            assert_eq!(t.selections, vec![1]);
            assert!(t.residual_norms[0] < 1e-15);
        }
    }

    #[test]
    fn m_max_one_selects_exactly_once() {
        let y = random_points(5, 12, 3);
        for alg in [Algorithm::Mp, Algorithm::Omp] {
            let t = Dictionary::new(&y).unwrap().regress(4, &cfg(alg, 1)).unwrap();
            assert_eq!(t.iterations(), 1);
        }
    }

    #[test]
    fn zero_query_is_rejected() {
        let y = cols(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(
            mp_regress(&y, 1, &cfg(Algorithm::Mp, 2)),
            Err(Error::ZeroQuery(1))
        ));
        assert!(matches!(
            omp_regress(&y, 1, &cfg(Algorithm::Omp, 2)),
            Err(Error::ZeroQuery(1))
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(Algorithm::Mp, 0);
        assert!(c.validate().is_err());
        c.m_max = 1;
        c.tau_rel = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn gram_and_direct_mp_agree() {
        let y = random_points(8, 30, 5);
        let c = cfg(Algorithm::Mp, 8);
        let direct = Dictionary::new(&y).unwrap();
        let cached = Dictionary::with_gram(&y).unwrap();
        for i in 0..30 {
            let a = direct.regress(i, &c).unwrap();
            let b = cached.regress(i, &c).unwrap();
            assert_eq!(a.selections, b.selections);
            assert!((a.coefficients - b.coefficients).amax() < 1e-12);
        }
    }

    #[test]
    fn omp_coefficients_are_least_squares_fit() {
        let y = random_points(10, 25, 8);
        let t = omp_regress(&y, 3, &cfg(Algorithm::Omp, 6)).unwrap();
        let fit = &y * &t.coefficients;
        let resid = y.column(3) - fit;
        assert!((resid.norm() - t.residual_norms.last().unwrap()).abs() < 1e-10);
        assert!((resid - t.residual(6).unwrap()).amax() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_invariants(seed in 0u64..10_000, n in 3usize..12, count in 4usize..30, m_max in 1usize..10) {
            let y = random_points(n, count, seed);
            let i = (seed as usize) % count;
            for alg in [Algorithm::Mp, Algorithm::Omp] {
                let t = Dictionary::new(&y).unwrap().regress(i, &cfg(alg, m_max)).unwrap();
                prop_assert!(t.iterations() <= m_max);
                prop_assert!(!t.selections.contains(&i));
                prop_assert_eq!(t.coefficients[i], 0.0);
                let mut prev = t.initial_norm;
                for &nrm in &t.residual_norms {
                    prop_assert!(nrm <= prev + 1e-12);
                    prev = nrm;
                }
                for m in 1..=t.iterations() {
                    let r = t.residual(m).unwrap();
                    match alg {
                        Algorithm::Mp => {
                            let last = y.column(t.selections[m - 1]);
                            prop_assert!(r.dot(&last).abs() < 1e-9);
                        }
                        Algorithm::Omp => {
                            for &j in &t.selections[..m] {
                                prop_assert!(r.dot(&y.column(j)).abs() < 1e-9);
                            }
                        }
                    }
                }
                if alg == Algorithm::Omp {
                    let mut s = t.selections.clone();
                    s.sort();
                    s.dedup();
                    prop_assert_eq!(s.len(), t.iterations());
                }
                let again = Dictionary::new(&y).unwrap().regress(i, &cfg(alg, m_max)).unwrap();
                prop_assert_eq!(&again, &t);
            }
        }
    }
}
