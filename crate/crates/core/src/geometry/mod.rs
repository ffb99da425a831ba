//! Data sets, ground-truth subspaces, and the coherence/angle/in-radius
//! quantities the correctness certificates are stated in.

mod inradius;

pub use inradius::{inradius_cluster, inradius_hull, InradiusOptions};

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{project, Mat, Vector};

const UNIT_NORM_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Observed points (columns) with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub points: Mat,
    /// Zero-based cluster id per column; every id in `0..L` occurs.
    pub labels: Option<Vec<usize>>,
    /// Noiseless unit-norm counterparts of `points`.
    pub clean_points: Option<Mat>,
    pub noise_bound: Option<f64>,
}

impl DataSet {
    pub fn new(
        points: Mat,
        labels: Option<Vec<usize>>,
        clean_points: Option<Mat>,
        noise_bound: Option<f64>,
    ) -> Result<Self> {
        if points.ncols() == 0 {
            return Err(Error::InvalidArgument("data set has no points".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entry in data".into()));
        }
        if let Some(eps) = noise_bound {
            if !(eps >= 0.0) {
                return Err(Error::InvalidArgument(format!("noise bound {eps} is negative")));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != points.ncols() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} points",
                    labels.len(),
                    points.ncols()
                )));
            }
            let l = labels.iter().max().map_or(0, |m| m + 1);
            let mut seen = vec![false; l];
            for &k in labels {
                seen[k] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::EmptyCluster);
            }
        }
        if let Some(clean) = &clean_points {
            if clean.shape() != points.shape() {
                return Err(Error::Dimension("clean points shape differs from points".into()));
            }
            for (j, x) in clean.column_iter().enumerate() {
                if (x.norm() - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidArgument(format!("clean point {j} is not unit norm")));
                }
                if let Some(eps) = noise_bound {
                    let dev = (points.column(j) - x).norm();
                    if dev > eps + 1e-12 {
                        return Err(Error::InvalidArgument(format!(
                            "point {j} deviates by {dev} > noise bound {eps}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            points,
            labels,
            clean_points,
            noise_bound,
        })
    }

    pub fn num_points(&self) -> usize {
        self.points.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn num_clusters(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    pub fn labels_required(&self) -> Result<&[usize]> {
        self.labels
            .as_deref()
            .ok_or(Error::MissingGroundTruth("labels"))
    }

    pub fn clean_required(&self) -> Result<&Mat> {
        self.clean_points
            .as_ref()
            .ok_or(Error::MissingGroundTruth("clean points"))
    }

    /// Column indices of cluster `k`, in increasing order.
    pub fn cluster_indices(&self, k: usize) -> Result<Vec<usize>> {
        let idx: Vec<usize> = self
            .labels_required()?
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == k)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            return Err(Error::EmptyCluster);
        }
        Ok(idx)
    }

    /// Noiseless columns of cluster `k`.
    pub fn clean_cluster(&self, k: usize) -> Result<Mat> {
        let clean = self.clean_required()?;
        Ok(select_columns(clean, &self.cluster_indices(k)?))
    }
}

pub(crate) fn select_columns(m: &Mat, idx: &[usize]) -> Mat {
    Mat::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

/// Orthonormal basis of one ground-truth subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    basis: Mat,
}

impl SubspaceModel {
    pub fn new(basis: Mat) -> Result<Self> {
        let (n, d) = basis.shape();
        if d == 0 || d >= n {
            return Err(Error::InvalidArgument(format!(
                "subspace dimension {d} must satisfy 0 < d < n = {n}"
            )));
        }
        let gram_err = (basis.tr_mul(&basis) - Mat::identity(d, d)).amax();
        if gram_err > ORTHONORMAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "basis is not orthonormal (error {gram_err:e})"
            )));
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `(P v, (I − P) v)`.
    pub fn split(&self, v: &Vector) -> (Vector, Vector) {
        project(&self.basis, v)
    }
}

/// Per-cluster geometry of a labelled noiseless data set.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySummary {
    /// Worst-case inter-cluster coherence per cluster.
    pub mu_c: Vec<f64>,
    /// In-radius estimate per cluster (an upper bound on the true value).
    pub r_k: Vec<f64>,
    /// Minimal angle to the nearest other subspace, per cluster.
    pub theta_k: Vec<f64>,
    /// Pairwise subspace affinities.
    pub rho: Mat,
}

impl GeometrySummary {
    pub fn compute(data: &DataSet, models: &[SubspaceModel], opts: &InradiusOptions) -> Result<Self> {
        let l = data.num_clusters().ok_or(Error::MissingGroundTruth("labels"))?;
        if models.len() != l {
            return Err(Error::Dimension(format!("{} models for {l} clusters", models.len())));
        }
        let mu_c = (0..l)
            .map(|k| worst_coherence(data, k))
            .collect::<Result<Vec<_>>>()?;
        let r_k = (0..l)
            .map(|k| inradius_cluster(&data.clean_cluster(k)?, opts))
            .collect::<Result<Vec<_>>>()?;
        let theta_k = (0..l).map(|k| nearest_subspace_angle(models, k)).collect();
        let rho = Mat::from_fn(l, l, |a, b| affinity(&models[a], &models[b]));
        Ok(Self {
            mu_c,
            r_k,
            theta_k,
            rho,
        })
    }
}

/// `max |uᵀv|` over columns `u` of `xk` and `v` of `xl`.
pub fn mutual_coherence(xk: &Mat, xl: &Mat) -> Result<f64> {
    if xk.ncols() == 0 || xl.ncols() == 0 {
        return Err(Error::EmptyCluster);
    }
    if xk.nrows() != xl.nrows() {
        return Err(Error::Dimension("clusters live in different ambient spaces".into()));
    }
    Ok(xk.tr_mul(xl).amax())
}

/// Largest mutual coherence between cluster `k` and any other cluster,
/// measured on the noiseless points.
pub fn worst_coherence(data: &DataSet, k: usize) -> Result<f64> {
    let l = data.num_clusters().ok_or(Error::MissingGroundTruth("labels"))?;
    if l < 2 {
        return Err(Error::InvalidArgument("coherence needs at least two clusters".into()));
    }
    let xk = data.clean_cluster(k)?;
    let mut worst = 0.0_f64;
    for other in (0..l).filter(|&o| o != k) {
        worst = worst.max(mutual_coherence(&xk, &data.clean_cluster(other)?)?);
    }
    Ok(worst)
}

/// Smallest principal angle, `arccos σ_max(AᵀB)`.
pub fn min_subspace_angle(a: &SubspaceModel, b: &SubspaceModel) -> f64 {
    let prod = a.basis().tr_mul(b.basis());
    let smax = prod.singular_values().max();
    smax.clamp(0.0, 1.0).acos().clamp(0.0, FRAC_PI_2)
}

/// `min_{l≠k} θ_kl`.
pub fn nearest_subspace_angle(models: &[SubspaceModel], k: usize) -> f64 {
    models
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != k)
        .map(|(_, m)| min_subspace_angle(&models[k], m))
        .fold(FRAC_PI_2, f64::min)
}

/// `‖UᵢᵀUⱼ‖_F / √min(dᵢ, dⱼ)`.
pub fn affinity(a: &SubspaceModel, b: &SubspaceModel) -> f64 {
    a.basis().tr_mul(b.basis()).norm() / (a.dim().min(b.dim()) as f64).sqrt()
}

/// Angle of deviation of a residual from a subspace:
/// `arctan(‖(I − P) r‖ / ‖P r‖)`.
pub fn aod(r: &Vector, model: &SubspaceModel) -> Result<f64> {
    if r.norm() <= 1e-12 {
        return Err(Error::AodUndefined);
    }
    let (par, perp) = model.split(r);
    let pn = par.norm();
    if pn <= 1e-14 {
        return Ok(FRAC_PI_2);
    }
    Ok(perp.norm().atan2(pn))
}

/// Span of the top-`d` left singular vectors of the (uncentered) points.
pub fn pca_subspace(points: &Mat, d: usize) -> Result<SubspaceModel> {
    if d == 0 || points.ncols() < d {
        return Err(Error::InvalidArgument(format!(
            "need at least d = {d} > 0 points, got {}",
            points.ncols()
        )));
    }
    let svd = points.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = svd.singular_values[order[0]];
    if smax == 0.0 || svd.singular_values[order[d - 1]] <= 1e-10 * smax {
        return Err(Error::InvalidArgument(format!("requested rank {d} exceeds data rank")));
    }
    let cols: Vec<Vector> = order[..d].iter().map(|&i| u.column(i).into_owned()).collect();
    SubspaceModel::new(Mat::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{orthonormalize, rng_stream, sample_unit_sphere};
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn span(cols: &[Vector]) -> SubspaceModel {
        SubspaceModel::new(orthonormalize(&Mat::from_columns(cols)).unwrap()).unwrap()
    }

    fn random_subspace(n: usize, d: usize, seed: u64) -> SubspaceModel {
        let mut rng = rng_stream(seed, 0);
        let g = Mat::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
        SubspaceModel::new(orthonormalize(&g).unwrap()).unwrap()
    }

    fn points_in(model: &SubspaceModel, count: usize, seed: u64) -> Mat {
        let mut rng = rng_stream(seed, 1);
        let cols: Vec<Vector> = (0..count)
            .map(|_| model.basis() * sample_unit_sphere(&mut rng, model.dim()))
            .collect();
        Mat::from_columns(&cols)
    }

    #[test]
    fn coherence_examples() {
        let a = Mat::from_columns(&[e(2, 0)]);
        let b = Mat::from_columns(&[e(2, 1)]);
        assert_eq!(mutual_coherence(&a, &b).unwrap(), 0.0);
        let c = Mat::from_columns(&[(e(2, 0) + e(2, 1)) * FRAC_1_SQRT_2]);
        assert!((mutual_coherence(&a, &c).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            mutual_coherence(&Mat::zeros(2, 0), &a),
            Err(Error::EmptyCluster)
        ));
    }

    #[test]
    fn coherence_matches_double_loop_and_is_symmetric() {
        let a = points_in(&random_subspace(8, 3, 1), 12, 2);
        let b = points_in(&random_subspace(8, 3, 3), 9, 4);
        let mut brute = 0.0_f64;
        for u in a.column_iter() {
            for v in b.column_iter() {
                let mut dot = 0.0;
                for r in 0..8 {
                    dot += u[r] * v[r];
                }
                brute = brute.max(dot.abs());
            }
        }
        let got = mutual_coherence(&a, &b).unwrap();
        assert!((got - brute).abs() < 1e-14);
        assert_eq!(got, mutual_coherence(&b, &a).unwrap());
    }

    #[test]
    fn worst_coherence_needs_two_clusters() {
        let x = Mat::from_columns(&[e(3, 0), e(3, 1)]);
        let data = DataSet::new(x.clone(), Some(vec![0, 0]), Some(x), Some(0.0)).unwrap();
        assert!(worst_coherence(&data, 0).is_err());
    }

    #[test]
    fn worst_coherence_takes_max_over_clusters() {
        let s = FRAC_1_SQRT_2;
        let x = Mat::from_columns(&[e(3, 0), e(3, 1), (e(3, 0) + e(3, 2)) * s]);
        let data = DataSet::new(x.clone(), Some(vec![0, 1, 2]), Some(x), None).unwrap();
        assert!((worst_coherence(&data, 0).unwrap() - s).abs() < 1e-15);
        assert_eq!(worst_coherence(&data, 1).unwrap(), 0.0);
    }

    #[test]
    fn dataset_validation() {
        let x = Mat::from_columns(&[e(3, 0), e(3, 1)]);
        assert!(DataSet::new(x.clone(), Some(vec![0, 2]), None, None).is_err());
        assert!(DataSet::new(x.clone(), Some(vec![0]), None, None).is_err());
        let y = &x * 2.0;
        assert!(DataSet::new(x.clone(), None, Some(y), None).is_err());
        let noisy = &x + Mat::from_element(3, 2, 0.1);
        assert!(DataSet::new(noisy.clone(), None, Some(x.clone()), Some(0.1)).is_err());
        assert!(DataSet::new(noisy, None, Some(x), Some(0.2)).is_ok());
    }

    #[test]
    fn subspace_model_validation() {
        assert!(SubspaceModel::new(Mat::identity(3, 3)).is_err());
        assert!(SubspaceModel::new(Mat::from_columns(&[e(3, 0) * 2.0])).is_err());
        assert!(SubspaceModel::new(Mat::from_columns(&[e(3, 0), e(3, 1)])).is_ok());
    }

    #[test]
    fn subspace_angle_examples() {
        let a = span(&[e(3, 0)]);
        let b = span(&[e(3, 1)]);
        let c = span(&[(e(3, 0) + e(3, 1)) * FRAC_1_SQRT_2]);
        assert!((min_subspace_angle(&a, &b) - FRAC_PI_2).abs() < 1e-15);
        assert!((min_subspace_angle(&a, &c) - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(min_subspace_angle(&a, &a), 0.0);
    }

    #[test]
    fn affinity_examples() {
        let a = span(&[e(4, 0), e(4, 1)]);
        let b = span(&[e(4, 2), e(4, 3)]);
        assert!((affinity(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(affinity(&a, &b), 0.0);
        for seed in 0..20 {
            let x = random_subspace(10, 3, seed);
            let y = random_subspace(10, 4, seed + 100);
            let r = affinity(&x, &y);
            assert!((-1e-12..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn aod_examples() {
        let s = span(&[e(3, 0), e(3, 1)]);
        assert_eq!(aod(&Vector::from_vec(vec![0.3, -0.2, 0.0]), &s).unwrap(), 0.0);
        assert_eq!(aod(&e(3, 2), &s).unwrap(), FRAC_PI_2);
        let r = Vector::from_vec(vec![1.0, 0.0, 1.0]);
        assert!((aod(&r, &s).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(aod(&Vector::zeros(3), &s), Err(Error::AodUndefined)));
    }

    #[test]
    fn aod_is_scale_invariant() {
        let s = random_subspace(6, 2, 9);
        let mut rng = rng_stream(4, 4);
        for _ in 0..50 {
            let r = sample_unit_sphere(&mut rng, 6);
            let a = aod(&r, &s).unwrap();
            assert!((aod(&(&r * 17.5), &s).unwrap() - a).abs() < 1e-12);
            assert!((aod(&(&r * 1e-3), &s).unwrap() - a).abs() < 1e-12);
        }
    }

    /// For a residual at AoD φ from S_k and any unit x_l in another subspace
    /// at minimal angle θ ≥ φ: |cos∠(r, x_l)| ≤ cos(θ − φ).
    #[test]
    fn spherical_triangle_bound() {
        let n = 10;
        let mut rng = rng_stream(77, 0);
        let mut checked = 0;
        for inst in 0..10_000u64 {
            let sk = random_subspace(n, 3, 1000 + inst % 50);
            let sl = random_subspace(n, 3, 5000 + inst % 37);
            let theta = min_subspace_angle(&sk, &sl);
            let w = sk.basis() * sample_unit_sphere(&mut rng, 3);
            let (_, z) = sk.split(&sample_unit_sphere(&mut rng, n));
            let tilt: f64 = rand::Rng::random::<f64>(&mut rng) * theta;
            let r = &w * tilt.cos() + z.normalize() * tilt.sin();
            let phi = aod(&r, &sk).unwrap();
            if phi > theta {
                continue;
            }
            let x = sl.basis() * sample_unit_sphere(&mut rng, 3);
            let cos = (r.dot(&x) / r.norm()).abs();
            assert!(cos <= (theta - phi).cos() + 1e-9, "instance {inst}");
            checked += 1;
        }
        assert!(checked > 9000);
    }

    #[test]
    fn pca_recovers_coordinate_span() {
        let pts = Mat::from_columns(&[
            Vector::from_vec(vec![1.0, 2.0, 0.0]),
            Vector::from_vec(vec![-1.0, 0.5, 0.0]),
            Vector::from_vec(vec![0.3, 0.3, 0.0]),
        ]);
        let m = pca_subspace(&pts, 2).unwrap();
        assert!(min_subspace_angle(&m, &span(&[e(3, 0), e(3, 1)])) < 1e-12);
        assert!((affinity(&m, &span(&[e(3, 0), e(3, 1)])) - 1.0).abs() < 1e-12);
        assert!(pca_subspace(&pts, 3).is_err());
    }

    #[test]
    fn pca_round_trip() {
        let truth = random_subspace(30, 5, 12);
        let pts = points_in(&truth, 40, 13);
        let m = pca_subspace(&pts, 5).unwrap();
        // sine of the largest principal angle between the two spans
        let off = m.basis() - truth.basis() * truth.basis().tr_mul(m.basis());
        let sin_max = off.singular_values().max();
        assert!(sin_max.asin() < 1e-8, "{sin_max}");
        // rank exactly d
        let pts = points_in(&truth, 5, 14);
        let m = pca_subspace(&pts, 5).unwrap();
        let s = m.basis().tr_mul(truth.basis()).singular_values();
        assert!(s.iter().all(|&v| (v - 1.0).abs() < 1e-10));
    }
}
