//! Similarity graph from sparse codes, normalized spectral clustering, and
//! clustering accuracy.

mod assignment;
mod metrics;

pub use assignment::max_weight_assignment;
pub use metrics::{compute_metrics, epsilon_from_snr_db, snr_db, MetricAccumulator, MetricSeries};

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{derive_stream, sym_eig, Mat, Vector};

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 100;
const DEGREE_FLOOR: f64 = 1e-12;

/// Symmetric nonnegative weights with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub weights: Mat,
}

impl SimilarityGraph {
    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.nrows() == 0
    }
}

/// `W[i][j] = |c_i[j]| + |c_j[i]|`.
pub fn build_similarity(coefficients: &[Vector]) -> Result<SimilarityGraph> {
    let n = coefficients.len();
    for (i, c) in coefficients.iter().enumerate() {
        if c.len() != n {
            return Err(Error::Dimension(format!(
                "coefficient vector {i} has length {}, expected {n}",
                c.len()
            )));
        }
        if c[i] != 0.0 {
            return Err(Error::InvalidArgument(format!("point {i} has a self-coefficient")));
        }
    }
    let weights = Mat::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            coefficients[i][j].abs() + coefficients[j][i].abs()
        }
    });
    Ok(SimilarityGraph { weights })
}

/// Rename labels to `0, 1, …` in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Spectral embedding: eigenvectors of the `k` smallest eigenvalues of
/// `I − D^{-1/2} W D^{-1/2}`, rows scaled to unit length.
pub fn spectral_embedding(w: &SimilarityGraph, k: usize) -> Result<Mat> {
    let n = w.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("cannot embed {n} nodes into {k} dimensions")));
    }
    let inv_sqrt: Vec<f64> = w
        .weights
        .row_iter()
        .map(|r| 1.0 / r.sum().max(DEGREE_FLOOR).sqrt())
        .collect();
    let lap = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - inv_sqrt[i] * w.weights[(i, j)] * inv_sqrt[j]
    });
    let eig = sym_eig(&lap)?;
    let mut emb = eig.vectors.columns(0, k).into_owned();
    for mut row in emb.row_iter_mut() {
        let nrm = row.norm();
        if nrm > 0.0 {
            row /= nrm;
        }
    }
    Ok(emb)
}

/// Normalized spectral clustering into `k` groups; labels are canonical.
pub fn spectral_cluster(w: &SimilarityGraph, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidArgument("need at least two clusters".into()));
    }
    if k > w.len() {
        return Err(Error::InvalidArgument(format!(
            "{k} clusters requested for {} points",
            w.len()
        )));
    }
    let emb = spectral_embedding(w, k)?;
    let km = kmeans(&emb, k, seed, KMEANS_RESTARTS, KMEANS_MAX_ITER)?;
    Ok(canonical_labels(&km.labels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub labels: Vec<usize>,
    /// One center per row.
    pub centers: Mat,
    pub inertia: f64,
}

fn sq_dist(points: &Mat, i: usize, centers: &Mat, c: usize) -> f64 {
    (0..points.ncols())
        .map(|t| (points[(i, t)] - centers[(c, t)]).powi(2))
        .sum()
}

/// Nearest center per point (lowest index on ties) and its squared distance.
fn assign(points: &Mat, centers: &Mat) -> (Vec<usize>, Vec<f64>) {
    (0..points.nrows())
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for c in 0..centers.nrows() {
                let d = sq_dist(points, i, centers, c);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Farthest-point seeding from a random first center.
fn seed_centers<R: Rng + ?Sized>(points: &Mat, k: usize, rng: &mut R) -> Mat {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let last = points.row(*chosen.last().unwrap());
        let mut far = (0, -1.0);
        for (i, nd) in nearest.iter_mut().enumerate() {
            *nd = nd.min((points.row(i) - last).norm_squared());
            if *nd > far.1 {
                far = (i, *nd);
            }
        }
        chosen.push(far.0);
    }
    Mat::from_fn(k, points.ncols(), |c, t| points[(chosen[c], t)])
}

fn lloyd(points: &Mat, mut centers: Mat, max_iter: usize) -> KMeans {
    let (n, k) = (points.nrows(), centers.nrows());
    let (mut labels, mut dists) = assign(points, &centers);
    for _ in 0..max_iter {
        let mut sums = Mat::zeros(k, points.ncols());
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            let mut row = sums.row_mut(labels[i]);
            row += points.row(i);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let row = sums.row(c) / counts[c] as f64;
                centers.set_row(c, &row);
            } else {
                // Re-seed an empty cluster at the worst-served point.
                let (far, _) = dists
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |b, (i, &d)| if d > b.1 { (i, d) } else { b });
                centers.set_row(c, &points.row(far));
                dists[far] = 0.0;
            }
        }
        let (next, next_dists) = assign(points, &centers);
        let done = next == labels;
        labels = next;
        dists = next_dists;
        if done {
            break;
        }
    }
    KMeans {
        labels,
        centers,
        inertia: dists.iter().sum(),
    }
}

/// Lloyd's k-means over the rows of `points`; the restart with the lowest
/// inertia is returned (earliest on ties).
pub fn kmeans(points: &Mat, k: usize, seed: u64, restarts: usize, max_iter: usize) -> Result<KMeans> {
    if k == 0 || k > points.nrows() {
        return Err(Error::InvalidArgument(format!(
            "{k} clusters requested for {} points",
            points.nrows()
        )));
    }
    let mut best: Option<KMeans> = None;
    for r in 0..restarts.max(1) {
        let mut rng = derive_stream(seed, &[r as u64]);
        let run = lloyd(points, seed_centers(points, k, &mut rng), max_iter);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Fraction of points whose predicted label maps to their true label under
/// the best one-to-one matching of label names.
pub fn ccr(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "{} predicted labels for {} points",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no labels".into()));
    }
    let dense = |l: &[usize]| {
        let mut vals: Vec<usize> = l.to_vec();
        vals.sort_unstable();
        vals.dedup();
        let idx: Vec<usize> = l.iter().map(|v| vals.binary_search(v).unwrap()).collect();
        (idx, vals.len())
    };
    let (p, np) = dense(predicted);
    let (t, nt) = dense(truth);
    let size = np.max(nt);
    let mut counts = vec![vec![0.0; size]; size];
    for (&a, &b) in p.iter().zip(&t) {
        counts[a][b] += 1.0;
    }
    let matched: f64 = max_weight_assignment(&counts)
        .iter()
        .enumerate()
        .map(|(a, &b)| counts[a][b])
        .sum();
    Ok(matched / truth.len() as f64)
}
