//! In-radius of the symmetric convex hull of a point set, within its span.
//!
//! The in-radius equals `min_u max_j |x_jᵀu|` over unit directions `u` in
//! the span. It is estimated by sampling directions, refining the best ones
//! with projected subgradient steps, and polishing onto vertices of the
//! polar polytope. Every reported value is `max_j |x_jᵀu|` for an actual
//! unit `u`, hence an upper bound on the true in-radius.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{orthonormalize, rng_stream, sample_unit_sphere, Mat, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InradiusOptions {
    /// Random directions sampled in the span.
    pub directions: usize,
    /// Best samples refined per hull.
    pub refine: usize,
    /// Leave-one-out hulls refined in [`inradius_cluster`].
    pub refine_points: usize,
    pub seed: u64,
}

impl Default for InradiusOptions {
    fn default() -> Self {
        Self {
            directions: 20_000,
            refine: 16,
            refine_points: 4,
            seed: 0x1A_D1A5,
        }
    }
}

/// Points expressed in an orthonormal basis of their span (`k × m`).
struct SpanCoords {
    z: Mat,
}

impl SpanCoords {
    fn new(cols: &Mat) -> Result<Self> {
        let q = orthonormalize(cols)?;
        Ok(Self { z: q.tr_mul(cols) })
    }

    fn dim(&self) -> usize {
        self.z.nrows()
    }

    /// `(max_j |z_jᵀu|, argmax, second largest)`, skipping `exclude`.
    fn top2(&self, u: &Vector, exclude: Option<usize>) -> (f64, usize, f64) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        let mut second = f64::NEG_INFINITY;
        for (j, col) in self.z.column_iter().enumerate() {
            if Some(j) == exclude {
                continue;
            }
            let v = col.dot(u).abs();
            if v > best.0 {
                second = best.0;
                best = (v, j);
            } else if v > second {
                second = v;
            }
        }
        (best.0, best.1, second)
    }

    fn value(&self, u: &Vector, exclude: Option<usize>) -> f64 {
        self.top2(u, exclude).0
    }

    /// Subgradient descent on the sphere followed by vertex polishing.
    fn refine(&self, start: Vector, exclude: Option<usize>) -> f64 {
        let mut u = start;
        let mut best_u = u.clone();
        let mut best = self.value(&u, exclude);
        let mut step = 0.2;
        for _ in 0..400 {
            let (mut jmax, mut vmax) = (usize::MAX, f64::NEG_INFINITY);
            for (j, col) in self.z.column_iter().enumerate() {
                if Some(j) == exclude {
                    continue;
                }
                let v = col.dot(&u);
                if v.abs() > vmax {
                    vmax = v.abs();
                    jmax = j;
                }
            }
            let g = self.z.column(jmax) * self.z.column(jmax).dot(&u).signum();
            let tangent = &g - &u * g.dot(&u);
            let tn = tangent.norm();
            if tn < 1e-15 {
                break;
            }
            u -= tangent * (step / tn);
            u.normalize_mut();
            let v = self.value(&u, exclude);
            if v < best {
                best = v;
                best_u = u.clone();
            }
            step *= 0.985;
        }
        self.polish(best_u, best, exclude)
    }

    /// Solve for the polar vertex defined by the `k` most active points and
    /// move there while that lowers the objective.
    fn polish(&self, mut u: Vector, mut best: f64, exclude: Option<usize>) -> f64 {
        let k = self.dim();
        for _ in 0..20 {
            let mut active: Vec<(f64, usize)> = self
                .z
                .column_iter()
                .enumerate()
                .filter(|(j, _)| Some(*j) != exclude)
                .map(|(j, c)| (c.dot(&u), j))
                .collect();
            if active.len() < k {
                break;
            }
            active.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()).then(a.1.cmp(&b.1)));
            let rows = DMatrix::from_fn(k, k, |r, c| {
                let (dot, j) = active[r];
                dot.signum() * self.z[(c, j)]
            });
            let Some(v) = rows.lu().solve(&Vector::from_element(k, 1.0)) else {
                break;
            };
            let vn = v.norm();
            if !vn.is_finite() || vn == 0.0 {
                break;
            }
            let cand = v / vn;
            let val = self.value(&cand, exclude);
            if val < best - 1e-15 {
                best = val;
                u = cand;
            } else {
                break;
            }
        }
        best
    }

    fn sample_directions(&self, opts: &InradiusOptions) -> Vec<Vector> {
        let mut rng = rng_stream(opts.seed, self.dim() as u64);
        (0..opts.directions.max(1))
            .map(|_| sample_unit_sphere(&mut rng, self.dim()))
            .collect()
    }

    fn estimate(&self, dirs: &[Vector], opts: &InradiusOptions, exclude: Option<usize>) -> f64 {
        if self.dim() == 1 {
            return self.value(&Vector::from_element(1, 1.0), exclude);
        }
        let mut scored: Vec<(f64, usize)> = dirs
            .iter()
            .enumerate()
            .map(|(i, u)| (self.value(u, exclude), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored
            .iter()
            .take(opts.refine.max(1))
            .map(|&(v, i)| v.min(self.refine(dirs[i].clone(), exclude)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// In-radius estimate of the symmetric convex hull of the columns of `x`,
/// measured inside their span.
pub fn inradius_hull(x: &Mat, opts: &InradiusOptions) -> Result<f64> {
    if x.ncols() == 0 {
        return Err(Error::EmptyCluster);
    }
    let coords = SpanCoords::new(x)?;
    let dirs = coords.sample_directions(opts);
    Ok(coords.estimate(&dirs, opts, None))
}

/// `min_i r(P(X₋ᵢ))` over leave-one-out hulls of a cluster.
///
/// Directions are sampled once and scored for every left-out point; the
/// `refine_points` most promising points get the full refinement. Points
/// whose removal shrinks the span are evaluated in their own span.
pub fn inradius_cluster(x: &Mat, opts: &InradiusOptions) -> Result<f64> {
    let m = x.ncols();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "in-radius of a cluster needs at least two points".into(),
        ));
    }
    let coords = SpanCoords::new(x)?;
    let k = coords.dim();

    // Leverage h_ii = z_iᵀ(ZZᵀ)⁻¹z_i equals 1 exactly when removing point i
    // drops the rank.
    let gram = &coords.z * coords.z.transpose();
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular span Gram matrix".into()))?;
    let rank_critical: Vec<bool> = (0..m)
        .map(|i| {
            let zi = coords.z.column(i);
            (zi.transpose() * &gram_inv * zi)[(0, 0)] > 1.0 - 1e-8
        })
        .collect();

    let mut best = f64::INFINITY;
    for i in (0..m).filter(|&i| rank_critical[i]) {
        let rest: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        let sub = super::select_columns(x, &rest);
        if sub.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        best = best.min(inradius_hull(&sub, opts)?);
    }

    if k == 1 {
        for i in (0..m).filter(|&i| !rank_critical[i]) {
            best = best.min(coords.value(&Vector::from_element(1, 1.0), Some(i)));
        }
        return Ok(best);
    }

    let dirs = coords.sample_directions(opts);
    let mut sampled = vec![f64::INFINITY; m];
    let mut global = f64::INFINITY;
    for u in &dirs {
        let (top, arg, second) = coords.top2(u, None);
        global = global.min(top);
        sampled[arg] = sampled[arg].min(second);
    }
    for s in sampled.iter_mut() {
        *s = s.min(global);
    }
    let mut order: Vec<usize> = (0..m).filter(|&i| !rank_critical[i]).collect();
    order.sort_by(|&a, &b| sampled[a].total_cmp(&sampled[b]).then(a.cmp(&b)));
    for &i in &order {
        best = best.min(sampled[i]);
    }
    for &i in order.iter().take(opts.refine_points.max(1)) {
        best = best.min(coords.estimate(&dirs, opts, Some(i)));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rng_stream, sample_unit_sphere};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    /// Exact in-radius in a 2-D span by scanning the direction angle.
    fn angular_oracle(points2d: &[(f64, f64)], n: usize) -> f64 {
        (0..n)
            .map(|k| {
                let t = PI * k as f64 / n as f64;
                let (s, c) = t.sin_cos();
                points2d
                    .iter()
                    .map(|&(a, b)| (a * c + b * s).abs())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn square_cross_polytope() {
        let x = Mat::identity(2, 2);
        let r = inradius_hull(&x, &InradiusOptions::default()).unwrap();
        assert!((r - FRAC_1_SQRT_2).abs() < 1e-12, "{r}");
    }

    #[test]
    fn orthonormal_columns_give_inverse_sqrt_dim() {
        for d in 2..=6 {
            let x = Mat::identity(d + 2, d);
            let r = inradius_hull(&x, &InradiusOptions::default()).unwrap();
            assert!((r - 1.0 / (d as f64).sqrt()).abs() < 1e-9, "d={d}: {r}");
        }
    }

    #[test]
    fn random_planar_sets_match_angular_oracle() {
        let mut rng = rng_stream(5, 5);
        for inst in 0..20 {
            let plane = orthonormalize(&Mat::from_fn(6, 2, |_, _| {
                rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, &mut rng)
            }))
            .unwrap();
            let pts2: Vec<(f64, f64)> = (0..50)
                .map(|_| {
                    let v = sample_unit_sphere(&mut rng, 2);
                    (v[0], v[1])
                })
                .collect();
            let cols: Vec<Vector> = pts2
                .iter()
                .map(|&(a, b)| plane.column(0) * a + plane.column(1) * b)
                .collect();
            let x = Mat::from_columns(&cols);
            let est = inradius_hull(&x, &InradiusOptions::default()).unwrap();
            let exact = angular_oracle(&pts2, 1_000_000);
            // the grid scan itself overestimates by at most ~π/10⁶
            assert!(est >= exact - 1e-5, "estimate below the exact value");
            assert!((est - exact).abs() < 1e-3, "instance {inst}: {est} vs {exact}");
        }
    }

    #[test]
    fn hull_value_is_at_most_one_for_unit_points() {
        let mut rng = rng_stream(8, 1);
        let cols: Vec<Vector> = (0..15).map(|_| sample_unit_sphere(&mut rng, 4)).collect();
        let r = inradius_hull(&Mat::from_columns(&cols), &InradiusOptions::default()).unwrap();
        assert!(r > 0.0 && r <= 1.0);
    }

    #[test]
    fn cluster_needs_two_points() {
        let x = Mat::from_columns(&[Vector::from_vec(vec![1.0, 0.0])]);
        assert!(inradius_cluster(&x, &InradiusOptions::default()).is_err());
    }

    #[test]
    fn cluster_leave_one_out_matches_brute_force() {
        let mut rng = rng_stream(9, 2);
        let cols: Vec<Vector> = (0..12).map(|_| sample_unit_sphere(&mut rng, 3)).collect();
        let x = Mat::from_columns(&cols);
        let opts = InradiusOptions::default();
        let brute = (0..12)
            .map(|i| {
                let rest: Vec<Vector> = cols
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| c.clone())
                    .collect();
                inradius_hull(&Mat::from_columns(&rest), &opts).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        let got = inradius_cluster(&x, &opts).unwrap();
        assert!((got - brute).abs() < 2e-3, "{got} vs {brute}");
    }

    #[test]
    fn cluster_handles_rank_dropping_points() {
        // e1, e2 and a third point: removing e3-direction point drops rank.
        let x = Mat::from_columns(&[
            Vector::from_vec(vec![1.0, 0.0, 0.0]),
            Vector::from_vec(vec![0.0, 1.0, 0.0]),
            Vector::from_vec(vec![0.0, 0.0, 1.0]),
        ]);
        let r = inradius_cluster(&x, &InradiusOptions::default()).unwrap();
        // each leave-one-out hull is the square cross-polytope in a plane
        assert!((r - FRAC_1_SQRT_2).abs() < 1e-9, "{r}");
    }
}
