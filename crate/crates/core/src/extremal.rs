//! Extremes of the noisy inner product of two unit vectors.
//!
//! For unit `x_i`, `x_j` at angle `φ` and noise vectors bounded by `ε`, the
//! worst-case inner products are `cos φ + max/min_θ f_φ(θ)` with
//! `f_φ(θ) = 2ε cos(φ/2 + θ) + ε² cos 2θ`. The stationarity condition
//! `sin(φ/2 + θ) + ε sin 2θ = 0` reduces, through `x = tan(θ/2 − φ/4)`, to
//! the quartic
//!
//! ```text
//! g(x) = E tanφ x⁴ + (1 − 3E) x³ + 3 tanφ (1 − E) x² + (E − 3) x − tanφ,
//! E = (1 − ε)/(1 + ε),
//! ```
//!
//! whose real roots give every candidate extremizer.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::numerics::{derive_stream, sample_ball, Quartic, Vector};

/// Stationarity residual accepted for a returned angle.
pub const STATIONARY_TOL: f64 = 1e-8;
/// Half-width of the band around φ = π/2 where `tan φ` is considered
/// ill-conditioned and the bracketing path is used instead.
pub const TAN_BLOWUP_BAND: f64 = 0.05;
/// Initial brackets for the 1-D fallback.
pub const FALLBACK_BRACKETS: usize = 4096;
/// Slack used when checking Monte Carlo samples against the bounds.
pub const MC_SLACK: f64 = 1e-9;

/// How the extremizers were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalMethod {
    Quartic,
    Bracketed,
}

impl ExtremalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremalMethod::Quartic => "quartic",
            ExtremalMethod::Bracketed => "bracketed-1d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalResult {
    pub theta_max: f64,
    pub f_max: f64,
    pub theta_min: f64,
    pub f_min: f64,
    pub method: ExtremalMethod,
}

/// `f_φ(θ) = 2ε cos(φ/2 + θ) + ε² cos 2θ`.
pub fn f_eval(phi: f64, eps: f64, theta: f64) -> f64 {
    2.0 * eps * (0.5 * phi + theta).cos() + eps * eps * (2.0 * theta).cos()
}

/// Stationarity residual `sin(φ/2 + θ) + ε sin 2θ` (proportional to `f_φ'`).
pub fn stationarity(phi: f64, eps: f64, theta: f64) -> f64 {
    (0.5 * phi + theta).sin() + eps * (2.0 * theta).sin()
}

fn stationarity_slope(phi: f64, eps: f64, theta: f64) -> f64 {
    (0.5 * phi + theta).cos() + 2.0 * eps * (2.0 * theta).cos()
}

/// The quartic whose roots are `tan(θ/2 − φ/4)` at stationary points.
pub fn stationarity_quartic(phi: f64, eps: f64) -> Quartic {
    let t = phi.tan();
    let e = (1.0 - eps) / (1.0 + eps);
    Quartic::new(e * t, 1.0 - 3.0 * e, 3.0 * t * (1.0 - e), e - 3.0, -t)
}

fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Newton steps on the stationarity condition; keeps the better iterate.
fn polish(phi: f64, eps: f64, theta: f64) -> f64 {
    let mut best = theta;
    let mut best_res = stationarity(phi, eps, theta).abs();
    let mut t = theta;
    for _ in 0..8 {
        let slope = stationarity_slope(phi, eps, t);
        if slope.abs() < 1e-300 {
            break;
        }
        t -= stationarity(phi, eps, t) / slope;
        let res = stationarity(phi, eps, t).abs();
        if res < best_res {
            best = t;
            best_res = res;
        }
        if res == 0.0 {
            break;
        }
    }
    wrap_angle(best)
}

fn select(phi: f64, eps: f64, candidates: &[f64], method: ExtremalMethod) -> Option<ExtremalResult> {
    let mut best_max: Option<(f64, f64)> = None;
    let mut best_min: Option<(f64, f64)> = None;
    for &theta in candidates {
        let v = f_eval(phi, eps, theta);
        if best_max.is_none_or(|(_, m)| v > m) {
            best_max = Some((theta, v));
        }
        if best_min.is_none_or(|(_, m)| v < m) {
            best_min = Some((theta, v));
        }
    }
    let ((theta_max, f_max), (theta_min, f_min)) = (best_max?, best_min?);
    Some(ExtremalResult {
        theta_max,
        f_max,
        theta_min,
        f_min,
        method,
    })
}

/// Coarse scan used to reject a quartic solution that missed an extremum.
fn coarse_range(phi: f64, eps: f64) -> (f64, f64) {
    let n = 720;
    (0..n)
        .map(|k| f_eval(phi, eps, TAU * k as f64 / n as f64))
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), v| {
            (hi.max(v), lo.min(v))
        })
}

/// Extremes via the quartic reduction. `None` when the reduction is
/// singular or ill-conditioned for this `(φ, ε)`.
pub fn f_extremes_quartic(phi: f64, eps: f64) -> Option<ExtremalResult> {
    if !(phi > 0.0 && phi < PI / 2.0) || (phi - PI / 2.0).abs() < TAN_BLOWUP_BAND {
        return None;
    }
    let roots = stationarity_quartic(phi, eps).real_roots().ok()?;
    // tan(θ/2 − φ/4) = ±∞ corresponds to θ = π + φ/2; it is a stationary
    // point only when the quartic loses its leading term (ε = 1).
    let mut raw = vec![PI + 0.5 * phi];
    for x in roots {
        let half = x.atan();
        for branch in [half, half + PI] {
            raw.push(2.0 * branch + 0.5 * phi);
        }
    }
    let mut candidates: Vec<f64> = Vec::new();
    for theta in raw {
        let t = polish(phi, eps, wrap_angle(theta));
        if stationarity(phi, eps, t).abs() <= STATIONARY_TOL
            && candidates.iter().all(|&c| circular_distance(c, t) > 1e-12)
        {
            candidates.push(t);
        }
    }
    let result = select(phi, eps, &candidates, ExtremalMethod::Quartic)?;
    let (hi, lo) = coarse_range(phi, eps);
    if hi > result.f_max + 1e-10 || lo < result.f_min - 1e-10 {
        return None;
    }
    Some(result)
}

/// Extremes via sign-change bracketing of the stationarity condition on
/// `[0, 2π)` followed by bisection.
pub fn f_extremes_bracketed(phi: f64, eps: f64) -> ExtremalResult {
    let n = FALLBACK_BRACKETS;
    let h = |t: f64| stationarity(phi, eps, t);
    let grid: Vec<f64> = (0..=n).map(|k| TAU * k as f64 / n as f64).collect();
    let mut candidates = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (ha, hb) = (h(a), h(b));
        if ha == 0.0 {
            candidates.push(wrap_angle(a));
            continue;
        }
        if ha * hb > 0.0 {
            continue;
        }
        let sa = ha > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if (h(mid) > 0.0) == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        let t = if h(a).abs() <= h(b).abs() { a } else { b };
        candidates.push(wrap_angle(t));
    }
    if candidates.is_empty() {
        // Only reachable when f is constant (ε = 0 handled identically).
        candidates.push(0.0);
    }
    select(phi, eps, &candidates, ExtremalMethod::Bracketed).expect("nonempty candidates")
}

/// Maximizer and minimizer of `f_φ` over `[0, 2π)`. Uses the quartic
/// reduction and falls back to 1-D bracketing near `φ = π/2` or when the
/// quartic solution fails verification.
pub fn f_extremes(phi: f64, eps: f64) -> ExtremalResult {
    f_extremes_quartic(phi, eps).unwrap_or_else(|| f_extremes_bracketed(phi, eps))
}

/// Maximum and minimum of `(x_i + e_i)ᵀ(x_j + e_j)` over `‖e‖ ≤ ε`, given
/// `c = x_iᵀx_j ∈ (0, 1)`. Returned as `(upper, lower)`.
pub fn noisy_inner_bounds(c: f64, eps: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::LemmaHypothesis(c));
    }
    if eps < 0.0 {
        return Err(Error::InvalidArgument(format!("noise bound {eps} is negative")));
    }
    let ext = f_extremes(c.acos(), eps);
    Ok((c + ext.f_max, c + ext.f_min))
}

/// Noisy inner product with in-plane perturbations at angles `θ_i`
/// (counter-clockwise) and `θ_j` (clockwise), both of norm `ε`.
pub fn pairwise_objective(phi: f64, eps: f64, theta_i: f64, theta_j: f64) -> f64 {
    phi.cos()
        + eps * ((0.5 * phi + theta_i).cos() + (0.5 * phi + theta_j).cos())
        + eps * eps * (theta_i + theta_j).cos()
}

/// Unit vectors `[cos(φ/2), ±sin(φ/2), 0, …]` in ℝⁿ with inner product
/// `cos φ`.
pub fn make_pair(phi: f64, n: usize) -> (Vector, Vector) {
    assert!(n >= 2, "pair construction needs n >= 2");
    let (s, c) = (0.5 * phi).sin_cos();
    let mut x1 = Vector::zeros(n);
    let mut x2 = Vector::zeros(n);
    x1[0] = c;
    x1[1] = s;
    x2[0] = c;
    x2[1] = -s;
    (x1, x2)
}

/// Perturbations realizing `pairwise_objective(φ, ε, θ, θ)` for the pair
/// returned by [`make_pair`].
pub fn in_plane_perturbations(eps: f64, theta: f64, n: usize) -> (Vector, Vector) {
    let (s, c) = theta.sin_cos();
    let mut e1 = Vector::zeros(n);
    let mut e2 = Vector::zeros(n);
    e1[0] = eps * c;
    e1[1] = eps * s;
    e2[0] = eps * c;
    e2[1] = -eps * s;
    (e1, e2)
}

/// Extremes of `f_φ` from a uniform `points`-grid over `[0, 2π)` refined by
/// golden-section search around the best grid cells. Independent of the
/// stationarity machinery; used as a reference.
pub fn grid_extremes(phi: f64, eps: f64, points: usize) -> GridExtremes {
    let f = |t: f64| f_eval(phi, eps, t);
    let n = points.max(3);
    let step = TAU / n as f64;
    let (mut kmax, mut kmin) = (0usize, 0usize);
    let (mut vmax, mut vmin) = (f(0.0), f(0.0));
    for k in 1..n {
        let v = f(k as f64 * step);
        if v > vmax {
            vmax = v;
            kmax = k;
        }
        if v < vmin {
            vmin = v;
            kmin = k;
        }
    }
    let golden = |k: usize, sign: f64| {
        let g = |t: f64| sign * f(t);
        let (mut a, mut b) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        for _ in 0..100 {
            if g(c) > g(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - r * (b - a);
            d = a + r * (b - a);
        }
        let t = 0.5 * (a + b);
        (t.rem_euclid(TAU), f(t))
    };
    let (mut theta_max, mut f_max) = (kmax as f64 * step, vmax);
    let (t, v) = golden(kmax, 1.0);
    if v > f_max {
        (theta_max, f_max) = (t, v);
    }
    let (mut theta_min, mut f_min) = (kmin as f64 * step, vmin);
    let (t, v) = golden(kmin, -1.0);
    if v < f_min {
        (theta_min, f_min) = (t, v);
    }
    GridExtremes {
        theta_max,
        f_max,
        theta_min,
        f_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridExtremes {
    pub theta_max: f64,
    pub f_max: f64,
    pub theta_min: f64,
    pub f_min: f64,
}

/// Distance between two angles on the circle.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// One Monte Carlo draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSample {
    pub phi: f64,
    pub inner_product: f64,
    pub bound_max: f64,
    pub bound_min: f64,
}

impl McSample {
    pub fn violates(&self) -> bool {
        self.inner_product > self.bound_max + MC_SLACK
            || self.inner_product < self.bound_min - MC_SLACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub trials: usize,
    pub violations: usize,
    pub empirical_max: f64,
    pub empirical_min: f64,
    pub bound_max: f64,
    pub bound_min: f64,
}

impl McReport {
    /// Reduce samples; `bound_max`/`bound_min` hold the loosest bounds seen
    /// (they coincide across samples for a fixed `φ`).
    pub fn from_samples(samples: &[McSample]) -> McReport {
        samples.iter().fold(
            McReport {
                trials: 0,
                violations: 0,
                empirical_max: f64::NEG_INFINITY,
                empirical_min: f64::INFINITY,
                bound_max: f64::NEG_INFINITY,
                bound_min: f64::INFINITY,
            },
            |acc, s| McReport {
                trials: acc.trials + 1,
                violations: acc.violations + usize::from(s.violates()),
                empirical_max: acc.empirical_max.max(s.inner_product),
                empirical_min: acc.empirical_min.min(s.inner_product),
                bound_max: acc.bound_max.max(s.bound_max),
                bound_min: acc.bound_min.min(s.bound_min),
            },
        )
    }
}

/// Angle used by each Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSampling {
    Fixed(f64),
    /// Fresh `φ ~ U(0, π/2)` per trial.
    Uniform,
}

/// Draws `trials` noise pairs uniformly from the ε-ball in ℝⁿ and records
/// the noisy inner product of the pair from [`make_pair`] together with its
/// theoretical bounds. Trial `t` uses stream `[t]` of `master_seed`.
pub fn mc_samples(
    phi: PhiSampling,
    eps: f64,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<McSample>> {
    use rand::Rng;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    (0..trials)
        .map(|t| {
            let mut rng = derive_stream(master_seed, &[t as u64]);
            let phi = match phi {
                PhiSampling::Fixed(p) => p,
                PhiSampling::Uniform => loop {
                    let p = rng.random::<f64>() * PI / 2.0;
                    if p > 0.0 {
                        break p;
                    }
                },
            };
            let (x1, x2) = make_pair(phi, n);
            let e1 = sample_ball(&mut rng, n, eps);
            let e2 = sample_ball(&mut rng, n, eps);
            let (bound_max, bound_min) = noisy_inner_bounds(phi.cos(), eps)?;
            Ok(McSample {
                phi,
                inner_product: (x1 + e1).dot(&(x2 + e2)),
                bound_max,
                bound_min,
            })
        })
        .collect()
}

/// Monte Carlo containment check at a fixed angle in ℝ⁵.
pub fn mc_validate(phi: f64, eps: f64, trials: usize, master_seed: u64) -> Result<McReport> {
    let samples = mc_samples(PhiSampling::Fixed(phi), eps, 5, trials, master_seed)?;
    Ok(McReport::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_oracle(phi: f64, eps: f64, n: usize) -> (f64, f64) {
        let g = grid_extremes(phi, eps, n);
        (g.f_max, g.f_min)
    }

    #[test]
    fn f_vanishes_without_noise() {
        for &theta in &[0.0, 1.0, 4.0] {
            assert_eq!(f_eval(0.7, 0.0, theta), 0.0);
        }
    }

    #[test]
    fn f_closed_form_value() {
        let v = f_eval(PI / 3.0, 0.2, 0.0);
        assert!((v - (0.4 * (PI / 6.0).cos() + 0.04)).abs() < 1e-15);
        assert!((v - 0.386_410_161_513_775_4).abs() < 1e-12);
        let phi = PI / 3.0;
        let eps = 0.2;
        let lhs = phi.cos() + f_eval(phi, eps, 0.0);
        let rhs = phi.cos() + 2.0 * eps * (phi / 2.0).cos() + eps * eps;
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn extremes_without_noise_are_zero() {
        let r = f_extremes(0.9, 0.0);
        assert_eq!(r.f_max, 0.0);
        assert_eq!(r.f_min, 0.0);
    }

    #[test]
    fn extremes_match_grid_oracle() {
        let r = f_extremes(0.8, 0.4);
        assert_eq!(r.method, ExtremalMethod::Quartic);
        let (omax, omin) = grid_oracle(0.8, 0.4, 1_000_000);
        assert!((r.f_max - omax).abs() < 1e-8, "{} vs {}", r.f_max, omax);
        assert!((r.f_min - omin).abs() < 1e-8, "{} vs {}", r.f_min, omin);
        assert!(stationarity(0.8, 0.4, r.theta_max).abs() <= STATIONARY_TOL);
        assert!(stationarity(0.8, 0.4, r.theta_min).abs() <= STATIONARY_TOL);
        assert!((f_eval(0.8, 0.4, r.theta_max) - r.f_max).abs() < 1e-10);
        assert!(r.f_min <= 0.0 && 0.0 <= r.f_max);
    }

    #[test]
    fn quartic_roots_for_stationarity_match_grid_sign_changes() {
        let q = stationarity_quartic(0.6, 0.3);
        let roots = q.real_roots().unwrap();
        // independent grid bracketing of g on [-50, 50]
        let n = 2_000_000;
        let step = 100.0 / n as f64;
        let mut brackets = Vec::new();
        let mut prev = q.eval(-50.0);
        for k in 1..=n {
            let x = -50.0 + k as f64 * step;
            let v = q.eval(x);
            if prev * v < 0.0 {
                let (mut a, mut b) = (x - step, x);
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if q.eval(m) * q.eval(a) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                brackets.push(0.5 * (a + b));
            }
            prev = v;
        }
        assert_eq!(roots.len(), brackets.len(), "{roots:?} vs {brackets:?}");
        for (r, b) in roots.iter().zip(&brackets) {
            assert!((r - b).abs() < 1e-7);
        }
    }

    #[test]
    fn quartic_and_bracketed_paths_agree() {
        for i in 1..30 {
            let phi = 0.05 * i as f64;
            for j in 0..10 {
                let eps = 0.05 + 0.1 * j as f64;
                let q = f_extremes_quartic(phi, eps).expect("quartic path");
                let b = f_extremes_bracketed(phi, eps);
                assert!((q.f_max - b.f_max).abs() < 1e-8, "phi={phi} eps={eps}");
                assert!((q.f_min - b.f_min).abs() < 1e-8, "phi={phi} eps={eps}");
            }
        }
    }

    #[test]
    fn fallback_near_right_angle() {
        let r = f_extremes(PI / 2.0 - 0.01, 0.3);
        assert_eq!(r.method, ExtremalMethod::Bracketed);
        let (omax, omin) = grid_oracle(PI / 2.0 - 0.01, 0.3, 200_000);
        assert!((r.f_max - omax).abs() < 1e-8);
        assert!((r.f_min - omin).abs() < 1e-8);
    }

    #[test]
    fn unit_noise_uses_root_at_infinity() {
        // ε = 1 drops the quartic's leading term; θ = π + φ/2 becomes stationary.
        let r = f_extremes(0.7, 1.0);
        let (omax, omin) = grid_oracle(0.7, 1.0, 200_000);
        assert!((r.f_max - omax).abs() < 1e-8);
        assert!((r.f_min - omin).abs() < 1e-8);
    }

    #[test]
    fn bounds_reject_boundary_inner_products() {
        for c in [0.0, 1.0, -0.2, 1.3] {
            assert!(matches!(noisy_inner_bounds(c, 0.1), Err(Error::LemmaHypothesis(_))));
        }
        assert_eq!(noisy_inner_bounds(0.4, 0.0).unwrap(), (0.4, 0.4));
    }

    /// Brute force over both perturbation angles, then local pattern search.
    fn pairwise_oracle(phi: f64, eps: f64, n: usize, sign: f64) -> f64 {
        let g = |a: f64, b: f64| sign * pairwise_objective(phi, eps, a, b);
        let step = TAU / n as f64;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..n {
            let a = i as f64 * step;
            for j in 0..n {
                let b = j as f64 * step;
                let v = g(a, b);
                if v > best.0 {
                    best = (v, a, b);
                }
            }
        }
        let (mut v, mut a, mut b) = best;
        let mut h = step;
        while h > 1e-13 {
            let mut moved = false;
            for (da, db) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let w = g(a + da, b + db);
                if w > v {
                    v = w;
                    a += da;
                    b += db;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        sign * v
    }

    #[test]
    fn bounds_match_two_dimensional_oracle() {
        let c = 0.9f64.cos();
        let (up, lo) = noisy_inner_bounds(c, 0.3).unwrap();
        let omax = pairwise_oracle(0.9, 0.3, 4000, 1.0);
        let omin = pairwise_oracle(0.9, 0.3, 4000, -1.0);
        assert!((up - omax).abs() < 1e-6, "{up} vs {omax}");
        assert!((lo - omin).abs() < 1e-6, "{lo} vs {omin}");
    }

    #[test]
    fn upper_bound_dominates_zero_angle_perturbation() {
        for k in 1..20 {
            let eps = 0.05 * k as f64;
            let c = 0.35;
            let (up, _) = noisy_inner_bounds(c, eps).unwrap();
            assert!(up >= c + f_eval(c.acos(), eps, 0.0) - 1e-15);
        }
    }

    #[test]
    fn bounds_monotone_in_noise() {
        for ci in 1..10 {
            let c = 0.1 * ci as f64;
            let mut prev = noisy_inner_bounds(c, 0.0).unwrap();
            for k in 1..=20 {
                let cur = noisy_inner_bounds(c, 0.05 * k as f64).unwrap();
                assert!(cur.0 >= prev.0 - 1e-12 && cur.1 <= prev.1 + 1e-12);
                prev = cur;
            }
        }
    }

    #[test]
    fn pairwise_objective_identities() {
        let (phi, eps) = (0.7, 0.25);
        for &t in &[0.0, 0.4, 2.0, 5.5] {
            let lhs = pairwise_objective(phi, eps, t, t);
            assert!((lhs - (phi.cos() + f_eval(phi, eps, t))).abs() < 1e-14);
        }
        assert!((pairwise_objective(phi, 0.0, 1.0, 2.0) - phi.cos()).abs() < 1e-15);
        let at_zero = phi.cos() + 2.0 * eps * (phi / 2.0).cos() + eps * eps;
        assert!((pairwise_objective(phi, eps, 0.0, 0.0) - at_zero).abs() < 1e-15);
    }

    #[test]
    fn pair_geometry() {
        let (a, b) = make_pair(PI / 3.0, 5);
        assert!((a.dot(&b) - 0.5).abs() < 1e-12);
        assert!((a.norm() - 1.0).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
        let (a, b) = make_pair(1e-6, 3);
        assert!((a.dot(&b) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn in_plane_perturbation_realizes_objective() {
        let (phi, eps) = (0.6, 0.45);
        let (x1, x2) = make_pair(phi, 4);
        for &t in &[0.0, 1.3, 3.9] {
            let (e1, e2) = in_plane_perturbations(eps, t, 4);
            let v = (&x1 + e1).dot(&(&x2 + e2));
            assert!((v - pairwise_objective(phi, eps, t, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn mc_without_noise_is_degenerate() {
        let r = mc_validate(0.5, 0.0, 100, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.empirical_max - 0.5f64.cos()).abs() < 1e-15);
        assert!((r.empirical_min - 0.5f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn mc_has_no_violations_and_extremal_direction_attains_bound() {
        for eps in [0.2, 0.4, 0.6, 0.8] {
            let r = mc_validate(0.9, eps, 2000, 5).unwrap();
            assert_eq!(r.violations, 0);
            assert!(r.empirical_max <= r.bound_max && r.empirical_min >= r.bound_min);
            let ext = f_extremes(0.9, eps);
            let (x1, x2) = make_pair(0.9, 5);
            let (e1, e2) = in_plane_perturbations(eps, ext.theta_max, 5);
            let v = (&x1 + e1).dot(&(&x2 + e2));
            assert!((v - r.bound_max).abs() < 1e-9);
        }
    }

    #[test]
    fn mc_rejects_zero_trials() {
        assert!(mc_validate(0.5, 0.1, 0, 1).is_err());
    }

    /// Grid over both perturbation angles: optima sit on the diagonal.
    #[test]
    fn optimal_perturbation_angles_coincide() {
        let n = 600;
        let step = TAU / n as f64;
        for &phi in &[0.3, 0.8, 1.3] {
            for &eps in &[0.1, 0.5] {
                let (mut best_hi, mut best_lo) = ((f64::NEG_INFINITY, 0, 0), (f64::INFINITY, 0, 0));
                for i in 0..n {
                    for j in 0..n {
                        let v = pairwise_objective(phi, eps, i as f64 * step, j as f64 * step);
                        if v > best_hi.0 {
                            best_hi = (v, i, j);
                        }
                        if v < best_lo.0 {
                            best_lo = (v, i, j);
                        }
                    }
                }
                for (_, i, j) in [best_hi, best_lo] {
                    let d = circular_distance(i as f64 * step, j as f64 * step);
                    assert!(d <= step * 1.000001, "phi={phi} eps={eps}: {i} vs {j}");
                }
            }
        }
    }

    /// Optima over a polar grid of both perturbations use the full radius.
    #[test]
    fn optima_lie_on_the_noise_sphere() {
        let (phi, eps) = (0.8, 0.3);
        let (x1, x2) = make_pair(phi, 2);
        let radii: Vec<f64> = (0..=4).map(|k| eps * k as f64 / 4.0).collect();
        let angles = 90;
        let mut hi = (f64::NEG_INFINITY, 0.0, 0.0);
        let mut lo = (f64::INFINITY, 0.0, 0.0);
        for &ri in &radii {
            for a in 0..angles {
                let ta = TAU * a as f64 / angles as f64;
                let e1 = Vector::from_vec(vec![ri * ta.cos(), ri * ta.sin()]);
                let y1 = &x1 + e1;
                for &rj in &radii {
                    for b in 0..angles {
                        let tb = TAU * b as f64 / angles as f64;
                        let e2 = Vector::from_vec(vec![rj * tb.cos(), rj * tb.sin()]);
                        let v = y1.dot(&(&x2 + e2));
                        if v > hi.0 {
                            hi = (v, ri, rj);
                        }
                        if v < lo.0 {
                            lo = (v, ri, rj);
                        }
                    }
                }
            }
        }
        assert_eq!((hi.1, hi.2), (eps, eps));
        assert_eq!((lo.1, lo.2), (eps, eps));
    }
}
