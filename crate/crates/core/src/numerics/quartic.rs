use crate::error::{Error, Result};

/// Leading coefficients below this (times `max(1, max|c|)`) are treated as
/// zero and the degree drops.
const LEAD_TOL: f64 = 1e-12;
/// Relative evaluation tolerance used to decide that a critical point is
/// itself a (multiple) root.
const ZERO_TOL: f64 = 1e-12;

/// Real polynomial with coefficients in ascending order of power.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(ascending: Vec<f64>) -> Self {
        Self { coeffs: ascending }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ |c_i| |x|^i`, the scale of rounding error in [`Self::eval`].
    fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// Drop negligible leading coefficients.
    fn trimmed(&self) -> Polynomial {
        let scale = self.coeffs.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while let Some(&lead) = coeffs.last() {
            if lead.abs() < LEAD_TOL * scale {
                coeffs.pop();
            } else {
                break;
            }
        }
        Polynomial::new(coeffs)
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// All real roots, sorted, repeated according to multiplicity.
    ///
    /// Roots are isolated between consecutive real critical points (found
    /// recursively from the derivative), where the polynomial is monotone,
    /// and refined by bisection. A critical point where the polynomial
    /// vanishes is reported as a multiple root.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        if self.coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroPolynomial);
        }
        let p = self.trimmed();
        let Some(deg) = p.degree() else {
            return Err(Error::ZeroPolynomial);
        };
        Ok(match deg {
            0 => Vec::new(),
            1 => vec![-p.coeffs[0] / p.coeffs[1]],
            _ => p.roots_by_critical_points(),
        })
    }

    fn roots_by_critical_points(&self) -> Vec<f64> {
        let lead = *self.coeffs.last().unwrap();
        let bound = 1.0
            + self.coeffs[..self.coeffs.len() - 1]
                .iter()
                .fold(0.0_f64, |m, c| m.max((c / lead).abs()));

        let mut crit = self
            .derivative()
            .real_roots()
            .unwrap_or_default();
        crit.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        crit.retain(|c| c.abs() < bound);

        let mut roots = Vec::new();
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(-bound);
        for &c in &crit {
            if self.is_zero_at(c) {
                roots.extend(std::iter::repeat_n(c, self.multiplicity_at(c)));
            }
            knots.push(c);
        }
        knots.push(bound);

        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = (self.sign_at(a), self.sign_at(b));
            if sa * sb < 0 {
                roots.push(self.bisect(a, b, sa));
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn is_zero_at(&self, x: f64) -> bool {
        self.eval(x).abs() <= ZERO_TOL * self.magnitude(x).max(f64::MIN_POSITIVE)
    }

    fn sign_at(&self, x: f64) -> i32 {
        if self.is_zero_at(x) {
            0
        } else if self.eval(x) > 0.0 {
            1
        } else {
            -1
        }
    }

    fn multiplicity_at(&self, x: f64) -> usize {
        let mut mult = 1;
        let mut d = self.derivative();
        while d.degree().is_some_and(|k| k > 0) && d.is_zero_at(x) {
            mult += 1;
            d = d.derivative();
        }
        mult
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, sign_lo: i32) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return mid;
            }
            if (v > 0.0) == (sign_lo > 0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if self.eval(lo).abs() <= self.eval(hi).abs() {
            lo
        } else {
            hi
        }
    }
}

/// `c4·x⁴ + c3·x³ + c2·x² + c1·x + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub c4: f64,
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Quartic {
    pub fn new(c4: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c4, c3, c2, c1, c0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (((self.c4 * x + self.c3) * x + self.c2) * x + self.c1) * x + self.c0
    }

    fn polynomial(&self) -> Polynomial {
        Polynomial::new(vec![self.c0, self.c1, self.c2, self.c3, self.c4])
    }

    /// Sorted real roots with multiplicity. Near-zero leading coefficients
    /// reduce the problem to a cubic, quadratic or linear one.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        self.polynomial().real_roots()
    }
}
