//! Synthetic ground truth: `L` subspaces of equal dimension with one common
//! pairwise affinity, unit-sphere samples on each, and bounded additive noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affinity, DataSet, SubspaceModel};
use crate::numerics::{derive_stream, orthonormalize, sample_ball, Mat, Vector};

const AFFINITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub d: usize,
    pub num_subspaces: usize,
    pub rho: f64,
    pub points_per_subspace: usize,
    pub epsilon: f64,
    pub master_seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InfeasibleSpec("d must be at least 1".into()));
        }
        if self.num_subspaces < 2 {
            return Err(Error::InfeasibleSpec("need at least two subspaces".into()));
        }
        if self.n < self.d * (self.num_subspaces + 1) {
            return Err(Error::InfeasibleSpec(format!(
                "n = {} < d(L+1) = {}",
                self.n,
                self.d * (self.num_subspaces + 1)
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InfeasibleSpec(format!("rho = {} outside [0, 1)", self.rho)));
        }
        if self.points_per_subspace == 0 {
            return Err(Error::InfeasibleSpec("no points per subspace".into()));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InfeasibleSpec(format!("epsilon = {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.num_subspaces * self.points_per_subspace
    }
}

/// Ground truth and observations of one synthetic instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub data: DataSet,
    pub models: Vec<SubspaceModel>,
}

/// Subspaces `U_l = cos α · W + sin α · V_l` with `W`, `V_1..V_L` mutually
/// orthogonal `d`-blocks of a random orthonormal frame and `cos² α = ρ`, so
/// `U_iᵀU_j = ρ I_d` for every pair.
pub fn gen_subspaces(spec: &SynthSpec) -> Result<Vec<SubspaceModel>> {
    spec.validate()?;
    let (n, d, l) = (spec.n, spec.d, spec.num_subspaces);
    let mut rng = derive_stream(spec.master_seed, &[0]);
    let g = Mat::from_fn(n, d * (l + 1), |_, _| rng.sample::<f64, _>(StandardNormal));
    let frame = orthonormalize(&g)?;
    if frame.ncols() != d * (l + 1) {
        return Err(Error::InfeasibleSpec("random frame lost rank".into()));
    }
    let cos_a = spec.rho.sqrt();
    let sin_a = (1.0 - spec.rho).sqrt();
    let w = frame.columns(0, d);
    let models = (0..l)
        .map(|k| {
            let v = frame.columns(d * (k + 1), d);
            SubspaceModel::new(w * cos_a + v * sin_a)
        })
        .collect::<Result<Vec<_>>>()?;
    for a in 0..l {
        for b in a + 1..l {
            let got = affinity(&models[a], &models[b]);
            if (got - spec.rho).abs() > AFFINITY_TOL {
                return Err(Error::InfeasibleSpec(format!(
                    "achieved affinity {got} differs from {}",
                    spec.rho
                )));
            }
        }
    }
    Ok(models)
}

/// `count` points uniform on the unit sphere of the subspace.
pub fn gen_points<R: Rng + ?Sized>(model: &SubspaceModel, count: usize, rng: &mut R) -> Mat {
    let u = model.basis();
    let cols: Vec<Vector> = (0..count)
        .map(|_| {
            let g = Vector::from_fn(model.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let x = u * g;
            let nrm = x.norm();
            x / nrm
        })
        .collect();
    Mat::from_columns(&cols)
}

/// `y_i = x_i + e_i` with `e_i` uniform in the closed `eps`-ball.
pub fn add_noise<R: Rng + ?Sized>(x: &Mat, eps: f64, rng: &mut R) -> Mat {
    let mut y = x.clone();
    for mut col in y.column_iter_mut() {
        let e = sample_ball(rng, x.nrows(), eps);
        col += e;
    }
    y
}

/// Full instance; points are grouped by cluster in label order.
pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    let models = gen_subspaces(spec)?;
    let per = spec.points_per_subspace;
    let mut clean = Mat::zeros(spec.n, spec.num_points());
    let mut noisy = Mat::zeros(spec.n, spec.num_points());
    let mut labels = Vec::with_capacity(spec.num_points());
    for (k, model) in models.iter().enumerate() {
        let mut rng = derive_stream(spec.master_seed, &[1, k as u64]);
        let x = gen_points(model, per, &mut rng);
        let mut rng = derive_stream(spec.master_seed, &[2, k as u64]);
        let y = add_noise(&x, spec.epsilon, &mut rng);
        clean.columns_mut(k * per, per).copy_from(&x);
        noisy.columns_mut(k * per, per).copy_from(&y);
        labels.extend(std::iter::repeat_n(k, per));
    }
    let data = DataSet::new(noisy, Some(labels), Some(clean), Some(spec.epsilon))?;
    Ok(SynthData { data, models })
}
