//! Dense linear algebra, polynomial root finding and seeded randomness
//! shared by every other module.

mod linalg;
mod quartic;
mod random;

pub use linalg::{
    least_squares, orthonormalize, orthonormalize_with_tol, project, sym_eig, Mat, SymEig, Vector,
    RANK_TOL, SYMMETRY_TOL,
};
pub use quartic::{Polynomial, Quartic};
pub use random::{derive_seed, derive_stream, rng_stream, sample_ball, sample_unit_sphere, RngStream};
