//! Seeded random states and unitaries.

use super::{eigen, hermitize, DensityOperator, FactorSpace};
use faer::{c64, Mat};
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian<R: Rng>(rng: &mut R) -> c64 {
    c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Gaussian matrix.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat<c64> {
    Mat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng>(space: &FactorSpace, rng: &mut R) -> DensityOperator {
    let psi: Vec<c64> = (0..space.dim()).map(|_| gaussian(rng)).collect();
    DensityOperator::pure(space.clone(), &psi).expect("nonzero Gaussian vector")
}

/// Mixed state `G G† / Tr` with `G` a `d x rank` Gaussian matrix.
pub fn random_density<R: Rng>(space: &FactorSpace, rank: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(space.dim(), rank.max(1), rng);
    wishart(space, &g)
}

/// Like [`random_density`] but with a real symmetric matrix.
pub fn random_real_density<R: Rng>(space: &FactorSpace, rank: usize, rng: &mut R) -> DensityOperator {
    let g = Mat::from_fn(space.dim(), rank.max(1), |_, _| c64::new(rng.sample(StandardNormal), 0.0));
    wishart(space, &g)
}

fn wishart(space: &FactorSpace, g: &Mat<c64>) -> DensityOperator {
    let m = hermitize(&(g * g.adjoint()));
    DensityOperator::from_unnormalized(space.clone(), m).expect("Wishart matrix is PSD")
}

/// Unitary from the eigenvectors of a random Hermitian matrix, with random column phases.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> Mat<c64> {
    let g = ginibre(d, d, rng);
    let h = hermitize(&g);
    let (_, u) = eigen(&h).expect("small Hermitian eigenproblem");
    let phases: Vec<c64> = (0..d).map(|_| c64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)).collect();
    Mat::from_fn(d, d, |i, j| u[(i, j)] * phases[j])
}
