#![allow(dead_code)]

use nalgebra::DMatrix;
use peres::random::{complex_gaussian_matrix, random_unitary};
use peres::{BipartiteDims, DensityMatrix, HermitianMatrix, Tolerances, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dims(a: usize, b: usize) -> BipartiteDims {
    BipartiteDims::new(a, b).unwrap()
}

/// G G† / Tr for a complex Gaussian N x r matrix G: a random state of rank r.
pub fn random_state(d: BipartiteDims, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = complex_gaussian_matrix(d.n(), rank, rng);
    let m = HermitianMatrix::new(&g * g.adjoint()).unwrap();
    DensityMatrix::normalized(m, d, &Tolerances::default()).unwrap()
}

/// A full-rank PPT state: a random state mixed with 1/N just enough to make
/// the partial transpose positive, with some margin.
pub fn random_ppt_state(d: BipartiteDims, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let rho = random_state(d, d.n(), rng);
    let low = rho.partial_transpose().min_eigenvalue().unwrap();
    let n = d.n() as f64;
    // (1 - p) low + p / N >= margin / N
    let margin = 0.2;
    let p = if low >= margin / n {
        0.0
    } else {
        ((margin / n - low) / (1.0 / n - low)).min(1.0)
    };
    let mixed = DensityMatrix::maximally_mixed(d);
    let m = &rho.matrix().scale(1.0 - p) + &mixed.matrix().scale(p);
    DensityMatrix::normalized(m, d, &Tolerances::default()).unwrap()
}

pub fn random_projector(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let u = random_unitary(n, rng);
    let v = u.columns(0, rank).into_owned();
    HermitianMatrix::new(&v * v.adjoint()).unwrap()
}

/// Singular values of the N_A x N_B coefficient matrix of |ψ>.
pub fn schmidt_coefficients(psi: &[C64], d: BipartiteDims) -> Vec<f64> {
    let m = DMatrix::from_fn(d.n_a(), d.n_b(), |a, b| psi[d.index(a, b)]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn canonical((n, m): (usize, usize)) -> (usize, usize) {
    (n.min(m), n.max(m))
}
