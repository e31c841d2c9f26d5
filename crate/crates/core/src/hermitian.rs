//! Dense Hermitian matrices: construction, spectral decomposition, numerical
//! rank, positivity and image projectors.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const EIGEN_MAX_ITER: usize = 10_000;

/// Numerical thresholds shared by every operation in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative eigenvalue magnitude (against the largest |eigenvalue|)
    /// below which an eigenvalue counts as zero.
    pub zero_eig: f64,
    /// Distance from 1 below which a superoperator eigenvalue counts as 1.
    pub one_eig: f64,
    /// Reconstruction tolerance per matrix dimension; the effective bound
    /// for an N x N matrix is `recon * N`.
    pub recon: f64,
    /// Orthonormality tolerance for eigenvector sets.
    pub orth: f64,
    /// Resolution of line searches in the step parameter x.
    pub bisect: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_eig: 1e-9,
            one_eig: 1e-14,
            recon: 1e-10,
            orth: 1e-10,
            bisect: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("zero_eig", self.zero_eig),
            ("one_eig", self.one_eig),
            ("recon", self.recon),
            ("orth", self.orth),
            ("bisect", self.bisect),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v < 1e-3) {
                return Err(Error::InvalidTolerances(format!(
                    "{name} = {v} must lie in (0, 1e-3)"
                )));
            }
        }
        Ok(())
    }

    /// Reconstruction bound for a matrix of dimension `n`.
    pub fn recon_for(&self, n: usize) -> f64 {
        self.recon * n as f64
    }
}

/// An N x N complex Hermitian matrix. Hermiticity holds exactly: the upper
/// triangle is always the conjugate of the lower one.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    mat: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix as (A + A†)/2.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be at least 1".into(),
            ));
        }
        Ok(Self::symmetrized(mat))
    }

    pub(crate) fn symmetrized(mut mat: DMatrix<C64>) -> Self {
        let n = mat.nrows();
        for i in 0..n {
            mat[(i, i)] = C64::new(mat[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
                mat[(i, j)] = v;
                mat[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { mat }
    }

    /// Wraps a matrix that is already exactly Hermitian (index permutations
    /// of Hermitian input, for instance).
    pub(crate) fn from_exact(mat: DMatrix<C64>) -> Self {
        debug_assert!(mat.is_square());
        HermitianMatrix { mat }
    }

    pub fn from_real_imag(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::DimensionMismatch {
                expected: re.nrows(),
                actual: im.nrows(),
            });
        }
        let mat = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            C64::new(re[(i, j)], im[(i, j)])
        });
        Self::new(mat)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| C64::new(d, 0.0)));
        HermitianMatrix {
            mat: DMatrix::from_diagonal(&v),
        }
    }

    /// The rank-one projector |v><v| (v is not normalized here).
    pub fn outer(v: &DVector<C64>) -> Self {
        Self::symmetrized(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.mat.map(|z| z.re)
    }

    pub fn imag_part(&self) -> DMatrix<f64> {
        self.mat.map(|z| z.im)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// The scalar product Tr(AB) of the real space of Hermitian matrices.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        // Tr(AB) = sum_ij A_ij B_ji = sum_ij conj(A_ji) B_ji
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            mat: self.mat.map(|z| z * s),
        }
    }

    /// Plain transpose, which for a Hermitian matrix equals the entrywise
    /// complex conjugate.
    pub fn transpose(&self) -> HermitianMatrix {
        HermitianMatrix {
            mat: self.mat.transpose(),
        }
    }

    /// U A U†.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> HermitianMatrix {
        Self::symmetrized(u * &self.mat * u.adjoint())
    }

    /// V† A V, the compression onto the column space of an isometry V.
    pub fn compress(&self, v: &DMatrix<C64>) -> HermitianMatrix {
        Self::symmetrized(v.adjoint() * &self.mat * v)
    }

    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition> {
        let n = self.dim();
        let eig = SymmetricEigen::try_new(self.mat.clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigenNoConvergence(n))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let eig = SymmetricEigen::try_new(self.mat.clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigenNoConvergence(n))?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        Ok(vals)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("dimension is at least 1"))
    }

    pub fn numerical_rank(&self, tol: &Tolerances) -> Result<usize> {
        Ok(rank_of_spectrum(&self.eigenvalues()?, tol))
    }

    pub fn is_psd(&self, tol: &Tolerances) -> Result<bool> {
        Ok(spectrum_is_psd(&self.eigenvalues()?, tol))
    }

    /// Orthogonal projector onto the image of a positive semidefinite matrix.
    pub fn image_projector(&self, tol: &Tolerances) -> Result<HermitianMatrix> {
        let sd = self.spectral_decompose()?;
        if !spectrum_is_psd(&sd.eigenvalues, tol) {
            return Err(Error::NotPsd {
                min_eigenvalue: sd.min_eigenvalue(),
            });
        }
        let image = sd.image_vectors(tol);
        Ok(Self::symmetrized(&image * image.adjoint()))
    }
}

/// Eigenvalues counted as nonzero: |λ| > zero_eig · max|λ|.
pub fn rank_of_spectrum(eigenvalues: &[f64], tol: &Tolerances) -> usize {
    let scale = max_abs(eigenvalues);
    if scale == 0.0 {
        return 0;
    }
    eigenvalues
        .iter()
        .filter(|l| l.abs() > tol.zero_eig * scale)
        .count()
}

pub fn spectrum_is_psd(eigenvalues: &[f64], tol: &Tolerances) -> bool {
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    min > -tol.zero_eig * max_abs(eigenvalues).max(1.0)
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Eigenvalues sorted descending with matching orthonormal eigenvector
/// columns. Inside a degenerate cluster the eigenvector choice is arbitrary.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("dimension is at least 1")
    }

    pub fn rank(&self, tol: &Tolerances) -> usize {
        rank_of_spectrum(&self.eigenvalues, tol)
    }

    /// Σ λᵢ |ψᵢ><ψᵢ|.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let lam = DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        );
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigenvectors[(i, j)] * lam[j]
        });
        HermitianMatrix::symmetrized(&scaled * self.eigenvectors.adjoint())
    }

    /// Indices of the eigenvalues counted as nonzero.
    fn image_indices(&self, tol: &Tolerances) -> Vec<usize> {
        let scale = max_abs(&self.eigenvalues);
        if scale == 0.0 {
            return Vec::new();
        }
        (0..self.dim())
            .filter(|&k| self.eigenvalues[k].abs() > tol.zero_eig * scale)
            .collect()
    }

    /// Orthonormal columns spanning the image (nonzero eigenvalues).
    pub fn image_vectors(&self, tol: &Tolerances) -> DMatrix<C64> {
        self.columns(&self.image_indices(tol))
    }

    /// Orthonormal columns spanning the numerical kernel.
    pub fn kernel_vectors(&self, tol: &Tolerances) -> DMatrix<C64> {
        let image = self.image_indices(tol);
        let kernel: Vec<usize> = (0..self.dim()).filter(|k| !image.contains(k)).collect();
        self.columns(&kernel)
    }

    /// Image columns followed by kernel columns: a unitary adapted to the
    /// image/kernel split, plus the image dimension.
    pub fn adapted_basis(&self, tol: &Tolerances) -> (DMatrix<C64>, usize) {
        let image = self.image_indices(tol);
        let mut order = image.clone();
        order.extend((0..self.dim()).filter(|k| !image.contains(k)));
        (self.columns(&order), image.len())
    }

    fn columns(&self, idx: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), idx.len(), |i, j| self.eigenvectors[(i, idx[j])])
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diagonal_matrix_decomposes_to_itself() {
        let sd = HermitianMatrix::from_diagonal(&[1.0, 3.0])
            .spectral_decompose()
            .unwrap();
        assert_eq!(sd.eigenvalues, vec![3.0, 1.0]);
        assert!((sd.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((sd.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = HermitianMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        ))
        .unwrap();
        let vals = x.eigenvalues().unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-15);
        assert!((vals[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = tol();
        for _ in 0..10 {
            let h = random_hermitian(5, &mut rng);
            let sd = h.spectral_decompose().unwrap();
            let err = (&sd.reconstruct() - &h).frobenius_norm();
            assert!(err < t.recon_for(5), "reconstruction error {err}");
            let gram = sd.eigenvectors.adjoint() * &sd.eigenvectors;
            let dev = (gram - DMatrix::identity(5, 5)).norm();
            assert!(dev < t.orth, "gram deviation {dev}");
            assert!(sd.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn construction_symmetrizes() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.3),
                C64::new(2.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(0, 0).im, 0.0);
        assert_eq!(h.get(0, 1), C64::new(1.0, 0.5));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            HermitianMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        let t = tol();
        assert_eq!(
            HermitianMatrix::from_diagonal(&[0.5, 0.5, 0.0])
                .numerical_rank(&t)
                .unwrap(),
            2
        );
        assert_eq!(HermitianMatrix::zeros(3).numerical_rank(&t).unwrap(), 0);
        let mixed = HermitianMatrix::identity(9).scale(1.0 / 9.0);
        assert_eq!(mixed.numerical_rank(&t).unwrap(), 9);
    }

    #[test]
    fn psd_examples() {
        let t = tol();
        assert!(HermitianMatrix::from_diagonal(&[1.0, 0.0])
            .is_psd(&t)
            .unwrap());
        assert!(!HermitianMatrix::from_diagonal(&[1.0, -1e-3])
            .is_psd(&t)
            .unwrap());
    }

    #[test]
    fn projector_examples() {
        let t = tol();
        let p = HermitianMatrix::from_diagonal(&[0.5, 0.5, 0.0])
            .image_projector(&t)
            .unwrap();
        assert!((&p - &HermitianMatrix::from_diagonal(&[1.0, 1.0, 0.0])).frobenius_norm() < 1e-14);

        let mixed = HermitianMatrix::identity(4).scale(0.25);
        let p = mixed.image_projector(&t).unwrap();
        assert!((&p - &HermitianMatrix::identity(4)).frobenius_norm() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(3, &mut rng);
        let psi = u.column(0).into_owned();
        let pure = HermitianMatrix::outer(&psi);
        let p = pure.image_projector(&t).unwrap();
        assert!((&p - &pure).frobenius_norm() < 1e-13);

        assert!(matches!(
            HermitianMatrix::from_diagonal(&[1.0, -0.5]).image_projector(&t),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerances::default().validate().is_ok());
        for one_eig in [0.0, 1e-2] {
            let t = Tolerances {
                one_eig,
                ..Tolerances::default()
            };
            assert!(t.validate().is_err());
        }
    }
}
