//! Bipartite structure: dimensions, tensor products, partial transposition
//! and density matrices.
//!
//! Composite basis index convention: `i = a * n_b + b`, subsystem A major.
//! The partial transpose always acts on subsystem B.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};

const TRACE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    n_a: usize,
    n_b: usize,
}

impl BipartiteDims {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::InvalidDims(format!(
                "{n_a}x{n_b}: factors must be at least 1"
            )));
        }
        Ok(BipartiteDims { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Total dimension N = N_A N_B.
    pub fn n(&self) -> usize {
        self.n_a * self.n_b
    }

    /// min(N_A, N_B): PPT states of lower rank are separable.
    pub fn min_factor(&self) -> usize {
        self.n_a.min(self.n_b)
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.n_b + b
    }

    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.n_b, i % self.n_b)
    }

    fn check(&self, m: &HermitianMatrix) -> Result<()> {
        if m.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: m.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_a, self.n_b)
    }
}

impl FromStr for BipartiteDims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidDims(format!("{s:?}: expected AxB")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidDims(format!("{s:?}: expected AxB")))
        };
        BipartiteDims::new(parse(a)?, parse(b)?)
    }
}

/// Partial transpose on subsystem B: ρ_{(a,b),(a',b')} → ρ_{(a,b'),(a',b)}.
/// A pure index permutation, so applying it twice returns the input exactly.
pub fn partial_transpose(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<HermitianMatrix> {
    dims.check(rho)?;
    let n = dims.n();
    let src = rho.as_matrix();
    let out = DMatrix::from_fn(n, n, |i, j| {
        let (a, b2) = dims.split(i);
        let (a2, b) = dims.split(j);
        src[(dims.index(a, b), dims.index(a2, b2))]
    });
    Ok(HermitianMatrix::from_exact(out))
}

/// Partial transpose on subsystem A, obtained as the full transpose of the
/// partial transpose on B.
pub fn partial_transpose_a(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<HermitianMatrix> {
    Ok(partial_transpose(rho, dims)?.transpose())
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_exact(a.as_matrix().kronecker(b.as_matrix()))
}

/// Reduced state Tr_B ρ.
pub fn partial_trace_b(rho: &HermitianMatrix, dims: BipartiteDims) -> Result<HermitianMatrix> {
    dims.check(rho)?;
    let m = rho.as_matrix();
    let out = DMatrix::from_fn(dims.n_a, dims.n_a, |a, a2| {
        (0..dims.n_b)
            .map(|b| m[(dims.index(a, b), dims.index(a2, b))])
            .sum::<C64>()
    });
    HermitianMatrix::new(out)
}

/// A bipartite density matrix: Hermitian, positive semidefinite within
/// tolerance, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
    dims: BipartiteDims,
}

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix, dims: BipartiteDims, tol: &Tolerances) -> Result<Self> {
        dims.check(&mat)?;
        let tr = mat.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr));
        }
        let vals = mat.eigenvalues()?;
        if !crate::hermitian::spectrum_is_psd(&vals, tol) {
            return Err(Error::NotPsd {
                min_eigenvalue: *vals.last().unwrap(),
            });
        }
        Ok(DensityMatrix { mat, dims })
    }

    /// Divides by the trace before validating.
    pub fn normalized(mat: HermitianMatrix, dims: BipartiteDims, tol: &Tolerances) -> Result<Self> {
        let tr = mat.trace();
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::BadTrace(tr));
        }
        Self::new(mat.scale(1.0 / tr), dims, tol)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(mat: HermitianMatrix, dims: BipartiteDims) -> Self {
        DensityMatrix { mat, dims }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.n();
        DensityMatrix {
            mat: HermitianMatrix::identity(n).scale(1.0 / n as f64),
            dims,
        }
    }

    /// |ψ><ψ| for a (not necessarily normalized) vector.
    pub fn pure(psi: &DVector<C64>, dims: BipartiteDims) -> Result<Self> {
        if psi.len() != dims.n() {
            return Err(Error::DimensionMismatch {
                expected: dims.n(),
                actual: psi.len(),
            });
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(DensityMatrix {
            mat: HermitianMatrix::outer(&v),
            dims,
        })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn partial_transpose(&self) -> HermitianMatrix {
        partial_transpose(&self.mat, self.dims).expect("dimensions checked at construction")
    }

    pub fn is_ppt(&self, tol: &Tolerances) -> Result<bool> {
        self.partial_transpose().is_psd(tol)
    }

    /// (rank ρ, rank ρᴾ).
    pub fn rank_pair(&self, tol: &Tolerances) -> Result<(usize, usize)> {
        Ok((
            self.mat.numerical_rank(tol)?,
            self.partial_transpose().numerical_rank(tol)?,
        ))
    }

    /// Returns an error describing the violation when ρ is not PPT.
    pub fn ensure_ppt(&self, tol: &Tolerances) -> Result<()> {
        let vals = self.partial_transpose().eigenvalues()?;
        if crate::hermitian::spectrum_is_psd(&vals, tol) {
            Ok(())
        } else {
            Err(Error::NotPpt {
                dims: self.dims,
                min_eigenvalue: *vals.last().unwrap(),
            })
        }
    }

    /// Local unitary conjugation (U_A ⊗ U_B) ρ (U_A ⊗ U_B)†.
    pub fn local_conjugate(&self, u_a: &DMatrix<C64>, u_b: &DMatrix<C64>) -> Self {
        let u = u_a.kronecker(u_b);
        DensityMatrix {
            mat: self.mat.conjugate_by(&u),
            dims: self.dims,
        }
    }
}

/// ρ_A ⊗ ρ_B for two single-party density matrices.
pub fn product_state(
    rho_a: &HermitianMatrix,
    rho_b: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    for r in [rho_a, rho_b] {
        let tr = r.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr));
        }
        if !r.is_psd(tol)? {
            return Err(Error::NotPsd {
                min_eigenvalue: r.min_eigenvalue()?,
            });
        }
    }
    let dims = BipartiteDims::new(rho_a.dim(), rho_b.dim())?;
    Ok(DensityMatrix::from_parts_unchecked(
        kron(rho_a, rho_b),
        dims,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn bell() -> DensityMatrix {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let mut psi = DVector::zeros(4);
        psi[0] = C64::new(1.0, 0.0);
        psi[3] = C64::new(1.0, 0.0);
        DensityMatrix::pure(&psi, dims).unwrap()
    }

    /// Independent 4x4 check of the Bell-state partial transpose: the
    /// permuted matrix is (1/2) * SWAP, whose eigenvalues are ±1/2 with the
    /// antisymmetric vector carrying -1/2.
    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = bell().partial_transpose();
        let mut swap = DMatrix::<C64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = C64::new(0.5, 0.0);
        }
        assert!((pt.as_matrix() - &swap).norm() < 1e-15);
        let vals = pt.eigenvalues().unwrap();
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
        assert!(!pt.is_psd(&tol()).unwrap());
        assert!(!bell().is_ppt(&tol()).unwrap());
        assert_eq!(bell().rank_pair(&tol()).unwrap(), (1, 4));
    }

    #[test]
    fn product_partial_transpose_transposes_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let dims = BipartiteDims::new(2, 3).unwrap();
        let pt = partial_transpose(&kron(&a, &b), dims).unwrap();
        let expect = kron(&a, &b.transpose());
        assert!((&pt - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn involution_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let dims = BipartiteDims::new(3, 2).unwrap();
        let a = random_hermitian(6, &mut rng);
        let twice = partial_transpose(&partial_transpose(&a, dims).unwrap(), dims).unwrap();
        assert_eq!(twice, a);
    }

    #[test]
    fn partial_transpose_a_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let dims = BipartiteDims::new(3, 2).unwrap();
        let pta = partial_transpose_a(&kron(&a, &b), dims).unwrap();
        assert!((&pta - &kron(&a.transpose(), &b)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        assert!(matches!(
            partial_transpose(&HermitianMatrix::identity(3), dims),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn product_state_examples() {
        let t = tol();
        let up = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let p = product_state(&up, &up, &t).unwrap();
        assert_eq!(
            p.matrix(),
            &HermitianMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0])
        );

        let half = HermitianMatrix::identity(2).scale(0.5);
        let p = product_state(&half, &half, &t).unwrap();
        assert!((p.matrix() - &HermitianMatrix::identity(4).scale(0.25)).frobenius_norm() < 1e-16);
        assert!(p.is_ppt(&t).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = HermitianMatrix::outer(&random_unit_vector(3, &mut rng));
        let b = HermitianMatrix::outer(&random_unit_vector(3, &mut rng));
        let p = product_state(&a, &b, &t).unwrap();
        assert_eq!(p.rank_pair(&t).unwrap(), (1, 1));
        assert!((p.matrix().trace() - 1.0).abs() < 1e-14);
        assert!(p.is_ppt(&t).unwrap());

        assert!(product_state(&HermitianMatrix::identity(2), &up, &t).is_err());
        assert!(product_state(&HermitianMatrix::from_diagonal(&[1.5, -0.5]), &up, &t).is_err());
    }

    #[test]
    fn maximally_mixed_ranks() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let rho = DensityMatrix::maximally_mixed(dims);
        assert_eq!(rho.rank_pair(&tol()).unwrap(), (9, 9));
        assert!(rho.is_ppt(&tol()).unwrap());
    }

    #[test]
    fn dims_parse() {
        let d: BipartiteDims = "3x4".parse().unwrap();
        assert_eq!((d.n_a(), d.n_b(), d.n()), (3, 4, 12));
        assert_eq!(d.to_string(), "3x4");
        assert!("3".parse::<BipartiteDims>().is_err());
        assert!("0x2".parse::<BipartiteDims>().is_err());
    }

    #[test]
    fn density_validation() {
        let dims = BipartiteDims::new(1, 2).unwrap();
        let t = tol();
        assert!(matches!(
            DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.5, 0.6]), dims, &t),
            Err(Error::BadTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(HermitianMatrix::from_diagonal(&[1.5, -0.5]), dims, &t),
            Err(Error::NotPsd { .. })
        ));
    }
}
