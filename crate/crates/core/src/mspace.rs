//! The real Hilbert space of N x N Hermitian matrices with scalar product
//! Tr(AB), its orthonormal basis, and superoperators acting on it as dense
//! real N² x N² matrices.
//!
//! Basis order: the N diagonal units E_ii, then for each pair i < j in
//! lexicographic order the symmetric element (E_ij + E_ji)/√2 followed by
//! the antisymmetric element i(E_ji − E_ij)/√2. For N = 2 this is
//! diag(1,0), diag(0,1), X/√2, Y/√2.

use std::f64::consts::SQRT_2;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};

use crate::bipartite::BipartiteDims;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};

const PROJECTOR_TOL: f64 = 1e-8;

/// Position of the symmetric element for the pair (i, j), i < j. The
/// antisymmetric element follows it.
pub(crate) fn pair_coord(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    // pairs with first index k < i number sum_{k<i} (n - 1 - k)
    let before = i * (n - 1) - i * i.saturating_sub(1) / 2;
    n + 2 * (before + (j - i - 1))
}

/// Coordinates of a Hermitian matrix (given by its full complex array) in
/// the orthonormal basis of dimension `n`.
pub(crate) fn hermitian_coords(a: &DMatrix<C64>) -> DVector<f64> {
    let n = a.nrows();
    let mut v = DVector::zeros(n * n);
    for i in 0..n {
        v[i] = a[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = a[(i, j)];
            v[k] = SQRT_2 * z.re;
            v[k + 1] = -SQRT_2 * z.im;
            k += 2;
        }
    }
    v
}

/// Inverse of [`hermitian_coords`].
pub(crate) fn hermitian_from_coords(n: usize, v: &[f64]) -> DMatrix<C64> {
    debug_assert_eq!(v.len(), n * n);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(v[k], -v[k + 1]) / SQRT_2;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            k += 2;
        }
    }
    a
}

/// Orthonormal basis of the N²-dimensional space, in the documented order.
pub fn basis(dims: BipartiteDims) -> Vec<HermitianMatrix> {
    let n = dims.n();
    (0..n * n)
        .map(|k| {
            let mut e = vec![0.0; n * n];
            e[k] = 1.0;
            HermitianMatrix::from_exact(hermitian_from_coords(n, &e))
        })
        .collect()
}

/// Coordinate vector of a Hermitian matrix in the orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MVector {
    coords: DVector<f64>,
    dims: BipartiteDims,
}

impl MVector {
    pub fn new(coords: DVector<f64>, dims: BipartiteDims) -> Result<Self> {
        let expected = dims.n() * dims.n();
        if coords.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: coords.len(),
            });
        }
        Ok(MVector { coords, dims })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn dot(&self, other: &MVector) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

/// coords[k] = Tr(B_k A).
pub fn vectorize(a: &HermitianMatrix, dims: BipartiteDims) -> Result<MVector> {
    if a.dim() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            actual: a.dim(),
        });
    }
    Ok(MVector {
        coords: hermitian_coords(a.as_matrix()),
        dims,
    })
}

/// Σ_k v_k B_k.
pub fn devectorize(v: &MVector) -> HermitianMatrix {
    HermitianMatrix::from_exact(hermitian_from_coords(v.dims.n(), v.coords.as_slice()))
}

/// A linear map on the space of Hermitian matrices, as a dense real matrix
/// in the orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    mat: DMatrix<f64>,
    dims: BipartiteDims,
}

impl SuperOperator {
    pub fn identity(dims: BipartiteDims) -> Self {
        let n2 = dims.n() * dims.n();
        SuperOperator {
            mat: DMatrix::identity(n2, n2),
            dims,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn apply(&self, v: &MVector) -> MVector {
        MVector {
            coords: &self.mat * &v.coords,
            dims: self.dims,
        }
    }

    pub fn compose(&self, other: &SuperOperator) -> SuperOperator {
        SuperOperator {
            mat: &self.mat * &other.mat,
            dims: self.dims,
        }
    }

    pub fn transpose(&self) -> SuperOperator {
        SuperOperator {
            mat: self.mat.transpose(),
            dims: self.dims,
        }
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.mat - self.mat.transpose()).amax()
    }

    /// Eigenvalues (descending) and matching orthonormal eigenvectors of a
    /// symmetric superoperator.
    pub fn symmetric_eigen(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let sym = (&self.mat + self.mat.transpose()) * 0.5;
        let n = sym.nrows();
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
            .ok_or(Error::EigenNoConvergence(n))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((vals, vecs))
    }

    /// Number of eigenvalues above 1 − one_eig.
    pub fn unit_eigenvalue_multiplicity(&self, one_eig: f64) -> Result<usize> {
        Ok(self
            .symmetric_eigen()?
            .0
            .iter()
            .filter(|&&l| l > 1.0 - one_eig)
            .count())
    }
}

fn check_projector(p: &HermitianMatrix) -> Result<()> {
    let sq = HermitianMatrix::symmetrized(p.as_matrix() * p.as_matrix());
    let dev = (&sq - p).frobenius_norm();
    if dev > PROJECTOR_TOL {
        return Err(Error::NotProjector(dev));
    }
    Ok(())
}

/// Matrix of A ↦ P A P for an orthogonal projector P.
pub fn conjugation_superop(p: &HermitianMatrix, dims: BipartiteDims) -> Result<SuperOperator> {
    if p.dim() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            actual: p.dim(),
        });
    }
    check_projector(p)?;
    let n = dims.n();
    let n2 = n * n;
    let pm = p.as_matrix();
    let mut mat = DMatrix::zeros(n2, n2);
    let mut e = vec![0.0; n2];
    for k in 0..n2 {
        e[k] = 1.0;
        let b = hermitian_from_coords(n, &e);
        e[k] = 0.0;
        let col = hermitian_coords(&(pm * b * pm));
        mat.set_column(k, &col);
    }
    let mat = (&mat + mat.transpose()) * 0.5;
    Ok(SuperOperator { mat, dims })
}

/// Matrix of the partial transpose. Partial transposition maps basis
/// elements to basis elements up to sign, so the result is a signed
/// permutation matrix with exact entries.
pub fn pt_superop(dims: BipartiteDims) -> SuperOperator {
    let n = dims.n();
    let n2 = n * n;
    let mut mat = DMatrix::zeros(n2, n2);
    // (i, j) -> (i', j') with i = (a, b), j = (a', b') and i' = (a, b'), j' = (a', b)
    let image = |i: usize, j: usize| {
        let (a, b) = dims.split(i);
        let (a2, b2) = dims.split(j);
        (dims.index(a, b2), dims.index(a2, b))
    };
    for i in 0..n {
        let (ii, jj) = image(i, i);
        debug_assert_eq!(ii, jj);
        mat[(ii, i)] = 1.0;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let src = pair_coord(i, j, n);
            let (ii, jj) = image(i, j);
            if ii < jj {
                let dst = pair_coord(ii, jj, n);
                mat[(dst, src)] = 1.0;
                mat[(dst + 1, src + 1)] = 1.0;
            } else {
                let dst = pair_coord(jj, ii, n);
                mat[(dst, src)] = 1.0;
                mat[(dst + 1, src + 1)] = -1.0;
            }
        }
    }
    SuperOperator { mat, dims }
}

/// The combined operator P Q̄ P with Q̄ = Π Q Π, for orthogonal projectors P
/// (image of ρ) and Q (image of ρᴾ). Its eigenvalue-1 eigenspace is the set
/// of Hermitian σ with PσP = σ and Qσᴾ Q = σᴾ.
pub fn combined_operator(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
    dims: BipartiteDims,
) -> Result<SuperOperator> {
    let pp = conjugation_superop(p, dims)?;
    let qq = conjugation_superop(q, dims)?;
    let pi = pt_superop(dims);
    let qbar = pi.compose(&qq).compose(&pi);
    let m = pp.compose(&qbar).compose(&pp);
    let mat = (&m.mat + m.mat.transpose()) * 0.5;
    Ok(SuperOperator { mat, dims })
}

/// Q̄ P Q̄, the alternative ordering of the combined operator.
pub fn combined_operator_swapped(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
    dims: BipartiteDims,
) -> Result<SuperOperator> {
    let pp = conjugation_superop(p, dims)?;
    let qq = conjugation_superop(q, dims)?;
    let pi = pt_superop(dims);
    let qbar = pi.compose(&qq).compose(&pi);
    let m = qbar.compose(&pp).compose(&qbar);
    let mat = (&m.mat + m.mat.transpose()) * 0.5;
    Ok(SuperOperator { mat, dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::partial_transpose;
    use crate::random::{random_hermitian, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_projector(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let u = random_unitary(n, rng);
        let v = u.columns(0, rank).into_owned();
        HermitianMatrix::new(&v * v.adjoint()).unwrap()
    }

    #[test]
    fn two_level_basis_is_scaled_pauli() {
        let b = basis(d(1, 2));
        let s = 1.0 / SQRT_2;
        let z = c(0.0, 0.0);
        let expected = [
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, z]),
            DMatrix::from_row_slice(2, 2, &[z, z, z, c(1.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[z, c(s, 0.0), c(s, 0.0), z]),
            DMatrix::from_row_slice(2, 2, &[z, c(0.0, -s), c(0.0, s), z]),
        ];
        assert_eq!(b.len(), 4);
        for (got, want) in b.iter().zip(expected.iter()) {
            assert!((got.as_matrix() - want).norm() < 1e-16);
        }
    }

    #[test]
    fn basis_gram_is_identity() {
        let b = basis(d(3, 3));
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y) - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let dims = d(2, 3);
        let a = random_hermitian(6, &mut rng);
        let mut sum = HermitianMatrix::zeros(6);
        for bk in basis(dims) {
            sum = &sum + &(&bk * bk.inner(&a));
        }
        assert!((&sum - &a).frobenius_norm() < 1e-13);
    }

    #[test]
    fn vectorize_examples() {
        let dims = d(1, 2);
        let v = vectorize(&HermitianMatrix::identity(2), dims).unwrap();
        assert_eq!(v.coords().as_slice(), &[1.0, 1.0, 0.0, 0.0]);
        for (k, bk) in basis(d(2, 2)).iter().enumerate() {
            let v = vectorize(bk, d(2, 2)).unwrap();
            for (j, x) in v.coords().iter().enumerate() {
                let e = if j == k { 1.0 } else { 0.0 };
                assert!((x - e).abs() < 1e-15);
            }
        }
        assert!(vectorize(&HermitianMatrix::identity(3), dims).is_err());
        assert!(MVector::new(DVector::zeros(3), dims).is_err());
    }

    #[test]
    fn vectorize_round_trip_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = d(3, 2);
        for _ in 0..10 {
            let a = random_hermitian(6, &mut rng);
            let b = random_hermitian(6, &mut rng);
            let va = vectorize(&a, dims).unwrap();
            let vb = vectorize(&b, dims).unwrap();
            assert!((devectorize(&va).as_matrix() - a.as_matrix()).norm() < 1e-13);
            assert!((va.dot(&vb) - a.inner(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn pt_superop_is_exact_involution() {
        for dims in [d(2, 2), d(2, 3), d(3, 2), d(3, 3)] {
            let pi = pt_superop(dims);
            let n2 = dims.n() * dims.n();
            assert_eq!(pi.compose(&pi).matrix(), &DMatrix::<f64>::identity(n2, n2));
            assert_eq!(pi.transpose(), pi);
        }
        let det = pt_superop(d(2, 2)).matrix().determinant();
        assert_eq!(det.abs(), 1.0);
    }

    #[test]
    fn pt_superop_matches_partial_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dims in [d(2, 2), d(2, 3), d(3, 2), d(3, 4)] {
            let pi = pt_superop(dims);
            let a = random_hermitian(dims.n(), &mut rng);
            let lhs = pi.apply(&vectorize(&a, dims).unwrap());
            let rhs = vectorize(&partial_transpose(&a, dims).unwrap(), dims).unwrap();
            assert!((lhs.coords() - rhs.coords()).amax() < 1e-14, "{dims}");
        }
    }

    #[test]
    fn conjugation_examples() {
        let dims = d(1, 2);
        let id = conjugation_superop(&HermitianMatrix::identity(2), dims).unwrap();
        assert!((id.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);

        let p = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let sp = conjugation_superop(&p, dims).unwrap();
        let (vals, vecs) = sp.symmetric_eigen().unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!(vals[1..].iter().all(|l| l.abs() < 1e-14));
        assert!((vecs[(0, 0)].abs() - 1.0).abs() < 1e-14);

        let not_proj = HermitianMatrix::from_diagonal(&[0.5, 1.0]);
        assert!(conjugation_superop(&not_proj, dims).is_err());
    }

    #[test]
    fn conjugation_is_orthogonal_projection_of_rank_n_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = d(1, 3);
        let p = random_projector(3, 2, &mut rng);
        let sp = conjugation_superop(&p, dims).unwrap();
        assert!(sp.asymmetry() < 1e-10);
        assert!((sp.compose(&sp).matrix() - sp.matrix()).amax() < 1e-10);
        assert!((sp.matrix().trace() - 4.0).abs() < 1e-8);
        assert_eq!(sp.unit_eigenvalue_multiplicity(1e-6).unwrap(), 4);
    }

    #[test]
    fn combined_operator_examples() {
        let dims = d(2, 2);
        let id = HermitianMatrix::identity(4);
        let b = combined_operator(&id, &id, dims).unwrap();
        assert!((b.matrix() - SuperOperator::identity(dims).matrix()).amax() < 1e-14);
        assert_eq!(b.unit_eigenvalue_multiplicity(1e-6).unwrap(), 16);

        let p = HermitianMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let b = combined_operator(&p, &p, dims).unwrap();
        assert_eq!(b.unit_eigenvalue_multiplicity(1e-6).unwrap(), 1);
    }

    #[test]
    fn combined_operator_spectrum_and_orderings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = d(2, 3);
        for (rp, rq) in [(3, 5), (4, 4), (5, 6), (6, 2)] {
            let p = random_projector(6, rp, &mut rng);
            let q = random_projector(6, rq, &mut rng);
            let b = combined_operator(&p, &q, dims).unwrap();
            let b2 = combined_operator_swapped(&p, &q, dims).unwrap();
            assert!(b.asymmetry() < 1e-12);
            let (vals, _) = b.symmetric_eigen().unwrap();
            assert!(vals.iter().all(|&l| (-1e-6..=1.0 + 1e-6).contains(&l)));
            assert_eq!(
                b.unit_eigenvalue_multiplicity(1e-6).unwrap(),
                b2.unit_eigenvalue_multiplicity(1e-6).unwrap()
            );
        }
    }
}
