//! Extremality test for points of the PPT set.
//!
//! A PPT density matrix ρ is extreme exactly when the only Hermitian σ with
//! PσP = σ and Qσᴾ Q = σᴾ (P, Q the image projectors of ρ and ρᴾ) are the
//! multiples of ρ, i.e. when the unit eigenspace of P Q̄ P is one-dimensional.
//!
//! The unit eigenspace is computed inside the n²-dimensional subspace
//! P·M·P, parametrized by the eigenvectors of ρ. For σ there,
//! ‖(1 − Q̄)σ‖² = ‖(1 − Q)σᴾ‖² + ‖σᴾ(1 − Q)‖² − ‖(1 − Q)σᴾ(1 − Q)‖²,
//! which only involves the kernel block of ρᴾ. Writing that map as a real
//! (N² − m²) x n² matrix C, the restriction of P Q̄ P has eigenvalues 1 − s²
//! for the singular values s of C, and the face is the null space of C.
//! Dense N² x N² superoperators (see [`crate::mspace`]) give the same
//! spectrum and serve as the reference in tests.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bipartite::{partial_transpose, BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};
use crate::mspace::{hermitian_coords, hermitian_from_coords, vectorize, MVector};
use crate::random::gaussian_vector;

/// Width of the ambiguity band below the unit-eigenvalue threshold, in
/// units of `one_eig`.
pub const BORDERLINE_BAND: f64 = 10.0;

const SVD_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Extreme,
    NotExtreme,
    /// An eigenvalue of P Q̄ P sits just below the unit threshold; the rank
    /// of the combined projection is numerically ambiguous.
    Borderline,
}

#[derive(Clone, Debug)]
enum FaceSpan {
    /// Orthonormal columns spanning the face.
    Basis(DMatrix<f64>),
    /// Orthonormal columns spanning the orthogonal complement of the face
    /// inside the image subspace.
    Complement(DMatrix<f64>),
}

/// The unit eigenspace of P Q̄ P: every Hermitian matrix supported on the
/// image of ρ whose partial transpose is supported on the image of ρᴾ.
///
/// Elements are stored as coordinates in the orthonormal basis of
/// Hermitian n x n matrices, mapped to N x N through the image vectors of ρ.
#[derive(Clone, Debug)]
pub struct Face {
    dims: BipartiteDims,
    image: DMatrix<C64>,
    span: FaceSpan,
}

impl Face {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// Rank of the supporting image projector.
    pub fn image_rank(&self) -> usize {
        self.image.ncols()
    }

    pub fn dim(&self) -> usize {
        let n2 = self.image_rank() * self.image_rank();
        match &self.span {
            FaceSpan::Basis(f) => f.ncols(),
            FaceSpan::Complement(r) => n2 - r.ncols(),
        }
    }

    /// U E(c) U† for image coordinates c.
    pub fn coords_to_matrix(&self, c: &DVector<f64>) -> HermitianMatrix {
        let e = hermitian_from_coords(self.image_rank(), c.as_slice());
        HermitianMatrix::symmetrized(&self.image * e * self.image.adjoint())
    }

    /// Image coordinates of U† σ U.
    pub fn matrix_to_coords(&self, sigma: &HermitianMatrix) -> DVector<f64> {
        hermitian_coords(&(self.image.adjoint() * sigma.as_matrix() * &self.image))
    }

    fn project_coords(&self, c: &DVector<f64>) -> DVector<f64> {
        match &self.span {
            FaceSpan::Basis(f) => f * (f.transpose() * c),
            FaceSpan::Complement(r) => c - r * (r.transpose() * c),
        }
    }

    /// Orthogonal projection (in the trace scalar product) of a Hermitian
    /// matrix onto the face.
    pub fn project(&self, sigma: &HermitianMatrix) -> HermitianMatrix {
        self.coords_to_matrix(&self.project_coords(&self.matrix_to_coords(sigma)))
    }

    /// Distance from σ to the face.
    pub fn distance(&self, sigma: &HermitianMatrix) -> f64 {
        (sigma - &self.project(sigma)).frobenius_norm()
    }

    /// Orthonormal image-coordinate basis of the face, one column per
    /// dimension.
    pub fn coord_basis(&self) -> DMatrix<f64> {
        match &self.span {
            FaceSpan::Basis(f) => f.clone(),
            FaceSpan::Complement(r) => {
                let n2 = r.nrows();
                let k = r.ncols();
                if k == 0 {
                    return DMatrix::identity(n2, n2);
                }
                // Householder QR of [R | I]: the trailing columns of Q span the
                // orthogonal complement of R.
                let mut aug = DMatrix::zeros(n2, k + n2);
                aug.view_mut((0, 0), (n2, k)).copy_from(r);
                aug.view_mut((0, k), (n2, n2)).fill_with_identity();
                let q = aug.qr().q();
                q.columns(k, n2 - k).into_owned()
            }
        }
    }

    /// The face as orthonormal Hermitian matrices.
    pub fn matrices(&self) -> Vec<HermitianMatrix> {
        let basis = self.coord_basis();
        basis
            .column_iter()
            .map(|c| self.coords_to_matrix(&c.into_owned()))
            .collect()
    }

    /// The face as orthonormal coordinate vectors of the full space.
    pub fn vectors(&self) -> Vec<MVector> {
        self.matrices()
            .iter()
            .map(|m| vectorize(m, self.dims).expect("face matrices have dimension N"))
            .collect()
    }

    /// A standard Gaussian element of the face: independent normal
    /// coefficients on an orthonormal basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> HermitianMatrix {
        let c = match &self.span {
            FaceSpan::Basis(f) => f * gaussian_vector(f.ncols(), rng),
            FaceSpan::Complement(r) => {
                let z = gaussian_vector(r.nrows(), rng);
                &z - r * (r.transpose() * &z)
            }
        };
        self.coords_to_matrix(&c)
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalityReport {
    /// Rank of ρ.
    pub n: usize,
    /// Rank of ρᴾ.
    pub m: usize,
    /// Multiplicity of the eigenvalue 1 of P Q̄ P.
    pub b_rank: usize,
    /// Eigenvalues of P Q̄ P on the image subspace P·M·P, descending. The
    /// remaining N² − n² eigenvalues are exactly zero.
    pub spectrum: Vec<f64>,
    /// 1 − λ for the same eigenvalues, ascending, computed directly as
    /// squared singular values so that values far below machine epsilon
    /// are resolved.
    pub defects: Vec<f64>,
    /// 1 − λ for the largest eigenvalue λ below the unit cluster; `None`
    /// when every eigenvalue is 1 (P = Q = 1).
    pub spectrum_gap: Option<f64>,
    pub verdict: Verdict,
    pub face: Face,
}

impl ExtremalityReport {
    pub fn is_extreme(&self) -> bool {
        self.verdict == Verdict::Extreme
    }

    pub fn rank_pair(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Largest eigenvalue of P Q̄ P strictly below the unit cluster.
    pub fn largest_below_cluster(&self) -> Option<f64> {
        self.spectrum_gap.map(|g| 1.0 - g)
    }

    pub fn face_basis(&self) -> Vec<MVector> {
        self.face.vectors()
    }
}

/// n² + m² ≤ N² + 1, necessary for an extreme point of rank pair (n, m).
pub fn check_rank_bound(n: usize, m: usize, dims: BipartiteDims) -> bool {
    let big_n = dims.n();
    n * n + m * m <= big_n * big_n + 1
}

/// Lower bound on the combined-projection rank implied by constraint
/// counting: max(1, n² + m² − N²).
pub fn b_rank_lower_bound(n: usize, m: usize, dims: BipartiteDims) -> usize {
    let big = dims.n() * dims.n();
    (n * n + m * m).saturating_sub(big).max(1)
}

/// Rows of C for one image-subspace element X: coordinates of the part of
/// Xᴾ outside the Q block, in an eigenbasis of ρᴾ.
fn constraint_column(
    x: &HermitianMatrix,
    dims: BipartiteDims,
    q_image: &DMatrix<C64>,
    q_kernel: &DMatrix<C64>,
    out: &mut [f64],
) {
    let y = partial_transpose(x, dims).expect("dimension checked");
    let ky = q_kernel.adjoint() * y.as_matrix();
    let off = &ky * q_image;
    let diag = &ky * q_kernel;
    let mut k = 0;
    for z in off.iter() {
        out[k] = SQRT_2 * z.re;
        out[k + 1] = SQRT_2 * z.im;
        k += 2;
    }
    for (slot, v) in out[k..].iter_mut().zip(hermitian_coords(&diag).iter()) {
        *slot = *v;
    }
}

/// Decides whether a PPT density matrix is an extreme point of the PPT set.
pub fn test_extremality(rho: &DensityMatrix, tol: &Tolerances) -> Result<ExtremalityReport> {
    rho.ensure_ppt(tol)?;
    let dims = rho.dims();
    let big_n = dims.n();

    let sd_rho = rho.matrix().spectral_decompose()?;
    let image = sd_rho.image_vectors(tol);
    let n = image.ncols();
    let sd_pt = rho.partial_transpose().spectral_decompose()?;
    let (adapted, m) = sd_pt.adapted_basis(tol);
    let q_image = adapted.columns(0, m).into_owned();
    let q_kernel = adapted.columns(m, big_n - m).into_owned();

    let n2 = n * n;
    let rows = big_n * big_n - m * m;
    let face_of = |span| Face {
        dims,
        image: image.clone(),
        span,
    };

    // Eigenvalues of the restricted P Q̄ P are 1 - s² for the singular
    // values s of C, padded with ones when C has fewer rows than columns.
    // Working with s rather than with eigenvalues of P Q̄ P or of CᵀC keeps
    // the defects 1 - λ = s² accurate far below machine epsilon.
    let (mut defects, span) = if rows == 0 {
        (vec![0.0; n2], FaceSpan::Complement(DMatrix::zeros(n2, 0)))
    } else {
        let mut c = DMatrix::<f64>::zeros(rows, n2);
        let mut col = vec![0.0; rows];
        let mut e = vec![0.0; n2];
        for k in 0..n2 {
            e[k] = 1.0;
            let x = HermitianMatrix::from_exact(
                &image * hermitian_from_coords(n, &e) * image.adjoint(),
            );
            e[k] = 0.0;
            constraint_column(&x, dims, &q_image, &q_kernel, &mut col);
            c.set_column(k, &DVector::from_column_slice(&col));
        }
        let svd = c
            .try_svd(false, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::EigenNoConvergence(rows.max(n2)))?;
        let v_t = svd.v_t.expect("right singular vectors requested");
        let s2: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
        let pick = |keep: &dyn Fn(f64) -> bool| {
            let idx: Vec<usize> = (0..s2.len()).filter(|&k| keep(s2[k])).collect();
            DMatrix::from_fn(n2, idx.len(), |i, j| v_t[(idx[j], i)])
        };
        if rows >= n2 {
            let null = pick(&|d| d < tol.one_eig);
            (s2, FaceSpan::Basis(null))
        } else {
            let active = pick(&|d| d >= tol.one_eig);
            let mut d = s2;
            d.resize(n2, 0.0);
            (d, FaceSpan::Complement(active))
        }
    };
    defects.sort_by(|a, b| a.total_cmp(b));

    let face = face_of(span);
    let b_rank = face.dim();
    if b_rank == 0 {
        return Err(Error::Internal(
            "combined projection has rank 0, but rho itself always lies in it".into(),
        ));
    }

    let spectrum: Vec<f64> = defects.iter().map(|d| 1.0 - d).collect();
    let spectrum_gap = defects
        .iter()
        .copied()
        .find(|&d| d >= tol.one_eig)
        .or(if n < big_n { Some(1.0) } else { None });

    let verdict = match spectrum_gap {
        Some(g) if g <= (1.0 + BORDERLINE_BAND) * tol.one_eig => Verdict::Borderline,
        _ if b_rank == 1 => Verdict::Extreme,
        _ => Verdict::NotExtreme,
    };

    Ok(ExtremalityReport {
        n,
        m,
        b_rank,
        spectrum,
        defects,
        spectrum_gap,
        verdict,
        face,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::product_state;
    use crate::mspace::combined_operator;
    use crate::random::{random_unit_vector, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn dims(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    fn random_product(d: BipartiteDims, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let a = HermitianMatrix::outer(&random_unit_vector(d.n_a(), rng));
        let b = HermitianMatrix::outer(&random_unit_vector(d.n_b(), rng));
        product_state(&a, &b, &tol()).unwrap()
    }

    /// Random PPT state of reduced rank: a mixture of a few product states.
    fn random_separable(d: BipartiteDims, terms: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let mut acc = HermitianMatrix::zeros(d.n());
        for _ in 0..terms {
            acc = &acc + random_product(d, rng).matrix();
        }
        DensityMatrix::normalized(acc, d, &tol()).unwrap()
    }

    fn dense_multiplicity(rho: &DensityMatrix) -> usize {
        let t = tol();
        let p = rho.matrix().image_projector(&t).unwrap();
        let q = rho.partial_transpose().image_projector(&t).unwrap();
        combined_operator(&p, &q, rho.dims())
            .unwrap()
            .unit_eigenvalue_multiplicity(t.one_eig)
            .unwrap()
    }

    #[test]
    fn pure_product_is_extreme() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_product(dims(3, 3), &mut rng);
        let r = test_extremality(&rho, &tol()).unwrap();
        assert_eq!((r.n, r.m, r.b_rank), (1, 1, 1));
        assert!(r.is_extreme());
    }

    #[test]
    fn maximally_mixed_is_not_extreme() {
        let rho = DensityMatrix::maximally_mixed(dims(3, 3));
        let r = test_extremality(&rho, &tol()).unwrap();
        assert_eq!(r.b_rank, 81);
        assert_eq!(r.verdict, Verdict::NotExtreme);
        assert_eq!(r.spectrum_gap, None);
    }

    #[test]
    fn bell_state_is_rejected() {
        let d = dims(2, 2);
        let mut psi = DVector::zeros(4);
        psi[0] = C64::new(1.0, 0.0);
        psi[3] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&psi, d).unwrap();
        assert!(matches!(
            test_extremality(&rho, &tol()),
            Err(Error::NotPpt { .. })
        ));
    }

    /// Reduced route against the dense N² x N² superoperator, on states
    /// exercising both branches (more rows than image coordinates and
    /// fewer).
    #[test]
    fn agrees_with_dense_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (d, terms) in [
            (dims(2, 2), 2),
            (dims(2, 3), 3),
            (dims(3, 3), 4),
            (dims(3, 3), 7),
            (dims(2, 4), 6),
        ] {
            let rho = random_separable(d, terms, &mut rng);
            let r = test_extremality(&rho, &tol()).unwrap();
            assert_eq!(r.b_rank, dense_multiplicity(&rho), "dims {d} terms {terms}");
            assert!(r.b_rank >= b_rank_lower_bound(r.n, r.m, d));
        }
    }

    #[test]
    fn spectrum_matches_dense_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = dims(2, 3);
        let rho = random_separable(d, 4, &mut rng);
        let t = tol();
        let r = test_extremality(&rho, &t).unwrap();
        let p = rho.matrix().image_projector(&t).unwrap();
        let q = rho.partial_transpose().image_projector(&t).unwrap();
        let (dense, _) = combined_operator(&p, &q, d)
            .unwrap()
            .symmetric_eigen()
            .unwrap();
        for (a, b) in r.spectrum.iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        for (a, d) in r.spectrum.iter().zip(r.defects.iter()) {
            assert!((1.0 - a - d).abs() < 1e-15);
        }
        for z in &dense[r.spectrum.len()..] {
            assert!(z.abs() < 1e-9);
        }
    }

    #[test]
    fn face_contains_rho_and_satisfies_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = dims(3, 3);
        let t = tol();
        let rho = random_separable(d, 6, &mut rng);
        let r = test_extremality(&rho, &t).unwrap();
        assert!(r.face.distance(rho.matrix()) < 1e-8);

        let p = rho.matrix().image_projector(&t).unwrap();
        let q = rho.partial_transpose().image_projector(&t).unwrap();
        let mats = r.face.matrices();
        assert_eq!(mats.len(), r.b_rank);
        for s in &mats {
            let psp = HermitianMatrix::new(p.as_matrix() * s.as_matrix() * p.as_matrix()).unwrap();
            assert!((&psp - s).frobenius_norm() < 1e-8);
            let spt = partial_transpose(s, d).unwrap();
            let qsq =
                HermitianMatrix::new(q.as_matrix() * spt.as_matrix() * q.as_matrix()).unwrap();
            assert!((&qsq - &spt).frobenius_norm() < 1e-8);
        }
        // orthonormal in the trace scalar product
        let vecs = r.face_basis();
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((a.dot(b) - e).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = dims(3, 3);
        let rho = random_separable(d, 5, &mut rng);
        let base = test_extremality(&rho, &tol()).unwrap();
        for _ in 0..3 {
            let ua = random_unitary(3, &mut rng);
            let ub = random_unitary(3, &mut rng);
            let r = test_extremality(&rho.local_conjugate(&ua, &ub), &tol()).unwrap();
            assert_eq!(r.b_rank, base.b_rank);
            assert_eq!(r.verdict, base.verdict);
        }
    }

    #[test]
    fn rank_bound_examples() {
        let d = dims(3, 3);
        assert!(check_rank_bound(6, 6, d));
        assert!(check_rank_bound(5, 7, d));
        assert!(!check_rank_bound(7, 7, d));
        assert_eq!(b_rank_lower_bound(7, 6, d), 4);
        assert_eq!(b_rank_lower_bound(2, 2, d), 1);
    }
}
