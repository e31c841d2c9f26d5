//! Reference states: maximally mixed, pure product, Bell, the Tiles UPB
//! bound entangled state and the 3x3 Horodecki family.
//!
//! Identifiers accepted by [`by_name`]: `mixed:AxB`, `product:AxB`, `bell`,
//! `upb-tiles`, `horodecki:<a>`.

use nalgebra::{DMatrix, DVector};

use crate::bipartite::{BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};

#[derive(Clone, Debug)]
pub struct NamedState {
    pub name: String,
    pub rho: DensityMatrix,
    pub expected_rank_pair: Option<(usize, usize)>,
    pub expected_extreme: Option<bool>,
    pub source: &'static str,
}

fn real_vector(entries: &[f64]) -> DVector<C64> {
    DVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)))
}

fn ket(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

fn product_ket(a: &DVector<f64>, b: &DVector<f64>) -> DVector<C64> {
    real_vector(a.kronecker(b).as_slice())
}

pub fn maximally_mixed(dims: BipartiteDims) -> NamedState {
    NamedState {
        name: format!("mixed:{dims}"),
        rho: DensityMatrix::maximally_mixed(dims),
        expected_rank_pair: Some((dims.n(), dims.n())),
        expected_extreme: Some(dims.n() == 1),
        source: "1/N",
    }
}

/// |00><00|.
pub fn pure_product(dims: BipartiteDims) -> NamedState {
    let psi = product_ket(&ket(dims.n_a(), 0), &ket(dims.n_b(), 0));
    NamedState {
        name: format!("product:{dims}"),
        rho: DensityMatrix::pure(&psi, dims).expect("nonzero vector of dimension N"),
        expected_rank_pair: Some((1, 1)),
        expected_extreme: Some(true),
        source: "|00>",
    }
}

/// |φ⁺><φ⁺| with |φ⁺> = (|00> + |11>)/√2 on 2x2.
pub fn bell_state() -> NamedState {
    let dims = BipartiteDims::new(2, 2).expect("valid");
    let psi = real_vector(&[1.0, 0.0, 0.0, 1.0]);
    NamedState {
        name: "bell".into(),
        rho: DensityMatrix::pure(&psi, dims).expect("valid"),
        expected_rank_pair: Some((1, 4)),
        expected_extreme: None,
        source: "(|00> + |11>)/sqrt(2)",
    }
}

/// The five Tiles product vectors in 3x3 (Bennett, DiVincenzo, Mor, Shor,
/// Smolin, Terhal, PRL 82, 5385 (1999)):
/// |0>(|0>−|1>), (|0>−|1>)|2>, |2>(|1>−|2>), (|1>−|2>)|0>, and
/// (|0>+|1>+|2>)(|0>+|1>+|2>), each normalized.
pub fn tiles_vectors() -> Vec<DVector<C64>> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3f64.sqrt();
    let v = |e: &[f64]| DVector::from_column_slice(e);
    let pairs = [
        (v(&[1.0, 0.0, 0.0]), v(&[s2, -s2, 0.0])),
        (v(&[s2, -s2, 0.0]), v(&[0.0, 0.0, 1.0])),
        (v(&[0.0, 0.0, 1.0]), v(&[0.0, s2, -s2])),
        (v(&[0.0, s2, -s2]), v(&[1.0, 0.0, 0.0])),
        (v(&[s3, s3, s3]), v(&[s3, s3, s3])),
    ];
    pairs.iter().map(|(a, b)| product_ket(a, b)).collect()
}

/// (1 − Σᵢ |ψᵢ><ψᵢ|)/4 for the Tiles UPB: PPT, entangled, rank pair (4, 4).
/// The vectors are real products, so the state equals its own partial
/// transpose.
pub fn upb_tiles_state() -> NamedState {
    let dims = BipartiteDims::new(3, 3).expect("valid");
    let mut proj = DMatrix::<C64>::zeros(9, 9);
    for psi in tiles_vectors() {
        proj += &psi * psi.adjoint();
    }
    let mat = (DMatrix::<C64>::identity(9, 9) - proj) * C64::new(0.25, 0.0);
    let rho = DensityMatrix::new(
        HermitianMatrix::new(mat).expect("square"),
        dims,
        &Tolerances::default(),
    )
    .expect("Tiles UPB state is a density matrix");
    NamedState {
        name: "upb-tiles".into(),
        rho,
        expected_rank_pair: Some((4, 4)),
        expected_extreme: Some(true),
        source: "Bennett et al., PRL 82, 5385 (1999), Tiles UPB",
    }
}

/// The 3x3 family of P. Horodecki, Phys. Lett. A 232, 333 (1997), for
/// 0 < a < 1, in the basis |00>, |01>, …, |22>:
///
/// ```text
///            [ a 0 0 0 a 0 0 0 a ]
///            [ 0 a 0 0 0 0 0 0 0 ]
///            [ 0 0 a 0 0 0 0 0 0 ]
///            [ 0 0 0 a 0 0 0 0 0 ]
/// 1/(8a+1) · [ a 0 0 0 a 0 0 0 a ]
///            [ 0 0 0 0 0 a 0 0 0 ]
///            [ 0 0 0 0 0 0 p 0 q ]
///            [ 0 0 0 0 0 0 0 a 0 ]
///            [ a 0 0 0 a 0 q 0 p ]
/// ```
///
/// with p = (1 + a)/2 and q = √(1 − a²)/2.
pub fn horodecki_state(a: f64) -> Result<NamedState> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Horodecki parameter a = {a} must lie in (0, 1)"
        )));
    }
    let dims = BipartiteDims::new(3, 3).expect("valid");
    let p = (1.0 + a) / 2.0;
    let q = (1.0 - a * a).sqrt() / 2.0;
    let mut m = DMatrix::<f64>::zeros(9, 9);
    for i in [0, 4, 8] {
        for j in [0, 4, 8] {
            m[(i, j)] = a;
        }
    }
    for i in [1, 2, 3, 5, 7] {
        m[(i, i)] = a;
    }
    m[(6, 6)] = p;
    m[(8, 8)] = p;
    m[(6, 8)] = q;
    m[(8, 6)] = q;
    m /= 8.0 * a + 1.0;
    let mat = HermitianMatrix::from_real_imag(&m, &DMatrix::zeros(9, 9))?;
    let rho = DensityMatrix::new(mat, dims, &Tolerances::default())?;
    Ok(NamedState {
        name: format!("horodecki:{a}"),
        rho,
        expected_rank_pair: None,
        expected_extreme: Some(false),
        source: "P. Horodecki, Phys. Lett. A 232, 333 (1997)",
    })
}

/// Looks up a state by identifier.
pub fn by_name(id: &str) -> Result<NamedState> {
    let id = id.trim();
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    match (head, arg) {
        ("mixed", Some(d)) => Ok(maximally_mixed(d.parse()?)),
        ("product", Some(d)) => Ok(pure_product(d.parse()?)),
        ("bell", None) => Ok(bell_state()),
        ("upb-tiles", None) => Ok(upb_tiles_state()),
        ("horodecki", Some(a)) => {
            let a: f64 = a
                .parse()
                .map_err(|_| Error::UnknownState(format!("{id}: bad parameter")))?;
            horodecki_state(a)
        }
        _ => Err(Error::UnknownState(id.to_string())),
    }
}
