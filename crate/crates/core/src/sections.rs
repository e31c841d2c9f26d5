//! Two-dimensional affine sections ρ(x, y) = origin + x·dir1 + y·dir2
//! through the set of density matrices, classified into NOT_PSD, PPT and
//! NOT_PPT, and radial boundary scans inside faces of the PPT set.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipartite::{partial_transpose, BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::extremality::{test_extremality, ExtremalityReport, Verdict};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};
use crate::random::random_hermitian;
use crate::search::{line_search_to_boundary, random_face_direction, Direction, X_MAX};

const TRACE_TOL: f64 = 1e-12;
const ORTHO_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    NotPsd,
    Ppt,
    NotPpt,
}

impl Region {
    pub fn classify(min_eig_rho: f64, min_eig_rho_pt: f64, tol: &Tolerances) -> Region {
        if min_eig_rho <= -tol.zero_eig {
            Region::NotPsd
        } else if min_eig_rho_pt <= -tol.zero_eig {
            Region::NotPpt
        } else {
            Region::Ppt
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::NotPsd => "NOT_PSD",
            Region::Ppt => "PPT",
            Region::NotPpt => "NOT_PPT",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NOT_PSD" => Ok(Region::NotPsd),
            "PPT" => Ok(Region::Ppt),
            "NOT_PPT" => Ok(Region::NotPpt),
            _ => Err(Error::InvalidParameter(format!("unknown region {s:?}"))),
        }
    }
}

/// (x_min, x_max, y_min, y_max).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Extent {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite())
            && x_min <= x_max
            && y_min <= y_max;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "extent ({x_min}, {x_max}, {y_min}, {y_max}) must be finite with min <= max"
            )));
        }
        Ok(Extent {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn symmetric(r: f64) -> Result<Self> {
        Extent::new(-r, r, -r, r)
    }
}

/// Grid coordinate k of `count` evenly spaced points on [lo, hi].
fn grid_coord(lo: f64, hi: f64, k: usize, count: usize) -> f64 {
    if count == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * k as f64 / (count - 1) as f64
    }
}

#[derive(Clone, Debug)]
pub struct SectionSpec {
    origin: DensityMatrix,
    dir1: HermitianMatrix,
    dir2: HermitianMatrix,
    grid: (usize, usize),
    extent: Extent,
}

impl SectionSpec {
    /// Validates that both directions are traceless, unit-norm and
    /// mutually orthogonal under Tr(AB).
    pub fn new(
        origin: DensityMatrix,
        dir1: HermitianMatrix,
        dir2: HermitianMatrix,
        grid: (usize, usize),
        extent: Extent,
    ) -> Result<Self> {
        let n = origin.dims().n();
        for d in [&dir1, &dir2] {
            if d.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: d.dim(),
                });
            }
            if d.trace().abs() > TRACE_TOL {
                return Err(Error::InvalidParameter(format!(
                    "direction has trace {:e}",
                    d.trace()
                )));
            }
            if (d.frobenius_norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "direction has norm {}",
                    d.frobenius_norm()
                )));
            }
        }
        let overlap = dir1.inner(&dir2);
        if overlap.abs() > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "directions overlap by {overlap:e}"
            )));
        }
        if grid.0 == 0 || grid.1 == 0 {
            return Err(Error::InvalidParameter(
                "grid needs at least one point per axis".into(),
            ));
        }
        Ok(SectionSpec {
            origin,
            dir1,
            dir2,
            grid,
            extent,
        })
    }

    /// Plane through `a` and `b`: origin a, dir1 along b − a, dir2 a random
    /// traceless direction orthogonal to it.
    pub fn through(
        a: &DensityMatrix,
        b: &DensityMatrix,
        seed: u64,
        grid: (usize, usize),
        extent: Option<Extent>,
    ) -> Result<Self> {
        if a.dims() != b.dims() {
            return Err(Error::InvalidDims(format!("{} vs {}", a.dims(), b.dims())));
        }
        let diff = b.matrix() - a.matrix();
        let dist = diff.frobenius_norm();
        if dist < 1e-12 {
            return Err(Error::InvalidParameter("the two states coincide".into()));
        }
        let dir1 = diff.scale(1.0 / dist);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir2 = orthonormal_traceless(&[&dir1], || random_hermitian(a.dims().n(), &mut rng))?;
        let extent = match extent {
            Some(e) => e,
            None => Extent::new(-0.5 * dist, 1.5 * dist, -dist, dist)?,
        };
        SectionSpec::new(a.clone(), dir1, dir2, grid, extent)
    }

    /// Plane through `origin` spanned by two random traceless directions.
    pub fn random(
        origin: &DensityMatrix,
        seed: u64,
        grid: (usize, usize),
        extent: Extent,
    ) -> Result<Self> {
        let n = origin.dims().n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir1 = orthonormal_traceless(&[], || random_hermitian(n, &mut rng))?;
        let dir2 = orthonormal_traceless(&[&dir1], || random_hermitian(n, &mut rng))?;
        SectionSpec::new(origin.clone(), dir1, dir2, grid, extent)
    }

    pub fn origin(&self) -> &DensityMatrix {
        &self.origin
    }

    pub fn dir1(&self) -> &HermitianMatrix {
        &self.dir1
    }

    pub fn dir2(&self) -> &HermitianMatrix {
        &self.dir2
    }

    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn with_extent(mut self, extent: Extent) -> Self {
        self.extent = extent;
        self
    }

    pub fn dims(&self) -> BipartiteDims {
        self.origin.dims()
    }

    /// origin + x·dir1 + y·dir2, not necessarily positive.
    pub fn point(&self, x: f64, y: f64) -> HermitianMatrix {
        &(self.origin.matrix() + &self.dir1.scale(x)) + &self.dir2.scale(y)
    }

    /// Grid coordinates in output order: rows of constant y, y outermost.
    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        let (nx, ny) = self.grid;
        let e = self.extent;
        (0..ny)
            .flat_map(|j| {
                let y = grid_coord(e.y_min, e.y_max, j, ny);
                (0..nx).map(move |i| (grid_coord(e.x_min, e.x_max, i, nx), y))
            })
            .collect()
    }
}

/// Draws candidates until one has a non-negligible traceless part
/// orthogonal to `against`, and returns it normalized.
fn orthonormal_traceless(
    against: &[&HermitianMatrix],
    mut draw: impl FnMut() -> HermitianMatrix,
) -> Result<HermitianMatrix> {
    for _ in 0..16 {
        let h = draw();
        let n = h.dim();
        let mut d = &h - &HermitianMatrix::identity(n).scale(h.trace() / n as f64);
        for a in against {
            d = &d - &a.scale(a.inner(&d));
        }
        let norm = d.frobenius_norm();
        if norm > 1e-8 {
            return Ok(d.scale(1.0 / norm));
        }
    }
    Err(Error::Internal(
        "could not draw a traceless direction".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSample {
    pub x: f64,
    pub y: f64,
    pub min_eig_rho: f64,
    pub min_eig_rho_pt: f64,
    pub region: Region,
}

/// Evaluates minimal eigenvalues of ρ(x, y) and ρ(x, y)ᴾ, optionally
/// compressed onto fixed subspaces.
struct Sampler<'a> {
    spec: &'a SectionSpec,
    image: Option<DMatrix<C64>>,
    image_pt: Option<DMatrix<C64>>,
}

impl Sampler<'_> {
    fn sample(&self, x: f64, y: f64, tol: &Tolerances) -> Result<SectionSample> {
        let dims = self.spec.dims();
        let tau = self.spec.point(x, y);
        let tau_pt = partial_transpose(&tau, dims)?;
        let min_eig = |m: &HermitianMatrix, v: &Option<DMatrix<C64>>| match v {
            Some(v) => m.compress(v).min_eigenvalue(),
            None => m.min_eigenvalue(),
        };
        let min_eig_rho = min_eig(&tau, &self.image)?;
        let min_eig_rho_pt = min_eig(&tau_pt, &self.image_pt)?;
        Ok(SectionSample {
            x,
            y,
            min_eig_rho,
            min_eig_rho_pt,
            region: Region::classify(min_eig_rho, min_eig_rho_pt, tol),
        })
    }

    fn run(&self, tol: &Tolerances) -> Result<Vec<SectionSample>> {
        let coords = self.spec.coordinates();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            coords
                .par_iter()
                .map(|&(x, y)| self.sample(x, y, tol))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            coords
                .iter()
                .map(|&(x, y)| self.sample(x, y, tol))
                .collect()
        }
    }
}

/// Samples the section on its grid, rows of constant y first to last.
pub fn sample_section(spec: &SectionSpec, tol: &Tolerances) -> Result<Vec<SectionSample>> {
    tol.validate()?;
    Sampler {
        spec,
        image: None,
        image_pt: None,
    }
    .run(tol)
}

/// A boundary point of a face found by radial search from its interior.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub angle: f64,
    pub radius: f64,
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub m: usize,
    pub b_rank: usize,
    pub verdict: Verdict,
}

impl BoundaryPoint {
    pub fn rank_pair(&self) -> (usize, usize) {
        (self.n, self.m)
    }
}

/// How the two in-face directions of a face section are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacePlane {
    /// Two independent random face directions.
    Random,
    /// A random first direction, and a second one redrawn (up to the given
    /// number of attempts) until its boundary point has a different
    /// unordered rank pair than the first, so the section crosses two
    /// families of boundary points. Falls back to the last draw.
    Contrasting(usize),
}

#[derive(Clone, Debug)]
pub struct FaceSectionConfig {
    pub seed: u64,
    pub grid: (usize, usize),
    /// Number of equally spaced radial directions for boundary location.
    pub rays: usize,
    /// Sampling window; defaults to a square 10% larger than the farthest
    /// boundary point.
    pub extent: Option<Extent>,
    pub plane: FacePlane,
}

impl Default for FaceSectionConfig {
    fn default() -> Self {
        FaceSectionConfig {
            seed: 0,
            grid: (41, 41),
            rays: 72,
            extent: None,
            plane: FacePlane::Random,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FaceSection {
    pub spec: SectionSpec,
    pub samples: Vec<SectionSample>,
    pub boundary: Vec<BoundaryPoint>,
}

fn boundary_point(
    rho: &DensityMatrix,
    dir1: &HermitianMatrix,
    dir2: &HermitianMatrix,
    angle: f64,
    tol: &Tolerances,
) -> Result<BoundaryPoint> {
    let (s, c) = angle.sin_cos();
    let dir = &dir1.scale(c) + &dir2.scale(s);
    let (state, radius) = line_search_to_boundary(rho, &dir, Direction::Forward, tol)?;
    let r = test_extremality(&state, tol)?;
    Ok(BoundaryPoint {
        angle,
        radius,
        x: radius * c,
        y: radius * s,
        n: r.n,
        m: r.m,
        b_rank: r.b_rank,
        verdict: r.verdict,
    })
}

fn face_plane(
    rho: &DensityMatrix,
    report: &ExtremalityReport,
    config: &FaceSectionConfig,
    tol: &Tolerances,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = rho.dims().n();
    let dir1 = random_face_direction(report, rho, &mut rng)?;
    let mut draw = || {
        orthonormal_traceless(&[&dir1], || {
            random_face_direction(report, rho, &mut rng)
                .unwrap_or_else(|_| HermitianMatrix::zeros(n))
        })
    };
    let attempts = match config.plane {
        FacePlane::Random => return Ok((dir1.clone(), draw()?)),
        FacePlane::Contrasting(k) => k.max(1),
    };
    let family = |p: &BoundaryPoint| crate::search::canonical_pair(p.rank_pair());
    let first = family(&boundary_point(rho, &dir1, &dir1, 0.0, tol)?);
    let mut dir2 = draw()?;
    for _ in 1..attempts {
        if family(&boundary_point(rho, &dir1, &dir2, FRAC_PI_2, tol)?) != first {
            break;
        }
        dir2 = draw()?;
    }
    Ok((dir1, dir2))
}

/// Section through the face of a non-extreme PPT state spanned by two
/// orthonormal traceless face directions (see [`FacePlane`]).
///
/// Inside the face ρ(x, y) shares the kernels of ρ and ρᴾ, so the sampled
/// minimal eigenvalues are those of the compressions onto the images of
/// `rho_interior` and its partial transpose. Their zero-level sets are the
/// face boundary. Boundary points are also located along `config.rays`
/// radial directions and re-tested for extremality.
pub fn face_section(
    rho_interior: &DensityMatrix,
    report: &ExtremalityReport,
    config: &FaceSectionConfig,
    tol: &Tolerances,
) -> Result<FaceSection> {
    tol.validate()?;
    if report.b_rank < 3 {
        return Err(Error::InvalidParameter(format!(
            "face of dimension {} has no two-dimensional traceless section",
            report.b_rank
        )));
    }
    let (dir1, dir2) = face_plane(rho_interior, report, config, tol)?;

    let boundary = (0..config.rays)
        .map(|k| {
            boundary_point(
                rho_interior,
                &dir1,
                &dir2,
                TAU * k as f64 / config.rays as f64,
                tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let extent = match config.extent {
        Some(e) => e,
        None => {
            let reach = boundary.iter().fold(0.0f64, |m, b| m.max(b.radius));
            Extent::symmetric(1.1 * reach)?
        }
    };
    let spec = SectionSpec::new(rho_interior.clone(), dir1, dir2, config.grid, extent)?;
    let image = rho_interior
        .matrix()
        .spectral_decompose()?
        .image_vectors(tol);
    let image_pt = rho_interior
        .partial_transpose()
        .spectral_decompose()?
        .image_vectors(tol);
    let samples = Sampler {
        spec: &spec,
        image: Some(image),
        image_pt: Some(image_pt),
    }
    .run(tol)?;
    Ok(FaceSection {
        spec,
        samples,
        boundary,
    })
}

/// Distance from the origin of a section to the boundary of the PPT set
/// along the in-plane direction at `angle`, by bracketing and bisection on
/// the full minimal eigenvalues. Zero when the origin is not in the interior.
pub fn radial_boundary(spec: &SectionSpec, angle: f64, tol: &Tolerances) -> Result<f64> {
    let (s, c) = angle.sin_cos();
    let dims = spec.dims();
    let f = |r: f64| -> Result<f64> {
        let tau = spec.point(r * c, r * s);
        let pt = partial_transpose(&tau, dims)?;
        Ok(tau.min_eigenvalue()?.min(pt.min_eigenvalue()?))
    };
    if f(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1e-3);
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > X_MAX {
            return Err(Error::Unbounded(X_MAX));
        }
    }
    while hi - lo > tol.bisect {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest [`radial_boundary`] over `rays` equally spaced angles.
pub fn ppt_reach(spec: &SectionSpec, rays: usize, tol: &Tolerances) -> Result<f64> {
    (0..rays.max(1))
        .map(|k| radial_boundary(spec, TAU * k as f64 / rays.max(1) as f64, tol))
        .try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}
