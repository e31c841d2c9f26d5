//! Random descent to extreme points.
//!
//! From a PPT state ρ_k the search picks a random traceless direction σ in
//! the face of ρ_k, moves along ρ_k + xσ until ρ or ρᴾ acquires a new zero
//! eigenvalue, and repeats from the boundary point. The rank sum n_k + m_k
//! drops at every step, so an extreme point is reached after at most
//! n_1 + m_1 steps.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipartite::{BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::extremality::{test_extremality, ExtremalityReport, Verdict};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};
use crate::random::derive_seed;

/// Safety cap on |x| during bracketing.
pub const X_MAX: f64 = 1e6;

const INITIAL_BRACKET: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random_bool(0.5) {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }
}

/// σ − Tr(σ) ρ: removes the trace while staying inside the face of ρ.
pub fn traceless_direction(sigma: &HermitianMatrix, rho: &DensityMatrix) -> HermitianMatrix {
    sigma - &rho.matrix().scale(sigma.trace())
}

/// Random unit-norm traceless direction inside the face described by
/// `report`.
pub fn random_face_direction<R: Rng + ?Sized>(
    report: &ExtremalityReport,
    rho: &DensityMatrix,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if report.b_rank < 2 {
        return Err(Error::NoDirection);
    }
    for _ in 0..8 {
        let sigma = traceless_direction(&report.face.random_element(rng), rho);
        let norm = sigma.frobenius_norm();
        if norm > 1e-12 {
            return Ok(sigma.scale(1.0 / norm));
        }
    }
    Err(Error::Internal(
        "face direction vanished after removing the trace".into(),
    ))
}

/// min(λ_min(V†(ρ + xσ)V), λ_min(W†(ρ + xσ)ᴾW)) with V, W the image
/// vectors of ρ and ρᴾ. Kernel directions are excluded: for σ inside the
/// face they stay exactly zero along the whole line.
struct BoundaryFunction {
    rho_c: HermitianMatrix,
    sigma_c: HermitianMatrix,
    rho_pt_c: HermitianMatrix,
    sigma_pt_c: HermitianMatrix,
}

impl BoundaryFunction {
    fn new(rho: &DensityMatrix, sigma: &HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let dims = rho.dims();
        let image = rho.matrix().spectral_decompose()?.image_vectors(tol);
        let rho_pt = rho.partial_transpose();
        let image_pt = rho_pt.spectral_decompose()?.image_vectors(tol);
        let sigma_pt = crate::bipartite::partial_transpose(sigma, dims)?;
        Ok(BoundaryFunction {
            rho_c: rho.matrix().compress(&image),
            sigma_c: sigma.compress(&image),
            rho_pt_c: rho_pt.compress(&image_pt),
            sigma_pt_c: sigma_pt.compress(&image_pt),
        })
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let a = (&self.rho_c + &self.sigma_c.scale(x)).min_eigenvalue()?;
        let b = (&self.rho_pt_c + &self.sigma_pt_c.scale(x)).min_eigenvalue()?;
        Ok(a.min(b))
    }
}

/// Removes the numerical residue of eigenvalues that reached zero: clips
/// |λ| ≤ zero_eig · max|λ| to 0 and restores unit trace.
fn clean_state(
    tau: HermitianMatrix,
    dims: BipartiteDims,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let sd = tau.spectral_decompose()?;
    let scale = sd.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cut = tol.zero_eig * scale;
    if sd.min_eigenvalue() < -cut.max(tol.zero_eig) {
        return Err(Error::NotPsd {
            min_eigenvalue: sd.min_eigenvalue(),
        });
    }
    let kept: Vec<usize> = (0..sd.dim()).filter(|&k| sd.eigenvalues[k] > cut).collect();
    let total: f64 = kept.iter().map(|&k| sd.eigenvalues[k]).sum();
    let n = sd.dim();
    let scaled = DMatrix::from_fn(n, kept.len(), |i, j| {
        sd.eigenvectors[(i, kept[j])] * C64::new(sd.eigenvalues[kept[j]] / total, 0.0)
    });
    let vecs = DMatrix::from_fn(n, kept.len(), |i, j| sd.eigenvectors[(i, kept[j])]);
    let mat = HermitianMatrix::new(scaled * vecs.adjoint())?;
    Ok(DensityMatrix::from_parts_unchecked(mat, dims))
}

/// Walks from ρ along ±σ to the first point where ρ + xσ or its partial
/// transpose gains a zero eigenvalue. Returns the cleaned boundary state and
/// the signed step x*.
///
/// Bracketing doubles |x| until the boundary function turns negative, then
/// bisects down to `tol.bisect`; x* is the feasible end of the final
/// bracket.
pub fn line_search_to_boundary(
    rho: &DensityMatrix,
    sigma: &HermitianMatrix,
    direction: Direction,
    tol: &Tolerances,
) -> Result<(DensityMatrix, f64)> {
    let x = boundary_distance(rho, sigma, direction, tol)?;
    let tau = rho.matrix() + &sigma.scale(x);
    Ok((clean_state(tau, rho.dims(), tol)?, x))
}

/// The signed step x* of [`line_search_to_boundary`] without building the
/// boundary state.
pub fn boundary_distance(
    rho: &DensityMatrix,
    sigma: &HermitianMatrix,
    direction: Direction,
    tol: &Tolerances,
) -> Result<f64> {
    if sigma.dim() != rho.dims().n() {
        return Err(Error::DimensionMismatch {
            expected: rho.dims().n(),
            actual: sigma.dim(),
        });
    }
    let s = direction.sign();
    let f = BoundaryFunction::new(rho, sigma, tol)?;
    let mut lo = 0.0;
    let mut hi = INITIAL_BRACKET;
    while f.eval(s * hi)? >= 0.0 {
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
        if f.eval(s * mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(s * lo)
}

/// The sequence ρ_1, …, ρ_K of one search.
#[derive(Clone, Debug)]
pub struct SearchTrace {
    pub seed: u64,
    pub states: Vec<DensityMatrix>,
    pub rank_pairs: Vec<(usize, usize)>,
    /// Signed step x chosen at each iteration (one fewer than states).
    pub step_sizes: Vec<f64>,
    pub final_report: ExtremalityReport,
}

impl SearchTrace {
    pub fn iterations(&self) -> usize {
        self.states.len()
    }

    pub fn terminal(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("a trace holds at least the start state")
    }

    /// ρ_{K−1}, the last state that was not extreme.
    pub fn penultimate(&self) -> Option<&DensityMatrix> {
        self.states.len().checked_sub(2).map(|k| &self.states[k])
    }
}

/// Searches for an extreme point of the PPT set starting from `rho_start`.
pub fn find_extreme(rho_start: &DensityMatrix, seed: u64, tol: &Tolerances) -> Result<SearchTrace> {
    tol.validate()?;
    rho_start.ensure_ppt(tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = 4 * rho_start.dims().n();

    let mut rho = rho_start.clone();
    let mut states = Vec::new();
    let mut rank_pairs = Vec::new();
    let mut step_sizes = Vec::new();

    loop {
        let report = test_extremality(&rho, tol)?;
        states.push(rho.clone());
        rank_pairs.push((report.n, report.m));
        match report.verdict {
            Verdict::Borderline => {
                return Err(Error::Borderline {
                    eigenvalue: report.largest_below_cluster().unwrap_or(f64::NAN),
                })
            }
            Verdict::Extreme => {
                return Ok(SearchTrace {
                    seed,
                    states,
                    rank_pairs,
                    step_sizes,
                    final_report: report,
                })
            }
            Verdict::NotExtreme => {}
        }
        if states.len() > cap {
            return Err(Error::IterationCap(cap));
        }
        let (next, x) = descend(&rho, &report, &mut rng, tol)?;
        step_sizes.push(x);
        rho = next;
    }
}

/// One step to a boundary point of strictly lower rank sum, retrying once
/// with a fresh direction if numerical noise prevents a rank drop.
fn descend<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    report: &ExtremalityReport,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<(DensityMatrix, f64)> {
    let (n, m) = (report.n, report.m);
    let mut last = (n, m);
    for _ in 0..2 {
        let sigma = random_face_direction(report, rho, rng)?;
        let direction = Direction::random(rng);
        let (next, x) = line_search_to_boundary(rho, &sigma, direction, tol)?;
        let (n2, m2) = next.rank_pair(tol)?;
        if n2 <= n && m2 <= m && n2 + m2 < n + m {
            return Ok((next, x));
        }
        last = (n2, m2);
    }
    Err(Error::NoRankDrop {
        n,
        m,
        new_n: last.0,
        new_m: last.1,
    })
}

/// Rank pair with the smaller rank first.
pub fn canonical_pair((n, m): (usize, usize)) -> (usize, usize) {
    (n.min(m), n.max(m))
}

/// Outcome of one search in a survey.
#[derive(Clone, Debug)]
pub struct SurveyRun {
    pub index: usize,
    pub seed: u64,
    pub rank_pair: (usize, usize),
    pub b_rank: usize,
    pub iterations: usize,
    pub terminal: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct RankSurvey {
    pub dims: BipartiteDims,
    pub seed: u64,
    pub runs: Vec<SurveyRun>,
}

impl RankSurvey {
    /// Counts of unordered terminal rank pairs (n ≤ m).
    pub fn histogram(&self) -> BTreeMap<(usize, usize), usize> {
        let mut h = BTreeMap::new();
        for r in &self.runs {
            *h.entry(canonical_pair(r.rank_pair)).or_insert(0) += 1;
        }
        h
    }
}

/// Runs `num_runs` searches from the maximally mixed state. Run i uses the
/// seed `derive_seed(seed, i)`, so results do not depend on scheduling.
pub fn rank_survey(
    dims: BipartiteDims,
    num_runs: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<RankSurvey> {
    if num_runs == 0 {
        return Err(Error::InvalidParameter(
            "num_runs must be at least 1".into(),
        ));
    }
    let start = DensityMatrix::maximally_mixed(dims);
    let one = |index: usize| -> Result<SurveyRun> {
        let run_seed = derive_seed(seed, index as u64);
        let trace = find_extreme(&start, run_seed, tol)?;
        Ok(SurveyRun {
            index,
            seed: run_seed,
            rank_pair: (trace.final_report.n, trace.final_report.m),
            b_rank: trace.final_report.b_rank,
            iterations: trace.iterations(),
            terminal: trace.terminal().clone(),
        })
    };
    #[cfg(feature = "parallel")]
    let runs: Result<Vec<SurveyRun>> = {
        use rayon::prelude::*;
        (0..num_runs).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Result<Vec<SurveyRun>> = (0..num_runs).map(one).collect();
    Ok(RankSurvey {
        dims,
        seed,
        runs: runs?,
    })
}

/// ρ = w·first + (1 − w)·second with both endpoints extreme and on a line
/// through ρ inside its face.
#[derive(Clone, Debug)]
pub struct FaceDecomposition {
    pub first: DensityMatrix,
    pub second: DensityMatrix,
    pub weight: f64,
    pub direction: HermitianMatrix,
    pub first_report: ExtremalityReport,
    pub second_report: ExtremalityReport,
    pub attempts: usize,
}

impl FaceDecomposition {
    /// ‖w·first + (1 − w)·second − ρ‖_F.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        let combo = &self.first.matrix().scale(self.weight)
            + &self.second.matrix().scale(1.0 - self.weight);
        (&combo - rho.matrix()).frobenius_norm()
    }
}

/// Writes a non-extreme PPT state as a convex combination of two extreme
/// points: picks random face directions until both boundary points of the
/// line through ρ are extreme.
pub fn decompose_along_face(
    rho: &DensityMatrix,
    seed: u64,
    max_attempts: usize,
    tol: &Tolerances,
) -> Result<FaceDecomposition> {
    let report = test_extremality(rho, tol)?;
    if report.verdict != Verdict::NotExtreme {
        return Err(Error::InvalidParameter(format!(
            "state is not decomposable along its face (verdict {:?})",
            report.verdict
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let sigma = random_face_direction(&report, rho, &mut rng)?;
        let (first, x_plus) = line_search_to_boundary(rho, &sigma, Direction::Forward, tol)?;
        let (second, x_minus) = line_search_to_boundary(rho, &sigma, Direction::Backward, tol)?;
        let first_report = test_extremality(&first, tol)?;
        let second_report = test_extremality(&second, tol)?;
        if first_report.is_extreme() && second_report.is_extreme() {
            // ρ = (|x−| first + x+ second) / (x+ + |x−|)
            let weight = -x_minus / (x_plus - x_minus);
            return Ok(FaceDecomposition {
                first,
                second,
                weight,
                direction: sigma,
                first_report,
                second_report,
                attempts: attempt,
            });
        }
    }
    Err(Error::Internal(format!(
        "no face direction with two extreme endpoints in {max_attempts} attempts"
    )))
}
