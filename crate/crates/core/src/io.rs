//! File formats: matrix and trace JSON, section, boundary and survey CSV.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bipartite::{BipartiteDims, DensityMatrix};
use crate::error::{Error, Result};
use crate::extremality::{ExtremalityReport, Verdict};
use crate::hermitian::{HermitianMatrix, Tolerances, C64};
use crate::search::{RankSurvey, SearchTrace};
use crate::sections::{BoundaryPoint, SectionSample};

/// Largest |re − reᵀ| or |im + imᵀ| accepted on load.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// A bipartite matrix as separate real and imaginary row-major arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &HermitianMatrix, dims: BipartiteDims) -> Self {
        let n = m.dim();
        let rows = |f: &dyn Fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(m.get(i, j))).collect())
                .collect()
        };
        MatrixFile {
            dims: [dims.n_a(), dims.n_b()],
            re: rows(&|z| z.re),
            im: rows(&|z| z.im),
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        MatrixFile::from_matrix(rho.matrix(), rho.dims())
    }

    pub fn bipartite_dims(&self) -> Result<BipartiteDims> {
        BipartiteDims::new(self.dims[0], self.dims[1])
    }

    /// Checks shapes and Hermiticity, then symmetrizes.
    pub fn to_matrix(&self) -> Result<(HermitianMatrix, BipartiteDims)> {
        let dims = self.bipartite_dims()?;
        let n = dims.n();
        for (name, a) in [("re", &self.re), ("im", &self.im)] {
            if a.len() != n || a.iter().any(|row| row.len() != n) {
                return Err(Error::MatrixFile(format!(
                    "{name} must be a {n}x{n} array for dims {dims}"
                )));
            }
        }
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((self.re[i][j] - self.re[j][i]).abs());
                dev = dev.max((self.im[i][j] + self.im[j][i]).abs());
            }
        }
        if !dev.is_finite() || dev > HERMITICITY_TOL {
            return Err(Error::MatrixFile(format!(
                "matrix is not Hermitian (deviation {dev:e})"
            )));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        Ok((HermitianMatrix::new(m)?, dims))
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        let (m, dims) = self.to_matrix()?;
        DensityMatrix::new(m, dims, tol)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        MatrixFile::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

/// Serializable summary of an [`ExtremalityReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub n: usize,
    pub m: usize,
    pub b_rank: usize,
    pub verdict: Verdict,
    /// 1 − λ for the largest eigenvalue λ of P Q̄ P below the unit cluster.
    pub spectrum_gap: Option<f64>,
    pub largest_below_cluster: Option<f64>,
    /// Eigenvalues of P Q̄ P on the image subspace, descending.
    pub spectrum: Vec<f64>,
}

impl From<&ExtremalityReport> for ReportRecord {
    fn from(r: &ExtremalityReport) -> Self {
        ReportRecord {
            n: r.n,
            m: r.m,
            b_rank: r.b_rank,
            verdict: r.verdict,
            spectrum_gap: r.spectrum_gap,
            largest_below_cluster: r.largest_below_cluster(),
            spectrum: r.spectrum.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub seed: u64,
    pub dims: [usize; 2],
    pub rank_pairs: Vec<[usize; 2]>,
    pub step_sizes: Vec<f64>,
    pub states: Vec<MatrixFile>,
    pub terminal: MatrixFile,
    pub report: ReportRecord,
}

impl From<&SearchTrace> for TraceRecord {
    fn from(t: &SearchTrace) -> Self {
        let dims = t.terminal().dims();
        TraceRecord {
            seed: t.seed,
            dims: [dims.n_a(), dims.n_b()],
            rank_pairs: t.rank_pairs.iter().map(|&(n, m)| [n, m]).collect(),
            step_sizes: t.step_sizes.clone(),
            states: t.states.iter().map(MatrixFile::from_state).collect(),
            terminal: MatrixFile::from_state(t.terminal()),
            report: (&t.final_report).into(),
        }
    }
}

impl TraceRecord {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// ρ_{K−1}, the last non-extreme state of the recorded search.
    pub fn penultimate(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        let k = self.states.len();
        if k < 2 {
            return Err(Error::InvalidParameter(
                "trace has a single state, so there is no penultimate face".into(),
            ));
        }
        self.states[k - 2].to_state(tol)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SECTION_HEADER: &str = "x,y,min_eig_rho,min_eig_rho_pt,region";

pub fn section_csv(samples: &[SectionSample]) -> String {
    let mut out = String::from(SECTION_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(s.x),
            num(s.y),
            num(s.min_eig_rho),
            num(s.min_eig_rho_pt),
            s.region
        );
    }
    out
}

/// Parses section CSV as written by [`section_csv`].
pub fn parse_section_csv(text: &str) -> Result<Vec<SectionSample>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SECTION_HEADER) {
        return Err(Error::InvalidParameter("missing section CSV header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::InvalidParameter(format!("bad section row {line:?}")));
            }
            let p = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number {s:?}")))
            };
            Ok(SectionSample {
                x: p(f[0])?,
                y: p(f[1])?,
                min_eig_rho: p(f[2])?,
                min_eig_rho_pt: p(f[3])?,
                region: f[4].parse()?,
            })
        })
        .collect()
}

pub const BOUNDARY_HEADER: &str = "angle,radius,x,y,n,m,b_rank,verdict";

pub fn boundary_csv(points: &[BoundaryPoint]) -> String {
    let mut out = String::from(BOUNDARY_HEADER);
    out.push('\n');
    for b in points {
        let verdict = match b.verdict {
            Verdict::Extreme => "extreme",
            Verdict::NotExtreme => "not_extreme",
            Verdict::Borderline => "borderline",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(b.angle),
            num(b.radius),
            num(b.x),
            num(b.y),
            b.n,
            b.m,
            b.b_rank,
            verdict
        );
    }
    out
}

pub const SURVEY_HEADER: &str = "n,m,count";

/// Histogram rows with n ≤ m, in increasing (n, m) order.
pub fn survey_csv(survey: &RankSurvey) -> String {
    let mut out = String::from(SURVEY_HEADER);
    out.push('\n');
    for ((n, m), count) in survey.histogram() {
        let _ = writeln!(out, "{n},{m},{count}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::horodecki_state;
    use crate::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrix_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dims = BipartiteDims::new(2, 3).unwrap();
        let h = random_hermitian(6, &mut rng);
        let f = MatrixFile::from_matrix(&h, dims);
        let back = MatrixFile::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let (m, d) = back.to_matrix().unwrap();
        assert_eq!(d, dims);
        assert_eq!(m, h);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_shapes() {
        let mut f = MatrixFile::from_state(&horodecki_state(0.42).unwrap().rho);
        f.im[0][1] = 1e-6;
        assert!(matches!(f.to_matrix(), Err(Error::MatrixFile(_))));
        let mut g = MatrixFile::from_state(&horodecki_state(0.42).unwrap().rho);
        g.re.pop();
        assert!(g.to_matrix().is_err());
        let mut h = MatrixFile::from_state(&horodecki_state(0.42).unwrap().rho);
        h.dims = [2, 2];
        assert!(h.to_matrix().is_err());
        assert!(MatrixFile::from_json("{\"dims\": [1]}").is_err());
    }

    #[test]
    fn state_validation_on_load() {
        let dims = BipartiteDims::new(1, 2).unwrap();
        let f = MatrixFile::from_matrix(&HermitianMatrix::from_diagonal(&[1.5, -0.5]), dims);
        assert!(f.to_state(&Tolerances::default()).is_err());
    }

    #[test]
    fn section_csv_round_trip() {
        let samples = vec![
            SectionSample {
                x: -0.1,
                y: 1.0 / 3.0,
                min_eig_rho: 1e-17,
                min_eig_rho_pt: -0.25,
                region: crate::sections::Region::NotPpt,
            },
            SectionSample {
                x: 0.0,
                y: 0.0,
                min_eig_rho: 0.1111111111111111,
                min_eig_rho_pt: 0.1111111111111111,
                region: crate::sections::Region::Ppt,
            },
        ];
        let csv = section_csv(&samples);
        assert!(csv.starts_with("x,y,min_eig_rho,min_eig_rho_pt,region\n"));
        assert!(csv.contains("3.3333333333333331e-1"));
        assert_eq!(parse_section_csv(&csv).unwrap(), samples);
    }
}
