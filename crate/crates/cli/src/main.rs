//! `peres`: experiments on extreme points of the PPT set.
//!
//! Exit codes: 0 success or extreme, 1 not extreme, 2 borderline spectrum,
//! 64 usage error, 65 invalid input data, 70 numerical failure, 74 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use peres::catalog;
use peres::io::{boundary_csv, section_csv, survey_csv, MatrixFile, ReportRecord, TraceRecord};
use peres::sections::ppt_reach;
use peres::{
    face_section, find_extreme, rank_survey, sample_section, test_extremality, BipartiteDims,
    DensityMatrix, Error, Extent, FacePlane, FaceSectionConfig, SectionSpec, Tolerances, Verdict,
};

const EXIT_NOT_EXTREME: u8 = 1;
const EXIT_BORDERLINE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "peres",
    version,
    about = "Extreme points of the set of PPT density matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random descent from a PPT state to an extreme point; writes the trace as JSON.
    FindExtreme(FindArgs),
    /// Extremality test of a state; exit 0 extreme, 1 not extreme, 2 borderline.
    TestExtreme(TestArgs),
    /// Histogram of terminal rank pairs of searches from the maximally mixed state (CSV).
    RankSurvey(SurveyArgs),
    /// Samples a two-dimensional section and classifies points (CSV).
    ScanSection(ScanArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for all randomness of this invocation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "X")]
    tol_zero_eig: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_one_eig: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_recon: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_orth: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_bisect: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl Common {
    fn tolerances(&self) -> peres::Result<Tolerances> {
        let mut t = Tolerances::default();
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.zero_eig, self.tol_zero_eig);
        set(&mut t.one_eig, self.tol_one_eig);
        set(&mut t.recon, self.tol_recon);
        set(&mut t.orth, self.tol_orth);
        set(&mut t.bisect, self.tol_bisect);
        t.validate()?;
        Ok(t)
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        write_output(self.out.as_deref(), text)
    }
}

#[derive(Args, Debug)]
struct FindArgs {
    /// Start from the maximally mixed state of these dimensions.
    #[arg(long, value_name = "AxB", conflicts_with = "state")]
    dims: Option<BipartiteDims>,
    /// Start state: catalog name or path to a matrix JSON file.
    #[arg(long, value_name = "NAME|PATH")]
    state: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TestArgs {
    /// Catalog name or path to a matrix JSON file.
    #[arg(long, value_name = "NAME|PATH")]
    state: String,
    /// Print the full report as JSON instead of key: value lines.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SurveyArgs {
    #[arg(long, value_name = "AxB")]
    dims: BipartiteDims,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Origin of a random section: catalog name or matrix file.
    #[arg(long, value_name = "NAME|PATH", conflicts_with_all = ["through", "face_of"])]
    state: Option<String>,
    /// Origin of a random section: the maximally mixed state.
    #[arg(long, value_name = "AxB", conflicts_with_all = ["state", "through", "face_of"])]
    dims: Option<BipartiteDims>,
    /// Plane through two states, origin at the first.
    #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "face_of")]
    through: Option<Vec<String>>,
    /// Section through the face of the penultimate state of a recorded trace.
    #[arg(long, value_name = "TRACE")]
    face_of: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long, value_name = "NXxNY", default_value = "41x41", value_parser = parse_grid)]
    grid: (usize, usize),
    #[arg(long, value_name = "x0,x1,y0,y1", value_parser = parse_extent, allow_hyphen_values = true)]
    extent: Option<Extent>,
    /// Radial boundary directions for --face-of.
    #[arg(long, default_value_t = 72)]
    rays: usize,
    /// For --face-of: use two independent random face directions instead of
    /// redrawing the second until it meets a different rank family.
    #[arg(long)]
    random_plane: bool,
    /// For --face-of: CSV of radially located boundary points.
    #[arg(long, value_name = "PATH")]
    boundary_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (nx, ny) = (p(a)?, p(b)?);
    if nx == 0 || ny == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok((nx, ny))
}

fn parse_extent(s: &str) -> Result<Extent, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!(
            "expected four numbers x0,x1,y0,y1, got {}",
            v.len()
        ));
    }
    Extent::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// A catalog identifier, or a path to a matrix JSON file when one exists.
fn load_state(spec: &str, tol: &Tolerances) -> anyhow::Result<DensityMatrix> {
    let path = Path::new(spec);
    if path.is_file() {
        let file = MatrixFile::load(path).with_context(|| format!("reading {spec}"))?;
        return Ok(file.to_state(tol)?);
    }
    if spec.ends_with(".json") {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{spec}: no such file"),
        ))
        .into());
    }
    Ok(catalog::by_name(spec)?.rho)
}

fn find_extreme_cmd(args: &FindArgs) -> anyhow::Result<u8> {
    let tol = args.common.tolerances()?;
    let start = match (&args.dims, &args.state) {
        (_, Some(s)) => load_state(s, &tol)?,
        (Some(d), None) => DensityMatrix::maximally_mixed(*d),
        (None, None) => bail!(Usage("find-extreme needs --dims or --state".into())),
    };
    let trace = match find_extreme(&start, args.common.seed, &tol) {
        Err(Error::Borderline { eigenvalue }) => {
            eprintln!("borderline spectrum: eigenvalue {eigenvalue} just below the unit threshold");
            return Ok(EXIT_BORDERLINE);
        }
        r => r?,
    };
    let record = TraceRecord::from(&trace);
    args.common.emit(&(record.to_json() + "\n"))?;
    let r = &trace.final_report;
    eprintln!(
        "rank pairs {:?}; extreme point ({}, {}) after {} steps",
        trace.rank_pairs,
        r.n,
        r.m,
        trace.step_sizes.len()
    );
    Ok(0)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v:e}"))
}

fn test_extreme_cmd(args: &TestArgs) -> anyhow::Result<u8> {
    let tol = args.common.tolerances()?;
    let rho = load_state(&args.state, &tol)?;
    let report = test_extremality(&rho, &tol)?;
    let record = ReportRecord::from(&report);
    let text = if args.json {
        serde_json::to_string_pretty(&record)? + "\n"
    } else {
        let verdict = serde_json::to_value(record.verdict)?;
        format!(
            "n: {}\nm: {}\nb_rank: {}\nspectrum_gap: {}\nlargest_below_cluster: {}\nverdict: {}\n",
            record.n,
            record.m,
            record.b_rank,
            fmt_opt(record.spectrum_gap),
            fmt_opt(record.largest_below_cluster),
            verdict.as_str().unwrap_or_default()
        )
    };
    args.common.emit(&text)?;
    Ok(match report.verdict {
        Verdict::Extreme => 0,
        Verdict::NotExtreme => EXIT_NOT_EXTREME,
        Verdict::Borderline => EXIT_BORDERLINE,
    })
}

fn rank_survey_cmd(args: &SurveyArgs) -> anyhow::Result<u8> {
    let tol = args.common.tolerances()?;
    let survey = match rank_survey(args.dims, args.runs, args.common.seed, &tol) {
        Err(Error::Borderline { eigenvalue }) => {
            eprintln!("borderline spectrum in a run: eigenvalue {eigenvalue}");
            return Ok(EXIT_BORDERLINE);
        }
        r => r?,
    };
    args.common.emit(&survey_csv(&survey))?;
    Ok(0)
}

fn scan_section_cmd(args: &ScanArgs) -> anyhow::Result<u8> {
    let tol = args.common.tolerances()?;
    let seed = args.common.seed;
    if args.boundary_out.is_some() && args.face_of.is_none() {
        bail!(Usage("--boundary-out requires --face-of".into()));
    }
    let samples = if let Some(path) = &args.face_of {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let record = TraceRecord::from_json(&text)?;
        let rho = record.penultimate(&tol)?;
        let report = test_extremality(&rho, &tol)?;
        let config = FaceSectionConfig {
            seed,
            grid: args.grid,
            rays: args.rays,
            extent: args.extent,
            plane: if args.random_plane {
                FacePlane::Random
            } else {
                FacePlane::Contrasting(64)
            },
        };
        let fs = face_section(&rho, &report, &config, &tol)?;
        if let Some(b) = &args.boundary_out {
            write_output(Some(b), &boundary_csv(&fs.boundary))?;
        }
        fs.samples
    } else {
        let spec = if let Some(pair) = &args.through {
            let a = load_state(&pair[0], &tol)?;
            let b = load_state(&pair[1], &tol)?;
            SectionSpec::through(&a, &b, seed, args.grid, args.extent)?
        } else {
            let origin = match (&args.state, &args.dims) {
                (Some(s), _) => load_state(s, &tol)?,
                (None, Some(d)) => DensityMatrix::maximally_mixed(*d),
                (None, None) => bail!(Usage(
                    "scan-section needs --state, --dims, --through or --face-of".into()
                )),
            };
            let spec = SectionSpec::random(&origin, seed, args.grid, Extent::symmetric(1.0)?)?;
            match args.extent {
                Some(e) => spec.with_extent(e),
                None => {
                    let reach = ppt_reach(&spec, 16, &tol)?;
                    let r = if reach > 0.0 { 2.0 * reach } else { 0.5 };
                    spec.with_extent(Extent::symmetric(r)?)
                }
            }
        };
        sample_section(&spec, &tol)?
    };
    args.common.emit(&section_csv(&samples))?;
    Ok(0)
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Io(_)) => EXIT_IO,
        Some(
            Error::EigenNoConvergence(_)
            | Error::NoDirection
            | Error::Unbounded(_)
            | Error::NoRankDrop { .. }
            | Error::IterationCap(_)
            | Error::Internal(_),
        ) => EXIT_SOFTWARE,
        Some(Error::InvalidTolerances(_) | Error::InvalidParameter(_) | Error::InvalidDims(_)) => {
            EXIT_USAGE
        }
        Some(_) => EXIT_DATA,
        None => EXIT_SOFTWARE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::FindExtreme(a) => find_extreme_cmd(a),
        Command::TestExtreme(a) => test_extreme_cmd(a),
        Command::RankSurvey(a) => rank_survey_cmd(a),
        Command::ScanSection(a) => scan_section_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
