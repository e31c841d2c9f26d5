//! Browser bindings. Every entry point returns a JSON string; errors are
//! thrown as JavaScript strings.

use peres::catalog;
use peres::io::{MatrixFile, ReportRecord};
use peres::sections::ppt_reach;
use peres::{
    face_section, sample_section, test_extremality, BipartiteDims, DensityMatrix, Extent,
    FacePlane, FaceSectionConfig, Region, SectionSample, SectionSpec, Tolerances,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest grid side accepted from the page.
pub const MAX_GRID: usize = 201;

/// A catalog identifier such as `upb-tiles`, or matrix JSON.
pub fn parse_state(text: &str, tol: &Tolerances) -> Result<DensityMatrix, String> {
    let text = text.trim();
    if text.starts_with('{') {
        let file = MatrixFile::from_json(text).map_err(|e| e.to_string())?;
        file.to_state(tol).map_err(|e| e.to_string())
    } else {
        catalog::by_name(text)
            .map(|s| s.rho)
            .map_err(|e| e.to_string())
    }
}

fn parse_dims(text: &str) -> Result<BipartiteDims, String> {
    text.trim().parse().map_err(|e: peres::Error| e.to_string())
}

fn check_grid(grid: usize) -> Result<(usize, usize), String> {
    if (2..=MAX_GRID).contains(&grid) {
        Ok((grid, grid))
    } else {
        Err(format!("grid must be between 2 and {MAX_GRID}"))
    }
}

pub fn test_extreme_json(state: &str) -> Result<Value, String> {
    let tol = Tolerances::default();
    let rho = parse_state(state, &tol)?;
    let report = test_extremality(&rho, &tol).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(ReportRecord::from(&report)).map_err(|e| e.to_string())?;
    v["ppt"] = json!(rho.is_ppt(&tol).map_err(|e| e.to_string())?);
    Ok(v)
}

pub fn find_extreme_json(dims: &str, seed: u32) -> Result<Value, String> {
    let tol = Tolerances::default();
    let start = DensityMatrix::maximally_mixed(parse_dims(dims)?);
    let trace = peres::find_extreme(&start, seed as u64, &tol).map_err(|e| e.to_string())?;
    Ok(json!({
        "rank_pairs": trace.rank_pairs,
        "step_sizes": trace.step_sizes,
        "report": ReportRecord::from(&trace.final_report),
        "terminal": MatrixFile::from_state(trace.terminal()),
    }))
}

fn region_code(r: Region) -> u8 {
    match r {
        Region::NotPsd => 0,
        Region::Ppt => 1,
        Region::NotPpt => 2,
    }
}

fn samples_json(spec: &SectionSpec, samples: &[SectionSample]) -> Value {
    let e = spec.extent();
    json!({
        "grid": [spec.grid().0, spec.grid().1],
        "extent": [e.x_min, e.x_max, e.y_min, e.y_max],
        "region": samples.iter().map(|s| region_code(s.region)).collect::<Vec<_>>(),
        "level": samples.iter().map(|s| s.min_eig_rho.min(s.min_eig_rho_pt)).collect::<Vec<_>>(),
    })
}

/// Random plane through a state, sized to twice its reach inside the PPT set.
pub fn state_section_json(state: &str, seed: u32, grid: usize) -> Result<Value, String> {
    let tol = Tolerances::default();
    let rho = parse_state(state, &tol)?;
    let spec = SectionSpec::random(
        &rho,
        seed as u64,
        check_grid(grid)?,
        Extent::symmetric(1.0).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let reach = ppt_reach(&spec, 16, &tol).map_err(|e| e.to_string())?;
    let r = if reach > 0.0 { 2.0 * reach } else { 0.5 };
    let spec = spec.with_extent(Extent::symmetric(r).map_err(|e| e.to_string())?);
    let samples = sample_section(&spec, &tol).map_err(|e| e.to_string())?;
    let mut v = samples_json(&spec, &samples);
    v["boundary"] = json!([]);
    Ok(v)
}

/// Runs a search and cuts the face of its last non-extreme state with a
/// plane that crosses two families of extreme points where possible.
pub fn face_section_json(dims: &str, seed: u32, grid: usize, rays: usize) -> Result<Value, String> {
    let tol = Tolerances::default();
    let start = DensityMatrix::maximally_mixed(parse_dims(dims)?);
    let trace = peres::find_extreme(&start, seed as u64, &tol).map_err(|e| e.to_string())?;
    let pen = trace
        .penultimate()
        .ok_or("the search started at an extreme point")?;
    let report = test_extremality(pen, &tol).map_err(|e| e.to_string())?;
    let config = FaceSectionConfig {
        seed: seed as u64,
        grid: check_grid(grid)?,
        rays: rays.clamp(8, 720),
        extent: None,
        plane: FacePlane::Contrasting(64),
    };
    let section = face_section(pen, &report, &config, &tol).map_err(|e| e.to_string())?;
    let mut v = samples_json(&section.spec, &section.samples);
    v["face"] = json!({ "n": report.n, "m": report.m, "b_rank": report.b_rank });
    v["boundary"] = section
        .boundary
        .iter()
        .map(|b| json!({ "x": b.x, "y": b.y, "n": b.n, "m": b.m, "verdict": b.verdict }))
        .collect();
    Ok(v)
}

fn finish(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn test_extreme(state: &str) -> Result<String, JsValue> {
    finish(test_extreme_json(state))
}

#[wasm_bindgen]
pub fn find_extreme(dims: &str, seed: u32) -> Result<String, JsValue> {
    finish(find_extreme_json(dims, seed))
}

/// `kind` is `"state"` (random plane through a state) or `"face"` (face of
/// a fresh search in dimensions `source`).
#[wasm_bindgen]
pub fn scan_section(kind: &str, source: &str, seed: u32, grid: usize) -> Result<String, JsValue> {
    finish(match kind {
        "state" => state_section_json(source, seed, grid),
        "face" => face_section_json(source, seed, grid, 180),
        other => Err(format!("unknown section kind {other:?}")),
    })
}
