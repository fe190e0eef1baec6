//! Browser bindings for the demo page. Each operation has a plain Rust
//! function returning a JSON string, so it can be tested natively, and a
//! thin `#[wasm_bindgen]` wrapper that turns errors into JS exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use melodic_measure::distribution::SpacingLabConfig;
use melodic_measure::{
    combined_distribution, decompose, distribution_check, energy_sweep, m_value, spacing_lab, wigner_surmise_pdf, Beta,
    EnergyLevel, Grouping, MeasureConfig, Parallelism, Piece, SearchConfig, DEFAULT_SIGNATURE,
};

/// Points sampled on the surmise curve, over `0..=SURMISE_RANGE` mean
/// spacings.
const SURMISE_POINTS: usize = 121;
const SURMISE_RANGE: f64 = 3.0;

fn grouping(name: &str) -> Result<Grouping, String> {
    match name {
        "" | "runs" => Ok(Grouping::SignRuns),
        "global" => Ok(Grouping::GlobalSign),
        other => Err(format!("unknown grouping {other:?}; use \"runs\" or \"global\"")),
    }
}

fn measure(grouping_name: &str) -> Result<MeasureConfig, String> {
    Ok(MeasureConfig { grouping: grouping(grouping_name)?, ..MeasureConfig::default() })
}

fn parse_frequencies(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("{s:?} is not a number")))
        .collect()
}

fn to_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize")
}

/// Scores a comma- or space-separated list of frequencies and reports its
/// levels and cluster check.
pub fn score_json(frequencies: &str, grouping_name: &str) -> Result<String, String> {
    let measure = measure(grouping_name)?;
    let piece = Piece::new("input", parse_frequencies(frequencies)?).map_err(|e| e.to_string())?;
    let score = m_value(&piece, measure).map_err(|e| e.to_string())?;
    let dec = decompose(&piece, measure.grouping);
    let check = distribution_check(&dec, &DEFAULT_SIGNATURE).map_err(|e| e.to_string())?;
    Ok(to_string(&json!({
        "frequencies": piece.frequencies(),
        "decomposition": dec,
        "combined": combined_distribution(&dec).values,
        "check": check,
        "score": score,
    })))
}

/// Ranks every three-step pattern at an energy level.
pub fn sweep_json(level: f64, start: f64, grouping_name: &str) -> Result<String, String> {
    let config = SearchConfig {
        start_frequency: start,
        target_level: EnergyLevel(level),
        measure: measure(grouping_name)?,
        ..SearchConfig::default()
    };
    let report = energy_sweep(&config, Parallelism::Sequential).map_err(|e| e.to_string())?;
    let candidates: Vec<Value> = report
        .candidates
        .iter()
        .map(|c| {
            json!({
                "pattern": c.pattern,
                "frequencies": c.piece.as_ref().map(Piece::frequencies),
                "m": c.m(),
                "passed": c.passed_filter,
                "rank": c.rank,
                "class_rank": c.class_rank,
            })
        })
        .collect();
    Ok(to_string(&json!({
        "level": level,
        "enumerated": report.enumerated,
        "passing": report.passing,
        "candidates": candidates,
    })))
}

/// Ranks fixed-sum spacing multisets and samples the surmise density.
pub fn spacing_json(count: usize, sum: f64, beta: u8) -> Result<String, String> {
    let beta = Beta::try_from(beta).map_err(|e| e.to_string())?;
    let lab = spacing_lab(&SpacingLabConfig { beta, ..SpacingLabConfig::new(count, sum) }).map_err(|e| e.to_string())?;
    let curve: Vec<[f64; 2]> = (0..SURMISE_POINTS)
        .map(|i| {
            let s = SURMISE_RANGE * i as f64 / (SURMISE_POINTS - 1) as f64;
            [s, wigner_surmise_pdf(s, beta).expect("beta validated")]
        })
        .collect();
    Ok(to_string(&json!({ "lab": lab, "mean": sum / count.max(1) as f64, "surmise": curve })))
}

#[wasm_bindgen]
pub fn score(frequencies: &str, grouping: &str) -> Result<String, JsValue> {
    score_json(frequencies, grouping).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep(level: f64, start: f64, grouping: &str) -> Result<String, JsValue> {
    sweep_json(level, start, grouping).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spacing(count: usize, sum: f64, beta: u8) -> Result<String, JsValue> {
    spacing_json(count, sum, beta).map_err(|e| JsValue::from_str(&e))
}
