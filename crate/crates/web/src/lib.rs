//! Browser bindings for the demo page in `www/`. Every exported function
//! takes plain strings and numbers and returns a JSON document.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mtm_core::counter::{count_motifs, WindowBound};
use mtm_core::generator::{generate, GenerationConfig};
use mtm_core::ingest::{parse_events, to_edge_list, TemporalGraph};
use mtm_core::metrics::{degree_samples, global_stats, iet_samples, ks_statistic, GlobalStats};
use mtm_core::sample::{messaging_stream, MessagingParams};
use mtm_core::transition::{extract_profile, TransitionProfile};

/// Longest edge list the page keeps for display.
const PREVIEW_LINES: usize = 200;

#[derive(Serialize)]
struct Transition {
    from: String,
    to: String,
    probability: f64,
    mean_gap: Option<f64>,
    count: u64,
}

#[derive(Serialize)]
struct ExtractSummary {
    events: usize,
    nodes: usize,
    cold_events: usize,
    cold_fraction: f64,
    transition_types: usize,
    mu: f64,
    stop_probability: f64,
    top_transitions: Vec<Transition>,
}

#[derive(Serialize)]
struct GenerateResult {
    original: GlobalStats,
    synthetic: GlobalStats,
    ks_in_degree: f64,
    ks_out_degree: f64,
    ks_iet: f64,
    /// Full synthetic edge list, for the spectrum comparison.
    edge_list: String,
    preview: String,
}

#[derive(Serialize)]
struct SpectrumRow {
    code: String,
    original: u64,
    synthetic: u64,
}

#[derive(Serialize)]
struct SpectrumComparison {
    l: usize,
    original_total: u64,
    synthetic_total: u64,
    rows: Vec<SpectrumRow>,
}

fn graph(text: &str) -> Result<TemporalGraph, String> {
    let g = parse_events(text).map_err(|e| e.to_string())?.graph;
    if g.is_empty() {
        return Err("the edge list has no events".into());
    }
    Ok(g)
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn sample_stream_text(nodes: u32, sessions: u32, days: u32, seed: u64) -> String {
    let params = MessagingParams {
        nodes: nodes.max(3) as u64,
        sessions: sessions as usize,
        horizon: days.max(1) as i64 * 86_400,
        ..Default::default()
    };
    to_edge_list(&messaging_stream(&params, seed))
}

fn profile_of(
    text: &str,
    delta: i64,
    l_max: usize,
) -> Result<(TemporalGraph, TransitionProfile), String> {
    let g = graph(text)?;
    let p = extract_profile(&g, delta, l_max).map_err(|e| e.to_string())?;
    Ok((g, p))
}

pub fn extract_summary_json(
    text: &str,
    delta: i64,
    l_max: usize,
    top: usize,
) -> Result<String, String> {
    let (g, p) = profile_of(text, delta, l_max)?;
    let mut transitions: Vec<Transition> = p
        .probs
        .iter()
        .flat_map(|(from, row)| {
            let p = &p;
            row.iter().map(move |(to, &probability)| {
                let key = mtm_core::TransitionKey::extension(from.clone(), to.clone());
                Transition {
                    from: from.to_string(),
                    to: to.to_string(),
                    probability,
                    mean_gap: p.rate(from, to).map(|r| 1.0 / r),
                    count: p.counts.get(&key).copied().unwrap_or(0),
                }
            })
        })
        .collect();
    transitions.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.to.cmp(&b.to)));
    transitions.truncate(top);
    json(&ExtractSummary {
        events: g.len(),
        nodes: g.node_count(),
        cold_events: p.cold_event_count,
        cold_fraction: p.cold_event_fraction(),
        transition_types: p.observed_transition_type_count(),
        mu: p.mu,
        stop_probability: p.stop_probability(&mtm_core::MotifCode::single()),
        top_transitions: transitions,
    })
}

pub fn generate_json(text: &str, delta: i64, l_max: usize, seed: u64) -> Result<String, String> {
    let (g, p) = profile_of(text, delta, l_max)?;
    let syn = generate(&p, &GenerationConfig::for_profile(&p, seed)).map_err(|e| e.to_string())?;
    let ks = |a: &[f64], b: &[f64]| ks_statistic(a, b).map_err(|e| e.to_string());
    let (oi, oo) = degree_samples(&g);
    let (si, so) = degree_samples(&syn);
    let edge_list = to_edge_list(&syn);
    let preview = edge_list
        .lines()
        .take(PREVIEW_LINES)
        .map(|l| format!("{l}\n"))
        .collect();
    json(&GenerateResult {
        original: global_stats(&g).map_err(|e| e.to_string())?,
        synthetic: global_stats(&syn).map_err(|e| e.to_string())?,
        ks_in_degree: ks(&oi, &si)?,
        ks_out_degree: ks(&oo, &so)?,
        ks_iet: ks(&iet_samples(&g), &iet_samples(&syn))?,
        edge_list,
        preview,
    })
}

pub fn spectrum_comparison_json(
    original: &str,
    synthetic: &str,
    l: usize,
    delta_c: i64,
) -> Result<String, String> {
    let count = |text: &str| {
        count_motifs(&graph(text)?, l, delta_c, WindowBound::Inclusive).map_err(|e| e.to_string())
    };
    let (o, s) = (count(original)?, count(synthetic)?);
    let mut codes: Vec<_> = o.counts.keys().chain(s.counts.keys()).cloned().collect();
    codes.sort();
    codes.dedup();
    let mut rows: Vec<SpectrumRow> = codes
        .iter()
        .map(|c| SpectrumRow {
            code: c.to_string(),
            original: o.get(c),
            synthetic: s.get(c),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.original
            .cmp(&a.original)
            .then_with(|| a.code.cmp(&b.code))
    });
    json(&SpectrumComparison {
        l,
        original_total: o.total,
        synthetic_total: s.total,
        rows,
    })
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// A synthetic messaging stream as an edge list.
#[wasm_bindgen]
pub fn sample_stream(nodes: u32, sessions: u32, days: u32, seed: u32) -> String {
    sample_stream_text(nodes, sessions, days, seed as u64)
}

#[wasm_bindgen]
pub fn extract_summary(edge_list: &str, delta: u32, l_max: u32) -> Result<String, JsError> {
    js(extract_summary_json(
        edge_list,
        delta as i64,
        l_max as usize,
        12,
    ))
}

#[wasm_bindgen]
pub fn generate_graph(
    edge_list: &str,
    delta: u32,
    l_max: u32,
    seed: u32,
) -> Result<String, JsError> {
    js(generate_json(
        edge_list,
        delta as i64,
        l_max as usize,
        seed as u64,
    ))
}

#[wasm_bindgen]
pub fn compare_spectrum(
    original: &str,
    synthetic: &str,
    l: u32,
    delta_c: u32,
) -> Result<String, JsError> {
    js(spectrum_comparison_json(
        original,
        synthetic,
        l as usize,
        delta_c as i64,
    ))
}
