//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use mtm_core::ingest::{Event, TemporalGraph};
use mtm_core::motif::{encode, MotifCode};
use mtm_core::transition::TransitionProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_stream(
    rng: &mut ChaCha8Rng,
    max_events: usize,
    nodes: u64,
    horizon: i64,
) -> TemporalGraph {
    let n = rng.random_range(1..=max_events);
    let events = (0..n)
        .map(|_| {
            let s = rng.random_range(0..nodes);
            let mut d = rng.random_range(0..nodes - 1);
            if d >= s {
                d += 1;
            }
            Event::new(s, d, rng.random_range(0..horizon))
        })
        .collect();
    TemporalGraph::from_events(events)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Transition processes built straight from the definitions: a process
/// whose last event is `e_l` grows by the earliest later event that touches
/// one of its nodes within `(t_l, t_l + delta]`, unless it already holds
/// `l_max` events. An event that grows no process starts a new one.
#[derive(Debug, Default)]
pub struct OracleExtraction {
    pub processes: Vec<Vec<usize>>,
    pub counts: BTreeMap<String, u64>,
    pub delta_t_sums: BTreeMap<String, (i64, u64)>,
    pub mu: f64,
}

pub fn oracle_extract(g: &TemporalGraph, delta: i64, l_max: usize) -> OracleExtraction {
    let ev = g.events();
    let next_of = |proc: &[usize]| -> Option<usize> {
        if proc.len() >= l_max {
            return None;
        }
        let last = *proc.last().unwrap();
        let nodes: Vec<u64> = proc.iter().flat_map(|&i| [ev[i].src, ev[i].dst]).collect();
        (last + 1..ev.len())
            .take_while(|&j| ev[j].t - ev[last].t <= delta)
            .find(|&j| nodes.contains(&ev[j].src) || nodes.contains(&ev[j].dst))
    };
    let mut processes: Vec<Vec<usize>> = Vec::new();
    for i in 0..ev.len() {
        let mut grew = false;
        for p in processes.iter_mut() {
            if next_of(p) == Some(i) {
                p.push(i);
                grew = true;
            }
        }
        if !grew {
            processes.push(vec![i]);
        }
    }

    let mut out = OracleExtraction::default();
    let mut edges = 0usize;
    for p in &processes {
        let events: Vec<Event> = p.iter().map(|&i| ev[i]).collect();
        let codes: Vec<MotifCode> = (1..=events.len())
            .map(|k| encode(&events[..k]).unwrap())
            .collect();
        for k in 1..codes.len() {
            let key = format!("{}->{}", codes[k - 1], codes[k]);
            *out.counts.entry(key.clone()).or_default() += 1;
            let acc = out.delta_t_sums.entry(key).or_default();
            acc.0 += events[k].t - events[k - 1].t;
            acc.1 += 1;
        }
        let last = codes.last().unwrap();
        *out.counts.entry(format!("{last}->S")).or_default() += 1;
        let mut pairs: Vec<(u64, u64)> = events.iter().map(|e| (e.src, e.dst)).collect();
        pairs.sort();
        pairs.dedup();
        edges += pairs.len();
    }
    out.mu = edges as f64 / processes.len() as f64;
    out.processes = processes;
    out
}

/// Every increasing index tuple of length `l`, filtered by the motif
/// definition and the consecutive-gap ceiling.
pub fn oracle_count(g: &TemporalGraph, l: usize, delta_c: i64) -> BTreeMap<MotifCode, u64> {
    let ev = g.events();
    let mut counts = BTreeMap::new();
    let mut idx: Vec<usize> = (0..l).collect();
    if ev.len() < l {
        return counts;
    }
    loop {
        let events: Vec<Event> = idx.iter().map(|&i| ev[i]).collect();
        let ordered = events
            .windows(2)
            .all(|w| w[1].t > w[0].t && w[1].t - w[0].t <= delta_c);
        if ordered {
            if let Ok(code) = encode(&events) {
                *counts.entry(code).or_default() += 1;
            }
        }
        // next combination
        let mut k = l;
        loop {
            if k == 0 {
                return counts;
            }
            k -= 1;
            if idx[k] < ev.len() - l + k {
                break;
            }
        }
        idx[k] += 1;
        for m in k + 1..l {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

/// Expected number of hot events a process started at `code` emits, by
/// first-step analysis on the absorbing chain of probability rows.
pub fn expected_hot_events(
    profile: &TransitionProfile,
    code: &MotifCode,
    memo: &mut HashMap<MotifCode, f64>,
) -> f64 {
    if code.len() >= profile.l_max {
        return 0.0;
    }
    if let Some(&v) = memo.get(code) {
        return v;
    }
    let v = profile
        .row(code)
        .map(|row| {
            row.iter()
                .map(|(next, &p)| p * (1.0 + expected_hot_events(profile, next, memo)))
                .sum()
        })
        .unwrap_or(0.0);
    memo.insert(code.clone(), v);
    v
}

/// Looks for the CollegeMsg edge list: `$MTM_COLLEGEMSG`, then
/// `data/CollegeMsg.txt` at the workspace root.
pub fn college_msg_path() -> Option<std::path::PathBuf> {
    if let Ok(p) = std::env::var("MTM_COLLEGEMSG") {
        let p = std::path::PathBuf::from(p);
        if p.is_file() {
            return Some(p);
        }
    }
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/CollegeMsg.txt");
    p.is_file().then_some(p)
}
