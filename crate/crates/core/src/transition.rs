//! Motif transition extraction.
//!
//! A single forward pass over the stream keeps a list of active transition
//! processes. Each arriving event first retires processes that reached the
//! size limit or whose last event is more than `delta` seconds old, then
//! extends every remaining process it touches. An event that extends nothing
//! is a cold event and seeds a new process at code `01`.
//!
//! One event may extend several processes. The active list is snapshotted
//! per event, so a process is extended at most once by the same event.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{static_projection, Event, NodeId, TemporalGraph};
use crate::motif::{CodecError, MotifCode, Next};

pub const PROFILE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("l_max must be at least 2, got {0}")]
    SizeLimit(usize),
    #[error("delta must be positive, got {0}")]
    TimeLimit(i64),
    #[error("cannot extract transitions from an empty graph")]
    EmptyGraph,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("unsupported profile version {0}")]
    Version(u32),
    #[error("bad transition key {0:?}")]
    Key(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("invalid profile: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `from -> to`, where `to` is either a one-event extension of `from` or the
/// stop state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionKey {
    pub from: MotifCode,
    pub to: Next,
}

impl TransitionKey {
    pub fn extension(from: MotifCode, to: MotifCode) -> Self {
        Self {
            from,
            to: Next::Motif(to),
        }
    }

    pub fn stop(from: MotifCode) -> Self {
        Self {
            from,
            to: Next::Stop,
        }
    }

    pub fn is_stop(&self) -> bool {
        self.to == Next::Stop
    }
}

impl fmt::Display for TransitionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl FromStr for TransitionKey {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s
            .split_once("->")
            .ok_or_else(|| ProfileError::Key(s.to_string()))?;
        let key = Self {
            from: from.parse()?,
            to: to.parse()?,
        };
        if let Next::Motif(to) = &key.to {
            if !key.from.is_prefix_of(to) || to.len() != key.from.len() + 1 {
                return Err(ProfileError::Key(s.to_string()));
            }
        }
        Ok(key)
    }
}

/// Why a transition process ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetireReason {
    SizeLimit,
    TimeLimit,
    EndOfStream,
}

/// One transition process observed in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessRecord {
    /// Indices into the graph's event list, cold event first.
    pub events: Vec<usize>,
    pub code: MotifCode,
    pub reason: RetireReason,
}

/// Everything the generator needs from an input stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDocument", into = "ProfileDocument")]
pub struct TransitionProfile {
    pub l_max: usize,
    pub delta: i64,
    /// `|E|` of the input.
    pub event_count: usize,
    /// Static-projection size of the input.
    pub input_static_edges: usize,
    pub cold_event_count: usize,
    /// `(in_degree, out_degree)` per node of the cold-event static projection.
    pub k_ce: Vec<(u32, u32)>,
    /// Cold-event timestamps, sorted.
    pub t_ce: Vec<i64>,
    /// Cold-event count per static cold edge.
    pub ce_edge_weights: Vec<u32>,
    /// Conditional next-motif probabilities; the stop mass is implicit.
    pub probs: BTreeMap<MotifCode, BTreeMap<MotifCode, f64>>,
    /// Exponential rate per extension key, in 1/seconds.
    pub rates: BTreeMap<TransitionKey, f64>,
    /// Instance counts, stop keys included.
    pub counts: BTreeMap<TransitionKey, u64>,
    /// `(sum, count)` of transition times per extension key.
    pub delta_t_sums: BTreeMap<TransitionKey, (i64, u64)>,
    /// Mean static-edge count of the final motif of each process.
    pub mu: f64,
}

impl TransitionProfile {
    pub fn cold_event_fraction(&self) -> f64 {
        if self.event_count == 0 {
            return 0.0;
        }
        self.cold_event_count as f64 / self.event_count as f64
    }

    pub fn observed_transition_type_count(&self) -> usize {
        self.counts
            .iter()
            .filter(|(k, &c)| !k.is_stop() && c > 0)
            .count()
    }

    pub fn row(&self, code: &MotifCode) -> Option<&BTreeMap<MotifCode, f64>> {
        self.probs.get(code)
    }

    /// `1 - Σ row`; codes with no row stop with certainty.
    pub fn stop_probability(&self, code: &MotifCode) -> f64 {
        self.row(code)
            .map(|row| (1.0 - row.values().sum::<f64>()).max(0.0))
            .unwrap_or(1.0)
    }

    pub fn rate(&self, from: &MotifCode, to: &MotifCode) -> Option<f64> {
        self.rates
            .get(&TransitionKey::extension(from.clone(), to.clone()))
            .copied()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let invalid = |m: String| Err(ProfileError::Invalid(m));
        if self.l_max < 2 {
            return invalid(format!("l_max {}", self.l_max));
        }
        for (from, row) in &self.probs {
            let sum: f64 = row.values().sum();
            if row.values().any(|p| !(0.0..=1.0).contains(p)) || sum > 1.0 + 1e-9 {
                return invalid(format!("row {from} is not a distribution"));
            }
            for to in row.keys() {
                if !from.is_prefix_of(to) || to.len() != from.len() + 1 {
                    return invalid(format!("{from}->{to} is not an extension"));
                }
            }
        }
        for (key, rate) in &self.rates {
            if !(*rate > 0.0 && rate.is_finite()) || self.counts.get(key).copied().unwrap_or(0) == 0
            {
                return invalid(format!("rate for {key}"));
            }
        }
        if self.cold_event_count > 0 && self.mu < 1.0 {
            return invalid(format!("mu {}", self.mu));
        }
        let weight_total: u64 = self.ce_edge_weights.iter().map(|&w| w as u64).sum();
        if self.t_ce.len() != self.cold_event_count || weight_total != self.cold_event_count as u64
        {
            return invalid("cold-event totals disagree".into());
        }
        let ins: u64 = self.k_ce.iter().map(|&(i, _)| i as u64).sum();
        let outs: u64 = self.k_ce.iter().map(|&(_, o)| o as u64).sum();
        if ins != outs || outs != self.ce_edge_weights.len() as u64 {
            return invalid("cold degree sequence is unbalanced".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, ProfileError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ProfileError> {
        let profile: Self = serde_json::from_str(s)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// Extracts the transition profile of `g`.
pub fn extract_profile(
    g: &TemporalGraph,
    delta: i64,
    l_max: usize,
) -> Result<TransitionProfile, ExtractError> {
    Ok(scan(g, delta, l_max, false)?.0)
}

/// Like [`extract_profile`], also returning every transition process.
pub fn extract_with_processes(
    g: &TemporalGraph,
    delta: i64,
    l_max: usize,
) -> Result<(TransitionProfile, Vec<ProcessRecord>), ExtractError> {
    scan(g, delta, l_max, true)
}

struct Active {
    id: usize,
    code: MotifCode,
    nodes: Vec<NodeId>,
    t_last: i64,
}

impl Active {
    fn digit(&self, node: NodeId) -> Option<u8> {
        self.nodes.iter().position(|&n| n == node).map(|d| d as u8)
    }
}

#[derive(Default)]
struct Tally {
    counts: HashMap<TransitionKey, u64>,
    dt: HashMap<TransitionKey, (i64, u64)>,
    final_edges: Vec<usize>,
    records: Option<Vec<ProcessRecord>>,
}

impl Tally {
    fn retire(&mut self, p: Active, reason: RetireReason) {
        self.final_edges.push(p.code.static_edge_count());
        if let Some(records) = self.records.as_mut() {
            records[p.id].reason = reason;
            records[p.id].code = p.code.clone();
        }
        *self.counts.entry(TransitionKey::stop(p.code)).or_default() += 1;
    }
}

fn scan(
    g: &TemporalGraph,
    delta: i64,
    l_max: usize,
    trace: bool,
) -> Result<(TransitionProfile, Vec<ProcessRecord>), ExtractError> {
    if l_max < 2 {
        return Err(ExtractError::SizeLimit(l_max));
    }
    if delta <= 0 {
        return Err(ExtractError::TimeLimit(delta));
    }
    if g.is_empty() {
        return Err(ExtractError::EmptyGraph);
    }

    let mut tally = Tally {
        records: trace.then(Vec::new),
        ..Tally::default()
    };
    let mut cold: Vec<Event> = Vec::new();
    let mut active: Vec<Active> = Vec::new();
    let mut next_active: Vec<Active> = Vec::new();

    for (idx, e) in g.events().iter().enumerate() {
        let mut is_cold = true;
        for mut p in active.drain(..) {
            if p.code.len() >= l_max {
                tally.retire(p, RetireReason::SizeLimit);
                continue;
            }
            if e.t - p.t_last > delta {
                tally.retire(p, RetireReason::TimeLimit);
                continue;
            }
            let (s, d) = (p.digit(e.src), p.digit(e.dst));
            if s.is_some() || d.is_some() {
                let fresh = p.nodes.len() as u8;
                let (s, d) = (s.unwrap_or(fresh), d.unwrap_or(fresh));
                if s == fresh {
                    p.nodes.push(e.src);
                } else if d == fresh {
                    p.nodes.push(e.dst);
                }
                let next = p
                    .code
                    .extend(s, d)
                    .expect("adjacent event always yields a valid extension");
                let key = TransitionKey::extension(p.code.clone(), next.clone());
                *tally.counts.entry(key.clone()).or_default() += 1;
                let acc = tally.dt.entry(key).or_default();
                acc.0 += e.t - p.t_last;
                acc.1 += 1;
                p.code = next;
                p.t_last = e.t;
                if let Some(records) = tally.records.as_mut() {
                    records[p.id].events.push(idx);
                }
                is_cold = false;
            }
            next_active.push(p);
        }
        if is_cold {
            cold.push(*e);
            let id = cold.len() - 1;
            if let Some(records) = tally.records.as_mut() {
                records.push(ProcessRecord {
                    events: vec![idx],
                    code: MotifCode::single(),
                    reason: RetireReason::EndOfStream,
                });
            }
            next_active.push(Active {
                id,
                code: MotifCode::single(),
                nodes: vec![e.src, e.dst],
                t_last: e.t,
            });
        }
        std::mem::swap(&mut active, &mut next_active);
    }
    for p in active.drain(..) {
        let reason = if p.code.len() >= l_max {
            RetireReason::SizeLimit
        } else {
            RetireReason::EndOfStream
        };
        tally.retire(p, reason);
    }

    let profile = assemble(g, delta, l_max, &cold, &tally);
    Ok((profile, tally.records.unwrap_or_default()))
}

fn assemble(
    g: &TemporalGraph,
    delta: i64,
    l_max: usize,
    cold: &[Event],
    tally: &Tally,
) -> TransitionProfile {
    let counts: BTreeMap<TransitionKey, u64> =
        tally.counts.iter().map(|(k, &v)| (k.clone(), v)).collect();

    let mut totals: BTreeMap<&MotifCode, u64> = BTreeMap::new();
    for (key, &c) in &counts {
        *totals.entry(&key.from).or_default() += c;
    }
    let mut probs: BTreeMap<MotifCode, BTreeMap<MotifCode, f64>> = totals
        .keys()
        .map(|&code| (code.clone(), BTreeMap::new()))
        .collect();
    for (key, &c) in &counts {
        if let Next::Motif(to) = &key.to {
            let p = c as f64 / totals[&key.from] as f64;
            probs
                .get_mut(&key.from)
                .expect("row exists for every source")
                .insert(to.clone(), p);
        }
    }

    let delta_t_sums: BTreeMap<TransitionKey, (i64, u64)> =
        tally.dt.iter().map(|(k, &v)| (k.clone(), v)).collect();
    let rates = delta_t_sums
        .iter()
        .map(|(k, &(sum, n))| {
            let mean = sum as f64 / n as f64;
            // zero mean comes from same-second ties; use the data resolution
            let mean = if mean > 0.0 { mean } else { 1.0 };
            (k.clone(), 1.0 / mean)
        })
        .collect();

    let mut edge_weights: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
    for e in cold {
        *edge_weights.entry((e.src, e.dst)).or_default() += 1;
    }
    let mut degrees: BTreeMap<NodeId, (u32, u32)> = BTreeMap::new();
    for &(s, d) in edge_weights.keys() {
        degrees.entry(s).or_default().1 += 1;
        degrees.entry(d).or_default().0 += 1;
    }

    let mu = if tally.final_edges.is_empty() {
        0.0
    } else {
        tally.final_edges.iter().sum::<usize>() as f64 / tally.final_edges.len() as f64
    };

    TransitionProfile {
        l_max,
        delta,
        event_count: g.len(),
        input_static_edges: static_projection(g).len(),
        cold_event_count: cold.len(),
        k_ce: degrees.into_values().collect(),
        t_ce: cold.iter().map(|e| e.t).collect(),
        ce_edge_weights: edge_weights.into_values().collect(),
        probs,
        rates,
        counts,
        delta_t_sums,
        mu,
    }
}

/// On-disk JSON layout of a profile. Maps are keyed by code strings and
/// `from->to` transition strings.
#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    version: u32,
    l_max: usize,
    delta: i64,
    event_count: usize,
    input_static_edges: usize,
    cold_event_count: usize,
    mu: f64,
    k_ce: Vec<(u32, u32)>,
    t_ce: Vec<i64>,
    ce_edge_weights: Vec<u32>,
    probs: BTreeMap<String, BTreeMap<String, f64>>,
    rates: BTreeMap<String, f64>,
    counts: BTreeMap<String, u64>,
    delta_t_sums: BTreeMap<String, (i64, u64)>,
}

impl From<TransitionProfile> for ProfileDocument {
    fn from(p: TransitionProfile) -> Self {
        fn keyed<V: Copy>(m: &BTreeMap<TransitionKey, V>) -> BTreeMap<String, V> {
            m.iter().map(|(k, v)| (k.to_string(), *v)).collect()
        }
        Self {
            version: PROFILE_FORMAT_VERSION,
            l_max: p.l_max,
            delta: p.delta,
            event_count: p.event_count,
            input_static_edges: p.input_static_edges,
            cold_event_count: p.cold_event_count,
            mu: p.mu,
            probs: p
                .probs
                .iter()
                .map(|(from, row)| {
                    let row = row.iter().map(|(to, &q)| (to.to_string(), q)).collect();
                    (from.to_string(), row)
                })
                .collect(),
            rates: keyed(&p.rates),
            counts: keyed(&p.counts),
            delta_t_sums: keyed(&p.delta_t_sums),
            k_ce: p.k_ce,
            t_ce: p.t_ce,
            ce_edge_weights: p.ce_edge_weights,
        }
    }
}

impl TryFrom<ProfileDocument> for TransitionProfile {
    type Error = ProfileError;

    fn try_from(doc: ProfileDocument) -> Result<Self, Self::Error> {
        if doc.version != PROFILE_FORMAT_VERSION {
            return Err(ProfileError::Version(doc.version));
        }
        fn keyed<V: Copy>(
            m: &BTreeMap<String, V>,
        ) -> Result<BTreeMap<TransitionKey, V>, ProfileError> {
            m.iter().map(|(k, v)| Ok((k.parse()?, *v))).collect()
        }
        let probs = doc
            .probs
            .iter()
            .map(|(from, row)| {
                let row = row
                    .iter()
                    .map(|(to, &q)| Ok((to.parse()?, q)))
                    .collect::<Result<_, ProfileError>>()?;
                Ok((from.parse()?, row))
            })
            .collect::<Result<_, ProfileError>>()?;
        Ok(Self {
            l_max: doc.l_max,
            delta: doc.delta,
            event_count: doc.event_count,
            input_static_edges: doc.input_static_edges,
            cold_event_count: doc.cold_event_count,
            k_ce: doc.k_ce,
            t_ce: doc.t_ce,
            ce_edge_weights: doc.ce_edge_weights,
            probs,
            rates: keyed(&doc.rates)?,
            counts: keyed(&doc.counts)?,
            delta_t_sums: keyed(&doc.delta_t_sums)?,
            mu: doc.mu,
        })
    }
}
