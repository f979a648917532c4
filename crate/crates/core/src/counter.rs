//! Exact temporal motif counting.
//!
//! An instance is an ordered tuple of `l` events with strictly increasing
//! timestamps, each event sharing a node with the earlier ones, and every
//! consecutive gap within `delta_c`. Instances may overlap. Enumeration
//! starts from every root event and backtracks through a per-node,
//! time-sorted event index.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{NodeId, TemporalGraph};
use crate::motif::MotifCode;

pub const MIN_COUNT_EVENTS: usize = 2;
pub const MAX_COUNT_EVENTS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("motif length {0} is not supported (expected 2..=4)")]
    UnsupportedLength(usize),
    #[error("delta_c must be positive, got {0}")]
    Window(i64),
    #[error("window count must be positive")]
    WindowCount,
}

/// Whether a gap of exactly `delta_c` is admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WindowBound {
    #[default]
    Inclusive,
    Exclusive,
}

impl WindowBound {
    fn admits(self, gap: i64, delta_c: i64) -> bool {
        match self {
            WindowBound::Inclusive => gap <= delta_c,
            WindowBound::Exclusive => gap < delta_c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub l: usize,
    pub delta_c: i64,
    pub counts: BTreeMap<MotifCode, u64>,
    pub total: u64,
}

impl SpectrumCounts {
    pub fn get(&self, code: &MotifCode) -> u64 {
        self.counts.get(code).copied().unwrap_or(0)
    }

    /// `code,count` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("code,count\n");
        for (code, n) in &self.counts {
            out.push_str(&format!("{code},{n}\n"));
        }
        out
    }
}

/// Per-node positions into the event list, in time order.
struct NodeIndex<'g> {
    g: &'g TemporalGraph,
    by_node: HashMap<NodeId, Vec<usize>>,
}

impl<'g> NodeIndex<'g> {
    fn new(g: &'g TemporalGraph) -> Self {
        let mut by_node: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (i, e) in g.events().iter().enumerate() {
            by_node.entry(e.src).or_default().push(i);
            by_node.entry(e.dst).or_default().push(i);
        }
        Self { g, by_node }
    }

    /// Events on `node` with `t_prev < t` and gap admitted by `bound`.
    fn window(
        &self,
        node: NodeId,
        t_prev: i64,
        delta_c: i64,
        bound: WindowBound,
    ) -> impl Iterator<Item = usize> + '_ {
        let events = self.g.events();
        let list = self.by_node.get(&node).map(Vec::as_slice).unwrap_or(&[]);
        let start = list.partition_point(|&i| events[i].t <= t_prev);
        list[start..]
            .iter()
            .copied()
            .take_while(move |&i| bound.admits(events[i].t - t_prev, delta_c))
    }
}

/// Packed digit string: one nibble per digit, leading `01`.
type PackedCode = u32;

struct Search<'a> {
    index: &'a NodeIndex<'a>,
    l: usize,
    delta_c: i64,
    bound: WindowBound,
    nodes: [NodeId; MAX_COUNT_EVENTS + 1],
    node_count: usize,
}

impl Search<'_> {
    fn digit(&self, node: NodeId) -> Option<u32> {
        self.nodes[..self.node_count]
            .iter()
            .position(|&n| n == node)
            .map(|d| d as u32)
    }

    fn grow(
        &mut self,
        depth: usize,
        t_prev: i64,
        code: PackedCode,
        out: &mut HashMap<PackedCode, u64>,
    ) {
        let events = self.index.g.events();
        for k in 0..self.node_count {
            let anchor = self.nodes[k];
            for j in self.index.window(anchor, t_prev, self.delta_c, self.bound) {
                let e = events[j];
                let other = if e.src == anchor { e.dst } else { e.src };
                // events touching two motif nodes are visited from the lower digit only
                if let Some(d) = self.digit(other) {
                    if (d as usize) < k {
                        continue;
                    }
                }
                let fresh = self.node_count as u32;
                let s = self.digit(e.src).unwrap_or(fresh);
                let d = self.digit(e.dst).unwrap_or(fresh);
                let next = (code << 8) | (s << 4) | d;
                if depth + 1 == self.l {
                    *out.entry(next).or_default() += 1;
                    continue;
                }
                let added = s == fresh || d == fresh;
                if added {
                    self.nodes[self.node_count] = other;
                    self.node_count += 1;
                }
                self.grow(depth + 1, e.t, next, out);
                if added {
                    self.node_count -= 1;
                }
            }
        }
    }
}

fn unpack(mut code: PackedCode, l: usize) -> MotifCode {
    let mut pairs = vec![(0u8, 0u8); l];
    for slot in pairs.iter_mut().rev() {
        *slot = (((code >> 4) & 0xf) as u8, (code & 0xf) as u8);
        code >>= 8;
    }
    MotifCode::from_pairs(&pairs).expect("search only emits valid codes")
}

fn check(l: usize, delta_c: i64) -> Result<(), CountError> {
    if !(MIN_COUNT_EVENTS..=MAX_COUNT_EVENTS).contains(&l) {
        return Err(CountError::UnsupportedLength(l));
    }
    if delta_c <= 0 {
        return Err(CountError::Window(delta_c));
    }
    Ok(())
}

fn count_from_root(
    index: &NodeIndex<'_>,
    root: usize,
    l: usize,
    delta_c: i64,
    bound: WindowBound,
    out: &mut HashMap<PackedCode, u64>,
) {
    let e = index.g.events()[root];
    let mut nodes = [0; MAX_COUNT_EVENTS + 1];
    nodes[0] = e.src;
    nodes[1] = e.dst;
    let mut search = Search {
        index,
        l,
        delta_c,
        bound,
        nodes,
        node_count: 2,
    };
    search.grow(1, e.t, 0x01, out);
}

/// Counts every `l`-event motif instance of `g` under `delta_c`.
pub fn count_motifs(
    g: &TemporalGraph,
    l: usize,
    delta_c: i64,
    bound: WindowBound,
) -> Result<SpectrumCounts, CountError> {
    check(l, delta_c)?;
    let index = NodeIndex::new(g);
    let packed = (0..g.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc, root| {
            count_from_root(&index, root, l, delta_c, bound, &mut acc);
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let counts: BTreeMap<MotifCode, u64> =
        packed.into_iter().map(|(k, v)| (unpack(k, l), v)).collect();
    let total = counts.values().sum();
    Ok(SpectrumCounts {
        l,
        delta_c,
        counts,
        total,
    })
}

/// Total instance counts bucketed by root-event time into `windows`
/// equal-duration windows over `[t_start, t_end]`. Roots outside the range
/// fall into the nearest edge window.
pub fn window_totals(
    g: &TemporalGraph,
    l: usize,
    delta_c: i64,
    bound: WindowBound,
    t_start: i64,
    t_end: i64,
    windows: usize,
) -> Result<Vec<u64>, CountError> {
    check(l, delta_c)?;
    if windows == 0 {
        return Err(CountError::WindowCount);
    }
    let index = NodeIndex::new(g);
    let span = (t_end - t_start).max(0) as f64;
    let bucket = |t: i64| -> usize {
        if span == 0.0 {
            return 0;
        }
        let x = ((t - t_start) as f64 / span * windows as f64).floor();
        x.clamp(0.0, (windows - 1) as f64) as usize
    };
    let per_root: Vec<(usize, u64)> = (0..g.len())
        .into_par_iter()
        .map(|root| {
            let mut acc = HashMap::new();
            count_from_root(&index, root, l, delta_c, bound, &mut acc);
            (bucket(g.events()[root].t), acc.values().sum())
        })
        .collect();
    let mut totals = vec![0u64; windows];
    for (w, n) in per_root {
        totals[w] += n;
    }
    Ok(totals)
}
