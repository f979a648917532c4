//! Edge-list ingestion and serialization.
//!
//! The on-disk format is the SNAP temporal edge list: one `src dst t` triple
//! per line, whitespace separated, with `#` comment lines ignored.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use thiserror::Error;

pub type NodeId = u64;

/// A directed interaction `src -> dst` at integer second `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub src: NodeId,
    pub dst: NodeId,
    pub t: i64,
}

impl Event {
    pub fn new(src: NodeId, dst: NodeId, t: i64) -> Self {
        Self { src, dst, t }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.src == node || self.dst == node
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected `src dst t`, got {content:?}")]
    Malformed { line: usize, content: String },
    #[error("line {line}: negative timestamp {t}")]
    NegativeTimestamp { line: usize, t: i64 },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// A time-ordered event stream.
///
/// Events are kept sorted by `(t, insertion index)`; equal timestamps keep
/// their input order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemporalGraph {
    events: Vec<Event>,
    node_count: usize,
}

impl TemporalGraph {
    /// Builds a graph from events in arbitrary order (stable sort by time).
    pub fn from_events(mut events: Vec<Event>) -> Self {
        events.sort_by_key(|e| e.t);
        let node_count = events
            .iter()
            .flat_map(|e| [e.src, e.dst])
            .collect::<HashSet<_>>()
            .len();
        Self { events, node_count }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `t_last - t_first`, zero for empty graphs.
    pub fn timespan(&self) -> i64 {
        match (self.events.first(), self.events.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0,
        }
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }
}

/// Result of parsing an edge list.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub graph: TemporalGraph,
    pub self_loops_dropped: usize,
}

pub fn parse_events(text: &str) -> Result<Ingested, IngestError> {
    read_events(text.as_bytes())
}

pub fn read_events<R: BufRead>(reader: R) -> Result<Ingested, IngestError> {
    let mut events = Vec::new();
    let mut self_loops_dropped = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = || IngestError::Malformed {
            line: lineno,
            content: trimmed.to_string(),
        };
        let mut fields = trimmed.split_whitespace();
        let (Some(s), Some(d), Some(t), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed());
        };
        let src: NodeId = s.parse().map_err(|_| malformed())?;
        let dst: NodeId = d.parse().map_err(|_| malformed())?;
        let t: i64 = t.parse().map_err(|_| malformed())?;
        if t < 0 {
            return Err(IngestError::NegativeTimestamp { line: lineno, t });
        }
        if src == dst {
            self_loops_dropped += 1;
            continue;
        }
        events.push(Event { src, dst, t });
    }
    Ok(Ingested {
        graph: TemporalGraph::from_events(events),
        self_loops_dropped,
    })
}

pub fn write_events<W: Write>(g: &TemporalGraph, mut out: W) -> io::Result<()> {
    for e in g.events() {
        writeln!(out, "{} {} {}", e.src, e.dst, e.t)?;
    }
    Ok(())
}

pub fn to_edge_list(g: &TemporalGraph) -> String {
    let mut buf = Vec::with_capacity(g.len() * 16);
    write_events(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge list is ASCII")
}

/// Distinct directed `(src, dst)` pairs of the stream.
pub fn static_projection(g: &TemporalGraph) -> HashSet<(NodeId, NodeId)> {
    g.events().iter().map(|e| (e.src, e.dst)).collect()
}
