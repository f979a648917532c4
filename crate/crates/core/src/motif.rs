//! Canonical digit encoding of temporal motif types.
//!
//! An `l`-event motif is written as `l` digit pairs `(src, dst)`. Digits are
//! assigned to nodes in order of first appearance (source before target),
//! and pairs follow the chronological order of the events, so `0110` is a
//! reciprocated edge and `011202` a triangle closed from node `0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ingest::{Event, NodeId};

/// Largest `l` accepted by [`enumerate_codes`].
pub const MAX_ENUMERATED_EVENTS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("cannot encode an empty event list")]
    Empty,
    #[error("event {index} is a self-loop")]
    SelfLoop { index: usize },
    #[error("event {index} shares no node with the earlier events")]
    Disconnected { index: usize },
    #[error("invalid extension ({src}, {dst}) of a motif with {nodes} nodes")]
    InvalidExtension { src: u8, dst: u8, nodes: u8 },
    #[error("invalid motif code {0:?}")]
    Parse(String),
    #[error("motif length {0} outside supported range 1..={MAX_ENUMERATED_EVENTS}")]
    UnsupportedLength(usize),
}

/// A temporal motif type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotifCode {
    pairs: Vec<(u8, u8)>,
    nodes: u8,
}

impl MotifCode {
    /// The single-event motif `01`.
    pub fn single() -> Self {
        Self {
            pairs: vec![(0, 1)],
            nodes: 2,
        }
    }

    /// Validates a pair list against the code invariants.
    pub fn from_pairs(pairs: &[(u8, u8)]) -> Result<Self, CodecError> {
        let (&first, rest) = pairs
            .split_first()
            .ok_or_else(|| CodecError::Parse(String::new()))?;
        if first != (0, 1) {
            let (src, dst) = first;
            return Err(CodecError::InvalidExtension { src, dst, nodes: 0 });
        }
        rest.iter()
            .try_fold(Self::single(), |code, &(s, d)| code.extend(s, d))
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    /// Number of events `l`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of distinct nodes, `max digit + 1`.
    pub fn node_count(&self) -> usize {
        self.nodes as usize
    }

    pub fn last_pair(&self) -> (u8, u8) {
        *self.pairs.last().expect("codes are never empty")
    }

    /// Appends one event. At most one digit may be new and it must equal the
    /// current node count.
    pub fn extend(&self, src: u8, dst: u8) -> Result<Self, CodecError> {
        let n = self.nodes;
        let err = || CodecError::InvalidExtension { src, dst, nodes: n };
        if src == dst || src > n || dst > n || (src == n && dst == n) {
            return Err(err());
        }
        let mut pairs = Vec::with_capacity(self.pairs.len() + 1);
        pairs.extend_from_slice(&self.pairs);
        pairs.push((src, dst));
        let nodes = if src == n || dst == n {
            n.checked_add(1).ok_or_else(err)?
        } else {
            n
        };
        Ok(Self { pairs, nodes })
    }

    /// All valid one-event extensions, in lexicographic pair order.
    pub fn extensions(&self) -> impl Iterator<Item = MotifCode> + '_ {
        let n = self.nodes;
        (0..=n)
            .flat_map(move |s| (0..=n).map(move |d| (s, d)))
            .filter_map(move |(s, d)| self.extend(s, d).ok())
    }

    pub fn is_prefix_of(&self, other: &MotifCode) -> bool {
        other.pairs.starts_with(&self.pairs)
    }

    /// The code of the first `l` events.
    pub fn prefix(&self, l: usize) -> Option<MotifCode> {
        if l == 0 || l > self.pairs.len() {
            return None;
        }
        let pairs = self.pairs[..l].to_vec();
        let nodes = pairs.iter().map(|&(s, d)| s.max(d)).max().unwrap_or(0) + 1;
        Some(Self { pairs, nodes })
    }

    /// Number of distinct directed digit pairs.
    pub fn static_edge_count(&self) -> usize {
        let mut seen: Vec<(u8, u8)> = Vec::with_capacity(self.pairs.len());
        for p in &self.pairs {
            if !seen.contains(p) {
                seen.push(*p);
            }
        }
        seen.len()
    }
}

impl fmt::Display for MotifCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nodes <= 10 {
            for (s, d) in &self.pairs {
                write!(f, "{s}{d}")?;
            }
        } else {
            let digits: Vec<String> = self
                .pairs
                .iter()
                .flat_map(|&(s, d)| [s.to_string(), d.to_string()])
                .collect();
            f.write_str(&digits.join("."))?;
        }
        Ok(())
    }
}

impl FromStr for MotifCode {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CodecError::Parse(s.to_string());
        let digits: Vec<u8> = if s.contains('.') {
            s.split('.')
                .map(|d| d.parse::<u8>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        if digits.is_empty() || !digits.len().is_multiple_of(2) {
            return Err(bad());
        }
        let pairs: Vec<(u8, u8)> = digits.chunks(2).map(|c| (c[0], c[1])).collect();
        Self::from_pairs(&pairs).map_err(|_| bad())
    }
}

impl Serialize for MotifCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MotifCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The successor of a motif in a transition process.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Next {
    Motif(MotifCode),
    Stop,
}

impl fmt::Display for Next {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Next::Motif(code) => code.fmt(f),
            Next::Stop => f.write_str("S"),
        }
    }
}

impl FromStr for Next {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "S" {
            Ok(Next::Stop)
        } else {
            s.parse().map(Next::Motif)
        }
    }
}

/// Encodes a chronologically ordered event list.
pub fn encode(events: &[Event]) -> Result<MotifCode, CodecError> {
    let (first, rest) = events.split_first().ok_or(CodecError::Empty)?;
    if first.src == first.dst {
        return Err(CodecError::SelfLoop { index: 0 });
    }
    let mut nodes: Vec<NodeId> = vec![first.src, first.dst];
    let mut code = MotifCode::single();
    for (i, e) in rest.iter().enumerate() {
        let index = i + 1;
        if e.src == e.dst {
            return Err(CodecError::SelfLoop { index });
        }
        let s = nodes.iter().position(|&n| n == e.src);
        let d = nodes.iter().position(|&n| n == e.dst);
        if s.is_none() && d.is_none() {
            return Err(CodecError::Disconnected { index });
        }
        let fresh = nodes.len();
        let s = s.unwrap_or(fresh);
        let d = d.unwrap_or(fresh);
        if s == fresh || d == fresh {
            nodes.push(if s == fresh { e.src } else { e.dst });
        }
        code = code
            .extend(s as u8, d as u8)
            .map_err(|_| CodecError::Disconnected { index })?;
    }
    Ok(code)
}

/// Every valid code with `l` events, sorted.
pub fn enumerate_codes(l: usize) -> Result<Vec<MotifCode>, CodecError> {
    if !(1..=MAX_ENUMERATED_EVENTS).contains(&l) {
        return Err(CodecError::UnsupportedLength(l));
    }
    let mut level = vec![MotifCode::single()];
    for _ in 1..l {
        level = level
            .iter()
            .flat_map(|c| c.extensions().collect::<Vec<_>>())
            .collect();
    }
    level.sort();
    Ok(level)
}

/// Number of codes with `l` events, counted without materializing them.
///
/// A code on `n` nodes has `n(n-1)` extensions that keep `n` nodes and `2n`
/// that add one.
pub fn spectrum_size(l: usize) -> u64 {
    if l == 0 {
        return 0;
    }
    // by_nodes[n] = number of codes on n nodes
    let mut by_nodes = vec![0u64; l + 2];
    by_nodes[2] = 1;
    for _ in 1..l {
        let mut next = vec![0u64; l + 2];
        for (n, &c) in by_nodes.iter().enumerate().filter(|(_, &c)| c > 0) {
            let n64 = n as u64;
            next[n] += c * n64 * (n64 - 1);
            next[n + 1] += c * 2 * n64;
        }
        by_nodes = next;
    }
    by_nodes.iter().sum()
}

/// Number of distinct `M^l -> M^{l+1}` transition types for `l < l_max`.
pub fn transition_type_count(l_max: usize) -> u64 {
    (2..=l_max).map(spectrum_size).sum()
}
