//! Synthetic stream generation from a [`TransitionProfile`].
//!
//! Cold events come from a configuration model over the cold-event degree
//! list, with the observed cold timestamps shuffled onto the generated
//! edges. Each cold event then seeds a motif transition process that walks
//! the profile's probability rows until it stops or reaches `l_max`, drawing
//! exponential inter-event gaps from the per-transition rates.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::ingest::{Event, NodeId, TemporalGraph};
use crate::motif::MotifCode;
use crate::transition::{ProfileError, TransitionProfile};

/// Stream id reserved for cold-event construction; process `i` uses stream `i`.
pub const COLD_EVENT_STREAM: u64 = u64::MAX;

const FULL_MATCHING_ATTEMPTS: usize = 32;
const REPAIR_ATTEMPTS: usize = 64;
const PARTNER_DRAWS: usize = 32;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("config l_max {config} does not match profile l_max {profile}")]
    SizeLimitMismatch { config: usize, profile: usize },
    #[error("l_max must be at least 2, got {0}")]
    SizeLimit(usize),
    #[error("degree sequence has {in_stubs} in-stubs but {out_stubs} out-stubs")]
    UnbalancedDegrees { in_stubs: usize, out_stubs: usize },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationConfig {
    pub seed: u64,
    pub l_max: usize,
}

impl GenerationConfig {
    pub fn for_profile(profile: &TransitionProfile, seed: u64) -> Self {
        Self {
            seed,
            l_max: profile.l_max,
        }
    }
}

/// Independent RNG stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Which side of the new edge is already in the motif.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `fixed -> partner`
    Outgoing,
    /// `partner -> fixed`
    Incoming,
}

/// A motif transition process being simulated.
#[derive(Debug, Clone)]
pub struct ActiveProcess {
    pub code: MotifCode,
    /// Node id of each digit.
    pub nodes: Vec<NodeId>,
    pub t_last: f64,
}

/// Static projection and node universe of everything emitted so far.
#[derive(Debug, Clone)]
pub struct OutputState {
    nodes: Vec<NodeId>,
    node_set: HashSet<NodeId>,
    out_nbrs: HashMap<NodeId, Vec<NodeId>>,
    in_nbrs: HashMap<NodeId, Vec<NodeId>>,
    edges: HashSet<(NodeId, NodeId)>,
    next_fresh: NodeId,
    new_edge_probability: f64,
}

impl OutputState {
    pub fn new(new_edge_probability: f64) -> Self {
        Self {
            nodes: Vec::new(),
            node_set: HashSet::new(),
            out_nbrs: HashMap::new(),
            in_nbrs: HashMap::new(),
            edges: HashSet::new(),
            next_fresh: 0,
            new_edge_probability,
        }
    }

    pub fn add_node(&mut self, node: NodeId) {
        if self.node_set.insert(node) {
            self.nodes.push(node);
            self.next_fresh = self.next_fresh.max(node + 1);
        }
    }

    pub fn add_edge(&mut self, src: NodeId, dst: NodeId) {
        self.add_node(src);
        self.add_node(dst);
        if self.edges.insert((src, dst)) {
            self.out_nbrs.entry(src).or_default().push(dst);
            self.in_nbrs.entry(dst).or_default().push(src);
        }
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edges.contains(&(src, dst))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn new_edge_probability(&self) -> f64 {
        self.new_edge_probability
    }

    fn neighbours(&self, node: NodeId, direction: Direction) -> &[NodeId] {
        let map = match direction {
            Direction::Outgoing => &self.out_nbrs,
            Direction::Incoming => &self.in_nbrs,
        };
        map.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    fn oriented(fixed: NodeId, partner: NodeId, direction: Direction) -> (NodeId, NodeId) {
        match direction {
            Direction::Outgoing => (fixed, partner),
            Direction::Incoming => (partner, fixed),
        }
    }

    fn mint(&mut self) -> NodeId {
        let node = self.next_fresh;
        self.add_node(node);
        node
    }
}

/// Probability that a request for an edge outside the motif creates a new
/// static edge rather than reusing one:
/// `(|E_static| - |CE'_static|) / ((mu - 1) |CE'|)`, clamped to `[0, 1]`.
/// A zero denominator gives 1.
pub fn new_edge_probability(
    input_static_edges: usize,
    cold_static_edges: usize,
    mu: f64,
    cold_events: usize,
) -> f64 {
    let denom = (mu - 1.0) * cold_events as f64;
    if denom <= 0.0 {
        return 1.0;
    }
    ((input_static_edges as f64 - cold_static_edges as f64) / denom).clamp(0.0, 1.0)
}

/// Picks the partner node for an event that introduces a new motif digit.
pub fn select_edge_for_new_digit<R: Rng + ?Sized>(
    fixed: NodeId,
    direction: Direction,
    motif_nodes: &[NodeId],
    state: &mut OutputState,
    rng: &mut R,
) -> NodeId {
    let create = rng.random::<f64>() < state.new_edge_probability;
    if !create {
        let candidates: Vec<NodeId> = state
            .neighbours(fixed, direction)
            .iter()
            .copied()
            .filter(|n| !motif_nodes.contains(n))
            .collect();
        if !candidates.is_empty() {
            return candidates[rng.random_range(0..candidates.len())];
        }
    }
    let admissible = |state: &OutputState, n: NodeId| {
        let (s, d) = OutputState::oriented(fixed, n, direction);
        !motif_nodes.contains(&n) && !state.has_edge(s, d)
    };
    if !state.nodes.is_empty() {
        for _ in 0..PARTNER_DRAWS {
            let n = state.nodes[rng.random_range(0..state.nodes.len())];
            if admissible(state, n) {
                return n;
            }
        }
        let candidates: Vec<NodeId> = state
            .nodes
            .iter()
            .copied()
            .filter(|&n| admissible(state, n))
            .collect();
        if !candidates.is_empty() {
            return candidates[rng.random_range(0..candidates.len())];
        }
    }
    state.mint()
}

/// Configuration-model wiring of the cold-event degree list.
///
/// Node `i` of the output corresponds to entry `i` of `k_ce`. Whole uniform
/// stub matchings are drawn until one has no self-loop or repeated pair;
/// if none is found, offending pairs of the last draw are repaired by
/// swapping targets with random other pairs, and pairs that cannot be
/// repaired are dropped.
pub fn wire_degree_sequence<R: Rng + ?Sized>(
    k_ce: &[(u32, u32)],
    rng: &mut R,
) -> Result<Vec<(NodeId, NodeId)>, GenerateError> {
    let mut out_stubs = Vec::new();
    let mut in_stubs = Vec::new();
    for (node, &(ind, outd)) in k_ce.iter().enumerate() {
        out_stubs.extend(std::iter::repeat_n(node as NodeId, outd as usize));
        in_stubs.extend(std::iter::repeat_n(node as NodeId, ind as usize));
    }
    if in_stubs.len() != out_stubs.len() {
        return Err(GenerateError::UnbalancedDegrees {
            in_stubs: in_stubs.len(),
            out_stubs: out_stubs.len(),
        });
    }
    for _ in 0..FULL_MATCHING_ATTEMPTS {
        in_stubs.shuffle(rng);
        let mut seen = HashSet::with_capacity(out_stubs.len());
        let simple = out_stubs
            .iter()
            .zip(&in_stubs)
            .all(|(&s, &d)| s != d && seen.insert((s, d)));
        if simple {
            return Ok(out_stubs.into_iter().zip(in_stubs).collect());
        }
    }
    Ok(repair_matching(out_stubs, in_stubs, rng))
}

fn repair_matching<R: Rng + ?Sized>(
    sources: Vec<NodeId>,
    mut targets: Vec<NodeId>,
    rng: &mut R,
) -> Vec<(NodeId, NodeId)> {
    let m = sources.len();
    let mut mult: HashMap<(NodeId, NodeId), u32> = HashMap::with_capacity(m);
    for i in 0..m {
        *mult.entry((sources[i], targets[i])).or_default() += 1;
    }
    let mut dropped = vec![false; m];
    for i in 0..m {
        let bad = |mult: &HashMap<_, u32>, s: NodeId, d: NodeId| s == d || mult[&(s, d)] > 1;
        if !bad(&mult, sources[i], targets[i]) {
            continue;
        }
        let mut fixed = false;
        for _ in 0..REPAIR_ATTEMPTS {
            let j = rng.random_range(0..m);
            if j == i || dropped[j] {
                continue;
            }
            let a = (sources[i], targets[j]);
            let b = (sources[j], targets[i]);
            let free = |p: (NodeId, NodeId)| mult.get(&p).copied().unwrap_or(0) == 0;
            if a.0 == a.1 || b.0 == b.1 || a == b || !free(a) || !free(b) {
                continue;
            }
            *mult.get_mut(&(sources[i], targets[i])).unwrap() -= 1;
            *mult.get_mut(&(sources[j], targets[j])).unwrap() -= 1;
            targets.swap(i, j);
            *mult.entry(a).or_default() += 1;
            *mult.entry(b).or_default() += 1;
            fixed = true;
            break;
        }
        if !fixed {
            *mult.get_mut(&(sources[i], targets[i])).unwrap() -= 1;
            dropped[i] = true;
        }
    }
    (0..m)
        .filter(|&i| !dropped[i])
        .map(|i| (sources[i], targets[i]))
        .collect()
}

/// Builds the synthetic cold events `CE'`.
///
/// Each wired edge receives a cold-event count drawn without replacement
/// from `ce_edge_weights`, and the cold timestamps are shuffled across those
/// slots. The output has exactly `|t_ce|` events with the same timestamp
/// multiset, sorted by time.
pub fn generate_cold_events<R: Rng + ?Sized>(
    profile: &TransitionProfile,
    rng: &mut R,
) -> Result<Vec<Event>, GenerateError> {
    let edges = wire_degree_sequence(&profile.k_ce, rng)?;
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let mut weights = profile.ce_edge_weights.clone();
    weights.shuffle(rng);
    let mut per_edge: Vec<usize> = weights
        .iter()
        .take(edges.len())
        .map(|&w| w as usize)
        .collect();
    per_edge.resize(edges.len(), 1);
    // rebalance so the slot total matches the timestamp count exactly
    let mut total: usize = per_edge.iter().sum();
    while total < profile.t_ce.len() {
        per_edge[rng.random_range(0..edges.len())] += 1;
        total += 1;
    }
    while total > profile.t_ce.len() {
        let i = rng.random_range(0..edges.len());
        if per_edge[i] > 0 {
            per_edge[i] -= 1;
            total -= 1;
        }
    }

    let mut stamps = profile.t_ce.clone();
    stamps.shuffle(rng);
    let mut stamps = stamps.into_iter();
    let mut events = Vec::with_capacity(profile.t_ce.len());
    for (&(src, dst), &w) in edges.iter().zip(&per_edge) {
        for t in stamps.by_ref().take(w) {
            events.push(Event::new(src, dst, t));
        }
    }
    events.sort_by_key(|e| e.t);
    Ok(events)
}

/// Grows every cold event into a transition process and returns the merged,
/// time-sorted stream.
pub fn simulate(
    profile: &TransitionProfile,
    cold_events: &[Event],
    config: &GenerationConfig,
) -> Result<TemporalGraph, GenerateError> {
    check_config(profile, config)?;
    let cold_static: HashSet<(NodeId, NodeId)> =
        cold_events.iter().map(|e| (e.src, e.dst)).collect();
    let p_new = new_edge_probability(
        profile.input_static_edges,
        cold_static.len(),
        profile.mu,
        cold_events.len(),
    );
    let mut state = OutputState::new(p_new);
    for e in cold_events {
        state.add_node(e.src);
        state.add_node(e.dst);
    }

    let mut emitted: Vec<(f64, Event)> = Vec::with_capacity(cold_events.len() * 2);
    for (i, cold) in cold_events.iter().enumerate() {
        let mut rng = stream_rng(config.seed, i as u64);
        state.add_edge(cold.src, cold.dst);
        emitted.push((cold.t as f64, *cold));
        let mut process = ActiveProcess {
            code: MotifCode::single(),
            nodes: vec![cold.src, cold.dst],
            t_last: cold.t as f64,
        };
        while let Some((src, dst, t)) = step(profile, config, &mut process, &mut state, &mut rng) {
            emitted.push((t, Event::new(src, dst, 0)));
        }
    }

    emitted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let events = emitted
        .into_iter()
        .map(|(t, e)| Event::new(e.src, e.dst, t.round() as i64))
        .collect();
    Ok(TemporalGraph::from_events(events))
}

/// Advances one process by a single transition. Returns the emitted event
/// with its real-valued timestamp, or `None` once the process stops.
pub fn step<R: Rng + ?Sized>(
    profile: &TransitionProfile,
    config: &GenerationConfig,
    process: &mut ActiveProcess,
    state: &mut OutputState,
    rng: &mut R,
) -> Option<(NodeId, NodeId, f64)> {
    if process.code.len() >= config.l_max {
        return None;
    }
    let row = profile.row(&process.code)?;
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    let next = row
        .iter()
        .find(|(_, &p)| {
            acc += p;
            draw < acc
        })
        .map(|(code, _)| code.clone())?;

    let (a, b) = next.last_pair();
    let n = process.nodes.len() as u8;
    let (src, dst) = if a == n {
        let fixed = process.nodes[b as usize];
        let partner =
            select_edge_for_new_digit(fixed, Direction::Incoming, &process.nodes, state, rng);
        process.nodes.push(partner);
        (partner, fixed)
    } else if b == n {
        let fixed = process.nodes[a as usize];
        let partner =
            select_edge_for_new_digit(fixed, Direction::Outgoing, &process.nodes, state, rng);
        process.nodes.push(partner);
        (fixed, partner)
    } else {
        (process.nodes[a as usize], process.nodes[b as usize])
    };

    let gap = match profile.rate(&process.code, &next) {
        Some(rate) => Exp::new(rate).map(|d| d.sample(rng)).unwrap_or(1.0),
        None => 1.0,
    };
    process.t_last += gap;
    process.code = next;
    state.add_edge(src, dst);
    Some((src, dst, process.t_last))
}

fn check_config(
    profile: &TransitionProfile,
    config: &GenerationConfig,
) -> Result<(), GenerateError> {
    if config.l_max < 2 {
        return Err(GenerateError::SizeLimit(config.l_max));
    }
    if config.l_max != profile.l_max {
        return Err(GenerateError::SizeLimitMismatch {
            config: config.l_max,
            profile: profile.l_max,
        });
    }
    Ok(())
}

/// Full generation: cold events, then process simulation. Deterministic in
/// `(profile, config.seed)`.
pub fn generate(
    profile: &TransitionProfile,
    config: &GenerationConfig,
) -> Result<TemporalGraph, GenerateError> {
    check_config(profile, config)?;
    profile.validate()?;
    let mut rng = stream_rng(config.seed, COLD_EVENT_STREAM);
    let cold = generate_cold_events(profile, &mut rng)?;
    simulate(profile, &cold, config)
}
