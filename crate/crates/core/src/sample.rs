//! Small synthetic "messaging" streams for demos, benchmarks and tests.
//!
//! Sessions start as a Poisson process over the horizon. Each session picks
//! an initiator and a contact (contacts are sticky, so the static graph has
//! repeated edges), then emits a short burst of replies, follow-ups and
//! occasional forwards to a third node with exponential gaps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::ingest::{Event, NodeId, TemporalGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessagingParams {
    pub nodes: u64,
    pub sessions: usize,
    pub horizon: i64,
    /// Mean gap between events inside a session, in seconds.
    pub burst_gap: f64,
    /// Mean number of events after the first one.
    pub mean_followups: f64,
}

impl Default for MessagingParams {
    fn default() -> Self {
        Self {
            nodes: 300,
            sessions: 2_000,
            horizon: 30 * 24 * 3600,
            burst_gap: 120.0,
            mean_followups: 3.0,
        }
    }
}

pub fn messaging_stream(params: &MessagingParams, seed: u64) -> TemporalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = params.nodes.max(3);
    let gap = Exp::new(1.0 / params.burst_gap.max(1e-9)).expect("positive rate");
    let stop = 1.0 / (1.0 + params.mean_followups.max(0.0));
    let mut contacts: Vec<Vec<NodeId>> = vec![Vec::new(); nodes as usize];
    let mut events = Vec::new();

    for _ in 0..params.sessions {
        // activity is skewed towards low ids
        let u = ((rng.random::<f64>().powi(2)) * nodes as f64) as NodeId % nodes;
        let known = &contacts[u as usize];
        let v = if !known.is_empty() && rng.random_bool(0.7) {
            known[rng.random_range(0..known.len())]
        } else {
            let mut v = rng.random_range(0..nodes);
            if v == u {
                v = (v + 1) % nodes;
            }
            contacts[u as usize].push(v);
            v
        };
        let mut t = rng.random_range(0..params.horizon.max(1)) as f64;
        events.push(Event::new(u, v, t as i64));
        let (mut a, mut b) = (u, v);
        while !rng.random_bool(stop) {
            t += gap.sample(&mut rng);
            let roll: f64 = rng.random();
            if roll < 0.55 {
                std::mem::swap(&mut a, &mut b);
            } else if roll < 0.8 {
                let mut w = rng.random_range(0..nodes);
                if w == a || w == b {
                    w = (w.max(a).max(b) + 1) % nodes;
                }
                if w != a && w != b {
                    b = w;
                }
            }
            events.push(Event::new(a, b, t as i64));
        }
    }
    events.retain(|e| e.src != e.dst);
    TemporalGraph::from_events(events)
}
