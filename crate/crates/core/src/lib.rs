//! Temporal graph generation driven by motif transition statistics.
//!
//! The pipeline has three stages:
//!
//! 1. [`transition::extract_profile`] scans a timestamped edge stream once and
//!    records how small temporal motifs grow event by event (cold events,
//!    transition probabilities, transition rates, mean motif edge count).
//! 2. [`generator::generate`] replays those statistics as a stochastic
//!    process to synthesize a new stream.
//! 3. [`counter`] and [`metrics`] measure how closely a synthetic stream
//!    matches the original.

pub mod counter;
pub mod generator;
pub mod ingest;
pub mod metrics;
pub mod motif;
pub mod sample;
pub mod transition;

pub use counter::{count_motifs, SpectrumCounts, WindowBound};
pub use generator::{generate, GenerationConfig};
pub use ingest::{parse_events, write_events, Event, TemporalGraph};
pub use metrics::{compare_report, global_stats, ks_statistic, msre, GlobalStats};
pub use motif::{enumerate_codes, MotifCode, Next};
pub use transition::{extract_profile, TransitionKey, TransitionProfile};
