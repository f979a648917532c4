//! Runs extract -> generate -> compare on a desk-scale synthetic messaging
//! stream, or on an edge list given as the first argument.

use std::time::Instant;

use mtm_core::counter::WindowBound;
use mtm_core::generator::{generate, GenerationConfig};
use mtm_core::ingest::read_events;
use mtm_core::metrics::compare_report;
use mtm_core::sample::{messaging_stream, MessagingParams};
use mtm_core::transition::extract_profile;

fn main() {
    let g = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).expect("open input");
            read_events(std::io::BufReader::new(file))
                .expect("parse input")
                .graph
        }
        None => messaging_stream(
            &MessagingParams {
                nodes: 1900,
                sessions: 15_000,
                horizon: 193 * 86_400,
                ..Default::default()
            },
            1,
        ),
    };
    println!("input: {} events, {} nodes", g.len(), g.node_count());

    let start = Instant::now();
    let profile = extract_profile(&g, 3600, 4).expect("extract");
    println!(
        "extract {:?}: cold fraction {:.4}, transition types {}, mu {:.3}",
        start.elapsed(),
        profile.cold_event_fraction(),
        profile.observed_transition_type_count(),
        profile.mu
    );
    let start = Instant::now();
    let synthetics: Vec<_> = (0..10)
        .map(|seed| generate(&profile, &GenerationConfig::for_profile(&profile, seed)).unwrap())
        .collect();
    println!("generate x10 {:?}", start.elapsed());

    let start = Instant::now();
    let report =
        compare_report(&g, &synthetics, 3600, &[2, 3], 10, WindowBound::Inclusive).unwrap();
    println!("compare {:?}", start.elapsed());
    for m in &report.global {
        println!(
            "{:>20} {:>14.2} {:>14.2} {:?}",
            m.metric, m.original, m.synthetic_mean, m.ratio
        );
    }
    for k in &report.ks {
        println!("KS {:>12} {:.3}", k.distribution, k.mean);
    }
    for s in &report.spectra {
        println!(
            "l={} original {} synthetic {:?} msre {:?}",
            s.l, s.original_total, s.synthetic_totals, s.msre_total
        );
    }
}
