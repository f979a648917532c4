mod support;

use mtm_core::counter::{count_motifs, WindowBound};
use mtm_core::transition::extract_with_processes;
use rand::Rng;
use support::{oracle_count, oracle_extract, random_stream, rng};

#[test]
fn extraction_matches_definitions() {
    let mut r = rng(7);
    for _ in 0..300 {
        let g = random_stream(&mut r, 10, 5, 30);
        let delta = r.random_range(1..12);
        let l_max = r.random_range(2..=5);
        let (profile, procs) = extract_with_processes(&g, delta, l_max).unwrap();
        let oracle = oracle_extract(&g, delta, l_max);

        let got: Vec<Vec<usize>> = procs.iter().map(|p| p.events.clone()).collect();
        assert_eq!(
            got,
            oracle.processes,
            "processes differ on {:?}",
            g.events()
        );
        let counts: std::collections::BTreeMap<String, u64> = profile
            .counts
            .iter()
            .map(|(k, &v)| (k.to_string(), v))
            .collect();
        assert_eq!(counts, oracle.counts);
        let dts: std::collections::BTreeMap<String, (i64, u64)> = profile
            .delta_t_sums
            .iter()
            .map(|(k, &v)| (k.to_string(), v))
            .collect();
        assert_eq!(dts, oracle.delta_t_sums);
        assert!((profile.mu - oracle.mu).abs() < 1e-12);
        assert_eq!(profile.cold_event_count, oracle.processes.len());
    }
}

#[test]
fn counting_matches_exhaustive_subsets() {
    let mut r = rng(11);
    for _ in 0..120 {
        let g = random_stream(&mut r, 12, 5, 40);
        let delta_c = r.random_range(1..15);
        for l in 2..=4 {
            let fast = count_motifs(&g, l, delta_c, WindowBound::Inclusive).unwrap();
            assert_eq!(
                fast.counts,
                oracle_count(&g, l, delta_c),
                "l={l} on {:?}",
                g.events()
            );
        }
    }
}
