//! Fidelity metrics: global statistics, two-sample KS distances, MSRE of
//! motif counts, and the combined comparison report.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counter::{count_motifs, window_totals, CountError, SpectrumCounts, WindowBound};
use crate::ingest::{NodeId, TemporalGraph};
use crate::motif::MotifCode;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("statistics of an empty graph are undefined")]
    EmptyGraph,
    #[error("KS statistic needs two non-empty samples")]
    EmptySample,
    #[error("comparison needs at least one synthetic graph")]
    NoSynthetics,
    #[error(transparent)]
    Count(#[from] CountError),
}

/// Graph-level summary used to compare an input with its synthetics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalStats {
    pub edge_count: usize,
    /// Mean of in-degree plus out-degree over nodes of the static projection.
    pub mean_degree: f64,
    /// Weakly connected components of the static projection.
    pub n_components: usize,
    pub lcc_size: usize,
    pub event_count: usize,
    pub timespan_seconds: i64,
    /// Mean gap between consecutive events in global time order.
    pub mean_iet: f64,
    pub max_events_on_edge: usize,
}

impl GlobalStats {
    pub const FIELDS: [&'static str; 8] = [
        "edge_count",
        "mean_degree",
        "n_components",
        "lcc_size",
        "event_count",
        "timespan_seconds",
        "mean_iet",
        "max_events_on_edge",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.edge_count as f64,
            self.mean_degree,
            self.n_components as f64,
            self.lcc_size as f64,
            self.event_count as f64,
            self.timespan_seconds as f64,
            self.mean_iet,
            self.max_events_on_edge as f64,
        ]
    }
}

pub fn global_stats(g: &TemporalGraph) -> Result<GlobalStats, MetricsError> {
    if g.is_empty() {
        return Err(MetricsError::EmptyGraph);
    }
    let mut per_edge: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    for e in g.events() {
        *per_edge.entry((e.src, e.dst)).or_default() += 1;
        for n in [e.src, e.dst] {
            let next = index.len();
            index.entry(n).or_insert(next);
        }
    }
    let mut uf = UnionFind::<usize>::new(index.len());
    for &(s, d) in per_edge.keys() {
        uf.union(index[&s], index[&d]);
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for i in 0..index.len() {
        *sizes.entry(uf.find(i)).or_default() += 1;
    }
    let events = g.events();
    let mean_iet = if events.len() > 1 {
        g.timespan() as f64 / (events.len() - 1) as f64
    } else {
        0.0
    };
    Ok(GlobalStats {
        edge_count: per_edge.len(),
        mean_degree: 2.0 * per_edge.len() as f64 / index.len() as f64,
        n_components: sizes.len(),
        lcc_size: sizes.values().copied().max().unwrap_or(0),
        event_count: events.len(),
        timespan_seconds: g.timespan(),
        mean_iet,
        max_events_on_edge: per_edge.values().copied().max().unwrap_or(0),
    })
}

/// Two-sample Kolmogorov-Smirnov distance `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Mean squared relative error `(1/r) Σ ((synthetic_i - original) / synthetic_i)^2`.
///
/// `None` when there are no replicas or any replica count is zero.
pub fn msre(synthetic: &[u64], original: u64) -> Option<f64> {
    if synthetic.is_empty() || synthetic.contains(&0) {
        return None;
    }
    let sum: f64 = synthetic
        .iter()
        .map(|&s| {
            let rel = (s as f64 - original as f64) / s as f64;
            rel * rel
        })
        .sum();
    Some(sum / synthetic.len() as f64)
}

/// Static-projection in- and out-degrees of every node.
pub fn degree_samples(g: &TemporalGraph) -> (Vec<f64>, Vec<f64>) {
    let mut deg: BTreeMap<NodeId, (usize, usize)> = BTreeMap::new();
    let edges: BTreeSet<(NodeId, NodeId)> = g.events().iter().map(|e| (e.src, e.dst)).collect();
    for e in g.events() {
        deg.entry(e.src).or_default();
        deg.entry(e.dst).or_default();
    }
    for (s, d) in edges {
        deg.get_mut(&d).unwrap().0 += 1;
        deg.get_mut(&s).unwrap().1 += 1;
    }
    deg.values().map(|&(i, o)| (i as f64, o as f64)).unzip()
}

pub fn iet_samples(g: &TemporalGraph) -> Vec<f64> {
    g.events()
        .windows(2)
        .map(|w| (w[1].t - w[0].t) as f64)
        .collect()
}

/// Timestamps shifted so the first event is at zero.
pub fn timestamp_samples(g: &TemporalGraph) -> Vec<f64> {
    let t0 = g.events().first().map(|e| e.t).unwrap_or(0);
    g.events().iter().map(|e| (e.t - t0) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub original: f64,
    pub synthetic_mean: f64,
    /// `synthetic_mean / original`; absent when the original is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsComparison {
    pub distribution: String,
    pub mean: f64,
    pub per_run: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeError {
    pub code: MotifCode,
    pub original: u64,
    pub synthetic: Vec<u64>,
    pub msre: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub l: usize,
    pub original_total: u64,
    pub synthetic_totals: Vec<u64>,
    pub msre_total: Option<f64>,
    pub per_code: Vec<CodeError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowTrend {
    pub l: usize,
    pub original: Vec<u64>,
    pub synthetic_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub runs: usize,
    pub delta_c: i64,
    pub window_count: usize,
    pub original: GlobalStats,
    pub global: Vec<MetricComparison>,
    pub ks: Vec<KsComparison>,
    pub spectra: Vec<SpectrumComparison>,
    pub windows: Vec<WindowTrend>,
}

impl ComparisonReport {
    pub fn ks_mean(&self, distribution: &str) -> Option<f64> {
        self.ks
            .iter()
            .find(|k| k.distribution == distribution)
            .map(|k| k.mean)
    }

    pub fn ratio(&self, metric: &str) -> Option<f64> {
        self.global
            .iter()
            .find(|m| m.metric == metric)
            .and_then(|m| m.ratio)
    }

    pub fn spectrum(&self, l: usize) -> Option<&SpectrumComparison> {
        self.spectra.iter().find(|s| s.l == l)
    }

    /// One CSV document per table: ratios, KS, MSRE grid, window trends.
    pub fn csv_tables(&self) -> Vec<(&'static str, String)> {
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut ratios = String::from("metric,original,synthetic_mean,ratio\n");
        for m in &self.global {
            ratios.push_str(&format!(
                "{},{},{},{}\n",
                m.metric,
                m.original,
                m.synthetic_mean,
                fmt_opt(m.ratio)
            ));
        }
        let mut ks = String::from("distribution,mean_ks\n");
        for k in &self.ks {
            ks.push_str(&format!("{},{}\n", k.distribution, k.mean));
        }
        let mut grid = String::from("l,code,original,synthetic_mean,msre\n");
        for s in &self.spectra {
            let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len().max(1) as f64;
            grid.push_str(&format!(
                "{},total,{},{},{}\n",
                s.l,
                s.original_total,
                mean(&s.synthetic_totals),
                fmt_opt(s.msre_total)
            ));
            for c in &s.per_code {
                grid.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.l,
                    c.code,
                    c.original,
                    mean(&c.synthetic),
                    fmt_opt(c.msre)
                ));
            }
        }
        let mut windows = String::from("l,window,original,synthetic_mean\n");
        for w in &self.windows {
            for (i, (o, s)) in w.original.iter().zip(&w.synthetic_mean).enumerate() {
                windows.push_str(&format!("{},{},{},{}\n", w.l, i, o, s));
            }
        }
        vec![
            ("ratios", ratios),
            ("ks", ks),
            ("msre", grid),
            ("windows", windows),
        ]
    }
}

/// Compares `original` against every graph in `synthetics`.
pub fn compare_report(
    original: &TemporalGraph,
    synthetics: &[TemporalGraph],
    delta_c: i64,
    l_set: &[usize],
    window_count: usize,
    bound: WindowBound,
) -> Result<ComparisonReport, MetricsError> {
    if synthetics.is_empty() {
        return Err(MetricsError::NoSynthetics);
    }
    if window_count == 0 {
        return Err(CountError::WindowCount.into());
    }
    let runs = synthetics.len() as f64;
    let orig_stats = global_stats(original)?;
    let syn_stats = synthetics
        .iter()
        .map(global_stats)
        .collect::<Result<Vec<_>, _>>()?;
    let orig_values = orig_stats.values();
    let global = GlobalStats::FIELDS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let mean = syn_stats.iter().map(|s| s.values()[k]).sum::<f64>() / runs;
            let original = orig_values[k];
            MetricComparison {
                metric: name.to_string(),
                original,
                synthetic_mean: mean,
                ratio: (original != 0.0).then(|| mean / original),
            }
        })
        .collect();

    type Sampler = fn(&TemporalGraph) -> Vec<f64>;
    let samplers: [(&str, Sampler); 4] = [
        ("in_degree", |g| degree_samples(g).0),
        ("out_degree", |g| degree_samples(g).1),
        ("iet", iet_samples),
        ("timestamp", timestamp_samples),
    ];
    let mut ks = Vec::new();
    for (name, sampler) in samplers {
        let reference = sampler(original);
        let per_run = synthetics
            .iter()
            .map(|s| {
                let sample = sampler(s);
                if reference.is_empty() && sample.is_empty() {
                    Ok(0.0)
                } else {
                    ks_statistic(&reference, &sample)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        ks.push(KsComparison {
            distribution: name.to_string(),
            mean: per_run.iter().sum::<f64>() / runs,
            per_run,
        });
    }

    let mut spectra = Vec::new();
    let mut windows = Vec::new();
    let (t_start, t_end) = (
        original.events()[0].t,
        original.events()[original.len() - 1].t,
    );
    for &l in l_set {
        let orig_counts = count_motifs(original, l, delta_c, bound)?;
        let syn_counts = synthetics
            .iter()
            .map(|s| count_motifs(s, l, delta_c, bound))
            .collect::<Result<Vec<_>, _>>()?;
        spectra.push(spectrum_comparison(l, &orig_counts, &syn_counts));

        let orig_w = window_totals(original, l, delta_c, bound, t_start, t_end, window_count)?;
        let mut mean_w = vec![0.0; window_count];
        for s in synthetics {
            let w = window_totals(s, l, delta_c, bound, t_start, t_end, window_count)?;
            for (acc, v) in mean_w.iter_mut().zip(w) {
                *acc += v as f64 / runs;
            }
        }
        windows.push(WindowTrend {
            l,
            original: orig_w,
            synthetic_mean: mean_w,
        });
    }

    Ok(ComparisonReport {
        runs: synthetics.len(),
        delta_c,
        window_count,
        original: orig_stats,
        global,
        ks,
        spectra,
        windows,
    })
}

fn spectrum_comparison(
    l: usize,
    original: &SpectrumCounts,
    synthetics: &[SpectrumCounts],
) -> SpectrumComparison {
    let codes: BTreeSet<&MotifCode> = original
        .counts
        .keys()
        .chain(synthetics.iter().flat_map(|s| s.counts.keys()))
        .collect();
    let per_code = codes
        .into_iter()
        .map(|code| {
            let synthetic: Vec<u64> = synthetics.iter().map(|s| s.get(code)).collect();
            let orig = original.get(code);
            CodeError {
                code: code.clone(),
                original: orig,
                msre: msre(&synthetic, orig),
                synthetic,
            }
        })
        .collect();
    let synthetic_totals: Vec<u64> = synthetics.iter().map(|s| s.total).collect();
    SpectrumComparison {
        l,
        original_total: original.total,
        msre_total: msre(&synthetic_totals, original.total),
        synthetic_totals,
        per_code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Event;

    fn graph(events: &[(u64, u64, i64)]) -> TemporalGraph {
        TemporalGraph::from_events(
            events
                .iter()
                .map(|&(s, d, t)| Event::new(s, d, t))
                .collect(),
        )
    }

    #[test]
    fn dyad_stats() {
        let s = global_stats(&graph(&[(1, 2, 0), (2, 1, 5)])).unwrap();
        assert_eq!(s.edge_count, 2);
        assert_eq!(s.event_count, 2);
        assert_eq!(s.timespan_seconds, 5);
        assert_eq!(s.mean_iet, 5.0);
        assert_eq!(s.max_events_on_edge, 1);
        assert_eq!(s.n_components, 1);
        assert_eq!(s.lcc_size, 2);
        assert_eq!(s.mean_degree, 2.0);
    }

    #[test]
    fn disjoint_dyads() {
        let s = global_stats(&graph(&[(1, 2, 0), (3, 4, 1), (1, 2, 2)])).unwrap();
        assert_eq!(s.n_components, 2);
        assert_eq!(s.lcc_size, 2);
        assert_eq!(s.max_events_on_edge, 2);
        assert_eq!(
            global_stats(&TemporalGraph::default()),
            Err(MetricsError::EmptyGraph)
        );
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_statistic(&[0.0; 3], &[1.0; 3]).unwrap(), 1.0);
        assert_eq!(
            ks_statistic(&[1.0, 2.0, 3.0, 4.0], &[3.0, 4.0, 5.0, 6.0]).unwrap(),
            0.5
        );
        assert_eq!(ks_statistic(&[], &[1.0]), Err(MetricsError::EmptySample));
    }

    #[test]
    fn msre_examples() {
        assert_eq!(msre(&[100, 100], 100), Some(0.0));
        assert_eq!(msre(&[200], 100), Some(0.25));
        assert_eq!(msre(&[50, 200], 100), Some(0.625));
        assert_eq!(msre(&[0, 200], 100), None);
        assert_eq!(msre(&[], 100), None);
    }

    #[test]
    fn self_comparison_is_exact() {
        let g = graph(&[
            (0, 1, 0),
            (1, 2, 3),
            (2, 0, 7),
            (0, 1, 8),
            (3, 1, 20),
            (1, 3, 25),
        ]);
        let r = compare_report(
            &g,
            &[g.clone(), g.clone()],
            10,
            &[2, 3],
            4,
            WindowBound::Inclusive,
        )
        .unwrap();
        assert_eq!(r.global.len(), 8);
        assert!(r.global.iter().all(|m| m.ratio == Some(1.0)));
        let names: Vec<&str> = r.ks.iter().map(|k| k.distribution.as_str()).collect();
        assert_eq!(names, ["in_degree", "out_degree", "iet", "timestamp"]);
        assert!(r.ks.iter().all(|k| k.mean == 0.0));
        for s in &r.spectra {
            assert_eq!(s.msre_total, Some(0.0));
            assert!(s.per_code.iter().all(|c| c.msre == Some(0.0)));
        }
        assert_eq!(r.csv_tables().len(), 4);
    }

    #[test]
    fn windows_follow_original_range() {
        let orig = graph(&[(0, 1, 0), (1, 0, 1), (0, 1, 1000)]);
        let syn = graph(&[(0, 1, 0), (1, 0, 1), (0, 1, 2)]);
        let r = compare_report(&orig, &[syn], 10, &[2], 4, WindowBound::Inclusive).unwrap();
        assert_eq!(r.windows[0].synthetic_mean, vec![3.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.windows[0].original, vec![1, 0, 0, 0]);
    }

    #[test]
    fn report_needs_synthetics() {
        let g = graph(&[(0, 1, 0)]);
        assert_eq!(
            compare_report(&g, &[], 10, &[2], 4, WindowBound::Inclusive),
            Err(MetricsError::NoSynthetics)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ks_symmetric_and_bounded(a in prop::collection::vec(0u8..20, 1..30), b in prop::collection::vec(0u8..20, 1..30)) {
                let a: Vec<f64> = a.into_iter().map(f64::from).collect();
                let b: Vec<f64> = b.into_iter().map(f64::from).collect();
                let d = ks_statistic(&a, &b).unwrap();
                prop_assert_eq!(d, ks_statistic(&b, &a).unwrap());
                prop_assert!((0.0..=1.0).contains(&d));
                prop_assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
                // brute force over every breakpoint
                let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
                let brute = a.iter().chain(&b).map(|&x| (cdf(&a, x) - cdf(&b, x)).abs()).fold(0.0, f64::max);
                prop_assert!((d - brute).abs() < 1e-12);
            }

            #[test]
            fn msre_order_invariant(mut v in prop::collection::vec(1u64..500, 1..8), orig in 0u64..500) {
                let a = msre(&v, orig).unwrap();
                v.reverse();
                let b = msre(&v, orig).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            }
        }
    }
}
