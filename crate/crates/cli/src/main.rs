//! `mtm`: extract transition profiles from temporal graphs, generate
//! synthetic graphs from them, and measure how close the two are.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mtm_core::counter::{count_motifs, WindowBound};
use mtm_core::generator::{generate, GenerationConfig};
use mtm_core::ingest::{read_events, write_events, TemporalGraph};
use mtm_core::metrics::{compare_report, global_stats, ComparisonReport, GlobalStats};
use mtm_core::motif::{enumerate_codes, transition_type_count};
use mtm_core::transition::{extract_profile, TransitionProfile};

#[derive(Parser)]
#[command(
    name = "mtm",
    version,
    about = "Temporal graph generation from motif transitions"
)]
struct Cli {
    /// Worker threads for counting and multi-run generation.
    #[arg(long, global = true, env = "MTM_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List every motif code with a given number of events.
    Spectrum {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        l: u8,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Extract a transition profile from an edge list.
    Extract {
        input: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(2..))]
        lmax: u8,
        /// Transition time limit in seconds.
        #[arg(long, default_value_t = 3600, value_parser = clap::value_parser!(i64).range(1..))]
        delta: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic edge lists from a profile.
    Generate {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of graphs; run i uses seed + i.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        /// Output file. With several runs, `name.ext` becomes `name_0.ext`, `name_1.ext`, ...
        #[arg(long)]
        out: PathBuf,
    },
    /// Count motif instances with a given number of events.
    Count {
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        l: u8,
        #[arg(long, default_value_t = 3600, value_parser = clap::value_parser!(i64).range(1..))]
        delta_c: i64,
        /// Whether a gap of exactly delta-c still counts.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        delta_c_inclusive: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print global statistics of an edge list.
    Stats {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compare an original edge list against synthetic ones.
    Compare {
        original: PathBuf,
        /// Synthetic edge lists; glob patterns are expanded.
        #[arg(required = true)]
        synthetic: Vec<String>,
        #[arg(long, default_value_t = 3600, value_parser = clap::value_parser!(i64).range(1..))]
        delta_c: i64,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        delta_c_inclusive: bool,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        l_set: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        windows: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Report file (json) or directory (csv). Without it the report goes
        /// to stdout and the summary table to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Spectrum { l, format } => cmd_spectrum(l as usize, format),
        Command::Extract {
            input,
            lmax,
            delta,
            out,
        } => cmd_extract(&input, lmax as usize, delta, &out),
        Command::Generate {
            profile,
            seed,
            runs,
            out,
        } => cmd_generate(&profile, seed, runs, &out),
        Command::Count {
            input,
            l,
            delta_c,
            delta_c_inclusive,
            format,
            out,
        } => {
            let g = load_graph(&input)?;
            let counts = count_motifs(&g, l as usize, delta_c, bound(delta_c_inclusive))?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&counts)? + "\n",
                Format::Csv => counts.to_csv(),
            };
            emit(out.as_deref(), &text)
        }
        Command::Stats { input, format } => {
            let stats = global_stats(&load_graph(&input)?)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&stats)? + "\n",
                Format::Csv => stats_csv(&stats),
            };
            emit(None, &text)
        }
        Command::Compare {
            original,
            synthetic,
            delta_c,
            delta_c_inclusive,
            l_set,
            windows,
            format,
            out,
        } => cmd_compare(
            &original,
            &synthetic,
            delta_c,
            bound(delta_c_inclusive),
            &l_set,
            windows,
            format,
            out.as_deref(),
        ),
    }
}

fn bound(inclusive: bool) -> WindowBound {
    if inclusive {
        WindowBound::Inclusive
    } else {
        WindowBound::Exclusive
    }
}

fn load_graph(path: &Path) -> Result<TemporalGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let ingested =
        read_events(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    if ingested.self_loops_dropped > 0 {
        eprintln!(
            "{}: dropped {} self-loop events",
            path.display(),
            ingested.self_loops_dropped
        );
    }
    Ok(ingested.graph)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_spectrum(l: usize, format: Option<Format>) -> Result<()> {
    let codes = enumerate_codes(l)?;
    let text = match format {
        Some(Format::Json) => {
            let doc = serde_json::json!({
                "l": l,
                "size": codes.len(),
                "transition_types": transition_type_count(l),
                "codes": codes,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Some(Format::Csv) => {
            let mut s = String::from("code,static_edges,nodes\n");
            for c in &codes {
                s.push_str(&format!(
                    "{c},{},{}\n",
                    c.static_edge_count(),
                    c.node_count()
                ));
            }
            s
        }
        None => codes.iter().map(|c| format!("{c}\n")).collect(),
    };
    emit(None, &text)?;
    if format.is_none() {
        eprintln!(
            "{} codes with {l} events; {} transition types up to l_max = {l}",
            codes.len(),
            transition_type_count(l)
        );
    }
    Ok(())
}

fn cmd_extract(input: &Path, l_max: usize, delta: i64, out: &Path) -> Result<()> {
    let g = load_graph(input)?;
    let profile = extract_profile(&g, delta, l_max)?;
    fs::write(out, profile.to_json()?).with_context(|| format!("writing {}", out.display()))?;
    println!("events            {}", profile.event_count);
    println!("cold events       {}", profile.cold_event_count);
    println!("cold fraction     {:.4}", profile.cold_event_fraction());
    println!(
        "transition types  {} of {}",
        profile.observed_transition_type_count(),
        transition_type_count(l_max)
    );
    println!("mu                {:.4}", profile.mu);
    Ok(())
}

/// `out.txt` with run 3 becomes `out_3.txt`.
fn run_path(out: &Path, run: u64, runs: u64) -> PathBuf {
    if runs == 1 {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{run}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{run}"),
    };
    out.with_file_name(name)
}

fn cmd_generate(profile_path: &Path, seed: u64, runs: u64, out: &Path) -> Result<()> {
    let text = fs::read_to_string(profile_path)
        .with_context(|| format!("reading {}", profile_path.display()))?;
    let profile = TransitionProfile::from_json(&text)
        .with_context(|| format!("parsing {}", profile_path.display()))?;
    let results: Vec<Result<(PathBuf, usize)>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let run_seed = seed.wrapping_add(i);
            let g = generate(&profile, &GenerationConfig::for_profile(&profile, run_seed))?;
            let path = run_path(out, i, runs);
            let file =
                File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            writeln!(
                w,
                "# mtm generate seed={run_seed} l_max={} delta={}",
                profile.l_max, profile.delta
            )?;
            write_events(&g, &mut w)?;
            w.flush()?;
            Ok((path, g.len()))
        })
        .collect();
    for r in results {
        let (path, n) = r?;
        println!("{}\t{n} events", path.display());
    }
    Ok(())
}

fn stats_csv(s: &GlobalStats) -> String {
    let mut out = String::from("metric,value\n");
    for (name, v) in GlobalStats::FIELDS.iter().zip(s.values()) {
        out.push_str(&format!("{name},{v}\n"));
    }
    out
}

fn expand_synthetic(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for pat in patterns {
        let literal = Path::new(pat);
        if literal.is_file() {
            paths.push(literal.to_path_buf());
            continue;
        }
        let before = paths.len();
        for entry in glob::glob(pat).with_context(|| format!("bad pattern {pat}"))? {
            let p = entry?;
            if p.is_file() {
                paths.push(p);
            }
        }
        if paths.len() == before {
            bail!("no synthetic files match {pat}");
        }
    }
    paths.sort();
    paths.dedup();
    Ok(paths)
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    original: &Path,
    synthetic: &[String],
    delta_c: i64,
    bound: WindowBound,
    l_set: &[usize],
    windows: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let paths = expand_synthetic(synthetic)?;
    let orig = load_graph(original)?;
    let synthetics = paths
        .iter()
        .map(|p| load_graph(p))
        .collect::<Result<Vec<_>>>()?;
    let report = compare_report(&orig, &synthetics, delta_c, l_set, windows, bound)?;
    let table = summary_table(&report);

    match (format, out) {
        (Format::Json, Some(path)) => {
            emit(Some(path), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            print!("{table}");
        }
        (Format::Json, None) => {
            emit(None, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            eprint!("{table}");
        }
        (Format::Csv, Some(dir)) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, csv) in report.csv_tables() {
                emit(Some(&dir.join(format!("{name}.csv"))), &csv)?;
            }
            print!("{table}");
        }
        (Format::Csv, None) => {
            for (name, csv) in report.csv_tables() {
                println!("# {name}");
                print!("{csv}");
            }
            eprint!("{table}");
        }
    }
    Ok(())
}

fn summary_table(r: &ComparisonReport) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    let mut s = format!("{} synthetic graph(s), delta_c {} s\n\n", r.runs, r.delta_c);
    s.push_str(&format!(
        "{:<20} {:>14} {:>14} {:>8}\n",
        "metric", "original", "synthetic", "ratio"
    ));
    for m in &r.global {
        s.push_str(&format!(
            "{:<20} {:>14.2} {:>14.2} {:>8}\n",
            m.metric,
            m.original,
            m.synthetic_mean,
            opt(m.ratio)
        ));
    }
    s.push_str(&format!("\n{:<20} {:>8}\n", "distribution", "KS"));
    for k in &r.ks {
        s.push_str(&format!("{:<20} {:>8.4}\n", k.distribution, k.mean));
    }
    s.push_str(&format!(
        "\n{:<4} {:>14} {:>14} {:>10}\n",
        "l", "original", "synthetic", "MSRE"
    ));
    for sp in &r.spectra {
        let mean = sp.synthetic_totals.iter().sum::<u64>() as f64
            / sp.synthetic_totals.len().max(1) as f64;
        s.push_str(&format!(
            "{:<4} {:>14} {:>14.1} {:>10}\n",
            sp.l,
            sp.original_total,
            mean,
            opt(sp.msre_total)
        ));
    }
    s
}
