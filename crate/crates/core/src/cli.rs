//! The `mmpareto` command line.
//!
//! Exit codes: 0 success, 1 no path to the target, 2 usage or input error,
//! 3 refused or cut short by a resource ceiling.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    self, crossover_threshold, evaluate_cost, fit_power_law, format_rational, gnuplot_data,
    next_breakpoint_above, next_breakpoint_below, parse_factor, records_to_csv, CostModel,
    ExperimentConfig, FitField, NetworkReport,
};
use crate::error::{Error, Result};
use crate::format::{read_graph, write_json, write_text};
use crate::generator::{complete_multigraph, random_sparse, WeightRange};
use crate::graph::{augment_with_count_colour, ColouredGraph, CountMode, WeightVector};
use crate::ingest::{assemble, cluster_junctions, read_layer};
use crate::oracle;
use crate::solver::{solve, solve_augmented, ParetoRow, SolveOptions, SolveStats};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CEILING: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mmpareto", version, about = "Pareto-optimal paths in multimodal networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pareto sets from a source vertex.
    Solve(SolveArgs),
    /// Brute-force Pareto set between two vertices.
    Oracle(OracleArgs),
    /// Write a random graph in wceg v1 format.
    Generate(GenerateArgs),
    /// Scaling experiment on random complete multigraphs.
    Bench(BenchArgs),
    /// Re-price a Pareto set and find crossover factors for one colour.
    Sensitivity(SensitivityArgs),
    /// Cluster per-mode layers into one multimodal graph.
    Assemble(AssembleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AugmentMode {
    Hops,
    Transfers,
}

#[derive(Debug, Args)]
struct Limits {
    /// Refuse once queued plus finalized labels exceed this many.
    #[arg(long, default_value_t = 20_000_000)]
    max_labels: u64,
    /// Refuse once a solve runs longer than this (milliseconds).
    #[arg(long, default_value_t = 600_000)]
    time_budget_ms: u64,
}

impl Limits {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            max_labels: Some(self.max_labels),
            time_budget: Some(Duration::from_millis(self.time_budget_ms)),
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    graph: PathBuf,
    #[arg(long)]
    source: usize,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    keep_ties: bool,
    #[arg(long, value_enum)]
    augment: Option<AugmentMode>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Report ms=0 instead of measured time.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Debug, Args)]
struct OracleArgs {
    graph: PathBuf,
    #[arg(long)]
    source: usize,
    #[arg(long)]
    target: usize,
    #[arg(long)]
    keep_ties: bool,
    /// Refuse graphs whose simple-path bound exceeds this; 0 disables the guard.
    #[arg(long, default_value_t = oracle::DEFAULT_CEILING)]
    ceiling: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphKind {
    Complete,
    Sparse,
}

#[derive(Debug, Args)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    lo: f64,
    #[arg(long, default_value_t = 100.0)]
    hi: f64,
    #[arg(long, default_value_t = crate::graph::DEFAULT_SCALE)]
    scale: u32,
}

impl WeightArgs {
    fn range(&self) -> WeightRange {
        WeightRange {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GraphKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Edge count (sparse only).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long)]
    seed: u64,
    /// Record CSV (`n,k,seed,mean,max,processed,ms`); stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-n averages for log-log plotting.
    #[arg(long)]
    dat: Option<PathBuf>,
    /// Leave the ms column empty.
    #[arg(long)]
    no_timing: bool,
    /// Stop starting new instances after this many seconds.
    #[arg(long)]
    total_budget_s: Option<u64>,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    limits: Limits,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Debug, Args)]
struct SensitivityArgs {
    graph: PathBuf,
    #[arg(long)]
    source: usize,
    #[arg(long)]
    target: usize,
    /// Colour name whose price factor is varied.
    #[arg(long)]
    sweep_colour: String,
    #[arg(long, value_delimiter = ',')]
    factors: Vec<String>,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Debug, Args)]
struct AssembleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    layers: Vec<PathBuf>,
    #[arg(long)]
    cluster_distance: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decimal places for link lengths.
    #[arg(long, default_value_t = 6)]
    scale: u32,
    /// Also solve from this vertex and print a network report row.
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    limits: Limits,
}

/// Runs the CLI with `args` (including the program name). Returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Assemble(a) => cmd_assemble(a),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_ceiling() {
                EXIT_CEILING
            } else {
                EXIT_USAGE
            }
        }
    }
}

type Output = (String, i32);

fn weights_text(w: &WeightVector, scale: u32) -> Vec<String> {
    w.to_decimal_strings(scale)
}

fn path_text(path: &[usize]) -> String {
    path.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn render_rows(
    g: &ColouredGraph,
    colour_names: &[String],
    source: usize,
    target: Option<usize>,
    rows: &[ParetoRow],
    stats: Option<(&SolveStats, bool)>,
    format: OutputFormat,
) -> String {
    let scale = g.scale();
    let ms = |s: &SolveStats, timing: bool| {
        if timing {
            s.elapsed.as_secs_f64() * 1e3
        } else {
            0.0
        }
    };
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            for r in rows {
                let mut line = format!("pareto {}", r.dest);
                for w in weights_text(&r.weight, scale) {
                    line.push(' ');
                    line.push_str(&w);
                }
                if !r.path.is_empty() {
                    line.push(' ');
                    line.push_str(&path_text(&r.path));
                }
                let _ = writeln!(out, "{line}");
            }
            if let Some((s, timing)) = stats {
                let _ = writeln!(
                    out,
                    "stats processed={} relaxations={} evictions={} peak_queue={} ms={:.3}",
                    s.processed,
                    s.relaxations,
                    s.evictions,
                    s.peak_queue,
                    ms(s, timing)
                );
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = format!("dest,{},path\n", colour_names.join(","));
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    r.dest,
                    weights_text(&r.weight, scale).join(","),
                    path_text(&r.path)
                );
            }
            out
        }
        OutputFormat::Json => {
            let pareto: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "dest": r.dest,
                        "weights": weights_text(&r.weight, scale),
                        "path": r.path,
                    })
                })
                .collect();
            let mut doc = json!({
                "source": source,
                "target": target,
                "colours": colour_names,
                "pareto": pareto,
            });
            if let Some((s, timing)) = stats {
                doc["stats"] = json!({
                    "processed": s.processed,
                    "relaxations": s.relaxations,
                    "evictions": s.evictions,
                    "peak_queue": s.peak_queue,
                    "ms": ms(s, timing),
                });
            }
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            text
        }
    }
}

fn no_path_code(target: Option<usize>, rows: &[ParetoRow]) -> i32 {
    if target.is_some() && rows.is_empty() {
        EXIT_NO_PATH
    } else {
        EXIT_OK
    }
}

fn cmd_solve(a: SolveArgs) -> Result<Output> {
    let g = read_graph(&a.graph)?;
    let opts = SolveOptions {
        keep_ties: a.keep_ties,
        target: a.target,
        ..a.limits.options()
    };
    let timing = !a.no_timing;
    let (rows, stats, names) = match a.augment {
        None => {
            let sol = solve(&g, a.source, &opts)?;
            (sol.rows(), sol.stats, g.colour_names().to_vec())
        }
        Some(mode) => {
            let mode = match mode {
                AugmentMode::Hops => CountMode::Hops,
                AugmentMode::Transfers => CountMode::Transfers,
            };
            let aug = augment_with_count_colour(&g, mode)?;
            let sol = solve_augmented(&aug, a.source, &opts)?;
            (sol.rows(), sol.stats, aug.graph.colour_names().to_vec())
        }
    };
    let text = render_rows(
        &g,
        &names,
        a.source,
        a.target,
        &rows,
        Some((&stats, timing)),
        a.format,
    );
    Ok((text, no_path_code(a.target, &rows)))
}

fn cmd_oracle(a: OracleArgs) -> Result<Output> {
    let g = read_graph(&a.graph)?;
    let ceiling = (a.ceiling > 0).then_some(a.ceiling);
    let paths = oracle::enumerate_simple_paths(&g, a.source, a.target, ceiling)?;
    let enumerated = paths.len();
    let mut rows: Vec<ParetoRow> = oracle::pareto_filter(paths, a.keep_ties)
        .into_iter()
        .map(|(path, weight)| ParetoRow {
            dest: a.target,
            weight,
            path,
        })
        .collect();
    crate::solver::sort_rows(&mut rows);
    let mut text = render_rows(
        &g,
        g.colour_names(),
        a.source,
        Some(a.target),
        &rows,
        None,
        a.format,
    );
    if matches!(a.format, OutputFormat::Text) {
        let _ = writeln!(text, "enumerated {enumerated}");
    }
    Ok((text, no_path_code(Some(a.target), &rows)))
}

fn emit(path: &Option<PathBuf>, text: String) -> Result<String> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<Output> {
    let g = match a.kind {
        GraphKind::Complete => {
            if a.m.is_some() {
                return Err(Error::usage("--m applies to sparse graphs only"));
            }
            complete_multigraph(a.n, a.k, a.seed, a.weights.range(), a.weights.scale)?
        }
        GraphKind::Sparse => {
            let m = a
                .m
                .ok_or_else(|| Error::usage("sparse graphs need --m"))?;
            random_sparse(a.n, a.k, m, a.seed, a.weights.range(), a.weights.scale)?
        }
    };
    let text = if a.json { write_json(&g) + "\n" } else { write_text(&g) };
    Ok((emit(&a.out, text)?, EXIT_OK))
}

fn cmd_bench(a: BenchArgs) -> Result<Output> {
    let cfg = ExperimentConfig {
        range: a.weights.range(),
        scale: a.weights.scale,
        max_labels: Some(a.limits.max_labels),
        solve_budget: Some(Duration::from_millis(a.limits.time_budget_ms)),
        total_budget: a.total_budget_s.map(Duration::from_secs),
        parallel: !a.sequential,
    };
    let outcome = analysis::run_experiment(&a.n_list, a.k, a.reps, a.seed, &cfg)?;
    let csv = records_to_csv(&outcome.records, !a.no_timing);
    let mut text = emit(&a.csv, csv)?;
    if let Some(dat) = &a.dat {
        std::fs::write(dat, gnuplot_data(&outcome.records))?;
    }
    for (name, field) in [
        ("mean_cardinality", FitField::MeanCardinality),
        ("processed", FitField::Processed),
    ] {
        match fit_power_law(&outcome.records, field) {
            Ok(f) => {
                let _ = writeln!(
                    text,
                    "fit {name} exponent={:.4} intercept={:.4} r2={:.4}",
                    f.exponent, f.intercept, f.r2
                );
            }
            Err(e) => {
                let _ = writeln!(text, "fit {name} skipped: {e}");
            }
        }
    }
    if outcome.truncated {
        let _ = writeln!(
            text,
            "truncated: {} of {} instances completed",
            outcome.records.len(),
            a.n_list.len() * a.reps
        );
        return Ok((text, EXIT_CEILING));
    }
    Ok((text, EXIT_OK))
}

fn cmd_sensitivity(a: SensitivityArgs) -> Result<Output> {
    let g = read_graph(&a.graph)?;
    let colour = g
        .colour_by_name(&a.sweep_colour)
        .ok_or_else(|| Error::usage(format!("no colour named `{}`", a.sweep_colour)))?;
    let opts = SolveOptions {
        target: Some(a.target),
        ..a.limits.options()
    };
    let sol = solve(&g, a.source, &opts)?;
    let mut rows = sol.rows();
    crate::solver::sort_rows(&mut rows);
    if rows.is_empty() {
        return Ok((String::from("no path\n"), EXIT_NO_PATH));
    }
    let set: Vec<WeightVector> = rows.iter().map(|r| r.weight.clone()).collect();
    let scale = g.scale();
    let describe = |i: usize| weights_text(&set[i], scale).join(" ");

    let base = CostModel::unit(g.colour_count());
    let mut text = String::new();
    let best = evaluate_cost(&set, &base, scale)?.expect("non-empty set");
    let _ = writeln!(
        text,
        "base best {} cost {}",
        describe(best.index),
        format_rational(&best.cost)
    );
    for f in &a.factors {
        let factor = parse_factor(f)?;
        let model = base.with_factor(colour, factor.clone())?;
        let c = evaluate_cost(&set, &model, scale)?.expect("non-empty set");
        let _ = writeln!(
            text,
            "factor {} best {} cost {}",
            format_rational(&factor),
            describe(c.index),
            format_rational(&c.cost)
        );
    }
    let bps = crossover_threshold(&set, colour, &base)?;
    for b in &bps {
        let _ = writeln!(
            text,
            "breakpoint {} best {}",
            format_rational(&b.factor),
            describe(b.best)
        );
    }
    let one = base.factors()[colour.index()].clone();
    if let Some(b) = next_breakpoint_above(&bps, &one) {
        let _ = writeln!(text, "raise_limit {}", format_rational(&b.factor));
    }
    if let Some(b) = next_breakpoint_below(&bps, &one) {
        let _ = writeln!(text, "lower_limit {}", format_rational(&b.factor));
    }
    Ok((text, EXIT_OK))
}

fn cmd_assemble(a: AssembleArgs) -> Result<Output> {
    let layers = a
        .layers
        .iter()
        .map(read_layer)
        .collect::<Result<Vec<_>>>()?;
    let distance: f64 = a
        .cluster_distance
        .parse()
        .map_err(|_| Error::usage("--cluster-distance must be a number"))?;
    let map = cluster_junctions(&layers, distance)?;
    let g = assemble(&layers, &map, a.scale)?;
    let mut text = emit(&a.out, write_text(&g))?;
    let _ = writeln!(
        text,
        "assembled vertices={} edges={} colours={}",
        g.vertex_count(),
        g.edge_count(),
        g.colour_count()
    );
    if let Some(source) = a.source {
        let sol = solve(&g, source, &a.limits.options())?;
        let mut report = NetworkReport::from_solution(
            &a.cluster_distance,
            g.vertex_count(),
            g.edge_count(),
            &sol,
        );
        if a.no_timing {
            report.minutes = 0.0;
        }
        let _ = writeln!(text, "{}\n{}", NetworkReport::header(), report.row());
    }
    Ok((text, EXIT_OK))
}
