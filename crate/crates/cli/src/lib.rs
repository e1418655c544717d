//! The `irsym` command line: solve, bench, certify and oracle.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use irsym::oracle::{brute_force_automorphisms, OracleMode};
use irsym::tree::CellSelector;
use irsym::{ColoredGraph, ParseError, Permutation, SolverOptions};
use rand::seq::SliceRandom;

pub mod bench;
pub mod report;

pub use report::RunReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "irsym",
    version,
    about = "Randomized parallel graph automorphism groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute generators and the order of the automorphism group.
    Solve(SolveArgs),
    /// Time solves over many inputs and thread counts, as CSV.
    Bench(BenchArgs),
    /// Check that permutations are automorphisms of a graph.
    Certify(CertifyArgs),
    /// Brute-force group order of a graph with at most 10 vertices.
    Oracle(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Jsonl,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Selector {
    FirstLargest,
    FirstSmallest,
    First,
}

impl From<Selector> for CellSelector {
    fn from(s: Selector) -> Self {
        match s {
            Selector::FirstLargest => CellSelector::FirstLargest,
            Selector::FirstSmallest => CellSelector::FirstSmallest,
            Selector::First => CellSelector::First,
        }
    }
}

/// Solver knobs shared by `solve` and `bench`.
#[derive(Args, Debug, Clone)]
struct Tuning {
    /// Error bound in (0, 1).
    #[arg(long = "error", default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Selector::FirstLargest)]
    selector: Selector,
    /// Extra refinement events hashed into deviation values.
    #[arg(long, default_value_t = 5)]
    deviation_extension: usize,
    #[arg(long, default_value_t = 8)]
    extra_targets: usize,
    #[arg(long)]
    no_deviation_sets: bool,
    /// Do not merge BFS children by known automorphisms.
    #[arg(long)]
    no_merge: bool,
    #[arg(long)]
    no_base_aligned: bool,
    /// Memory cap for one BFS level.
    #[arg(long, default_value_t = 2048)]
    bfs_memory_mb: usize,
    #[arg(long, default_value_t = 64.0)]
    cost_factor: f64,
    #[arg(long, default_value_t = 3)]
    hard_factor: usize,
}

impl Tuning {
    fn validate(&self) -> Result<(), String> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(format!("--error must lie in (0, 1), got {}", self.epsilon));
        }
        if self.cost_factor.is_nan() || self.cost_factor <= 0.0 {
            return Err("--cost-factor must be positive".into());
        }
        if self.hard_factor == 0 {
            return Err("--hard-factor must be at least 1".into());
        }
        Ok(())
    }

    fn options(&self, threads: usize, seed: u64) -> SolverOptions {
        SolverOptions {
            epsilon: self.epsilon,
            threads,
            seed,
            selector: self.selector.into(),
            deviation_extension: self.deviation_extension,
            extra_targets: self.extra_targets,
            deviation_sets: !self.no_deviation_sets,
            merge_orbits: !self.no_merge,
            bfs_memory_cap: self.bfs_memory_mb << 20,
            cost_factor: self.cost_factor,
            hard_factor: self.hard_factor,
            base_aligned: !self.no_base_aligned,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Default: drawn from system entropy.
    #[arg(long)]
    seed: Option<u64>,
    /// Relabel the vertices randomly (derived from the seed) before solving.
    /// Generators are still reported in the input's labels.
    #[arg(long)]
    permute: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Also write the generators, one per line, to this file.
    #[arg(long)]
    write_generators: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Glob pattern of input files.
    #[arg(long)]
    inputs: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    threads_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Per-solve time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// File with one permutation in cycle notation per line.
    #[arg(long)]
    generators: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Test all n! permutations instead of backtracking.
    #[arg(long)]
    exhaustive: bool,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve(a) => cmd_solve(&a, &mut out),
        Command::Bench(a) => cmd_bench(&a, &mut out),
        Command::Certify(a) => cmd_certify(&a, &mut out),
        Command::Oracle(a) => cmd_oracle(&a, &mut out),
    }
}

pub fn read_graph(path: &Path) -> Result<ColoredGraph, ParseError> {
    let file = std::fs::File::open(path)
        .map_err(|e| ParseError::Io(format!("{}: {e}", path.display())))?;
    ColoredGraph::read_from(std::io::BufReader::new(file))
}

fn parse_failure(path: &Path, e: &ParseError) -> i32 {
    eprintln!("error: {}: {e}", path.display());
    EXIT_PARSE
}

fn usage(message: &str) -> i32 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

/// Uniformly random relabeling derived from `seed`.
pub fn relabeling(n: usize, seed: u64) -> Permutation {
    let mut rng = irsym::tree::rng_stream(seed, u64::MAX);
    let mut images: Vec<u32> = (0..n as u32).collect();
    images.shuffle(&mut rng);
    Permutation::from_images(images).expect("shuffle is a bijection")
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn cmd_solve(a: &SolveArgs, out: &mut impl Write) -> i32 {
    if let Err(m) = a.tuning.validate() {
        return usage(&m);
    }
    let threads = a.threads.unwrap_or_else(default_threads);
    if threads == 0 {
        return usage("--threads must be at least 1");
    }
    let seed = a.seed.unwrap_or_else(rand::random);
    let t = Instant::now();
    let graph = match read_graph(&a.input) {
        Ok(g) => g,
        Err(e) => return parse_failure(&a.input, &e),
    };
    let parse_time = t.elapsed();

    let relabel = a.permute.then(|| relabeling(graph.vertex_count(), seed));
    let solved_graph = match &relabel {
        Some(phi) => graph.permute(phi),
        None => graph.clone(),
    };
    let result = irsym::solve(&solved_graph, &a.tuning.options(threads, seed));
    let generators: Vec<Permutation> = match &relabel {
        // an automorphism ψ of G^φ corresponds to φ ψ φ⁻¹ on G
        Some(phi) => result
            .generators
            .iter()
            .map(|g| phi.then(g).then(&phi.inverse()))
            .collect(),
        None => result.generators.clone(),
    };
    let base: Vec<u32> = match &relabel {
        Some(phi) => {
            let inv = phi.inverse();
            result.base.iter().map(|&b| inv.apply(b)).collect()
        }
        None => result.base.clone(),
    };
    debug_assert!(generators.iter().all(|g| graph.is_automorphism(g)));

    let s = &result.statistics;
    let report = RunReport {
        input: a.input.display().to_string(),
        n: graph.vertex_count(),
        m: graph.edge_count(),
        group_order: result.group_order.to_string(),
        generator_count: generators.len(),
        generators: generators
            .iter()
            .map(Permutation::to_cycle_notation)
            .collect(),
        base: base.iter().map(|b| b + 1).collect(),
        termination: result.termination.name().to_string(),
        threads,
        seed,
        epsilon: a.tuning.epsilon,
        permuted: a.permute,
        walks: s.walks(),
        nodes_expanded: s.nodes_expanded,
        parse_ms: ms(parse_time),
        base_aligned_ms: ms(s.time_base_aligned),
        bfs_ms: ms(s.time_bfs),
        level_search_ms: ms(s.time_level_search),
        solve_ms: ms(s.time_total),
    };
    if let Some(path) = &a.write_generators {
        let mut text = String::new();
        for g in &report.generators {
            text.push_str(g);
            text.push('\n');
        }
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_FAILED;
        }
    }
    let text = match a.format {
        Format::Human => report.to_human(),
        Format::Jsonl => report.to_jsonl(),
    };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_bench(a: &BenchArgs, out: &mut impl Write) -> i32 {
    if let Err(m) = a.tuning.validate() {
        return usage(&m);
    }
    if a.threads_list.is_empty() || a.threads_list.contains(&0) {
        return usage("--threads-list needs positive thread counts");
    }
    if a.timeout.is_nan() || a.timeout <= 0.0 {
        return usage("--timeout must be positive");
    }
    let paths = match glob::glob(&a.inputs) {
        Ok(paths) => {
            let mut v: Vec<PathBuf> = paths
                .filter_map(Result::ok)
                .filter(|p| p.is_file())
                .collect();
            v.sort();
            v
        }
        Err(e) => return usage(&format!("bad glob {:?}: {e}", a.inputs)),
    };
    if paths.is_empty() {
        return usage(&format!("no input matches {:?}", a.inputs));
    }
    let mut graphs = Vec::with_capacity(paths.len());
    for p in &paths {
        match read_graph(p) {
            Ok(g) => graphs.push((p.clone(), g)),
            Err(e) => return parse_failure(p, &e),
        }
    }
    let plan = bench::Plan {
        threads: a.threads_list.clone(),
        repeats: a.repeats,
        timeout: Duration::from_secs_f64(a.timeout),
        seed: a.seed,
    };
    match bench::run(
        &graphs,
        &plan,
        |threads, seed| a.tuning.options(threads, seed),
        out,
    ) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn cmd_certify(a: &CertifyArgs, out: &mut impl Write) -> i32 {
    let graph = match read_graph(&a.input) {
        Ok(g) => g,
        Err(e) => return parse_failure(&a.input, &e),
    };
    let text = match std::fs::read_to_string(&a.generators) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", a.generators.display());
            return EXIT_PARSE;
        }
    };
    let mut checked = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perm = match Permutation::parse_cycle_notation(graph.vertex_count(), line) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {}: line {}: {e}", a.generators.display(), i + 1);
                return EXIT_PARSE;
            }
        };
        if !graph.is_automorphism(&perm) {
            let _ = writeln!(
                out,
                "not an automorphism (line {}): {}",
                i + 1,
                perm.to_cycle_notation()
            );
            return EXIT_FAILED;
        }
        checked += 1;
    }
    let _ = writeln!(out, "ok: {checked} automorphisms");
    EXIT_OK
}

fn cmd_oracle(a: &OracleArgs, out: &mut impl Write) -> i32 {
    let graph = match read_graph(&a.input) {
        Ok(g) => g,
        Err(e) => return parse_failure(&a.input, &e),
    };
    let mode = if a.exhaustive {
        OracleMode::Exhaustive
    } else {
        OracleMode::Pruned
    };
    match brute_force_automorphisms(&graph, mode) {
        Ok(group) => {
            let _ = writeln!(out, "{}", group.order());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}
