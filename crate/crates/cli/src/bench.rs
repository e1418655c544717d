//! CSV timing harness.
//!
//! Solves run one after another so that runs do not compete for cores.
//! Every repeat of a graph uses the same seed; a run that hits the timeout
//! is kept as a censored row with `terminated = false`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use irsym::{ColoredGraph, SolverOptions, Termination};

pub const SCHEMA: &str = "# irsym bench v1";
pub const HEADER: [&str; 8] = [
    "graph",
    "n",
    "m",
    "threads",
    "repeat",
    "wall_ms",
    "order",
    "terminated",
];

#[derive(Clone, Debug)]
pub struct Plan {
    pub threads: Vec<usize>,
    pub repeats: usize,
    pub timeout: Duration,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub threads: usize,
    pub repeat: usize,
    pub wall_ms: f64,
    pub order: String,
    pub terminated: bool,
}

/// Graph class of an input: its file stem without a trailing number,
/// so `cfi-12.dimacs` and `cfi-16.dimacs` share the class `cfi`.
pub fn class_of(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let trimmed = stem.trim_end_matches(|c: char| c.is_ascii_digit());
    let trimmed = trimmed.trim_end_matches(['-', '_', '.']);
    if trimmed.is_empty() {
        stem
    } else {
        trimmed.to_string()
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Median wall time per (class, threads), divided by the class median at
/// the smallest thread count.
pub fn summarize(rows: &[(String, Row)]) -> Vec<(String, usize, f64, f64, usize)> {
    let mut groups: BTreeMap<(String, usize), (Vec<f64>, usize)> = BTreeMap::new();
    for (class, row) in rows {
        let e = groups.entry((class.clone(), row.threads)).or_default();
        e.0.push(row.wall_ms);
        if !row.terminated {
            e.1 += 1;
        }
    }
    let mut medians: BTreeMap<(String, usize), (f64, usize)> = BTreeMap::new();
    for (k, (mut times, censored)) in groups {
        medians.insert(k, (median(&mut times), censored));
    }
    let mut out = Vec::new();
    let mut baseline: Option<(String, f64)> = None;
    for ((class, threads), (m, censored)) in &medians {
        if baseline.as_ref().is_none_or(|(c, _)| c != class) {
            baseline = Some((class.clone(), *m));
        }
        let base = baseline.as_ref().unwrap().1;
        let relative = if base > 0.0 { m / base } else { 1.0 };
        out.push((class.clone(), *threads, *m, relative, *censored));
    }
    out
}

fn write_record<I, F>(out: &mut impl Write, fields: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = F>,
    F: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(fields)?;
    w.flush()
}

pub fn run(
    graphs: &[(PathBuf, ColoredGraph)],
    plan: &Plan,
    options: impl Fn(usize, u64) -> SolverOptions,
    out: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(out, "{SCHEMA}")?;
    write_record(out, HEADER)?;
    let mut rows = Vec::new();
    for (path, graph) in graphs {
        for &threads in &plan.threads {
            for repeat in 1..=plan.repeats {
                let opts = SolverOptions {
                    deadline: Some(Instant::now() + plan.timeout),
                    ..options(threads, plan.seed)
                };
                let t = Instant::now();
                let result = irsym::solve(graph, &opts);
                let wall = t.elapsed();
                let row = Row {
                    graph: path.display().to_string(),
                    n: graph.vertex_count(),
                    m: graph.edge_count(),
                    threads,
                    repeat,
                    wall_ms: (wall.as_secs_f64() * 1e6).round() / 1e3,
                    order: result.group_order.to_string(),
                    terminated: result.termination != Termination::Cancelled,
                };
                write_record(
                    out,
                    [
                        row.graph.clone(),
                        row.n.to_string(),
                        row.m.to_string(),
                        row.threads.to_string(),
                        row.repeat.to_string(),
                        row.wall_ms.to_string(),
                        row.order.clone(),
                        row.terminated.to_string(),
                    ],
                )?;
                out.flush()?;
                rows.push((class_of(path), row));
            }
        }
    }
    writeln!(
        out,
        "# summary: class,threads,median_wall_ms,relative,censored"
    )?;
    for (class, threads, m, relative, censored) in summarize(&rows) {
        writeln!(out, "# {class},{threads},{m:.3},{relative:.3},{censored}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(threads: usize, wall_ms: f64) -> Row {
        Row {
            graph: "x".into(),
            n: 1,
            m: 0,
            threads,
            repeat: 1,
            wall_ms,
            order: "1".into(),
            terminated: true,
        }
    }

    #[test]
    fn classes() {
        assert_eq!(class_of(Path::new("a/cfi-12.dimacs")), "cfi");
        assert_eq!(class_of(Path::new("k3.dimacs")), "k");
        assert_eq!(class_of(Path::new("petersen.dimacs")), "petersen");
        assert_eq!(class_of(Path::new("42.dimacs")), "42");
    }

    #[test]
    fn single_thread_normalizes_to_one() {
        let s = summarize(&[("c".into(), row(1, 5.0)), ("c".into(), row(1, 7.0))]);
        assert_eq!(s, vec![("c".into(), 1, 6.0, 1.0, 0)]);
    }

    #[test]
    fn relative_to_smallest_thread_count() {
        let rows = [
            ("c".into(), row(1, 10.0)),
            ("c".into(), row(4, 5.0)),
            ("d".into(), row(4, 3.0)),
        ];
        let s = summarize(&rows);
        assert_eq!(s[1], ("c".into(), 4, 5.0, 0.5, 0));
        assert_eq!(s[2], ("d".into(), 4, 3.0, 1.0, 0));
    }
}
