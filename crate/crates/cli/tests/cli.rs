use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use irsym::families;
use irsym::ColoredGraph;
use irsym_cli::{RunReport, EXIT_FAILED, EXIT_OK, EXIT_PARSE, EXIT_USAGE};
use rand::SeedableRng;

fn irsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irsym"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_graph(dir: &Path, name: &str, g: &ColoredGraph) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, g.to_dimacs()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write_graph(dir.path(), "k3.dimacs", &families::complete(3));
    let bad = dir.path().join("bad.dimacs");
    std::fs::write(&bad, "p edge 3 1\ne 1 4\n").unwrap();
    let garbage = dir.path().join("garbage.dimacs");
    std::fs::write(&garbage, "hello\n").unwrap();

    assert_eq!(
        code(&irsym(&["solve", "--input", s(&k3), "--seed", "1"])),
        EXIT_OK
    );
    assert_eq!(code(&irsym(&["solve", "--input", s(&bad)])), EXIT_PARSE);
    assert_eq!(code(&irsym(&["solve", "--input", s(&garbage)])), EXIT_PARSE);
    assert_eq!(
        code(&irsym(&[
            "solve",
            "--input",
            s(&dir.path().join("missing"))
        ])),
        EXIT_PARSE
    );
    assert_eq!(
        code(&irsym(&["solve", "--input", s(&k3), "--error", "2"])),
        EXIT_USAGE
    );
    assert_eq!(
        code(&irsym(&["solve", "--input", s(&k3), "--threads", "0"])),
        EXIT_USAGE
    );
    assert_eq!(code(&irsym(&["solve"])), EXIT_USAGE);
    assert_eq!(code(&irsym(&["frobnicate"])), EXIT_USAGE);
    assert_eq!(code(&irsym(&["--help"])), EXIT_OK);
    assert_eq!(
        code(&irsym(&[
            "bench",
            "--inputs",
            s(&dir.path().join("*.none"))
        ])),
        EXIT_USAGE
    );
}

#[test]
fn k3_report() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write_graph(dir.path(), "k3.dimacs", &families::complete(3));
    let out = irsym(&[
        "solve",
        "--input",
        s(&k3),
        "--seed",
        "4",
        "--threads",
        "1",
        "--format",
        "jsonl",
    ]);
    let r: RunReport = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(r.group_order, "6");
    assert_eq!((r.n, r.m, r.seed, r.threads), (3, 3, 4, 1));
    assert_eq!(r.generator_count, r.generators.len());
}

#[test]
fn human_and_jsonl_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for i in 0..100u64 {
        let g = match i % 4 {
            0 => families::random_gnp(12, 0.3, &mut rng),
            1 => families::random_tree(15, &mut rng),
            2 => families::random_regular(14, 3, &mut rng),
            _ => families::disjoint_union(&families::cycle(5), 1 + (i as usize % 3)),
        };
        let p = write_graph(dir.path(), &format!("g{i}.dimacs"), &g);
        let seed = i.to_string();
        let common = ["solve", "--input", s(&p), "--seed", &seed, "--threads", "1"];
        let human = RunReport::from_human(&stdout(&irsym(
            &[&common[..], &["--format", "human"]].concat(),
        )))
        .unwrap();
        let json: RunReport = serde_json::from_str(
            stdout(&irsym(&[&common[..], &["--format", "jsonl"]].concat())).trim(),
        )
        .unwrap();
        // timings differ between processes
        let strip = |r: RunReport| RunReport {
            parse_ms: 0.0,
            base_aligned_ms: 0.0,
            bfs_ms: 0.0,
            level_search_ms: 0.0,
            solve_ms: 0.0,
            ..r
        };
        assert_eq!(strip(human), strip(json), "graph {i}");
    }
}

#[test]
fn written_generators_certify() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = [
        ("petersen", families::petersen()),
        ("q4", families::hypercube(4)),
        ("latin6", families::cyclic_latin_square_graph(6)),
        ("cfi", families::cfi(&families::complete(4), false)),
    ];
    for (name, g) in graphs {
        let input = write_graph(dir.path(), &format!("{name}.dimacs"), &g);
        for permute in [false, true] {
            let gens = dir.path().join(format!("{name}-{permute}.gens"));
            let mut args = vec![
                "solve",
                "--input",
                s(&input),
                "--seed",
                "9",
                "--write-generators",
                s(&gens),
            ];
            if permute {
                args.push("--permute");
            }
            let r = RunReport::from_human(&stdout(&irsym(&args))).unwrap();
            let text = std::fs::read_to_string(&gens).unwrap();
            assert_eq!(text.lines().count(), r.generator_count, "{name}");
            let out = irsym(&["certify", "--input", s(&input), "--generators", s(&gens)]);
            assert_eq!(
                code(&out),
                EXIT_OK,
                "{name} permute {permute}: {}",
                stdout(&out)
            );
            assert_eq!(
                stdout(&out),
                format!("ok: {} automorphisms\n", r.generator_count)
            );
        }
    }
    // a transposition of two non-adjacent Petersen vertices is no automorphism
    let input = dir.path().join("petersen.dimacs");
    let gens = dir.path().join("wrong.gens");
    std::fs::write(&gens, "(1 3)\n").unwrap();
    assert_eq!(
        code(&irsym(&[
            "certify",
            "--input",
            s(&input),
            "--generators",
            s(&gens)
        ])),
        EXIT_FAILED
    );
    std::fs::write(&gens, "(1 99)\n").unwrap();
    assert_eq!(
        code(&irsym(&[
            "certify",
            "--input",
            s(&input),
            "--generators",
            s(&gens)
        ])),
        EXIT_PARSE
    );
}

#[test]
fn permuted_input_keeps_the_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path(), "torus.dimacs", &families::torus(5, 6));
    for seed in ["1", "2", "3"] {
        let plain = RunReport::from_human(&stdout(&irsym(&[
            "solve",
            "--input",
            s(&input),
            "--seed",
            seed,
        ])))
        .unwrap();
        let perm = RunReport::from_human(&stdout(&irsym(&[
            "solve",
            "--input",
            s(&input),
            "--seed",
            seed,
            "--permute",
        ])))
        .unwrap();
        assert_eq!(plain.group_order, "120");
        assert_eq!(perm.group_order, "120");
        assert!(perm.permuted);
    }
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph(dir.path(), "k4.dimacs", &families::complete(4));
    let c6 = write_graph(dir.path(), "c6.dimacs", &families::cycle(6));
    assert_eq!(stdout(&irsym(&["oracle", "--input", s(&k4)])), "24\n");
    assert_eq!(
        stdout(&irsym(&["oracle", "--input", s(&c6), "--exhaustive"])),
        "12\n"
    );
    let big = write_graph(dir.path(), "big.dimacs", &families::cycle(40));
    assert_eq!(code(&irsym(&["oracle", "--input", s(&big)])), EXIT_FAILED);
}

fn bench_csv(dir: &Path) -> String {
    let pattern = dir.join("*.dimacs");
    let out = irsym(&[
        "bench",
        "--inputs",
        s(&pattern),
        "--threads-list",
        "1,2",
        "--repeats",
        "2",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    stdout(&out)
}

#[test]
fn bench_output() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(dir.path(), "cycle1.dimacs", &families::cycle(8));
    write_graph(dir.path(), "cycle2.dimacs", &families::cycle(9));
    write_graph(dir.path(), "petersen.dimacs", &families::petersen());
    let first = bench_csv(dir.path());
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some(irsym_cli::bench::SCHEMA));
    assert_eq!(
        lines.next(),
        Some(irsym_cli::bench::HEADER.join(",").as_str())
    );
    let rows: Vec<Vec<String>> = lines
        .clone()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 3 * 2 * 2);
    for row in &rows {
        assert_eq!(row.len(), irsym_cli::bench::HEADER.len());
        assert!(row[5].parse::<f64>().unwrap() >= 0.0);
        let want = if row[0].contains("petersen") {
            "120"
        } else if row[1] == "8" {
            "16"
        } else {
            "18"
        };
        assert_eq!(row[6], want, "{row:?}");
    }
    // cycle1 and cycle2 form one class, petersen another
    let summary: Vec<&str> = first
        .lines()
        .filter(|l| l.starts_with("# ") && l.contains(','))
        .collect();
    assert!(
        summary.iter().any(|l| l.starts_with("# cycle,1,")),
        "{summary:?}"
    );
    assert!(
        summary.iter().any(|l| l.starts_with("# petersen,2,")),
        "{summary:?}"
    );

    // everything but the timings is reproducible
    let untimed = |csv: &str| -> Vec<String> {
        csv.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(5);
                f.join(",")
            })
            .collect()
    };
    assert_eq!(untimed(&first), untimed(&bench_csv(dir.path())));
}
