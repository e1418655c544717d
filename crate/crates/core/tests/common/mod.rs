#![allow(dead_code)]

use irsym::families::*;
use irsym::oracle::{brute_force_automorphisms, OracleMode};
use irsym::ColoredGraph;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Triangle 2-3-6 with a pendant vertex at 2 and a pendant path of length
/// two at 3 (1-based). Its only automorphism is the identity.
pub fn rigid6() -> ColoredGraph {
    ColoredGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (1, 5)])
}

/// Spider with legs of lengths 1, 2 and 3.
pub fn spider123() -> ColoredGraph {
    ColoredGraph::from_edges(7, &[(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
}

/// Graphs with at most 10 vertices, so the brute-force oracle applies.
pub fn small_corpus() -> Vec<(String, ColoredGraph)> {
    let mut r = rng(2024);
    let mut v: Vec<(String, ColoredGraph)> = vec![
        ("k2".into(), complete(2)),
        ("k3".into(), complete(3)),
        ("k4".into(), complete(4)),
        ("k5".into(), complete(5)),
        ("p3".into(), path(3)),
        ("p5".into(), path(5)),
        ("c4".into(), cycle(4)),
        ("c5".into(), cycle(5)),
        ("c6".into(), cycle(6)),
        ("c8".into(), cycle(8)),
        ("c10".into(), cycle(10)),
        ("star4".into(), star(4)),
        ("wheel5".into(), wheel(5)),
        ("k23".into(), complete_bipartite(2, 3)),
        ("k33".into(), complete_bipartite(3, 3)),
        ("q3".into(), hypercube(3)),
        ("grid3x3".into(), grid(3, 3)),
        ("torus3x3".into(), torus(3, 3)),
        ("petersen".into(), petersen()),
        ("paley9".into(), paley(9)),
        ("2k3".into(), disjoint_union(&complete(3), 2)),
        ("2c4".into(), disjoint_union(&cycle(4), 2)),
        ("empty4".into(), empty(4)),
        ("rigid6".into(), rigid6()),
        ("spider123".into(), spider123()),
    ];
    for i in 0..4 {
        v.push((format!("tree9-{i}"), random_tree(9, &mut r)));
    }
    for i in 0..4 {
        v.push((format!("gnp8-{i}"), random_gnp(8, 0.45, &mut r)));
    }
    v.push((
        "colored-c6".into(),
        ColoredGraph::from_colored_edges(
            6,
            &cycle(6).edges().collect::<Vec<_>>(),
            &[1, 2, 1, 2, 1, 2],
        ),
    ));
    v
}

/// Larger structured and random graphs, up to about 2000 vertices.
pub fn large_corpus() -> Vec<(String, ColoredGraph)> {
    let mut r = rng(77);
    let rr40 = rr40();
    vec![
        ("k12".into(), complete(12)),
        ("c40".into(), cycle(40)),
        ("p60".into(), path(60)),
        ("q5".into(), hypercube(5)),
        ("q7".into(), hypercube(7)),
        ("grid10x12".into(), grid(10, 12)),
        ("torus12x12".into(), torus(12, 12)),
        ("wheel30".into(), wheel(30)),
        ("k8-9".into(), complete_bipartite(8, 9)),
        ("paley29".into(), paley(29)),
        ("paley101".into(), paley(101)),
        ("latin6".into(), cyclic_latin_square_graph(6)),
        ("latin10".into(), cyclic_latin_square_graph(10)),
        ("6petersen".into(), disjoint_union(&petersen(), 6)),
        ("frucht".into(), frucht()),
        ("cfi-k4".into(), cfi(&complete(4), false)),
        ("cfi-k4-twisted".into(), cfi(&complete(4), true)),
        ("cfi-grid4".into(), cfi(&grid(4, 4), false)),
        (
            "cfiu-k33".into(),
            cfi_uncolored(&complete_bipartite(3, 3), true),
        ),
        ("cfiu-rr40".into(), cfi_uncolored(&rr40, false)),
        ("tree200".into(), random_tree(200, &mut r)),
        ("gnp300".into(), random_gnp(300, 0.03, &mut r)),
        ("rr500".into(), random_regular(500, 3, &mut r)),
        ("rr2000".into(), random_regular(2000, 3, &mut r)),
        ("star40".into(), star(40)),
        ("shrikhande+rook4".into(), union(&shrikhande(), &rook(4))),
    ]
}

/// Cubic base graph of the `cfiu-rr40` corpus entry.
pub fn rr40() -> ColoredGraph {
    random_regular(40, 3, &mut rng(40))
}

pub fn corpus() -> Vec<(String, ColoredGraph)> {
    let mut v = small_corpus();
    v.extend(large_corpus());
    v
}

/// Pearson statistic of `counts` against the uniform distribution, and the
/// chi-squared quantile `q` for `counts.len() - 1` degrees of freedom.
pub fn chi_squared_uniform(counts: &[u64], q: f64) -> (f64, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let critical = ChiSquared::new((counts.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(q);
    (stat, critical)
}

/// Occurrence counts per automorphism over `walks` uniform walks from the
/// root, relative to a target leaf drawn from `seed`. Returns the counts
/// and the number of walks that hit no occurrence.
pub fn occurrence_counts(graph: &ColoredGraph, walks: usize, seed: u64) -> (Vec<u64>, u64) {
    use irsym::refine::Refiner;
    use irsym::tree::{derive_automorphism, random_walk, rng_stream, CellSelector};
    let group =
        irsym::oracle::brute_force_automorphisms(graph, irsym::oracle::OracleMode::Pruned).unwrap();
    let index: std::collections::HashMap<Vec<u32>, usize> = group
        .elements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.images().to_vec(), i))
        .collect();
    let mut refiner = Refiner::new(graph.vertex_count());
    let target = random_walk(
        graph,
        CellSelector::default(),
        &mut refiner,
        &mut rng_stream(seed, 0),
    );
    let mut rng = rng_stream(seed, 1);
    let mut counts = vec![0u64; group.elements.len()];
    let mut misses = 0;
    for _ in 0..walks {
        let leaf = random_walk(graph, CellSelector::default(), &mut refiner, &mut rng);
        match derive_automorphism(graph, &target, &leaf) {
            Some(phi) => counts[index[phi.images()]] += 1,
            None => misses += 1,
        }
    }
    (counts, misses)
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Size of the automorphism class of one leaf in the full IR tree.
pub fn ir_tree_order(graph: &ColoredGraph) -> BigUint {
    let tree = irsym::oracle::enumerate_ir_tree(graph, Default::default()).unwrap();
    let first = &tree.leaves[0];
    let hits = tree
        .leaves
        .iter()
        .filter(|l| irsym::tree::derive_automorphism(graph, first, l).is_some())
        .count();
    BigUint::from(hits)
}

/// Automorphism count of an uncolored tree from canonical subtree codes.
pub fn tree_order(graph: &ColoredGraph) -> BigUint {
    let n = graph.vertex_count();
    // peel leaves down to the center
    let mut degree: Vec<usize> = (0..n as u32).map(|v| graph.degree(v)).collect();
    let mut layer: Vec<u32> = (0..n as u32).filter(|&v| degree[v as usize] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in graph.neighbors(v) {
                degree[w as usize] -= 1;
                if degree[w as usize] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    fn code(g: &ColoredGraph, v: u32, parent: Option<u32>) -> (String, BigUint) {
        let mut kids: Vec<(String, BigUint)> = g
            .neighbors(v)
            .iter()
            .filter(|&&w| Some(w) != parent)
            .map(|&w| code(g, w, Some(v)))
            .collect();
        kids.sort();
        let mut aut: BigUint = kids.iter().map(|k| k.1.clone()).product();
        let mut i = 0;
        while i < kids.len() {
            let j = kids[i..].iter().take_while(|k| k.0 == kids[i].0).count();
            aut *= factorial(j as u64);
            i += j;
        }
        let s = format!("({})", kids.into_iter().map(|k| k.0).collect::<String>());
        (s, aut)
    }
    match layer[..] {
        [c] => code(graph, c, None).1,
        [a, b] => {
            let (ca, xa) = code(graph, a, Some(b));
            let (cb, xb) = code(graph, b, Some(a));
            let swap = if ca == cb { 2u32 } else { 1 };
            xa * xb * swap
        }
        _ => unreachable!("a tree has one or two centers"),
    }
}

/// Automorphism group order of a corpus graph from brute force, closed
/// forms or the tree oracle; `None` for graphs without one.
pub fn independent_order(name: &str, graph: &ColoredGraph) -> Option<BigUint> {
    let f = factorial;
    let cfi_rank = |base: &ColoredGraph| {
        BigUint::from(2u32).pow((base.edge_count() + 1 - base.vertex_count()) as u32)
    };
    if graph.vertex_count() <= irsym::oracle::MAX_BRUTE_FORCE_VERTICES {
        let group = brute_force_automorphisms(graph, OracleMode::Pruned).unwrap();
        return Some(group.order().into());
    }
    let order = match name {
        "k12" => f(12),
        "c40" => 80u32.into(),
        "p60" => 2u32.into(),
        "q5" => f(5) << 5,
        "q7" => f(7) << 7,
        "grid10x12" => 4u32.into(),
        // dihedral on each factor, times the swap
        "torus12x12" => (24u32 * 24 * 2).into(),
        "wheel30" => 60u32.into(),
        "k8-9" => f(8) * f(9),
        // affine maps x -> a x + b with a a nonzero square
        "paley29" => (29u32 * 14).into(),
        "paley101" => (101u32 * 50).into(),
        "6petersen" => BigUint::from(120u32).pow(6) * f(6),
        "frucht" => 1u32.into(),
        "cfi-k4" | "cfi-k4-twisted" => cfi_rank(&complete(4)),
        "cfi-grid4" => cfi_rank(&grid(4, 4)),
        "cfiu-k33" => cfi_rank(&complete_bipartite(3, 3)) * 72u32,
        "cfiu-rr40" => cfi_rank(&rr40()) * ir_tree_order(&rr40()),
        "tree200" => tree_order(graph),
        "star40" => f(40),
        // 192 for Shrikhande, 2 * 4!^2 for the rook's graph
        "shrikhande+rook4" => (192u32 * 1152).into(),
        _ => return None,
    };
    Some(order)
}

/// Known automorphism group order of a corpus graph, falling back to the
/// leaf class size in the full search tree.
pub fn expected_order(name: &str, graph: &ColoredGraph) -> BigUint {
    independent_order(name, graph).unwrap_or_else(|| ir_tree_order(graph))
}

/// Largest count of successes in `trials` that a one-sided test at level
/// `confidence` still accepts for success probability `p`.
pub fn binomial_upper(trials: u64, p: f64, confidence: f64) -> u64 {
    use statrs::distribution::{Binomial, DiscreteCDF};
    let b = Binomial::new(p, trials).unwrap();
    (0..=trials).find(|&k| b.cdf(k) >= confidence).unwrap()
}
