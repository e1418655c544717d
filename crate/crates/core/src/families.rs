//! Generators for standard graph families used by tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::ColoredGraph;

pub fn empty(n: usize) -> ColoredGraph {
    ColoredGraph::from_edges(n, &[])
}

pub fn complete(n: usize) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push((u, v));
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

pub fn path(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
    ColoredGraph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> ColoredGraph {
    let mut edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
    if n > 2 {
        edges.push((n as u32 - 1, 0));
    }
    ColoredGraph::from_edges(n, &edges)
}

pub fn star(leaves: usize) -> ColoredGraph {
    let edges: Vec<_> = (1..=leaves as u32).map(|v| (0, v)).collect();
    ColoredGraph::from_edges(leaves + 1, &edges)
}

pub fn wheel(rim: usize) -> ColoredGraph {
    let mut edges: Vec<_> = (0..rim as u32).map(|v| (0, v + 1)).collect();
    for v in 0..rim as u32 {
        edges.push((v + 1, (v + 1) % rim as u32 + 1));
    }
    ColoredGraph::from_edges(rim + 1, &edges)
}

pub fn complete_bipartite(a: usize, b: usize) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..a as u32 {
        for v in 0..b as u32 {
            edges.push((u, a as u32 + v));
        }
    }
    ColoredGraph::from_edges(a + b, &edges)
}

/// The `d`-dimensional hypercube.
pub fn hypercube(d: u32) -> ColoredGraph {
    let n = 1usize << d;
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for bit in 0..d {
            let v = u ^ (1 << bit);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

pub fn grid(rows: usize, cols: usize) -> ColoredGraph {
    let id = |r: usize, c: usize| (r * cols + c) as u32;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
        }
    }
    ColoredGraph::from_edges(rows * cols, &edges)
}

pub fn torus(rows: usize, cols: usize) -> ColoredGraph {
    let id = |r: usize, c: usize| (r * cols + c) as u32;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            edges.push((id(r, c), id((r + 1) % rows, c)));
            edges.push((id(r, c), id(r, (c + 1) % cols)));
        }
    }
    ColoredGraph::from_edges(rows * cols, &edges)
}

pub fn petersen() -> ColoredGraph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    ColoredGraph::from_edges(10, &edges)
}

/// Rook's graph `K_k x K_k`: cells of a `k x k` board, adjacent when they share a row or column.
pub fn rook(k: usize) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..k * k {
        for v in u + 1..k * k {
            if u / k == v / k || u % k == v % k {
                edges.push((u as u32, v as u32));
            }
        }
    }
    ColoredGraph::from_edges(k * k, &edges)
}

/// Shrikhande graph. Same strongly regular parameters as `rook(4)` but not isomorphic to it.
pub fn shrikhande() -> ColoredGraph {
    let mut edges = Vec::new();
    for x in 0..4i32 {
        for y in 0..4i32 {
            for (dx, dy) in [(1, 0), (0, 1), (1, 1)] {
                let u = (x * 4 + y) as u32;
                let v = ((x + dx).rem_euclid(4) * 4 + (y + dy).rem_euclid(4)) as u32;
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(16, &edges)
}

/// Cubic graph on 12 vertices with trivial automorphism group.
pub fn frucht() -> ColoredGraph {
    lcf(12, &[-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2])
}

/// Hamiltonian cubic graph from LCF notation.
pub fn lcf(n: usize, jumps: &[i64]) -> ColoredGraph {
    let mut edges: Vec<_> = (0..n as u32).map(|v| (v, (v + 1) % n as u32)).collect();
    for v in 0..n {
        let j = jumps[v % jumps.len()];
        let w = (v as i64 + j).rem_euclid(n as i64) as u32;
        if (v as u32) < w {
            edges.push((v as u32, w));
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

/// Paley graph of prime order `q` with `q % 4 == 1`.
pub fn paley(q: u32) -> ColoredGraph {
    assert!(q % 4 == 1, "Paley graphs need q = 1 mod 4");
    let squares: Vec<bool> = {
        let mut s = vec![false; q as usize];
        for x in 1..q {
            s[((x as u64 * x as u64) % q as u64) as usize] = true;
        }
        s
    };
    let mut edges = Vec::new();
    for u in 0..q {
        for v in u + 1..q {
            if squares[(v - u) as usize] {
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(q as usize, &edges)
}

/// Rook-type graph of a latin square: cells are adjacent when they share a
/// row, a column or a symbol.
pub fn latin_square_graph(square: &[Vec<u32>]) -> ColoredGraph {
    let k = square.len();
    let id = |r: usize, c: usize| (r * k + c) as u32;
    let mut edges = Vec::new();
    for r1 in 0..k {
        for c1 in 0..k {
            for r2 in 0..k {
                for c2 in 0..k {
                    let (a, b) = (id(r1, c1), id(r2, c2));
                    if a < b && (r1 == r2 || c1 == c2 || square[r1][c1] == square[r2][c2]) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    ColoredGraph::from_edges(k * k, &edges)
}

/// Latin square graph of the cyclic group of order `k`.
pub fn cyclic_latin_square_graph(k: usize) -> ColoredGraph {
    let square: Vec<Vec<u32>> = (0..k)
        .map(|r| (0..k).map(|c| ((r + c) % k) as u32).collect())
        .collect();
    latin_square_graph(&square)
}

/// Disjoint union of `copies` copies of `g`.
pub fn disjoint_union(g: &ColoredGraph, copies: usize) -> ColoredGraph {
    let n = g.vertex_count();
    let mut edges = Vec::new();
    let mut colors = Vec::new();
    for i in 0..copies {
        let off = (i * n) as u32;
        edges.extend(g.edges().map(|(u, v)| (u + off, v + off)));
        colors.extend(g.colors().iter().map(|&c| c as u64));
    }
    ColoredGraph::from_colored_edges(n * copies, &edges, &colors)
}

/// Disjoint union of two graphs; vertices of `b` follow those of `a`.
pub fn union(a: &ColoredGraph, b: &ColoredGraph) -> ColoredGraph {
    let off = a.vertex_count() as u32;
    let mut edges: Vec<_> = a.edges().collect();
    edges.extend(b.edges().map(|(u, v)| (u + off, v + off)));
    let colors: Vec<u64> = a
        .colors()
        .iter()
        .chain(b.colors())
        .map(|&c| c as u64)
        .collect();
    ColoredGraph::from_colored_edges(a.vertex_count() + b.vertex_count(), &edges, &colors)
}

/// Erdős–Rényi random graph.
pub fn random_gnp(n: usize, p: f64, rng: &mut impl Rng) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

/// Uniform random recursive tree.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> ColoredGraph {
    let edges: Vec<_> = (1..n as u32).map(|v| (rng.gen_range(0..v), v)).collect();
    ColoredGraph::from_edges(n, &edges)
}

/// Random `d`-regular graph from the pairing model, retrying until simple.
pub fn random_regular(n: usize, d: usize, rng: &mut impl Rng) -> ColoredGraph {
    assert!((n * d).is_multiple_of(2) && d < n);
    'retry: loop {
        let mut points: Vec<u32> = (0..n as u32)
            .flat_map(|v| std::iter::repeat_n(v, d))
            .collect();
        points.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'retry;
            }
            edges.push((u, v));
        }
        return ColoredGraph::from_edges(n, &edges);
    }
}

/// Cai–Fürer–Immerman construction over `base`. With `twisted` one edge
/// gadget is crossed, which yields the non-isomorphic twin.
pub fn cfi(base: &ColoredGraph, twisted: bool) -> ColoredGraph {
    let bn = base.vertex_count();
    let mut edges = Vec::new();
    let mut colors: Vec<u64> = Vec::new();
    // (base vertex, neighbor index) -> the two port vertices
    let mut ports: Vec<Vec<[u32; 2]>> = Vec::with_capacity(bn);
    let mut next = 0u32;
    for v in 0..bn as u32 {
        let deg = base.degree(v);
        let mut vp = Vec::with_capacity(deg);
        for _ in 0..deg {
            vp.push([next, next + 1]);
            colors.push(2 * v as u64 + 1);
            colors.push(2 * v as u64 + 1);
            next += 2;
        }
        for subset in 0u32..(1 << deg) {
            if subset.count_ones() % 2 != 0 {
                continue;
            }
            let m = next;
            next += 1;
            colors.push(2 * v as u64);
            for (i, port) in vp.iter().enumerate() {
                let bit = (subset >> i) & 1;
                edges.push((m, port[bit as usize]));
            }
        }
        ports.push(vp);
    }
    let mut first = true;
    for (u, v) in base.edges() {
        let iu = base.neighbors(u).binary_search(&v).unwrap();
        let iv = base.neighbors(v).binary_search(&u).unwrap();
        let (pu, pv) = (ports[u as usize][iu], ports[v as usize][iv]);
        if twisted && first {
            edges.push((pu[0], pv[1]));
            edges.push((pu[1], pv[0]));
        } else {
            edges.push((pu[0], pv[0]));
            edges.push((pu[1], pv[1]));
        }
        first = false;
    }
    ColoredGraph::from_colored_edges(next as usize, &edges, &colors)
}

/// Uncolored variant of [`cfi`].
pub fn cfi_uncolored(base: &ColoredGraph, twisted: bool) -> ColoredGraph {
    let g = cfi(base, twisted);
    let edges: Vec<_> = g.edges().collect();
    ColoredGraph::from_edges(g.vertex_count(), &edges)
}
