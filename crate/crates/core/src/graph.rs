//! Undirected vertex-colored graphs, DIMACS-style I/O and automorphism checks.
//!
//! Vertices are `0..n` internally. The text format is 1-based:
//!
//! ```text
//! c comment
//! p edge <n> <m>
//! e <u> <v>
//! n <v> <color>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use crate::coloring::Coloring;
use crate::error::ParseError;
use crate::perm::Permutation;

/// Immutable colored graph with a flat adjacency array.
///
/// `colors[v]` is a compacted color in `0..color_count`; the order of the
/// compacted colors follows the order of the input color values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    colors: Vec<u32>,
    color_count: u32,
}

impl ColoredGraph {
    /// Builds a graph from 0-based edges. Duplicates and both orientations are
    /// merged. Panics on self-loops or out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        Self::from_colored_edges(n, edges, &vec![0; n])
    }

    /// Like [`ColoredGraph::from_edges`] with arbitrary color values that get
    /// compacted preserving their order.
    pub fn from_colored_edges(n: usize, edges: &[(u32, u32)], colors: &[u64]) -> Self {
        assert_eq!(colors.len(), n);
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge ({u}, {v}) out of range"
            );
            assert_ne!(u, v, "self-loop on {u}");
            lists[u as usize].push(v);
            lists[v as usize].push(u);
        }
        let distinct: BTreeSet<u64> = colors.iter().copied().collect();
        let rank = |c: u64| distinct.range(..c).count() as u32;
        let colors: Vec<u32> = colors.iter().map(|&c| rank(c)).collect();
        Self::from_lists(lists, colors, distinct.len().max(1) as u32)
    }

    fn from_lists(mut lists: Vec<Vec<u32>>, colors: Vec<u32>, color_count: u32) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len() as u32);
        }
        ColoredGraph {
            offsets,
            neighbors,
            colors,
            color_count,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    #[inline]
    pub fn color(&self, v: u32) -> u32 {
        self.colors[v as usize]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.color_count as usize
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count() as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// The input coloring as an ordered partition.
    pub fn initial_coloring(&self) -> Coloring {
        Coloring::from_colors(&self.colors, self.color_count as usize)
    }

    /// True iff `phi` maps edges to edges and preserves colors.
    pub fn is_automorphism(&self, phi: &Permutation) -> bool {
        let n = self.vertex_count();
        if phi.len() != n {
            return false;
        }
        let mut mark = vec![u32::MAX; n];
        for v in 0..n as u32 {
            let w = phi.apply(v);
            if self.colors[v as usize] != self.colors[w as usize]
                || self.degree(v) != self.degree(w)
            {
                return false;
            }
            for &x in self.neighbors(w) {
                mark[x as usize] = v;
            }
            if self
                .neighbors(v)
                .iter()
                .any(|&u| mark[phi.apply(u) as usize] != v)
            {
                return false;
            }
        }
        true
    }

    /// Relabels vertex `v` as `phi(v)`.
    pub fn permute(&self, phi: &Permutation) -> ColoredGraph {
        let n = self.vertex_count();
        assert_eq!(phi.len(), n);
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut colors = vec![0; n];
        for v in 0..n as u32 {
            let w = phi.apply(v) as usize;
            lists[w] = self.neighbors(v).iter().map(|&u| phi.apply(u)).collect();
            colors[w] = self.colors[v as usize];
        }
        Self::from_lists(lists, colors, self.color_count)
    }

    /// Parses the DIMACS-style text format.
    pub fn parse(text: &str) -> Result<ColoredGraph, ParseError> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut colors: Vec<u64> = Vec::new();
        let mut explicit: Vec<Option<i64>> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut tokens = raw.split_whitespace();
            let Some(kind) = tokens.next() else { continue };
            let rest: Vec<&str> = tokens.collect();
            let syntax = |message: &str| ParseError::Syntax {
                line,
                message: message.to_string(),
            };
            match kind {
                "c" | "%" | "#" => continue,
                "p" => {
                    if n.is_some() {
                        return Err(syntax("duplicate header"));
                    }
                    if rest.len() != 3 || !matches!(rest[0], "edge" | "col") {
                        return Err(syntax("expected `p edge <n> <m>`"));
                    }
                    let count: usize = rest[1].parse().map_err(|_| syntax("bad vertex count"))?;
                    let _m: usize = rest[2].parse().map_err(|_| syntax("bad edge count"))?;
                    n = Some(count);
                    explicit = vec![None; count];
                }
                "e" | "n" => {
                    let count = n.ok_or_else(|| syntax("line before `p` header"))?;
                    if rest.len() != 2 {
                        return Err(syntax(if kind == "e" {
                            "expected `e <u> <v>`"
                        } else {
                            "expected `n <v> <color>`"
                        }));
                    }
                    let vertex = |tok: &str| -> Result<u32, ParseError> {
                        let v: u64 = tok.parse().map_err(|_| syntax("bad vertex id"))?;
                        if v == 0 || v > count as u64 {
                            return Err(ParseError::VertexRange {
                                line,
                                vertex: v,
                                n: count,
                            });
                        }
                        Ok((v - 1) as u32)
                    };
                    if kind == "e" {
                        let u = vertex(rest[0])?;
                        let v = vertex(rest[1])?;
                        if u == v {
                            return Err(ParseError::SelfLoop {
                                line,
                                vertex: u as u64 + 1,
                            });
                        }
                        edges.push((u, v));
                    } else {
                        let v = vertex(rest[0])?;
                        let c: i64 = rest[1].parse().map_err(|_| syntax("bad color"))?;
                        explicit[v as usize] = Some(c);
                    }
                }
                _ => return Err(syntax(&format!("unknown line type `{kind}`"))),
            }
        }
        let n = n.ok_or(ParseError::MissingHeader)?;
        // Shift so that signed colors keep their order as unsigned keys.
        colors.extend(
            explicit
                .iter()
                .map(|c| (c.unwrap_or(1) as i128 - i64::MIN as i128) as u64),
        );
        Ok(ColoredGraph::from_colored_edges(n, &edges, &colors))
    }

    pub fn read_from(mut reader: impl Read) -> Result<ColoredGraph, ParseError> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| ParseError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    /// Writes the graph in the text format, each edge once with `u < v`.
    /// Color lines are emitted only for graphs with more than one color.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        if self.color_count > 1 {
            for v in 0..self.vertex_count() {
                let _ = writeln!(out, "n {} {}", v + 1, self.colors[v] + 1);
            }
        }
        out
    }
}
