//! Brute-force ground truth for small graphs.
//!
//! Nothing here depends on the solver; the search-tree enumeration uses
//! only refinement and cell selection, which define the tree.

use std::collections::{BTreeSet, HashMap};

use crate::coloring::Coloring;
use crate::error::OracleError;
use crate::graph::ColoredGraph;
use crate::perm::Permutation;
use crate::refine::{deviation_value, Deviation, Refiner, Trace};
use crate::tree::{derive_automorphism, CellSelector, Leaf};

/// Largest vertex count the brute-force enumeration accepts.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 10;
/// Largest search tree [`enumerate_ir_tree`] builds.
pub const MAX_TREE_NODES: usize = 1_000_000;
/// Rough bound on the memory the stored tree may take.
pub const MAX_TREE_BYTES: usize = 1 << 30;

#[derive(Clone, Debug)]
pub struct OracleGroup {
    pub elements: Vec<Permutation>,
}

impl OracleGroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OracleMode {
    /// Test all `n!` permutations in lexicographic order.
    Exhaustive,
    /// Backtracking over partial maps that respect colors, degrees and
    /// adjacency to already mapped vertices.
    #[default]
    Pruned,
}

pub fn brute_force_automorphisms(
    graph: &ColoredGraph,
    mode: OracleMode,
) -> Result<OracleGroup, OracleError> {
    let n = graph.vertex_count();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    let elements = match mode {
        OracleMode::Exhaustive => exhaustive(graph),
        OracleMode::Pruned => {
            let mut out = Vec::new();
            let mut image = vec![u32::MAX; n];
            let mut used = vec![false; n];
            extend(graph, 0, &mut image, &mut used, &mut out);
            out
        }
    };
    Ok(OracleGroup { elements })
}

fn exhaustive(graph: &ColoredGraph) -> Vec<Permutation> {
    let n = graph.vertex_count();
    let mut image: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::new();
    loop {
        let p = Permutation::from_images_unchecked(image.clone());
        if graph.is_automorphism(&p) {
            out.push(p);
        }
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| image[i - 1] < image[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| image[j] > image[i - 1]).unwrap();
        image.swap(i - 1, j);
        image[i..].reverse();
    }
    out
}

fn extend(
    graph: &ColoredGraph,
    v: usize,
    image: &mut Vec<u32>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    let n = graph.vertex_count();
    if v == n {
        let p = Permutation::from_images_unchecked(image.clone());
        debug_assert!(graph.is_automorphism(&p));
        out.push(p);
        return;
    }
    for w in 0..n as u32 {
        if used[w as usize]
            || graph.color(v as u32) != graph.color(w)
            || graph.degree(v as u32) != graph.degree(w)
        {
            continue;
        }
        let consistent =
            (0..v).all(|u| graph.has_edge(u as u32, v as u32) == graph.has_edge(image[u], w));
        if !consistent {
            continue;
        }
        image[v] = w;
        used[w as usize] = true;
        extend(graph, v + 1, image, used, out);
        used[w as usize] = false;
    }
    image[v] = u32::MAX;
}

/// A node of a fully enumerated search tree.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub base: Vec<u32>,
    pub parent: Option<usize>,
    /// Full trace from the root through this node's refinement.
    pub tokens: Vec<u64>,
    pub coloring: Coloring,
    /// Indices of the children in the next level, in ascending vertex order.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IrTree {
    pub levels: Vec<Vec<TreeNode>>,
    pub leaves: Vec<Leaf>,
    /// Leaves partitioned by equivalence under automorphisms (indices into `leaves`).
    pub leaf_classes: Vec<Vec<usize>>,
}

impl IrTree {
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Index of the leaf with this base.
    pub fn leaf_index(&self, base: &[u32]) -> Option<usize> {
        self.leaves.iter().position(|l| l.base == base)
    }
}

/// Enumerates the whole search tree of `graph`.
pub fn enumerate_ir_tree(
    graph: &ColoredGraph,
    selector: CellSelector,
) -> Result<IrTree, OracleError> {
    let n = graph.vertex_count();
    let mut refiner = Refiner::new(n);
    let mut trace = Trace::recording();
    let mut coloring = graph.initial_coloring();
    refiner.refine_all(graph, &mut coloring, &mut trace);
    let root = TreeNode {
        base: Vec::new(),
        parent: None,
        tokens: trace.into_tokens().unwrap(),
        coloring,
        children: Vec::new(),
    };
    let mut levels = vec![vec![root]];
    let mut total = 1;
    let mut bytes = 0;
    let mut leaves = Vec::new();
    loop {
        let depth = levels.len() - 1;
        let mut next = Vec::new();
        for (idx, node) in levels[depth].iter_mut().enumerate() {
            let Some(cell) = selector.select(&node.coloring) else {
                leaves.push(Leaf {
                    base: node.base.clone(),
                    permutation: node.coloring.as_permutation().unwrap(),
                    trace_start: 0,
                    tokens: node.tokens.clone(),
                    level_ends: Vec::new(),
                });
                continue;
            };
            let mut vertices = node.coloring.cell(cell).to_vec();
            vertices.sort_unstable();
            for v in vertices {
                total += 1;
                if total > MAX_TREE_NODES {
                    return Err(OracleError::TreeTooLarge(total));
                }
                let mut coloring = node.coloring.clone();
                let mut trace = Trace::recording_from(node.tokens.len());
                refiner
                    .individualize_refine(graph, &mut coloring, v, &mut trace)
                    .unwrap();
                let mut tokens = node.tokens.clone();
                tokens.extend_from_slice(trace.tokens().unwrap());
                let mut base = node.base.clone();
                base.push(v);
                bytes += 8 * tokens.len() + coloring.heap_bytes() + 4 * base.len();
                if bytes > MAX_TREE_BYTES {
                    return Err(OracleError::TreeTooLarge(total));
                }
                node.children.push(next.len());
                next.push(TreeNode {
                    base,
                    parent: Some(idx),
                    tokens,
                    coloring,
                    children: Vec::new(),
                });
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }

    // equivalent leaves share their trace, so only compare within a trace
    let mut by_trace: HashMap<&[u64], Vec<usize>> = HashMap::new();
    let mut leaf_classes: Vec<Vec<usize>> = Vec::new();
    for (i, leaf) in leaves.iter().enumerate() {
        let candidates = by_trace.entry(&leaf.tokens).or_default();
        match candidates
            .iter()
            .find(|&&c| derive_automorphism(graph, &leaves[leaf_classes[c][0]], leaf).is_some())
        {
            Some(&c) => leaf_classes[c].push(i),
            None => {
                candidates.push(leaf_classes.len());
                leaf_classes.push(vec![i]);
            }
        }
    }
    Ok(IrTree {
        levels,
        leaves,
        leaf_classes,
    })
}

/// Deviation set of `node`: deviation values of all its children against
/// `target_tokens`, with `None` standing for a child without deviation.
pub fn deviation_set(
    graph: &ColoredGraph,
    node: &TreeNode,
    selector: CellSelector,
    target_tokens: &[u64],
    extension: usize,
) -> BTreeSet<Option<Deviation>> {
    let mut refiner = Refiner::new(graph.vertex_count());
    let mut out = BTreeSet::new();
    let Some(cell) = selector.select(&node.coloring) else {
        return out;
    };
    for &v in node.coloring.cell(cell) {
        let mut coloring = node.coloring.clone();
        let mut trace = Trace::comparing(target_tokens, node.tokens.len(), extension);
        refiner
            .individualize_refine(graph, &mut coloring, v, &mut trace)
            .unwrap();
        out.insert(deviation_value(&trace).unwrap());
    }
    out
}

/// Per level, the number of nodes whose trace agrees with `target`'s. With
/// `deviation_sets`, nodes below a parent whose deviation set differs from
/// the target-path parent's are not counted.
pub fn matching_counts(
    graph: &ColoredGraph,
    tree: &IrTree,
    selector: CellSelector,
    target: &Leaf,
    deviation_sets: Option<usize>,
) -> Vec<u64> {
    let target_tokens = &target.tokens;
    let matches = |node: &TreeNode| {
        target_tokens.len() >= node.tokens.len()
            && target_tokens[..node.tokens.len()] == node.tokens[..]
    };
    let mut survivors: Vec<usize> = vec![0];
    let mut counts = vec![1u64];
    for depth in 0..tree.levels.len() - 1 {
        let level = &tree.levels[depth];
        let allowed: Vec<usize> = match deviation_sets {
            None => survivors.clone(),
            Some(k) => {
                let on_path = survivors
                    .iter()
                    .copied()
                    .find(|&i| target.base.starts_with(&level[i].base))
                    .expect("target path node survives");
                let reference = deviation_set(graph, &level[on_path], selector, target_tokens, k);
                survivors
                    .iter()
                    .copied()
                    .filter(|&i| {
                        deviation_set(graph, &level[i], selector, target_tokens, k) == reference
                    })
                    .collect()
            }
        };
        let next_level = &tree.levels[depth + 1];
        survivors = allowed
            .iter()
            .flat_map(|&i| level[i].children.iter().copied())
            .filter(|&c| matches(&next_level[c]))
            .collect();
        if survivors.is_empty() {
            break;
        }
        counts.push(survivors.len() as u64);
    }
    counts
}
