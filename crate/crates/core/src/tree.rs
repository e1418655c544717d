//! Search tree nodes, cell selection and random root-to-leaf walks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coloring::Coloring;
use crate::error::ContractViolation;
use crate::graph::ColoredGraph;
use crate::perm::Permutation;
use crate::refine::{Outcome, Refiner, Trace};

/// Random source used by walks.
pub type WalkRng = ChaCha8Rng;

/// Independent stream `index` derived from a global seed.
pub fn rng_stream(seed: u64, index: u64) -> WalkRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Isomorphism-invariant choice of the cell to branch on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CellSelector {
    /// First non-singleton cell of maximal size.
    #[default]
    FirstLargest,
    /// First non-singleton cell of minimal size.
    FirstSmallest,
    /// First non-singleton cell.
    First,
}

impl CellSelector {
    /// Start of the selected cell, `None` iff the coloring is discrete.
    pub fn select(self, coloring: &Coloring) -> Option<u32> {
        let mut best: Option<(u32, usize)> = None;
        for s in coloring.cell_starts() {
            let len = coloring.cell_len(s);
            if len < 2 {
                continue;
            }
            let better = match (self, best) {
                (_, None) => true,
                (CellSelector::First, Some(_)) => false,
                (CellSelector::FirstLargest, Some((_, b))) => len > b,
                (CellSelector::FirstSmallest, Some((_, b))) => len < b,
            };
            if better {
                best = Some((s, len));
                if self == CellSelector::First {
                    break;
                }
            }
        }
        best.map(|(s, _)| s)
    }
}

/// A node of the search tree together with its refined coloring.
#[derive(Clone, Debug)]
pub struct SearchNode {
    /// Individualized vertices, in order.
    pub base: Vec<u32>,
    pub coloring: Coloring,
    /// Number of trace tokens emitted on the way to this node.
    pub trace_position: usize,
    /// Internal weight, at least 1.
    pub internal_weight: u128,
    /// Internal weight times the parent's weight.
    pub weight: u128,
    /// False if the node's trace departed from the target's.
    pub matches_target: bool,
}

impl SearchNode {
    /// The refined root, recording its trace into `trace`.
    pub fn root(graph: &ColoredGraph, refiner: &mut Refiner, trace: &mut Trace<'_>) -> Self {
        let mut coloring = graph.initial_coloring();
        refiner.refine_all(graph, &mut coloring, trace);
        SearchNode {
            base: Vec::new(),
            coloring,
            trace_position: trace.position(),
            internal_weight: 1,
            weight: 1,
            matches_target: true,
        }
    }

    pub fn level(&self) -> usize {
        self.base.len()
    }
}

/// A leaf of the search tree.
///
/// `tokens` covers the trace from global position `trace_start` on; for leaves
/// produced by a walk from the root `trace_start` is zero.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub base: Vec<u32>,
    /// The discrete coloring as `position -> vertex`.
    pub permutation: Permutation,
    pub trace_start: usize,
    pub tokens: Vec<u64>,
    /// Trace position after each level's refinement, starting with the node
    /// the walk started from.
    pub level_ends: Vec<usize>,
}

impl Leaf {
    pub fn trace_len(&self) -> usize {
        self.trace_start + self.tokens.len()
    }

    /// True iff `other`'s recorded suffix agrees with this leaf's trace.
    /// `self` must cover at least the range `other` covers.
    pub fn same_trace(&self, other: &Leaf) -> bool {
        if other.trace_start < self.trace_start || self.trace_len() != other.trace_len() {
            return false;
        }
        self.tokens[other.trace_start - self.trace_start..] == other.tokens[..]
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    graph: &ColoredGraph,
    selector: CellSelector,
    mut coloring: Coloring,
    mut base: Vec<u32>,
    trace_position: usize,
    first: Option<u32>,
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Leaf {
    let mut trace = Trace::recording_from(trace_position);
    let mut level_ends = vec![trace_position];
    let mut forced = first;
    while let Some(s) = selector.select(&coloring) {
        let v = match forced.take() {
            Some(v) => v,
            None => {
                let cell = coloring.cell(s);
                cell[rng.gen_range(0..cell.len())]
            }
        };
        base.push(v);
        let outcome = refiner
            .individualize_refine(graph, &mut coloring, v, &mut trace)
            .expect("selected cell is not a singleton");
        debug_assert_eq!(outcome, Outcome::Completed);
        level_ends.push(trace.position());
    }
    Leaf {
        base,
        permutation: coloring
            .as_permutation()
            .expect("walk ends in a discrete coloring"),
        trace_start: trace_position,
        tokens: trace.into_tokens().expect("recording trace"),
        level_ends,
    }
}

/// Uniform random walk from the root to a leaf.
pub fn random_walk(
    graph: &ColoredGraph,
    selector: CellSelector,
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Leaf {
    let mut trace = Trace::recording();
    let root = SearchNode::root(graph, refiner, &mut trace);
    let mut leaf = walk(
        graph,
        selector,
        root.coloring,
        Vec::new(),
        trace.position(),
        None,
        refiner,
        rng,
    );
    let mut tokens = trace.into_tokens().expect("recording trace");
    tokens.append(&mut leaf.tokens);
    leaf.tokens = tokens;
    leaf.trace_start = 0;
    leaf
}

/// Uniform random walk from `node` to a leaf.
pub fn random_walk_from(
    graph: &ColoredGraph,
    selector: CellSelector,
    node: &SearchNode,
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Result<Leaf, ContractViolation> {
    if !node.matches_target {
        return Err(ContractViolation::DeviatedNode);
    }
    Ok(walk(
        graph,
        selector,
        node.coloring.clone(),
        node.base.clone(),
        node.trace_position,
        None,
        refiner,
        rng,
    ))
}

/// Walk from `node` whose first individualized vertex is `first`; the rest
/// of the walk is uniform. `first` must lie in the selected cell.
pub fn walk_through(
    graph: &ColoredGraph,
    selector: CellSelector,
    node: &SearchNode,
    first: u32,
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Leaf {
    debug_assert_eq!(
        selector.select(&node.coloring),
        Some(node.coloring.cell_of(first))
    );
    walk(
        graph,
        selector,
        node.coloring.clone(),
        node.base.clone(),
        node.trace_position,
        Some(first),
        refiner,
        rng,
    )
}

/// Walk from `node` that gives up as soon as its trace departs from
/// `reference`. Returns the leaf's `position -> vertex` map if the whole
/// walk matched. With `first`, that vertex is individualized first.
pub fn walk_against(
    graph: &ColoredGraph,
    selector: CellSelector,
    node: &SearchNode,
    first: Option<u32>,
    reference: &[u64],
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Option<Permutation> {
    let mut coloring = node.coloring.clone();
    let mut trace = Trace::comparing(reference, node.trace_position, 0);
    let mut forced = first;
    while let Some(s) = selector.select(&coloring) {
        let v = match forced.take() {
            Some(v) => v,
            None => {
                let cell = coloring.cell(s);
                cell[rng.gen_range(0..cell.len())]
            }
        };
        let outcome = refiner
            .individualize_refine(graph, &mut coloring, v, &mut trace)
            .expect("selected cell is not a singleton");
        if outcome != Outcome::Completed {
            return None;
        }
    }
    (trace.position() == reference.len()).then(|| coloring.as_permutation().expect("discrete"))
}

/// The automorphism mapping `leaf` onto `target`, if it is one.
pub fn derive_automorphism(
    graph: &ColoredGraph,
    target: &Leaf,
    leaf: &Leaf,
) -> Option<Permutation> {
    let phi = leaf.permutation.inverse().then(&target.permutation);
    graph.is_automorphism(&phi).then_some(phi)
}
