//! Weight-proportional probing from a complete BFS level.

use rand::Rng;

use crate::graph::ColoredGraph;
use crate::perm::Permutation;
use crate::refine::Refiner;
use crate::tree::{derive_automorphism, random_walk_from, CellSelector, Leaf, WalkRng};

use super::bfs::BfsLevel;

/// Draws level indices with probability proportional to their weight.
#[derive(Clone, Debug)]
pub struct StartSampler {
    prefix: Vec<u128>,
}

impl StartSampler {
    pub fn new(level: &BfsLevel) -> Self {
        Self::from_weights(level.nodes.iter().map(|n| n.weight))
    }

    pub fn from_weights(weights: impl IntoIterator<Item = u128>) -> Self {
        let mut acc = 0u128;
        let prefix = weights
            .into_iter()
            .map(|w| {
                assert!(w > 0, "weights are positive");
                acc = acc.saturating_add(w);
                acc
            })
            .collect::<Vec<_>>();
        assert!(!prefix.is_empty(), "no start nodes");
        StartSampler { prefix }
    }

    pub fn total(&self) -> u128 {
        *self.prefix.last().unwrap()
    }

    pub fn sample(&self, rng: &mut WalkRng) -> usize {
        let x = rng.gen_range(0..self.total());
        self.prefix.partition_point(|&p| p <= x)
    }
}

#[derive(Clone, Debug)]
pub enum Probe {
    /// The walk ended in a leaf equivalent to a stored target.
    Occurrence {
        automorphism: Permutation,
        target: usize,
    },
    /// Same trace as a stored target, but no automorphism maps one onto the other.
    NonOccurrence(Leaf),
    /// The leaf's trace differs from every stored target.
    Mismatch,
}

/// One level-search iteration: a weighted start node, a uniform walk below
/// it, and a comparison with `targets` in order.
pub fn probe(
    graph: &ColoredGraph,
    selector: CellSelector,
    level: &BfsLevel,
    sampler: &StartSampler,
    targets: &[Leaf],
    refiner: &mut Refiner,
    rng: &mut WalkRng,
) -> Probe {
    let node = &level.nodes[sampler.sample(rng)];
    let leaf = random_walk_from(graph, selector, node, refiner, rng)
        .expect("BFS levels only keep matching nodes");
    let mut same_trace = false;
    for (i, t) in targets.iter().enumerate() {
        if t.same_trace(&leaf) {
            same_trace = true;
            if let Some(automorphism) = derive_automorphism(graph, t, &leaf) {
                return Probe::Occurrence {
                    automorphism,
                    target: i,
                };
            }
        }
    }
    if same_trace {
        Probe::NonOccurrence(leaf)
    } else {
        Probe::Mismatch
    }
}
