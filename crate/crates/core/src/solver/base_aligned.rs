//! Walks started at the nodes of the target path, each forced through a
//! vertex of the selected cell not yet in the orbit of the base vertex.
//!
//! The automorphisms found this way are not uniform and never count
//! towards the abort criterion. When every selected cell on the target
//! path turns out to be an orbit, the group is known exactly.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;

use crate::graph::ColoredGraph;
use crate::refine::{Refiner, Trace};
use crate::schreier::SchreierStructure;
use crate::tree::{walk_against, CellSelector, Leaf, SearchNode, WalkRng};

/// Inner nodes of the target leaf's root-to-leaf path, root first.
pub fn target_path(graph: &ColoredGraph, selector: CellSelector, target: &Leaf) -> Vec<SearchNode> {
    debug_assert_eq!(target.trace_start, 0);
    let mut refiner = Refiner::new(graph.vertex_count());
    let mut trace = Trace::hashing();
    let mut node = SearchNode::root(graph, &mut refiner, &mut trace);
    let mut path = Vec::with_capacity(target.base.len());
    for &v in &target.base {
        debug_assert_eq!(
            selector.select(&node.coloring),
            Some(node.coloring.cell_of(v))
        );
        let mut next = node.clone();
        refiner
            .individualize_refine(graph, &mut next.coloring, v, &mut trace)
            .unwrap();
        next.base.push(v);
        next.trace_position = trace.position();
        path.push(node);
        node = next;
    }
    path
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BaseAlignedReport {
    /// Every selected cell along the target path is an orbit of the found group.
    pub complete: bool,
    pub walks: u64,
    pub automorphisms: u64,
    pub refinements: u64,
}

struct Cursor {
    level: Option<usize>,
    fails: usize,
    seen: usize,
}

pub struct BaseAligned<'a> {
    pub graph: &'a ColoredGraph,
    pub selector: CellSelector,
    pub target: &'a Leaf,
    pub path: &'a [SearchNode],
    pub schreier: &'a SchreierStructure,
    /// A level is given up after this many times its cell size consecutive
    /// walks without orbit growth.
    pub hard_factor: usize,
}

impl BaseAligned<'_> {
    fn cell_len(&self, i: usize) -> usize {
        let node = &self.path[i];
        node.coloring
            .cell_len(node.coloring.cell_of(self.target.base[i]))
    }

    fn is_complete(&self) -> bool {
        (0..self.path.len()).all(|i| self.schreier.level_size(i) == self.cell_len(i))
    }

    /// Runs on one worker per entry of `rngs` until every level is complete
    /// or hard, or `cancelled` returns true.
    pub fn run(
        &self,
        rngs: &mut [WalkRng],
        cancelled: &(dyn Fn() -> bool + Sync),
    ) -> BaseAlignedReport {
        let deepest = self.path.len().checked_sub(1);
        let cursor = Mutex::new(Cursor {
            level: deepest,
            fails: 0,
            seen: deepest.map_or(0, |i| self.schreier.level_size(i)),
        });
        let walks = AtomicU64::new(0);
        let found = AtomicU64::new(0);
        let refinements = AtomicU64::new(0);
        let work = |rng: &mut WalkRng| {
            let mut refiner = Refiner::new(self.graph.vertex_count());
            while !cancelled() {
                let Some((i, v)) = self.next_walk(&cursor, rng) else {
                    break;
                };
                let lab = walk_against(
                    self.graph,
                    self.selector,
                    &self.path[i],
                    Some(v),
                    &self.target.tokens,
                    &mut refiner,
                    rng,
                );
                walks.fetch_add(1, Ordering::Relaxed);
                if let Some(lab) = lab {
                    let phi = lab.inverse().then(&self.target.permutation);
                    if self.graph.is_automorphism(&phi) {
                        found.fetch_add(1, Ordering::Relaxed);
                        self.schreier.sift(&phi);
                    }
                }
                self.after_walk(&cursor, i);
            }
            refinements.fetch_add(refiner.refinements(), Ordering::Relaxed);
        };
        if rngs.len() <= 1 {
            work(&mut rngs[0]);
        } else {
            std::thread::scope(|s| {
                for rng in rngs.iter_mut() {
                    let work = &work;
                    s.spawn(move || work(rng));
                }
            });
        }
        BaseAlignedReport {
            complete: self.is_complete(),
            walks: walks.into_inner(),
            automorphisms: found.into_inner(),
            refinements: refinements.into_inner(),
        }
    }

    fn move_up(&self, c: &mut Cursor) {
        c.level = c.level.and_then(|i| i.checked_sub(1));
        c.fails = 0;
        c.seen = c.level.map_or(0, |i| self.schreier.level_size(i));
    }

    fn next_walk(&self, cursor: &Mutex<Cursor>, rng: &mut WalkRng) -> Option<(usize, u32)> {
        let mut c = cursor.lock().unwrap();
        loop {
            let i = c.level?;
            if self.schreier.level_size(i) == self.cell_len(i) {
                self.move_up(&mut c);
                continue;
            }
            let node = &self.path[i];
            let missing: Vec<u32> = node
                .coloring
                .cell(node.coloring.cell_of(self.target.base[i]))
                .iter()
                .copied()
                .filter(|&v| !self.schreier.has_representative(i, v))
                .collect();
            return Some((i, *missing.choose(rng).expect("level is incomplete")));
        }
    }

    fn after_walk(&self, cursor: &Mutex<Cursor>, i: usize) {
        let mut c = cursor.lock().unwrap();
        if c.level != Some(i) {
            return;
        }
        let size = self.schreier.level_size(i);
        if size > c.seen {
            c.seen = size;
            c.fails = 0;
        } else {
            c.fails += 1;
        }
        if size == self.cell_len(i) || c.fails >= self.hard_factor * self.cell_len(i) {
            self.move_up(&mut c);
        }
    }
}
