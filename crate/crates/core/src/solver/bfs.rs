//! Breadth-first advancement of the set of nodes that agree with the target.
//!
//! Children whose trace departs from the target's are dropped. Children
//! in one orbit of the known automorphisms fixing the parent are merged
//! into one node whose internal weight is the orbit size, so the external
//! weights keep counting the nodes of the unpruned tree. Optionally a
//! parent is also dropped when its set of child deviation values differs
//! from the target-path parent's.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crossbeam::channel;

use crate::graph::ColoredGraph;
use crate::perm::Permutation;
use crate::refine::{deviation_value, Deviation, Refiner, Trace};
use crate::tree::{CellSelector, Leaf, SearchNode};

pub type DeviationSet = BTreeSet<Option<Deviation>>;

/// One level of the pruned tree.
#[derive(Clone, Debug)]
pub struct BfsLevel {
    pub level: usize,
    pub nodes: Vec<SearchNode>,
    /// Index of the node the target leaf lies below.
    pub target_index: usize,
    /// Deviation set of the target-path parent of this level, if computed.
    pub deviation_set: Option<DeviationSet>,
    pub total_weight: u128,
}

impl BfsLevel {
    pub fn root(graph: &ColoredGraph) -> Self {
        let mut refiner = Refiner::new(graph.vertex_count());
        let node = SearchNode::root(graph, &mut refiner, &mut Trace::hashing());
        BfsLevel {
            level: 0,
            nodes: vec![node],
            target_index: 0,
            deviation_set: None,
            total_weight: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Approximate heap footprint of the stored nodes.
    pub fn heap_bytes(&self) -> usize {
        self.nodes.iter().map(node_bytes).sum()
    }
}

/// Rough per-allocation bookkeeping of the system allocator.
const ALLOCATION_OVERHEAD: usize = 16;

fn node_bytes(node: &SearchNode) -> usize {
    // four coloring arrays plus the base
    std::mem::size_of::<SearchNode>()
        + node.coloring.heap_bytes()
        + node.base.capacity() * 4
        + 5 * ALLOCATION_OVERHEAD
}

#[derive(Clone, Debug)]
pub struct BfsConfig {
    pub selector: CellSelector,
    pub deviation_extension: usize,
    pub deviation_sets: bool,
    /// Merge children by known automorphisms.
    pub merge_orbits: bool,
    pub threads: usize,
    pub memory_cap: usize,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl BfsConfig {
    fn cancelled(&self) -> bool {
        self.cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

impl Default for BfsConfig {
    fn default() -> Self {
        BfsConfig {
            selector: CellSelector::default(),
            deviation_extension: crate::refine::DEFAULT_DEVIATION_EXTENSION,
            deviation_sets: true,
            merge_orbits: true,
            threads: 1,
            memory_cap: 2 << 30,
            deadline: None,
            cancel: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BfsStats {
    /// Parents whose children were computed, fully or partly.
    pub parents: u64,
    /// Children refined.
    pub expanded: u64,
    /// Children skipped because another child of the same orbit stands for them.
    pub merged: u64,
    /// Parents dropped because of their deviation set.
    pub pruned_parents: u64,
    /// Of those, parents dropped before all their children were computed.
    pub pruned_early: u64,
}

impl BfsStats {
    pub fn add(&mut self, o: &BfsStats) {
        self.parents += o.parents;
        self.expanded += o.expanded;
        self.merged += o.merged;
        self.pruned_parents += o.pruned_parents;
        self.pruned_early += o.pruned_early;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BfsError {
    #[error("the level is already made of leaves")]
    LeafLevel,
    #[error("next level needs more than {cap} bytes")]
    MemoryCap { cap: usize },
    #[error("cancelled")]
    Cancelled,
}

enum Expansion {
    Children(Vec<SearchNode>, DeviationSet),
    Pruned,
    Cancelled,
    OverCap,
}

struct Expander<'a> {
    graph: &'a ColoredGraph,
    target: &'a Leaf,
    generators: &'a [Permutation],
    config: &'a BfsConfig,
    bytes: AtomicUsize,
}

impl Expander<'_> {
    /// Orbit representatives of the selected cell with orbit sizes, in
    /// ascending vertex order. `keep` is always its own representative.
    fn representatives(
        &self,
        parent: &SearchNode,
        cell: u32,
        keep: Option<u32>,
    ) -> Vec<(u32, u128)> {
        let coloring = &parent.coloring;
        let members = coloring.cell(cell);
        let mut uf: Vec<u32> = (0..members.len() as u32).collect();
        fn find(uf: &mut [u32], mut x: u32) -> u32 {
            while uf[x as usize] != x {
                uf[x as usize] = uf[uf[x as usize] as usize];
                x = uf[x as usize];
            }
            x
        }
        if self.config.merge_orbits {
            let offset = cell;
            for g in self
                .generators
                .iter()
                .filter(|g| parent.base.iter().all(|&b| g.apply(b) == b))
            {
                for &v in members {
                    let a = find(&mut uf, coloring.position(v) - offset);
                    let b = find(&mut uf, coloring.position(g.apply(v)) - offset);
                    if a != b {
                        uf[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        // best[root] = (representative, size)
        let mut best: Vec<Option<(u32, u128)>> = vec![None; members.len()];
        for (i, &v) in members.iter().enumerate() {
            let r = find(&mut uf, i as u32) as usize;
            let entry = best[r].get_or_insert((v, 0));
            entry.1 += 1;
            if Some(v) == keep || (Some(entry.0) != keep && v < entry.0) {
                entry.0 = v;
            }
        }
        let mut reps: Vec<(u32, u128)> = best.into_iter().flatten().collect();
        reps.sort_unstable_by_key(|r| r.0);
        reps
    }

    fn expand(
        &self,
        parent: &SearchNode,
        on_path: Option<u32>,
        reference: Option<&DeviationSet>,
        refiner: &mut Refiner,
        stats: &mut BfsStats,
    ) -> Expansion {
        if self.config.cancelled() {
            return Expansion::Cancelled;
        }
        if self.bytes.load(Ordering::Relaxed) > self.config.memory_cap {
            return Expansion::OverCap;
        }
        let cell = self
            .config
            .selector
            .select(&parent.coloring)
            .expect("parent is not a leaf");
        let reps = self.representatives(parent, cell, on_path);
        stats.parents += 1;
        stats.merged += (parent.coloring.cell_len(cell) - reps.len()) as u64;
        let extension = if self.config.deviation_sets {
            self.config.deviation_extension
        } else {
            0
        };
        let mut children = Vec::new();
        let mut deviations = DeviationSet::new();
        for (v, size) in reps {
            let mut coloring = parent.coloring.clone();
            let mut trace = Trace::comparing(&self.target.tokens, parent.trace_position, extension);
            refiner
                .individualize_refine(self.graph, &mut coloring, v, &mut trace)
                .expect("selected cell is not a singleton");
            stats.expanded += 1;
            let dev = deviation_value(&trace).expect("comparing trace");
            if let Some(reference) = reference {
                if !reference.contains(&dev) {
                    stats.pruned_parents += 1;
                    stats.pruned_early += 1;
                    return Expansion::Pruned;
                }
            }
            deviations.insert(dev);
            if dev.is_none() {
                let mut base = parent.base.clone();
                base.push(v);
                let child = SearchNode {
                    base,
                    coloring,
                    trace_position: trace.position(),
                    internal_weight: size,
                    weight: size.saturating_mul(parent.weight),
                    matches_target: true,
                };
                // the node struct is briefly held twice while the level is reassembled
                let bytes = node_bytes(&child) + std::mem::size_of::<SearchNode>();
                if self.bytes.fetch_add(bytes, Ordering::Relaxed) > self.config.memory_cap {
                    return Expansion::OverCap;
                }
                children.push(child);
            }
        }
        if let Some(reference) = reference {
            if *reference != deviations {
                stats.pruned_parents += 1;
                return Expansion::Pruned;
            }
        }
        Expansion::Children(children, deviations)
    }
}

/// Computes the next level from a complete `level`. `generators` are
/// certified automorphisms used for merging.
pub fn bfs_advance(
    graph: &ColoredGraph,
    level: &BfsLevel,
    target: &Leaf,
    generators: &[Permutation],
    config: &BfsConfig,
) -> Result<(BfsLevel, BfsStats), BfsError> {
    let k = level.level;
    if k >= target.base.len() {
        return Err(BfsError::LeafLevel);
    }
    let target_vertex = target.base[k];
    // the current level stays alive while the next one is built
    let ex = Expander {
        graph,
        target,
        generators,
        config,
        bytes: AtomicUsize::new(level.heap_bytes()),
    };
    let mut stats = BfsStats::default();
    let mut refiner = Refiner::new(graph.vertex_count());

    let path_parent = &level.nodes[level.target_index];
    let (path_children, reference) = match ex.expand(
        path_parent,
        Some(target_vertex),
        None,
        &mut refiner,
        &mut stats,
    ) {
        Expansion::Children(c, d) => (c, d),
        Expansion::Cancelled => return Err(BfsError::Cancelled),
        Expansion::OverCap => {
            return Err(BfsError::MemoryCap {
                cap: config.memory_cap,
            })
        }
        Expansion::Pruned => unreachable!("the target-path parent has no reference to violate"),
    };
    let reference = config.deviation_sets.then_some(reference);

    let others: Vec<usize> = (0..level.nodes.len())
        .filter(|&i| i != level.target_index)
        .collect();
    let mut results: Vec<(usize, Expansion)> = Vec::with_capacity(others.len());
    let threads = config.threads.max(1);
    if threads == 1 || others.len() < 2 {
        for &i in &others {
            let e = ex.expand(
                &level.nodes[i],
                None,
                reference.as_ref(),
                &mut refiner,
                &mut stats,
            );
            let stop = matches!(e, Expansion::Cancelled | Expansion::OverCap);
            results.push((i, e));
            if stop {
                break;
            }
        }
    } else {
        let chunk = (others.len() / (8 * threads)).max(64);
        let (work_tx, work_rx) = channel::unbounded::<&[usize]>();
        let (done_tx, done_rx) = channel::unbounded();
        for c in others.chunks(chunk) {
            work_tx.send(c).unwrap();
        }
        drop(work_tx);
        std::thread::scope(|s| {
            for _ in 0..threads {
                let work_rx = work_rx.clone();
                let done_tx = done_tx.clone();
                let ex = &ex;
                let reference = reference.as_ref();
                s.spawn(move || {
                    let mut refiner = Refiner::new(graph.vertex_count());
                    let mut local = BfsStats::default();
                    for c in work_rx.iter() {
                        let out: Vec<_> = c
                            .iter()
                            .map(|&i| {
                                (
                                    i,
                                    ex.expand(
                                        &level.nodes[i],
                                        None,
                                        reference,
                                        &mut refiner,
                                        &mut local,
                                    ),
                                )
                            })
                            .collect();
                        done_tx.send((out, local)).unwrap();
                        local = BfsStats::default();
                    }
                });
            }
            drop(done_tx);
            for (out, local) in done_rx.iter() {
                results.extend(out);
                stats.add(&local);
            }
        });
        results.sort_unstable_by_key(|r| r.0);
    }

    let survivors = path_children.len()
        + results
            .iter()
            .map(|(_, e)| {
                if let Expansion::Children(c, _) = e {
                    c.len()
                } else {
                    0
                }
            })
            .sum::<usize>();
    let mut nodes = Vec::with_capacity(survivors);
    let mut target_index = None;
    let mut push_all = |children: Vec<SearchNode>,
                        on_path: bool,
                        nodes: &mut Vec<SearchNode>|
     -> Result<(), BfsError> {
        for child in children {
            if on_path && child.base[k] == target_vertex {
                target_index = Some(nodes.len());
            }
            nodes.push(child);
        }
        Ok(())
    };
    let mut pending = Some(path_children);
    for (i, expansion) in results {
        if i > level.target_index {
            if let Some(p) = pending.take() {
                push_all(p, true, &mut nodes)?;
            }
        }
        match expansion {
            Expansion::Children(children, _) => push_all(children, false, &mut nodes)?,
            Expansion::Cancelled => return Err(BfsError::Cancelled),
            Expansion::OverCap => {
                return Err(BfsError::MemoryCap {
                    cap: config.memory_cap,
                })
            }
            Expansion::Pruned => {}
        }
    }
    if let Some(p) = pending.take() {
        push_all(p, true, &mut nodes)?;
    }
    let total_weight = nodes.iter().map(|n| n.weight).sum();
    let next = BfsLevel {
        level: k + 1,
        nodes,
        target_index: target_index.expect("the target path survives"),
        deviation_set: reference,
        total_weight,
    };
    Ok((next, stats))
}
