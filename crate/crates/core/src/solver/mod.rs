//! The top-level search.
//!
//! A first random walk fixes the target leaf, whose base becomes the base
//! of the Schreier structure. Base-aligned search then harvests cheap
//! automorphisms and may settle the group exactly. Otherwise the solver
//! alternates between extending a breadth-first level of the tree and
//! probing from it with weight-proportional random walks; only the
//! automorphisms found by probing count towards the abort criterion.

pub mod abort;
pub mod base_aligned;
pub mod bfs;
pub mod gate;
pub mod level;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::graph::ColoredGraph;
use crate::perm::Permutation;
use crate::refine::{Refiner, DEFAULT_DEVIATION_EXTENSION};
use crate::schreier::SchreierStructure;
use crate::tree::{random_walk, rng_stream, CellSelector, Leaf, WalkRng};

pub use abort::{initial_threshold, AbortState, Sample};
pub use base_aligned::{target_path, BaseAligned, BaseAlignedReport};
pub use bfs::{bfs_advance, BfsConfig, BfsError, BfsLevel, BfsStats, DeviationSet};
pub use gate::Gate;
pub use level::{probe, Probe, StartSampler};

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Bound on the probability of returning a proper subgroup.
    pub epsilon: f64,
    pub threads: usize,
    pub seed: u64,
    pub selector: CellSelector,
    /// Extra refinement events hashed into a deviation value.
    pub deviation_extension: usize,
    /// Leaves with the target's trace that are kept as further targets.
    pub extra_targets: usize,
    pub deviation_sets: bool,
    /// Merge BFS children by known automorphisms.
    pub merge_orbits: bool,
    pub bfs_memory_cap: usize,
    /// Probing starts once the next BFS level would cost more than this
    /// multiple of all refinements so far.
    pub cost_factor: f64,
    /// Consecutive fruitless base-aligned walks, per cell vertex, after
    /// which a base point is given up.
    pub hard_factor: usize,
    /// Probes before the success rate of a level is judged.
    pub min_probes: u64,
    pub base_aligned: bool,
    /// Keep every abort-criterion sample in the result.
    pub record_samples: bool,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            epsilon: 0.01,
            threads: 1,
            seed: 0,
            selector: CellSelector::default(),
            deviation_extension: DEFAULT_DEVIATION_EXTENSION,
            extra_targets: 8,
            deviation_sets: true,
            merge_orbits: true,
            bfs_memory_cap: 2 << 30,
            cost_factor: 64.0,
            hard_factor: 3,
            min_probes: 32,
            base_aligned: true,
            record_samples: false,
            deadline: None,
            cancel: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    /// The group is known exactly.
    Deterministic,
    /// Correct with probability at least `1 - epsilon`.
    Probabilistic { epsilon: f64 },
    /// Stopped by deadline or cancellation; the order is a lower bound.
    Cancelled,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Deterministic => "deterministic",
            Termination::Probabilistic { .. } => "probabilistic",
            Termination::Cancelled => "cancelled",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    BaseAligned,
    Bfs,
    LevelSearch,
}

#[derive(Clone, Debug, Default)]
pub struct Statistics {
    /// BFS children refined.
    pub nodes_expanded: u64,
    pub bfs: BfsStats,
    /// Deepest BFS level reached.
    pub bfs_depth: usize,
    pub base_aligned_walks: u64,
    pub probes: u64,
    pub occurrences: u64,
    pub extra_targets: usize,
    pub refinements: u64,
    /// Mode sequence with the BFS level each mode ran at.
    pub modes: Vec<(Mode, usize)>,
    pub time_base_aligned: Duration,
    pub time_bfs: Duration,
    pub time_level_search: Duration,
    pub time_total: Duration,
}

impl Statistics {
    pub fn walks(&self) -> u64 {
        self.base_aligned_walks + self.probes + 1
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub generators: Vec<Permutation>,
    pub group_order: BigUint,
    pub base: Vec<u32>,
    pub termination: Termination,
    pub statistics: Statistics,
    /// Final abort counters, absent if the search never probed.
    pub abort: Option<AbortState>,
}

enum LevelOutcome {
    Sealed,
    LowSuccess,
    Cancelled,
}

struct Run<'a> {
    graph: &'a ColoredGraph,
    opts: &'a SolverOptions,
    schreier: &'a SchreierStructure,
    gate: &'a Gate,
    targets: &'a RwLock<Vec<Leaf>>,
}

impl Run<'_> {
    fn cancelled(&self) -> bool {
        self.opts
            .cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
            || self.opts.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn level_search(
        &self,
        level: &BfsLevel,
        may_leave: bool,
        rngs: &mut [WalkRng],
        stats: &mut Statistics,
    ) -> LevelOutcome {
        let sampler = StartSampler::new(level);
        let width = level.len() as f64;
        let min_probes = self.opts.min_probes.max(4 * level.len() as u64);
        let probes = AtomicU64::new(0);
        let hits = AtomicU64::new(0);
        let refinements = AtomicU64::new(0);
        let work = |rng: &mut WalkRng| {
            let mut refiner = Refiner::new(self.graph.vertex_count());
            loop {
                if self.cancelled() {
                    self.gate.request_stop();
                    break;
                }
                if !self.gate.begin() {
                    break;
                }
                let outcome = {
                    let targets = self.targets.read().unwrap();
                    probe(
                        self.graph,
                        self.opts.selector,
                        level,
                        &sampler,
                        &targets,
                        &mut refiner,
                        rng,
                    )
                };
                let sample = match outcome {
                    Probe::Occurrence { automorphism, .. } => {
                        hits.fetch_add(1, Ordering::Relaxed);
                        Some(Sample {
                            sifted: self.schreier.sift(&automorphism),
                            uniform: true,
                        })
                    }
                    Probe::NonOccurrence(leaf) => {
                        let mut targets = self.targets.write().unwrap();
                        if targets.len() <= self.opts.extra_targets {
                            targets.push(leaf);
                        }
                        None
                    }
                    Probe::Mismatch => None,
                };
                self.gate.finish(sample);
                let p = probes.fetch_add(1, Ordering::Relaxed) + 1;
                if may_leave
                    && p >= min_probes
                    && (hits.load(Ordering::Relaxed) as f64) < p as f64 / (2.0 * width)
                {
                    self.gate.request_stop();
                }
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
        stats.probes += probes.into_inner();
        stats.occurrences += hits.into_inner();
        stats.refinements += refinements.into_inner();
        if self.gate.sealed() {
            LevelOutcome::Sealed
        } else if self.cancelled() {
            LevelOutcome::Cancelled
        } else {
            self.gate.resume();
            LevelOutcome::LowSuccess
        }
    }
}

/// Computes generators of the automorphism group of `graph`.
pub fn solve(graph: &ColoredGraph, opts: &SolverOptions) -> SolverResult {
    let started = Instant::now();
    let n = graph.vertex_count();
    let threads = opts.threads.max(1);
    let mut stats = Statistics::default();

    let mut refiner = Refiner::new(n);
    let target = random_walk(
        graph,
        opts.selector,
        &mut refiner,
        &mut rng_stream(opts.seed, 0),
    );
    stats.refinements += refiner.refinements();
    if target.base.is_empty() {
        stats.time_total = started.elapsed();
        return SolverResult {
            generators: Vec::new(),
            group_order: BigUint::from(1u32),
            base: Vec::new(),
            termination: Termination::Deterministic,
            statistics: stats,
            abort: None,
        };
    }
    let schreier = SchreierStructure::new(n, &target.base).expect("walk bases are duplicate-free");
    let mut rngs: Vec<WalkRng> = (0..threads)
        .map(|w| rng_stream(opts.seed, w as u64 + 1))
        .collect();
    let gate = Gate::new(if opts.record_samples {
        AbortState::with_log(opts.epsilon)
    } else {
        AbortState::new(opts.epsilon)
    });
    let targets = RwLock::new(vec![target.clone()]);
    let run = Run {
        graph,
        opts,
        schreier: &schreier,
        gate: &gate,
        targets: &targets,
    };

    let finish = |termination: Termination, mut stats: Statistics, probed: bool| {
        stats.time_total = started.elapsed();
        stats.extra_targets = targets.read().unwrap().len() - 1;
        SolverResult {
            generators: schreier.generators(),
            group_order: schreier.group_order(),
            base: target.base.clone(),
            termination,
            statistics: stats,
            abort: probed.then(|| gate.abort_state()),
        }
    };

    if opts.base_aligned {
        let t = Instant::now();
        stats.modes.push((Mode::BaseAligned, 0));
        let path = target_path(graph, opts.selector, &target);
        let ba = BaseAligned {
            graph,
            selector: opts.selector,
            target: &target,
            path: &path,
            schreier: &schreier,
            hard_factor: opts.hard_factor,
        };
        let report = ba.run(&mut rngs, &|| run.cancelled());
        stats.base_aligned_walks = report.walks;
        stats.refinements += report.refinements + path.len() as u64;
        stats.time_base_aligned = t.elapsed();
        if report.complete {
            return finish(Termination::Deterministic, stats, false);
        }
    }

    let bfs_config = BfsConfig {
        selector: opts.selector,
        deviation_extension: opts.deviation_extension,
        deviation_sets: opts.deviation_sets,
        merge_orbits: opts.merge_orbits,
        threads,
        memory_cap: opts.bfs_memory_cap,
        deadline: opts.deadline,
        cancel: opts.cancel.clone(),
    };
    let mut level = BfsLevel::root(graph);
    let mut bfs_allowed = true;
    let mut force_bfs = false;
    loop {
        if run.cancelled() {
            return finish(Termination::Cancelled, stats, true);
        }
        let at_leaves = level.level == target.base.len();
        let can_bfs = bfs_allowed && !at_leaves;
        let next_cost: usize = level
            .nodes
            .iter()
            .map(|node| {
                opts.selector
                    .select(&node.coloring)
                    .map_or(0, |c| node.coloring.cell_len(c))
            })
            .sum();
        let bfs = can_bfs
            && (force_bfs || next_cost as f64 <= opts.cost_factor * stats.refinements as f64);
        if bfs {
            let t = Instant::now();
            stats.modes.push((Mode::Bfs, level.level));
            match bfs_advance(graph, &level, &target, &schreier.generators(), &bfs_config) {
                Ok((next, s)) => {
                    stats.bfs.add(&s);
                    stats.nodes_expanded += s.expanded;
                    stats.refinements += s.expanded;
                    stats.bfs_depth = next.level;
                    level = next;
                    force_bfs = false;
                }
                Err(BfsError::MemoryCap { .. }) => bfs_allowed = false,
                Err(BfsError::Cancelled) => {}
                Err(BfsError::LeafLevel) => unreachable!("checked above"),
            }
            stats.time_bfs += t.elapsed();
            continue;
        }
        let t = Instant::now();
        stats.modes.push((Mode::LevelSearch, level.level));
        let outcome = run.level_search(&level, can_bfs, &mut rngs, &mut stats);
        stats.time_level_search += t.elapsed();
        match outcome {
            LevelOutcome::Sealed => {
                return finish(
                    Termination::Probabilistic {
                        epsilon: opts.epsilon,
                    },
                    stats,
                    true,
                )
            }
            LevelOutcome::Cancelled => return finish(Termination::Cancelled, stats, true),
            LevelOutcome::LowSuccess => force_bfs = true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn order(graph: &ColoredGraph, opts: &SolverOptions) -> BigUint {
        let r = solve(graph, opts);
        assert!(r.generators.iter().all(|g| graph.is_automorphism(g)));
        r.group_order
    }

    #[test]
    fn triangle() {
        let r = solve(&families::complete(3), &SolverOptions::default());
        assert_eq!(r.group_order, BigUint::from(6u32));
        assert_eq!(r.termination, Termination::Deterministic);
    }

    #[test]
    fn discrete_root() {
        let g = ColoredGraph::from_colored_edges(3, &[(0, 1), (1, 2)], &[1, 2, 3]);
        let r = solve(&g, &SolverOptions::default());
        assert_eq!(r.group_order, BigUint::from(1u32));
        assert!(r.generators.is_empty());
        assert!(r.base.is_empty());
    }

    #[test]
    fn rigid_graph() {
        let r = solve(&families::frucht(), &SolverOptions::default());
        assert_eq!(r.group_order, BigUint::from(1u32));
        assert!(r.generators.is_empty());
    }

    #[test]
    fn petersen_without_base_aligned() {
        let opts = SolverOptions {
            base_aligned: false,
            ..SolverOptions::default()
        };
        assert_eq!(order(&families::petersen(), &opts), BigUint::from(120u32));
    }

    #[test]
    fn same_seed_same_generators() {
        let g = families::hypercube(3);
        let opts = SolverOptions {
            seed: 11,
            base_aligned: false,
            ..SolverOptions::default()
        };
        let a = solve(&g, &opts);
        let b = solve(&g, &opts);
        assert_eq!(a.generators, b.generators);
    }

    #[test]
    fn threads_agree() {
        let g = families::petersen();
        let opts = SolverOptions {
            threads: 4,
            seed: 3,
            ..SolverOptions::default()
        };
        assert_eq!(order(&g, &opts), BigUint::from(120u32));
    }

    #[test]
    fn cancellation() {
        let cancel = Arc::new(AtomicBool::new(true));
        let opts = SolverOptions {
            cancel: Some(cancel),
            ..SolverOptions::default()
        };
        let r = solve(&families::petersen(), &opts);
        assert_eq!(r.termination, Termination::Cancelled);
    }
}
