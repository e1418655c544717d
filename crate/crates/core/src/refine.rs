//! Color refinement with a trace invariant.
//!
//! Splitting cells are processed FIFO. When a cell splits, its fragments are
//! ordered by their neighbor count towards the splitter (ascending) and every
//! split appends two tokens to the trace: one locating the split, one hashing
//! the fragment sizes and counts. Everything that enters the trace is a
//! function of cell positions and sizes, never of vertex ids.

use std::collections::VecDeque;

use crate::coloring::Coloring;
use crate::error::ContractViolation;
use crate::graph::ColoredGraph;

/// Number of split events refinement continues past a trace deviation.
pub const DEFAULT_DEVIATION_EXTENSION: usize = 5;

const TAG_SPLIT: u64 = 0x5350_4c49_5400_0001;
const TAG_INDIVIDUALIZE: u64 = 0x494e_4449_5600_0002;
const TAG_END: u64 = 0x454e_4400_0000_0003;
const TAG_DEVIATION: u64 = 0x4445_5600_0000_0004;

/// 64-bit multiply-xor mixing.
#[inline]
pub fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// First deviation from a reference trace, extended by a few split events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Deviation {
    pub position: usize,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Matching,
    Deviated(Deviation),
}

#[derive(Clone, Copy, Debug)]
enum State {
    Matching,
    Extending {
        position: usize,
        value: u64,
        left: usize,
    },
    Deviated(Deviation),
}

/// Append-only stream of invariant tokens.
#[derive(Clone, Debug)]
pub struct Trace<'r> {
    reference: Option<&'r [u64]>,
    tokens: Option<Vec<u64>>,
    position: usize,
    hash: u64,
    state: State,
    extension: usize,
}

impl<'r> Trace<'r> {
    /// Records every token.
    pub fn recording() -> Self {
        Self::recording_from(0)
    }

    /// Records tokens of a stream whose first `position` tokens are elided.
    pub fn recording_from(position: usize) -> Self {
        Trace {
            reference: None,
            tokens: Some(Vec::new()),
            position,
            hash: 0,
            state: State::Matching,
            extension: 0,
        }
    }

    /// Keeps only the running hash and position.
    pub fn hashing() -> Self {
        Trace {
            tokens: None,
            ..Self::recording()
        }
    }

    /// Compares against `reference`, starting at global token index `position`.
    pub fn comparing(reference: &'r [u64], position: usize, extension: usize) -> Self {
        Trace {
            reference: Some(reference),
            tokens: None,
            position,
            hash: 0,
            state: State::Matching,
            extension,
        }
    }

    pub fn is_comparing(&self) -> bool {
        self.reference.is_some()
    }

    /// Global index of the next token.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn tokens(&self) -> Option<&[u64]> {
        self.tokens.as_deref()
    }

    pub fn into_tokens(self) -> Option<Vec<u64>> {
        self.tokens
    }

    pub fn status(&self) -> TraceStatus {
        match self.state {
            State::Deviated(d) => TraceStatus::Deviated(d),
            _ => TraceStatus::Matching,
        }
    }

    /// True once no more tokens are needed.
    #[inline]
    pub fn stopped(&self) -> bool {
        matches!(self.state, State::Deviated(_))
    }

    fn push(&mut self, token: u64) {
        let index = self.position;
        self.position += 1;
        self.hash = mix(self.hash, token);
        if let Some(tokens) = &mut self.tokens {
            tokens.push(token);
        }
        let Some(reference) = self.reference else {
            return;
        };
        match &mut self.state {
            State::Matching => {
                if reference.get(index) != Some(&token) {
                    let value = mix(TAG_DEVIATION, token);
                    self.state = if self.extension == 0 {
                        State::Deviated(Deviation {
                            position: index,
                            value,
                        })
                    } else {
                        State::Extending {
                            position: index,
                            value,
                            left: self.extension,
                        }
                    };
                }
            }
            State::Extending { value, .. } => *value = mix(*value, token),
            State::Deviated(_) => {}
        }
    }

    fn push_event(&mut self, a: u64, b: u64) {
        let extending = matches!(self.state, State::Extending { .. });
        self.push(a);
        self.push(b);
        if extending {
            if let State::Extending {
                position,
                value,
                left,
            } = &mut self.state
            {
                *left -= 1;
                if *left == 0 {
                    self.state = State::Deviated(Deviation {
                        position: *position,
                        value: *value,
                    });
                }
            }
        }
    }

    fn finish(&mut self) {
        if let State::Extending {
            position, value, ..
        } = self.state
        {
            self.state = State::Deviated(Deviation { position, value });
        }
    }
}

/// The recorded deviation, `None` if the trace matched its reference.
pub fn deviation_value(trace: &Trace<'_>) -> Result<Option<Deviation>, ContractViolation> {
    if !trace.is_comparing() {
        return Err(ContractViolation::NotComparing);
    }
    Ok(match trace.status() {
        TraceStatus::Matching => None,
        TraceStatus::Deviated(d) => Some(d),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    EarlyOut { position: usize },
}

/// Per-thread scratch space for refinement.
#[derive(Clone, Debug, Default)]
pub struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    fragments: Vec<(u32, u32, u32)>,
    refinements: u64,
}

impl Refiner {
    pub fn new(n: usize) -> Self {
        Refiner {
            count: vec![0; n],
            in_queue: vec![false; n],
            ..Default::default()
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.count.len() < n {
            self.count.resize(n, 0);
            self.in_queue.resize(n, false);
        }
    }

    /// Number of refinement calls made through this workspace.
    pub fn refinements(&self) -> u64 {
        self.refinements
    }

    /// Refines `coloring` to the coarsest equitable coloring below it, using
    /// every cell as an initial splitter.
    pub fn refine_all(
        &mut self,
        graph: &ColoredGraph,
        coloring: &mut Coloring,
        trace: &mut Trace<'_>,
    ) -> Outcome {
        self.ensure(graph.vertex_count());
        let starts: Vec<u32> = coloring.cell_starts().collect();
        for s in starts {
            self.enqueue(s);
        }
        self.run(graph, coloring, trace)
    }

    /// Individualizes `v` and refines. `coloring` must already be equitable.
    pub fn individualize_refine(
        &mut self,
        graph: &ColoredGraph,
        coloring: &mut Coloring,
        v: u32,
        trace: &mut Trace<'_>,
    ) -> Result<Outcome, ContractViolation> {
        self.ensure(graph.vertex_count());
        let len = coloring.cell_len(coloring.cell_of(v)) as u64;
        let s = coloring.individualize(v)?;
        trace.push(mix(mix(TAG_INDIVIDUALIZE, s as u64), len));
        if trace.stopped() {
            return Ok(self.early_out(trace));
        }
        self.enqueue(s);
        Ok(self.run(graph, coloring, trace))
    }

    #[inline]
    fn enqueue(&mut self, s: u32) {
        if !self.in_queue[s as usize] {
            self.in_queue[s as usize] = true;
            self.queue.push_back(s);
        }
    }

    fn early_out(&mut self, trace: &mut Trace<'_>) -> Outcome {
        while let Some(s) = self.queue.pop_front() {
            self.in_queue[s as usize] = false;
        }
        trace.finish();
        match trace.status() {
            TraceStatus::Deviated(d) => Outcome::EarlyOut {
                position: d.position,
            },
            TraceStatus::Matching => Outcome::Completed,
        }
    }

    fn run(
        &mut self,
        graph: &ColoredGraph,
        coloring: &mut Coloring,
        trace: &mut Trace<'_>,
    ) -> Outcome {
        self.refinements += 1;
        while let Some(splitter) = self.queue.pop_front() {
            self.in_queue[splitter as usize] = false;
            if coloring.is_discrete() {
                continue;
            }
            let start = splitter as usize;
            let len = coloring.cell_len[start] as usize;
            for i in start..start + len {
                let u = coloring.lab[i];
                for &w in graph.neighbors(u) {
                    let c = &mut self.count[w as usize];
                    if *c == 0 {
                        self.touched.push(w);
                    }
                    *c += 1;
                }
            }
            if self.touched.is_empty() {
                continue;
            }
            let count = &self.count;
            let cell_of = &coloring.cell_of;
            self.touched.sort_unstable_by_key(|&w| {
                ((cell_of[w as usize] as u64) << 32) | count[w as usize] as u64
            });

            let mut g = 0;
            while g < self.touched.len() {
                let s = coloring.cell_of[self.touched[g] as usize];
                let mut h = g;
                while h < self.touched.len() && coloring.cell_of[self.touched[h] as usize] == s {
                    h += 1;
                }
                self.split_cell(coloring, splitter, s, g, h, trace);
                g = h;
                if trace.stopped() {
                    break;
                }
            }
            for &w in &self.touched {
                self.count[w as usize] = 0;
            }
            self.touched.clear();
            if trace.stopped() {
                return self.early_out(trace);
            }
        }
        trace.push(mix(TAG_END, coloring.cells as u64));
        trace.finish();
        match trace.status() {
            TraceStatus::Deviated(d) => Outcome::EarlyOut {
                position: d.position,
            },
            TraceStatus::Matching => Outcome::Completed,
        }
    }

    /// Splits cell `s` using the touched vertices `touched[g..h]`, which are
    /// sorted by neighbor count.
    fn split_cell(
        &mut self,
        coloring: &mut Coloring,
        splitter: u32,
        s: u32,
        g: usize,
        h: usize,
        trace: &mut Trace<'_>,
    ) {
        let len = coloring.cell_len[s as usize];
        let t = (h - g) as u32;
        let group = &self.touched[g..h];
        let first_count = self.count[group[0] as usize];
        if t == len && self.count[group[t as usize - 1] as usize] == first_count {
            return;
        }

        // Touched vertices go to the back of the cell in count order; the
        // untouched ones (count zero) stay in front.
        let base = s + len - t;
        for (j, &w) in group.iter().enumerate() {
            let p = base + j as u32;
            let q = coloring.pos[w as usize];
            let x = coloring.lab[p as usize];
            coloring.lab.swap(p as usize, q as usize);
            coloring.pos[x as usize] = q;
            coloring.pos[w as usize] = p;
        }

        self.fragments.clear();
        if t < len {
            self.fragments.push((s, len - t, 0));
        }
        let mut j = 0;
        while j < group.len() {
            let c = self.count[group[j] as usize];
            let mut k = j;
            while k < group.len() && self.count[group[k] as usize] == c {
                k += 1;
            }
            self.fragments.push((base + j as u32, (k - j) as u32, c));
            j = k;
        }

        let mut shape = mix(len as u64, self.fragments.len() as u64);
        for &(_, flen, c) in &self.fragments {
            shape = mix(shape, ((c as u64) << 32) | flen as u64);
        }
        trace.push_event(mix(mix(TAG_SPLIT, splitter as u64), s as u64), shape);

        for &(fs, flen, _) in &self.fragments[1..] {
            for i in fs..fs + flen {
                coloring.cell_of[coloring.lab[i as usize] as usize] = fs;
            }
        }
        for &(fs, flen, _) in &self.fragments {
            coloring.cell_len[fs as usize] = flen;
        }
        coloring.cells += self.fragments.len() - 1;

        if self.in_queue[s as usize] {
            for i in 1..self.fragments.len() {
                let fs = self.fragments[i].0;
                self.enqueue(fs);
            }
        } else {
            let mut largest = 0;
            for (i, f) in self.fragments.iter().enumerate() {
                if f.1 > self.fragments[largest].1 {
                    largest = i;
                }
            }
            for i in 0..self.fragments.len() {
                if i != largest {
                    let fs = self.fragments[i].0;
                    self.enqueue(fs);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> ColoredGraph {
        ColoredGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn path3() -> ColoredGraph {
        ColoredGraph::from_edges(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn triangle_is_already_equitable() {
        let g = k3();
        let mut c = g.initial_coloring();
        let mut r = Refiner::new(3);
        let mut t = Trace::recording();
        assert_eq!(r.refine_all(&g, &mut c, &mut t), Outcome::Completed);
        assert_eq!(c.cells(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn path_splits_by_degree() {
        let g = path3();
        let mut c = g.initial_coloring();
        let mut r = Refiner::new(3);
        r.refine_all(&g, &mut c, &mut Trace::hashing());
        assert_eq!(c.cells(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn path_endpoint_individualization_is_discrete() {
        let g = path3();
        let mut c = g.initial_coloring();
        let mut r = Refiner::new(3);
        let mut t = Trace::recording();
        r.refine_all(&g, &mut c, &mut t);
        r.individualize_refine(&g, &mut c, 0, &mut t).unwrap();
        assert!(c.is_discrete());
        assert_eq!(c.cells(), vec![vec![0], vec![2], vec![1]]);
    }

    #[test]
    fn identical_traces_have_no_deviation() {
        let g = path3();
        let mut r = Refiner::new(3);
        let mut reference = Trace::recording();
        let mut c = g.initial_coloring();
        r.refine_all(&g, &mut c, &mut reference);
        let tokens = reference.into_tokens().unwrap();
        let mut cmp = Trace::comparing(&tokens, 0, 5);
        let mut c = g.initial_coloring();
        assert_eq!(r.refine_all(&g, &mut c, &mut cmp), Outcome::Completed);
        assert_eq!(deviation_value(&cmp), Ok(None));
    }

    #[test]
    fn deviation_requires_compare_mode() {
        assert_eq!(
            deviation_value(&Trace::recording()),
            Err(ContractViolation::NotComparing)
        );
    }

    #[test]
    fn deviation_reports_first_differing_position() {
        let tokens: Vec<u64> = (0..10).collect();
        let mut t = Trace::comparing(&tokens, 0, 0);
        for i in 0..7 {
            t.push(i);
        }
        t.push(99);
        assert_eq!(deviation_value(&t).unwrap().unwrap().position, 7);
    }

    #[test]
    fn extension_accumulates_further_events() {
        let tokens = vec![1u64; 32];
        let mut a = Trace::comparing(&tokens, 0, 2);
        let mut b = Trace::comparing(&tokens, 0, 2);
        a.push_event(5, 6);
        b.push_event(5, 6);
        assert!(!a.stopped());
        a.push_event(1, 1);
        b.push_event(1, 2);
        a.push_event(1, 1);
        b.push_event(1, 1);
        assert!(a.stopped() && b.stopped());
        let (da, db) = (
            deviation_value(&a).unwrap().unwrap(),
            deviation_value(&b).unwrap().unwrap(),
        );
        assert_eq!(da.position, db.position);
        assert_ne!(da.value, db.value);
        // further pushes do not change a sealed deviation
        a.push_event(7, 7);
        assert_eq!(deviation_value(&a).unwrap().unwrap(), da);
    }
}
