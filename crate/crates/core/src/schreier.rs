//! Schreier structure on a fixed base, safe for concurrent sifting.
//!
//! Level `i` stores coset representatives keyed by the image `b` of base
//! point `i`; the entry for `b` maps base point `i` to `b` and fixes all
//! earlier base points. Entries are written once and never replaced, so
//! lookups need no lock. Writers take the lock of the level they change and,
//! nested inside it, the generator lock. Levels are locked one at a time.
//!
//! Every level is kept closed under the generators that fix all earlier base
//! points, so each level's entries form the full orbit of its base point
//! under those generators. The product of level sizes is then exactly the
//! group order once the generators are strong for the base.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::ContractViolation;
use crate::perm::Permutation;

#[derive(Debug)]
struct Element {
    perm: Permutation,
    inverse: Permutation,
}

impl Element {
    fn new(perm: Permutation) -> Arc<Self> {
        let inverse = perm.inverse();
        Arc::new(Element { perm, inverse })
    }
}

#[derive(Debug)]
struct Level {
    point: u32,
    slots: Vec<OnceLock<Arc<Element>>>,
    size: AtomicUsize,
    /// Orbit points in insertion order; guarded by the level lock.
    orbit: Mutex<Vec<u32>>,
}

#[derive(Clone, Debug)]
struct Generator {
    perm: Arc<Permutation>,
    /// Level at which the generator was installed; it fixes all base points
    /// before that level.
    level: usize,
}

#[derive(Debug)]
pub struct SchreierStructure {
    n: usize,
    base: Vec<u32>,
    levels: Vec<Level>,
    generators: Mutex<Vec<Generator>>,
}

impl SchreierStructure {
    /// Trivial structure on `base` over `n` points.
    pub fn new(n: usize, base: &[u32]) -> Result<Self, ContractViolation> {
        if base.is_empty() {
            return Err(ContractViolation::EmptyBase);
        }
        let mut seen = vec![false; n];
        for &b in base {
            assert!((b as usize) < n, "base point {b} out of range");
            if std::mem::replace(&mut seen[b as usize], true) {
                return Err(ContractViolation::DuplicateBasePoint(b));
            }
        }
        let levels = base
            .iter()
            .map(|&point| {
                let slots: Vec<OnceLock<Arc<Element>>> = (0..n).map(|_| OnceLock::new()).collect();
                let _ = slots[point as usize].set(Element::new(Permutation::identity(n)));
                Level {
                    point,
                    slots,
                    size: AtomicUsize::new(1),
                    orbit: Mutex::new(vec![point]),
                }
            })
            .collect();
        Ok(SchreierStructure {
            n,
            base: base.to_vec(),
            levels,
            generators: Mutex::new(Vec::new()),
        })
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// Number of stored representatives at `level`.
    pub fn level_size(&self, level: usize) -> usize {
        self.levels[level].size.load(Ordering::Acquire)
    }

    /// True iff the representative mapping base point `level` to `b` exists.
    pub fn has_representative(&self, level: usize, b: u32) -> bool {
        self.levels[level].slots[b as usize].get().is_some()
    }

    /// Points currently known to be in the orbit of base point `level`.
    pub fn orbit(&self, level: usize) -> Vec<u32> {
        self.levels[level].orbit.lock().unwrap().clone()
    }

    /// The representative for `b` at `level`, if present.
    pub fn representative(&self, level: usize, b: u32) -> Option<Permutation> {
        self.levels[level].slots[b as usize]
            .get()
            .map(|e| e.perm.clone())
    }

    /// Sifts `phi`, which must be an automorphism for which the base is a base.
    /// Returns true iff the structure was left unchanged.
    pub fn sift(&self, phi: &Permutation) -> bool {
        assert_eq!(phi.len(), self.n);
        let mut g = phi.clone();
        let mut i = 0;
        loop {
            while i < self.levels.len() {
                let b = g.apply(self.levels[i].point);
                match self.levels[i].slots[b as usize].get() {
                    Some(t) => g = g.then(&t.inverse),
                    None => break,
                }
                i += 1;
            }
            if g.is_identity() {
                return true;
            }
            assert!(
                i < self.levels.len(),
                "element fixes the whole base but is not the identity"
            );
            let level = &self.levels[i];
            let b = g.apply(level.point);
            let mut orbit = level.orbit.lock().unwrap();
            if level.slots[b as usize].get().is_some() {
                // Another thread installed this key since our lookup.
                drop(orbit);
                continue;
            }
            let gens = {
                let mut gens = self.generators.lock().unwrap();
                gens.push(Generator {
                    perm: Arc::new(g.clone()),
                    level: i,
                });
                gens.clone()
            };
            let _ = level.slots[b as usize].set(Element::new(g));
            orbit.push(b);
            level.size.fetch_add(1, Ordering::AcqRel);
            self.close_level(i, &mut orbit, &gens);
            drop(orbit);
            for j in (0..i).rev() {
                let mut orbit = self.levels[j].orbit.lock().unwrap();
                let gens = self.generators.lock().unwrap().clone();
                self.close_level(j, &mut orbit, &gens);
            }
            return false;
        }
    }

    /// Extends level `j` to the orbit of its base point under the generators
    /// fixing all earlier base points. Caller holds the level lock.
    fn close_level(&self, j: usize, orbit: &mut Vec<u32>, gens: &[Generator]) {
        let level = &self.levels[j];
        let relevant: Vec<&Permutation> = gens
            .iter()
            .filter(|g| g.level >= j)
            .map(|g| &*g.perm)
            .collect();
        let mut idx = 0;
        while idx < orbit.len() {
            let a = orbit[idx];
            for gen in &relevant {
                let b = gen.apply(a);
                if level.slots[b as usize].get().is_none() {
                    let rep = level.slots[a as usize]
                        .get()
                        .expect("orbit point has a representative");
                    let _ = level.slots[b as usize].set(Element::new(rep.perm.then(gen)));
                    orbit.push(b);
                    level.size.fetch_add(1, Ordering::AcqRel);
                }
            }
            idx += 1;
        }
    }

    /// Product of the level sizes.
    pub fn group_order(&self) -> BigUint {
        let _gens = self.generators.lock().unwrap();
        self.levels.iter().fold(BigUint::one(), |acc, l| {
            acc * BigUint::from(l.size.load(Ordering::Acquire))
        })
    }

    /// Snapshot of the generating set.
    pub fn generators(&self) -> Vec<Permutation> {
        self.generators
            .lock()
            .unwrap()
            .iter()
            .map(|g| (*g.perm).clone())
            .collect()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.lock().unwrap().len()
    }

    /// Checks the stored-representative invariants; used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, level) in self.levels.iter().enumerate() {
            let orbit = level.orbit.lock().unwrap();
            let mut count = 0;
            for (b, slot) in level.slots.iter().enumerate() {
                let Some(t) = slot.get() else { continue };
                count += 1;
                if t.perm.apply(level.point) != b as u32 {
                    return Err(format!(
                        "level {i}: entry {b} maps base point to {}",
                        t.perm.apply(level.point)
                    ));
                }
                if let Some(&p) = self.base[..i].iter().find(|&&p| t.perm.apply(p) != p) {
                    return Err(format!("level {i}: entry {b} moves earlier base point {p}"));
                }
                if !t.perm.then(&t.inverse).is_identity() {
                    return Err(format!("level {i}: entry {b} has a wrong inverse"));
                }
            }
            if level.slots[level.point as usize]
                .get()
                .map(|t| t.perm.is_identity())
                != Some(true)
            {
                return Err(format!("level {i}: identity entry missing"));
            }
            if count != orbit.len() || count != level.size.load(Ordering::Acquire) {
                return Err(format!("level {i}: size bookkeeping mismatch"));
            }
        }
        Ok(())
    }
}
