//! Ordered vertex partitions.
//!
//! Cells are contiguous ranges of the `lab` array. A cell is identified by
//! the position of its first element, so cell identifiers only depend on the
//! sizes and order of cells and never on vertex ids.

use crate::error::ContractViolation;
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    /// Vertices in cell order.
    pub(crate) lab: Vec<u32>,
    /// Inverse of `lab`.
    pub(crate) pos: Vec<u32>,
    /// Start position of the cell containing each vertex.
    pub(crate) cell_of: Vec<u32>,
    /// Cell length, valid at cell start positions.
    pub(crate) cell_len: Vec<u32>,
    pub(crate) cells: usize,
}

impl Coloring {
    /// Single cell containing all vertices.
    pub fn unit(n: usize) -> Self {
        Self::from_colors(&vec![0; n], 1)
    }

    /// Cells ordered by color value; `colors` must be surjective onto `0..k`.
    pub fn from_colors(colors: &[u32], k: usize) -> Self {
        let n = colors.len();
        let mut count = vec![0u32; k + 1];
        for &c in colors {
            count[c as usize + 1] += 1;
        }
        for i in 0..k {
            count[i + 1] += count[i];
        }
        let starts = count.clone();
        let mut lab = vec![0u32; n];
        for (v, &c) in colors.iter().enumerate() {
            lab[count[c as usize] as usize] = v as u32;
            count[c as usize] += 1;
        }
        let mut pos = vec![0u32; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut cell_of = vec![0u32; n];
        let mut cell_len = vec![0u32; n];
        let mut cells = 0;
        for c in 0..k {
            let (s, e) = (starts[c], starts[c + 1]);
            if s == e {
                continue;
            }
            cells += 1;
            cell_len[s as usize] = e - s;
            for i in s..e {
                cell_of[lab[i as usize] as usize] = s;
            }
        }
        Coloring {
            lab,
            pos,
            cell_of,
            cell_len,
            cells,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.lab.len()
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.cells
    }

    #[inline]
    pub fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// Start position of the cell containing `v`.
    #[inline]
    pub fn cell_of(&self, v: u32) -> u32 {
        self.cell_of[v as usize]
    }

    #[inline]
    pub fn cell_len(&self, start: u32) -> usize {
        self.cell_len[start as usize] as usize
    }

    #[inline]
    pub fn cell(&self, start: u32) -> &[u32] {
        let s = start as usize;
        &self.lab[s..s + self.cell_len[s] as usize]
    }

    #[inline]
    pub fn position(&self, v: u32) -> u32 {
        self.pos[v as usize]
    }

    /// Cell start positions in order.
    pub fn cell_starts(&self) -> CellStarts<'_> {
        CellStarts {
            coloring: self,
            next: 0,
        }
    }

    /// Cells as sorted vertex lists, in cell order.
    pub fn cells(&self) -> Vec<Vec<u32>> {
        self.cell_starts()
            .map(|s| {
                let mut c = self.cell(s).to_vec();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// The surjective color map `v -> 0..cell_count` in cell order.
    pub fn color_indices(&self) -> Vec<u32> {
        let mut out = vec![0; self.vertex_count()];
        for (i, s) in self.cell_starts().enumerate() {
            for &v in self.cell(s) {
                out[v as usize] = i as u32;
            }
        }
        out
    }

    /// Splits `{v}` out of its cell, placing the singleton directly before the
    /// rest of the cell. Returns the start of the new singleton cell.
    pub fn individualize(&mut self, v: u32) -> Result<u32, ContractViolation> {
        let s = self.cell_of[v as usize];
        let len = self.cell_len[s as usize];
        if len <= 1 {
            return Err(ContractViolation::AlreadySingleton(v));
        }
        let p = self.pos[v as usize];
        let first = self.lab[s as usize];
        self.lab.swap(s as usize, p as usize);
        self.pos[first as usize] = p;
        self.pos[v as usize] = s;
        self.cell_len[s as usize] = 1;
        self.cell_len[s as usize + 1] = len - 1;
        for i in s + 1..s + len {
            self.cell_of[self.lab[i as usize] as usize] = s + 1;
        }
        self.cells += 1;
        Ok(s)
    }

    /// A discrete coloring read as the permutation `position -> vertex`.
    pub fn as_permutation(&self) -> Option<Permutation> {
        self.is_discrete()
            .then(|| Permutation::from_images_unchecked(self.lab.clone()))
    }

    /// True iff every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &Coloring) -> bool {
        self.cell_starts().all(|s| {
            let cell = self.cell(s);
            let c = coarser.cell_of(cell[0]);
            cell.iter().all(|&v| coarser.cell_of(v) == c)
        })
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        4 * 4 * self.lab.len()
    }
}

pub struct CellStarts<'a> {
    coloring: &'a Coloring,
    next: usize,
}

impl Iterator for CellStarts<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.next >= self.coloring.lab.len() {
            return None;
        }
        let s = self.next;
        self.next += self.coloring.cell_len[s] as usize;
        Some(s as u32)
    }
}
