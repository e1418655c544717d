//! Permutations of `{0, .., n-1}`.
//!
//! Products are written left to right: `a.then(&b)` applies `a` first and
//! `b` second, so `(a.then(&b)).apply(v) == b.apply(a.apply(v))`.

use std::fmt;

use crate::error::PermutationError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from its image array, checking bijectivity.
    pub fn from_images(image: Vec<u32>) -> Result<Self, PermutationError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            let x = x as usize;
            if x >= n {
                return Err(PermutationError::OutOfRange { point: x + 1, n });
            }
            if seen[x] {
                return Err(PermutationError::NotBijective { point: x + 1 });
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    /// Caller guarantees `image` is a bijection.
    pub(crate) fn from_images_unchecked(image: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(image.clone()).is_ok());
        Permutation { image }
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<u32>]) -> Result<Self, PermutationError> {
        let mut image: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let a = a as usize;
                if a >= n {
                    return Err(PermutationError::OutOfRange { point: a + 1, n });
                }
                if touched[a] {
                    return Err(PermutationError::NotBijective { point: a + 1 });
                }
                touched[a] = true;
                image[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { image })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: u32) -> u32 {
        self.image[v as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { image: inv }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation {
            image: self
                .image
                .iter()
                .map(|&x| other.image[x as usize])
                .collect(),
        }
    }

    /// Points moved by the permutation.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.image
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    /// Disjoint cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.image[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v as u32);
                v = self.image[v] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle notation with 1-based points, fixed points omitted, `()` for the identity.
    pub fn to_cycle_notation(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for cycle in cycles {
            s.push('(');
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                s.push_str(&(v + 1).to_string());
            }
            s.push(')');
        }
        s
    }

    /// Parses 1-based cycle notation such as `(1 2 3)(4 5)`; commas are accepted as separators.
    pub fn parse_cycle_notation(n: usize, text: &str) -> Result<Self, PermutationError> {
        let text = text.trim();
        let mut cycles = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| PermutationError::Syntax(text.to_string()))?;
            let close = open
                .find(')')
                .ok_or_else(|| PermutationError::Syntax(text.to_string()))?;
            let body = &open[..close];
            let mut cycle = Vec::new();
            for tok in body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let v: usize = tok
                    .parse()
                    .map_err(|_| PermutationError::Syntax(text.to_string()))?;
                if v == 0 || v > n {
                    return Err(PermutationError::OutOfRange { point: v, n });
                }
                cycle.push((v - 1) as u32);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Permutation::from_cycles(n, &cycles)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}", self.to_cycle_notation())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_notation())
    }
}
