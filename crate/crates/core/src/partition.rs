//! Set partitions of `{0..n}` in canonical (restricted-growth) form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_partitions`] unless the caller raises it.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// A set partition stored as a restricted-growth string: labels appear as
/// `0, 1, 2, …` in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::usage("a partition needs at least one item"));
        }
        let mut map = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Partition { assignment })
    }

    /// Builds from blocks of indices; the blocks must cover `0..n` exactly once.
    pub fn from_blocks(blocks: &[Vec<usize>], n: usize) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::usage("empty block"));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::usage(format!("index {i} out of range for n = {n}")));
                }
                if labels[i] != usize::MAX {
                    return Err(Error::usage(format!("index {i} assigned twice")));
                }
                labels[i] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::usage("blocks do not cover every index"));
        }
        Self::from_labels(&labels)
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
        }
    }

    pub fn one_block(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn num_blocks(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks in label order, each with ascending indices.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.assignment.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks()];
        for &l in &self.assignment {
            sizes[l] += 1;
        }
        sizes
    }

    /// The partition of permuted items: new item `i` is old item `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::usage("permutation length mismatch"));
        }
        let labels: Vec<usize> = perm
            .iter()
            .map(|&i| self.assignment.get(i).copied().ok_or_else(|| Error::usage("bad permutation")))
            .collect::<Result<_>>()?;
        Self::from_labels(&labels)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.assignment
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        Partition::from_labels(&labels)
    }
}

/// Bell numbers `B(0..=n)` by the Bell triangle, as `f64` (exact through
/// `n = 22`).
pub fn bell_numbers(n: usize) -> Vec<f64> {
    let mut bells = vec![1.0];
    let mut row = vec![1.0];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        bells.push(next[0]);
        row = next;
    }
    bells.truncate(n + 1);
    bells
}

pub fn bell(n: usize) -> f64 {
    bell_numbers(n)[n]
}

/// Restricted-growth strings of length `n` extending a fixed prefix, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct RgsIter {
    current: Vec<usize>,
    // max(current[..=i]) for every i
    prefix_max: Vec<usize>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl RgsIter {
    /// All partitions of `n` items.
    pub fn new(n: usize) -> Self {
        Self::with_prefix(&[0], n)
    }

    /// Partitions whose first `prefix.len()` labels equal `prefix`; the
    /// prefix must itself be a restricted-growth string.
    pub fn with_prefix(prefix: &[usize], n: usize) -> Self {
        assert!(n >= 1 && !prefix.is_empty() && prefix.len() <= n);
        let mut current = prefix.to_vec();
        current.resize(n, 0);
        let mut prefix_max = Vec::with_capacity(n);
        let mut m = 0;
        for &v in &current {
            m = m.max(v);
            prefix_max.push(m);
        }
        RgsIter {
            current,
            prefix_max,
            fixed: prefix.len(),
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        let mut i = n;
        while i > self.fixed {
            i -= 1;
            if self.current[i] <= self.prefix_max[i - 1] {
                self.current[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.current[i]);
                for j in i + 1..n {
                    self.current[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(self.current.clone())
    }
}

/// All restricted-growth strings of length `len` (used as work prefixes).
pub(crate) fn rgs_prefixes(len: usize) -> Vec<Vec<usize>> {
    RgsIter::new(len).collect()
}

/// Every set partition of `n` items exactly once, in lexicographic RGS order.
pub fn enumerate_partitions(n: usize, cap: usize) -> Result<impl Iterator<Item = Partition>> {
    check_cap(n, cap)?;
    Ok(RgsIter::new(n).map(|assignment| Partition { assignment }))
}

pub(crate) fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap, bell: bell(n) });
    }
    Ok(())
}
