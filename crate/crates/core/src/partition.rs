//! Normalized equivalence relations on a finite index set.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// An equivalence relation on `{0, …, len-1}`.
///
/// Class indices are numbered in order of first occurrence, so two
/// partitions are equal exactly when their tables are equal. The same type
/// doubles as a restricted growth string for set-partition enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatePartition {
    class_of: Vec<usize>,
    class_count: usize,
}

impl StatePartition {
    /// Validates an already-normalized class table.
    pub fn new(class_of: Vec<usize>) -> Result<Self> {
        let mut next = 0;
        for (i, &c) in class_of.iter().enumerate() {
            if c > next {
                return Err(Error::MalformedPartition(format!(
                    "index {i} has class {c} before class {next} appeared"
                )));
            }
            if c == next {
                next += 1;
            }
        }
        Ok(StatePartition { class_of, class_count: next })
    }

    /// Builds a partition from arbitrary labels; equal labels share a class.
    pub fn from_labels<T: Eq + Hash>(labels: impl IntoIterator<Item = T>) -> Self {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let class_of: Vec<usize> = labels
            .into_iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        let class_count = ids.len();
        StatePartition { class_of, class_count }
    }

    pub fn discrete(len: usize) -> Self {
        StatePartition { class_of: (0..len).collect(), class_count: len }
    }

    /// All elements in one class.
    pub fn single(len: usize) -> Self {
        StatePartition { class_of: vec![0; len], class_count: usize::from(len > 0) }
    }

    /// Partition from explicit blocks; every index must appear exactly once.
    pub fn from_blocks(len: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; len];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= len || label[i] != usize::MAX {
                    return Err(Error::MalformedPartition(format!("index {i} misplaced")));
                }
                label[i] = b;
            }
        }
        if label.contains(&usize::MAX) {
            return Err(Error::MalformedPartition("blocks do not cover".into()));
        }
        Ok(Self::from_labels(label))
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.class_of
    }

    pub fn same_class(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.class_count == self.class_of.len()
    }

    /// Members of each class, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.class_count];
        for (i, &c) in self.class_of.iter().enumerate() {
            blocks[c].push(i);
        }
        blocks
    }

    /// True if every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &StatePartition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image = vec![usize::MAX; self.class_count];
        for (i, &c) in self.class_of.iter().enumerate() {
            let d = coarser.class_of[i];
            if image[c] == usize::MAX {
                image[c] = d;
            } else if image[c] != d {
                return false;
            }
        }
        true
    }

    /// Pulls a partition of this partition's classes back to the underlying set.
    pub fn compose(&self, of_classes: &StatePartition) -> StatePartition {
        Self::from_labels(self.class_of.iter().map(|&c| of_classes.class_of[c]))
    }
}

/// Union-find with path halving; used for congruence closures.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(len: usize) -> Self {
        UnionFind { parent: (0..len).collect() }
    }

    pub(crate) fn from_partition(p: &StatePartition) -> Self {
        let mut uf = Self::new(p.len());
        let mut rep = vec![usize::MAX; p.class_count()];
        for i in 0..p.len() {
            let c = p.class_of(i);
            if rep[c] == usize::MAX {
                rep[c] = i;
            } else {
                uf.parent[i] = rep[c];
            }
        }
        uf
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn partition(&mut self) -> StatePartition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|i| self.find(i)).collect();
        StatePartition::from_labels(roots)
    }
}
