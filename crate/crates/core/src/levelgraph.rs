//! Incremental mutual k-NN graph over the points activated so far.
//!
//! Connected components live in a disjoint-set forest (union by size, path
//! compression). Members of a component form a circular linked list, spliced
//! in O(1) on merge. Each root also carries a "seen" flag recording whether the
//! component already produced a core.
//! Nodes and edges are only ever added.

use crate::error::{Error, Result};
use crate::knn::KnnIndex;
use crate::scalar::Scalar;

// Ids are u32 and the active flags a bitset, so the arrays read on every edge
// check stay small enough to sit in cache.
#[derive(Debug, Clone)]
pub struct LevelGraph {
    parent: Vec<u32>,
    active: Vec<u64>,
    size: Vec<u32>,
    next: Vec<u32>,
    seen: Vec<bool>,
    active_count: usize,
    components: usize,
}

impl LevelGraph {
    /// Empty graph with room for node ids `0..capacity`.
    ///
    /// # Panics
    /// If `capacity` exceeds `u32::MAX`.
    pub fn new(capacity: usize) -> Self {
        assert!(u32::try_from(capacity).is_ok(), "LevelGraph capacity {capacity} exceeds u32");
        let ids: Vec<u32> = (0..capacity as u32).collect();
        Self {
            parent: ids.clone(),
            active: vec![0; capacity.div_ceil(64)],
            size: vec![1; capacity],
            next: ids,
            seen: vec![false; capacity],
            active_count: 0,
            components: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.parent.len()
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    #[inline]
    fn active_bit(&self, i: usize) -> bool {
        (self.active[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn is_active(&self, i: usize) -> bool {
        i < self.capacity() && self.active_bit(i)
    }

    fn check_active(&self, i: usize) -> Result<()> {
        if i >= self.capacity() {
            return Err(Error::NodeOutOfRange {
                index: i,
                capacity: self.capacity(),
            });
        }
        if !self.active_bit(i) {
            return Err(Error::InactiveNode(i));
        }
        Ok(())
    }

    pub fn add_node(&mut self, i: usize) -> Result<()> {
        if i >= self.capacity() {
            return Err(Error::NodeOutOfRange {
                index: i,
                capacity: self.capacity(),
            });
        }
        if self.active_bit(i) {
            return Err(Error::DuplicateNode(i));
        }
        self.active[i / 64] |= 1 << (i % 64);
        self.active_count += 1;
        self.components += 1;
        Ok(())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = i;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Merges two roots and returns the surviving one.
    fn union_roots(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        self.next.swap(big, small);
        self.seen[big] |= self.seen[small];
        self.components -= 1;
        big
    }

    /// Unconditional edge between two active nodes.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_active(i)?;
        self.check_active(j)?;
        let (a, b) = (self.find(i), self.find(j));
        self.union_roots(a, b);
        Ok(())
    }

    /// Connects `i` to every active listed neighbor `j` with
    /// ‖x_i − x_j‖ ≤ min(r_k(x_i), r_k(x_j)).
    pub fn add_mutual_edges<T: Scalar>(&mut self, i: usize, index: &KnnIndex<T>) -> Result<()> {
        self.check_active(i)?;
        let radius_i = index.radius(i);
        let radii = index.radii();
        let mut root = self.find(i);
        for (&j, &dist) in index.neighbors(i).iter().zip(index.distances(i)).skip(1) {
            let j = j as usize;
            if self.active_bit(j) && dist <= radius_i && dist <= radii[j] {
                let other = self.find(j);
                root = self.union_roots(root, other);
            }
        }
        Ok(())
    }

    /// Canonical root of the component containing `i`.
    pub fn component_of(&mut self, i: usize) -> Result<usize> {
        self.check_active(i)?;
        Ok(self.find(i))
    }

    /// Members of `i`'s component, starting at its root (not sorted).
    pub fn component_members(&mut self, i: usize) -> Result<Vec<usize>> {
        let root = self.component_of(i)?;
        let mut out = Vec::with_capacity(self.size[root] as usize);
        let mut cur = root;
        loop {
            out.push(cur);
            cur = self.next[cur] as usize;
            if cur == root {
                break;
            }
        }
        Ok(out)
    }

    /// Test-and-set: returns whether `i`'s component was already seen, then marks it seen.
    pub fn component_seen(&mut self, i: usize) -> Result<bool> {
        let root = self.component_of(i)?;
        Ok(std::mem::replace(&mut self.seen[root], true))
    }

    /// Reads the seen flag without setting it.
    pub fn peek_seen(&mut self, i: usize) -> Result<bool> {
        let root = self.component_of(i)?;
        Ok(self.seen[root])
    }
}
