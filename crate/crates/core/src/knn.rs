//! Exact k-nearest-neighbor search.
//!
//! Neighbor lists always start with the query point itself (distance 0); the
//! remaining `k - 1` entries are ordered by `(distance, index)`. Both the kd-tree
//! path and the brute-force oracle follow that rule, so their outputs are
//! identical rather than merely close.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::{squared_distance, Scalar};

const LEAF_SIZE: usize = 16;

/// Above this dimension the tree rarely prunes anything; scan instead.
const MAX_TREE_DIM: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    dist_sq: T,
    index: usize,
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Candidate<T> {}

impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Candidate<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist_sq
            .partial_cmp(&other.dist_sq)
            .unwrap_or(Ordering::Equal)
            .then(self.index.cmp(&other.index))
    }
}

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    // Child node ids; `None` for leaves.
    children: Option<(usize, usize)>,
}

/// Static kd-tree over the rows of a [`Dataset`], median split on the widest axis.
#[derive(Debug, Clone)]
pub struct KdTree<'a, T> {
    data: &'a Dataset<T>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<'a, T: Scalar> KdTree<'a, T> {
    pub fn new(data: &'a Dataset<T>) -> Self {
        let mut tree = KdTree {
            data,
            order: (0..data.n()).collect(),
            nodes: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        };
        tree.build(0, data.n());
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let d = self.data.d();
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            children: None,
        });

        let mut lo = self.data.point(self.order[start]).to_vec();
        let mut hi = lo.clone();
        for &i in &self.order[start + 1..end] {
            for (j, &c) in self.data.point(i).iter().enumerate() {
                lo[j] = lo[j].min(c);
                hi[j] = hi[j].max(c);
            }
        }
        let (axis, extent) = (0..d)
            .map(|j| (j, hi[j] - lo[j]))
            .fold((0, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        self.lower.extend_from_slice(&lo);
        self.upper.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE || extent == T::zero() {
            return id;
        }
        let mid = start + (end - start) / 2;
        let data = self.data;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data.point(a)[axis]
                .partial_cmp(&data.point(b)[axis])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    /// Squared distance from `query` to the node's bounding box. Never exceeds the
    /// squared distance to any point inside the box, in floating point too.
    fn box_dist_sq(&self, node: usize, query: &[T]) -> T {
        let d = self.data.d();
        let lo = &self.lower[node * d..(node + 1) * d];
        let hi = &self.upper[node * d..(node + 1) * d];
        query.iter().enumerate().fold(T::zero(), |acc, (j, &q)| {
            let gap = if q < lo[j] {
                lo[j] - q
            } else if q > hi[j] {
                q - hi[j]
            } else {
                T::zero()
            };
            acc + gap * gap
        })
    }

    fn search_knn(
        &self,
        node: usize,
        query: &[T],
        count: usize,
        skip: Option<usize>,
        heap: &mut BinaryHeap<Candidate<T>>,
    ) {
        let Node {
            start,
            end,
            children,
        } = self.nodes[node];
        match children {
            None => {
                for &i in &self.order[start..end] {
                    if Some(i) == skip {
                        continue;
                    }
                    offer(
                        heap,
                        count,
                        Candidate {
                            dist_sq: squared_distance(query, self.data.point(i)),
                            index: i,
                        },
                    );
                }
            }
            Some((left, right)) => {
                let dl = self.box_dist_sq(left, query);
                let dr = self.box_dist_sq(right, query);
                let visits = if dl <= dr {
                    [(left, dl), (right, dr)]
                } else {
                    [(right, dr), (left, dl)]
                };
                for (child, bound) in visits {
                    // Equal bounds may still hide a lower-index tie.
                    if heap.len() == count && bound > heap.peek().expect("heap is full").dist_sq {
                        continue;
                    }
                    self.search_knn(child, query, count, skip, heap);
                }
            }
        }
    }

    /// The `count` points nearest to `query` ordered by `(squared distance, index)`,
    /// optionally leaving out one row.
    pub fn nearest(&self, query: &[T], count: usize, skip: Option<usize>) -> Vec<(usize, T)> {
        if count == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(count + 1);
        self.search_knn(0, query, count, skip, &mut heap);
        heap.into_sorted_vec()
            .into_iter()
            .map(|c| (c.index, c.dist_sq))
            .collect()
    }

    /// Closest row to `query`; distance ties go to the lower row index.
    pub fn nearest_one(&self, query: &[T]) -> (usize, T) {
        self.nearest(query, 1, None)[0]
    }

    /// Every row within Euclidean distance `radius` of `query` (boundary included),
    /// in ascending index order.
    pub fn within_radius(&self, query: &[T], radius: T) -> Vec<usize> {
        let r_sq = radius * radius;
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            if self.box_dist_sq(node, query) > r_sq {
                continue;
            }
            let Node {
                start,
                end,
                children,
            } = self.nodes[node];
            match children {
                None => out.extend(
                    self.order[start..end]
                        .iter()
                        .copied()
                        .filter(|&i| squared_distance(query, self.data.point(i)) <= r_sq),
                ),
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn offer<T: Scalar>(heap: &mut BinaryHeap<Candidate<T>>, count: usize, cand: Candidate<T>) {
    if heap.len() < count {
        heap.push(cand);
    } else if cand < *heap.peek().expect("count > 0") {
        heap.pop();
        heap.push(cand);
    }
}

/// Per-point k-nearest-neighbor lists and k-NN radii.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnIndex<T> {
    k: usize,
    n: usize,
    d: usize,
    // u32 ids halve the row bytes streamed by the descent.
    neighbors: Vec<u32>,
    distances: Vec<T>,
    // Last column of `distances`, kept contiguous for the descent's random lookups.
    radii: Vec<T>,
}

impl<T: Scalar> KnnIndex<T> {
    fn from_parts(k: usize, n: usize, d: usize, neighbors: Vec<u32>, distances: Vec<T>) -> Self {
        let radii = distances.chunks_exact(k).map(|row| row[k - 1]).collect();
        Self {
            k,
            n,
            d,
            neighbors,
            distances,
            radii,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// The k nearest sample indices of point `i`, self first.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }

    #[inline]
    pub fn distances(&self, i: usize) -> &[T] {
        &self.distances[i * self.k..(i + 1) * self.k]
    }

    /// r_k(x_i): distance to the k-th nearest sample, counting x_i itself.
    #[inline]
    pub fn radius(&self, i: usize) -> T {
        self.radii[i]
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    /// Whether x_i and x_j are within each other's k-NN radius.
    pub fn mutual(&self, i: usize, j: usize, dist: T) -> bool {
        dist <= self.radius(i).min(self.radius(j))
    }

    /// Serializes as: magic `MCKNNIDX`, u32 version, u64 k, n, d, then `n*k`
    /// u64 neighbor ids and `n*k` f64 distances, all little-endian.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(INDEX_MAGIC)?;
        out.write_all(&INDEX_VERSION.to_le_bytes())?;
        for v in [self.k, self.n, self.d] {
            out.write_all(&(v as u64).to_le_bytes())?;
        }
        for &j in &self.neighbors {
            out.write_all(&(j as u64).to_le_bytes())?;
        }
        for &dist in &self.distances {
            out.write_all(&dist.as_f64().to_le_bytes())?;
        }
        out.flush()
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let bad = |message: String| Error::Format {
            what: "k-NN index",
            message,
        };
        let mut magic = [0u8; 8];
        read_exact(&mut input, &mut magic)?;
        if &magic != INDEX_MAGIC {
            return Err(bad("bad magic".into()));
        }
        let mut word = [0u8; 4];
        read_exact(&mut input, &mut word)?;
        let version = u32::from_le_bytes(word);
        if version != INDEX_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let k = read_u64(&mut input)? as usize;
        let n = read_u64(&mut input)? as usize;
        let d = read_u64(&mut input)? as usize;
        if k == 0 || n == 0 || d == 0 || k > n || n > MAX_POINTS {
            return Err(bad(format!("inconsistent header k={k} n={n} d={d}")));
        }
        let len = n
            .checked_mul(k)
            .ok_or_else(|| bad("header overflows".into()))?;
        let mut neighbors = Vec::with_capacity(len);
        for _ in 0..len {
            let j = read_u64(&mut input)? as usize;
            if j >= n {
                return Err(bad(format!("neighbor id {j} out of range")));
            }
            neighbors.push(j as u32);
        }
        let mut distances = Vec::with_capacity(len);
        for _ in 0..len {
            let mut buf = [0u8; 8];
            read_exact(&mut input, &mut buf)?;
            distances.push(T::of(f64::from_le_bytes(buf)));
        }
        Ok(KnnIndex::from_parts(k, n, d, neighbors, distances))
    }
}

const INDEX_MAGIC: &[u8; 8] = b"MCKNNIDX";
const INDEX_VERSION: u32 = 1;

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| Error::Format {
        what: "k-NN index",
        message: format!("truncated: {e}"),
    })
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(input, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Largest sample an index can hold; neighbor ids are stored as u32.
pub const MAX_POINTS: usize = u32::MAX as usize;

fn check_k<T: Scalar>(dataset: &Dataset<T>, k: usize) -> Result<()> {
    if k == 0 || k > dataset.n() {
        return Err(Error::InvalidK { k, n: dataset.n() });
    }
    if dataset.n() > MAX_POINTS {
        return Err(Error::InvalidConfig(format!(
            "{} points exceed the index limit of {MAX_POINTS}",
            dataset.n()
        )));
    }
    Ok(())
}

fn assemble<T: Scalar>(dataset: &Dataset<T>, k: usize, lists: Vec<Vec<(usize, T)>>) -> KnnIndex<T> {
    let n = dataset.n();
    let mut neighbors = Vec::with_capacity(n * k);
    let mut distances = Vec::with_capacity(n * k);
    for (i, others) in lists.into_iter().enumerate() {
        debug_assert_eq!(others.len(), k - 1);
        neighbors.push(i as u32);
        distances.push(T::zero());
        for (j, dist_sq) in others {
            neighbors.push(j as u32);
            distances.push(dist_sq.sqrt());
        }
    }
    KnnIndex::from_parts(k, n, dataset.d(), neighbors, distances)
}

/// Exact k-NN for every sample point (self included), kd-tree accelerated and
/// parallel over query points.
pub fn build_index<T: Scalar>(dataset: &Dataset<T>, k: usize) -> Result<KnnIndex<T>> {
    check_k(dataset, k)?;
    if dataset.d() > MAX_TREE_DIM {
        return knn_brute_force(dataset, k);
    }
    let tree = KdTree::new(dataset);
    let lists = (0..dataset.n())
        .into_par_iter()
        .map(|i| tree.nearest(dataset.point(i), k - 1, Some(i)))
        .collect();
    Ok(assemble(dataset, k, lists))
}

/// All-pairs O(n^2 d) k-NN with the same ordering rule as [`build_index`].
pub fn knn_brute_force<T: Scalar>(dataset: &Dataset<T>, k: usize) -> Result<KnnIndex<T>> {
    check_k(dataset, k)?;
    let n = dataset.n();
    let lists = (0..n)
        .into_par_iter()
        .map(|i| {
            let q = dataset.point(i);
            let mut all: Vec<Candidate<T>> = (0..n)
                .filter(|&j| j != i)
                .map(|j| Candidate {
                    dist_sq: squared_distance(q, dataset.point(j)),
                    index: j,
                })
                .collect();
            all.sort_unstable();
            all.truncate(k - 1);
            all.into_iter().map(|c| (c.index, c.dist_sq)).collect()
        })
        .collect();
    Ok(assemble(dataset, k, lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(values: &[f64]) -> Dataset<f64> {
        Dataset::from_values(values).unwrap()
    }

    #[test]
    fn radii_by_hand() {
        let data = line(&[0.0, 1.0, 2.0, 10.0]);
        for index in [build_index(&data, 2).unwrap(), knn_brute_force(&data, 2).unwrap()] {
            assert_eq!(index.radii(), vec![1.0, 1.0, 1.0, 8.0]);
            // 1 is equidistant from 0 and 2; the lower index wins.
            assert_eq!(index.neighbors(1), &[1, 0]);
            assert_eq!(index.neighbors(3), &[3, 2]);
        }
    }

    #[test]
    fn k_one_is_self() {
        let data = line(&[5.0, -1.0, 7.0]);
        let index = build_index(&data, 1).unwrap();
        assert_eq!(index.radii(), vec![0.0; 3]);
        assert_eq!(index.neighbors(2), &[2]);

        let single = line(&[3.0]);
        let index = knn_brute_force(&single, 1).unwrap();
        assert_eq!(index.radii(), vec![0.0]);
        assert_eq!(index.neighbors(0), &[0]);
    }

    #[test]
    fn invalid_k() {
        let data = line(&[0.0, 1.0]);
        assert!(matches!(build_index(&data, 0), Err(Error::InvalidK { .. })));
        assert!(matches!(build_index(&data, 3), Err(Error::InvalidK { .. })));
        assert!(matches!(knn_brute_force(&data, 3), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn duplicates_keep_self_first() {
        let data = line(&[1.0, 1.0, 1.0, 4.0]);
        let index = build_index(&data, 3).unwrap();
        assert_eq!(index.neighbors(2), &[2, 0, 1]);
        assert_eq!(index.radius(2), 0.0);
        assert_eq!(index, knn_brute_force(&data, 3).unwrap());
    }

    #[test]
    fn high_dimension_falls_back_to_scan() {
        let coords: Vec<f64> = (0..40 * 20).map(|i| ((i * 7919) % 101) as f64).collect();
        let data = Dataset::from_flat(coords, 20).unwrap();
        assert_eq!(build_index(&data, 5).unwrap(), knn_brute_force(&data, 5).unwrap());
    }

    #[test]
    fn radius_query_matches_scan() {
        let coords: Vec<f64> = (0..300).map(|i| ((i * 37) % 53) as f64 / 7.0).collect();
        let data = Dataset::from_flat(coords, 3).unwrap();
        let tree = KdTree::new(&data);
        for q in 0..data.n() {
            let expect: Vec<usize> = (0..data.n())
                .filter(|&j| crate::scalar::distance(data.point(q), data.point(j)) <= 1.5)
                .collect();
            assert_eq!(tree.within_radius(data.point(q), 1.5), expect);
        }
    }

    #[test]
    fn binary_round_trip_and_corruption() {
        let data = line(&[0.0, 0.3, 1.7, 2.2, 9.0]);
        let index = build_index(&data, 3).unwrap();
        let mut buf = Vec::new();
        index.write_binary(&mut buf).unwrap();
        assert_eq!(KnnIndex::<f64>::read_binary(buf.as_slice()).unwrap(), index);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(KnnIndex::<f64>::read_binary(bad.as_slice()).is_err());
        assert!(KnnIndex::<f64>::read_binary(&buf[..buf.len() - 3]).is_err());
    }

    fn dataset_strategy() -> impl Strategy<Value = (Dataset<f64>, usize)> {
        (1usize..=3, 2usize..60).prop_flat_map(|(d, n)| {
            (
                proptest::collection::vec(-10.0f64..10.0, n * d),
                Just(d),
                1usize..=n.min(12),
            )
                .prop_map(|(c, d, k)| (Dataset::from_flat(c, d).unwrap(), k))
        })
    }

    proptest! {
        #[test]
        fn tree_matches_brute_force((data, k) in dataset_strategy()) {
            prop_assert_eq!(build_index(&data, k).unwrap(), knn_brute_force(&data, k).unwrap());
        }

        #[test]
        fn radii_monotone_in_k((data, k) in dataset_strategy()) {
            prop_assume!(k < data.n());
            let a = build_index(&data, k).unwrap();
            let b = build_index(&data, k + 1).unwrap();
            for i in 0..data.n() {
                prop_assert!(b.radius(i) >= a.radius(i));
                let dists = a.distances(i);
                prop_assert!(dists.windows(2).all(|w| w[0] <= w[1]));
                prop_assert_eq!(a.neighbors(i)[0] as usize, i);
            }
        }

        #[test]
        fn mutual_condition_from_index((data, k) in dataset_strategy()) {
            let index = build_index(&data, k).unwrap();
            for i in 0..data.n() {
                for j in 0..data.n() {
                    let dist = crate::scalar::distance(data.point(i), data.point(j));
                    let both = dist <= index.radius(i) && dist <= index.radius(j);
                    prop_assert_eq!(index.mutual(i, j, dist), both);
                }
            }
        }
    }
}
