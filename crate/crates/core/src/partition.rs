//! Finite ground sets, partitions and systems of pairwise independent
//! partitions.
//!
//! Every axis of a system is a ground set `0..size`. Blocks are stored as
//! fixed-width bit sets, and the blocks of a [`Partition`] are kept in
//! canonical order (ascending by minimum element), so two partitions are
//! equal exactly when they have the same blocks.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of the ground set `0..axis_size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    size: usize,
    blocks: Vec<FixedBitSet>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition from explicit element lists, validating the axioms.
    pub fn new(axis_size: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if axis_size < 2 {
            return Err(Error::GroundSetTooSmall(axis_size));
        }
        let mut sets = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(Error::EmptyBlock);
            }
            let mut set = FixedBitSet::with_capacity(axis_size);
            for &e in block {
                if e >= axis_size {
                    return Err(Error::ElementOutOfRange { element: e, size: axis_size });
                }
                set.insert(e);
            }
            sets.push(set);
        }
        Self::from_bitsets(axis_size, sets)
    }

    pub fn from_bitsets(axis_size: usize, mut blocks: Vec<FixedBitSet>) -> Result<Self> {
        if axis_size < 2 {
            return Err(Error::GroundSetTooSmall(axis_size));
        }
        let mut block_of = vec![usize::MAX; axis_size];
        for block in &mut blocks {
            if let Some(element) = block.ones().find(|&e| e >= axis_size) {
                return Err(Error::ElementOutOfRange { element, size: axis_size });
            }
            // Equality of bit sets includes their length.
            if block.len() != axis_size {
                let mut resized = FixedBitSet::with_capacity(axis_size);
                resized.extend(block.ones());
                *block = resized;
            }
            if block.is_clear() {
                return Err(Error::EmptyBlock);
            }
        }
        blocks.sort_by_key(|b| b.ones().next());
        for (i, block) in blocks.iter().enumerate() {
            for e in block.ones() {
                if block_of[e] != usize::MAX {
                    return Err(Error::Overlap { element: e });
                }
                block_of[e] = i;
            }
        }
        if let Some(element) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::Coverage { element });
        }
        Ok(Self { size: axis_size, blocks, block_of })
    }

    /// The one-block partition `{U}`.
    pub fn trivial(axis_size: usize) -> Self {
        let mut all = FixedBitSet::with_capacity(axis_size);
        all.insert_range(..);
        Self { size: axis_size, blocks: vec![all], block_of: vec![0; axis_size] }
    }

    pub fn axis_size(&self) -> usize {
        self.size
    }

    /// Number of blocks, `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn blocks(&self) -> &[FixedBitSet] {
        &self.blocks
    }

    pub fn block(&self, index: usize) -> &FixedBitSet {
        &self.blocks[index]
    }

    /// Index of the block containing `element`.
    pub fn block_of(&self, element: usize) -> usize {
        self.block_of[element]
    }

    pub fn block_elements(&self, index: usize) -> Vec<usize> {
        self.blocks[index].ones().collect()
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|b| self.block_elements(b)).collect()
    }

    /// The finest common coarsening: connected components of the graph on
    /// elements linking members of a common block of either partition.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.size != other.size {
            return Err(Error::AxisMismatch(self.size, other.size));
        }
        let mut dsu = DisjointSets::new(self.size);
        for (i, &b) in self.block_of.iter().enumerate() {
            dsu.union(i, self.blocks[b].ones().next().unwrap());
        }
        for (i, &b) in other.block_of.iter().enumerate() {
            dsu.union(i, other.blocks[b].ones().next().unwrap());
        }
        let mut by_root: Vec<Option<usize>> = vec![None; self.size];
        let mut blocks: Vec<FixedBitSet> = Vec::new();
        for e in 0..self.size {
            let r = dsu.find(e);
            let slot = *by_root[r].get_or_insert_with(|| {
                blocks.push(FixedBitSet::with_capacity(self.size));
                blocks.len() - 1
            });
            blocks[slot].insert(e);
        }
        Partition::from_bitsets(self.size, blocks)
    }

    /// Two partitions are independent when their join is `{U}`.
    pub fn is_independent_of(&self, other: &Partition) -> Result<bool> {
        Ok(self.join(other)?.is_trivial())
    }
}

pub fn make_partition(axis_size: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
    Partition::new(axis_size, blocks)
}

pub fn join(p1: &Partition, p2: &Partition) -> Result<Partition> {
    p1.join(p2)
}

pub fn independent(p1: &Partition, p2: &Partition) -> Result<bool> {
    p1.is_independent_of(p2)
}

/// Returns whether the union of the blocks `sub1` of `p1` equals the union of
/// the blocks `sub2` of `p2`. For independent partitions and proper
/// subfamilies this is always `false`.
pub fn check_c_forte(p1: &Partition, p2: &Partition, sub1: &[usize], sub2: &[usize]) -> Result<bool> {
    if !independent(p1, p2)? {
        return Err(Error::NotIndependent);
    }
    let u1 = subfamily_union(p1, sub1)?;
    let u2 = subfamily_union(p2, sub2)?;
    Ok(u1 == u2)
}

fn subfamily_union(p: &Partition, sub: &[usize]) -> Result<FixedBitSet> {
    let mut chosen = FixedBitSet::with_capacity(p.len());
    for &b in sub {
        if b >= p.len() {
            return Err(Error::IndexOutOfRange(format!("block {b}")));
        }
        chosen.insert(b);
    }
    let n = chosen.count_ones(..);
    if n == 0 || n == p.len() {
        return Err(Error::NotProperSubfamily);
    }
    let mut union = FixedBitSet::with_capacity(p.axis_size());
    for b in chosen.ones() {
        union.union_with(p.block(b));
    }
    Ok(union)
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Reference to a block: a part of a partition on some axis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockRef {
    pub axis: usize,
    pub partition: usize,
    pub block: usize,
}

/// One axis of a system: the ground set `0..size` and its partition family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    size: usize,
    partitions: Vec<Partition>,
}

impl Axis {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn partition(&self, index: usize) -> &Partition {
        &self.partitions[index]
    }

    pub fn trivial_index(&self) -> Option<usize> {
        self.partitions.iter().position(Partition::is_trivial)
    }

    /// Indices of the nontrivial partitions, ascending.
    pub fn nontrivial(&self) -> impl Iterator<Item = usize> + '_ {
        self.partitions.iter().enumerate().filter(|(_, p)| !p.is_trivial()).map(|(i, _)| i)
    }
}

/// A system of d-boxes: per-axis ground sets with finite families of
/// pairwise independent partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct PartitionSystem {
    axes: Vec<Axis>,
}

impl PartitionSystem {
    /// Validates sizes, duplicates and pairwise independence on each axis.
    pub fn new(axes: Vec<(usize, Vec<Partition>)>) -> Result<Self> {
        let mut out = Vec::with_capacity(axes.len());
        for (a, (size, partitions)) in axes.into_iter().enumerate() {
            if size < 2 {
                return Err(Error::GroundSetTooSmall(size));
            }
            for p in &partitions {
                if p.axis_size() != size {
                    return Err(Error::AxisMismatch(size, p.axis_size()));
                }
            }
            for j in 0..partitions.len() {
                for i in 0..j {
                    if partitions[i] == partitions[j] {
                        return Err(Error::Duplicate { axis: a, index: j });
                    }
                    if !partitions[i].is_independent_of(&partitions[j])? {
                        return Err(Error::Independence { axis: a, first: i, second: j });
                    }
                }
            }
            out.push(Axis { size, partitions });
        }
        Ok(Self { axes: out })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn axis_sizes(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::size).collect()
    }

    pub fn partition(&self, axis: usize, index: usize) -> &Partition {
        &self.axes[axis].partitions[index]
    }

    pub fn block(&self, r: BlockRef) -> &FixedBitSet {
        self.partition(r.axis, r.partition).block(r.block)
    }

    /// `|X|`, the number of points of the product space.
    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(Axis::size).product()
    }

    pub fn is_unital(&self) -> bool {
        self.axes.iter().all(|a| a.trivial_index().is_some())
    }

    /// Same system with `{U}` appended on every axis that lacks it.
    pub fn with_unital(&self) -> Self {
        let mut s = self.clone();
        for axis in &mut s.axes {
            if axis.trivial_index().is_none() {
                axis.partitions.push(Partition::trivial(axis.size));
            }
        }
        s
    }

    pub fn check_block(&self, r: BlockRef) -> Result<()> {
        let axis = self
            .axes
            .get(r.axis)
            .ok_or_else(|| Error::IndexOutOfRange(format!("axis {}", r.axis)))?;
        let p = axis
            .partitions
            .get(r.partition)
            .ok_or_else(|| Error::IndexOutOfRange(format!("partition {} on axis {}", r.partition, r.axis)))?;
        if r.block >= p.len() {
            return Err(Error::IndexOutOfRange(format!(
                "block {} of partition {} on axis {}",
                r.block, r.partition, r.axis
            )));
        }
        Ok(())
    }
}

/// Discretized unit-segment tilings of the circle `[0, n)` at resolution
/// `q`, on each of `d` axes.
///
/// Axis cells have width `1/q`, so an axis has `n*q` cells. Partition `j`
/// (for `j < q`) consists of the `n` cyclic arcs of `q` cells starting at
/// `j, j+q, ...`; the trivial partition is appended at index `q`.
pub fn arc_system(n: usize, q: usize, d: usize) -> Result<PartitionSystem> {
    arc_system_mixed(&vec![n; d], &vec![q; d])
}

/// [`arc_system`] with per-axis circle lengths and resolutions.
pub fn arc_system_mixed(m: &[usize], q: &[usize]) -> Result<PartitionSystem> {
    if m.len() != q.len() {
        return Err(Error::InvalidTorus("m and q have different lengths".into()));
    }
    let mut axes = Vec::with_capacity(m.len());
    for (&n, &q) in m.iter().zip(q) {
        if n < 2 || q == 0 {
            return Err(Error::InvalidTorus(format!("need m >= 2 and q >= 1, got m={n} q={q}")));
        }
        let len = n * q;
        let mut partitions = Vec::with_capacity(q + 1);
        for j in 0..q {
            let blocks: Vec<FixedBitSet> = (0..n)
                .map(|k| {
                    let mut b = FixedBitSet::with_capacity(len);
                    b.extend((0..q).map(|r| (j + k * q + r) % len));
                    b
                })
                .collect();
            partitions.push(Partition::from_bitsets(len, blocks)?);
        }
        partitions.push(Partition::trivial(len));
        axes.push((len, partitions));
    }
    PartitionSystem::new(axes)
}

/// Two-block partitions `{A, U \ A}` for explicitly chosen sets `A`, plus the
/// trivial partition on each axis.
pub fn binary_system(axis_sizes: &[usize], chosen_splits: &[Vec<Vec<usize>>]) -> Result<PartitionSystem> {
    if axis_sizes.len() != chosen_splits.len() {
        return Err(Error::Precondition("one list of splits per axis required".into()));
    }
    let mut axes = Vec::with_capacity(axis_sizes.len());
    for (axis, (&size, splits)) in axis_sizes.iter().zip(chosen_splits).enumerate() {
        if size < 2 {
            return Err(Error::GroundSetTooSmall(size));
        }
        let mut partitions: Vec<Partition> = Vec::with_capacity(splits.len() + 1);
        for split in splits {
            let mut a = FixedBitSet::with_capacity(size);
            for &e in split {
                if e >= size {
                    return Err(Error::ElementOutOfRange { element: e, size });
                }
                a.insert(e);
            }
            let count = a.count_ones(..);
            if count == 0 || count == size {
                return Err(Error::ImproperSplit { axis });
            }
            let mut rest = a.clone();
            rest.toggle_range(..);
            let p = Partition::from_bitsets(size, vec![a, rest])?;
            if partitions.contains(&p) {
                return Err(Error::Duplicate { axis, index: partitions.len() });
            }
            for (i, other) in partitions.iter().enumerate() {
                if !p.is_independent_of(other)? {
                    return Err(Error::Independence { axis, first: i, second: partitions.len() });
                }
            }
            partitions.push(p);
        }
        partitions.push(Partition::trivial(size));
        axes.push((size, partitions));
    }
    PartitionSystem::new(axes)
}

#[derive(Clone, Serialize, Deserialize)]
struct AxisRepr {
    size: usize,
    partitions: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct SystemRepr {
    axes: Vec<AxisRepr>,
    #[serde(default)]
    unital: bool,
}

impl TryFrom<SystemRepr> for PartitionSystem {
    type Error = Error;

    fn try_from(repr: SystemRepr) -> Result<Self> {
        let mut axes = Vec::with_capacity(repr.axes.len());
        for a in repr.axes {
            let mut partitions = a
                .partitions
                .iter()
                .map(|blocks| Partition::new(a.size, blocks))
                .collect::<Result<Vec<_>>>()?;
            if repr.unital && !partitions.iter().any(Partition::is_trivial) {
                partitions.push(Partition::trivial(a.size));
            }
            axes.push((a.size, partitions));
        }
        PartitionSystem::new(axes)
    }
}

impl From<PartitionSystem> for SystemRepr {
    fn from(s: PartitionSystem) -> Self {
        let unital = s.is_unital();
        SystemRepr {
            axes: s
                .axes
                .iter()
                .map(|a| AxisRepr { size: a.size, partitions: a.partitions.iter().map(Partition::to_lists).collect() })
                .collect(),
            unital,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(size: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(size, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn make_partition_examples() {
        let two = p(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(two.len(), 2);
        assert!(p(3, &[&[0, 1, 2]]).is_trivial());
        assert_eq!(make_partition(4, &[vec![0, 1], vec![1, 2, 3]]), Err(Error::Overlap { element: 1 }));
        assert_eq!(make_partition(4, &[vec![0, 1], vec![2]]), Err(Error::Coverage { element: 3 }));
        assert_eq!(make_partition(4, &[vec![0, 1, 2, 3], vec![]]), Err(Error::EmptyBlock));
        assert_eq!(make_partition(1, &[vec![0]]), Err(Error::GroundSetTooSmall(1)));
    }

    #[test]
    fn blocks_are_canonically_ordered() {
        let a = p(4, &[&[3, 0], &[1, 2]]);
        let b = p(4, &[&[2, 1], &[0, 3]]);
        assert_eq!(a, b);
        assert_eq!(a.block_elements(0), vec![0, 3]);
        assert_eq!(a.block_of(2), 1);
    }

    #[test]
    fn join_examples() {
        let a = p(4, &[&[0, 1], &[2, 3]]);
        let b = p(4, &[&[0, 2], &[1, 3]]);
        assert!(a.join(&b).unwrap().is_trivial());
        assert_eq!(a.join(&a).unwrap(), a);
        let c = p(4, &[&[0], &[1], &[2, 3]]);
        let d = p(4, &[&[0, 1], &[2], &[3]]);
        assert_eq!(c.join(&d).unwrap(), p(4, &[&[0, 1], &[2, 3]]));
        assert_eq!(a.join(&Partition::trivial(5)), Err(Error::AxisMismatch(4, 5)));
    }

    #[test]
    fn independence_examples() {
        let a = p(4, &[&[0, 1], &[2, 3]]);
        let b = p(4, &[&[0, 2], &[1, 3]]);
        assert!(independent(&a, &b).unwrap());
        assert!(!independent(&a, &a).unwrap());
        let halves = p(6, &[&[0, 1, 2], &[3, 4, 5]]);
        let pairs = p(6, &[&[0, 1], &[2, 3], &[4, 5]]);
        assert!(independent(&halves, &pairs).unwrap());
    }

    #[test]
    fn c_forte_examples() {
        let a = p(4, &[&[0, 1], &[2, 3]]);
        let b = p(4, &[&[0, 2], &[1, 3]]);
        assert!(!check_c_forte(&a, &b, &[0], &[0]).unwrap());
        assert_eq!(check_c_forte(&a, &b, &[0, 1], &[0]), Err(Error::NotProperSubfamily));
        assert_eq!(check_c_forte(&a, &b, &[], &[0]), Err(Error::NotProperSubfamily));
        assert_eq!(check_c_forte(&a, &a, &[0], &[0]), Err(Error::NotIndependent));
    }

    #[test]
    fn arc_system_examples() {
        let s = arc_system(2, 1, 1).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.axis(0).size(), 2);
        assert_eq!(s.axis(0).partitions().len(), 2);
        assert_eq!(s.partition(0, 0), &p(2, &[&[0], &[1]]));
        assert!(s.partition(0, 1).is_trivial());

        let s = arc_system(2, 2, 1).unwrap();
        assert_eq!(s.axis(0).size(), 4);
        assert_eq!(s.partition(0, 0), &p(4, &[&[0, 1], &[2, 3]]));
        assert_eq!(s.partition(0, 1), &p(4, &[&[1, 2], &[3, 0]]));
        assert!(independent(s.partition(0, 0), s.partition(0, 1)).unwrap());

        let s = arc_system(3, 2, 2).unwrap();
        assert_eq!(s.axis_sizes(), vec![6, 6]);
        for a in 0..2 {
            for j in 0..2 {
                let pj = s.partition(a, j);
                assert_eq!(pj.len(), 3);
                assert!(pj.blocks().iter().all(|b| b.count_ones(..) == 2));
            }
            assert!(independent(s.partition(a, 0), s.partition(a, 1)).unwrap());
        }
    }

    #[test]
    fn binary_system_examples() {
        let s = binary_system(&[2, 2], &[vec![vec![0]], vec![vec![0]]]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.axis(0).partitions().len(), 2);
        // Distinct two-block splits always join to {U}; the only dependent
        // pair is a split together with its own complement.
        assert_eq!(
            binary_system(&[3], &[vec![vec![0], vec![1, 2]]]),
            Err(Error::Duplicate { axis: 0, index: 1 })
        );
        assert!(binary_system(&[3], &[vec![vec![0], vec![0, 1]]]).is_ok());
        let s = binary_system(&[4], &[vec![vec![0, 1], vec![0, 2]]]).unwrap();
        assert!(independent(s.partition(0, 0), s.partition(0, 1)).unwrap());
        assert_eq!(binary_system(&[3], &[vec![vec![0, 1, 2]]]), Err(Error::ImproperSplit { axis: 0 }));
    }

    #[test]
    fn system_rejects_dependent_partitions() {
        let a = p(4, &[&[0, 1], &[2, 3]]);
        let c = p(4, &[&[0], &[1], &[2, 3]]);
        assert_eq!(
            PartitionSystem::new(vec![(4, vec![a.clone(), c])]),
            Err(Error::Independence { axis: 0, first: 0, second: 1 })
        );
        assert_eq!(PartitionSystem::new(vec![(4, vec![a.clone(), a])]), Err(Error::Duplicate { axis: 0, index: 1 }));
    }

    #[test]
    fn json_round_trip_and_unordered_read() {
        let s = arc_system(2, 2, 2).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"unital\":true"));
        let back: PartitionSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        let unordered = r#"{"axes":[{"size":4,"partitions":[[[3,2],[1,0]]]}],"unital":true}"#;
        let s: PartitionSystem = serde_json::from_str(unordered).unwrap();
        assert_eq!(s.axis(0).partitions().len(), 2);
        assert_eq!(s.partition(0, 0).block_elements(0), vec![0, 1]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"axes":[{"size":4,"partitions":[[[0,1],[2,3]],[[0,1,2,3]]]}],"unital":true}"#);
    }
}
