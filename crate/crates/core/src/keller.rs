//! Boxes, Keller families and the pile machinery.
//!
//! A [`DBox`] picks, on every axis, either the whole axis ([`Factor::Full`])
//! or one block of one partition of the ambient [`PartitionSystem`]. A
//! [`BoxFamily`] is a duplicate-free, sorted set of boxes over one system.
//!
//! The point sets used here are materialized over the full product grid, so
//! everything in this module is meant for desk-scale systems.

use std::path::Path;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionSystem;

/// One coordinate of a box.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// The improper factor: the whole axis.
    Full,
    /// Block `block` of partition `partition` on the box's axis.
    Part { partition: usize, block: usize },
}

impl Factor {
    pub fn part(partition: usize, block: usize) -> Self {
        Factor::Part { partition, block }
    }

    pub fn partition(self) -> Option<usize> {
        match self {
            Factor::Full => None,
            Factor::Part { partition, .. } => Some(partition),
        }
    }
}

impl Serialize for Factor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            p: usize,
            b: usize,
        }
        match *self {
            Factor::Full => s.serialize_str("full"),
            Factor::Part { partition, block } => Repr { p: partition, b: block }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Factor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Word(String),
            Part { p: usize, b: usize },
        }
        match Repr::deserialize(d)? {
            Repr::Word(w) if w == "full" => Ok(Factor::Full),
            Repr::Word(w) => Err(de::Error::custom(format!("unknown factor {w:?}, expected \"full\""))),
            Repr::Part { p, b } => Ok(Factor::Part { partition: p, block: b }),
        }
    }
}

/// A box `K = K_1 x ... x K_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DBox {
    factors: Vec<Factor>,
}

impl DBox {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn full(dim: usize) -> Self {
        Self { factors: vec![Factor::Full; dim] }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, axis: usize) -> Factor {
        self.factors[axis]
    }

    pub fn with_factor(&self, axis: usize, factor: Factor) -> DBox {
        let mut b = self.clone();
        b.factors[axis] = factor;
        b
    }

    /// A box is proper when no factor is the whole axis.
    pub fn is_proper(&self) -> bool {
        self.factors.iter().all(|f| *f != Factor::Full)
    }
}

/// Elements of one factor on an axis.
pub(crate) fn factor_elements(system: &PartitionSystem, axis: usize, f: Factor) -> Vec<usize> {
    match f {
        Factor::Full => (0..system.axis(axis).size()).collect(),
        Factor::Part { partition, block } => system.partition(axis, partition).block(block).ones().collect(),
    }
}

fn factor_len(system: &PartitionSystem, axis: usize, f: Factor) -> usize {
    match f {
        Factor::Full => system.axis(axis).size(),
        Factor::Part { partition, block } => system.partition(axis, partition).block(block).count_ones(..),
    }
}

/// Number of points of `X` covered by `k`.
pub fn box_volume(system: &PartitionSystem, k: &DBox) -> usize {
    k.factors.iter().enumerate().map(|(a, &f)| factor_len(system, a, f)).product()
}

/// Keller's condition for a pair: on some axis the two factors are distinct
/// blocks of one partition.
pub fn keller_pair(k: &DBox, l: &DBox) -> bool {
    k.factors.iter().zip(&l.factors).any(|(a, b)| match (*a, *b) {
        (Factor::Part { partition: p, block: x }, Factor::Part { partition: q, block: y }) => p == q && x != y,
        _ => false,
    })
}

/// A subset of `X = X_1 x ... x X_d`, indexed in lexicographic (row-major)
/// order with axis 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    shape: Vec<usize>,
    bits: FixedBitSet,
}

impl PointSet {
    pub fn empty(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self { shape: shape.to_vec(), bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(shape: &[usize]) -> Self {
        let mut s = Self::empty(shape);
        s.bits.insert_range(..);
        s
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    /// Number of points in the set.
    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.bits.len()
    }

    pub fn index_of(&self, point: &[usize]) -> usize {
        point.iter().zip(&self.shape).fold(0, |acc, (&x, &s)| acc * s + x)
    }

    pub fn point_of(&self, mut index: usize) -> Vec<usize> {
        let mut p = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            p[a] = index % self.shape[a];
            index /= self.shape[a];
        }
        p
    }

    pub fn contains(&self, point: &[usize]) -> bool {
        self.bits.contains(self.index_of(point))
    }

    pub fn insert(&mut self, point: &[usize]) {
        let i = self.index_of(point);
        self.bits.insert(i);
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Inserts the product set `lists[0] x ... x lists[d-1]`.
    pub fn insert_product(&mut self, lists: &[Vec<usize>]) {
        if lists.iter().any(Vec::is_empty) {
            return;
        }
        let d = lists.len();
        let strides: Vec<usize> = (0..d).map(|a| self.stride(a)).collect();
        let mut pos = vec![0usize; d];
        loop {
            let idx: usize = (0..d).map(|a| lists[a][pos[a]] * strides[a]).sum();
            self.bits.insert(idx);
            let mut a = d;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                pos[a] += 1;
                if pos[a] < lists[a].len() {
                    break;
                }
                pos[a] = 0;
            }
        }
    }
}

/// A duplicate-free family of boxes over one system, stored sorted.
#[derive(Clone, Debug)]
pub struct BoxFamily {
    system: Arc<PartitionSystem>,
    boxes: Vec<DBox>,
}

impl PartialEq for BoxFamily {
    fn eq(&self, other: &Self) -> bool {
        self.same_system(other) && self.boxes == other.boxes
    }
}

impl Eq for BoxFamily {}

impl BoxFamily {
    /// Validates factor indices, rewrites factors on a trivial partition to
    /// [`Factor::Full`], sorts, and rejects duplicates. Empty families are
    /// allowed; suit-consuming operations reject them.
    pub fn new(system: Arc<PartitionSystem>, boxes: Vec<DBox>) -> Result<Self> {
        let d = system.dim();
        let mut out = Vec::with_capacity(boxes.len());
        for mut k in boxes {
            if k.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: k.dim() });
            }
            for (axis, f) in k.factors.iter_mut().enumerate() {
                if let Factor::Part { partition, block } = *f {
                    system.check_block(crate::partition::BlockRef { axis, partition, block })?;
                    if system.partition(axis, partition).is_trivial() {
                        *f = Factor::Full;
                    }
                }
            }
            out.push(k);
        }
        out.sort();
        if out.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateBox);
        }
        Ok(Self { system, boxes: out })
    }

    /// Boxes already known to be valid, sorted and distinct.
    pub(crate) fn from_sorted(system: Arc<PartitionSystem>, boxes: Vec<DBox>) -> Self {
        debug_assert!(boxes.windows(2).all(|w| w[0] < w[1]));
        Self { system, boxes }
    }

    pub fn system(&self) -> &Arc<PartitionSystem> {
        &self.system
    }

    pub fn boxes(&self) -> &[DBox] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, k: &DBox) -> bool {
        self.boxes.binary_search(k).is_ok()
    }

    pub fn same_system(&self, other: &BoxFamily) -> bool {
        Arc::ptr_eq(&self.system, &other.system) || self.system == other.system
    }

    /// Subfamily of the boxes satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&DBox) -> bool) -> BoxFamily {
        Self::from_sorted(self.system.clone(), self.boxes.iter().filter(|k| keep(k)).cloned().collect())
    }

    /// Set union of two families on the same system.
    pub fn union(&self, other: &BoxFamily) -> Result<BoxFamily> {
        if !self.same_system(other) {
            return Err(Error::SystemMismatch);
        }
        let mut boxes: Vec<DBox> = self.boxes.iter().chain(&other.boxes).cloned().collect();
        boxes.sort();
        boxes.dedup();
        Ok(Self::from_sorted(self.system.clone(), boxes))
    }

    /// Boxes of `self` not in `other`.
    pub fn difference(&self, other: &BoxFamily) -> BoxFamily {
        self.filter(|k| !other.contains(k))
    }

    pub fn volume(&self) -> usize {
        self.boxes.iter().map(|k| box_volume(&self.system, k)).sum()
    }

    /// Partitions of `axis` that occur as a factor of some box.
    pub fn present_partitions(&self, axis: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.boxes.iter().filter_map(|k| k.factor(axis).partition()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub fn is_keller_family(g: &BoxFamily) -> Result<bool> {
    if g.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(is_keller_unchecked(g.boxes()))
}

pub(crate) fn is_keller_unchecked(boxes: &[DBox]) -> bool {
    boxes.iter().enumerate().all(|(j, l)| boxes[..j].iter().all(|k| keller_pair(k, l)))
}

fn require_keller(g: &BoxFamily) -> Result<()> {
    if is_keller_family(g)? {
        Ok(())
    } else {
        Err(Error::NotKeller)
    }
}

/// The polybox: union of the boxes' point sets.
pub fn realize(g: &BoxFamily) -> PointSet {
    let system = g.system();
    let mut set = PointSet::empty(&system.axis_sizes());
    for k in g.boxes() {
        let lists: Vec<Vec<usize>> =
            k.factors().iter().enumerate().map(|(a, &f)| factor_elements(system, a, f)).collect();
        set.insert_product(&lists);
    }
    set
}

/// Member of the set `V` used by [`restrict`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Every block of the partition.
    Partition(usize),
    Block { partition: usize, block: usize },
}

/// `G|V = {K in G : K_axis in V}`. The result may be empty.
pub fn restrict(g: &BoxFamily, axis: usize, v: &[Selector]) -> Result<BoxFamily> {
    if v.is_empty() {
        return Err(Error::Precondition("restriction set must be nonempty".into()));
    }
    check_axis(g.system(), axis)?;
    Ok(g.filter(|k| match k.factor(axis) {
        Factor::Full => false,
        Factor::Part { partition, block } => v.iter().any(|s| match *s {
            Selector::Partition(p) => p == partition,
            Selector::Block { partition: p, block: b } => p == partition && b == block,
        }),
    }))
}

/// `G|π`.
pub fn restrict_partition(g: &BoxFamily, axis: usize, p: usize) -> BoxFamily {
    g.filter(|k| k.factor(axis).partition() == Some(p))
}

/// `G|A` for block `block` of partition `p`.
pub fn restrict_block(g: &BoxFamily, axis: usize, p: usize, block: usize) -> BoxFamily {
    g.filter(|k| k.factor(axis) == Factor::Part { partition: p, block })
}

fn check_axis(system: &PartitionSystem, axis: usize) -> Result<()> {
    if axis >= system.dim() {
        return Err(Error::IndexOutOfRange(format!("axis {axis}")));
    }
    Ok(())
}

fn check_partition(system: &PartitionSystem, axis: usize, p: usize) -> Result<()> {
    check_axis(system, axis)?;
    if p >= system.axis(axis).partitions().len() {
        return Err(Error::IndexOutOfRange(format!("partition {p} on axis {axis}")));
    }
    Ok(())
}

/// Point-scan test: every point's full line along `axis` lies in the set.
pub fn is_cylinder(set: &PointSet, axis: usize) -> bool {
    let size = set.shape[axis];
    let stride = set.stride(axis);
    set.ones().all(|i| {
        let base = i - ((i / stride) % size) * stride;
        (0..size).all(|t| set.bits.contains(base + t * stride))
    })
}

/// Status of a nontrivial partition with respect to a family.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionStatus {
    Absent,
    Hidden,
    Exposed,
}

impl PartitionStatus {
    pub fn is_present(self) -> bool {
        self != PartitionStatus::Absent
    }
}

fn nontrivial(system: &PartitionSystem, axis: usize, p: usize) -> Result<()> {
    check_partition(system, axis, p)?;
    if system.partition(axis, p).is_trivial() {
        return Err(Error::TrivialPartition { axis, partition: p });
    }
    Ok(())
}

/// Classifies `p` on `axis` by comparing block shadows.
///
/// `realize(G|p)` is the union over blocks `A` of `A x S_A`, where `S_A` is
/// the union of the projections (dropping `axis`) of the boxes of `G|A`. It
/// is a cylinder exactly when every `S_A` is the same set.
pub fn classify_partition(g: &BoxFamily, axis: usize, p: usize) -> Result<PartitionStatus> {
    nontrivial(g.system(), axis, p)?;
    Ok(classify_fast(g, axis, p))
}

pub(crate) fn classify_fast(g: &BoxFamily, axis: usize, p: usize) -> PartitionStatus {
    let system = g.system();
    let blocks = system.partition(axis, p).len();
    let shadow_shape: Vec<usize> =
        system.axis_sizes().iter().enumerate().filter(|&(a, _)| a != axis).map(|(_, &s)| s).collect();
    let mut shadows: Vec<Option<PointSet>> = vec![None; blocks];
    for k in g.boxes() {
        if let Factor::Part { partition, block } = k.factor(axis) {
            if partition == p {
                let lists: Vec<Vec<usize>> = k
                    .factors()
                    .iter()
                    .enumerate()
                    .filter(|&(a, _)| a != axis)
                    .map(|(a, &f)| factor_elements(system, a, f))
                    .collect();
                shadows[block].get_or_insert_with(|| PointSet::empty(&shadow_shape)).insert_product(&lists);
            }
        }
    }
    if shadows.iter().all(Option::is_none) {
        return PartitionStatus::Absent;
    }
    let first = &shadows[0];
    if first.is_some() && shadows.iter().all(|s| s == first) {
        PartitionStatus::Hidden
    } else {
        PartitionStatus::Exposed
    }
}

/// Oracle for [`classify_partition`] that scans every line of `realize(G|p)`.
pub fn classify_partition_by_scan(g: &BoxFamily, axis: usize, p: usize) -> Result<PartitionStatus> {
    nontrivial(g.system(), axis, p)?;
    let sub = restrict_partition(g, axis, p);
    Ok(if sub.is_empty() {
        PartitionStatus::Absent
    } else if is_cylinder(&realize(&sub), axis) {
        PartitionStatus::Hidden
    } else {
        PartitionStatus::Exposed
    })
}

/// Hidden partitions per axis and the c-statistic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CStats {
    pub hidden: Vec<Vec<usize>>,
    pub c_per_axis: Vec<usize>,
    pub c_total: usize,
}

pub fn c_stats(g: &BoxFamily) -> Result<CStats> {
    require_keller(g)?;
    Ok(c_stats_unchecked(g))
}

pub(crate) fn c_stats_unchecked(g: &BoxFamily) -> CStats {
    let system = g.system();
    let mut hidden = Vec::with_capacity(system.dim());
    let mut c_per_axis = Vec::with_capacity(system.dim());
    for axis in 0..system.dim() {
        // Absent partitions cannot be hidden, so only present ones are tried.
        let h: Vec<usize> = g
            .present_partitions(axis)
            .into_iter()
            .filter(|&p| classify_fast(g, axis, p) == PartitionStatus::Hidden)
            .collect();
        c_per_axis.push(h.iter().map(|&p| system.partition(axis, p).len() - 1).sum());
        hidden.push(h);
    }
    let c_total = c_per_axis.iter().sum();
    CStats { hidden, c_per_axis, c_total }
}

fn require_pile(c: &BoxFamily, axis: usize, p: usize) -> Result<()> {
    let laminated = !c.is_empty() && c.boxes().iter().all(|k| k.factor(axis).partition() == Some(p));
    if !laminated || classify_fast(c, axis, p) != PartitionStatus::Hidden {
        return Err(Error::NotPile { axis, partition: p });
    }
    Ok(())
}

/// `C^A`: the boxes of the pile over block `a`, with the `axis` factor
/// replaced by the whole axis.
pub fn elementary_aggregate(c: &BoxFamily, axis: usize, p: usize, a: usize) -> Result<BoxFamily> {
    nontrivial(c.system(), axis, p)?;
    if a >= c.system().partition(axis, p).len() {
        return Err(Error::IndexOutOfRange(format!("block {a} of partition {p} on axis {axis}")));
    }
    require_pile(c, axis, p)?;
    Ok(aggregate_unchecked(c, axis, p, a))
}

fn aggregate_unchecked(c: &BoxFamily, axis: usize, p: usize, a: usize) -> BoxFamily {
    let target = Factor::Part { partition: p, block: a };
    let mut boxes: Vec<DBox> =
        c.boxes().iter().filter(|k| k.factor(axis) == target).map(|k| k.with_factor(axis, Factor::Full)).collect();
    boxes.sort();
    BoxFamily::from_sorted(c.system().clone(), boxes)
}

/// `G' = (G \ C) ∪ C^A` where `C = G|p` and `p` is hidden in `G`.
pub fn pile_rewrite(g: &BoxFamily, axis: usize, p: usize, a: usize) -> Result<BoxFamily> {
    nontrivial(g.system(), axis, p)?;
    if a >= g.system().partition(axis, p).len() {
        return Err(Error::IndexOutOfRange(format!("block {a} of partition {p} on axis {axis}")));
    }
    require_keller(g)?;
    if classify_fast(g, axis, p) != PartitionStatus::Hidden {
        return Err(Error::NotHidden { axis, partition: p });
    }
    let pile = restrict_partition(g, axis, p);
    let rest = g.difference(&pile);
    let rewritten = rest.union(&aggregate_unchecked(&pile, axis, p, a))?;
    debug_assert_eq!(rewritten.len(), rest.len() + restrict_block(g, axis, p, a).len());
    Ok(rewritten)
}

/// Outcome of checking `c(G) <= |G| - 1` on one family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremBReport {
    pub c: usize,
    pub size: usize,
    pub inequality_holds: bool,
    pub equality: bool,
}

pub fn theorem_b_report(g: &BoxFamily) -> Result<TheoremBReport> {
    let stats = c_stats(g)?;
    Ok(theorem_b_from_stats(&stats, g.len()))
}

pub(crate) fn theorem_b_from_stats(stats: &CStats, size: usize) -> TheoremBReport {
    let report = TheoremBReport {
        c: stats.c_total,
        size,
        inequality_holds: stats.c_total < size,
        equality: stats.c_total + 1 == size,
    };
    if !report.inequality_holds {
        log::error!("c(G) = {} exceeds |G| - 1 = {}", report.c, size.saturating_sub(1));
    }
    report
}

/// Is the family a partition of the whole space `X`?
pub fn is_partition_of_x(g: &BoxFamily) -> bool {
    g.volume() == g.system().cell_count() && realize(g).is_full()
}

/// Index of the member of `Π_axis` induced by the boxes meeting the line
/// through `point` along `axis`.
pub fn line_partition_check(g: &BoxFamily, point: &[usize], axis: usize) -> Result<usize> {
    let system = g.system();
    check_axis(system, axis)?;
    if point.len() != system.dim() || point.iter().zip(system.axis_sizes()).any(|(&x, s)| x >= s) {
        return Err(Error::IndexOutOfRange(format!("point {point:?}")));
    }
    if !is_partition_of_x(g) {
        return Err(Error::NotPartitionOfX);
    }
    let size = system.axis(axis).size();
    let mut parts: Vec<FixedBitSet> = Vec::new();
    for k in g.boxes() {
        let meets = k.factors().iter().enumerate().all(|(a, &f)| {
            a == axis
                || match f {
                    Factor::Full => true,
                    Factor::Part { partition, block } => system.partition(a, partition).block(block).contains(point[a]),
                }
        });
        if meets {
            let mut set = FixedBitSet::with_capacity(size);
            set.extend(factor_elements(system, axis, k.factor(axis)));
            parts.push(set);
        }
    }
    parts.sort_by_key(|b| b.ones().next());
    system
        .axis(axis)
        .partitions()
        .iter()
        .position(|member| member.blocks() == parts.as_slice())
        .ok_or(Error::Completeness { axis })
}

/// On-disk form of a box family: the system inline or as a path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxFamilyDoc {
    pub system: SystemSource,
    pub boxes: Vec<DBox>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSource {
    Inline(PartitionSystem),
    Path(String),
}

impl BoxFamilyDoc {
    pub fn from_family(g: &BoxFamily) -> Self {
        Self { system: SystemSource::Inline((**g.system()).clone()), boxes: g.boxes().to_vec() }
    }

    /// Resolves the system (relative paths against `base_dir`) and builds
    /// the family.
    pub fn into_family(self, base_dir: &Path) -> Result<BoxFamily> {
        let system = match self.system {
            SystemSource::Inline(s) => s,
            SystemSource::Path(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            }
        };
        BoxFamily::new(Arc::new(system), self.boxes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::arc_system;

    fn part(p: usize, b: usize) -> Factor {
        Factor::part(p, b)
    }

    fn family(system: &Arc<PartitionSystem>, boxes: &[&[Factor]]) -> BoxFamily {
        BoxFamily::new(system.clone(), boxes.iter().map(|b| DBox::new(b.to_vec())).collect()).unwrap()
    }

    /// The four unit cubes of T^2_(2,2) at q = 1.
    fn grid_q1() -> BoxFamily {
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        family(
            &s,
            &[&[part(0, 0), part(0, 0)], &[part(0, 0), part(0, 1)], &[part(0, 1), part(0, 0)], &[part(0, 1), part(0, 1)]],
        )
    }

    /// Starts (0,0),(0,1),(1,1/2),(1,3/2) at q = 2: on axis 1 the left column
    /// uses arcs from partition 0 and the right column from partition 1
    /// (whose block 0 is the wrapping arc {3,0}).
    fn laminated_q2() -> BoxFamily {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        family(
            &s,
            &[&[part(0, 0), part(0, 0)], &[part(0, 0), part(0, 1)], &[part(0, 1), part(1, 1)], &[part(0, 1), part(1, 0)]],
        )
    }

    #[test]
    fn keller_pair_examples() {
        let k = DBox::new(vec![part(0, 0), part(0, 0)]);
        let l = DBox::new(vec![part(0, 1), part(0, 0)]);
        assert!(keller_pair(&k, &l));
        assert!(!keller_pair(&DBox::full(2), &k));
        let a = DBox::new(vec![part(0, 0), part(0, 1)]);
        let b = DBox::new(vec![part(1, 1), part(0, 1)]);
        assert!(!keller_pair(&a, &b));
    }

    #[test]
    fn keller_family_examples() {
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        assert!(is_keller_family(&family(&s, &[&[part(0, 0), Factor::Full]])).unwrap());
        assert!(is_keller_family(&grid_q1()).unwrap());
        let overlapping = family(&s, &[&[part(0, 0), Factor::Full], &[Factor::Full, part(0, 1)]]);
        assert!(!is_keller_family(&overlapping).unwrap());
        let empty = BoxFamily::new(s, vec![]).unwrap();
        assert_eq!(is_keller_family(&empty), Err(Error::EmptyFamily));
    }

    #[test]
    fn family_construction_normalizes_and_rejects() {
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        // Partition 1 is trivial on both axes.
        let g = family(&s, &[&[part(1, 0), part(0, 0)]]);
        assert_eq!(g.boxes()[0].factor(0), Factor::Full);
        let dup = BoxFamily::new(s.clone(), vec![DBox::full(2), DBox::full(2)]);
        assert_eq!(dup, Err(Error::DuplicateBox));
        assert!(matches!(BoxFamily::new(s.clone(), vec![DBox::full(3)]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            BoxFamily::new(s, vec![DBox::new(vec![part(0, 2), Factor::Full])]),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn realize_examples() {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        assert!(realize(&family(&s, &[&[Factor::Full, Factor::Full]])).is_full());
        assert!(realize(&laminated_q2()).is_full());
        let two = family(&s, &[&[part(0, 0), part(1, 0)], &[part(0, 1), Factor::Full]]);
        assert!(is_keller_family(&two).unwrap());
        assert_eq!(realize(&two).len(), 4 + 8);
        assert_eq!(two.volume(), 12);
    }

    #[test]
    fn restrict_examples() {
        let g = laminated_q2();
        let all: Vec<Selector> = (0..3).map(Selector::Partition).collect();
        assert_eq!(restrict(&g, 1, &all).unwrap(), g);
        assert_eq!(restrict(&g, 0, &[Selector::Partition(0)]).unwrap(), g);
        assert!(restrict(&g, 0, &[Selector::Block { partition: 1, block: 0 }]).unwrap().is_empty());
        assert_eq!(restrict_block(&g, 1, 1, 0).len(), 1);
        assert!(restrict(&g, 0, &[]).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        let x = PointSet::full(&s.axis_sizes());
        assert!(is_cylinder(&x, 0) && is_cylinder(&x, 1));
        let single = realize(&family(&s, &[&[part(0, 0), part(1, 1)]]));
        assert!(!is_cylinder(&single, 0) && !is_cylinder(&single, 1));
        let g = laminated_q2();
        assert!(is_cylinder(&realize(&restrict_partition(&g, 1, 1)), 1));
        assert!(!is_cylinder(&realize(&restrict_partition(&g, 1, 1)), 0));
        assert!(is_cylinder(&PointSet::empty(&[3, 3]), 0));
    }

    #[test]
    fn classify_examples() {
        let g = grid_q1();
        assert_eq!(classify_partition(&laminated_q2(), 0, 1).unwrap(), PartitionStatus::Absent);
        assert_eq!(classify_partition(&g, 0, 0).unwrap(), PartitionStatus::Hidden);
        let s = g.system().clone();
        let single = family(&s, &[&[part(0, 0), part(0, 1)]]);
        assert_eq!(classify_partition(&single, 0, 0).unwrap(), PartitionStatus::Exposed);
        assert_eq!(classify_partition(&g, 0, 1), Err(Error::TrivialPartition { axis: 0, partition: 1 }));
    }

    #[test]
    fn c_stats_examples() {
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        let single = family(&s, &[&[part(0, 0), part(0, 1)]]);
        assert_eq!(c_stats(&single).unwrap().c_total, 0);
        let grid = c_stats(&grid_q1()).unwrap();
        assert_eq!(grid.hidden, vec![vec![0], vec![0]]);
        assert_eq!(grid.c_total, 2);
        let lam = c_stats(&laminated_q2()).unwrap();
        assert_eq!(lam.hidden, vec![vec![0], vec![0, 1]]);
        assert_eq!(lam.c_per_axis, vec![1, 2]);
        assert_eq!(lam.c_total, 3);
        let bad = family(&s, &[&[part(0, 0), Factor::Full], &[Factor::Full, part(0, 1)]]);
        assert_eq!(c_stats(&bad), Err(Error::NotKeller));
    }

    #[test]
    fn aggregate_examples() {
        let g = grid_q1();
        let agg = elementary_aggregate(&g, 0, 0, 0).unwrap();
        assert_eq!(agg.len(), 2);
        assert!(agg.boxes().iter().all(|k| k.factor(0) == Factor::Full));
        assert_eq!(realize(&agg), realize(&g));

        let s = g.system().clone();
        let line = family(&s, &[&[part(0, 0), Factor::Full], &[part(0, 1), Factor::Full]]);
        let agg = elementary_aggregate(&line, 1, 0, 0);
        assert_eq!(agg, Err(Error::NotPile { axis: 1, partition: 0 }));
        let pile = family(&s, &[&[Factor::Full, part(0, 0)], &[Factor::Full, part(0, 1)]]);
        let agg = elementary_aggregate(&pile, 1, 0, 1).unwrap();
        assert_eq!(agg.boxes(), &[DBox::new(vec![Factor::Full, Factor::Full])]);

        let single = family(&s, &[&[part(0, 0), part(0, 1)]]);
        assert_eq!(elementary_aggregate(&single, 0, 0, 0), Err(Error::NotPile { axis: 0, partition: 0 }));
    }

    #[test]
    fn pile_rewrite_examples() {
        let lam = laminated_q2();
        let r = pile_rewrite(&lam, 0, 0, 0).unwrap();
        assert_eq!(r.len(), 2);
        assert!(is_keller_family(&r).unwrap());
        assert!(realize(&r).is_full());

        let grid = grid_q1();
        for a in 0..2 {
            let r = pile_rewrite(&grid, 0, 0, a).unwrap();
            assert_eq!(r.len(), 2);
            assert!(realize(&r).is_full());
        }
        let s = grid.system().clone();
        let full = family(&s, &[&[Factor::Full, Factor::Full]]);
        assert_eq!(pile_rewrite(&full, 0, 0, 0), Err(Error::NotHidden { axis: 0, partition: 0 }));
        // Axis 1 partition 1 hides only the right column's arcs, a cylinder.
        let r = pile_rewrite(&lam, 1, 1, 0).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(realize(&r), realize(&lam));
    }

    #[test]
    fn theorem_b_examples() {
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        let single = family(&s, &[&[part(0, 0), part(0, 1)]]);
        let r = theorem_b_report(&single).unwrap();
        assert_eq!((r.c, r.size, r.inequality_holds, r.equality), (0, 1, true, true));
        let r = theorem_b_report(&grid_q1()).unwrap();
        assert_eq!((r.c, r.size, r.inequality_holds, r.equality), (2, 4, true, false));
        let r = theorem_b_report(&laminated_q2()).unwrap();
        assert_eq!((r.c, r.size, r.inequality_holds, r.equality), (3, 4, true, true));
    }

    #[test]
    fn line_partition_examples() {
        assert_eq!(line_partition_check(&grid_q1(), &[0, 1], 0).unwrap(), 0);
        // Right column is x in {2, 3} at q = 2.
        assert_eq!(line_partition_check(&laminated_q2(), &[3, 0], 1).unwrap(), 1);
        assert_eq!(line_partition_check(&laminated_q2(), &[0, 0], 1).unwrap(), 0);
        let s = Arc::new(arc_system(2, 1, 2).unwrap());
        let half = family(&s, &[&[part(0, 0), Factor::Full]]);
        assert_eq!(line_partition_check(&half, &[0, 0], 0), Err(Error::NotPartitionOfX));
    }

    #[test]
    fn line_partition_detects_incompleteness() {
        use crate::partition::Partition;
        let a = Partition::new(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let b = Partition::new(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        // Axis 0 is not unital, so {U} is not a member.
        let s = Arc::new(PartitionSystem::new(vec![(4, vec![a, b]), (2, vec![])]).unwrap());
        let g = family(&s, &[&[part(1, 0), Factor::Full], &[part(1, 1), Factor::Full]]);
        assert_eq!(line_partition_check(&g, &[3, 1], 0).unwrap(), 1);
        let whole = family(&s, &[&[Factor::Full, Factor::Full]]);
        assert_eq!(line_partition_check(&whole, &[0, 0], 0), Err(Error::Completeness { axis: 0 }));
    }

    #[test]
    fn box_family_json() {
        let g = laminated_q2();
        let doc = BoxFamilyDoc::from_family(&g);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains(r#"[{"p":0,"b":0},{"p":0,"b":0}]"#));
        let back: BoxFamilyDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_family(Path::new(".")).unwrap(), g);
        let f: Factor = serde_json::from_str("\"full\"").unwrap();
        assert_eq!(f, Factor::Full);
        assert!(serde_json::from_str::<Factor>("\"half\"").is_err());
    }
}
