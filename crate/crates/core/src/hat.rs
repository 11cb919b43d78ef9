//! The hat embedding.
//!
//! Each axis `X_i` is replaced by `Y_i`, the product over the partitions of
//! `Π_i` of their block sets. A block `A` of partition `ρ` becomes the set of
//! points of `Y_i` whose `ρ`-coordinate is `A`, with every other coordinate
//! free. Hats are kept symbolic: a [`HatBox`] records, per axis, whether it
//! is free or pinned to one block of one partition. Keller's condition turns
//! into disjointness of hats, and two suits for one polybox have hat images
//! with the same union.
//!
//! The constant coordinate contributed by a trivial partition is left out of
//! `Y`; it changes neither measures nor disjointness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::keller::{is_keller_family, is_keller_unchecked, keller_pair, BoxFamily, DBox, Factor, PointSet};
use crate::partition::PartitionSystem;

/// Default bound on `|Y'|` for materialized union comparisons.
pub const DEFAULT_MATERIALIZE_CAP: u64 = 1 << 24;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HatFactor {
    Free,
    Pinned { partition: usize, block: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HatBox {
    factors: Vec<HatFactor>,
}

impl HatBox {
    pub fn factors(&self) -> &[HatFactor] {
        &self.factors
    }
}

/// Exact rational, serialized as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub BigRational);

impl std::fmt::Display for Exact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Hat of a box. The family constructor already maps factors on a trivial
/// partition to [`Factor::Full`], which makes those coordinates free.
pub fn hat(system: &PartitionSystem, k: &DBox) -> Result<HatBox> {
    if k.dim() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), got: k.dim() });
    }
    let factors = k
        .factors()
        .iter()
        .enumerate()
        .map(|(axis, &f)| match f {
            Factor::Full => Ok(HatFactor::Free),
            Factor::Part { partition, block } => {
                system.check_block(crate::partition::BlockRef { axis, partition, block })?;
                Ok(if system.partition(axis, partition).is_trivial() {
                    HatFactor::Free
                } else {
                    HatFactor::Pinned { partition, block }
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HatBox { factors })
}

/// Hats are disjoint iff on some axis both are pinned on the same partition
/// to different blocks.
pub fn hats_disjoint(a: &HatBox, b: &HatBox) -> Result<bool> {
    if a.factors.len() != b.factors.len() {
        return Err(Error::SystemMismatch);
    }
    Ok(a.factors.iter().zip(&b.factors).any(|(x, y)| match (*x, *y) {
        (HatFactor::Pinned { partition: p, block: s }, HatFactor::Pinned { partition: q, block: t }) => {
            p == q && s != t
        }
        _ => false,
    }))
}

/// `|hat(K)| / |Y|`: the product over proper factors of `1/|π|`.
pub fn hat_measure(system: &PartitionSystem, k: &DBox) -> BigRational {
    k.factors().iter().enumerate().fold(BigRational::one(), |acc, (axis, &f)| match f {
        Factor::Full => acc,
        Factor::Part { partition, .. } => acc * ratio(1, system.partition(axis, partition).len()),
    })
}

/// `|hat(K) ∩ hat(L)| / |Y|`, computed factor-wise.
pub fn hat_intersection_measure(system: &PartitionSystem, k: &DBox, l: &DBox) -> BigRational {
    let mut acc = BigRational::one();
    for (axis, (&x, &y)) in k.factors().iter().zip(l.factors()).enumerate() {
        let size = |p: usize| system.partition(axis, p).len();
        match (x, y) {
            (Factor::Full, Factor::Full) => {}
            (Factor::Part { partition, .. }, Factor::Full) | (Factor::Full, Factor::Part { partition, .. }) => {
                acc *= ratio(1, size(partition));
            }
            (Factor::Part { partition: p, block: s }, Factor::Part { partition: q, block: t }) => {
                if p == q {
                    if s != t {
                        return BigRational::zero();
                    }
                    acc *= ratio(1, size(p));
                } else {
                    acc *= ratio(1, size(p) * size(q));
                }
            }
        }
    }
    acc
}

/// The restricted product `Y'` over an explicit list of `(axis, partition)`
/// coordinates.
#[derive(Clone, Debug)]
pub struct HatSpace {
    coords: Vec<(usize, usize)>,
    shape: Vec<usize>,
}

impl HatSpace {
    /// Coordinates for every nontrivial partition of the system: all of `Y`.
    pub fn full(system: &PartitionSystem) -> Self {
        let coords = (0..system.dim()).flat_map(|a| system.axis(a).nontrivial().map(move |p| (a, p))).collect();
        Self::with_coords(system, coords)
    }

    /// Coordinates for the partitions pinned by some box of the families.
    pub fn pinned_by(system: &PartitionSystem, families: &[&BoxFamily]) -> Self {
        let mut coords: Vec<(usize, usize)> = families
            .iter()
            .flat_map(|g| g.boxes())
            .flat_map(|k| k.factors().iter().enumerate().filter_map(|(a, f)| f.partition().map(|p| (a, p))))
            .collect();
        coords.sort_unstable();
        coords.dedup();
        Self::with_coords(system, coords)
    }

    fn with_coords(system: &PartitionSystem, coords: Vec<(usize, usize)>) -> Self {
        let shape = coords.iter().map(|&(a, p)| system.partition(a, p).len()).collect();
        Self { coords, shape }
    }

    /// `|Y'|`, or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        self.shape.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
    }

    pub fn materialize(&self, h: &HatBox) -> PointSet {
        let mut set = PointSet::empty(&self.shape);
        self.insert(&mut set, h);
        set
    }

    fn insert(&self, set: &mut PointSet, h: &HatBox) {
        let lists: Vec<Vec<usize>> = self
            .coords
            .iter()
            .zip(&self.shape)
            .map(|(&(axis, p), &size)| match h.factors[axis] {
                HatFactor::Pinned { partition, block } if partition == p => vec![block],
                _ => (0..size).collect(),
            })
            .collect();
        if lists.is_empty() {
            // Zero coordinates: Y' is a single point and every hat covers it.
            set.insert(&[]);
        } else {
            set.insert_product(&lists);
        }
    }

    pub fn union_of(&self, system: &PartitionSystem, g: &BoxFamily) -> Result<PointSet> {
        let mut set = PointSet::empty(&self.shape);
        for k in g.boxes() {
            self.insert(&mut set, &hat(system, k)?);
        }
        Ok(set)
    }
}

fn require_suit(g: &BoxFamily) -> Result<()> {
    if is_keller_family(g)? {
        Ok(())
    } else {
        Err(Error::NotKeller)
    }
}

/// Union equality of hat images by materializing `Y'`.
pub fn hat_unions_equal_materialized(g1: &BoxFamily, g2: &BoxFamily) -> Result<bool> {
    if !g1.same_system(g2) {
        return Err(Error::SystemMismatch);
    }
    let system = g1.system();
    let space = HatSpace::pinned_by(system, &[g1, g2]);
    Ok(space.union_of(system, g1)? == space.union_of(system, g2)?)
}

/// Union equality of hat images by measure: hats within a Keller family are
/// disjoint, so `U1 = U2` iff `|U1| = |U2| = |U1 ∩ U2|`, and `|U1 ∩ U2|` is
/// the sum of pairwise hat intersections.
pub fn hat_unions_equal_by_measure(g1: &BoxFamily, g2: &BoxFamily) -> Result<bool> {
    if !g1.same_system(g2) {
        return Err(Error::SystemMismatch);
    }
    require_suit(g1)?;
    require_suit(g2)?;
    let system = g1.system();
    let m1: BigRational = g1.boxes().iter().map(|k| hat_measure(system, k)).sum();
    let m2: BigRational = g2.boxes().iter().map(|k| hat_measure(system, k)).sum();
    if m1 != m2 {
        return Ok(false);
    }
    let mut both = BigRational::zero();
    for k in g1.boxes() {
        for l in g2.boxes() {
            both += hat_intersection_measure(system, k, l);
        }
    }
    Ok(both == m1)
}

/// Do the two Keller families have hat images with the same union?
pub fn suits_equivalent(g1: &BoxFamily, g2: &BoxFamily) -> Result<bool> {
    suits_equivalent_with_cap(g1, g2, DEFAULT_MATERIALIZE_CAP)
}

/// Materializes `Y'` when `|Y'| <= cap`, and otherwise compares measures.
pub fn suits_equivalent_with_cap(g1: &BoxFamily, g2: &BoxFamily, cap: u64) -> Result<bool> {
    if !g1.same_system(g2) {
        return Err(Error::SystemMismatch);
    }
    require_suit(g1)?;
    require_suit(g2)?;
    let space = HatSpace::pinned_by(g1.system(), &[g1, g2]);
    match space.size() {
        Some(n) if n <= cap => hat_unions_equal_materialized(g1, g2),
        _ => hat_unions_equal_by_measure(g1, g2),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxCountReport {
    pub measure_sum: Exact,
    pub box_count: usize,
    /// `Π_i n_i` when every nontrivial partition on axis `i` has `n_i`
    /// blocks; absent when some axis mixes cardinalities.
    pub implied_size: Option<usize>,
    pub holds: bool,
}

/// Checks that the hat measures of a Keller partition of `X` into proper
/// boxes sum to one, and that this forces `|G| = Π n_i`.
pub fn verify_box_count(g: &BoxFamily) -> Result<BoxCountReport> {
    require_suit(g)?;
    if g.boxes().iter().any(|k| !k.is_proper()) {
        return Err(Error::ImproperBox);
    }
    verify_box_count_unchecked(g)
}

pub(crate) fn verify_box_count_unchecked(g: &BoxFamily) -> Result<BoxCountReport> {
    let system = g.system();
    let sum: BigRational = g.boxes().iter().map(|k| hat_measure(system, k)).sum();
    let measure_sum = Exact(sum);
    if g.volume() != system.cell_count() {
        return Err(Error::NotPartition { measure_sum: measure_sum.to_string() });
    }
    let mut implied = Some(1usize);
    for axis in system.axes() {
        let mut sizes = axis.partitions().iter().filter(|p| !p.is_trivial()).map(|p| p.len());
        let n = sizes.next();
        implied = match (implied, n) {
            (Some(acc), Some(n)) if sizes.all(|s| s == n) => Some(acc * n),
            _ => None,
        };
    }
    let holds = measure_sum.0.is_one() && implied.is_none_or(|n| n == g.len());
    Ok(BoxCountReport { measure_sum, box_count: g.len(), implied_size: implied, holds })
}

/// Pairs `(i, j)` of boxes where hat disjointness disagrees with Keller's
/// condition.
pub fn gamma1_violations(g: &BoxFamily) -> Result<Vec<(usize, usize)>> {
    let system = g.system();
    let hats = g.boxes().iter().map(|k| hat(system, k)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for j in 0..hats.len() {
        for i in 0..j {
            if hats_disjoint(&hats[i], &hats[j])? != keller_pair(&g.boxes()[i], &g.boxes()[j]) {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// If `G_i` and `H_i` are suits for the same polybox for every `i`, the
/// `G_i` are pairwise disjoint and their union is a Keller family, then the
/// union of the `H_i` is a suit for the same polybox.
pub fn suit_swap_check(gs: &[BoxFamily], hs: &[BoxFamily]) -> Result<bool> {
    if gs.len() != hs.len() || gs.is_empty() {
        return Err(Error::Precondition("need equally many nonempty G and H families".into()));
    }
    for (g, h) in gs.iter().zip(hs) {
        if !suits_equivalent(g, h)? {
            return Err(Error::Precondition("some G_i and H_i are not suits for one polybox".into()));
        }
    }
    let union_all = |fs: &[BoxFamily]| -> Result<BoxFamily> {
        let mut acc = fs[0].clone();
        for f in &fs[1..] {
            acc = acc.union(f)?;
        }
        if acc.len() != fs.iter().map(BoxFamily::len).sum::<usize>() {
            return Err(Error::Precondition("families overlap".into()));
        }
        Ok(acc)
    };
    let g = union_all(gs)?;
    let h = union_all(hs)?;
    if !is_keller_unchecked(g.boxes()) {
        return Err(Error::Precondition("union of the G_i is not a Keller family".into()));
    }
    Ok(is_keller_unchecked(h.boxes()) && suits_equivalent(&g, &h)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::keller::{elementary_aggregate, realize};
    use crate::partition::{arc_system, binary_system, Partition};

    fn part(p: usize, b: usize) -> Factor {
        Factor::part(p, b)
    }

    fn fam(s: &Arc<PartitionSystem>, boxes: &[Vec<Factor>]) -> BoxFamily {
        BoxFamily::new(s.clone(), boxes.iter().cloned().map(DBox::new).collect()).unwrap()
    }

    fn grid(s: &Arc<PartitionSystem>) -> BoxFamily {
        fam(
            s,
            &[
                vec![part(0, 0), part(0, 0)],
                vec![part(0, 0), part(0, 1)],
                vec![part(0, 1), part(0, 0)],
                vec![part(0, 1), part(0, 1)],
            ],
        )
    }

    fn laminated(s: &Arc<PartitionSystem>) -> BoxFamily {
        fam(
            s,
            &[
                vec![part(0, 0), part(0, 0)],
                vec![part(0, 0), part(0, 1)],
                vec![part(0, 1), part(1, 1)],
                vec![part(0, 1), part(1, 0)],
            ],
        )
    }

    #[test]
    fn hat_examples() {
        let s = arc_system(2, 1, 2).unwrap();
        assert!(hat(&s, &DBox::full(2)).unwrap().factors().iter().all(|f| *f == HatFactor::Free));
        let h = hat(&s, &DBox::new(vec![part(0, 1), part(0, 0)])).unwrap();
        assert_eq!(h.factors(), &[HatFactor::Pinned { partition: 0, block: 1 }, HatFactor::Pinned { partition: 0, block: 0 }]);
        let h = hat(&s, &DBox::new(vec![Factor::Full, part(0, 0)])).unwrap();
        assert_eq!(h.factors()[0], HatFactor::Free);
        // A factor on the trivial partition is free.
        let h = hat(&s, &DBox::new(vec![part(1, 0), part(0, 0)])).unwrap();
        assert_eq!(h.factors()[0], HatFactor::Free);
    }

    #[test]
    fn disjointness_examples() {
        let s = arc_system(2, 2, 2).unwrap();
        let a = hat(&s, &DBox::new(vec![part(0, 0), part(0, 0)])).unwrap();
        let b = hat(&s, &DBox::new(vec![part(0, 1), part(0, 0)])).unwrap();
        assert!(hats_disjoint(&a, &b).unwrap());
        assert!(!hats_disjoint(&a, &a).unwrap());
        let c = hat(&s, &DBox::new(vec![part(0, 0), Factor::Full])).unwrap();
        let d = hat(&s, &DBox::new(vec![part(1, 1), Factor::Full])).unwrap();
        assert!(!hats_disjoint(&c, &d).unwrap());
        let e = hat(&arc_system(2, 2, 3).unwrap(), &DBox::full(3)).unwrap();
        assert_eq!(hats_disjoint(&a, &e), Err(Error::SystemMismatch));
    }

    #[test]
    fn measure_examples() {
        let s = arc_system(3, 2, 2).unwrap();
        assert_eq!(hat_measure(&s, &DBox::full(2)), BigRational::one());
        assert_eq!(hat_measure(&s, &DBox::new(vec![part(0, 0), part(1, 2)])), ratio(1, 9));
        let two = Partition::new(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let three = Partition::new(6, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let s = PartitionSystem::new(vec![(6, vec![two.clone()]), (6, vec![three.clone()])]).unwrap();
        assert_eq!(hat_measure(&s, &DBox::new(vec![part(0, 1), part(0, 2)])), ratio(1, 6));
    }

    #[test]
    fn measure_matches_materialized_hat() {
        let two = Partition::new(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let three = Partition::new(6, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let s = PartitionSystem::new(vec![(6, vec![two, three]), (4, vec![Partition::new(4, &[vec![0, 1], vec![2, 3]]).unwrap()])])
            .unwrap();
        let space = HatSpace::full(&s);
        let y = space.size().unwrap() as usize;
        assert_eq!(y, 2 * 3 * 2);
        for f0 in [Factor::Full, part(0, 0), part(0, 1), part(1, 0), part(1, 2)] {
            for f1 in [Factor::Full, part(0, 1)] {
                let k = DBox::new(vec![f0, f1]);
                let points = space.materialize(&hat(&s, &k).unwrap()).len();
                assert_eq!(hat_measure(&s, &k) * BigRational::from_integer(BigInt::from(y)), ratio(points, 1));
            }
        }
    }

    #[test]
    fn suits_equivalent_examples() {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        let g = laminated(&s);
        assert!(suits_equivalent(&g, &g).unwrap());
        let left = g.filter(|k| k.factor(0) == part(0, 0));
        let agg = elementary_aggregate(&left, 1, 0, 0).unwrap();
        assert!(suits_equivalent(&left, &agg).unwrap());
        assert!(hat_unions_equal_by_measure(&left, &agg).unwrap());
        let grid_q2 = fam(
            &s,
            &[
                vec![part(0, 0), part(0, 0)],
                vec![part(0, 0), part(0, 1)],
                vec![part(0, 1), part(0, 0)],
                vec![part(0, 1), part(0, 1)],
            ],
        );
        assert!(suits_equivalent(&grid_q2, &g).unwrap());
        assert!(suits_equivalent_with_cap(&grid_q2, &g, 0).unwrap());
        assert!(!suits_equivalent(&left, &g).unwrap());
        assert!(!suits_equivalent_with_cap(&left, &g, 0).unwrap());
    }

    #[test]
    fn box_count_examples() {
        let s = Arc::new(binary_system(&[2, 2], &[vec![vec![0]], vec![vec![0]]]).unwrap());
        let r = verify_box_count(&grid(&s)).unwrap();
        assert_eq!(r.measure_sum.to_string(), "1/1");
        assert_eq!(r.implied_size, Some(4));
        assert!(r.holds);

        let s2 = Arc::new(arc_system(2, 2, 2).unwrap());
        let r = verify_box_count(&laminated(&s2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.box_count, 4);

        let packing = grid(&s).filter(|k| k.factor(0) == part(0, 0));
        assert_eq!(verify_box_count(&packing), Err(Error::NotPartition { measure_sum: "1/2".into() }));
        let improper = fam(&s, &[vec![Factor::Full, Factor::Full]]);
        assert_eq!(verify_box_count(&improper), Err(Error::ImproperBox));
    }

    #[test]
    fn mixed_cardinality_has_no_implied_size() {
        let two = Partition::new(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let three = Partition::new(6, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let s = Arc::new(PartitionSystem::new(vec![(6, vec![two, three])]).unwrap());
        let g = fam(&s, &[vec![part(0, 0)], vec![part(0, 1)]]);
        let r = verify_box_count(&g).unwrap();
        assert_eq!(r.implied_size, None);
        assert!(r.holds);
    }

    #[test]
    fn suit_swap_examples() {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        let g = laminated(&s);
        assert!(suit_swap_check(std::slice::from_ref(&g), std::slice::from_ref(&g)).unwrap());
        let left = g.filter(|k| k.factor(0) == part(0, 0));
        let right = g.filter(|k| k.factor(0) == part(0, 1));
        let left_agg = elementary_aggregate(&left, 1, 0, 1).unwrap();
        let right_agg = elementary_aggregate(&right, 1, 1, 0).unwrap();
        assert!(suit_swap_check(std::slice::from_ref(&left), std::slice::from_ref(&left_agg)).unwrap());
        assert!(suit_swap_check(&[left.clone(), right.clone()], &[left_agg.clone(), right_agg.clone()]).unwrap());
        let swapped = left_agg.union(&right_agg).unwrap();
        assert_eq!(realize(&swapped), realize(&g));
        assert!(matches!(suit_swap_check(std::slice::from_ref(&left), std::slice::from_ref(&right)), Err(Error::Precondition(_))));
    }

    #[test]
    fn gamma1_on_grid() {
        let s = Arc::new(arc_system(2, 2, 2).unwrap());
        assert!(gamma1_violations(&laminated(&s)).unwrap().is_empty());
    }
}
