//! Unit-cube tilings of the discrete torus `T^d_m` at offset resolution `q`.
//!
//! Axis `i` is the circle `[0, m_i)` cut into `m_i * q_i` cells of width
//! `1/q_i`; a cube covers `q_i` consecutive cells (cyclically) on every
//! axis, and its start coordinate `s` stands for the rational `s / q_i`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keller::{c_stats_unchecked, theorem_b_from_stats, BoxFamily, DBox, Factor};
use crate::multipile::{extremal_p_value, is_multipile_unchecked, MultipileTree};
use crate::partition::{arc_system_mixed, PartitionSystem};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr")]
pub struct TorusSpec {
    m: Vec<usize>,
    q: Vec<usize>,
}

#[derive(Deserialize)]
struct SpecRepr {
    m: Vec<usize>,
    q: Option<Vec<usize>>,
}

impl TryFrom<SpecRepr> for TorusSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        match r.q {
            Some(q) => TorusSpec::new(r.m, q),
            None => TorusSpec::with_default_q(r.m),
        }
    }
}

impl TorusSpec {
    pub fn new(m: Vec<usize>, q: Vec<usize>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidTorus("need at least one axis".into()));
        }
        if m.len() != q.len() {
            return Err(Error::InvalidTorus(format!("m has {} axes but q has {}", m.len(), q.len())));
        }
        if let Some(&bad) = m.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidTorus(format!("m_i must be at least 2, got {bad}")));
        }
        if q.contains(&0) {
            return Err(Error::InvalidTorus("q_i must be positive".into()));
        }
        let spec = TorusSpec { m, q };
        spec.shape()
            .iter()
            .try_fold(1usize, |acc, &l| acc.checked_mul(l))
            .ok_or_else(|| Error::InvalidTorus("cell count overflows".into()))?;
        Ok(spec)
    }

    /// Resolution `q_i = Π m_j` on every axis, enough to realize every
    /// combinatorial type of tiling.
    pub fn with_default_q(m: Vec<usize>) -> Result<Self> {
        let q = m.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        let q = q.ok_or_else(|| Error::InvalidTorus("Π m overflows".into()))?;
        let d = m.len();
        TorusSpec::new(m, vec![q; d])
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn q(&self) -> &[usize] {
        &self.q
    }

    /// Cells along `axis`: `m_axis * q_axis`.
    pub fn axis_len(&self, axis: usize) -> usize {
        self.m[axis] * self.q[axis]
    }

    pub fn shape(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| self.axis_len(i)).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    /// `Π m_i`, the number of cubes in any tiling.
    pub fn cube_count(&self) -> usize {
        self.m.iter().product()
    }

    /// The common `n` when all `m_i` agree.
    pub fn uniform_m(&self) -> Option<usize> {
        let n = self.m[0];
        self.m.iter().all(|&x| x == n).then_some(n)
    }

    /// Row-major index of a cell.
    pub fn cell_index(&self, cell: &[usize]) -> usize {
        cell.iter().enumerate().fold(0, |acc, (i, &c)| acc * self.axis_len(i) + c)
    }

    pub fn cell_of(&self, mut index: usize) -> Vec<usize> {
        let mut cell = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            cell[i] = index % self.axis_len(i);
            index /= self.axis_len(i);
        }
        cell
    }

    /// Row-major indices of the cells of the cube starting at `start`.
    pub fn cube_cells(&self, start: &[usize]) -> Vec<usize> {
        let mut cells = vec![0usize];
        for (i, &s) in start.iter().enumerate() {
            let len = self.axis_len(i);
            let mut next = Vec::with_capacity(cells.len() * self.q[i]);
            for &c in &cells {
                for r in 0..self.q[i] {
                    next.push(c * len + (s + r) % len);
                }
            }
            cells = next;
        }
        cells
    }

    /// The arc system this torus bridges to, shared between calls.
    pub fn bridge_system(&self) -> Arc<PartitionSystem> {
        static CACHE: OnceLock<Mutex<HashMap<TorusSpec, Arc<PartitionSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(self.clone())
            .or_insert_with(|| Arc::new(arc_system_mixed(&self.m, &self.q).expect("spec validated")))
            .clone()
    }
}

impl std::fmt::Display for TorusSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join("x");
        write!(f, "m={} q={}", join(&self.m), join(&self.q))
    }
}

/// Cube start positions, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TilingDoc", into = "TilingDoc")]
pub struct TorusTiling {
    spec: TorusSpec,
    starts: Vec<Vec<usize>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct TilingDoc {
    m: Vec<usize>,
    q: Option<Vec<usize>>,
    starts: Vec<Vec<usize>>,
}

impl TryFrom<TilingDoc> for TorusTiling {
    type Error = Error;

    fn try_from(doc: TilingDoc) -> Result<Self> {
        let spec = TorusSpec::try_from(SpecRepr { m: doc.m, q: doc.q })?;
        TorusTiling::new(spec, doc.starts)
    }
}

impl From<TorusTiling> for TilingDoc {
    fn from(t: TorusTiling) -> Self {
        TilingDoc { m: t.spec.m, q: Some(t.spec.q), starts: t.starts }
    }
}

impl TorusTiling {
    /// Checks coordinates and sorts; use [`validate_tiling`] for coverage.
    pub fn new(spec: TorusSpec, mut starts: Vec<Vec<usize>>) -> Result<Self> {
        for s in &starts {
            if s.len() != spec.dim() {
                return Err(Error::DimensionMismatch { expected: spec.dim(), got: s.len() });
            }
            if let Some(i) = (0..spec.dim()).find(|&i| s[i] >= spec.axis_len(i)) {
                return Err(Error::InvalidTiling(format!(
                    "start {s:?} out of range on axis {i} (length {})",
                    spec.axis_len(i)
                )));
            }
        }
        starts.sort();
        Ok(TorusTiling { spec, starts })
    }

    pub(crate) fn from_sorted(spec: TorusSpec, starts: Vec<Vec<usize>>) -> Self {
        debug_assert!(starts.windows(2).all(|w| w[0] <= w[1]));
        TorusTiling { spec, starts }
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn starts(&self) -> &[Vec<usize>] {
        &self.starts
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }
}

/// Why a start set fails to tile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TilingDefect {
    Overlap { cell: Vec<usize> },
    Hole { cell: Vec<usize> },
}

impl std::fmt::Display for TilingDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TilingDefect::Overlap { cell } => write!(f, "cell {cell:?} is covered more than once"),
            TilingDefect::Hole { cell } => write!(f, "cell {cell:?} is not covered"),
        }
    }
}

/// First defect found: an overlap in cube order, else the least hole.
pub fn check_tiling(t: &TorusTiling) -> std::result::Result<(), TilingDefect> {
    let spec = &t.spec;
    let mut covered = vec![false; spec.cell_count()];
    for s in &t.starts {
        for c in spec.cube_cells(s) {
            if std::mem::replace(&mut covered[c], true) {
                return Err(TilingDefect::Overlap { cell: spec.cell_of(c) });
            }
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(c) => Err(TilingDefect::Hole { cell: spec.cell_of(c) }),
        None => Ok(()),
    }
}

pub fn validate_tiling(t: &TorusTiling) -> bool {
    check_tiling(t).is_ok()
}

fn require_valid(t: &TorusTiling) -> Result<()> {
    check_tiling(t).map_err(|d| Error::InvalidTiling(d.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PParams {
    pub per_axis: Vec<Vec<usize>>,
    pub total: usize,
}

/// Residues of start coordinates mod `q_i`, i.e. the fractional offsets
/// `p_i(T)` scaled by `q_i`.
pub fn p_params(t: &TorusTiling) -> Result<PParams> {
    require_valid(t)?;
    Ok(p_params_unchecked(t))
}

pub(crate) fn p_params_unchecked(t: &TorusTiling) -> PParams {
    let per_axis: Vec<Vec<usize>> = (0..t.spec.dim())
        .map(|i| t.starts.iter().map(|s| s[i] % t.spec.q[i]).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    let total = per_axis.iter().map(Vec::len).sum();
    PParams { per_axis, total }
}

/// The box of arcs containing each cube, over [`TorusSpec::bridge_system`].
pub fn to_box_family(t: &TorusTiling) -> Result<BoxFamily> {
    require_valid(t)?;
    Ok(to_box_family_unchecked(t))
}

pub(crate) fn to_box_family_unchecked(t: &TorusTiling) -> BoxFamily {
    let system = t.spec.bridge_system();
    let mut boxes: Vec<DBox> = t
        .starts
        .iter()
        .map(|s| {
            DBox::new(
                s.iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let p = x % t.spec.q[i];
                        Factor::part(p, system.partition(i, p).block_of(x))
                    })
                    .collect(),
            )
        })
        .collect();
    boxes.sort();
    debug_assert!(boxes.windows(2).all(|w| w[0] < w[1]));
    BoxFamily::from_sorted(system, boxes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCReport {
    pub p_total: usize,
    pub bound: usize,
    pub holds: bool,
    pub equality: bool,
    pub is_multipile: bool,
}

/// `p(T) <= (n^d - 1)/(n - 1)` for uniform `m = (n, ..., n)`, with
/// equality cross-checked against the multipile recognizer and against
/// equality in `c(G) <= |G| - 1` on the bridged family.
pub fn theorem_c_report(t: &TorusTiling) -> Result<TheoremCReport> {
    let n = t.spec.uniform_m().ok_or_else(|| Error::NonUniformTorus(t.spec.m.clone()))?;
    require_valid(t)?;
    let bound = (n.pow(t.spec.dim() as u32) - 1) / (n - 1);
    let p_total = p_params_unchecked(t).total;
    let family = to_box_family_unchecked(t);
    let is_multipile = is_multipile_unchecked(&family).verdict;
    let b = theorem_b_from_stats(&c_stats_unchecked(&family), family.len());
    let report = TheoremCReport { p_total, bound, holds: p_total <= bound, equality: p_total == bound, is_multipile };
    if !report.holds || report.equality != is_multipile || b.equality != report.equality {
        return Err(Error::TheoremViolation(format!(
            "{}: p={p_total} bound={bound} multipile={is_multipile} c-equality={}",
            t.spec, b.equality
        )));
    }
    Ok(report)
}

/// A guillotine recipe: split an axis into `m_axis` slabs starting at
/// `offset`, `offset + q`, ... and recurse into each slab.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Recipe {
    Split { axis: usize, offset: usize, slabs: Vec<Recipe> },
    Cube(CubeTag),
}

/// Serialized as the string `"cube"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubeTag {
    Cube,
}

impl Recipe {
    pub fn cube() -> Self {
        Recipe::Cube(CubeTag::Cube)
    }

    pub fn split(axis: usize, offset: usize, slabs: Vec<Recipe>) -> Self {
        Recipe::Split { axis, offset, slabs }
    }
}

/// Builds the tiling described by `recipe`. Sibling slabs must not reuse an
/// `(axis, offset)` pair anywhere below them, which is what makes the result
/// a multipile.
pub fn laminated_construction(spec: &TorusSpec, recipe: &Recipe) -> Result<TorusTiling> {
    let mut starts = Vec::with_capacity(spec.cube_count());
    let mut fixed = vec![None; spec.dim()];
    walk_recipe(spec, recipe, &mut fixed, &mut starts)?;
    let t = TorusTiling::new(spec.clone(), starts)?;
    require_valid(&t).map_err(|e| Error::Recipe(e.to_string()))?;
    Ok(t)
}

fn walk_recipe(
    spec: &TorusSpec,
    recipe: &Recipe,
    fixed: &mut Vec<Option<usize>>,
    starts: &mut Vec<Vec<usize>>,
) -> Result<BTreeSet<(usize, usize)>> {
    match recipe {
        Recipe::Cube(_) => {
            let start: Option<Vec<usize>> = fixed.iter().copied().collect();
            let start = start.ok_or_else(|| {
                let axis = fixed.iter().position(Option::is_none).unwrap_or(0);
                Error::Recipe(format!("a cube is reached with axis {axis} never split"))
            })?;
            starts.push(start);
            Ok(BTreeSet::new())
        }
        Recipe::Split { axis, offset, slabs } => {
            let (axis, offset) = (*axis, *offset);
            if axis >= spec.dim() {
                return Err(Error::Recipe(format!("axis {axis} out of range")));
            }
            if offset >= spec.q[axis] {
                return Err(Error::Recipe(format!("offset {offset} on axis {axis} must be below q = {}", spec.q[axis])));
            }
            if fixed[axis].is_some() {
                return Err(Error::Recipe(format!("axis {axis} is split twice on one path")));
            }
            if slabs.len() != spec.m[axis] {
                return Err(Error::Recipe(format!("axis {axis} needs {} slabs, got {}", spec.m[axis], slabs.len())));
            }
            let mut used = BTreeSet::new();
            for (k, slab) in slabs.iter().enumerate() {
                fixed[axis] = Some(offset + k * spec.q[axis]);
                let below = walk_recipe(spec, slab, fixed, starts)?;
                if let Some(&(a, o)) = below.intersection(&used).next() {
                    return Err(Error::Recipe(format!("sibling slabs both split axis {a} at offset {o}")));
                }
                used.extend(below);
            }
            fixed[axis] = None;
            used.insert((axis, offset));
            Ok(used)
        }
    }
}

/// Recipe splitting axis `ordering[l]` at depth `l`, giving the nodes of each
/// level the offsets `0, 1, 2, ...` in order. Its tiling attains
/// `extremal_p_value(m, ordering)`.
pub fn staircase_recipe(spec: &TorusSpec, ordering: &[usize]) -> Result<Recipe> {
    extremal_p_value(spec.m(), ordering)?;
    let mut width = 1;
    for &axis in ordering {
        if width > spec.q[axis] {
            return Err(Error::Recipe(format!(
                "{width} nodes split axis {axis} but q = {} offsets are available",
                spec.q[axis]
            )));
        }
        width *= spec.m[axis];
    }
    fn level(spec: &TorusSpec, ordering: &[usize], counters: &mut [usize]) -> Recipe {
        match ordering.split_first() {
            None => Recipe::cube(),
            Some((&axis, rest)) => {
                let depth = counters.len() - ordering.len();
                let offset = counters[depth];
                counters[depth] += 1;
                let slabs = (0..spec.m[axis]).map(|_| level(spec, rest, counters)).collect();
                Recipe::split(axis, offset, slabs)
            }
        }
    }
    Ok(level(spec, ordering, &mut vec![0; ordering.len()]))
}

/// The multipile tree of a recipe's tiling over the bridge system.
pub fn recipe_tree(spec: &TorusSpec, recipe: &Recipe) -> Result<MultipileTree> {
    let system = spec.bridge_system();
    let mut fixed = vec![None; spec.dim()];
    fn go(
        spec: &TorusSpec,
        system: &PartitionSystem,
        recipe: &Recipe,
        fixed: &mut Vec<Option<usize>>,
    ) -> Result<MultipileTree> {
        match recipe {
            Recipe::Cube(_) => {
                let factors = fixed
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let x = x.ok_or_else(|| Error::Recipe(format!("axis {i} never split")))?;
                        let p = x % spec.q[i];
                        Ok(Factor::part(p, system.partition(i, p).block_of(x)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MultipileTree::leaf(DBox::new(factors)))
            }
            Recipe::Split { axis, offset, slabs } => {
                let (axis, offset) = (*axis, *offset);
                if axis >= spec.dim() || offset >= spec.q[axis] || slabs.len() != spec.m[axis] {
                    return Err(Error::Recipe(format!("bad split on axis {axis}")));
                }
                let mut children = std::collections::BTreeMap::new();
                for (k, slab) in slabs.iter().enumerate() {
                    let x = offset + k * spec.q[axis];
                    fixed[axis] = Some(x);
                    children.insert(system.partition(axis, offset).block_of(x), go(spec, system, slab, fixed)?);
                }
                fixed[axis] = None;
                Ok(MultipileTree::Node { axis, partition: offset, children })
            }
        }
    }
    go(spec, &system, recipe, &mut fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keller::{c_stats, is_keller_family};
    use crate::multipile::build_multipile;

    fn spec22() -> TorusSpec {
        TorusSpec::new(vec![2, 2], vec![2, 2]).unwrap()
    }

    fn grid() -> TorusTiling {
        TorusTiling::new(spec22(), vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]).unwrap()
    }

    fn laminated() -> TorusTiling {
        TorusTiling::new(spec22(), vec![vec![0, 0], vec![0, 2], vec![2, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(TorusSpec::new(vec![1, 2], vec![1, 1]).is_err());
        assert!(TorusSpec::new(vec![2, 2], vec![1]).is_err());
        assert!(TorusSpec::new(vec![2], vec![0]).is_err());
        let s = TorusSpec::with_default_q(vec![2, 3]).unwrap();
        assert_eq!(s.q(), &[6, 6]);
        assert_eq!(s.cell_count(), 12 * 18);
        assert_eq!(s.cell_of(s.cell_index(&[5, 7])), vec![5, 7]);
    }

    #[test]
    fn validate_examples() {
        assert!(validate_tiling(&grid()));
        assert!(validate_tiling(&laminated()));
        let holed = TorusTiling::new(spec22(), grid().starts()[1..].to_vec()).unwrap();
        assert_eq!(check_tiling(&holed), Err(TilingDefect::Hole { cell: vec![0, 0] }));
        let overlapping = TorusTiling::new(spec22(), vec![vec![0, 0], vec![0, 1], vec![2, 0], vec![2, 2]]).unwrap();
        assert_eq!(check_tiling(&overlapping), Err(TilingDefect::Overlap { cell: vec![0, 1] }));
        assert!(TorusTiling::new(spec22(), vec![vec![4, 0]]).is_err());
    }

    #[test]
    fn p_params_examples() {
        assert_eq!(p_params(&grid()).unwrap(), PParams { per_axis: vec![vec![0], vec![0]], total: 2 });
        assert_eq!(p_params(&laminated()).unwrap(), PParams { per_axis: vec![vec![0], vec![0, 1]], total: 3 });
        let line = TorusTiling::new(TorusSpec::new(vec![3], vec![4]).unwrap(), vec![vec![1], vec![5], vec![9]]).unwrap();
        assert_eq!(p_params(&line).unwrap().total, 1);
        let holed = TorusTiling::new(spec22(), vec![vec![0, 0]]).unwrap();
        assert!(matches!(p_params(&holed), Err(Error::InvalidTiling(_))));
    }

    #[test]
    fn theorem_c_examples() {
        let r = theorem_c_report(&laminated()).unwrap();
        assert_eq!(r, TheoremCReport { p_total: 3, bound: 3, holds: true, equality: true, is_multipile: true });
        let r = theorem_c_report(&grid()).unwrap();
        assert_eq!(r, TheoremCReport { p_total: 2, bound: 3, holds: true, equality: false, is_multipile: false });
        let mixed = TorusSpec::new(vec![2, 3], vec![1, 1]).unwrap();
        let t = TorusTiling::new(mixed, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(theorem_c_report(&t), Err(Error::NonUniformTorus(vec![2, 3])));
    }

    #[test]
    fn bridge_examples() {
        let g = to_box_family(&grid()).unwrap();
        assert_eq!(g.len(), 4);
        assert!(is_keller_family(&g).unwrap());
        assert_eq!(c_stats(&g).unwrap().c_total, 2);
        let l = to_box_family(&laminated()).unwrap();
        let stats = c_stats(&l).unwrap();
        assert_eq!(stats.c_total, 3);
        assert_eq!(stats.c_per_axis, vec![1, 2]);
    }

    #[test]
    fn construction_examples() {
        let r = Recipe::split(0, 0, vec![Recipe::split(1, 0, vec![Recipe::cube(), Recipe::cube()]), Recipe::split(1, 1, vec![Recipe::cube(), Recipe::cube()])]);
        assert_eq!(laminated_construction(&spec22(), &r).unwrap(), laminated());
        assert_eq!(staircase_recipe(&spec22(), &[0, 1]).unwrap(), r);

        let s3 = TorusSpec::new(vec![2, 2, 2], vec![4, 4, 4]).unwrap();
        let t = laminated_construction(&s3, &staircase_recipe(&s3, &[0, 1, 2]).unwrap()).unwrap();
        assert_eq!(t.len(), 8);
        let report = theorem_c_report(&t).unwrap();
        assert_eq!((report.p_total, report.bound, report.is_multipile), (7, 7, true));

        let clash = Recipe::split(0, 0, vec![Recipe::split(1, 0, vec![Recipe::cube(), Recipe::cube()]), Recipe::split(1, 0, vec![Recipe::cube(), Recipe::cube()])]);
        assert!(matches!(laminated_construction(&spec22(), &clash), Err(Error::Recipe(_))));
        let unsplit = Recipe::split(0, 0, vec![Recipe::cube(), Recipe::cube()]);
        assert!(matches!(laminated_construction(&spec22(), &unsplit), Err(Error::Recipe(_))));
        let twice = Recipe::split(0, 0, vec![Recipe::split(0, 1, vec![Recipe::cube(), Recipe::cube()]), Recipe::cube()]);
        assert!(matches!(laminated_construction(&spec22(), &twice), Err(Error::Recipe(_))));
        assert!(matches!(staircase_recipe(&TorusSpec::new(vec![2, 2], vec![1, 1]).unwrap(), &[0, 1]), Err(Error::Recipe(_))));
    }

    #[test]
    fn recipe_tree_builds_the_same_family() {
        let s = TorusSpec::new(vec![3, 2], vec![2, 3]).unwrap();
        let r = staircase_recipe(&s, &[1, 0]).unwrap();
        let t = laminated_construction(&s, &r).unwrap();
        let built = build_multipile(&s.bridge_system(), &recipe_tree(&s, &r).unwrap()).unwrap();
        assert_eq!(built, to_box_family(&t).unwrap());
        assert_eq!(p_params(&t).unwrap().total, extremal_p_value(&[3, 2], &[1, 0]).unwrap());
    }

    #[test]
    fn tiling_json_round_trip() {
        let text = serde_json::to_string(&laminated()).unwrap();
        assert_eq!(text, r#"{"m":[2,2],"q":[2,2],"starts":[[0,0],[0,2],[2,1],[2,3]]}"#);
        let back: TorusTiling = serde_json::from_str(&text).unwrap();
        assert_eq!(back, laminated());
        let r: Recipe = serde_json::from_str(r#"{"axis":0,"offset":0,"slabs":["cube","cube"]}"#).unwrap();
        assert_eq!(r, Recipe::split(0, 0, vec![Recipe::cube(), Recipe::cube()]));
    }
}
