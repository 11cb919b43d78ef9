//! Multipiles: recognition with a witness tree, and construction from one.
//!
//! A family is a multipile when it is a single box, or when it is a pile
//! laminated by some nontrivial partition `π` on axis `i` whose block
//! restrictions `G|A` are multipiles and, on every other axis, have pairwise
//! disjoint sets of hidden partitions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keller::{c_stats_unchecked, classify_fast, is_keller_family, BoxFamily, DBox, Factor, PartitionStatus};
use crate::partition::PartitionSystem;

/// Witness of the recursive multipile structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, try_from = "TreeRepr")]
pub enum MultipileTree {
    Leaf {
        leaf: DBox,
    },
    Node {
        axis: usize,
        partition: usize,
        /// Keyed by block index of `partition`.
        children: BTreeMap<usize, MultipileTree>,
    },
}

// Untagged enums buffer map keys as strings, so block keys are parsed here.
#[derive(Deserialize)]
#[serde(untagged)]
enum TreeRepr {
    Leaf { leaf: DBox },
    Node { axis: usize, partition: usize, children: BTreeMap<String, TreeRepr> },
}

impl TryFrom<TreeRepr> for MultipileTree {
    type Error = String;

    fn try_from(r: TreeRepr) -> std::result::Result<Self, String> {
        Ok(match r {
            TreeRepr::Leaf { leaf } => MultipileTree::Leaf { leaf },
            TreeRepr::Node { axis, partition, children } => {
                let children = children
                    .into_iter()
                    .map(|(k, v)| {
                        let b = k.parse::<usize>().map_err(|_| format!("block key {k:?} is not an index"))?;
                        Ok((b, MultipileTree::try_from(v)?))
                    })
                    .collect::<std::result::Result<_, String>>()?;
                MultipileTree::Node { axis, partition, children }
            }
        })
    }
}

impl MultipileTree {
    pub fn leaf(k: DBox) -> Self {
        MultipileTree::Leaf { leaf: k }
    }

    /// Number of leaves, i.e. boxes of the encoded family.
    pub fn size(&self) -> usize {
        match self {
            MultipileTree::Leaf { .. } => 1,
            MultipileTree::Node { children, .. } => children.values().map(MultipileTree::size).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MultipileTree::Leaf { .. } => 0,
            MultipileTree::Node { children, .. } => 1 + children.values().map(MultipileTree::depth).max().unwrap_or(0),
        }
    }

    /// The axis split at each depth, if every node at a given depth splits
    /// the same axis.
    pub fn level_axes(&self) -> Option<Vec<usize>> {
        let mut levels: Vec<Option<usize>> = Vec::new();
        fn walk(t: &MultipileTree, depth: usize, levels: &mut Vec<Option<usize>>) -> bool {
            match t {
                MultipileTree::Leaf { .. } => true,
                MultipileTree::Node { axis, children, .. } => {
                    if levels.len() <= depth {
                        levels.push(Some(*axis));
                    } else if levels[depth] != Some(*axis) {
                        return false;
                    }
                    children.values().all(|c| walk(c, depth + 1, levels))
                }
            }
        }
        walk(self, 0, &mut levels).then(|| levels.into_iter().flatten().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipileVerdict {
    pub verdict: bool,
    pub tree: Option<MultipileTree>,
}

/// Decides whether a Keller family is a multipile.
///
/// Candidates are tried with axis ascending; on each axis the only possible
/// lamination partition is the one containing the first box's factor.
pub fn is_multipile(g: &BoxFamily) -> Result<MultipileVerdict> {
    if !is_keller_family(g)? {
        return Err(Error::NotKeller);
    }
    Ok(is_multipile_unchecked(g))
}

pub(crate) fn is_multipile_unchecked(g: &BoxFamily) -> MultipileVerdict {
    let mut r = Recognizer { system: g.system().clone(), memo: HashMap::new() };
    let tree = r.recognize(g.boxes());
    MultipileVerdict { verdict: tree.is_some(), tree }
}

struct Recognizer {
    system: Arc<PartitionSystem>,
    memo: HashMap<Vec<DBox>, Option<MultipileTree>>,
}

impl Recognizer {
    fn recognize(&mut self, boxes: &[DBox]) -> Option<MultipileTree> {
        if boxes.len() == 1 {
            return Some(MultipileTree::leaf(boxes[0].clone()));
        }
        if let Some(hit) = self.memo.get(boxes) {
            return hit.clone();
        }
        let found = self.search(boxes);
        self.memo.insert(boxes.to_vec(), found.clone());
        found
    }

    fn search(&mut self, boxes: &[DBox]) -> Option<MultipileTree> {
        let system = self.system.clone();
        let family = BoxFamily::from_sorted(system.clone(), boxes.to_vec());
        for axis in 0..system.dim() {
            let Some(p) = boxes[0].factor(axis).partition() else { continue };
            if !boxes.iter().all(|k| k.factor(axis).partition() == Some(p)) {
                continue;
            }
            if classify_fast(&family, axis, p) != PartitionStatus::Hidden {
                continue;
            }
            let blocks = system.partition(axis, p).len();
            let parts: Vec<Vec<DBox>> = (0..blocks)
                .map(|b| boxes.iter().filter(|k| k.factor(axis) == Factor::part(p, b)).cloned().collect())
                .collect();
            if siblings_disjoint(&system, axis, &parts).is_err() {
                continue;
            }
            let mut children = BTreeMap::new();
            for (b, part) in parts.iter().enumerate() {
                match self.recognize(part) {
                    Some(t) => {
                        children.insert(b, t);
                    }
                    None => break,
                }
            }
            if children.len() == blocks {
                return Some(MultipileTree::Node { axis, partition: p, children });
            }
        }
        None
    }
}

/// For every axis other than `axis`, the hidden sets of the sibling families
/// must be pairwise disjoint.
fn siblings_disjoint(system: &Arc<PartitionSystem>, axis: usize, parts: &[Vec<DBox>]) -> Result<()> {
    let hidden: Vec<Vec<Vec<usize>>> = parts
        .iter()
        .map(|boxes| c_stats_unchecked(&BoxFamily::from_sorted(system.clone(), boxes.clone())).hidden)
        .collect();
    for k in (0..system.dim()).filter(|&k| k != axis) {
        let mut seen: Vec<usize> = Vec::new();
        for h in &hidden {
            for &p in &h[k] {
                if seen.contains(&p) {
                    return Err(Error::Disjointness { axis: k, partition: p });
                }
            }
            seen.extend(&h[k]);
        }
    }
    Ok(())
}

/// Assembles the family encoded by `tree`, checking every condition of the
/// recursive definition on the way up.
pub fn build_multipile(system: &Arc<PartitionSystem>, tree: &MultipileTree) -> Result<BoxFamily> {
    let boxes = assemble(system, tree)?;
    BoxFamily::new(system.clone(), boxes)
}

fn assemble(system: &Arc<PartitionSystem>, tree: &MultipileTree) -> Result<Vec<DBox>> {
    match tree {
        MultipileTree::Leaf { leaf } => {
            let fam = BoxFamily::new(system.clone(), vec![leaf.clone()])?;
            Ok(fam.boxes().to_vec())
        }
        MultipileTree::Node { axis, partition, children } => {
            let (axis, p) = (*axis, *partition);
            if axis >= system.dim() {
                return Err(Error::IllFormedTree(format!("axis {axis} out of range")));
            }
            if p >= system.axis(axis).partitions().len() {
                return Err(Error::IllFormedTree(format!("partition {p} out of range on axis {axis}")));
            }
            let blocks = system.partition(axis, p).len();
            if blocks < 2 {
                return Err(Error::IllFormedTree(format!("partition {p} on axis {axis} is trivial")));
            }
            if children.len() != blocks || children.keys().enumerate().any(|(i, &b)| i != b) {
                return Err(Error::IllFormedTree(format!(
                    "children of a node on partition {p} must be keyed by blocks 0..{blocks}"
                )));
            }
            let mut parts = Vec::with_capacity(blocks);
            for (&b, child) in children {
                let boxes = assemble(system, child)?;
                if let Some(k) = boxes.iter().find(|k| k.factor(axis) != Factor::part(p, b)) {
                    return Err(Error::IllFormedTree(format!(
                        "box {:?} under block {b} has factor {:?} on axis {axis}",
                        k.factors(),
                        k.factor(axis)
                    )));
                }
                parts.push(boxes);
            }
            siblings_disjoint(system, axis, &parts)?;
            let mut all: Vec<DBox> = parts.into_iter().flatten().collect();
            all.sort();
            let family = BoxFamily::from_sorted(system.clone(), all);
            if classify_fast(&family, axis, p) != PartitionStatus::Hidden {
                return Err(Error::IllFormedTree(format!(
                    "children do not realize a cylinder along axis {axis}"
                )));
            }
            Ok(family.boxes().to_vec())
        }
    }
}

/// `1 + m_{i1} + m_{i1} m_{i2} + ... + m_{i1} ... m_{i(d-1)}` for the
/// ordering `i1, ..., id` (0-based axis indices).
pub fn extremal_p_value(m: &[usize], ordering: &[usize]) -> Result<usize> {
    let d = m.len();
    let mut seen = vec![false; d];
    if ordering.len() != d {
        return Err(Error::InvalidOrdering);
    }
    for &i in ordering {
        if i >= d || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidOrdering);
        }
    }
    let mut total = 0;
    let mut term = 1;
    for &i in ordering {
        total += term;
        term *= m[i];
    }
    Ok(total)
}

/// Largest value of [`extremal_p_value`]: axes taken in non-increasing order
/// of `m`.
pub fn max_extremal_p_value(m: &[usize]) -> usize {
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(m[i]));
    extremal_p_value(m, &order).expect("sorted ordering is a permutation")
}
