//! Exhaustive, symmetry-reduced enumeration of cube tilings and censuses.
//!
//! The search is an exact cover over the cell grid: the state is a bit
//! vector of covered cells, and each step places a cube over the least
//! uncovered cell in row-major order. The tree is cut at a shallow depth
//! into independent prefixes that rayon explores in parallel; results are
//! gathered in prefix order, so output never depends on the worker count.
//!
//! Isomorph rejection is by canonical form: a tiling is emitted only if it
//! is the least member of its orbit under the enabled symmetries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hat::verify_box_count_unchecked;
use crate::keller::{c_stats_unchecked, is_keller_unchecked, theorem_b_from_stats};
use crate::multipile::{is_multipile_unchecked, max_extremal_p_value};
use crate::torus::{p_params_unchecked, to_box_family_unchecked, TorusSpec, TorusTiling};

/// Default limit on `Π m_i q_i`.
pub const DEFAULT_CELL_BUDGET: usize = 4096;

/// Search stops splitting once it has this many independent prefixes.
const TARGET_PREFIXES: usize = 256;

/// Which symmetries identify tilings.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symmetry {
    /// Shifts by whole cells (steps of `1/q_i`) along every axis.
    pub translations: bool,
    /// Permutations of axes with equal `(m_i, q_i)`.
    pub permutations: bool,
    /// Reflections `t -> -t` of single axes.
    pub reflections: bool,
}

impl Symmetry {
    pub const ALL: Symmetry = Symmetry { translations: true, permutations: true, reflections: true };
    pub const NONE: Symmetry = Symmetry { translations: false, permutations: false, reflections: false };
}

impl Default for Symmetry {
    fn default() -> Self {
        Symmetry::ALL
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Symmetry::ALL {
            return f.write_str("all");
        }
        if *self == Symmetry::NONE {
            return f.write_str("none");
        }
        let flags: Vec<&str> = [(self.translations, "t"), (self.permutations, "p"), (self.reflections, "r")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        f.write_str(&flags.join(","))
    }
}

impl FromStr for Symmetry {
    type Err = Error;

    /// Accepts `all`, `none`, or a comma list of `t`/`translations`,
    /// `p`/`permutations`, `r`/`reflections`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => return Ok(Symmetry::ALL),
            "none" | "" => return Ok(Symmetry::NONE),
            _ => {}
        }
        let mut sym = Symmetry::NONE;
        for flag in s.split(',').map(str::trim) {
            match flag {
                "t" | "translations" => sym.translations = true,
                "p" | "permutations" => sym.permutations = true,
                "r" | "reflections" => sym.reflections = true,
                other => return Err(Error::Parse(format!("unknown symmetry flag {other:?}"))),
            }
        }
        Ok(sym)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub symmetry: Symmetry,
    pub cell_budget: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { symmetry: Symmetry::ALL, cell_budget: DEFAULT_CELL_BUDGET, jobs: None }
    }
}

impl SearchOptions {
    pub fn with_symmetry(symmetry: Symmetry) -> Self {
        SearchOptions { symmetry, ..Default::default() }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Precondition(format!("cannot start {n} workers: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

fn check_budget(spec: &TorusSpec, budget: usize) -> Result<()> {
    let cells = spec.cell_count();
    if cells > budget {
        return Err(Error::BudgetExceeded { cells, budget });
    }
    Ok(())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The symmetry group acting on start cells, by row-major index.
///
/// Each point transform is an axis permutation `y[i] = x[perm[i]]` among
/// axes with equal `(m_i, q_i)`, followed by reflections; reflecting axis
/// `i` sends the cube `[s, s + q_i)` to `[-s - q_i, -s)`. Translations act
/// on top of these.
pub(crate) struct Group {
    translations: bool,
    dim: usize,
    lens: Vec<u32>,
    strides: Vec<u32>,
    /// `coords[x * dim + i]` is coordinate `i` of cell `x`.
    coords: Vec<u32>,
    /// Per point transform, the image of every start cell.
    maps: Vec<Vec<u32>>,
}

impl Group {
    pub(crate) fn new(spec: &TorusSpec, sym: Symmetry) -> Self {
        let d = spec.dim();
        let cells = spec.cell_count();
        let lens: Vec<u32> = spec.shape().iter().map(|&l| l as u32).collect();
        let mut strides = vec![1u32; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * lens[i + 1];
        }
        let coords: Vec<u32> = (0..cells).flat_map(|x| spec.cell_of(x)).map(|c| c as u32).collect();
        let perms: Vec<Vec<usize>> = if sym.permutations {
            permutations(d)
                .into_iter()
                .filter(|p| p.iter().enumerate().all(|(i, &j)| spec.m()[i] == spec.m()[j] && spec.q()[i] == spec.q()[j]))
                .collect()
        } else {
            vec![(0..d).collect()]
        };
        let masks = if sym.reflections { 1usize << d } else { 1 };
        let mut maps = Vec::with_capacity(perms.len() * masks);
        for perm in &perms {
            for mask in 0..masks {
                let map = (0..cells)
                    .map(|x| {
                        (0..d)
                            .map(|i| {
                                let v = coords[x * d + perm[i]];
                                let len = lens[i];
                                let v = if mask >> i & 1 == 1 { (2 * len - v - spec.q()[i] as u32) % len } else { v };
                                v * strides[i]
                            })
                            .sum()
                    })
                    .collect();
                maps.push(map);
            }
        }
        Group { translations: sym.translations, dim: d, lens, strides, coords, maps }
    }

    /// `x - t` coordinatewise.
    fn sub(&self, x: u32, t: u32) -> u32 {
        let (x, t) = (x as usize * self.dim, t as usize * self.dim);
        (0..self.dim)
            .map(|i| {
                let v = self.coords[x + i] + self.lens[i] - self.coords[t + i];
                let v = if v >= self.lens[i] { v - self.lens[i] } else { v };
                v * self.strides[i]
            })
            .sum()
    }

    /// `x + t` coordinatewise.
    fn add(&self, x: u32, t: u32) -> u32 {
        let (x, t) = (x as usize * self.dim, t as usize * self.dim);
        (0..self.dim)
            .map(|i| {
                let v = self.coords[x + i] + self.coords[t + i];
                let v = if v >= self.lens[i] { v - self.lens[i] } else { v };
                v * self.strides[i]
            })
            .sum()
    }

    /// Is the sorted start list the least in its orbit? With translations
    /// the least list begins with the origin, so only translations taking
    /// some start to the origin compete, and most are ruled out by their
    /// second smallest start alone.
    pub(crate) fn is_canonical(&self, cur: &[u32]) -> bool {
        let mut img = Vec::with_capacity(cur.len());
        let mut cand = Vec::with_capacity(cur.len());
        if self.translations && cur.first() != Some(&0) {
            return false;
        }
        for map in &self.maps {
            img.clear();
            img.extend(cur.iter().map(|&x| map[x as usize]));
            if !self.translations {
                img.sort_unstable();
                if img.as_slice() < cur {
                    return false;
                }
                continue;
            }
            if cur.len() == 1 {
                continue;
            }
            for &t in &img {
                let second = img.iter().filter(|&&x| x != t).map(|&x| self.sub(x, t)).min().expect("two starts");
                if second > cur[1] {
                    continue;
                }
                if second < cur[1] {
                    return false;
                }
                cand.clear();
                cand.extend(img.iter().map(|&x| self.sub(x, t)));
                cand.sort_unstable();
                if cand.as_slice() < cur {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn canonical(&self, cur: &[u32]) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for map in &self.maps {
            let img: Vec<u32> = cur.iter().map(|&x| map[x as usize]).collect();
            let shifts: Vec<Option<u32>> =
                if self.translations { img.iter().map(|&t| Some(t)).collect() } else { vec![None] };
            for t in shifts {
                let mut cand: Vec<u32> = img.iter().map(|&x| t.map_or(x, |t| self.sub(x, t))).collect();
                cand.sort_unstable();
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.expect("group contains the identity")
    }

    pub(crate) fn orbit(&self, cur: &[u32]) -> BTreeSet<Vec<u32>> {
        let cells = self.coords.len() / self.dim.max(1);
        let shifts: Vec<u32> = if self.translations { (0..cells as u32).collect() } else { vec![0] };
        let mut out = BTreeSet::new();
        for map in &self.maps {
            let img: Vec<u32> = cur.iter().map(|&x| map[x as usize]).collect();
            for &t in &shifts {
                let mut cand: Vec<u32> = img.iter().map(|&x| self.add(x, t)).collect();
                cand.sort_unstable();
                out.insert(cand);
            }
        }
        out
    }
}

fn indices(t: &TorusTiling) -> Vec<u32> {
    let spec = t.spec();
    let mut v: Vec<u32> = t.starts().iter().map(|s| spec.cell_index(s) as u32).collect();
    v.sort_unstable();
    v
}

fn from_indices(spec: &TorusSpec, idx: &[u32]) -> TorusTiling {
    TorusTiling::from_sorted(spec.clone(), idx.iter().map(|&x| spec.cell_of(x as usize)).collect())
}

/// Least member of the orbit of `t` under `symmetry`, comparing sorted
/// start lists lexicographically.
pub fn canonical_form(t: &TorusTiling, symmetry: Symmetry) -> Result<TorusTiling> {
    if let Err(d) = crate::torus::check_tiling(t) {
        return Err(Error::InvalidTiling(d.to_string()));
    }
    let group = Group::new(t.spec(), symmetry);
    Ok(from_indices(t.spec(), &group.canonical(&indices(t))))
}

/// Every distinct image of `t` under the group generated by `symmetry`.
pub fn orbit(t: &TorusTiling, symmetry: Symmetry) -> Vec<TorusTiling> {
    let group = Group::new(t.spec(), symmetry);
    group.orbit(&indices(t)).iter().map(|idx| from_indices(t.spec(), idx)).collect()
}

/// [`orbit`] as sorted lists of row-major start indices.
pub fn orbit_starts(t: &TorusTiling, symmetry: Symmetry) -> BTreeSet<Vec<u32>> {
    Group::new(t.spec(), symmetry).orbit(&indices(t))
}

/// Precomputed cube masks and covering lists for the exact-cover search.
struct Board {
    spec: TorusSpec,
    words: usize,
    cubes: usize,
    /// `masks[s * words..(s + 1) * words]` is the cube starting at cell `s`.
    masks: Vec<u64>,
    /// Starts of the cubes containing each cell, ascending.
    covers: Vec<Vec<u32>>,
}

#[derive(Clone)]
struct Node {
    covered: Vec<u64>,
    chosen: Vec<u32>,
}

impl Board {
    fn new(spec: &TorusSpec) -> Self {
        let cells = spec.cell_count();
        let words = cells.div_ceil(64);
        let mut masks = vec![0u64; cells * words];
        let mut covers = vec![Vec::new(); cells];
        for s in 0..cells {
            for c in spec.cube_cells(&spec.cell_of(s)) {
                masks[s * words + c / 64] |= 1 << (c % 64);
                covers[c].push(s as u32);
            }
        }
        Board { spec: spec.clone(), words, cubes: spec.cube_count(), masks, covers }
    }

    fn root(&self, fix_origin: bool) -> Node {
        let mut covered = vec![0u64; self.words];
        let cells = self.spec.cell_count();
        // Padding bits past the last cell count as covered.
        if !cells.is_multiple_of(64) {
            covered[self.words - 1] = !0u64 << (cells % 64);
        }
        let mut node = Node { covered, chosen: Vec::with_capacity(self.cubes) };
        if fix_origin {
            self.place(&mut node, 0);
        }
        node
    }

    fn mask(&self, s: u32) -> &[u64] {
        let s = s as usize;
        &self.masks[s * self.words..(s + 1) * self.words]
    }

    fn fits(&self, covered: &[u64], s: u32) -> bool {
        self.mask(s).iter().zip(covered).all(|(m, c)| m & c == 0)
    }

    fn place(&self, node: &mut Node, s: u32) {
        for (c, m) in node.covered.iter_mut().zip(self.mask(s)) {
            *c |= m;
        }
        node.chosen.push(s);
    }

    fn unplace(&self, node: &mut Node) {
        let s = node.chosen.pop().expect("nonempty");
        for (c, m) in node.covered.iter_mut().zip(self.mask(s)) {
            *c &= !m;
        }
    }

    fn least_uncovered(&self, covered: &[u64]) -> Option<usize> {
        covered.iter().position(|&w| w != !0).map(|i| i * 64 + (!covered[i]).trailing_zeros() as usize)
    }

    fn children(&self, node: &Node) -> Vec<Node> {
        match self.least_uncovered(&node.covered) {
            None => vec![node.clone()],
            Some(c) => self.covers[c]
                .iter()
                .filter(|&&s| self.fits(&node.covered, s))
                .map(|&s| {
                    let mut child = node.clone();
                    self.place(&mut child, s);
                    child
                })
                .collect(),
        }
    }

    /// Expands the tree breadth-first until there are enough prefixes.
    fn prefixes(&self, root: Node) -> Vec<Node> {
        let mut frontier = vec![root];
        loop {
            if frontier.len() >= TARGET_PREFIXES || frontier.iter().all(|n| n.chosen.len() == self.cubes) {
                return frontier;
            }
            frontier = frontier.iter().flat_map(|n| self.children(n)).collect();
            if frontier.is_empty() {
                return frontier;
            }
        }
    }

    fn dfs(&self, node: &mut Node, visit: &mut dyn FnMut(&[u32])) {
        let Some(c) = self.least_uncovered(&node.covered) else {
            visit(&node.chosen);
            return;
        };
        for &s in &self.covers[c] {
            if self.fits(&node.covered, s) {
                self.place(node, s);
                self.dfs(node, visit);
                self.unplace(node);
            }
        }
    }
}

/// All tilings of `spec`, one per orbit of the enabled symmetry group, in
/// a deterministic order.
pub fn enumerate_tilings(spec: &TorusSpec, opts: &SearchOptions) -> Result<Vec<TorusTiling>> {
    check_budget(spec, opts.cell_budget)?;
    let sym = opts.symmetry;
    let board = Board::new(spec);
    let group = Group::new(spec, sym);
    let reduce = sym != Symmetry::NONE;
    let prefixes = board.prefixes(board.root(sym.translations));
    log::debug!("{spec}: {} search prefixes", prefixes.len());
    opts.run(|| {
        prefixes
            .into_par_iter()
            .map(|mut node| {
                let mut found = Vec::new();
                let mut sorted = Vec::with_capacity(board.cubes);
                board.dfs(&mut node, &mut |chosen| {
                    sorted.clear();
                    sorted.extend_from_slice(chosen);
                    sorted.sort_unstable();
                    if !reduce || group.is_canonical(&sorted) {
                        found.push(from_indices(spec, &sorted));
                    }
                });
                found
            })
            .flatten()
            .collect()
    })
}

/// Independent slow enumerator without symmetry: sets of pairwise disjoint
/// cubes taken in increasing start order, checked cell by cell. A branch is
/// dropped once some uncovered cell has no untried start covering it.
pub fn brute_force_tilings(spec: &TorusSpec, cell_limit: usize) -> Result<Vec<TorusTiling>> {
    check_budget(spec, cell_limit)?;
    let cells = spec.cell_count();
    let cube_cells: Vec<Vec<usize>> = (0..cells).map(|s| spec.cube_cells(&spec.cell_of(s))).collect();
    let mut last_cover = vec![0usize; cells];
    for (s, cube) in cube_cells.iter().enumerate() {
        for &c in cube {
            last_cover[c] = last_cover[c].max(s);
        }
    }
    let mut search = Brute {
        need: spec.cube_count(),
        cube_cells,
        last_cover,
        grid: vec![false; cells],
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.go(0);
    Ok(search
        .out
        .into_iter()
        .map(|c| {
            let starts = c.into_iter().map(|s| spec.cell_of(s)).collect();
            TorusTiling::new(spec.clone(), starts).expect("starts in range")
        })
        .collect())
}

struct Brute {
    need: usize,
    cube_cells: Vec<Vec<usize>>,
    last_cover: Vec<usize>,
    grid: Vec<bool>,
    chosen: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl Brute {
    fn go(&mut self, next: usize) {
        if self.chosen.len() == self.need {
            if self.grid.iter().all(|&c| c) {
                self.out.push(self.chosen.clone());
            }
            return;
        }
        let stranded = self.grid.iter().zip(&self.last_cover).any(|(&covered, &last)| !covered && last < next);
        if stranded {
            return;
        }
        for s in next..self.cube_cells.len() {
            if self.cube_cells[s].iter().all(|&c| !self.grid[c]) {
                self.set(s, true);
                self.chosen.push(s);
                self.go(s + 1);
                self.chosen.pop();
                self.set(s, false);
            }
        }
    }

    fn set(&mut self, s: usize, value: bool) {
        for &c in &self.cube_cells[s] {
            self.grid[c] = value;
        }
    }
}

/// Per-tiling quantities gathered by a census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingAnalysis {
    pub p_per_axis: Vec<usize>,
    pub p_total: usize,
    pub c_total: usize,
    pub size: usize,
    /// `c(G) = |G| - 1` on the bridged family.
    pub equality: bool,
    pub is_multipile: bool,
}

/// Bridges a tiling and checks every proved statement about it, returning
/// [`Error::TheoremViolation`] if any fails.
pub fn analyze_tiling(t: &TorusTiling) -> Result<TilingAnalysis> {
    let spec = t.spec();
    let violation = |what: String| Err(Error::TheoremViolation(format!("{spec} {:?}: {what}", t.starts())));
    let p = p_params_unchecked(t);
    let family = to_box_family_unchecked(t);
    if !is_keller_unchecked(family.boxes()) {
        return violation("bridged family is not Keller".into());
    }
    let stats = c_stats_unchecked(&family);
    for (i, set) in p.per_axis.iter().enumerate() {
        if stats.c_per_axis[i] != (spec.m()[i] - 1) * set.len() {
            return violation(format!("c_{i} = {} but (m_{i} - 1)|p_{i}| = {}", stats.c_per_axis[i], (spec.m()[i] - 1) * set.len()));
        }
    }
    let b = theorem_b_from_stats(&stats, family.len());
    let verdict = is_multipile_unchecked(&family).verdict;
    if !b.inequality_holds {
        return violation(format!("c = {} exceeds |G| - 1 = {}", b.c, b.size - 1));
    }
    if b.equality != verdict {
        return violation(format!("c-equality {} but multipile {verdict}", b.equality));
    }
    if let Some(n) = spec.uniform_m() {
        let bound = (n.pow(spec.dim() as u32) - 1) / (n - 1);
        if p.total > bound || (p.total == bound) != verdict {
            return violation(format!("p = {} against bound {bound} with multipile {verdict}", p.total));
        }
    }
    match verify_box_count_unchecked(&family) {
        Ok(r) if r.holds && r.box_count == spec.cube_count() => {}
        Ok(r) => return violation(format!("hat measures sum to {} over {} boxes", r.measure_sum, r.box_count)),
        Err(e) => return violation(e.to_string()),
    }
    Ok(TilingAnalysis {
        p_per_axis: p.per_axis.iter().map(Vec::len).collect(),
        p_total: p.total,
        c_total: stats.c_total,
        size: family.len(),
        equality: b.equality,
        is_multipile: verdict,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `(n^d - 1)/(n - 1)` for uniform `m`.
    Theorem,
    /// Largest `1 + m_{i1} + m_{i1} m_{i2} + ...` over orderings, for mixed
    /// `m`; not known to be a bound.
    Conjectural,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub m: Vec<usize>,
    pub q: Vec<usize>,
    pub symmetry: String,
    /// Canonical tilings found, complete at resolution `q`.
    pub tilings_total: usize,
    pub p_histogram: BTreeMap<usize, usize>,
    pub max_p: usize,
    pub bound: usize,
    pub bound_kind: BoundKind,
    /// Tilings whose bridged family has `c(G) = |G| - 1`.
    pub equality_count: usize,
    pub multipile_count: usize,
    pub max_p_count: usize,
    pub max_p_multipile_count: usize,
}

pub const CSV_HEADER: &str = "m,q,symmetry,total,max_p,bound,equality,multipiles";

impl CensusRow {
    pub fn csv_line(&self) -> String {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join("x");
        format!(
            "{},{},{},{},{},{},{},{}",
            join(&self.m),
            join(&self.q),
            self.symmetry,
            self.tilings_total,
            self.max_p,
            self.bound,
            self.equality_count,
            self.multipile_count
        )
    }
}

/// A census together with the tilings and per-tiling results behind it.
#[derive(Clone, Debug)]
pub struct Census {
    pub row: CensusRow,
    pub tilings: Vec<TorusTiling>,
    pub analyses: Vec<TilingAnalysis>,
}

pub fn census(spec: &TorusSpec, opts: &SearchOptions) -> Result<CensusRow> {
    census_with_tilings(spec, opts).map(|c| c.row)
}

pub fn census_with_tilings(spec: &TorusSpec, opts: &SearchOptions) -> Result<Census> {
    let tilings = enumerate_tilings(spec, opts)?;
    let analyses: Vec<TilingAnalysis> = opts.run(|| tilings.par_iter().map(analyze_tiling).collect::<Result<_>>())??;
    let (bound, bound_kind) = match spec.uniform_m() {
        Some(n) => ((n.pow(spec.dim() as u32) - 1) / (n - 1), BoundKind::Theorem),
        None => (max_extremal_p_value(spec.m()), BoundKind::Conjectural),
    };
    let mut p_histogram = BTreeMap::new();
    for a in &analyses {
        *p_histogram.entry(a.p_total).or_insert(0) += 1;
    }
    let max_p = p_histogram.keys().next_back().copied().unwrap_or(0);
    let at_max = analyses.iter().filter(|a| a.p_total == max_p);
    let row = CensusRow {
        m: spec.m().to_vec(),
        q: spec.q().to_vec(),
        symmetry: opts.symmetry.to_string(),
        tilings_total: tilings.len(),
        p_histogram,
        max_p,
        bound,
        bound_kind,
        equality_count: analyses.iter().filter(|a| a.equality).count(),
        multipile_count: analyses.iter().filter(|a| a.is_multipile).count(),
        max_p_count: at_max.clone().count(),
        max_p_multipile_count: at_max.filter(|a| a.is_multipile).count(),
    };
    if row.equality_count != row.multipile_count {
        return Err(Error::TheoremViolation(format!("{spec}: equality count differs from multipile count")));
    }
    if bound_kind == BoundKind::Theorem && max_p > bound {
        return Err(Error::TheoremViolation(format!("{spec}: max p = {max_p} exceeds {bound}")));
    }
    Ok(Census { row, tilings, analyses })
}
