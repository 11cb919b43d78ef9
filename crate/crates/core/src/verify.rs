//! The acceptance criteria as runnable checks, shared by the `acceptance`
//! test target and the `verify` command.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::enumeration::{brute_force_tilings, census_with_tilings, enumerate_tilings, orbit_starts, Census, SearchOptions, Symmetry, DEFAULT_CELL_BUDGET};
use crate::error::{Error, Result};
use crate::hat::{hat, hats_disjoint, verify_box_count, HatSpace};
use crate::keller::{classify_partition, keller_pair, realize, theorem_b_report, BoxFamily, DBox, Factor, PartitionStatus};
use crate::multipile::{extremal_p_value, is_multipile};
use crate::partition::{arc_system, binary_system, PartitionSystem};
use crate::random::{Generator, SystemShape};
use crate::torus::{laminated_construction, p_params, staircase_recipe, theorem_c_report, to_box_family, validate_tiling, TorusSpec};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Workers for the censuses; the three-dimensional census uses at least 4.
    pub jobs: Option<usize>,
    pub cell_budget: usize,
    pub random_families: usize,
    pub suit_pairs: usize,
    /// Largest cell count for the brute-force comparison.
    pub slow_path_cells: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0x6b656c6c6572,
            jobs: None,
            cell_budget: DEFAULT_CELL_BUDGET,
            random_families: 10_000,
            suit_pairs: 1_000,
            slow_path_cells: 64,
        }
    }
}

/// Time limits, fixed here so reports can quote them.
pub const SMALL_CENSUS_LIMIT: Duration = Duration::from_secs(1);
pub const CUBE_CENSUS_LIMIT: Duration = Duration::from_secs(600);

pub const TITLES: [&str; 9] = [
    "bound n=2 d=2: census m=(2,2) q=(2,2)",
    "bound n=2 d=3: census m=(2,2,2) q=(4,4,4)",
    "bound n=3 d=2: censuses m=(3,3) q=(3,3),(9,9) and a lamination witness",
    "c(G) <= |G| - 1 with equality exactly for multipiles",
    "hat measures sum to 1 and |G| = prod m_i",
    "hat disjointness equals Keller's condition",
    "exposed and hidden partitions survive pile rewrites",
    "mixed m=(2,3) q=(6,6) evidence run",
    "symmetry-reduced enumeration matches brute force up to 64 cells",
];

/// Runs criteria and caches censuses between them.
pub struct Suite {
    cfg: VerifyConfig,
    censuses: Mutex<BTreeMap<TorusSpec, Arc<(Census, Duration)>>>,
}

fn spec(m: &[usize], q: &[usize]) -> TorusSpec {
    TorusSpec::new(m.to_vec(), q.to_vec()).expect("fixed specs are valid")
}

impl Suite {
    pub fn new(cfg: VerifyConfig) -> Self {
        Suite { cfg, censuses: Mutex::new(BTreeMap::new()) }
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.cfg
    }

    fn census(&self, spec: &TorusSpec, min_jobs: usize) -> Result<Arc<(Census, Duration)>> {
        if let Some(c) = self.censuses.lock().expect("not poisoned").get(spec) {
            return Ok(c.clone());
        }
        let jobs = self.cfg.jobs.map(|j| j.max(min_jobs)).or((min_jobs > 1).then_some(min_jobs));
        let opts = SearchOptions { symmetry: Symmetry::ALL, cell_budget: self.cfg.cell_budget, jobs };
        let start = Instant::now();
        let census = census_with_tilings(spec, &opts)?;
        let entry = Arc::new((census, start.elapsed()));
        self.censuses.lock().expect("not poisoned").insert(spec.clone(), entry.clone());
        Ok(entry)
    }

    /// Census specs of criteria 1 to 3.
    fn theorem_specs() -> Vec<(TorusSpec, usize)> {
        vec![
            (spec(&[2, 2], &[2, 2]), 1),
            (spec(&[2, 2, 2], &[4, 4, 4]), 4),
            (spec(&[3, 3], &[3, 3]), 1),
            (spec(&[3, 3], &[9, 9]), 1),
        ]
    }

    pub fn run(&self, id: u8) -> Outcome {
        let start = Instant::now();
        let result = match id {
            1 => self.criterion_1(),
            2 => self.criterion_2(),
            3 => self.criterion_3(),
            4 => self.criterion_4(),
            5 => self.criterion_5(),
            6 => self.criterion_6(),
            7 => self.criterion_7(),
            8 => self.criterion_8(),
            9 => self.criterion_9(),
            _ => Err(Error::IndexOutOfRange(format!("criterion {id}"))),
        };
        let (passed, detail) = match result {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        let title = TITLES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown");
        Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        (1..=9).map(|id| self.run(id)).collect()
    }

    /// Shared by criteria 1 and 2: max p equals the bound, and a tiling
    /// attains it exactly when its bridged family is a multipile.
    fn extremal_census(&self, spec: &TorusSpec, min_jobs: usize, limit: Duration) -> Result<(bool, String)> {
        let entry = self.census(spec, min_jobs)?;
        let (census, elapsed) = (&entry.0, entry.1);
        let row = &census.row;
        let mismatches = census.analyses.iter().filter(|a| (a.p_total == row.bound) != a.is_multipile).count();
        let passed = elapsed < limit && row.max_p == row.bound && mismatches == 0 && row.max_p_count == row.multipile_count;
        Ok((
            passed,
            format!(
                "{} canonical tilings in {:.3}s (limit {}s); max p = {} vs bound {}; {} extremal, {} multipiles, {} mismatches; histogram {:?}",
                row.tilings_total,
                elapsed.as_secs_f64(),
                limit.as_secs(),
                row.max_p,
                row.bound,
                row.max_p_count,
                row.multipile_count,
                mismatches,
                row.p_histogram
            ),
        ))
    }

    pub fn criterion_1(&self) -> Result<(bool, String)> {
        self.extremal_census(&spec(&[2, 2], &[2, 2]), 1, SMALL_CENSUS_LIMIT)
    }

    pub fn criterion_2(&self) -> Result<(bool, String)> {
        self.extremal_census(&spec(&[2, 2, 2], &[4, 4, 4]), 4, CUBE_CENSUS_LIMIT)
    }

    pub fn criterion_3(&self) -> Result<(bool, String)> {
        let mut passed = true;
        let mut parts = Vec::new();
        for q in [3, 9] {
            let s = spec(&[3, 3], &[q, q]);
            match self.census(&s, 1) {
                Ok(entry) => {
                    let row = &entry.0.row;
                    passed &= row.max_p <= 4;
                    parts.push(format!("q={q}: {} tilings, max p = {}", row.tilings_total, row.max_p));
                }
                Err(Error::BudgetExceeded { cells, budget }) if q == 9 => {
                    parts.push(format!("q=9 skipped: {cells} cells over budget {budget}"));
                }
                Err(e) => return Err(e),
            }
        }
        let s = spec(&[3, 3], &[3, 3]);
        let witness = laminated_construction(&s, &staircase_recipe(&s, &[0, 1])?)?;
        let report = theorem_c_report(&witness)?;
        passed &= report.p_total == 4 && report.equality && report.is_multipile;
        parts.push(format!("lamination witness {:?} has p = {}", witness.starts(), report.p_total));
        Ok((passed, parts.join("; ")))
    }

    pub fn criterion_4(&self) -> Result<(bool, String)> {
        let mut census_checked = 0;
        let mut violations = 0;
        let mut discrepancies = 0;
        let mut tally = |g: &BoxFamily| -> Result<bool> {
            let b = theorem_b_report(g)?;
            let m = is_multipile(g)?.verdict;
            violations += usize::from(!b.inequality_holds);
            discrepancies += usize::from(b.equality != m);
            Ok(b.equality)
        };
        for (s, jobs) in Self::theorem_specs() {
            let entry = self.census(&s, jobs)?;
            for t in &entry.0.tilings {
                tally(&to_box_family(t)?)?;
                census_checked += 1;
            }
        }
        let mut gen = Generator::new(self.cfg.seed);
        let shape = SystemShape::default();
        let mut equalities = 0;
        for _ in 0..self.cfg.random_families {
            let system = Arc::new(gen.system(&shape));
            let g = gen.keller_family(&system);
            equalities += usize::from(tally(&g)?);
        }
        Ok((
            violations == 0 && discrepancies == 0 && self.cfg.random_families >= 10_000,
            format!(
                "{census_checked} census families and {} random families ({equalities} with equality); {violations} violations, {discrepancies} equality/multipile discrepancies",
                self.cfg.random_families
            ),
        ))
    }

    pub fn criterion_5(&self) -> Result<(bool, String)> {
        let mut checked = 0;
        let mut failures = Vec::new();
        let mut specs = Self::theorem_specs();
        specs.push((spec(&[2, 3], &[6, 6]), 1));
        for (s, jobs) in specs {
            let entry = self.census(&s, jobs)?;
            for t in &entry.0.tilings {
                let r = verify_box_count(&to_box_family(t)?)?;
                checked += 1;
                if !(r.holds && r.measure_sum.to_string() == "1/1" && r.implied_size == Some(s.cube_count()) && r.box_count == s.cube_count()) {
                    failures.push(format!("{s} {:?}", t.starts()));
                }
            }
        }
        let system = Arc::new(binary_system(&[2, 2], &[vec![vec![0]], vec![vec![0]]])?);
        let boxes = (0..2).flat_map(|a| (0..2).map(move |b| DBox::new(vec![Factor::part(0, a), Factor::part(0, b)]))).collect();
        let r = verify_box_count(&BoxFamily::new(system, boxes)?)?;
        let binary_ok = r.holds && r.implied_size == Some(4) && r.box_count == 4 && r.measure_sum.to_string() == "1/1";
        Ok((
            failures.is_empty() && binary_ok,
            format!(
                "{checked} tiling families sum to 1/1 with |G| = prod m_i, {} failures {:?}; 2x2 binary example: sum {}, |G| = {} = {:?}",
                failures.len(),
                failures.iter().take(3).collect::<Vec<_>>(),
                r.measure_sum,
                r.box_count,
                r.implied_size
            ),
        ))
    }

    pub fn criterion_6(&self) -> Result<(bool, String)> {
        let mut parts = Vec::new();
        let mut total_mismatches = 0;
        for n in [2, 3] {
            let system = arc_system(n, 2, 2)?;
            let boxes = all_boxes(&system);
            let space = HatSpace::full(&system);
            let images = boxes
                .iter()
                .map(|k| Ok((hat(&system, k)?, space.materialize(&hat(&system, k)?))))
                .collect::<Result<Vec<_>>>()?;
            let mut pairs = 0;
            let mut mismatches = 0;
            for j in 0..boxes.len() {
                for i in 0..j {
                    pairs += 1;
                    let keller = keller_pair(&boxes[i], &boxes[j]);
                    let symbolic = hats_disjoint(&images[i].0, &images[j].0)?;
                    let points = images[i].1.bits().is_disjoint(images[j].1.bits());
                    mismatches += usize::from(symbolic != keller || points != keller);
                }
            }
            total_mismatches += mismatches;
            parts.push(format!("arc_system({n},2,2): {} boxes, {pairs} pairs, {mismatches} mismatches", boxes.len()));
        }
        Ok((total_mismatches == 0, parts.join("; ")))
    }

    pub fn criterion_7(&self) -> Result<(bool, String)> {
        let mut gen = Generator::new(self.cfg.seed ^ 7);
        let mut starts: Vec<BoxFamily> = Vec::new();
        for (s, jobs) in Self::theorem_specs() {
            let entry = self.census(&s, jobs)?;
            for t in &entry.0.tilings {
                starts.push(to_box_family(t)?);
            }
        }
        let mut pairs = 0;
        let mut exposed_lost = 0;
        let mut hidden_lost = 0;
        let mut not_suits = 0;
        let mut round = 0;
        while pairs < self.cfg.suit_pairs || round == 0 {
            for g in &starts {
                let base = if round == 0 { g.clone() } else { gen.subfamily(g) };
                let chain = gen.rewrite_chain(&base, 6);
                let realized: Vec<_> = chain.iter().map(realize).collect();
                for j in 0..chain.len() {
                    for i in 0..j {
                        pairs += 1;
                        if realized[i] != realized[j] {
                            not_suits += 1;
                            continue;
                        }
                        let (a, h) = rewrite_violations(&chain[i], &chain[j])?;
                        exposed_lost += a;
                        hidden_lost += h;
                    }
                }
            }
            round += 1;
            if round > 100 {
                break;
            }
        }
        Ok((
            pairs >= self.cfg.suit_pairs && exposed_lost == 0 && hidden_lost == 0 && not_suits == 0,
            format!(
                "{pairs} suit pairs from {} census families over {round} rounds; {exposed_lost} exposed-preservation and {hidden_lost} hidden-preservation violations; {not_suits} pairs with different polyboxes",
                starts.len()
            ),
        ))
    }

    pub fn criterion_8(&self) -> Result<(bool, String)> {
        let s = spec(&[2, 3], &[6, 6]);
        let entry = self.census(&s, 1)?;
        let census = &entry.0;
        let row = &census.row;
        let predicted = extremal_p_value(s.m(), &[1, 0])?;
        let attaining: Vec<(usize, bool)> = census
            .analyses
            .iter()
            .enumerate()
            .filter(|(_, a)| a.p_total == row.max_p)
            .map(|(i, a)| (i, a.is_multipile))
            .collect();
        let mut integrity = attaining.len() == row.max_p_count
            && attaining.iter().filter(|(_, m)| *m).count() == row.max_p_multipile_count
            && row.bound == predicted
            && row.tilings_total == census.tilings.len();
        for &(i, _) in &attaining {
            integrity &= p_params(&census.tilings[i])?.total == row.max_p;
        }
        let verdicts: Vec<String> = attaining
            .iter()
            .map(|&(i, m)| format!("{:?}:{}", census.tilings[i].starts(), if m { "multipile" } else { "not multipile" }))
            .collect();
        Ok((
            integrity,
            format!(
                "{} tilings; observed max p = {} vs 1 + m_(1) = {predicted} (conjectural); {} attaining, {} multipiles: [{}]",
                row.tilings_total,
                row.max_p,
                row.max_p_count,
                row.max_p_multipile_count,
                verdicts.join(", ")
            ),
        ))
    }

    pub fn criterion_9(&self) -> Result<(bool, String)> {
        let specs = small_specs(self.cfg.slow_path_cells, 3);
        let mut failures = Vec::new();
        let mut tilings = 0;
        for s in &specs {
            let index = |t: &crate::torus::TorusTiling| -> Vec<u32> {
                t.starts().iter().map(|c| s.cell_index(c) as u32).collect()
            };
            let mut brute: Vec<Vec<u32>> = brute_force_tilings(s, self.cfg.slow_path_cells)?.iter().map(index).collect();
            brute.sort();
            tilings += brute.len();
            let opts = SearchOptions { symmetry: Symmetry::ALL, cell_budget: self.cfg.slow_path_cells, jobs: Some(1) };
            let reps = enumerate_tilings(s, &opts)?;
            let mut expanded: Vec<Vec<u32>> = reps.iter().flat_map(|t| orbit_starts(t, Symmetry::ALL)).collect();
            expanded.sort();
            if expanded != brute || reps.iter().any(|t| !validate_tiling(t)) {
                failures.push(s.to_string());
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{} specs with d <= 3 and at most {} cells, {tilings} tilings in total; mismatches: {:?}",
                specs.len(),
                self.cfg.slow_path_cells,
                failures
            ),
        ))
    }
}

/// Every box of a system: per axis the full axis or any block of any
/// nontrivial partition.
pub fn all_boxes(system: &PartitionSystem) -> Vec<DBox> {
    let mut out = vec![Vec::new()];
    for a in 0..system.dim() {
        let mut options = vec![Factor::Full];
        for p in system.axis(a).nontrivial() {
            options.extend((0..system.partition(a, p).len()).map(|b| Factor::part(p, b)));
        }
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Factor>| {
                options.iter().map(move |&f| {
                    let mut v = prefix.clone();
                    v.push(f);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(DBox::new).collect()
}

/// Counts of exposed-preservation and hidden-preservation failures between
/// two suits for one polybox, checked in both directions.
pub fn rewrite_violations(g: &BoxFamily, h: &BoxFamily) -> Result<(usize, usize)> {
    let system = g.system();
    let (mut a, mut hid) = (0, 0);
    for axis in 0..system.dim() {
        for p in system.axis(axis).nontrivial() {
            let sg = classify_partition(g, axis, p)?;
            let sh = classify_partition(h, axis, p)?;
            for (x, y) in [(sg, sh), (sh, sg)] {
                if x == PartitionStatus::Exposed && y != PartitionStatus::Exposed {
                    a += 1;
                }
                if x == PartitionStatus::Hidden && y.is_present() && y != PartitionStatus::Hidden {
                    hid += 1;
                }
            }
        }
    }
    Ok((a, hid))
}

/// Torus specs with `2 <= m_i`, at most `max_dim` axes and at most `cells`
/// cells, listed by dimension then lexicographically.
pub fn small_specs(cells: usize, max_dim: usize) -> Vec<TorusSpec> {
    let mut out = BTreeSet::new();
    fn go(prefix: &mut Vec<(usize, usize)>, left: usize, max_dim: usize, out: &mut BTreeSet<(usize, Vec<(usize, usize)>)>) {
        if !prefix.is_empty() {
            out.insert((prefix.len(), prefix.clone()));
        }
        if prefix.len() == max_dim {
            return;
        }
        for m in 2..=left {
            for q in 1..=left / m {
                prefix.push((m, q));
                go(prefix, left / (m * q), max_dim, out);
                prefix.pop();
            }
        }
    }
    go(&mut Vec::new(), cells, max_dim, &mut out);
    out.into_iter()
        .map(|(_, axes)| {
            let (m, q): (Vec<usize>, Vec<usize>) = axes.into_iter().unzip();
            TorusSpec::new(m, q).expect("valid by construction")
        })
        .filter(|s| s.cell_count() <= cells)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spec_listing() {
        let specs = small_specs(8, 3);
        assert!(specs.iter().all(|s| s.cell_count() <= 8));
        assert!(specs.contains(&spec(&[2, 2, 2], &[1, 1, 1])));
        assert!(specs.contains(&spec(&[2], &[4])));
        assert!(!specs.contains(&spec(&[3, 3], &[1, 1])));
    }

    #[test]
    fn all_boxes_counts() {
        assert_eq!(all_boxes(&arc_system(2, 2, 2).unwrap()).len(), 25);
        assert_eq!(all_boxes(&arc_system(3, 2, 2).unwrap()).len(), 49);
    }

    #[test]
    fn quick_criteria() {
        let suite = Suite::new(VerifyConfig::default());
        for id in [1, 6, 8] {
            let o = suite.run(id);
            assert!(o.passed, "{o:?}");
        }
    }
}
