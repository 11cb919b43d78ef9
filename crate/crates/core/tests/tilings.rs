use keller_core::enumeration::{
    brute_force_tilings, census, canonical_form, enumerate_tilings, orbit_starts, SearchOptions, Symmetry,
};
use keller_core::keller::c_stats;
use keller_core::multipile::{extremal_p_value, is_multipile};
use keller_core::torus::{
    laminated_construction, p_params, staircase_recipe, theorem_c_report, to_box_family, validate_tiling, Recipe,
};
use keller_core::verify::small_specs;
use keller_core::{TorusSpec, TorusTiling};

fn spec(m: &[usize], q: &[usize]) -> TorusSpec {
    TorusSpec::new(m.to_vec(), q.to_vec()).unwrap()
}

/// Orbit expansion of the reduced stream against the unreduced search, on
/// a spec too large for the brute-force enumerator.
#[test]
fn reduced_stream_expands_to_full_stream() {
    let s = spec(&[2, 2, 2], &[4, 4, 4]);
    let mut full: Vec<Vec<u32>> = enumerate_tilings(&s, &SearchOptions::with_symmetry(Symmetry::NONE))
        .unwrap()
        .iter()
        .map(|t| t.starts().iter().map(|c| s.cell_index(c) as u32).collect())
        .collect();
    full.sort();
    for sym in [Symmetry::ALL, "t".parse().unwrap(), "t,p".parse().unwrap(), "p,r".parse().unwrap()] {
        let mut expanded: Vec<Vec<u32>> = enumerate_tilings(&s, &SearchOptions::with_symmetry(sym))
            .unwrap()
            .iter()
            .flat_map(|t| orbit_starts(t, sym))
            .collect();
        expanded.sort();
        assert_eq!(expanded, full, "symmetry {sym}");
    }
}

#[test]
fn census_is_independent_of_workers() {
    let s = spec(&[2, 2, 2], &[4, 4, 4]);
    let rows: Vec<_> = [1, 2, 5]
        .into_iter()
        .map(|j| census(&s, &SearchOptions { jobs: Some(j), ..Default::default() }).unwrap())
        .collect();
    assert!(rows.windows(2).all(|w| w[0] == w[1]));
    let a = enumerate_tilings(&s, &SearchOptions { jobs: Some(1), ..Default::default() }).unwrap();
    let b = enumerate_tilings(&s, &SearchOptions { jobs: Some(3), ..Default::default() }).unwrap();
    assert_eq!(a, b);
}

/// The cube at its default resolution `q = 8`.
#[test]
fn cube_census_at_default_resolution() {
    let s = TorusSpec::with_default_q(vec![2, 2, 2]).unwrap();
    let row = census(&s, &SearchOptions::default()).unwrap();
    assert_eq!((row.max_p, row.bound), (7, 7));
    assert_eq!(row.max_p_count, row.multipile_count);
    assert_eq!(row.max_p_count, row.max_p_multipile_count);
}

#[test]
fn every_emitted_tiling_bridges_to_a_keller_family() {
    for s in [spec(&[3, 3], &[3, 3]), spec(&[2, 3], &[3, 2]), spec(&[2, 2, 2], &[2, 2, 2])] {
        for t in enumerate_tilings(&s, &SearchOptions::default()).unwrap() {
            assert!(validate_tiling(&t));
            let g = to_box_family(&t).unwrap();
            assert!(keller_core::keller::is_keller_family(&g).unwrap());
            let p = p_params(&t).unwrap();
            let stats = c_stats(&g).unwrap();
            for i in 0..s.dim() {
                assert_eq!(stats.c_per_axis[i], (s.m()[i] - 1) * p.per_axis[i].len());
            }
            assert_eq!(canonical_form(&t, Symmetry::ALL).unwrap(), t);
        }
    }
}

#[test]
fn staircases_attain_every_ordering() {
    for m in [vec![2, 2], vec![3, 2], vec![2, 3, 2], vec![3, 2, 2]] {
        let s = TorusSpec::with_default_q(m.clone()).unwrap();
        let d = m.len();
        let mut orders: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..d {
            orders = orders
                .into_iter()
                .flat_map(|o| {
                    let rest: Vec<usize> = (0..d).filter(|i| !o.contains(i)).collect();
                    rest.into_iter().map(move |i| [o.clone(), vec![i]].concat())
                })
                .collect();
        }
        for order in orders {
            let t = laminated_construction(&s, &staircase_recipe(&s, &order).unwrap()).unwrap();
            assert_eq!(p_params(&t).unwrap().total, extremal_p_value(&m, &order).unwrap());
            assert!(is_multipile(&to_box_family(&t).unwrap()).unwrap().verdict);
        }
    }
}

/// For mixed `m` a multipile need not split axes in the same order along
/// every branch, and then `p(T)` matches no ordering formula. Here the first
/// slab splits axis 1 then axis 2 and the second slab the reverse.
#[test]
fn mixed_branch_orders_leave_the_ordering_formula() {
    let m = [2, 3, 5];
    let s = spec(&m, &[1, 6, 4]);
    let leaves = |n| vec![Recipe::cube(); n];
    let first = Recipe::split(1, 0, (0..3).map(|k| Recipe::split(2, k, leaves(5))).collect());
    let second = Recipe::split(2, 3, (0..5).map(|k| Recipe::split(1, k + 1, leaves(3))).collect());
    let t = laminated_construction(&s, &Recipe::split(0, 0, vec![first, second])).unwrap();
    assert_eq!(t.len(), 30);
    let g = to_box_family(&t).unwrap();
    let verdict = is_multipile(&g).unwrap();
    assert!(verdict.verdict);
    assert_eq!(verdict.tree.unwrap().level_axes(), None);
    let p = p_params(&t).unwrap().total;
    assert_eq!(p, 1 + 6 + 4);
    let formulas: Vec<usize> = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
        .iter()
        .map(|o| extremal_p_value(&m, o).unwrap())
        .collect();
    assert_eq!(formulas, vec![9, 13, 10, 19, 16, 21]);
    assert!(!formulas.contains(&p));
    // Uniform m is unaffected: the same shape on (3, 3, 3) gives the bound.
    let s = spec(&[3, 3, 3], &[1, 9, 9]);
    let first = Recipe::split(1, 0, (0..3).map(|k| Recipe::split(2, k, leaves(3))).collect());
    let second = Recipe::split(2, 3, (0..3).map(|k| Recipe::split(1, k + 1, leaves(3))).collect());
    let third = Recipe::split(1, 4, (0..3).map(|k| Recipe::split(2, k + 4, leaves(3))).collect());
    let t = laminated_construction(&s, &Recipe::split(0, 0, vec![first, second, third])).unwrap();
    let report = theorem_c_report(&t).unwrap();
    assert_eq!((report.p_total, report.bound, report.equality), (13, 13, true));
}

#[test]
fn json_round_trip_of_enumerated_tilings() {
    for t in enumerate_tilings(&spec(&[2, 3], &[2, 2]), &SearchOptions::default()).unwrap() {
        let text = serde_json::to_string(&t).unwrap();
        let back: TorusTiling = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}

/// Brute-force comparison for four to six axes; about two and a half
/// minutes, so run on request with `--ignored`.
#[test]
#[ignore]
fn slow_path_equivalence_beyond_three_axes() {
    for s in small_specs(64, 6).into_iter().filter(|s| s.dim() >= 4) {
        let mut brute: Vec<Vec<u32>> = brute_force_tilings(&s, 64)
            .unwrap()
            .iter()
            .map(|t| t.starts().iter().map(|c| s.cell_index(c) as u32).collect())
            .collect();
        brute.sort();
        let mut expanded: Vec<Vec<u32>> = enumerate_tilings(&s, &SearchOptions::default())
            .unwrap()
            .iter()
            .flat_map(|t| orbit_starts(t, Symmetry::ALL))
            .collect();
        expanded.sort();
        assert_eq!(expanded, brute, "{s}");
    }
}
