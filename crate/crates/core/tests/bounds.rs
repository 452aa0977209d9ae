use std::collections::BTreeSet;

use proptest::prelude::*;
use stereohedra::bounds::*;
use stereohedra::catalog::{all_groups, catalog, sm_grid, BoundSource};
use stereohedra::lattice::{Color, Letter, SubdomainLabel};

fn label(s: &str) -> SubdomainLabel {
    s.parse().unwrap()
}

fn labels(names: &[&str]) -> Vec<SubdomainLabel> {
    names.iter().map(|s| label(s)).collect()
}

#[test]
fn first_bound_grid() {
    let got: Vec<usize> = [1, 2, 4, 8]
        .iter()
        .flat_map(|&s| [0, 1].map(|m| first_bound(s, m)))
        .collect();
    assert_eq!(got, [10, 14, 17, 25, 31, 47, 59, 91]);
    assert_eq!(delone_bound(3, 48), 390);
    assert_eq!(table3().iter().map(|r| r.bound).max(), Some(91));
}

#[test]
fn aspects_match_point_group_orders() {
    // Oracle: the coset table size is the number of aspects.
    for g in all_groups() {
        assert_eq!(
            aspects(g) as usize,
            g.presentation.cosets().unwrap().index(),
            "{}",
            g.name
        );
    }
}

#[test]
fn region_sizes() {
    assert_eq!(region(Family::Order4).vorext_labels.len(), 13);
    assert_eq!(region(Family::Order4).infl_labels.len(), 48);
    assert_eq!(region(Family::TransversalOrder2).vorext_labels.len(), 19);
    assert_eq!(region(Family::TransversalOrder2).infl_labels.len(), 89);
    assert_eq!(region(Family::Basic).vorext_labels.len(), 40);
}

#[test]
fn transversal_counts_per_letter() {
    let counts = type_counts(&region(Family::TransversalOrder2).infl_labels);
    let black: Vec<usize> = Letter::ALL
        .iter()
        .map(|l| counts[&(Color::Black, *l)])
        .collect();
    let white: Vec<usize> = Letter::ALL
        .iter()
        .map(|l| counts[&(Color::White, *l)])
        .collect();
    assert_eq!(black, [9, 9, 6, 6, 11, 8, 6, 6]);
    assert_eq!(white, [4, 4, 3, 3, 4, 4, 3, 3]);
    assert_eq!(black.iter().sum::<usize>(), 61);
    assert_eq!(white.iter().sum::<usize>(), 28);
}

#[test]
fn transversal_bound_column() {
    let rows = bound_column(region(Family::TransversalOrder2));
    let black: Vec<usize> = rows
        .iter()
        .filter(|r| r.color == Color::Black)
        .map(|r| r.bound)
        .collect();
    assert_eq!(black, [8, 6, 4, 4, 7, 7, 4, 4]);
    assert_eq!(black.iter().sum::<usize>(), 44);
}

#[test]
fn transversal_reduction_pairs() {
    let expected: BTreeSet<(SubdomainLabel, SubdomainLabel)> = [
        ("T_23^B", "T_32^B"),
        ("T_34^B", "T_43^B"),
        ("T_14^B", "T_41^B"),
        ("T_34^C", "T_43^C"),
        ("T_14^C", "T_41^C"),
        ("T_34^D", "T_43^D"),
        ("T_14^D", "T_41^D"),
        ("T_12^E", "T_21^E"),
        ("T_23^E", "T_32^E"),
        ("T_34^E", "T_43^E"),
        ("T_14^E", "T_41^E"),
        ("T_23^F", "T_32^F"),
        ("T_23^G", "T_32^G"),
        ("T_34^G", "T_43^G"),
        ("T_23^H", "T_32^H"),
        ("T_34^H", "T_43^H"),
    ]
    .iter()
    .map(|(a, b)| (label(a), label(b)))
    .collect();
    let got: BTreeSet<_> = reduction_pairs(region(Family::TransversalOrder2))
        .into_iter()
        .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
        .collect();
    let expected: BTreeSet<_> = expected
        .into_iter()
        .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn refined_bounds_match_published() {
    for (name, bound) in [
        ("P432", 11),
        ("I432", 22),
        ("Pn-3n", 23),
        ("P23", 15),
        ("I23", 21),
        ("Pn-3", 23),
        ("P-43n", 23),
    ] {
        assert_eq!(
            group_bound(catalog(name).unwrap()).unwrap(),
            bound,
            "{name}"
        );
    }
    let ledger = refined_bound(
        catalog("P4_232").unwrap(),
        region(Family::TransversalOrder2),
    )
    .unwrap();
    assert_eq!(ledger.sum, "8 + 7 + 6 + 7 = 28");
    assert_eq!(ledger.bound_before_refinement, 28);
    assert_eq!(ledger.bound, 25);
    assert_eq!(
        ledger.helix_exclusions["upper"],
        labels(&["T_13^A", "T_13^B", "T_24^B"])
    );
}

#[test]
fn table1_has_no_mismatch() {
    let t = emit_tables().unwrap();
    assert!(t.mismatches().is_empty(), "{:?}", t.mismatches());
    let p432 = t.table1.iter().find(|r| r.group == "P432").unwrap();
    assert_eq!((p432.bound, p432.source), (11, BoundSource::Order4));
    let row = t.table3.iter().find(|r| (r.s, r.m) == (4, 1)).unwrap();
    assert_eq!(row.bound, 47);
    assert!(t.to_text().contains("8 + 7 + 6 + 7 = 28"));
}

#[test]
fn table3_population_matches_catalog_grid() {
    let grid = sm_grid();
    for row in table3() {
        let all = all_groups()
            .iter()
            .filter(|g| g.s == row.s && g.m == row.m)
            .count();
        assert_eq!(grid.get(&(row.s, row.m)).copied().unwrap_or(0), all);
        assert!(row.groups.len() <= all);
    }
}

#[test]
fn family_mismatch_is_refused() {
    let err = refined_bound(catalog("P23").unwrap(), region(Family::Order4)).unwrap_err();
    assert!(matches!(err, BoundError::FamilyMismatch { .. }));
}

#[test]
fn vorext_regions_verify() {
    for f in [Family::Order4, Family::TransversalOrder2] {
        let r = vorext_verify(region(f), 3, 17).unwrap();
        assert!(r.wedge_certificates > 0 && r.cells_checked > 0, "{f:?}");
    }
}

#[test]
fn dropping_a_needed_subdomain_breaks_the_certificate() {
    let broken = region(Family::Order4).without(&label("T^B"));
    assert!(matches!(
        vorext_verify(&broken, 3, 17),
        Err(BoundError::CertificateFailure { .. })
    ));
}

#[test]
fn order4_infl_is_stable_under_def_in_t() {
    let mut wider = vorext(Family::Order4);
    wider.vorext_labels.extend(labels(&["T^D", "T^E", "T^F"]));
    assert_eq!(influence_region(&wider).unwrap().infl_labels.len(), 48);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// A smaller extended region never has a larger influence region.
    #[test]
    fn infl_is_monotone(drop in proptest::collection::btree_set(0usize..13, 1..4)) {
        let full = region(Family::Order4);
        let mut smaller = vorext(Family::Order4);
        let list: Vec<_> = full.vorext_labels.iter().copied().collect();
        for i in drop {
            smaller.vorext_labels.remove(&list[i]);
        }
        let infl = influence_region(&smaller).unwrap().infl_labels;
        prop_assert!(infl.is_subset(&full.infl_labels));
    }
}
