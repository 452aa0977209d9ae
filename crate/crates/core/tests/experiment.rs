use std::collections::BTreeSet;

use proptest::prelude::{prop_assert_eq, proptest, ProptestConfig};
use stereohedra::catalog::catalog;
use stereohedra::experiment::*;
use stereohedra::lattice::SubdomainLabel;
use stereohedra::rational::rat;
use stereohedra::sampling::HalfFilter;

fn label(s: &str) -> SubdomainLabel {
    s.parse().unwrap()
}

#[test]
fn configs_are_validated() {
    let mut c = ExperimentConfig::new("P23", 0, 1);
    assert!(matches!(
        run_sampling_experiment(&c),
        Err(ExperimentError::InvalidConfig(_))
    ));
    c.sample_count = 1;
    c.denominator = 40;
    assert!(matches!(
        run_sampling_experiment(&c),
        Err(ExperimentError::InvalidConfig(_))
    ));
    let c = ExperimentConfig::new("Pm-3m", 1, 1);
    assert!(matches!(
        run_sampling_experiment(&c),
        Err(ExperimentError::HasReflections(_))
    ));
    let c = ExperimentConfig::new("P6/mmm", 1, 1);
    assert!(matches!(
        run_sampling_experiment(&c),
        Err(ExperimentError::Catalog(_))
    ));
}

#[test]
fn runs_are_deterministic() {
    let c = ExperimentConfig::new("P23", 3, 42);
    let a = serde_json::to_string(&run_sampling_experiment(&c).unwrap()).unwrap();
    let b = serde_json::to_string(&run_sampling_experiment(&c).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn p4232_lower_half() {
    let r = run_sampling_experiment(
        &ExperimentConfig::new("P4_232", 10, 3).with_filter(HalfFilter::Lower),
    )
    .unwrap();
    assert!(
        r.histogram.keys().all(|k| (11..=25).contains(k)),
        "{:?}",
        r.histogram
    );
    assert_eq!(r.lemma_violations, 0);
    assert!(r.outside_candidates.is_empty());
    for l in ["T_24^E", "T_24^F", "T_13^F"] {
        assert_eq!(r.classification.of(&label(l)), Some(Status::Never), "{l}");
    }
    for l in p4232_always() {
        assert_eq!(r.classification.of(&l), Some(Status::Always), "{l}");
    }
    for s in &r.samples {
        assert!(stereohedra::sampling::HalfFilter::Lower.accepts(&s.point));
        let st = check_p4232_structure(&s.report).unwrap();
        assert_eq!(st.dichotomy_pair(), Some("13"));
    }
}

#[test]
fn p4232_upper_half_pairs_with_the_other_long_edge() {
    let r = run_sampling_experiment(
        &ExperimentConfig::new("P4_232", 10, 4).with_filter(HalfFilter::Upper),
    )
    .unwrap();
    for l in ["T_13^A", "T_13^B", "T_24^B"] {
        assert_eq!(r.classification.of(&label(l)), Some(Status::Never), "{l}");
    }
    for s in &r.samples {
        let st = check_p4232_structure(&s.report).unwrap();
        // The Delaunay tetrahedron sits at the midpoint of v1 v3.
        assert_eq!(st.dichotomy_pair(), Some("24"));
        assert!(
            s.neighbor_labels.contains(&label("T_24^A"))
                && s.neighbor_labels.contains(&label("T_24^E"))
        );
    }
}

#[test]
fn structure_check_rejects_forged_neighbours() {
    let r = run_sampling_experiment(&ExperimentConfig::new("P4_232", 1, 8)).unwrap();
    let mut forged = r.samples[0].report.clone();
    forged.neighbors.retain(|n| n.label != Some(label("T^F")));
    assert!(matches!(
        check_p4232_structure(&forged),
        Err(ExperimentError::StructureViolation(_))
    ));
}

#[test]
fn candidate_universe_for_p4232() {
    let u = candidate_labels(catalog("P4_232").unwrap());
    assert_eq!(u.len(), 36);
    assert!(!u.contains(&label("T_14^F")));
    assert!(u.contains(&label("T_21^F")) && !u.contains(&label("T_12^F")));
}

#[test]
fn special_orbit_on_the_long_edge() {
    for g in ["F4_132", "F2/d-3"] {
        let r = special_orbit_cell(g, &rat(1, 8)).unwrap();
        assert_eq!(r.stabilizer_order, 2);
        assert!(
            r.facet_count <= 12 && r.own_orbit <= 8 && r.other_orbit <= 4,
            "{r:?}"
        );
    }
    assert!(matches!(
        special_orbit_cell("F4_132", &rat(1, 4)),
        Err(ExperimentError::InvalidConfig(_))
    ));
    assert!(matches!(
        special_orbit_cell("F4_132", &rat(1, 2)),
        Err(ExperimentError::InvalidConfig(_))
    ));
    assert!(matches!(
        special_orbit_cell("P23", &rat(1, 8)),
        Err(ExperimentError::InvalidConfig(_))
    ));
    assert_eq!(
        run_special_orbit_experiment("F4_132", 3, 1).unwrap().len(),
        3
    );
}

#[test]
fn classification_by_hand() {
    let u: BTreeSet<SubdomainLabel> = [label("T^B"), label("T^E")].into();
    let samples = vec![[label("T^B"), label("T^F")].into(), [label("T^B")].into()];
    let c = classify(&u, &samples);
    assert_eq!(c.of(&label("T^B")), Some(Status::Always));
    assert_eq!(c.of(&label("T^E")), Some(Status::Never));
    assert_eq!(c.of(&label("T^F")), Some(Status::Sometimes));
    assert_eq!(c.bitmaps.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_matches_bitmaps(rows in proptest::collection::vec(proptest::collection::vec(proptest::bool::ANY, 5), 1..8)) {
        let pool = ["T^B", "T^E", "T^F", "T_13^A", "T_24^E"].map(label);
        let samples: Vec<BTreeSet<SubdomainLabel>> = rows
            .iter()
            .map(|r| pool.iter().zip(r).filter(|(_, b)| **b).map(|(l, _)| *l).collect())
            .collect();
        let c = classify(&pool.iter().copied().collect(), &samples);
        for (i, l) in c.labels.iter().enumerate() {
            let hits = c.bitmaps.iter().filter(|b| b[i]).count();
            let expect = if hits == samples.len() { Status::Always } else if hits == 0 { Status::Never } else { Status::Sometimes };
            prop_assert_eq!(c.of(l), Some(expect));
        }
    }
}
