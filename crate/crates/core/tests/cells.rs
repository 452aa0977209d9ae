use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use stereohedra::bounds::{group_bound, region, Family};
use stereohedra::catalog::{catalog, FullGroupSpec};
use stereohedra::cell::{
    check_containment, check_rotation_lemma, dirichlet_cell, dirichlet_cell_in,
    perturbation_monotonicity_probe, rotations_meeting_base, CellError, CellOptions, Neighbor,
    Strategy,
};
use stereohedra::lattice::{base_subdomain_vertices, base_vertices};
use stereohedra::polytope::{locate_point, Halfspace, Location};
use stereohedra::rational::{int, rat, Point3};
use stereohedra::sampling::{BasePointSampler, HalfFilter, DEFAULT_DENOMINATOR};
use stereohedra::{GroupPresentation, Isometry};

fn points(seed: u64, n: usize) -> Vec<Point3> {
    BasePointSampler::new(seed, DEFAULT_DENOMINATOR, HalfFilter::All)
        .take(n)
        .collect()
}

/// Volume of a fundamental domain: lattice covolume over the number of aspects.
fn fundamental_volume(spec: &FullGroupSpec) -> stereohedra::Rational {
    spec.lattice.covolume() / int(spec.presentation.cosets().unwrap().index() as i64)
}

#[test]
fn bcc_lattice_cell_is_a_truncated_octahedron() {
    let basis = [
        Point3::from_frac(1, 1, 1, 2),
        Point3::from_frac(1, -1, 1, 2),
        Point3::from_frac(1, 1, -1, 2),
    ];
    let g = GroupPresentation::translations("I", basis);
    let r = dirichlet_cell_in(
        &g,
        &Point3::zero(),
        Strategy::SafeRadius,
        &CellOptions::default(),
    )
    .unwrap();
    assert_eq!(r.facet_count, 14);
    assert_eq!(r.cell.vertices().len(), 24);
    assert_eq!(r.cell.volume(), rat(1, 2));
    // Far larger than T and its neighbours.
    assert!(!check_containment(&r).lemma32);
}

#[test]
fn f23_cells_have_at_most_ten_facets() {
    let spec = catalog("F23").unwrap();
    for p in points(5, 4) {
        let r = dirichlet_cell(spec, &p, Strategy::SafeRadius).unwrap();
        assert!(r.facet_count <= 10, "{p}: {}", r.facet_count);
        assert_eq!(r.cell.volume(), fundamental_volume(spec));
    }
}

#[test]
fn influence_and_safe_radius_agree() {
    for (name, family) in [
        ("P432", Family::Order4),
        ("P4_232", Family::TransversalOrder2),
        ("F23", Family::Basic),
    ] {
        let spec = catalog(name).unwrap();
        for p in points(9, 2) {
            let a = dirichlet_cell(spec, &p, Strategy::InfluenceRegion(region(family))).unwrap();
            let b = dirichlet_cell(spec, &p, Strategy::SafeRadius).unwrap();
            assert_eq!(a.cell.halfspace_set(), b.cell.halfspace_set(), "{name} {p}");
            assert_eq!(a.neighbor_labels(), b.neighbor_labels());
        }
    }
}

#[test]
fn wrong_family_is_detected() {
    // The order-4 region is too small for P23, which lacks the 4-folds.
    let spec = catalog("P23").unwrap();
    let mut incomplete = 0;
    for p in points(21, 6) {
        let safe = dirichlet_cell(spec, &p, Strategy::SafeRadius).unwrap();
        match dirichlet_cell(spec, &p, Strategy::InfluenceRegion(region(Family::Order4))) {
            Ok(r) => assert_eq!(r.cell.halfspace_set(), safe.cell.halfspace_set()),
            Err(CellError::CandidateSetIncomplete(_)) => incomplete += 1,
            Err(e) => panic!("{e}"),
        }
    }
    assert!(incomplete > 0);
}

#[test]
fn stabilized_points_are_refused() {
    // The centroid of T lies on the 3-fold axes.
    let c = Point3::centroid(base_vertices().iter());
    let err = dirichlet_cell(catalog("P23").unwrap(), &c, Strategy::SafeRadius).unwrap_err();
    assert!(matches!(err, CellError::NontrivialStabilizer(n) if n > 1));
    let outside = Point3::new(rat(5, 7), rat(3, 11), rat(2, 13));
    let err = dirichlet_cell(
        catalog("P23").unwrap(),
        &outside,
        Strategy::InfluenceRegion(region(Family::TransversalOrder2)),
    );
    assert!(matches!(err, Err(CellError::NotInBaseSubdomain(_))));
}

#[test]
fn forged_report_breaks_the_rotation_lemma() {
    let spec = catalog("P432").unwrap();
    let p = &points(3, 1)[0];
    let r = dirichlet_cell(spec, p, Strategy::SafeRadius).unwrap();
    let rotations = rotations_meeting_base(&spec.presentation).unwrap();
    assert!(rotations.iter().all(|rho| check_rotation_lemma(&r, rho)));
    let rho = rotations
        .iter()
        .find(|g| g.order(6) == Some(4))
        .expect("a 4-fold meets T");
    // A whole 4-fold orbit of neighbours is impossible.
    let mut forged = r.clone();
    let mut x = Point3::from_frac(3, 1, 7, 11);
    forged.neighbors.clear();
    for _ in 0..4 {
        forged.neighbors.push(Neighbor {
            point: x.clone(),
            label: None,
            witness: Isometry::identity(),
        });
        x = rho.apply(&x);
    }
    assert!(!check_rotation_lemma(&forged, rho));
}

#[test]
fn probe_refuses_boxes_leaving_the_subdomain() {
    let spec = catalog("P23").unwrap();
    let p = &points(4, 1)[0];
    assert!(matches!(
        perturbation_monotonicity_probe(spec, p, 2, &rat(1, 2), 1),
        Err(CellError::PerturbationTooLarge(_))
    ));
}

#[test]
fn wall_points_do_not_lose_facets_under_perturbation() {
    // A point on the face x = 1/2 of T^A, off the 2-fold axis on that face.
    let v = base_subdomain_vertices();
    let p =
        (&(&v[2].scale(&int(3)) + &v[0].scale(&int(5))) + &v[1].scale(&int(11))).scale(&rat(1, 19));
    assert_eq!(
        locate_point(stereohedra::lattice::base_subdomain(), &p),
        Location::Boundary
    );
    let spec = catalog("P23").unwrap();
    let probe = perturbation_monotonicity_probe(spec, &p, 4, &rat(1, 10_000), 2).unwrap();
    assert!(!probe.violation, "{probe:?}");
    assert!(probe.min >= probe.base_count);
}

const GROUPS: [&str; 6] = ["F23", "P23", "P432", "I23", "P4_232", "F4_132"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn cell_invariants(seed in any::<u64>(), gi in 0usize..GROUPS.len()) {
        let spec = catalog(GROUPS[gi]).unwrap();
        let p = points(seed, 1).remove(0);
        let r = match dirichlet_cell(spec, &p, Strategy::SafeRadius) {
            Err(CellError::NontrivialStabilizer(_)) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert_eq!(locate_point(&r.cell, &p), Location::Interior);
        // The cells tile space with one cell per orbit point.
        prop_assert_eq!(r.cell.volume(), fundamental_volume(spec));
        prop_assert!(r.facet_count <= group_bound(spec).unwrap());
        prop_assert_eq!(r.neighbors.len(), r.facet_count);
        for (n, h) in r.neighbors.iter().zip(r.cell.halfspaces()) {
            prop_assert_eq!(&Halfspace::bisector(&p, &n.point).unwrap(), h);
            prop_assert_eq!(&n.witness.apply(&p), &n.point);
        }
        let c = check_containment(&r);
        prop_assert!(c.lemma32 && c.lemma33);
        for rho in rotations_meeting_base(&spec.presentation).unwrap() {
            prop_assert!(check_rotation_lemma(&r, &rho));
        }
    }
}
