use hyperbif::harmonics::*;
use proptest::prelude::*;

fn group(kind: GroupKind, n: usize) -> SymmetryGroup {
    SymmetryGroup::new(kind, n).unwrap()
}

fn degrees(spec: &GroupSpectrum) -> Vec<usize> {
    spec.entries.iter().map(|e| e.i).collect()
}

#[test]
fn dihedral_three_in_the_plane() {
    let spec = group_restricted_spectrum(&group(GroupKind::Dihedral(3), 2), 10).unwrap();
    assert_eq!(degrees(&spec), vec![3, 6, 9]);
    assert!(spec.entries.iter().all(|e| e.m == 1));
    assert_eq!(spec.first().unwrap().mu, 9.0);
}

#[test]
fn full_icosahedral_first_degree_is_six() {
    let spec = group_restricted_spectrum(&group(GroupKind::Icosahedral, 3), 12).unwrap();
    let first = spec.first().unwrap();
    assert_eq!((first.i, first.m, first.mu), (6, 1, 42.0));
    let report = check_g1(&spec).unwrap();
    assert!(report.satisfied);
    assert!(report.mu_bound_holds);
}

#[test]
fn tetrahedral_groups() {
    let full = group_restricted_spectrum(&group(GroupKind::Tetrahedral, 3), 6).unwrap();
    assert_eq!(full.first().unwrap().i, 3);
    let rot = group_restricted_spectrum(&SymmetryGroup::rotations(GroupKind::Tetrahedral, 3).unwrap(), 6).unwrap();
    assert_eq!(rot.entry(6).unwrap().m, 2);
    assert_eq!(full.entry(6).unwrap().m, 1);
}

#[test]
fn octahedral_first_degree_is_four() {
    let spec = group_restricted_spectrum(&group(GroupKind::Octahedral, 3), 8).unwrap();
    assert_eq!(degrees(&spec), vec![4, 6, 8]);
}

#[test]
fn hyper_icosahedral_first_degree_is_twelve() {
    let g = group(GroupKind::HyperIcosahedral, 4);
    assert_eq!(g.table().unwrap().order(), 7200);
    let spec = group_restricted_spectrum(&g, 12).unwrap();
    assert_eq!(spec.entries.len(), 1);
    let first = spec.first().unwrap();
    assert_eq!((first.i, first.m, first.mu), (12, 1, 168.0));
    assert_eq!(invariant_projection_rank(&g, 12).unwrap(), 1);
    assert!(check_g1(&spec).unwrap().satisfied);
}

#[test]
fn projection_ranks_match_characters() {
    let cases = [
        (group(GroupKind::Dihedral(4), 2), 9),
        (group(GroupKind::Dihedral(5), 2), 11),
        (group(GroupKind::Tetrahedral, 3), 8),
        (SymmetryGroup::rotations(GroupKind::Octahedral, 3).unwrap(), 8),
        (group(GroupKind::Icosahedral, 3), 10),
    ];
    for (g, kmax) in cases {
        let table = g.table().unwrap();
        for k in 1..=kmax {
            let chi = table.character_multiplicity(k).unwrap();
            let rank = table.projection_rank(k, 11 * k as u64).unwrap();
            assert_eq!(chi, rank, "{g} degree {k}");
        }
    }
    assert_eq!(invariant_projection_rank(&group(GroupKind::Dihedral(4), 2), 4).unwrap(), 1);
    assert_eq!(invariant_projection_rank(&group(GroupKind::Icosahedral, 3), 1).unwrap(), 0);
}

#[test]
fn invariant_basis_is_orthonormal_and_invariant() {
    for (g, k) in [
        (SymmetryGroup::rotations(GroupKind::Tetrahedral, 3).unwrap(), 6),
        (group(GroupKind::Icosahedral, 3), 6),
        (group(GroupKind::Dihedral(3), 2), 3),
    ] {
        let basis = invariant_basis(&g, k).unwrap();
        let m = group_restricted_spectrum(&g, k).unwrap().entry(k).unwrap().m;
        assert_eq!(basis.len(), m);
        let quad = sphere_quadrature(g.ambient_n, 2 * k).unwrap();
        for a in 0..m {
            for b in 0..m {
                let ip = quad.integrate(|x| basis[a].eval(x) * basis[b].eval(x));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10, "{g}: <{a},{b}> = {ip}");
            }
        }
        let table = basis[0].table();
        let x = &quad.points[quad.len() / 3];
        for e in &table.elements {
            assert!((basis[0].eval(&e.apply(x)) - basis[0].eval(x)).abs() < 1e-10);
        }
    }
}

#[test]
fn invariant_basis_is_orthogonal_to_other_degrees() {
    let g = group(GroupKind::Octahedral, 3);
    let b4 = invariant_basis(&g, 4).unwrap();
    let b6 = invariant_basis(&g, 6).unwrap();
    let quad = sphere_quadrature(3, 10).unwrap();
    let ip = quad.integrate(|x| b4[0].eval(x) * b6[0].eval(x));
    assert!(ip.abs() < 1e-10);
    // Harmonics of positive degree have mean zero.
    assert!(quad.integrate(|x| b4[0].eval(x)).abs() < 1e-10);
}

#[test]
fn spectrum_export_round_trips() {
    let spec = group_restricted_spectrum(&group(GroupKind::Icosahedral, 3), 12).unwrap();
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"N\":3"));
    let back: GroupSpectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn invalid_groups_are_rejected() {
    assert!(SymmetryGroup::new(GroupKind::Icosahedral, 4).is_err());
    assert!(SymmetryGroup::new(GroupKind::HyperIcosahedral, 3).is_err());
    assert!(SymmetryGroup::new(GroupKind::Dihedral(3), 3).is_err());
    assert!(group_restricted_spectrum(&group(GroupKind::Dihedral(3), 2), 0).is_err());
}

#[test]
fn g1_fails_without_symmetry() {
    let spec = group_restricted_spectrum(&group(GroupKind::Full, 3), 3).unwrap();
    let report = check_g1(&spec).unwrap();
    assert_eq!(report.i1, 1);
    assert!(!report.satisfied);
    // N = 4: threshold 2 is reached by i = 2 only non-strictly.
    let thr = g1_threshold(4);
    assert!(!(2.0 > thr) && 2.0 >= thr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn trivial_group_rank_is_the_full_dimension(n in 2usize..5, k in 1usize..5) {
        let g = group(GroupKind::Full, n);
        let rank = invariant_projection_rank(&g, k).unwrap();
        prop_assert_eq!(rank, harmonic_dimension(k, n));
        let spec = group_restricted_spectrum(&g, k).unwrap();
        prop_assert_eq!(spec.entry(k).unwrap().m, harmonic_dimension(k, n));
    }

    #[test]
    fn g1_threshold_is_root(n in 2usize..12) {
        let t = g1_threshold(n);
        let nf = n as f64;
        prop_assert!((t * (t + nf - 2.0) - g1_mu_bound(n)).abs() < 1e-10);
    }
}
