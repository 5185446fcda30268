use mapcone::builtins::{corner_projection, phi_a, phi_abcd, sigma, tau};
use mapcone::calculus::sampling::random_cp;
use mapcone::calculus::{
    ampliation_crosscheck, check_one_sided_equivalences, find_nonpositive_dual_member, in_cone, in_dual, in_ldual,
    in_rdual, in_smallest_lmc, in_smallest_rmc, AugmentedCone, Closure, Cone, Side,
};
use mapcone::random::rng;
use mapcone::{compose, is_cp, is_positive_k, map_pairing, ConeId, HpMap, SolverOptions, Status};

fn opts() -> SolverOptions {
    SolverOptions::default().with_restarts(16)
}

#[test]
fn example_cone_duals_on_the_family() {
    let k = AugmentedCone::example();
    let o = opts();
    for &(a, d) in &[(0.2, 0.5), (1.5, 0.1), (0.9, 0.9), (0.5, 1.8), (1.2, 1.2)] {
        let phi = phi_abcd(a, 1.0, 1.0, d);
        let p1 = (a * d).sqrt() + 1.0 >= 1.0;
        assert_eq!(in_dual(&k, &phi, &o).unwrap().is_member(), p1 && a + 1.0 + d >= 2.0, "dual {a} {d}");
        assert_eq!(in_rdual(&k, &phi, &o).unwrap().is_member(), p1 && a * (1.0 + d) >= 1.0, "rdual {a} {d}");
        assert_eq!(in_ldual(&k, &phi, &o).unwrap().is_member(), p1 && (a + 1.0) * d >= 1.0, "ldual {a} {d}");
    }
}

#[test]
fn counterexample_pair() {
    let k = AugmentedCone::example();
    let o = opts();
    let left_only = phi_abcd(1.0 / 3.0, 1.0, 1.0, 1.0);
    assert_eq!(in_ldual(&k, &left_only, &o).unwrap().status, Status::Member);
    assert_eq!(in_rdual(&k, &left_only, &o).unwrap().status, Status::NonMember);
    let right_only = phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0);
    assert_eq!(in_rdual(&k, &right_only, &o).unwrap().status, Status::Member);
    assert_eq!(in_ldual(&k, &right_only, &o).unwrap().status, Status::NonMember);
}

#[test]
fn generator_pairs_nonnegatively_with_dual_members() {
    let k = AugmentedCone::example();
    let o = opts();
    let mut r = rng(1, 0);
    let mut seen = 0;
    for _ in 0..50 {
        let phi = mapcone::calculus::sampling::random_candidate(&mut r, 2, 2).unwrap();
        if in_dual(&k, &phi, &o).unwrap().is_member() {
            seen += 1;
            assert!(map_pairing(&phi, &sigma()).unwrap() >= -1e-9);
        }
    }
    assert!(seen > 0);
}

#[test]
fn tau_is_outside_the_example_cone() {
    let k = AugmentedCone::example();
    let o = opts();
    let v = in_cone(&k, &tau(), &o).unwrap();
    assert_eq!(v.status, Status::NonMember, "{v:?}");
    assert!(-v.gap > 1e-6);
    if let Some(x) = v.recheck(&tau()).unwrap() {
        assert!(x < 0.0);
    }
    // sigma and separable maps are inside
    assert_eq!(in_cone(&k, &sigma(), &o).unwrap().status, Status::Member);
    let zero = HpMap::from_choi(mapcone::BipartiteMatrix::zeros(2, 2)).unwrap();
    assert_eq!(in_cone(&k, &zero, &o).unwrap().status, Status::Member);
}

#[test]
fn smallest_one_sided_cones() {
    let k = AugmentedCone::example();
    let o = opts();
    let mut r = rng(5, 0);
    for _ in 0..3 {
        let psi = random_cp(&mut r, 2, 2).unwrap();
        let phi = compose(&sigma(), &psi).unwrap();
        let v = in_smallest_rmc(&k, &phi, &o).unwrap();
        assert_eq!(v.status, Status::Member, "{:?}", v.gap);
        let phi = compose(&psi, &sigma()).unwrap();
        assert_eq!(in_smallest_lmc(&k, &phi, &o).unwrap().status, Status::Member);
    }
    let zero = HpMap::from_choi(mapcone::BipartiteMatrix::zeros(2, 2)).unwrap();
    assert_eq!(in_smallest_rmc(&k, &zero, &o).unwrap().status, Status::Member);
    let v = in_smallest_rmc(&k, &tau(), &o).unwrap();
    assert_ne!(v.status, Status::Member);
    if v.is_non_member() {
        assert!(v.recheck(&tau()).unwrap().unwrap() < 0.0);
    }
}

#[test]
fn phi_a_thresholds() {
    let k = AugmentedCone::example();
    let o = opts();
    for &(a, p1, dual, one_sided) in &[(0.45, false, false, false), (0.6, true, false, false), (0.69, true, true, false), (0.72, true, true, true)] {
        let phi = phi_a(a);
        assert_eq!(is_positive_k(&phi, 1, &o).unwrap().is_member(), p1, "P1 at {a}");
        assert_eq!(in_dual(&k, &phi, &o).unwrap().is_member(), dual, "dual at {a}");
        assert_eq!(in_rdual(&k, &phi, &o).unwrap().is_member(), one_sided, "rdual at {a}");
        assert_eq!(in_ldual(&k, &phi, &o).unwrap().is_member(), one_sided, "ldual at {a}");
    }
}

#[test]
fn equivalence_harness() {
    let o = opts();
    let report = check_one_sided_equivalences(&Cone::Builtin(ConeId::Cp), (2, 2), 60, 3, &[], &o).unwrap();
    assert_eq!(report.total_violations(), 0, "{:?}", report.failed_checks());
    let probes = [phi_abcd(1.0 / 3.0, 1.0, 1.0, 1.0), phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0)];
    let report =
        check_one_sided_equivalences(&Cone::Augmented(AugmentedCone::example()), (2, 2), 60, 3, &probes, &o).unwrap();
    assert_eq!(report.failed_checks(), vec!["ldual ⊆ rdual", "rdual ⊆ ldual"]);
}

#[test]
fn dual_of_one_sided_cone_holds_a_non_positive_map() {
    let o = opts();
    let k = AugmentedCone::new(2, 2, vec![corner_projection(2)], false).unwrap().with_closure(Closure::Left);
    let cone = Cone::Augmented(k);
    let found = find_nonpositive_dual_member(&cone, (2, 2), 200, 1, &o).unwrap().expect("a witness");
    assert!(cone.in_dual(&found, &o).unwrap().is_member());
    assert!(is_positive_k(&found, 1, &o).unwrap().is_non_member());
}

#[test]
fn ampliation_predicates_agree() {
    let o = opts();
    let cone = Cone::Augmented(AugmentedCone::example());
    for phi in [phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0), phi_abcd(1.0 / 3.0, 1.0, 1.0, 1.0), phi_a(0.8)] {
        for side in [Side::Right, Side::Left] {
            let rep = ampliation_crosscheck(&cone, &phi, side, 20, 2, &o).unwrap();
            assert!(rep.agree(), "{side:?} {rep:?}");
        }
    }
    let rep = ampliation_crosscheck(&cone, &phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0), Side::Right, 20, 2, &o).unwrap();
    assert_eq!(rep.predicates[3].holds, Some(true));
    let _ = is_cp(&sigma(), &o);
}
