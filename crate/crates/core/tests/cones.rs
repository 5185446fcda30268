use mapcone::builtins::{identity, phi_a, phi_abcd, sigma, tau, transpose_map};
use mapcone::cones::{decomposable_bounds, is_positive_k, min_schmidt_overlap, project_ppt};
use mapcone::matrix::{CMat, HermitianMatrix};
use mapcone::random::{ginibre, random_psd, rng};
use mapcone::{
    compose, is_ccp, is_cp, is_decomposable, is_ppt_map, is_superpositive_k, map_pairing, BipartiteMatrix, Certificate,
    HpMap, KrausTerm, SolverOptions, Status,
};

fn opts() -> SolverOptions {
    SolverOptions::default().with_restarts(16)
}

/// Closed-form minimum of `<C_{φ_[a]}, |x⊗y><x⊗y|>`: the map sends a rank-one
/// projector to a matrix with determinant ≥ 0 iff a ≥ 1/2, minimum a − 1/2.
fn phi_a_floor(a: f64) -> f64 {
    a - 0.5
}

#[test]
fn cp_fixtures() {
    let o = opts();
    assert_eq!(is_cp(&sigma(), &o).unwrap().status, Status::Member);
    assert_eq!(is_cp(&tau(), &o).unwrap().status, Status::Member);
    let t = is_cp(&transpose_map(2), &o).unwrap();
    assert_eq!(t.status, Status::NonMember);
    assert!((t.gap + 1.0).abs() < 1e-12);
    assert!(t.recheck(&transpose_map(2)).unwrap().unwrap() < -0.99);
}

#[test]
fn ccp_and_ppt_fixtures() {
    let o = opts();
    let v = is_ppt_map(&tau(), &o).unwrap();
    assert_eq!(v.status, Status::NonMember);
    assert!(matches!(v.certificate, Some(Certificate::Eigenvector { partial_transpose: true, .. })));
    assert!(v.recheck(&tau()).unwrap().unwrap() < 0.0);

    let mut r = rng(3, 0);
    let ad_t = HpMap::ad(&ginibre(&mut r, 2, 3)).unwrap().compose_transpose();
    assert_eq!(is_ccp(&ad_t, &o).unwrap().status, Status::Member);

    assert_eq!(is_cp(&identity(3), &o).unwrap().status, Status::Member);
    assert_eq!(is_ccp(&identity(3), &o).unwrap().status, Status::NonMember);
}

#[test]
fn positive_family_thresholds() {
    let o = opts();
    for &(a, b, c, d) in &[(0.2f64, 0.9f64, 0.9f64, 0.3f64), (0.3, 1.0, 1.0, 0.5), (0.8, 0.5, 0.5, 0.9), (0.1, 0.1, 0.2, 0.3)] {
        let expected = (a * d).sqrt() + (b * c).sqrt() >= 1.0;
        let v = is_positive_k(&phi_abcd(a, b, c, d), 1, &o).unwrap();
        assert_eq!(v.is_member(), expected, "{a} {b} {c} {d}: {v:?}");
        if !expected {
            assert!(v.recheck(&phi_abcd(a, b, c, d)).unwrap().unwrap() < 0.0);
        }
    }
    for &a in &[0.1, 0.3, 0.49, 0.51, 0.9, 1.5] {
        let (value, _) = min_schmidt_overlap(phi_a(a).choi(), 1, &o).unwrap();
        assert!((value - phi_a_floor(a)).abs() < 1e-7, "a = {a}: {value}");
    }
}

#[test]
fn min_overlap_fixtures() {
    let o = opts();
    let id = BipartiteMatrix::new(2, 3, CMat::identity(6, 6)).unwrap();
    assert!((min_schmidt_overlap(&id, 1, &o).unwrap().0 - 1.0).abs() < 1e-10);
    let (v, _) = min_schmidt_overlap(phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0).choi(), 1, &o).unwrap();
    assert!(v >= -1e-9);
    let g = tau().choi().partial_transpose();
    let (v, _) = min_schmidt_overlap(&g, 2, &o).unwrap();
    assert!((v - g.min_eigenvalue().unwrap()).abs() < 1e-12 && v < 0.0);
}

#[test]
fn seesaw_is_deterministic() {
    let mut r = rng(11, 0);
    let c = BipartiteMatrix::new(3, 3, mapcone::random::random_hermitian(&mut r, 9)).unwrap();
    let o = opts().with_seed(42);
    let (a, x) = min_schmidt_overlap(&c, 1, &o).unwrap();
    let (b, y) = min_schmidt_overlap(&c, 1, &o).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    assert_eq!(x, y);
    let threaded = SolverOptions { threads: 4, ..o };
    assert_eq!(min_schmidt_overlap(&c, 1, &threaded).unwrap().0.to_bits(), a.to_bits());
}

#[test]
fn superpositive_fixtures() {
    let o = opts();
    let v = is_superpositive_k(&tau(), 1, &o).unwrap();
    assert_eq!(v.status, Status::NonMember);
    assert!(v.recheck(&tau()).unwrap().unwrap() < 0.0);

    let mut r = rng(9, 0);
    // rank-2 Kraus operator on 3⊗3 is in SP(2)
    let v2 = ginibre(&mut r, 3, 2) * ginibre(&mut r, 2, 3);
    let phi = HpMap::ad(&v2).unwrap();
    let verdict = is_superpositive_k(&phi, 2, &o).unwrap();
    assert_eq!(verdict.status, Status::Member, "{:?}", verdict.notes);
    assert!(verdict.recheck(&phi).unwrap().unwrap() < 1e-5);

    // Identity on M_3 has Schmidt number 3, refuted at k = 2.
    let v = is_superpositive_k(&identity(3), 2, &o).unwrap();
    assert_eq!(v.status, Status::NonMember);
    assert!(v.recheck(&identity(3)).unwrap().unwrap() < 0.0);
}

#[test]
fn interior_separable_choi_at_3x3_is_constructed() {
    let o = opts();
    let mut r = rng(21, 0);
    let terms: Vec<KrausTerm> = (0..4)
        .map(|_| KrausTerm::positive(ginibre(&mut r, 3, 1) * ginibre(&mut r, 1, 3)))
        .collect();
    let phi = HpMap::from_kraus(&terms).unwrap();
    let noise = HpMap::from_choi_matrix(3, 3, CMat::identity(9, 9) * mapcone::matrix::re(0.2)).unwrap();
    let phi = phi.add(&noise).unwrap();
    let v = is_superpositive_k(&phi, 1, &o).unwrap();
    assert_eq!(v.status, Status::Member, "{v:?}");
}

#[test]
fn decomposable_fixtures() {
    let o = SolverOptions::default();
    for &(a, b, c, d) in &[(0.4, 1.0, 1.0, 0.4), (1.0, 1.0, 1.0, 1.0), (0.5, 2.0, 0.8, 0.5)] {
        let phi = phi_abcd(a, b, c, d);
        let v = is_decomposable(&phi, &o).unwrap();
        assert_eq!(v.status, Status::Member, "{a} {b} {c} {d}: {:?}", v.notes);
        assert!(v.recheck(&phi).unwrap().unwrap() < 1e-8);
    }
    let mut r = rng(4, 0);
    let phi = HpMap::ad(&ginibre(&mut r, 2, 2))
        .unwrap()
        .add(&HpMap::ad(&ginibre(&mut r, 2, 2)).unwrap().compose_transpose())
        .unwrap();
    assert_eq!(is_decomposable(&phi, &o).unwrap().status, Status::Member);

    // Below the P₁ threshold at 2⊗2 the map is not even positive.
    let bad = phi_abcd(0.2, 0.5, 0.5, 0.2);
    let v = is_decomposable(&bad, &o).unwrap();
    assert_eq!(v.status, Status::NonMember);
    let re = v.recheck(&bad).unwrap().unwrap();
    assert!((re - v.gap).abs() < 10.0 * o.tol, "{re} vs {}", v.gap);
    let b = decomposable_bounds(bad.choi(), &o).unwrap();
    assert!(b.lower <= b.upper + 1e-12);
}

#[test]
fn ppt_compositions_are_ppt() {
    let o = opts();
    let mut r = rng(17, 0);
    for _ in 0..10 {
        let make = |r: &mut _| {
            let x = BipartiteMatrix::new(2, 2, random_psd(r, 4, 4) - CMat::identity(4, 4) * mapcone::matrix::re(0.1)).unwrap();
            HpMap::from_choi(project_ppt(&x, 10_000, 1e-13).unwrap().0).unwrap()
        };
        let (phi, psi) = (make(&mut r), make(&mut r));
        let comp = compose(&psi, &phi).unwrap();
        assert_ne!(is_ppt_map(&comp, &o).unwrap().status, Status::NonMember);
    }
}

#[test]
fn positive_and_superpositive_are_dual() {
    let mut r = rng(23, 0);
    for _ in 0..10 {
        let (a, b, c, d) = (0.3, 1.0, 1.0, 0.5);
        let phi = phi_abcd(a, b, c, d);
        let psi = HpMap::ad(&(ginibre(&mut r, 2, 1) * ginibre(&mut r, 1, 2))).unwrap();
        assert!(map_pairing(&phi, &psi).unwrap() >= -1e-9);
    }
    let _ = HermitianMatrix::identity(2);
}
