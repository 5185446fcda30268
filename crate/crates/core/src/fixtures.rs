//! Replay table of the worked examples: each row recomputes a published
//! value and compares it with the expected one.

use serde::Serialize;

use crate::builtins::{corner_projection, identity, phi_a, phi_abcd, phi_alpha, sigma, tau};
use crate::calculus::sampling::{random_cp, random_sp1};
use crate::calculus::{
    check_one_sided_equivalences, find_nonpositive_dual_member, in_cone, in_dual, in_ldual, in_rdual, AugmentedCone,
    Closure, Cone,
};
use crate::cones::{
    is_decomposable, is_positive_k, is_ppt_map, is_superpositive_k, ConeId, MembershipVerdict, SolverOptions, Status,
};
use crate::error::Result;
use crate::maps::{compose, map_pairing, HpMap, KrausTerm};
use crate::matrix::{c, real_matrix, unit, BipartiteMatrix, CMat};
use crate::ppt_square::{block_schur_sum, equivalence_sampler, run_trials, sample_positive_map, sample_ppt_map, Statement};
use crate::random::rng;

const EXACT: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

type Check = fn(&SolverOptions) -> Result<(String, String, bool)>;

fn status(v: &MembershipVerdict) -> String {
    v.status.to_string()
}

fn choi_distance(phi: &HpMap, rows: &[&[f64]]) -> f64 {
    (phi.choi().as_matrix() - real_matrix(rows)).norm()
}

fn matches_printed(phi: &HpMap, rows: &[&[f64]]) -> (String, String, bool) {
    let d = choi_distance(phi, rows);
    ("printed Choi matrix".into(), format!("distance {d:.1e}"), d < EXACT)
}

fn sigma_star_rows() -> [[f64; 4]; 4] {
    [[1., 0., 0., 1.], [0., 1., 0., 0.], [0., 0., 0., 0.], [1., 0., 0., 1.]]
}

fn rows(m: &[[f64; 4]; 4]) -> Vec<&[f64]> {
    m.iter().map(|r| r.as_slice()).collect()
}

fn pairing_with_sigma(_: &SolverOptions) -> Result<(String, String, bool)> {
    let (a, b, cc, d) = (0.7, 1.3, 0.4, 2.1);
    let got = map_pairing(&phi_abcd(a, b, cc, d), &sigma())?;
    let want = a + cc + d - 2.0;
    Ok((format!("a+c+d-2 = {want}"), format!("{got}"), (got - want).abs() < EXACT))
}

fn sigma_from_kraus(_: &SolverOptions) -> Result<(String, String, bool)> {
    let s = HpMap::from_kraus(&[KrausTerm::positive(CMat::identity(2, 2)), KrausTerm::positive(unit(2, 1, 0))])?;
    let want = [[1., 0., 0., 1.], [0., 0., 0., 0.], [0., 0., 1., 0.], [1., 0., 0., 1.]];
    Ok(matches_printed(&s, &rows(&want)))
}

fn sigma_flip(_: &SolverOptions) -> Result<(String, String, bool)> {
    let f = HpMap::from_choi(sigma().choi().flip())?;
    Ok(matches_printed(&f, &rows(&sigma_star_rows())))
}

fn sigma_adjoint(_: &SolverOptions) -> Result<(String, String, bool)> {
    Ok(matches_printed(&sigma().adjoint(), &rows(&sigma_star_rows())))
}

fn tau_self_adjoint(_: &SolverOptions) -> Result<(String, String, bool)> {
    let d = (tau().adjoint().choi().as_matrix() - tau().choi().as_matrix()).norm();
    Ok(("τ* = τ".into(), format!("distance {d:.1e}"), d < EXACT))
}

fn family_on_rank_one(_: &SolverOptions) -> Result<(String, String, bool)> {
    let (a, b, cc, d) = (0.3, 1.7, 0.9, 0.6);
    let (x, y) = (c(0.8, -0.3), c(-0.2, 1.1));
    let xi = CMat::from_column_slice(2, 1, &[x, y]);
    let got = phi_abcd(a, b, cc, d).apply_matrix(&(&xi * xi.adjoint()))?;
    let (nx, ny) = (x.norm_sqr(), y.norm_sqr());
    let want = CMat::from_row_slice(
        2,
        2,
        &[c(a * nx + cc * ny, 0.0), -x * y.conj(), -x.conj() * y, c(b * nx + d * ny, 0.0)],
    );
    let dist = (got - want).norm();
    Ok(("closed-form image".into(), format!("distance {dist:.1e}"), dist < EXACT))
}

fn sigma_star_after_family(_: &SolverOptions) -> Result<(String, String, bool)> {
    let (a, b, cc, d) = (0.3, 1.7, 0.9, 0.6);
    let got = compose(&sigma().adjoint(), &phi_abcd(a, b, cc, d))?;
    let want = [[a, 0., 0., -1.], [0., a + b, 0., 0.], [0., 0., cc, 0.], [-1., 0., 0., cc + d]];
    Ok(matches_printed(&got, &rows(&want)))
}

fn family_after_sigma_star(_: &SolverOptions) -> Result<(String, String, bool)> {
    let (a, b, cc, d) = (0.3, 1.7, 0.9, 0.6);
    let got = compose(&phi_abcd(a, b, cc, d), &sigma().adjoint())?;
    let want = [[a + cc, 0., 0., -1.], [0., b + d, 0., 0.], [0., 0., cc, 0.], [-1., 0., 0., d]];
    Ok(matches_printed(&got, &rows(&want)))
}

fn alpha_sandwich(_: &SolverOptions) -> Result<(String, String, bool)> {
    let (al, be) = (1.7, 0.4);
    let got = compose(&phi_alpha(be), &compose(&sigma(), &phi_alpha(al))?)?;
    let want = [[al * be, 0., 0., 1.], [0., 0., 0., 0.], [0., 0., be / al, 0.], [1., 0., 0., 1. / (al * be)]];
    Ok(matches_printed(&got, &rows(&want)))
}

fn alpha_pairing(_: &SolverOptions) -> Result<(String, String, bool)> {
    let psi = phi_a(std::f64::consts::FRAC_1_SQRT_2);
    let value = |al: f64, be: f64| -> Result<f64> {
        map_pairing(&psi, &compose(&phi_alpha(be), &compose(&sigma(), &phi_alpha(al))?)?)
    };
    let closed = |al: f64, be: f64| std::f64::consts::FRAC_1_SQRT_2 * (al * be + be / al + 1.0 / (al * be));
    let (al, be) = (1.3, 0.8);
    let err = (value(al, be)? - (closed(al, be) - 2.0)).abs();
    let at_two = closed(2.0, 1.0 / 5f64.sqrt());
    let neg = value(2.0, 1.0 / 5f64.sqrt())?;
    Ok((
        "diagonal sum minus corner weight 2; below 2 at α=2".into(),
        format!("error {err:.1e}; diagonal sum {at_two:.4}; pairing {neg:.4}"),
        err < 1e-9 && at_two < 2.0 - 1e-3 && neg < 0.0,
    ))
}

fn choi_of_composition(_: &SolverOptions) -> Result<(String, String, bool)> {
    let mut r = rng(17, 0);
    let phi = random_cp(&mut r, 2, 3)?;
    let psi = random_cp(&mut r, 3, 2)?;
    let amp = psi.ampliate_left(phi.choi())?;
    let comp = compose(&psi, &phi)?;
    let schur = block_schur_sum(&phi.choi().flip(), psi.choi())?;
    let d1 = (amp.as_matrix() - comp.choi().as_matrix()).norm();
    let d2 = (schur.as_matrix() - comp.choi().as_matrix()).norm();
    Ok(("(1⊗ψ)(C_φ) = Σ φ*(e_kl)⊗ψ(e_kl) = C_ψ∘φ".into(), format!("{d1:.1e}, {d2:.1e}"), d1.max(d2) < 1e-10))
}

fn tau_entangled(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let gamma = tau().choi().partial_transpose().min_eigenvalue()?;
    let ppt = is_ppt_map(&tau(), opts)?;
    let sp1 = is_superpositive_k(&tau(), 1, opts)?;
    Ok((
        "λmin(Γ C_τ) < 0; not PPT; not SP1".into(),
        format!("{gamma:.4}; {}; {}", status(&ppt), status(&sp1)),
        gamma < 0.0 && ppt.is_non_member() && sp1.is_non_member(),
    ))
}

fn family_positivity(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let cases = [
        (0.25, 0.2, 0.2, 0.25, false),
        (1.0, 0.25, 0.25, 0.6, true),
        (2.0, 0.1, 0.1, 0.45, true),
        (2.0, 0.1, 0.1, 0.3, false),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (a, b, cc, d, want) in cases {
        let v = is_positive_k(&phi_abcd(a, b, cc, d), 1, opts)?;
        got.push(status(&v));
        ok &= v.is_member() == want && (want || v.is_non_member());
    }
    Ok(("√(ad)+√(bc) ≥ 1: no, yes, yes, no".into(), got.join(", "), ok))
}

fn phi_a_positivity(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let lo = is_positive_k(&phi_a(0.49), 1, opts)?;
    let hi = is_positive_k(&phi_a(0.51), 1, opts)?;
    Ok((
        "a=0.49 non-member, a=0.51 member".into(),
        format!("{}, {}", status(&lo), status(&hi)),
        lo.is_non_member() && hi.is_member(),
    ))
}

fn small_ppt_is_separable(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let mut members = 0;
    for (i, (da, db)) in [(2, 2), (2, 3), (3, 2)].into_iter().enumerate() {
        let phi = sample_ppt_map(da, db, 100 + i as u64)?;
        members += usize::from(is_superpositive_k(&phi, 1, opts)?.is_member());
    }
    Ok(("3 of 3 PPT maps are SP1".into(), format!("{members} of 3"), members == 3))
}

fn positive_is_decomposable(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let mut got = Vec::new();
    let mut ok = true;
    for (a, b, cc, d) in [(0.5, 1.0, 1.0, 2.0), (1.0, 0.3, 0.3, 1.0), (0.6, 0.6, 0.6, 0.6)] {
        let v = is_decomposable(&phi_abcd(a, b, cc, d), opts)?;
        got.push(status(&v));
        ok &= v.is_member();
    }
    Ok(("member, member, member".into(), got.join(", "), ok))
}

fn example_dual(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let k = AugmentedCone::example();
    let inside = in_dual(&k, &phi_abcd(1.0, 1.0, 0.5, 0.6), opts)?;
    let outside = in_dual(&k, &phi_abcd(1.0, 1.0, 0.5, 0.4), opts)?;
    Ok((
        "a+c+d = 2.1 member, 1.9 non-member".into(),
        format!("{}, {}", status(&inside), status(&outside)),
        inside.is_member() && outside.is_non_member(),
    ))
}

fn phi_a_dual(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let k = AugmentedCone::example();
    let lo = in_dual(&k, &phi_a(0.65), opts)?;
    let hi = in_dual(&k, &phi_a(0.68), opts)?;
    Ok((
        "a=0.65 non-member, a=0.68 member".into(),
        format!("{}, {}", status(&lo), status(&hi)),
        lo.is_non_member() && hi.is_member(),
    ))
}

fn counterexamples(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let k = AugmentedCone::example();
    let p = phi_abcd(1.0 / 3.0, 1.0, 1.0, 1.0);
    let q = phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0);
    let v = [in_ldual(&k, &p, opts)?, in_rdual(&k, &p, opts)?, in_rdual(&k, &q, opts)?, in_ldual(&k, &q, opts)?];
    let ok = v[0].is_member() && v[1].is_non_member() && v[2].is_member() && v[3].is_non_member();
    Ok((
        "[1/3,1,1,1]: ldual member, rdual non-member; [1,1,1,1/3]: rdual member, ldual non-member".into(),
        v.iter().map(status).collect::<Vec<_>>().join(", "),
        ok,
    ))
}

fn phi_a_one_sided(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let k = AugmentedCone::example();
    let mut got = Vec::new();
    let mut ok = true;
    for (a, want) in [(0.70, false), (0.71, true)] {
        let r = in_rdual(&k, &phi_a(a), opts)?;
        let l = in_ldual(&k, &phi_a(a), opts)?;
        got.push(format!("{}/{}", status(&r), status(&l)));
        ok &= r.is_member() == want && l.is_member() == want && (want || (r.is_non_member() && l.is_non_member()));
    }
    Ok(("a=0.70 outside both, a=0.71 inside both".into(), got.join(", "), ok))
}

fn tau_outside_example(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let v = in_cone(&AugmentedCone::example(), &tau(), opts)?;
    let cp = crate::cones::is_cp(&tau(), opts)?;
    Ok((
        "τ CP, τ ∉ K with gap > 1e-6".into(),
        format!("{}, {} (gap {:.3e})", status(&cp), status(&v), v.gap),
        cp.is_member() && v.is_non_member() && -v.gap > 1e-6,
    ))
}

fn harness_flags_counterexamples(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let probes = [phi_abcd(1.0 / 3.0, 1.0, 1.0, 1.0), phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0)];
    let cone = Cone::Augmented(AugmentedCone::example());
    let rep = check_one_sided_equivalences(&cone, (2, 2), 30, 7, &probes, opts)?;
    let failed = rep.failed_checks();
    Ok((
        "ldual ⊆ rdual, rdual ⊆ ldual".into(),
        failed.join(", "),
        failed == ["ldual ⊆ rdual", "rdual ⊆ ldual"],
    ))
}

fn nonpositive_dual_member(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let k = AugmentedCone::new(2, 2, vec![corner_projection(2)], false)?.with_closure(Closure::Left);
    let found = find_nonpositive_dual_member(&Cone::Augmented(k), (2, 2), 200, 1, opts)?;
    let ok = match &found {
        Some(phi) => is_positive_k(phi, 1, opts)?.is_non_member(),
        None => false,
    };
    Ok(("a dual member that is not positive".into(), if ok { "found".into() } else { "none".into() }, ok))
}

fn right_dual_ampliation(_: &SolverOptions) -> Result<(String, String, bool)> {
    let phi = phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0);
    let m = sigma().adjoint().ampliate_left(phi.choi())?.min_eigenvalue()?;
    Ok(("(1⊗σ*)(C_φ) PSD".into(), format!("λmin {m:.4}"), m >= -1e-12))
}

fn separable_under_positive_maps(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let mut r = rng(23, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..10 {
        let rho = random_sp1(&mut r, 2, 2)?;
        let s = sample_positive_map(&mut r, 2, opts)?;
        worst = worst.min(s.ampliate_right(rho.choi())?.min_eigenvalue()?);
    }
    Ok(("(σ⊗1)(ϱ) PSD for 10 samples".into(), format!("λmin {worst:.3e}"), worst >= -1e-10))
}

fn eb_ampliation_separable(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let mut r = rng(29, 0);
    let mut members = 0;
    for _ in 0..10 {
        let phi = random_sp1(&mut r, 2, 2)?;
        let psi = random_cp(&mut r, 2, 2)?;
        let out = HpMap::from_choi(phi.ampliate_left(psi.choi())?)?;
        members += usize::from(is_superpositive_k(&out, 1, opts)?.is_member());
    }
    Ok(("10 of 10 separable".into(), format!("{members} of 10"), members == 10))
}

fn ppt_square_three(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let recs = run_trials(3, 3, 10, 31, opts)?;
    let refuted = recs.iter().filter(|r| r.eb == Status::NonMember).count();
    let unknown = recs.iter().filter(|r| r.eb == Status::Unknown).count();
    Ok(("0 certified failures in 10 trials".into(), format!("{refuted} failures, {unknown} unknown"), refuted == 0))
}

fn statement_two(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let rep = equivalence_sampler(Statement::Ii, 2, 20, 37, opts)?;
    Ok(("0 failures in 20 trials".into(), format!("{} failures, {} unknown", rep.failed, rep.unknown), rep.failed == 0))
}

fn cli_examples(opts: &SolverOptions) -> Result<(String, String, bool)> {
    let tau_ppt = crate::cones::is_member(ConeId::Ppt, &tau(), opts)?;
    let sep = is_superpositive_k(&HpMap::from_choi(BipartiteMatrix::kron(&unit(2, 0, 0), &unit(2, 0, 0))?)?, 1, opts)?;
    let cp = crate::cones::is_cp(&identity(2), opts)?;
    Ok((
        "τ ∉ PPT; e11⊗e11 ∈ SP1; id ∈ CP".into(),
        format!("{}, {}, {}", status(&tau_ppt), status(&sep), status(&cp)),
        tau_ppt.is_non_member() && sep.is_member() && cp.is_member(),
    ))
}

const TABLE: &[(&str, Check)] = &[
    ("pairing of phi_abcd with sigma", pairing_with_sigma),
    ("sigma from its Kraus operators", sigma_from_kraus),
    ("flip of the sigma Choi matrix", sigma_flip),
    ("adjoint of sigma", sigma_adjoint),
    ("tau is self-adjoint", tau_self_adjoint),
    ("phi_abcd on a rank-one projection", family_on_rank_one),
    ("sigma* after phi_abcd", sigma_star_after_family),
    ("phi_abcd after sigma*", family_after_sigma_star),
    ("phi_beta after sigma after phi_alpha", alpha_sandwich),
    ("pairing of psi with the alpha sandwich", alpha_pairing),
    ("Choi matrix of a composition", choi_of_composition),
    ("tau is entangled", tau_entangled),
    ("positivity of phi_abcd", family_positivity),
    ("positivity threshold of phi_a", phi_a_positivity),
    ("small PPT maps are separable", small_ppt_is_separable),
    ("positive qubit maps are decomposable", positive_is_decomposable),
    ("dual of the example cone", example_dual),
    ("dual threshold of phi_a", phi_a_dual),
    ("one-sided counterexamples", counterexamples),
    ("one-sided threshold of phi_a", phi_a_one_sided),
    ("tau lies outside the example cone", tau_outside_example),
    ("equivalence harness flags the counterexamples", harness_flags_counterexamples),
    ("dual of CP∘{e11⊗e11} holds a non-positive map", nonpositive_dual_member),
    ("right dual member survives 1⊗σ*", right_dual_ampliation),
    ("positive maps keep separable states positive", separable_under_positive_maps),
    ("EB ampliations are separable", eb_ampliation_separable),
    ("PPT-square at 3x3", ppt_square_three),
    ("PPT∘P1 ⊂ DEC at 2x2", statement_two),
    ("command-line membership examples", cli_examples),
];

/// Runs every row of the table. Solver errors count as failures.
pub fn run_all(opts: &SolverOptions) -> Vec<FixtureOutcome> {
    TABLE
        .iter()
        .map(|(name, check)| match check(opts) {
            Ok((expected, computed, passed)) => FixtureOutcome { name, expected, computed, passed },
            Err(e) => FixtureOutcome { name, expected: "no error".into(), computed: e.to_string(), passed: false },
        })
        .collect()
}

pub fn fixture_names() -> Vec<&'static str> {
    TABLE.iter().map(|(n, _)| *n).collect()
}

