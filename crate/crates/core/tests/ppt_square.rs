use mapcone::builtins::corner_projection;
use mapcone::ppt_square::{
    block_schur_sum, choi_hash, equivalence_sampler, ppt_square_trial, read_ledger, run_trials, sample_ppt_map,
    write_ledger, Statement,
};
use mapcone::{compose, is_ppt_map, is_superpositive_k, Error, SolverOptions, Status};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn sampled_ppt_maps_are_ppt_and_reproducible() {
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        let phi = sample_ppt_map(da, db, 11).unwrap();
        assert_eq!(is_ppt_map(&phi, &opts()).unwrap().status, Status::Member);
        assert!((phi.choi().trace() - 1.0).abs() < 1e-12);
        assert_eq!(choi_hash(&phi), choi_hash(&sample_ppt_map(da, db, 11).unwrap()));
        assert_ne!(choi_hash(&phi), choi_hash(&sample_ppt_map(da, db, 12).unwrap()));
    }
}

#[test]
fn self_composition_at_two_qubits_is_entanglement_breaking() {
    for seed in 0..10 {
        let phi = sample_ppt_map(2, 2, seed).unwrap();
        let v = is_superpositive_k(&compose(&phi, &phi).unwrap(), 1, &opts()).unwrap();
        assert_eq!(v.status, Status::Member, "seed {seed}");
    }
}

#[test]
fn schur_form_matches_composition() {
    let phi = sample_ppt_map(2, 3, 1).unwrap();
    let psi = sample_ppt_map(3, 2, 2).unwrap();
    let s = block_schur_sum(&phi.choi().flip(), psi.choi()).unwrap();
    assert!((s.as_matrix() - compose(&psi, &phi).unwrap().choi().as_matrix()).norm() < 1e-10);
}

#[test]
fn trials_reject_non_ppt_inputs() {
    let tau = mapcone::builtins::tau();
    let err = ppt_square_trial(&tau, &tau, &opts()).unwrap_err();
    assert!(matches!(err, Error::NotPpt(_)));
}

#[test]
fn rank_one_corner_maps_compose_to_eb() {
    let e = corner_projection(2);
    let rec = ppt_square_trial(&e, &e, &opts()).unwrap();
    assert_eq!(rec.eb, Status::Member);
    assert!(!rec.is_candidate());
}

#[test]
fn trials_replay_and_ledger_round_trips() {
    let recs = run_trials(2, 2, 20, 3, &opts()).unwrap();
    assert!(recs.iter().all(|r| r.eb == Status::Member && r.ppt == Status::Member));
    assert!(recs.iter().all(|r| r.schur_deviation < 1e-10));
    let par = run_trials(2, 2, 20, 3, &SolverOptions { threads: 3, ..opts() }).unwrap();
    let status = |v: &[mapcone::ppt_square::TrialRecord]| v.iter().map(|r| (r.eb, r.phi_hash.clone())).collect::<Vec<_>>();
    assert_eq!(status(&recs), status(&par));
    let mut buf = Vec::new();
    write_ledger(&recs, &mut buf).unwrap();
    assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 20);
    assert_eq!(read_ledger(buf.as_slice()).unwrap(), recs);
}

#[test]
fn statement_samplers_at_two_qubits() {
    for s in [Statement::I, Statement::Ii, Statement::Iii, Statement::Vi, Statement::Vii] {
        let rep = equivalence_sampler(s, 2, 15, 5, &opts()).unwrap();
        assert_eq!(rep.failed, 0, "{s}: {rep:?}");
        eprintln!("{s}: pass {} unknown {}", rep.passed, rep.unknown);
    }
}


#[test]
fn fixture_table_passes() {
    let t = std::time::Instant::now();
    let out = mapcone::fixtures::run_all(&SolverOptions::default().with_restarts(16));
    for o in &out {
        eprintln!("{:<50} {:<6} {} | {}", o.name, o.passed, o.expected, o.computed);
    }
    eprintln!("{:?}", t.elapsed());
    assert!(out.iter().all(|o| o.passed));
}
