//! Experiments around composing PPT maps: sampled trials of the PPT-square
//! property and sampled tests of its equivalent reformulations.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::builtins::{phi_abcd, transpose_map};
use crate::calculus::sampling::random_cp;
use crate::cones::{
    is_cp, is_decomposable, is_positive_k, is_ppt_map, is_superpositive_k, project_ppt, MembershipVerdict,
    SolverOptions, Status,
};
use crate::error::{dim_mismatch, Error, Result};
use crate::maps::{compose, HpMap};
use crate::matrix::{kron, re, BipartiteMatrix, CMat};
use crate::random::{ginibre, random_hermitian, random_unitary, rng};

/// Weight of the maximally mixed state blended into sampled PPT Choi matrices.
const INTERIOR_MIX: f64 = 0.05;
const RESAMPLE_LIMIT: u64 = 64;

/// `Σ_kl x_kl ⊗ y_kl` for `X = Σ e_kl ⊗ x_kl ∈ M_B⊗M_A` and
/// `Y = Σ e_kl ⊗ y_kl ∈ M_B⊗M_C`.
pub fn block_schur_sum(x: &BipartiteMatrix, y: &BipartiteMatrix) -> Result<BipartiteMatrix> {
    if x.dim_a() != y.dim_a() {
        return Err(dim_mismatch(format!("block Schur sum of {:?} and {:?}", x.dims(), y.dims())));
    }
    let (b, a, c) = (x.dim_a(), x.dim_b(), y.dim_b());
    let mut acc = BipartiteMatrix::zeros(a, c).into_matrix();
    for k in 0..b {
        for l in 0..b {
            acc += kron(&x.block(k, l), &y.block(k, l));
        }
    }
    BipartiteMatrix::new(a, c, acc)
}

/// Hex SHA-256 of the dimensions and the little-endian entries of a Choi matrix.
pub fn choi_hash(phi: &HpMap) -> String {
    let mut h = Sha256::new();
    let (da, db) = phi.dims();
    h.update((da as u64).to_le_bytes());
    h.update((db as u64).to_le_bytes());
    for z in phi.choi().as_matrix().iter() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// A trace-one PPT map `M_A → M_B`: a random Hermitian matrix projected onto
/// PSD ∩ Γ-PSD, then blended with the maximally mixed state.
pub fn sample_ppt_map(dim_a: usize, dim_b: usize, seed: u64) -> Result<HpMap> {
    if dim_a < 2 || dim_b < 2 {
        return Err(Error::InvalidArgument(format!("PPT sampling needs dimensions ≥ 2, got ({dim_a}, {dim_b})")));
    }
    let n = dim_a * dim_b;
    for attempt in 0..RESAMPLE_LIMIT {
        let mut r = rng(seed, attempt);
        let x = BipartiteMatrix::new(dim_a, dim_b, random_hermitian(&mut r, n) + CMat::identity(n, n) * re(0.5))?;
        let (p, converged) = project_ppt(&x, 4000, 1e-12)?;
        let t = p.trace();
        if !converged || t <= 1e-6 {
            continue;
        }
        let m = p.as_matrix() * re((1.0 - INTERIOR_MIX) / t) + CMat::identity(n, n) * re(INTERIOR_MIX / n as f64);
        return HpMap::from_choi_matrix(dim_a, dim_b, m);
    }
    Err(Error::InvalidArgument(format!("PPT projection did not converge for seed {seed}")))
}

/// Sub-seed `index` derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    rng(seed, index.wrapping_add(1 << 32)).next_u64()
}

pub const CANDIDATE_COUNTEREXAMPLE: &str = "CANDIDATE-COUNTEREXAMPLE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: Option<u64>,
    pub phi_seed: Option<u64>,
    pub psi_seed: Option<u64>,
    /// `(A, B)`: `φ: M_A → M_B`, `ψ: M_B → M_A`.
    pub dims: (usize, usize),
    pub phi_hash: String,
    pub psi_hash: String,
    pub ppt: Status,
    pub ppt_margin: f64,
    pub eb: Status,
    pub eb_margin: f64,
    /// Re-evaluated witness pairing behind a non-member EB verdict.
    pub witness_recheck: Option<f64>,
    /// Distance between the composite Choi matrix and its block-Schur form.
    pub schur_deviation: f64,
    pub flag: Option<String>,
    pub notes: Vec<String>,
}

impl TrialRecord {
    pub fn is_candidate(&self) -> bool {
        self.flag.as_deref() == Some(CANDIDATE_COUNTEREXAMPLE)
    }
}

fn require_ppt(phi: &HpMap, name: &str, opts: &SolverOptions) -> Result<()> {
    let v = is_ppt_map(phi, opts)?;
    if v.status != Status::Member {
        return Err(Error::NotPpt(format!("{name} has margin {:.3e}", v.gap)));
    }
    Ok(())
}

/// A non-member verdict survives only if its witness re-evaluates below
/// `-100·tol`; otherwise it is downgraded to unknown.
fn gate_refutation(v: &mut MembershipVerdict, target: &HpMap, opts: &SolverOptions) -> Result<Option<f64>> {
    if v.status != Status::NonMember {
        return Ok(None);
    }
    let recheck = v.recheck(target)?;
    if recheck.is_some_and(|x| x < -100.0 * opts.tol) {
        return Ok(recheck);
    }
    v.status = Status::Unknown;
    v.notes.push(format!("refutation did not survive the recheck ({recheck:?})"));
    Ok(recheck)
}

/// Tests whether `ψ ∘ φ` is entanglement breaking for PPT maps `φ`, `ψ`.
pub fn ppt_square_trial(phi: &HpMap, psi: &HpMap, opts: &SolverOptions) -> Result<TrialRecord> {
    if phi.dim_b() != psi.dim_a() {
        return Err(dim_mismatch(format!("cannot compose {:?} after {:?}", psi.dims(), phi.dims())));
    }
    require_ppt(phi, "φ", opts)?;
    require_ppt(psi, "ψ", opts)?;
    let comp = compose(psi, phi)?;
    let schur = block_schur_sum(&phi.choi().flip(), psi.choi())?;
    let schur_deviation = (schur.as_matrix() - comp.choi().as_matrix()).norm();
    let ppt = is_ppt_map(&comp, opts)?;
    let mut eb = is_superpositive_k(&comp, 1, opts)?;
    let witness_recheck = gate_refutation(&mut eb, &comp, opts)?;
    let flag = (eb.status == Status::NonMember).then(|| CANDIDATE_COUNTEREXAMPLE.to_string());
    Ok(TrialRecord {
        index: 0,
        seed: None,
        phi_seed: None,
        psi_seed: None,
        dims: phi.dims(),
        phi_hash: choi_hash(phi),
        psi_hash: choi_hash(psi),
        ppt: ppt.status,
        ppt_margin: ppt.gap,
        eb: eb.status,
        eb_margin: eb.gap,
        witness_recheck,
        schur_deviation,
        flag,
        notes: eb.notes,
    })
}

/// Runs `f(0..n)` on up to `threads` workers, keeping index order.
fn run_indexed<T: Send>(n: usize, threads: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let f = &f;
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| s.spawn(move || (w..n).step_by(threads).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, out) in h.join().expect("trial worker panicked") {
                slots[i] = Some(out);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every index is visited")).collect()
}

fn inner_options(opts: &SolverOptions) -> SolverOptions {
    SolverOptions { threads: 1, ..opts.clone() }
}

/// `trials` independent PPT-square trials; trial `t` draws `φ` and `ψ` from
/// sub-seeds of `seed`, so any record can be replayed alone.
pub fn run_trials(dim_a: usize, dim_b: usize, trials: usize, seed: u64, opts: &SolverOptions) -> Result<Vec<TrialRecord>> {
    let inner = inner_options(opts);
    run_indexed(trials, opts.threads, |t| {
        let phi_seed = derive_seed(seed, 2 * t as u64);
        let psi_seed = derive_seed(seed, 2 * t as u64 + 1);
        let phi = sample_ppt_map(dim_a, dim_b, phi_seed)?;
        let psi = sample_ppt_map(dim_b, dim_a, psi_seed)?;
        let mut rec = ppt_square_trial(&phi, &psi, &inner)?;
        rec.index = t;
        rec.seed = Some(seed);
        rec.phi_seed = Some(phi_seed);
        rec.psi_seed = Some(psi_seed);
        Ok(rec)
    })
}

pub fn write_ledger(records: &[TrialRecord], mut out: impl Write) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n").map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(())
}

pub fn read_ledger(input: impl BufRead) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// The seven equivalent forms of the PPT-square property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statement {
    /// `PPT ∘ PPT ⊂ SP₁`
    I,
    /// `PPT ∘ P₁ ⊂ DEC`
    Ii,
    /// `P₁ ∘ PPT ⊂ DEC`
    Iii,
    /// `PPT ∘ CP ∘ PPT ⊂ SP₁`
    Iv,
    /// `PPT ∘ DEC ∘ PPT ⊂ SP₁`
    V,
    /// `PPT ∘ P₁ ∘ PPT ⊂ CP`
    Vi,
    /// `PPT ∘ P₁ ∘ PPT ⊂ PPT`
    Vii,
}

impl Statement {
    pub const ALL: [Statement; 7] =
        [Statement::I, Statement::Ii, Statement::Iii, Statement::Iv, Statement::V, Statement::Vi, Statement::Vii];

    pub fn inclusion(self) -> &'static str {
        match self {
            Statement::I => "PPT∘PPT ⊂ SP1",
            Statement::Ii => "PPT∘P1 ⊂ DEC",
            Statement::Iii => "P1∘PPT ⊂ DEC",
            Statement::Iv => "PPT∘CP∘PPT ⊂ SP1",
            Statement::V => "PPT∘DEC∘PPT ⊂ SP1",
            Statement::Vi => "PPT∘P1∘PPT ⊂ CP",
            Statement::Vii => "PPT∘P1∘PPT ⊂ PPT",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Statement::I => "i",
            Statement::Ii => "ii",
            Statement::Iii => "iii",
            Statement::Iv => "iv",
            Statement::V => "v",
            Statement::Vi => "vi",
            Statement::Vii => "vii",
        };
        f.write_str(s)
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').to_ascii_lowercase();
        Statement::ALL
            .into_iter()
            .find(|st| st.to_string() == t)
            .ok_or_else(|| Error::Parse(format!("unknown statement {s:?}; expected one of i..vii")))
    }
}

/// A positive map on `M_d`: a member of the `φ_[a,b,c,d]` family with
/// `√(ad)+√(bc) ∈ [1, 1.5]`, conjugated by random unitaries on `M_2` and
/// compressed through random `2×d` factors above that size.
pub fn sample_positive_map(r: &mut impl Rng, d: usize, opts: &SolverOptions) -> Result<HpMap> {
    for _ in 0..RESAMPLE_LIMIT {
        let p: Vec<f64> = (0..4).map(|_| r.random_range(0.1..2.0)).collect();
        let s = (p[0] * p[3]).sqrt() + (p[1] * p[2]).sqrt();
        let k = r.random_range(1.0..1.5) / s;
        let core = phi_abcd(k * p[0], k * p[1], k * p[2], k * p[3]);
        let (pre, post) = if d == 2 {
            (random_unitary(r, 2), random_unitary(r, 2))
        } else {
            (ginibre(r, 2, d), ginibre(r, d, 2))
        };
        let phi = compose(&HpMap::ad(&post)?, &compose(&core, &HpMap::ad(&pre)?)?)?;
        let phi = phi.scale(1.0 / phi.choi().trace());
        if d > 3 {
            return Ok(phi);
        }
        if is_positive_k(&phi, 1, opts)?.status == Status::Member {
            return Ok(phi);
        }
    }
    Err(Error::InvalidArgument("could not sample a verified positive map".into()))
}

fn sample_dec(r: &mut impl Rng, d: usize) -> Result<HpMap> {
    let cp = random_cp(r, d, d)?;
    let ccp = compose(&transpose_map(d), &random_cp(r, d, d)?)?;
    let m = cp.add(&ccp)?;
    Ok(m.scale(1.0 / m.choi().trace()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplerReport {
    pub statement: Statement,
    pub inclusion: String,
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub unknown: usize,
    pub failed: usize,
    /// Trial index and verdict of every certified failure.
    pub witnesses: Vec<(usize, MembershipVerdict)>,
}

fn statement_trial(statement: Statement, d: usize, seed: u64, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let mut r = rng(seed, 0);
    let ppt = |i: u64| sample_ppt_map(d, d, derive_seed(seed, i));
    let target = match statement {
        Statement::I => compose(&ppt(1)?, &ppt(2)?)?,
        Statement::Ii => compose(&ppt(1)?, &sample_positive_map(&mut r, d, opts)?)?,
        Statement::Iii => compose(&sample_positive_map(&mut r, d, opts)?, &ppt(1)?)?,
        Statement::Iv => compose(&ppt(1)?, &compose(&random_cp(&mut r, d, d)?, &ppt(2)?)?)?,
        Statement::V => compose(&ppt(1)?, &compose(&sample_dec(&mut r, d)?, &ppt(2)?)?)?,
        Statement::Vi | Statement::Vii => {
            compose(&ppt(1)?, &compose(&sample_positive_map(&mut r, d, opts)?, &ppt(2)?)?)?
        }
    };
    let mut v = match statement {
        Statement::I | Statement::Iv | Statement::V => is_superpositive_k(&target, 1, opts)?,
        Statement::Ii | Statement::Iii => is_decomposable(&target, opts)?,
        Statement::Vi => is_cp(&target, opts)?,
        Statement::Vii => is_ppt_map(&target, opts)?,
    };
    gate_refutation(&mut v, &target, opts)?;
    Ok(v)
}

/// Samples the tuple required by `statement` on `M_d` and tests the stated
/// inclusion, counting passes, unknowns and certified failures.
pub fn equivalence_sampler(
    statement: Statement,
    d: usize,
    trials: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<SamplerReport> {
    let inner = inner_options(opts);
    let verdicts = run_indexed(trials, opts.threads, |t| statement_trial(statement, d, derive_seed(seed, t as u64), &inner))?;
    let mut report = SamplerReport {
        statement,
        inclusion: statement.inclusion().into(),
        dim: d,
        seed,
        trials,
        passed: 0,
        unknown: 0,
        failed: 0,
        witnesses: Vec::new(),
    };
    for (t, v) in verdicts.into_iter().enumerate() {
        match v.status {
            Status::Member => report.passed += 1,
            Status::Unknown => report.unknown += 1,
            Status::NonMember => {
                report.failed += 1;
                report.witnesses.push((t, v));
            }
        }
    }
    Ok(report)
}
