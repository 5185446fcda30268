use serde::{Deserialize, Serialize};

use crate::cones::{MembershipVerdict, SolverOptions, Status};
use crate::error::Result;
use crate::maps::HpMap;
use crate::random::rng;

use super::augmented::{AugmentedCone, Cone};
use super::sampling::{random_cp, random_member, random_sp1};
use crate::random::ginibre;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateResult {
    pub label: String,
    /// `None` when some sampled instance was inconclusive and none failed.
    pub holds: Option<bool>,
    pub trials: usize,
    /// Index of the first failing sample.
    pub first_failure: Option<usize>,
    /// Decided by finitely many exact checks rather than by sampling.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmpliationReport {
    pub side: Side,
    pub samples: usize,
    pub seed: u64,
    pub predicates: Vec<PredicateResult>,
}

impl AmpliationReport {
    /// Sampled predicates can only be falsified, so a disagreement is a
    /// failure found while an exhaustively decided predicate holds.
    pub fn agree(&self) -> bool {
        let established = self.predicates.iter().any(|p| p.exhaustive && p.holds == Some(true));
        let falsified = self.predicates.iter().any(|p| p.holds == Some(false));
        !(established && falsified)
    }
}

struct Tally {
    label: String,
    exhaustive: bool,
    trials: usize,
    unknown: bool,
    first_failure: Option<usize>,
}

impl Tally {
    fn new(label: &str) -> Self {
        Self { label: label.into(), exhaustive: false, trials: 0, unknown: false, first_failure: None }
    }

    fn push(&mut self, status: Status) {
        match status {
            Status::Member => {}
            Status::Unknown => self.unknown = true,
            Status::NonMember => {
                if self.first_failure.is_none() {
                    self.first_failure = Some(self.trials);
                }
            }
        }
        self.trials += 1;
    }

    fn push_psd(&mut self, min_eig: f64, scale: f64, opts: &SolverOptions) {
        let ok = min_eig >= -opts.tol * (1.0 + scale);
        self.push(if ok { Status::Member } else { Status::NonMember });
    }

    fn finish(self) -> PredicateResult {
        let holds = if self.first_failure.is_some() {
            Some(false)
        } else if self.unknown {
            None
        } else {
            Some(true)
        };
        PredicateResult {
            label: self.label,
            holds,
            trials: self.trials,
            first_failure: self.first_failure,
            exhaustive: self.exhaustive,
        }
    }
}

/// Alternates full-rank samples with extreme rays `Ad_V`.
fn sample_cp(r: &mut impl Rng, d: usize, i: usize) -> Result<HpMap> {
    if i % 2 == 0 {
        random_cp(r, d, d)
    } else {
        HpMap::ad(&ginibre(r, d, d))
    }
}

fn verdict_status(v: &MembershipVerdict) -> Status {
    v.status
}

fn cone_samples(cone: &Cone, da: usize, db: usize, samples: usize, seed: u64) -> Result<Vec<HpMap>> {
    let mut r = rng(seed, 0xa3);
    let mut out: Vec<HpMap> = match cone {
        Cone::Augmented(k) => augmented_generators(k),
        Cone::Builtin(_) => Vec::new(),
    };
    if let Cone::Augmented(k) = cone {
        if k.include_sp1() {
            for _ in 0..samples {
                out.push(random_sp1(&mut r, da, db)?);
            }
        }
    }
    for _ in 0..samples {
        out.push(random_member(cone, &mut r, da, db)?);
    }
    Ok(out)
}

fn augmented_generators(k: &AugmentedCone) -> Vec<HpMap> {
    k.generators().to_vec()
}

/// Evaluates the five equivalent characterizations of `φ ∈ K^▷` (right) or
/// `φ ∈ K^◁` (left) on sampled CP maps and cone members.
pub fn ampliation_crosscheck(
    cone: &Cone,
    phi: &HpMap,
    side: Side,
    samples: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<AmpliationReport> {
    let (da, db) = phi.dims();
    let mut r = rng(seed, 0xa1);
    let members = cone_samples(cone, da, db, samples, seed)?;
    let phi_star = phi.adjoint();
    let mut t1 = Tally::new("(i) one-sided dual membership");
    t1.exhaustive = true;
    let mut t2 = Tally::new("(ii) ampliation of CP Choi matrices lands in the dual");
    let mut t3 = Tally::new("(iii) ampliation of the adjoint's Choi matrix lands in the adjoint dual");
    let mut t4 = Tally::new("(iv) cone members ampliated against the Choi matrix stay positive");
    let mut t5 = Tally::new("(v) the adjoint ampliated against cone members stays positive");

    match side {
        Side::Right => {
            t1.push(verdict_status(&cone.in_rdual(phi, opts)?));
            for i in 0..samples {
                let psi = sample_cp(&mut r, da, i)?;
                // (1_A ⊗ φ)(C_ψ)
                let x = phi.ampliate_left(psi.choi())?;
                t2.push(verdict_status(&cone.in_dual(&HpMap::from_choi(x)?, opts)?));
                // (1_B ⊗ ψ)(C_{φ*}) ∈ C_{(K*)°}, i.e. its adjoint lies in K°
                let y = HpMap::from_choi(psi.ampliate_left(phi_star.choi())?)?;
                t3.push(verdict_status(&cone.in_dual(&y.adjoint(), opts)?));
            }
            for s in &members {
                let a = s.adjoint().ampliate_left(phi.choi())?;
                t4.push_psd(a.min_eigenvalue()?, a.as_matrix().norm(), opts);
                let b = phi_star.ampliate_left(s.choi())?;
                t5.push_psd(b.min_eigenvalue()?, b.as_matrix().norm(), opts);
            }
        }
        Side::Left => {
            t1.push(verdict_status(&cone.in_ldual(phi, opts)?));
            for i in 0..samples {
                let psi = sample_cp(&mut r, db, i)?;
                // (φ* ⊗ 1_B)(C_ψ)
                let x = phi_star.ampliate_right(psi.choi())?;
                t2.push(verdict_status(&cone.in_dual(&HpMap::from_choi(x)?, opts)?));
                // (ψ ⊗ 1_A)(C_{φ*})
                let y = HpMap::from_choi(psi.ampliate_right(phi_star.choi())?)?;
                t3.push(verdict_status(&cone.in_dual(&y.adjoint(), opts)?));
            }
            for s in &members {
                let a = s.ampliate_right(phi.choi())?;
                t4.push_psd(a.min_eigenvalue()?, a.as_matrix().norm(), opts);
                let b = phi.ampliate_right(s.choi())?;
                t5.push_psd(b.min_eigenvalue()?, b.as_matrix().norm(), opts);
            }
        }
    }
    Ok(AmpliationReport {
        side,
        samples,
        seed,
        predicates: vec![t1.finish(), t2.finish(), t3.finish(), t4.finish(), t5.finish()],
    })
}
