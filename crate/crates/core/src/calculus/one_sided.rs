use serde::{Deserialize, Serialize};

use crate::cones::{is_cp, is_positive_k, MembershipVerdict, SolverOptions, Status};
use crate::error::Result;
use crate::json::MapJson;
use crate::maps::{compose, HpMap};
use crate::random::rng;

use super::augmented::Cone;
use super::sampling::{random_candidate, random_cp, random_member};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub inconclusive: usize,
    /// Maps exhibiting each violation, capped at a few per check.
    pub witnesses: Vec<Vec<MapJson>>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), trials: 0, violations: 0, inconclusive: 0, witnesses: Vec::new() }
    }

    /// `premise ⇒ conclusion`, counted only when the premise holds.
    fn record(&mut self, conclusion: &MembershipVerdict, witness: &[&HpMap]) {
        self.trials += 1;
        match conclusion.status {
            Status::Member => {}
            Status::Unknown => self.inconclusive += 1,
            Status::NonMember => {
                self.violations += 1;
                if self.witnesses.len() < 4 {
                    self.witnesses.push(witness.iter().map(|m| MapJson::from_map(m)).collect());
                }
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub samples: usize,
    pub right_stable: bool,
    pub left_stable: bool,
    pub dual_pool: usize,
    pub checks: Vec<CheckResult>,
}

impl EquivalenceReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect()
    }

    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

struct DualSample {
    map: HpMap,
    dual: MembershipVerdict,
    rdual: MembershipVerdict,
    ldual: MembershipVerdict,
}

/// Sampling falsifier for the inclusions between `K°`, `K^▷ = (K∘CP)°` and
/// `K^◁ = (CP∘K)°`, plus the stability equivalences when `K` claims them.
/// `probes` are tested first as dual-side candidates.
pub fn check_one_sided_equivalences(
    cone: &Cone,
    dims: (usize, usize),
    samples: usize,
    seed: u64,
    probes: &[HpMap],
    opts: &SolverOptions,
) -> Result<EquivalenceReport> {
    let (da, db) = dims;
    let mut r = rng(seed, 0x0e51);
    let mut pool = Vec::new();
    let mut candidates: Vec<HpMap> = probes.to_vec();
    while candidates.len() < samples {
        candidates.push(random_candidate(&mut r, da, db)?);
    }
    for map in candidates {
        let dual = cone.in_dual(&map, opts)?;
        let rdual = cone.in_rdual(&map, opts)?;
        let ldual = cone.in_ldual(&map, opts)?;
        pool.push(DualSample { map, dual, rdual, ldual });
    }

    let mut s1 = CheckResult::new("rdual ⊆ dual");
    let mut s2 = CheckResult::new("ldual ⊆ dual");
    let mut i1 = CheckResult::new("ldual ⊆ rdual");
    let mut i2 = CheckResult::new("rdual ⊆ ldual");
    for d in &pool {
        if d.rdual.is_member() {
            s1.record(&d.dual, &[&d.map]);
            i2.record(&d.ldual, &[&d.map]);
        }
        if d.ldual.is_member() {
            s2.record(&d.dual, &[&d.map]);
            i1.record(&d.rdual, &[&d.map]);
        }
    }
    let mut checks = vec![s1, s2, i1, i2];

    let duals: Vec<&HpMap> = pool.iter().filter(|d| d.dual.is_member()).map(|d| &d.map).collect();
    let right = cone.right_stable();
    let left = cone.left_stable();
    if (right || left) && !duals.is_empty() {
        let mut members = Vec::with_capacity(samples);
        for _ in 0..samples {
            members.push(random_member(cone, &mut r, da, db)?);
        }
        let pick = |i: usize| duals[i % duals.len()];
        if right {
            let mut c1 = CheckResult::new("K∘CP ⊆ K");
            let mut c2 = CheckResult::new("K°∘CP ⊆ K°");
            let mut c3 = CheckResult::new("K*∘K° ⊆ CP");
            let mut c4 = CheckResult::new("K° ⊆ K^▷");
            let mut c5 = CheckResult::new("K ⊆ (K°)^▷");
            for (i, psi) in members.iter().enumerate() {
                let chi = pick(i);
                let w = random_cp(&mut r, da, da)?;
                let comp = compose(psi, &w)?;
                c1.record(&cone.contains(&comp, opts)?, &[psi, &w]);
                let dw = compose(chi, &random_cp(&mut r, da, da)?)?;
                c2.record(&cone.in_dual(&dw, opts)?, &[chi, &dw]);
                c3.record(&is_cp(&compose(&psi.adjoint(), chi)?, opts)?, &[psi, chi]);
                c4.record(&cone.in_rdual(chi, opts)?, &[chi]);
                c5.record(&is_cp(&compose(&chi.adjoint(), psi)?, opts)?, &[psi, chi]);
            }
            checks.extend([c1, c2, c3, c4, c5]);
        }
        if left {
            let mut c1 = CheckResult::new("CP∘K ⊆ K");
            let mut c2 = CheckResult::new("CP∘K° ⊆ K°");
            let mut c3 = CheckResult::new("K°∘K* ⊆ CP");
            let mut c4 = CheckResult::new("K° ⊆ K^◁");
            let mut c5 = CheckResult::new("K ⊆ (K°)^◁");
            for (i, psi) in members.iter().enumerate() {
                let chi = pick(i);
                let w = random_cp(&mut r, db, db)?;
                let comp = compose(&w, psi)?;
                c1.record(&cone.contains(&comp, opts)?, &[psi, &w]);
                let wd = compose(&random_cp(&mut r, db, db)?, chi)?;
                c2.record(&cone.in_dual(&wd, opts)?, &[chi, &wd]);
                c3.record(&is_cp(&compose(chi, &psi.adjoint())?, opts)?, &[psi, chi]);
                c4.record(&cone.in_ldual(chi, opts)?, &[chi]);
                c5.record(&is_cp(&compose(psi, &chi.adjoint())?, opts)?, &[psi, chi]);
            }
            checks.extend([c1, c2, c3, c4, c5]);
        }
    }
    Ok(EquivalenceReport { seed, samples, right_stable: right, left_stable: left, dual_pool: duals.len(), checks })
}

/// Searches for a dual-cone member that is not a positive map.
pub fn find_nonpositive_dual_member(
    cone: &Cone,
    dims: (usize, usize),
    samples: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<Option<HpMap>> {
    let (da, db) = dims;
    let mut r = rng(seed, 0xd0a1);
    for _ in 0..samples {
        let n = da * db;
        let phi = HpMap::from_choi_matrix(da, db, crate::random::random_hermitian(&mut r, n))?;
        if cone.in_dual(&phi, opts)?.is_member() && is_positive_k(&phi, 1, opts)?.is_non_member() {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}
