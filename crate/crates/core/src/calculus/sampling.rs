//! Random members of the cones used by the harnesses.

use rand::Rng;

use crate::builtins::phi_abcd;
use crate::cones::{project_ppt, ConeId};
use crate::error::Result;
use crate::maps::{compose, HpMap};
use crate::matrix::{c, kron, re, BipartiteMatrix, CMat};
use crate::random::{ginibre, random_hermitian, random_psd, random_vector};

use super::augmented::{AugmentedCone, Closure, Cone};

pub fn random_cp(r: &mut impl Rng, da: usize, db: usize) -> Result<HpMap> {
    let n = da * db;
    let rank = r.random_range(1..=n);
    HpMap::from_choi_matrix(da, db, random_psd(r, n, rank))
}

/// Sum of a few `Ad_V` with rank-one `V`: an entanglement-breaking map.
pub fn random_sp1(r: &mut impl Rng, da: usize, db: usize) -> Result<HpMap> {
    let terms = r.random_range(1..=da * db);
    let mut acc = CMat::zeros(da * db, da * db);
    for _ in 0..terms {
        let x = random_vector(r, da);
        let y = random_vector(r, db);
        let v = kron(&CMat::from_column_slice(da, 1, x.as_slice()), &CMat::from_column_slice(db, 1, y.as_slice()));
        acc += &v * v.adjoint() * re(r.random::<f64>());
    }
    HpMap::from_choi_matrix(da, db, acc)
}

pub fn random_ppt(r: &mut impl Rng, da: usize, db: usize) -> Result<HpMap> {
    let n = da * db;
    let x = BipartiteMatrix::new(da, db, random_hermitian(r, n) + CMat::identity(n, n) * re(0.5))?;
    HpMap::from_choi(project_ppt(&x, 2000, 1e-12)?.0)
}

pub fn random_member(cone: &Cone, r: &mut impl Rng, da: usize, db: usize) -> Result<HpMap> {
    match cone {
        Cone::Builtin(id) => match id.normalized(da, db)? {
            ConeId::Cp | ConeId::P(_) => random_cp(r, da, db),
            ConeId::Sp(1) => random_sp1(r, da, db),
            ConeId::Sp(k) => {
                let v = ginibre(r, da, k) * ginibre(r, k, db);
                HpMap::ad(&v)
            }
            ConeId::Ppt => random_ppt(r, da, db),
            ConeId::Ccp => Ok(random_cp(r, da, db)?.compose_transpose()),
            ConeId::Dec => random_cp(r, da, db)?.add(&random_cp(r, da, db)?.compose_transpose()),
        },
        Cone::Augmented(k) => random_augmented(k, r),
    }
}

fn random_augmented(k: &AugmentedCone, r: &mut impl Rng) -> Result<HpMap> {
    let (da, db) = k.dims();
    let mut acc = if k.include_sp1() { random_sp1(r, da, db)?.scale(r.random::<f64>()) } else { HpMap::from_choi(BipartiteMatrix::zeros(da, db))? };
    for g in k.generators() {
        let w: f64 = r.random();
        let term = match k.closure() {
            Closure::None => g.clone(),
            Closure::Right => compose(g, &random_cp(r, da, da)?)?,
            Closure::Left => compose(&random_cp(r, db, db)?, g)?,
        };
        acc = acc.add(&term.scale(w))?;
    }
    Ok(acc)
}

/// Candidates for dual-cone sampling: completely positive maps, Hermitian
/// perturbations of them, and (on `M₂`) members of the `φ_[a,b,c,d]` family.
pub fn random_candidate(r: &mut impl Rng, da: usize, db: usize) -> Result<HpMap> {
    let n = da * db;
    match r.random_range(0..3) {
        0 => random_cp(r, da, db),
        1 if da == 2 && db == 2 => {
            let mut p = || 2.0 * r.random::<f64>();
            Ok(phi_abcd(p(), p(), p(), p()))
        }
        _ => {
            let h = random_hermitian(r, n);
            let shift = 0.5 + 2.0 * r.random::<f64>();
            HpMap::from_choi_matrix(da, db, h + CMat::identity(n, n) * c(shift, 0.0))
        }
    }
}
