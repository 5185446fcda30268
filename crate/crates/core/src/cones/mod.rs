//! Membership in the fixed cones CP, CCP, PPT, DEC, P(k) and SP(k).

mod dec;
mod projection;
mod seesaw;
mod separable;
mod verdict;

use serde::{Deserialize, Serialize};

pub use dec::{decomposable_bounds, is_decomposable, DecBounds};
pub use projection::project_ppt;
pub use seesaw::{minimize as seesaw_minimize, top_k_mass, SeesawResult};
pub use separable::is_superpositive_k;
pub(crate) use separable::nnls_gram as nnls;
pub use verdict::{recheck_certificate, Certificate, MembershipVerdict, Status};

use crate::error::{Error, Result};
use crate::json::{MapJson, VectorJson};
use crate::maps::HpMap;
use crate::matrix::{eigh, BipartiteMatrix, CMat, CVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub seed: u64,
    /// Seesaw restarts.
    pub restarts: usize,
    /// Seesaw sweeps per restart.
    pub max_iter: usize,
    /// Iteration cap of the first-order splitting solvers.
    pub splitting_iter: usize,
    /// Relative optimality tolerance of the splitting solvers.
    pub splitting_tol: f64,
    /// Relative residual accepted from constructive decompositions.
    pub fit_tol: f64,
    /// Frank–Wolfe outer iterations.
    pub fw_iter: usize,
    pub threads: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            seed: 0,
            restarts: 64,
            max_iter: 500,
            splitting_iter: 20_000,
            splitting_tol: 1e-6,
            fit_tol: 1e-6,
            fw_iter: 300,
            threads: 1,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Absolute threshold `tol·(1 + ‖C‖)` for a Choi matrix.
    pub fn scaled_tol(&self, choi: &CMat) -> f64 {
        self.tol * (1.0 + spectral_bound(choi))
    }
}

/// Cheap upper bound on the spectral norm (Frobenius norm).
pub(crate) fn spectral_bound(m: &CMat) -> f64 {
    m.norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "cone", content = "k", rename_all = "UPPERCASE")]
pub enum ConeId {
    Cp,
    Ccp,
    Ppt,
    Dec,
    P(usize),
    Sp(usize),
}

impl ConeId {
    pub fn dual(self) -> ConeId {
        match self {
            ConeId::Cp => ConeId::Cp,
            ConeId::Ccp => ConeId::Ccp,
            ConeId::Ppt => ConeId::Dec,
            ConeId::Dec => ConeId::Ppt,
            ConeId::P(k) => ConeId::Sp(k),
            ConeId::Sp(k) => ConeId::P(k),
        }
    }

    /// Resolves `P(min-dim)` and `SP(min-dim)` to CP.
    pub fn normalized(self, dim_a: usize, dim_b: usize) -> Result<ConeId> {
        let m = dim_a.min(dim_b);
        match self {
            ConeId::P(k) | ConeId::Sp(k) if k == 0 || k > m => {
                Err(Error::InvalidArgument(format!("k = {k} outside 1..={m}")))
            }
            ConeId::P(k) | ConeId::Sp(k) if k == m => Ok(ConeId::Cp),
            other => Ok(other),
        }
    }

    pub fn parse(s: &str) -> Result<ConeId> {
        let lower = s.trim().to_ascii_lowercase();
        let k_of = |rest: &str| -> Result<usize> {
            rest.trim_start_matches([':', '_', '(']).trim_end_matches(')').parse().map_err(|_| {
                Error::InvalidArgument(format!("bad cone index in {s:?}"))
            })
        };
        Ok(match lower.as_str() {
            "cp" => ConeId::Cp,
            "ccp" => ConeId::Ccp,
            "ppt" => ConeId::Ppt,
            "dec" => ConeId::Dec,
            "eb" => ConeId::Sp(1),
            _ if lower.starts_with("sp") => ConeId::Sp(k_of(&lower[2..])?),
            _ if lower.starts_with('p') => ConeId::P(k_of(&lower[1..])?),
            _ => return Err(Error::InvalidArgument(format!("unknown cone {s:?}"))),
        })
    }
}

impl std::fmt::Display for ConeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConeId::Cp => write!(f, "CP"),
            ConeId::Ccp => write!(f, "CCP"),
            ConeId::Ppt => write!(f, "PPT"),
            ConeId::Dec => write!(f, "DEC"),
            ConeId::P(k) => write!(f, "P{k}"),
            ConeId::Sp(k) => write!(f, "SP{k}"),
        }
    }
}

pub fn is_member(cone: ConeId, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    match cone.normalized(phi.dim_a(), phi.dim_b())? {
        ConeId::Cp => is_cp(phi, opts),
        ConeId::Ccp => is_ccp(phi, opts),
        ConeId::Ppt => is_ppt_map(phi, opts),
        ConeId::Dec => is_decomposable(phi, opts),
        ConeId::P(k) => is_positive_k(phi, k, opts),
        ConeId::Sp(k) => is_superpositive_k(phi, k, opts),
    }
}

fn spectral_verdict(m: &BipartiteMatrix, partial_transpose: bool, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let (vals, vecs) = eigh(m.as_matrix())?;
    let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let min = vals[0];
    if min >= -opts.tol * (1.0 + scale) {
        return Ok(MembershipVerdict::member(min));
    }
    let cert = Certificate::Eigenvector {
        vector: VectorJson::from_vector(&vecs.column(0).into_owned()),
        eigenvalue: min,
        partial_transpose,
    };
    Ok(MembershipVerdict::non_member(min, cert))
}

pub fn is_cp(phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    spectral_verdict(phi.choi(), false, opts)
}

pub fn is_ccp(phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let mut v = spectral_verdict(&phi.choi().partial_transpose(), true, opts)?;
    if let Some(Certificate::Eigenvector { .. }) = v.certificate {
        v.notes.push("eigenvector of the partial transpose".into());
    }
    Ok(v)
}

pub fn is_ppt_map(phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let cp = is_cp(phi, opts)?;
    if cp.is_non_member() {
        return Ok(cp);
    }
    let ccp = is_ccp(phi, opts)?;
    if ccp.is_non_member() {
        return Ok(ccp);
    }
    Ok(MembershipVerdict::member(cp.gap.min(ccp.gap)))
}

/// `min <C, |ξ><ξ|>` over unit `ξ` of Schmidt rank ≤ k, with the minimizer `ξ`.
pub fn min_schmidt_overlap(c: &BipartiteMatrix, k: usize, opts: &SolverOptions) -> Result<(f64, CVec)> {
    let res = seesaw::minimize(c.as_matrix(), c.dim_a(), c.dim_b(), k, opts)?;
    Ok((res.value, res.eta.map(|z| z.conj())))
}

pub fn is_positive_k(phi: &HpMap, k: usize, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let (da, db) = phi.dims();
    let m = da.min(db);
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={m}")));
    }
    let c = phi.choi();
    let res = seesaw::minimize(c.as_matrix(), da, db, k, opts)?;
    let threshold = opts.scaled_tol(c.as_matrix());
    let value = res.value;
    if value < -threshold {
        let xi = res.eta.map(|z| z.conj());
        let cert = Certificate::SchmidtVector { vector: VectorJson::from_vector(&xi), dim_a: da, dim_b: db, rank: k, value };
        return Ok(MembershipVerdict::non_member(value, cert));
    }
    if k == m {
        return Ok(MembershipVerdict::member(value));
    }
    let mut v = if da <= 3 && db <= 3 {
        MembershipVerdict::member(value).with_note("heuristic: seesaw floor over all restarts")
    } else {
        MembershipVerdict::unknown(value).with_note("seesaw floor nonnegative; no exact test at these dimensions")
    };
    if !res.converged {
        v.notes.push("best restart hit the sweep cap".into());
    }
    Ok(v)
}

/// A map whose Choi matrix is `m`, for certificates.
pub(crate) fn witness_json(da: usize, db: usize, m: CMat) -> Result<MapJson> {
    Ok(MapJson::from_map(&HpMap::from_choi_unchecked(BipartiteMatrix::new(da, db, m)?)))
}
