use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::json::{MapJson, MatrixJson, VectorJson};
use crate::maps::HpMap;
use crate::matrix::{min_eigenvalue, pair_raw, BipartiteMatrix, CVec, HermitianMatrix};
use crate::schmidt::schmidt_rank;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Member,
    NonMember,
    Unknown,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Member => 0,
            Status::NonMember => 1,
            Status::Unknown => 2,
        }
    }

    pub fn is_member(self) -> bool {
        self == Status::Member
    }

    pub fn is_non_member(self) -> bool {
        self == Status::NonMember
    }

    /// Conjunction over clauses: any refutation wins, then any unknown.
    pub fn all(items: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Member;
        for s in items {
            match s {
                Status::NonMember => return Status::NonMember,
                Status::Unknown => out = Status::Unknown,
                Status::Member => {}
            }
        }
        out
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Member => "member",
            Status::NonMember => "non-member",
            Status::Unknown => "unknown",
        })
    }
}

/// Evidence attached to a verdict. Every variant can be re-evaluated against
/// the map it was produced for with [`MembershipVerdict::recheck`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Eigenvector of `C_φ` (or of `Γ(C_φ)` when `partial_transpose`).
    Eigenvector { vector: VectorJson, eigenvalue: f64, partial_transpose: bool },
    /// Unit `ξ` of Schmidt rank ≤ `rank` with `<C_φ, |ξ><ξ|> = value`.
    SchmidtVector { vector: VectorJson, dim_a: usize, dim_b: usize, rank: usize, value: f64 },
    /// A map on the dual side whose pairing with `φ` is `pairing`.
    Witness { map: MapJson, pairing: f64, note: String },
    /// Trace-one PPT matrix `X` with `<C_φ, X> = value`.
    PptMatrix { matrix: MatrixJson, value: f64 },
    /// `C_φ = P + Γ(Q)` with `P, Q` positive.
    DecomposableSplit { cp_part: MatrixJson, ccp_part: MatrixJson },
    /// `C_φ ≈ Σ w_j η_j η_j†` with Schmidt rank of each `η_j` at most `rank`.
    RankDecomposition { weights: Vec<f64>, vectors: Vec<VectorJson>, rank: usize, residual: f64 },
    /// Named Choi-sized summands reproducing `C_φ` up to `residual`.
    Components { parts: Vec<(String, MatrixJson)>, residual: f64 },
    /// Index of a failing clause together with that clause's own verdict.
    Clause { index: usize, label: String, inner: Box<MembershipVerdict> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: Status,
    /// Signed margin, positive inside.
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MembershipVerdict {
    pub fn new(status: Status, gap: f64) -> Self {
        Self { status, gap, certificate: None, notes: Vec::new() }
    }

    pub fn member(gap: f64) -> Self {
        Self::new(Status::Member, gap)
    }

    pub fn non_member(gap: f64, certificate: Certificate) -> Self {
        Self { certificate: Some(certificate), ..Self::new(Status::NonMember, gap) }
    }

    pub fn unknown(gap: f64) -> Self {
        Self::new(Status::Unknown, gap)
    }

    pub fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_member(&self) -> bool {
        self.status.is_member()
    }

    pub fn is_non_member(&self) -> bool {
        self.status.is_non_member()
    }

    /// Recomputes the certificate's margin from scratch against `phi`.
    ///
    /// Returns the re-evaluated pairing for refutations and the
    /// reconstruction error for decompositions. `None` when there is nothing
    /// to recheck or the certificate concerns a derived map (clauses).
    pub fn recheck(&self, phi: &HpMap) -> Result<Option<f64>> {
        let Some(cert) = &self.certificate else { return Ok(None) };
        recheck_certificate(cert, phi.choi())
    }
}

pub fn recheck_certificate(cert: &Certificate, choi: &BipartiteMatrix) -> Result<Option<f64>> {
    let c = choi.as_matrix();
    Ok(Some(match cert {
        Certificate::Eigenvector { vector, partial_transpose, .. } => {
            let v = vector.to_vector()?;
            let m = if *partial_transpose { choi.partial_transpose().into_matrix() } else { c.clone() };
            (v.adjoint() * m * &v)[(0, 0)].re / v.norm_squared()
        }
        Certificate::SchmidtVector { vector, dim_a, dim_b, rank, .. } => {
            let xi = vector.to_vector()?;
            if schmidt_rank(&xi, *dim_a, *dim_b, 1e-9)? > *rank {
                return Ok(Some(f64::INFINITY));
            }
            let p = HermitianMatrix::projector(&xi);
            pair_raw(c, p.as_matrix())?.re / xi.norm_squared()
        }
        Certificate::Witness { map, .. } => pair_raw(c, map.to_map()?.choi().as_matrix())?.re,
        Certificate::PptMatrix { matrix, .. } => {
            let x = matrix.to_bipartite()?;
            let h = x.to_hermitian()?;
            let slack = min_eigenvalue(&h)?.min(x.partial_transpose().min_eigenvalue()?);
            if slack < -1e-9 {
                return Ok(Some(f64::INFINITY));
            }
            pair_raw(c, x.as_matrix())?.re
        }
        Certificate::DecomposableSplit { cp_part, ccp_part } => {
            let p = cp_part.to_bipartite()?;
            let q = ccp_part.to_bipartite()?;
            (p.as_matrix() + q.partial_transpose().as_matrix() - c).norm()
        }
        Certificate::RankDecomposition { weights, vectors, .. } => {
            let mut acc = c.clone();
            for (w, v) in weights.iter().zip(vectors) {
                let v: CVec = v.to_vector()?;
                acc -= (&v * v.adjoint()) * crate::matrix::re(*w);
            }
            acc.norm()
        }
        Certificate::Components { parts, .. } => {
            let mut acc = c.clone();
            for (_, m) in parts {
                acc -= m.to_matrix()?;
            }
            acc.norm()
        }
        Certificate::Clause { .. } => return Ok(None),
    }))
}
