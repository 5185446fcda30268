use serde::{Deserialize, Serialize};

use crate::builtins::sigma;
use crate::cones::{
    is_cp, is_member, is_positive_k, is_superpositive_k, Certificate, ConeId, MembershipVerdict, SolverOptions, Status,
};
use crate::error::{dim_mismatch, Error, Result};
use crate::json::{MapJson, MatrixJson};
use crate::maps::{compose, map_pairing, HpMap};
use crate::matrix::{eigh, re, BipartiteMatrix, CMat, CVec};

/// Which side the generators are closed under composition with CP maps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `cone{σ_i}`
    #[default]
    None,
    /// `cone(CP ∘ {σ_i})`
    Left,
    /// `cone({σ_i} ∘ CP)`
    Right,
}

/// `SP₁ ∨ cone{σ_i}` (SP₁ optional), possibly closed under one-sided
/// composition with CP maps.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedCone {
    dim_a: usize,
    dim_b: usize,
    generators: Vec<HpMap>,
    include_sp1: bool,
    closure: Closure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeJson {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub include_sp1: bool,
    pub generators: Vec<MapJson>,
    #[serde(default)]
    pub closure: Closure,
}

impl AugmentedCone {
    pub fn new(dim_a: usize, dim_b: usize, generators: Vec<HpMap>, include_sp1: bool) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.dims() != (dim_a, dim_b)) {
            return Err(dim_mismatch(format!("generator {:?} in a cone of maps {:?}", g.dims(), (dim_a, dim_b))));
        }
        Ok(Self { dim_a, dim_b, generators, include_sp1, closure: Closure::None })
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }

    /// `SP₁ ∨ {σ}` on `M₂` with `σ = 1 + Ad_{e21}`.
    pub fn example() -> Self {
        Self::new(2, 2, vec![sigma()], true).expect("fixed dimensions")
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn generators(&self) -> &[HpMap] {
        &self.generators
    }

    pub fn include_sp1(&self) -> bool {
        self.include_sp1
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn right_stable(&self) -> bool {
        self.generators.is_empty() || self.closure == Closure::Right
    }

    pub fn left_stable(&self) -> bool {
        self.generators.is_empty() || self.closure == Closure::Left
    }

    pub fn to_json(&self) -> ConeJson {
        ConeJson {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            include_sp1: self.include_sp1,
            generators: self.generators.iter().map(MapJson::from_map).collect(),
            closure: self.closure,
        }
    }

    pub fn from_json(j: &ConeJson) -> Result<Self> {
        let gens = j.generators.iter().map(MapJson::to_map).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(j.dim_a, j.dim_b, gens, j.include_sp1)?.with_closure(j.closure))
    }

    fn check_dims(&self, phi: &HpMap) -> Result<()> {
        if phi.dims() != self.dims() {
            return Err(dim_mismatch(format!("map {:?} tested against a cone of maps {:?}", phi.dims(), self.dims())));
        }
        Ok(())
    }
}

/// Builtin cones are mapping cones; augmented cones carry their generators.
#[derive(Clone, Debug, PartialEq)]
pub enum Cone {
    Builtin(ConeId),
    Augmented(AugmentedCone),
}

impl Cone {
    pub fn right_stable(&self) -> bool {
        match self {
            Cone::Builtin(_) => true,
            Cone::Augmented(k) => k.right_stable(),
        }
    }

    pub fn left_stable(&self) -> bool {
        match self {
            Cone::Builtin(_) => true,
            Cone::Augmented(k) => k.left_stable(),
        }
    }

    pub fn contains(&self, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
        match self {
            Cone::Builtin(id) => is_member(*id, phi, opts),
            Cone::Augmented(k) => in_cone(k, phi, opts),
        }
    }

    pub fn in_dual(&self, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
        match self {
            Cone::Builtin(id) => is_member(id.normalized(phi.dim_a(), phi.dim_b())?.dual(), phi, opts),
            Cone::Augmented(k) => in_dual(k, phi, opts),
        }
    }

    pub fn in_rdual(&self, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
        match self {
            Cone::Builtin(_) => self.in_dual(phi, opts),
            Cone::Augmented(k) => in_rdual(k, phi, opts),
        }
    }

    pub fn in_ldual(&self, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
        match self {
            Cone::Builtin(_) => self.in_dual(phi, opts),
            Cone::Augmented(k) => in_ldual(k, phi, opts),
        }
    }
}

fn combine(clauses: Vec<(String, MembershipVerdict)>) -> MembershipVerdict {
    let status = Status::all(clauses.iter().map(|(_, v)| v.status));
    let gap = clauses.iter().map(|(_, v)| v.gap).fold(f64::INFINITY, f64::min);
    let gap = if gap.is_finite() { gap } else { 0.0 };
    if status == Status::NonMember {
        let (index, (label, inner)) =
            clauses.into_iter().enumerate().find(|(_, (_, v))| v.is_non_member()).expect("status says one failed");
        if index == 0 && label == "P1" {
            return inner;
        }
        let cert = match &inner.certificate {
            Some(c @ Certificate::Witness { .. }) => c.clone(),
            _ => Certificate::Clause { index, label, inner: Box::new(inner) },
        };
        return MembershipVerdict::non_member(gap, cert);
    }
    let mut out = MembershipVerdict::new(status, gap);
    for (label, v) in clauses {
        out.notes.extend(v.notes.into_iter().map(|n| format!("{label}: {n}")));
    }
    out
}

fn p1_clause(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<Vec<(String, MembershipVerdict)>> {
    Ok(if k.include_sp1 { vec![("P1".to_string(), is_positive_k(phi, 1, opts)?)] } else { Vec::new() })
}

fn pairing_clause(phi: &HpMap, s: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let p = map_pairing(phi, s)?;
    let tol = opts.tol * (1.0 + phi.choi().as_matrix().norm() * s.choi().as_matrix().norm());
    Ok(if p >= -tol {
        MembershipVerdict::member(p)
    } else {
        MembershipVerdict::non_member(
            p,
            Certificate::Witness { map: MapJson::from_map(s), pairing: p, note: "cone generator".into() },
        )
    })
}

/// `σ*∘φ ∈ CP` for every generator.
fn right_clauses(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<Vec<(String, MembershipVerdict)>> {
    k.generators
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((format!("CP(σ{i}*∘φ)"), is_cp(&compose(&s.adjoint(), phi)?, opts)?)))
        .collect()
}

/// `φ∘σ* ∈ CP` for every generator.
fn left_clauses(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<Vec<(String, MembershipVerdict)>> {
    k.generators
        .iter()
        .enumerate()
        .map(|(i, s)| Ok((format!("CP(φ∘σ{i}*)"), is_cp(&compose(phi, &s.adjoint())?, opts)?)))
        .collect()
}

pub fn in_dual(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    k.check_dims(phi)?;
    let mut clauses = p1_clause(k, phi, opts)?;
    match k.closure {
        Closure::None => {
            for (i, s) in k.generators.iter().enumerate() {
                clauses.push((format!("<φ,σ{i}>"), pairing_clause(phi, s, opts)?));
            }
        }
        Closure::Left => clauses.extend(left_clauses(k, phi, opts)?),
        Closure::Right => clauses.extend(right_clauses(k, phi, opts)?),
    }
    Ok(combine(clauses))
}

/// `φ ∈ (K∘CP)°`.
pub fn in_rdual(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    k.check_dims(phi)?;
    if k.closure == Closure::Left && !k.generators.is_empty() {
        return Err(Error::InvalidArgument("right dual of a left-closed cone is not finitely generated here".into()));
    }
    let mut clauses = p1_clause(k, phi, opts)?;
    clauses.extend(right_clauses(k, phi, opts)?);
    Ok(combine(clauses))
}

/// `φ ∈ (CP∘K)°`.
pub fn in_ldual(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    k.check_dims(phi)?;
    if k.closure == Closure::Right && !k.generators.is_empty() {
        return Err(Error::InvalidArgument("left dual of a right-closed cone is not finitely generated here".into()));
    }
    let mut clauses = p1_clause(k, phi, opts)?;
    clauses.extend(left_clauses(k, phi, opts)?);
    Ok(combine(clauses))
}

fn min_eig(m: &CMat) -> Result<(f64, CVec)> {
    let (vals, vecs) = eigh(m)?;
    Ok((vals[0], vecs.column(0).into_owned()))
}

struct Remainder {
    value: f64,
    lambda: Vec<f64>,
    cp: (f64, CVec),
    ccp: (f64, CVec),
}

fn remainder(c: &BipartiteMatrix, gens: &[HpMap], lambda: &[f64]) -> Result<Remainder> {
    let mut m = c.as_matrix().clone();
    for (g, l) in gens.iter().zip(lambda) {
        m -= g.choi().as_matrix() * re(*l);
    }
    let x = BipartiteMatrix::new(c.dim_a(), c.dim_b(), m)?;
    let cp = min_eig(x.as_matrix())?;
    let ccp = min_eig(x.partial_transpose().as_matrix())?;
    Ok(Remainder { value: cp.0.min(ccp.0), lambda: lambda.to_vec(), cp, ccp })
}

fn golden_max(lo: f64, hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
        if b - a <= 1e-14 * (1.0 + b.abs()) {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    // the maximum may sit on the boundary
    let candidates = [lo, mid, hi];
    let mut best = (f64::NEG_INFINITY, lo);
    for x in candidates {
        let v = f(x)?;
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok(best.1)
}

fn upper_multiplier(c: &BipartiteMatrix, g: &HpMap, floor: f64) -> f64 {
    let n = c.as_matrix().nrows() as f64;
    let tr_g = g.choi().trace();
    if tr_g > 1e-12 {
        ((c.trace() - n * floor) / tr_g).max(0.0) + 1.0
    } else {
        1e3 * (1.0 + c.as_matrix().norm()) / (1e-12 + g.choi().as_matrix().norm())
    }
}

/// Dual witness for infeasibility with a single generator: a trace-one
/// `W = α v vᵀ-type + Γ(...)` in the PPT dual that pairs nonnegatively with
/// the generator and negatively with `C`. Returned in the pairing frame.
fn infeasibility_witness(c: &BipartiteMatrix, g: &HpMap, best: &Remainder, tol: f64) -> Result<Option<(CMat, f64)>> {
    let (da, db) = c.dims();
    let v1 = &best.cp.1;
    let v2 = &best.ccp.1;
    // HS frame: W = α v1 v1† + (1−α) Γ(v2 v2†); pairing frame is the transpose.
    let p1 = v1 * v1.adjoint();
    let p2 = BipartiteMatrix::new(da, db, v2 * v2.adjoint())?.partial_transpose().into_matrix();
    let hs = |a: &CMat, b: &CMat| a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
    let gm = g.choi().as_matrix();
    let (g1, g2) = (hs(&p1, gm), hs(&p2, gm));
    let mut alphas = vec![0.0, 1.0];
    if (g1 - g2).abs() > 1e-15 {
        alphas.push((-g2 / (g1 - g2)).clamp(0.0, 1.0));
    }
    let mut best_w: Option<(CMat, f64)> = None;
    for a in alphas {
        let w = &p1 * re(a) + &p2 * re(1.0 - a);
        let on_gen = hs(&w, gm);
        let on_c = hs(&w, c.as_matrix());
        if on_gen >= -tol && on_c < -tol && best_w.as_ref().is_none_or(|b| on_c < b.1) {
            best_w = Some((w.transpose(), on_c));
        }
    }
    Ok(best_w)
}

/// Membership of `φ` in `K` itself.
pub fn in_cone(k: &AugmentedCone, phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    k.check_dims(phi)?;
    match k.closure {
        Closure::Right => return super::hull::in_smallest_rmc(k, phi, opts),
        Closure::Left => return super::hull::in_smallest_lmc(k, phi, opts),
        Closure::None => {}
    }
    let c = phi.choi();
    let scale = 1.0 + c.as_matrix().norm();
    if k.generators.is_empty() {
        if k.include_sp1 {
            return is_superpositive_k(phi, 1, opts);
        }
        let r = c.as_matrix().norm();
        return Ok(if r <= opts.fit_tol * scale {
            MembershipVerdict::member(0.0)
        } else {
            MembershipVerdict::unknown(-r).with_note("the zero cone contains only the zero map")
        });
    }
    if !k.include_sp1 {
        return super::hull::in_generated_cone(k, phi, opts);
    }
    let gens = &k.generators;
    let m = gens.len();
    let mut lambda = vec![0.0; m];
    let cycles = if m == 1 { 1 } else { 40 };
    for _ in 0..cycles {
        for i in 0..m {
            let floor = remainder(c, gens, &lambda)?.value;
            let hi = upper_multiplier(c, &gens[i], floor);
            let eval = |x: f64| -> Result<f64> {
                let mut l = lambda.clone();
                l[i] = x;
                Ok(remainder(c, gens, &l)?.value)
            };
            lambda[i] = golden_max(0.0, hi, eval)?;
        }
    }
    let best = remainder(c, gens, &lambda)?;
    let tol = opts.tol * scale;
    let exact = c.as_matrix().nrows() <= 6;
    let parts = |best: &Remainder| -> Vec<(String, MatrixJson)> {
        let dims = vec![c.dim_a(), c.dim_b()];
        let mut rest = c.as_matrix().clone();
        let mut parts = Vec::new();
        for (i, (g, l)) in gens.iter().zip(&best.lambda).enumerate() {
            let term = g.choi().as_matrix() * re(*l);
            rest -= &term;
            parts.push((format!("generator {i}"), MatrixJson::from_matrix(dims.clone(), &term)));
        }
        parts.insert(0, ("separable part".into(), MatrixJson::from_matrix(dims, &rest)));
        parts
    };
    if best.value >= -tol {
        let cert = Certificate::Components { parts: parts(&best), residual: 0.0 };
        let v = MembershipVerdict::member(best.value).with_certificate(cert);
        if exact {
            return Ok(v);
        }
        let mut rest = c.as_matrix().clone();
        for (g, l) in gens.iter().zip(&best.lambda) {
            rest -= g.choi().as_matrix() * re(*l);
        }
        let sep = is_superpositive_k(&HpMap::from_choi_matrix(c.dim_a(), c.dim_b(), rest)?, 1, opts)?;
        return Ok(if sep.is_member() {
            v
        } else {
            MembershipVerdict::unknown(best.value).with_note("remainder is PPT but separability is undecided")
        });
    }
    if m == 1 {
        let verdict = match infeasibility_witness(c, &gens[0], &best, tol)? {
            Some((w, value)) => MembershipVerdict::non_member(
                best.value,
                Certificate::Witness {
                    map: crate::cones::witness_json(c.dim_a(), c.dim_b(), w)?,
                    pairing: value,
                    note: "dual-cone witness".into(),
                },
            ),
            None => MembershipVerdict::non_member(
                best.value,
                Certificate::Components { parts: parts(&best), residual: best.value },
            ),
        };
        return Ok(verdict.with_note(format!("best multiplier {:.6e}", best.lambda[0])));
    }
    Ok(MembershipVerdict::unknown(best.value).with_note("coordinate ascent ended below zero"))
}
