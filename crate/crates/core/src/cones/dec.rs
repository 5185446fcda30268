//! Decomposability via `min <C, X>` over trace-one PPT matrices `X`,
//! solved by scaled ADMM on the splitting `X ∈ {PSD, Tr = 1}`, `Y ∈ Γ(PSD)`,
//! `X = Y`.

use crate::error::Result;
use crate::json::MatrixJson;
use crate::maps::HpMap;
use crate::matrix::{eigh, psd_part, re, symmetrize, BipartiteMatrix, CMat};

use super::{Certificate, MembershipVerdict, SolverOptions};

#[derive(Clone, Debug)]
pub struct DecBounds {
    /// Certified lower bound on the optimum.
    pub lower: f64,
    /// Value at a certified feasible point.
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Feasible trace-one PPT matrix attaining `upper`.
    pub primal: CMat,
    /// `(P, Q)` with `C = P + Γ(Q) + lower·I`, `P, Q ⪰ 0`.
    pub split: (CMat, CMat),
}

fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, x) in s.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn project_density(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(&symmetrize(m))?;
    let p = simplex_projection(&vals);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for (i, w) in p.iter().enumerate() {
        if *w > 0.0 {
            let v = vecs.column(i);
            out += (v * v.adjoint()) * re(*w);
        }
    }
    Ok(out)
}

struct Frame {
    da: usize,
    db: usize,
}

impl Frame {
    fn gamma(&self, m: &CMat) -> CMat {
        BipartiteMatrix::new(self.da, self.db, m.clone()).expect("fixed shape").partial_transpose().into_matrix()
    }
}

fn hs(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Mix toward the maximally mixed state until exactly PPT.
fn repair(f: &Frame, x: &CMat) -> Result<CMat> {
    let n = x.nrows();
    let x = symmetrize(x);
    let tr: f64 = (0..n).map(|i| x[(i, i)].re).sum();
    let x = x / re(tr);
    let lo = eigh(&x)?.0[0].min(eigh(&f.gamma(&x))?.0[0]);
    if lo >= 0.0 {
        return Ok(x);
    }
    let d = -lo * 1.000001 + 1e-15;
    let eps = d / (d + 1.0 / n as f64);
    Ok(x * re(1.0 - eps) + CMat::identity(n, n) * re(eps / n as f64))
}

fn lower_bound(f: &Frame, g: &CMat, scaled_dual: &CMat) -> Result<(f64, CMat, CMat)> {
    let s2 = psd_part(&(-f.gamma(scaled_dual)))?;
    let r = g - f.gamma(&s2);
    let (vals, _) = eigh(&symmetrize(&r))?;
    Ok((vals[0], r, s2))
}

/// Runs the splitting on `C` and returns certified bounds on
/// `min { <C, X> : X ⪰ 0, Γ(X) ⪰ 0, Tr X = 1 }`.
pub fn decomposable_bounds(c: &BipartiteMatrix, opts: &SolverOptions) -> Result<DecBounds> {
    let f = Frame { da: c.dim_a(), db: c.dim_b() };
    let n = c.as_matrix().nrows();
    // <C, X> = Tr(conj(C) X) for Hermitian C.
    let g_raw = symmetrize(&c.as_matrix().map(|z| z.conj()));
    let scale = g_raw.norm();
    if scale == 0.0 {
        let id = CMat::identity(n, n) / re(n as f64);
        return Ok(DecBounds {
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
            primal: id,
            split: (CMat::zeros(n, n), CMat::zeros(n, n)),
        });
    }
    let g = &g_raw / re(scale);
    let stol = opts.splitting_tol;

    let mut x = CMat::identity(n, n) / re(n as f64);
    let mut y = x.clone();
    let mut u = CMat::zeros(n, n);
    let mut rho = 1.0;
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_split = None;
    let mut best_upper = f64::INFINITY;
    let mut best_primal = x.clone();
    let mut iterations = 0;
    let mut converged = false;

    let mut check = |x: &CMat, u: &CMat, rho: f64| -> Result<(f64, f64)> {
        let xp = repair(&f, x)?;
        let up = hs(&g, &xp);
        if up < best_upper {
            best_upper = up;
            best_primal = xp;
        }
        let (lo, r, s2) = lower_bound(&f, &g, &(u * re(rho)))?;
        if lo > best_lower {
            best_lower = lo;
            best_split = Some((r, s2));
        }
        Ok((best_lower, best_upper))
    };

    for it in 0..opts.splitting_iter {
        iterations = it + 1;
        x = project_density(&(&y - &u - &g / re(rho)))?;
        let y_prev = y;
        y = f.gamma(&psd_part(&f.gamma(&(&x + &u)))?);
        u += &x - &y;
        let primal_res = (&x - &y).norm();
        let dual_res = rho * (&y - &y_prev).norm();

        if it % 20 == 19 {
            let (lo, up) = check(&x, &u, rho)?;
            if lo >= -stol || up < -stol {
                converged = true;
                break;
            }
            if primal_res < 1e-2 * stol && dual_res < 1e-2 * stol && up - lo < stol {
                converged = true;
                break;
            }
        }
        if it % 10 == 9 {
            if primal_res > 10.0 * dual_res {
                rho *= 2.0;
                u /= re(2.0);
            } else if dual_res > 10.0 * primal_res {
                rho /= 2.0;
                u *= re(2.0);
            }
        }
    }
    check(&x, &u, rho)?;
    let (r, s2) = best_split.expect("check ran at least once");
    // G = R + Γ(S2) and C = conj(G).
    let p = symmetrize(&(r * re(scale))).map(|z| z.conj());
    let q = symmetrize(&(s2 * re(scale))).map(|z| z.conj());
    Ok(DecBounds {
        lower: best_lower * scale,
        upper: best_upper * scale,
        iterations,
        converged,
        primal: best_primal,
        split: (p, q),
    })
}

pub fn is_decomposable(phi: &HpMap, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let c = phi.choi();
    let b = decomposable_bounds(c, opts)?;
    let scale = c.as_matrix().norm();
    let stol = opts.splitting_tol * scale.max(f64::MIN_POSITIVE);
    let (da, db) = c.dims();
    let meta = format!("bounds [{:.3e}, {:.3e}] after {} iterations", b.lower, b.upper, b.iterations);
    if b.lower >= -stol {
        let cert = Certificate::DecomposableSplit {
            cp_part: MatrixJson::from_matrix(vec![da, db], &b.split.0),
            ccp_part: MatrixJson::from_matrix(vec![da, db], &b.split.1),
        };
        return Ok(MembershipVerdict::member(b.lower).with_certificate(cert).with_note(meta));
    }
    if b.upper < -stol {
        let cert = Certificate::PptMatrix { matrix: MatrixJson::from_matrix(vec![da, db], &b.primal), value: b.upper };
        return Ok(MembershipVerdict::non_member(b.upper, cert).with_note(meta));
    }
    Ok(MembershipVerdict::unknown(b.upper).with_note(meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_sums_to_one() {
        let p = simplex_projection(&[0.5, 2.0, -1.0, 0.1]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.iter().all(|x| *x >= 0.0));
        assert_eq!(simplex_projection(&[0.25; 4]), vec![0.25; 4]);
    }
}
