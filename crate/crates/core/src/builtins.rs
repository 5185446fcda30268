//! Named maps on `M_2` (and identity/transpose on `M_d`) used throughout the
//! examples, the CLI and the fixture table.

use crate::error::{Error, Result};
use crate::maps::HpMap;
use crate::matrix::{real_matrix, unit, BipartiteMatrix, CMat};

pub fn identity(d: usize) -> HpMap {
    HpMap::from_images(d, d, |i, j| unit(d, i, j)).expect("identity Choi is Hermitian")
}

pub fn transpose_map(d: usize) -> HpMap {
    HpMap::from_images(d, d, |i, j| unit(d, j, i)).expect("swap is Hermitian")
}

/// `σ = 1 + Ad_{e21}` on `M_2`.
pub fn sigma() -> HpMap {
    choi4(&[&[1., 0., 0., 1.], &[0., 0., 0., 0.], &[0., 0., 1., 0.], &[1., 0., 0., 1.]])
}

/// The self-adjoint CP map `τ` on `M_2` whose Choi matrix is not PPT.
pub fn tau() -> HpMap {
    choi4(&[&[0., 0., 0., 0.], &[0., 1., 1., 0.], &[0., 1., 1., 0.], &[0., 0., 0., 1.]])
}

/// `φ_[a,b,c,d]` with Choi matrix `diag(a,b,c,d)` plus `-1` in both corners.
pub fn phi_abcd(a: f64, b: f64, c: f64, d: f64) -> HpMap {
    choi4(&[&[a, 0., 0., -1.], &[0., b, 0., 0.], &[0., 0., c, 0.], &[-1., 0., 0., d]])
}

pub fn phi_a(a: f64) -> HpMap {
    phi_abcd(a, a, a, a)
}

/// `φ_α(x) = [[α x11, x12], [x21, x22/α]]`.
pub fn phi_alpha(alpha: f64) -> HpMap {
    choi4(&[&[alpha, 0., 0., 1.], &[0., 0., 0., 0.], &[0., 0., 0., 0.], &[1., 0., 0., 1. / alpha]])
}

/// `Ad_{e11}`-type map whose Choi matrix is `e11 ⊗ e11`.
pub fn corner_projection(d: usize) -> HpMap {
    let m = BipartiteMatrix::kron(&unit(d, 0, 0), &unit(d, 0, 0)).expect("square factors");
    HpMap::from_choi(m).expect("projector is Hermitian")
}

fn choi4(rows: &[&[f64]]) -> HpMap {
    HpMap::from_choi_matrix(2, 2, real_matrix(rows)).expect("builtin Choi matrices are Hermitian")
}

/// Parses `"1/3"`, `"0.25"`, `"-2"`, `"sqrt2"`-free plain numbers and fractions.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| bad())?;
        let d: f64 = d.trim().parse().map_err(|_| bad())?;
        return Ok(n / d);
    }
    s.parse().map_err(|_| bad())
}

fn parse_list(args: &str, n: usize, name: &str) -> Result<Vec<f64>> {
    let vals = args.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
    if vals.len() != n {
        return Err(Error::Parse(format!("{name} expects {n} parameters, got {}", vals.len())));
    }
    Ok(vals)
}

fn parse_dim(args: Option<&str>) -> Result<usize> {
    match args {
        None => Ok(2),
        Some(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Parse(format!("bad dimension {s:?}"))),
    }
}

/// Resolve a builtin map name such as `sigma` or `phi_abcd:1,1,1,1/3`.
pub fn parse_builtin(name: &str) -> Result<HpMap> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    match head {
        "identity" | "id" => Ok(identity(parse_dim(args)?)),
        "transpose" => Ok(transpose_map(parse_dim(args)?)),
        "sigma" => Ok(sigma()),
        "sigma_star" => Ok(sigma().adjoint()),
        "tau" => Ok(tau()),
        "corner" => Ok(corner_projection(parse_dim(args)?)),
        "phi_abcd" => {
            let v = parse_list(args.unwrap_or(""), 4, "phi_abcd")?;
            Ok(phi_abcd(v[0], v[1], v[2], v[3]))
        }
        "phi_a" => Ok(phi_a(parse_list(args.unwrap_or(""), 1, "phi_a")?[0])),
        "phi_alpha" => {
            let a = parse_list(args.unwrap_or(""), 1, "phi_alpha")?[0];
            if a <= 0.0 {
                return Err(Error::InvalidArgument("phi_alpha needs α > 0".into()));
            }
            Ok(phi_alpha(a))
        }
        _ => Err(Error::Parse(format!("unknown builtin map {name:?}"))),
    }
}

pub fn zero_map(dim_a: usize, dim_b: usize) -> HpMap {
    HpMap::from_choi(BipartiteMatrix::new(dim_a, dim_b, CMat::zeros(dim_a * dim_b, dim_a * dim_b)).expect("shape"))
        .expect("zero is Hermitian")
}
