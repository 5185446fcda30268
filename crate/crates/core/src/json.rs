//! JSON encodings shared by the library and the CLI.
//!
//! Matrices are `{"dims":[dA,dB] or [d],"re":[[...]],"im":[[...]]}`, row-major,
//! with A-major composite indexing. Maps add `"dimA"` and `"dimB"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::HpMap;
use crate::matrix::{c, BipartiteMatrix, CMat, CVec, HermitianMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(dims: Vec<usize>, m: &CMat) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { dims, re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn from_bipartite(x: &BipartiteMatrix) -> Self {
        Self::from_matrix(vec![x.dim_a(), x.dim_b()], x.as_matrix())
    }

    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self::from_matrix(vec![h.dim()], h.as_matrix())
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(Error::Parse("re/im must be square arrays of equal size".into()));
        }
        let expected: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.len() > 2 || expected != n {
            return Err(Error::Parse(format!("dims {:?} do not match a {n}×{n} matrix", self.dims)));
        }
        Ok(CMat::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }

    pub fn to_bipartite(&self) -> Result<BipartiteMatrix> {
        let m = self.to_matrix()?;
        match self.dims.as_slice() {
            [a, b] => BipartiteMatrix::new(*a, *b, m),
            [d] => BipartiteMatrix::new(*d, 1, m),
            _ => unreachable!("validated in to_matrix"),
        }
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    #[serde(flatten)]
    pub choi: MatrixJson,
}

impl MapJson {
    pub fn from_map(phi: &HpMap) -> Self {
        Self { dim_a: phi.dim_a(), dim_b: phi.dim_b(), choi: MatrixJson::from_bipartite(phi.choi()) }
    }

    pub fn to_map(&self) -> Result<HpMap> {
        if self.choi.dims != [self.dim_a, self.dim_b] {
            return Err(Error::Parse(format!(
                "dims {:?} disagree with dimA={} dimB={}",
                self.choi.dims, self.dim_a, self.dim_b
            )));
        }
        HpMap::from_choi(self.choi.to_bipartite()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorJson {
    pub fn from_vector(v: &CVec) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }

    pub fn to_vector(&self) -> Result<CVec> {
        if self.re.len() != self.im.len() {
            return Err(Error::Parse("re/im length mismatch".into()));
        }
        Ok(CVec::from_iterator(self.re.len(), self.re.iter().zip(&self.im).map(|(a, b)| c(*a, *b))))
    }
}

pub fn map_to_string(phi: &HpMap) -> Result<String> {
    Ok(serde_json::to_string(&MapJson::from_map(phi))?)
}

pub fn map_from_str(s: &str) -> Result<HpMap> {
    serde_json::from_str::<MapJson>(s)?.to_map()
}

/// Parses either a map (`dimA`/`dimB` present) or a bare bipartite matrix.
pub fn matrix_from_str(s: &str) -> Result<BipartiteMatrix> {
    serde_json::from_str::<MatrixJson>(s)?.to_bipartite()
}
