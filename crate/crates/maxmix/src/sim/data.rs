//! N×K observation matrices with a marginal-scale tag.

use crate::error::{Error, Result};

/// Marginal scale of the values in a [`DataMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Untransformed observations.
    Raw,
    /// GEV-distributed margins (e.g. block maxima or daily series).
    Gev,
    /// Unit Fréchet margins, strictly positive.
    Frechet,
}

impl Scale {
    pub fn name(&self) -> &'static str {
        match self {
            Scale::Raw => "raw",
            Scale::Gev => "gev",
            Scale::Frechet => "frechet",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Scale::Raw),
            "gev" => Ok(Scale::Gev),
            "frechet" => Ok(Scale::Frechet),
            other => Err(Error::parse(format!("unknown scale '{other}'"))),
        }
    }
}

/// Row-major N×K matrix: rows are independent replicates, columns are sites.
/// Missing values are NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    k: usize,
    scale: Scale,
}

impl DataMatrix {
    pub fn new(values: Vec<f64>, n: usize, k: usize, scale: Scale) -> Result<Self> {
        if values.len() != n * k {
            return Err(Error::data(format!(
                "value buffer length {} does not match {n}×{k}",
                values.len()
            )));
        }
        if scale == Scale::Frechet && values.iter().any(|v| !v.is_nan() && *v <= 0.0) {
            return Err(Error::data("Fréchet-scale values must be strictly positive"));
        }
        Ok(DataMatrix { values, n, k, scale })
    }

    pub fn zeros(n: usize, k: usize, scale: Scale) -> Self {
        DataMatrix { values: vec![0.0; n * k], n, k, scale }
    }

    pub fn n_replicates(&self) -> usize {
        self.n
    }

    pub fn n_sites(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    #[inline]
    pub fn get(&self, replicate: usize, site: usize) -> f64 {
        self.values[replicate * self.k + site]
    }

    #[inline]
    pub fn set(&mut self, replicate: usize, site: usize, v: f64) {
        self.values[replicate * self.k + site] = v;
    }

    pub fn row(&self, replicate: usize) -> &[f64] {
        &self.values[replicate * self.k..(replicate + 1) * self.k]
    }

    pub fn column(&self, site: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, site)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Elementwise map onto a possibly different scale.
    pub fn map(&self, scale: Scale, f: impl Fn(f64) -> f64) -> Result<DataMatrix> {
        let values = self.values.iter().map(|&v| if v.is_nan() { v } else { f(v) }).collect();
        DataMatrix::new(values, self.n, self.k, scale)
    }

    /// Assemble from per-replicate rows (parallel simulation output).
    pub fn from_rows(rows: Vec<Vec<f64>>, k: usize, scale: Scale) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * k);
        for r in &rows {
            if r.len() != k {
                return Err(Error::data("replicate row has wrong length"));
            }
            values.extend_from_slice(r);
        }
        DataMatrix::new(values, n, k, scale)
    }
}
