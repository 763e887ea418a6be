//! Stationary Gaussian field simulation via Cholesky factorization of the
//! exponential correlation matrix.

use super::data::{DataMatrix, Scale};
use super::sites::SiteSet;
use crate::error::{Error, Result};
use crate::util::replicate_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Exponential correlation matrix R_ij = exp(−h_ij/φ), row-major K×K.
pub fn correlation_matrix(sites: &SiteSet, phi: f64) -> Result<Vec<f64>> {
    if !(phi > 0.0) {
        return Err(Error::domain(format!("correlation range must be > 0, got {phi}")));
    }
    let k = sites.len();
    let mut r = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            r[i * k + j] = (-sites.distance(i, j) / phi).exp();
        }
    }
    Ok(r)
}

/// Lower-triangular Cholesky factor of a symmetric matrix, retrying once
/// with diagonal jitter 1e−10 on failure.
///
/// Returns the row-major factor and whether jitter was needed.
pub fn cholesky_with_jitter(r: &[f64], k: usize) -> Result<(Vec<f64>, bool)> {
    match cholesky_in_place(r.to_vec(), k) {
        Some(l) => Ok((l, false)),
        None => {
            let mut jittered = r.to_vec();
            for i in 0..k {
                jittered[i * k + i] += 1e-10;
            }
            match cholesky_in_place(jittered, k) {
                Some(l) => Ok((l, true)),
                None => Err(Error::numeric(
                    "correlation matrix is not positive definite even after 1e-10 jitter",
                )),
            }
        }
    }
}

/// Plain Cholesky on a row-major buffer; `None` if a pivot is nonpositive.
fn cholesky_in_place(mut a: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for l in 0..j {
                s -= a[i * k + l] * a[j * k + l];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                a[i * k + i] = s.sqrt();
            } else {
                a[i * k + j] = s / a[j * k + j];
            }
        }
        for j in (i + 1)..k {
            a[i * k + j] = 0.0;
        }
    }
    Some(a)
}

/// y = L·g for a lower-triangular row-major factor.
#[inline]
pub(crate) fn lower_tri_mul(l: &[f64], g: &[f64], out: &mut [f64]) {
    let k = g.len();
    for i in 0..k {
        let row = &l[i * k..i * k + i + 1];
        let mut s = 0.0;
        for (a, b) in row.iter().zip(g[..=i].iter()) {
            s += a * b;
        }
        out[i] = s;
    }
}

/// `n` draws of a zero-mean unit-variance Gaussian field with exponential
/// correlation of range `phi`; raw scale, N(0,1) margins.
pub fn simulate_gaussian_field(sites: &SiteSet, phi: f64, n: usize, seed: u64) -> Result<DataMatrix> {
    let k = sites.len();
    let r = correlation_matrix(sites, phi)?;
    let (l, _jittered) = cholesky_with_jitter(&r, k)?;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep);
            let g: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let mut out = vec![0.0; k];
            lower_tri_mul(&l, &g, &mut out);
            out
        })
        .collect();
    DataMatrix::from_rows(rows, k, Scale::Raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::sites::{sample_sites_uniform, SiteSet};

    #[test]
    fn empty_draw_count() {
        let s = sample_sites_uniform(5, 1.0, 0).unwrap();
        let d = simulate_gaussian_field(&s, 0.5, 0, 1).unwrap();
        assert_eq!(d.n_replicates(), 0);
    }

    #[test]
    fn marginal_variance_near_one() {
        let s = sample_sites_uniform(4, 1.0, 3).unwrap();
        let n = 4000;
        let d = simulate_gaussian_field(&s, 0.4, n, 7).unwrap();
        for site in 0..4 {
            let col = d.column(site);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt() + 0.05, "var {var}");
        }
    }

    #[test]
    fn pair_correlation_matches_model() {
        // two sites at h = φ·ln 2, so ρ(h) = 0.5
        let phi = 0.6;
        let h = phi * std::f64::consts::LN_2;
        let s = SiteSet::from_planar(vec![[0.0, 0.0], [h, 0.0]]).unwrap();
        let n = 6000;
        let d = simulate_gaussian_field(&s, phi, n, 11).unwrap();
        let (c0, c1) = (d.column(0), d.column(1));
        let corr: f64 = c0.iter().zip(&c1).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        assert!((corr - 0.5).abs() < 3.0 / (n as f64).sqrt() + 0.02, "corr {corr}");
    }

    #[test]
    fn deterministic_given_seed() {
        let s = sample_sites_uniform(6, 2.0, 5).unwrap();
        let a = simulate_gaussian_field(&s, 0.3, 20, 99).unwrap();
        let b = simulate_gaussian_field(&s, 0.3, 20, 99).unwrap();
        assert_eq!(a, b);
    }
}
