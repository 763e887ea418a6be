//! Empirical dependence diagnostics: χ(u), χ̄(u), directional sectors,
//! loess smoothing, and simple goodness-of-fit summaries.
//!
//! χ̂ and χ̄̂ are rank-based, so they are invariant under strictly increasing
//! transformations of each margin. Ties get average ranks (rainfall data has
//! many equal values).

use crate::error::{Error, Result};
use crate::sim::{DataMatrix, SiteSet};
use rayon::prelude::*;

/// Average ranks (1-based) of the finite entries; NaN stays NaN.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| x[i].is_finite()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut ranks = vec![f64::NAN; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &pos in &idx[i..=j] {
            ranks[pos] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Complete-case ranks for a pair of columns.
fn pair_ranks(c1: &[f64], c2: &[f64]) -> (Vec<f64>, Vec<f64>, usize) {
    let keep: Vec<usize> = (0..c1.len())
        .filter(|&i| c1[i].is_finite() && c2[i].is_finite())
        .collect();
    let a: Vec<f64> = keep.iter().map(|&i| c1[i]).collect();
    let b: Vec<f64> = keep.iter().map(|&i| c2[i]).collect();
    let n = keep.len();
    (average_ranks(&a), average_ranks(&b), n)
}

/// Empirical tail-dependence χ̂(u) = P̂(F1 > u | F2 > u), symmetrized over
/// the two conditioning directions. `None` when no margin exceeds.
pub fn empirical_chi(c1: &[f64], c2: &[f64], u: f64) -> Option<f64> {
    let (r1, r2, n) = pair_ranks(c1, c2);
    if n == 0 || !(0.0 < u && u < 1.0) {
        return None;
    }
    let cut = u * n as f64;
    let mut both = 0usize;
    let mut d1 = 0usize;
    let mut d2 = 0usize;
    for i in 0..n {
        let e1 = r1[i] > cut;
        let e2 = r2[i] > cut;
        d1 += e1 as usize;
        d2 += e2 as usize;
        both += (e1 && e2) as usize;
    }
    if d1 == 0 || d2 == 0 {
        return None;
    }
    Some(0.5 * (both as f64 / d1 as f64 + both as f64 / d2 as f64))
}

/// Empirical χ̄̂(u) = 2 log P̂(F > u) / log P̂(F1 > u, F2 > u) − 1, clamped
/// to [−1, 1]. `None` when the joint survival is empty.
pub fn empirical_chibar(c1: &[f64], c2: &[f64], u: f64) -> Option<f64> {
    let (r1, r2, n) = pair_ranks(c1, c2);
    if n == 0 || !(0.0 < u && u < 1.0) {
        return None;
    }
    let cut = u * n as f64;
    let mut both = 0usize;
    let mut d1 = 0usize;
    let mut d2 = 0usize;
    for i in 0..n {
        let e1 = r1[i] > cut;
        let e2 = r2[i] > cut;
        d1 += e1 as usize;
        d2 += e2 as usize;
        both += (e1 && e2) as usize;
    }
    if both == 0 || d1 == 0 || d2 == 0 {
        return None;
    }
    let p_marg = 0.5 * (d1 + d2) as f64 / n as f64;
    let p_joint = both as f64 / n as f64;
    let value = 2.0 * p_marg.ln() / p_joint.ln() - 1.0;
    Some(value.clamp(-1.0, 1.0))
}

/// Half-open directional sectors, folded axially: 0 covers north
/// (−π/8, π/8], 1 is (π/8, 3π/8], 2 covers east (3π/8, 5π/8],
/// 3 is (5π/8, 7π/8].
pub fn sector_from_bearing(bearing: f64) -> usize {
    use std::f64::consts::PI;
    let mut b = bearing;
    while b > 7.0 * PI / 8.0 {
        b -= PI;
    }
    while b <= -PI / 8.0 {
        b += PI;
    }
    if b <= PI / 8.0 {
        0
    } else if b <= 3.0 * PI / 8.0 {
        1
    } else if b <= 5.0 * PI / 8.0 {
        2
    } else {
        3
    }
}

/// Sector of a planar pair from its easting/northing offset.
pub fn sector_assign_planar(d_east: f64, d_north: f64) -> usize {
    sector_from_bearing(d_east.atan2(d_north))
}

/// Sector of a geographic pair (lon/lat degrees) via the initial bearing.
pub fn sector_assign_geographic(lon1: f64, lat1: f64, lon2: f64, lat2: f64) -> usize {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dl = (lon2 - lon1).to_radians();
    let y = dl.sin() * p2.cos();
    let x = p1.cos() * p2.sin() - p1.sin() * p2.cos() * dl.cos();
    sector_from_bearing(y.atan2(x))
}

/// Loess: tricube-weighted local linear regression evaluated on an evenly
/// spaced grid over the observed h-range.
pub fn smooth_by_distance(points: &[(f64, f64)], span: f64, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(h, v)| h.is_finite() && v.is_finite())
        .collect();
    if pts.is_empty() {
        return Err(Error::data("loess needs at least one finite point"));
    }
    if !(0.0 < span && span <= 1.0) {
        return Err(Error::domain(format!("span must lie in (0, 1], got {span}")));
    }
    if pts.len() == 1 {
        return Ok(vec![pts[0]]);
    }
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (h_min, h_max) = (sorted[0].0, sorted[sorted.len() - 1].0);
    let m = grid_size.max(2);
    let window = ((span * sorted.len() as f64).ceil() as usize).clamp(2, sorted.len());
    let mut out = Vec::with_capacity(m);
    for g in 0..m {
        let x0 = h_min + (h_max - h_min) * g as f64 / (m - 1) as f64;
        // nearest `window` points by |h − x0|
        let mut nearest: Vec<(f64, f64)> = sorted.clone();
        nearest.sort_by(|a, b| {
            (a.0 - x0).abs().partial_cmp(&(b.0 - x0).abs()).unwrap()
        });
        nearest.truncate(window);
        let dmax = nearest.iter().map(|p| (p.0 - x0).abs()).fold(0.0, f64::max).max(1e-300);
        // weighted least squares line through the window
        let (mut sw, mut swx, mut swy, mut swxx, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in &nearest {
            let t = ((x - x0).abs() / dmax).min(1.0);
            let w = (1.0 - t * t * t).powi(3);
            sw += w;
            swx += w * x;
            swy += w * y;
            swxx += w * x * x;
            swxy += w * x * y;
        }
        let det = sw * swxx - swx * swx;
        let value = if det.abs() < 1e-12 * sw.max(1e-300) * swxx.max(1e-300) || det == 0.0 {
            swy / sw
        } else {
            let slope = (sw * swxy - swx * swy) / det;
            let intercept = (swy - slope * swx) / sw;
            intercept + slope * x0
        };
        out.push((x0, value));
    }
    Ok(out)
}

/// Per-pair empirical dependence at threshold `u`, with distance and sector.
#[derive(Clone, Debug)]
pub struct PairStatistic {
    pub site_i: usize,
    pub site_j: usize,
    pub h: f64,
    pub sector: usize,
    pub chi: Option<f64>,
    pub chibar: Option<f64>,
    pub u: f64,
}

/// χ̂/χ̄̂ for every site pair, in fixed pair order.
pub fn pair_dependence_table(data: &DataMatrix, sites: &SiteSet, u: f64) -> Vec<PairStatistic> {
    let columns: Vec<Vec<f64>> = (0..sites.len()).map(|s| data.column(s)).collect();
    let pairs = sites.pairs();
    pairs
        .par_iter()
        .map(|&(i, j, h)| {
            let sector = match sites.crs() {
                crate::sim::Crs::Planar => {
                    let (ci, cj) = (sites.coords()[i], sites.coords()[j]);
                    sector_assign_planar(cj[0] - ci[0], cj[1] - ci[1])
                }
                crate::sim::Crs::Geographic => {
                    let (ci, cj) = (sites.coords()[i], sites.coords()[j]);
                    sector_assign_geographic(ci[0], ci[1], cj[0], cj[1])
                }
            };
            PairStatistic {
                site_i: i,
                site_j: j,
                h,
                sector,
                chi: empirical_chi(&columns[i], &columns[j], u),
                chibar: empirical_chibar(&columns[i], &columns[j], u),
                u,
            }
        })
        .collect()
}

/// Naive extremal-coefficient estimator 1/mean(1/max(Z1, Z2)) for a unit
/// Fréchet pair: 1/max is Exp(θ) distributed.
pub fn empirical_theta(c1: &[f64], c2: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (a, b) in c1.iter().zip(c2) {
        if a.is_finite() && b.is_finite() {
            sum += 1.0 / a.max(*b);
            n += 1;
        }
    }
    n as f64 / sum
}

/// Kolmogorov–Smirnov distance between a sample and the unit Fréchet CDF.
pub fn ks_unit_frechet(col: &[f64]) -> f64 {
    let mut v: Vec<f64> = col.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &z) in v.iter().enumerate() {
        let f = (-1.0 / z).exp();
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::replicate_rng;
    use rand::Rng;

    #[test]
    fn ranks_average_ties() {
        let r = average_ranks(&[3.0, 1.0, 1.0, 2.0]);
        assert_eq!(r, vec![4.0, 1.5, 1.5, 3.0]);
        let with_nan = average_ranks(&[2.0, f64::NAN, 1.0]);
        assert!(with_nan[1].is_nan());
        assert_eq!(with_nan[0], 2.0);
    }

    #[test]
    fn chi_identical_and_antithetic_columns() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(empirical_chi(&x, &x, 0.95), Some(1.0));
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(empirical_chi(&x, &y, 0.95), Some(0.0));
        assert_eq!(empirical_chibar(&x, &x, 0.95), Some(1.0));
    }

    #[test]
    fn chi_independent_columns_near_one_minus_u() {
        let n = 10_000;
        let mut rng = replicate_rng(123, 0);
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let chi = empirical_chi(&a, &b, 0.95).unwrap();
        assert!((chi - 0.05).abs() < 0.02, "chi {chi}");
        let cb = empirical_chibar(&a, &b, 0.95).unwrap();
        assert!(cb.abs() < 0.15, "chibar {cb}");
    }

    #[test]
    fn chibar_gaussian_pair_matches_quadrature_oracle() {
        // χ̄ → ρ as u → 1 for a Gaussian pair; at u = 0.95 the exact value
        // is still 0.14 below ρ = 0.5, so the oracle is the finite-level
        // quadrature value rather than the asymptote itself.
        let n = 20_000;
        let rho: f64 = 0.5;
        let u = 0.95;
        let mut rng = replicate_rng(7, 0);
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let g1: f64 = rng.sample(rand_distr::StandardNormal);
            let g2: f64 = rng.sample(rand_distr::StandardNormal);
            a.push(g1);
            b.push(rho * g1 + (1.0 - rho * rho).sqrt() * g2);
        }
        let cb = empirical_chibar(&a, &b, u).unwrap();

        // exact joint survival P(Z1 > z, Z2 > z) by quadrature
        let z = crate::util::norm_quantile(u);
        let s = (1.0 - rho * rho).sqrt();
        let steps = 100_000;
        let hi = 9.0f64;
        let dx = (hi - z) / steps as f64;
        let phi = |x: f64| (-0.5 * x * x).exp() / crate::util::SQRT_2PI;
        let mut joint = 0.0;
        for i in 0..steps {
            let x0 = z + i as f64 * dx;
            let f0 = phi(x0) * crate::util::norm_sf((z - rho * x0) / s);
            let f1 = phi(x0 + dx) * crate::util::norm_sf((z - rho * (x0 + dx)) / s);
            joint += 0.5 * (f0 + f1) * dx;
        }
        let exact = 2.0 * (1.0 - u).ln() / joint.ln() - 1.0;
        assert!((exact - 0.3595).abs() < 0.001, "oracle drifted: {exact}");
        assert!((cb - exact).abs() < 0.05, "chibar {cb} vs exact {exact}");
        assert!(cb < rho, "finite-level chibar sits below the asymptote");
    }

    #[test]
    fn rank_invariance_under_monotone_transform() {
        let n = 500;
        let mut rng = replicate_rng(9, 0);
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let ta: Vec<f64> = a.iter().map(|v| v.exp()).collect();
        let tb: Vec<f64> = b.iter().map(|v| 3.0 * v + 1.0).collect();
        assert_eq!(empirical_chi(&a, &b, 0.9), empirical_chi(&ta, &tb, 0.9));
        assert_eq!(empirical_chibar(&a, &b, 0.9), empirical_chibar(&ta, &tb, 0.9));
    }

    #[test]
    fn sectors() {
        assert_eq!(sector_assign_planar(0.0, 1.0), 0); // due north
        assert_eq!(sector_assign_planar(1.0, 0.0), 2); // due east
        assert_eq!(sector_assign_planar(0.0, -1.0), 0); // due south folds to north
        assert_eq!(sector_assign_planar(1.0, 1.0), 1);
        assert_eq!(sector_assign_planar(-1.0, 1.0), 3);
        assert_eq!(
            sector_from_bearing(std::f64::consts::PI),
            sector_from_bearing(0.0)
        );
    }

    #[test]
    fn loess_constant_and_linear() {
        let pts: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 / 10.0, 2.5)).collect();
        for (_, v) in smooth_by_distance(&pts, 0.75, 20).unwrap() {
            assert!((v - 2.5).abs() < 1e-9);
        }
        let lin: Vec<(f64, f64)> = (0..40).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let sm = smooth_by_distance(&lin, 0.5, 25).unwrap();
        for &(x, v) in &sm[2..23] {
            assert!((v - (3.0 * x - 1.0)).abs() < 1e-6, "at {x}: {v}");
        }
    }

    #[test]
    fn loess_single_point() {
        let sm = smooth_by_distance(&[(1.0, 4.0)], 0.75, 10).unwrap();
        assert_eq!(sm, vec![(1.0, 4.0)]);
    }

    #[test]
    fn ks_detects_wrong_law() {
        let mut rng = replicate_rng(3, 0);
        let frechet: Vec<f64> = (0..4000)
            .map(|_| -1.0 / (rng.random::<f64>().max(1e-12)).ln())
            .collect();
        assert!(ks_unit_frechet(&frechet) < 0.03);
        let uniform: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_unit_frechet(&uniform) > 0.2);
    }
}
