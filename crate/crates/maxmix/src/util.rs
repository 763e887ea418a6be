//! Small numeric helpers shared across modules.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density φ(x).
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal distribution function Φ(x), via erfc for tail accuracy.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal survival function 1 − Φ(x).
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile Φ⁻¹(p).
pub fn norm_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}

/// splitmix64 step, used to derive independent child seeds from a master seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for one replicate: a counter-based split of the master seed, so
/// results do not depend on how replicates are scheduled across workers.
pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// Linear-interpolation sample quantile (R type 7) of finite values.
///
/// Non-finite entries are ignored. Returns `None` when no finite value exists.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 1 {
        return Some(v[0]);
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < n {
        Some(v[lo] + frac * (v[lo + 1] - v[lo]))
    } else {
        Some(v[n - 1])
    }
}

/// Format a float with 17 significant digits so the value round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// Parse a float written by [`fmt_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "NaN" | "nan" | "NA" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-10);
        assert!((norm_cdf(-1.0) - (1.0 - 0.841_344_746_068_542_9)).abs() < 1e-10);
    }

    #[test]
    fn norm_quantile_inverts_cdf() {
        for &p in &[0.01, 0.1, 0.5, 0.9, 0.975, 0.999] {
            assert!((norm_cdf(norm_quantile(p)) - p).abs() < 1e-10);
        }
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), Some(3.0));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(5.0));
        assert!((quantile(&v, 0.9).unwrap() - 4.6).abs() < 1e-12);
    }

    #[test]
    fn quantile_skips_nan() {
        let v = [f64::NAN, 2.0, 1.0];
        assert_eq!(quantile(&v, 1.0), Some(2.0));
        assert_eq!(quantile(&[f64::NAN], 0.5), None);
    }

    #[test]
    fn fmt_round_trips() {
        for &x in &[1.0, -0.1234567890123456, 1e-300, 9.4912215810299725e0] {
            assert_eq!(parse_f64(&fmt_f64(x)), Some(x));
        }
        assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn replicate_streams_differ() {
        use rand::RngCore;
        let a = replicate_rng(7, 0).next_u64();
        let b = replicate_rng(7, 1).next_u64();
        let a2 = replicate_rng(7, 0).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }
}
