//! Max-mixture simulation: `Z(s) = max{a X(s), (1−a) Y(s)}` with independent
//! max-stable `X` and asymptotically independent `Y`.

use super::ai::invert_ms;
use super::data::{DataMatrix, Scale};
use super::maxstable::{simulate_smith, simulate_teg};
use super::sites::SiteSet;
use crate::error::Result;
use crate::model::spec::ModelSpec;
use crate::util::mix_seed;

const SALT_X: u64 = 0x11;
const SALT_Y: u64 = 0x22;

/// Simulate `n` replicates of a model class at the sites.
///
/// The X and Y components draw from independent child seeds derived from
/// `seed`, so mixtures and their pure components are reproducible separately.
pub fn simulate_mm(
    sites: &SiteSet,
    spec: ModelSpec,
    params: &[f64],
    n: usize,
    seed: u64,
    accuracy: Option<usize>,
) -> Result<DataMatrix> {
    spec.validate(params)?;
    let seed_x = mix_seed(seed, SALT_X);
    let seed_y = mix_seed(seed, SALT_Y);
    match spec {
        ModelSpec::MsTeg => simulate_teg(sites, params[0], params[1], n, seed_x, accuracy),
        ModelSpec::MsSmith => simulate_smith(sites, params[0], n, seed_x, accuracy),
        ModelSpec::ImsSmith => {
            invert_ms(&simulate_smith(sites, params[0], n, seed_y, accuracy)?)
        }
        ModelSpec::MmTegITeg => {
            let (a, phi_x, r_x, phi_y, r_y) =
                (params[0], params[1], params[2], params[3], params[4]);
            let x = || simulate_teg(sites, phi_x, r_x, n, seed_x, accuracy);
            let y = || -> Result<DataMatrix> {
                invert_ms(&simulate_teg(sites, phi_y, r_y, n, seed_y, accuracy)?)
            };
            combine(a, x, y)
        }
        ModelSpec::MmTegISmith => {
            let (a, phi_x, r_x, phi_y) = (params[0], params[1], params[2], params[3]);
            let x = || simulate_teg(sites, phi_x, r_x, n, seed_x, accuracy);
            let y = || -> Result<DataMatrix> {
                invert_ms(&simulate_smith(sites, phi_y, n, seed_y, accuracy)?)
            };
            combine(a, x, y)
        }
    }
}

fn combine(
    a: f64,
    x: impl FnOnce() -> Result<DataMatrix>,
    y: impl FnOnce() -> Result<DataMatrix>,
) -> Result<DataMatrix> {
    // boundaries return the pure component: avoids 0·∞ from capped values
    if a >= 1.0 {
        return x();
    }
    if a <= 0.0 {
        return y();
    }
    let xd = x()?;
    let yd = y()?;
    let b = 1.0 - a;
    let values = xd
        .values()
        .iter()
        .zip(yd.values())
        .map(|(&xv, &yv)| (a * xv).max(b * yv))
        .collect();
    DataMatrix::new(values, xd.n_replicates(), xd.n_sites(), Scale::Frechet)
}
