//! Site sets: coordinates plus a pairwise-distance matrix.

use crate::error::{Error, Result};
use crate::util::replicate_rng;
use rand::Rng;

/// Coordinate reference of a site set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crs {
    /// Planar coordinates; Euclidean distances in the same units.
    Planar,
    /// Longitude/latitude in degrees; great-circle distances in km.
    Geographic,
}

/// K locations with identifiers and a symmetric distance matrix.
#[derive(Clone, Debug)]
pub struct SiteSet {
    coords: Vec<[f64; 2]>,
    ids: Vec<String>,
    crs: Crs,
    dist: Vec<f64>, // row-major K×K
}

const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Great-circle distance in km between (lon, lat) points in degrees.
pub fn haversine_km(lon1: f64, lat1: f64, lon2: f64, lat2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (0.5 * dp).sin().powi(2) + p1.cos() * p2.cos() * (0.5 * dl).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().asin()
}

impl SiteSet {
    fn build(coords: Vec<[f64; 2]>, ids: Vec<String>, crs: Crs) -> Result<Self> {
        let k = coords.len();
        if k < 2 {
            return Err(Error::data(format!("a site set needs at least 2 sites, got {k}")));
        }
        if ids.len() != k {
            return Err(Error::data("site id count does not match coordinate count"));
        }
        if coords.iter().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(Error::data("site coordinates must be finite"));
        }
        let mut dist = vec![0.0; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let d = match crs {
                    Crs::Planar => {
                        let dx = coords[i][0] - coords[j][0];
                        let dy = coords[i][1] - coords[j][1];
                        (dx * dx + dy * dy).sqrt()
                    }
                    Crs::Geographic => {
                        haversine_km(coords[i][0], coords[i][1], coords[j][0], coords[j][1])
                    }
                };
                dist[i * k + j] = d;
                dist[j * k + i] = d;
            }
        }
        Ok(SiteSet { coords, ids, crs, dist })
    }

    pub fn from_planar(coords: Vec<[f64; 2]>) -> Result<Self> {
        let ids = (0..coords.len()).map(|i| format!("s{i}")).collect();
        Self::build(coords, ids, Crs::Planar)
    }

    pub fn from_planar_with_ids(coords: Vec<[f64; 2]>, ids: Vec<String>) -> Result<Self> {
        Self::build(coords, ids, Crs::Planar)
    }

    /// Geographic sites from (lon, lat) degree pairs; distances in km.
    pub fn from_geographic(coords: Vec<[f64; 2]>, ids: Vec<String>) -> Result<Self> {
        Self::build(coords, ids, Crs::Geographic)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn crs(&self) -> Crs {
        self.crs
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    /// All i < j pairs with their distances, in fixed row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let k = self.len();
        let mut out = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in (i + 1)..k {
                out.push((i, j, self.distance(i, j)));
            }
        }
        out
    }

    pub fn median_pairwise_distance(&self) -> f64 {
        let mut d: Vec<f64> = self.pairs().iter().map(|p| p.2).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d[d.len() / 2]
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        self.pairs().iter().map(|p| p.2).fold(f64::INFINITY, f64::min)
    }

    /// Planar working copy for the storm-process simulators.
    ///
    /// Geographic sites are projected to local east/north km by the
    /// equirectangular map about the centroid latitude; the distortion of
    /// pair distances is well under 1% at regional extents. Planar sets
    /// are returned as they are.
    pub fn planar_projection(&self) -> Result<SiteSet> {
        match self.crs {
            Crs::Planar => Ok(self.clone()),
            Crs::Geographic => {
                let lat0 = self.coords.iter().map(|c| c[1]).sum::<f64>() / self.len() as f64;
                let coords = self
                    .coords
                    .iter()
                    .map(|c| {
                        [
                            EARTH_RADIUS_KM * c[0].to_radians() * lat0.to_radians().cos(),
                            EARTH_RADIUS_KM * c[1].to_radians(),
                        ]
                    })
                    .collect();
                Self::build(coords, self.ids.clone(), Crs::Planar)
            }
        }
    }

    /// Axis-aligned bounding box ((xmin, ymin), (xmax, ymax)).
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in &self.coords {
            for d in 0..2 {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d]);
            }
        }
        (lo, hi)
    }
}

/// K sites uniform on the square [0, side]²; deterministic given the seed.
pub fn sample_sites_uniform(k: usize, side: f64, seed: u64) -> Result<SiteSet> {
    if k < 2 {
        return Err(Error::data(format!("need at least 2 sites, got {k}")));
    }
    if !(side > 0.0) {
        return Err(Error::domain(format!("square side must be > 0, got {side}")));
    }
    let mut rng = replicate_rng(seed, 0);
    let coords = (0..k)
        .map(|_| {
            let x: f64 = rng.random::<f64>() * side;
            let y: f64 = rng.random::<f64>() * side;
            [x, y]
        })
        .collect();
    SiteSet::from_planar(coords)
}
