//! Station-table and daily-series ingestion.
//!
//! Stations come as `id,lon,lat[,altitude]` CSV; the daily series is
//! long-format `date,station,value` with ISO dates. Values are aligned on
//! dates with explicit missing markers (absent rows become NaN), and a
//! month-range filter keeps the wet-season subset.

use anyhow::{bail, Context, Result};
use maxmix::sim::{DataMatrix, Scale, SiteSet};
use std::collections::BTreeMap;
use std::path::Path;

pub struct StationTable {
    pub sites: SiteSet,
    /// Altitude in metres, carried but unused by the models.
    pub altitude: Vec<Option<f64>>,
}

pub fn read_stations(path: &Path) -> Result<StationTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (ci, clon, clat) = match (col("id"), col("lon"), col("lat")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => bail!("{}: need columns id, lon, lat", path.display()),
    };
    let calt = col("altitude").or_else(|| col("alt"));
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    let mut altitude = Vec::new();
    for record in reader.records() {
        let r = record?;
        ids.push(r.get(ci).unwrap_or_default().to_string());
        let lon: f64 = r.get(clon).unwrap_or_default().parse().context("bad lon")?;
        let lat: f64 = r.get(clat).unwrap_or_default().parse().context("bad lat")?;
        coords.push([lon, lat]);
        altitude.push(calt.and_then(|c| r.get(c)).and_then(|v| v.parse().ok()));
    }
    Ok(StationTable { sites: SiteSet::from_geographic(coords, ids)?, altitude })
}

/// Month (1..=12) from an ISO `YYYY-MM-DD` date.
fn month_of(date: &str) -> Result<u32> {
    let m: u32 = date
        .get(5..7)
        .with_context(|| format!("bad date '{date}'"))?
        .parse()
        .with_context(|| format!("bad date '{date}'"))?;
    if !(1..=12).contains(&m) {
        bail!("bad month in '{date}'");
    }
    Ok(m)
}

/// Align a long-format series onto the station order, keeping only dates
/// whose month lies in `months` (inclusive range). Rows are dates.
pub fn read_series(
    path: &Path,
    stations: &StationTable,
    months: (u32, u32),
) -> Result<(DataMatrix, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (cd, cs, cv) = match (col("date"), col("station"), col("value")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => bail!("{}: need columns date, station, value", path.display()),
    };
    let index: BTreeMap<&str, usize> = stations
        .sites
        .ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let mut by_date: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let k = stations.sites.len();
    for record in reader.records() {
        let r = record?;
        let date = r.get(cd).unwrap_or_default();
        let station = r.get(cs).unwrap_or_default();
        let site = match index.get(station) {
            Some(&s) => s,
            None => bail!("unknown station id '{station}' in {}", path.display()),
        };
        let m = month_of(date)?;
        if m < months.0 || m > months.1 {
            continue;
        }
        let value = r.get(cv).unwrap_or_default();
        let v = if value.is_empty() { f64::NAN } else { value.parse().context("bad value")? };
        by_date
            .entry(date.to_string())
            .or_insert_with(|| vec![f64::NAN; k])
            [site] = v;
    }
    if by_date.is_empty() {
        bail!("no observations left after the season filter");
    }
    let dates: Vec<String> = by_date.keys().cloned().collect();
    let mut values = Vec::with_capacity(dates.len() * k);
    for row in by_date.values() {
        values.extend_from_slice(row);
    }
    let n = dates.len();
    Ok((DataMatrix::new(values, n, k, Scale::Raw)?, dates))
}

/// Station ids listed one per line (blank lines and `#` comments skipped).
pub fn read_group_list(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect())
}
