//! File formats: data matrices as CSV with a key-value metadata sidecar,
//! site sets as CSV, and plain-text/CSV serializations of fit, Godambe and
//! test results.
//!
//! Floats are written with 17 significant digits so every file round-trips
//! bit-exactly; nothing here emits timestamps or other non-reproducible
//! content.

use crate::error::{Error, Result};
use crate::hypothesis::TestReport;
use crate::inference::fit::FitResult;
use crate::sim::{Crs, DataMatrix, Scale, SiteSet};
use crate::uncertainty::GodambeEstimate;
use crate::util::{fmt_f64, parse_f64};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Write a data matrix as CSV (header = site ids, rows = replicates) plus a
/// `<path>.meta` key-value sidecar.
pub fn write_data_csv(
    path: &Path,
    data: &DataMatrix,
    site_ids: &[String],
    meta: &BTreeMap<String, String>,
) -> Result<()> {
    if site_ids.len() != data.n_sites() {
        return Err(Error::data("site id count does not match the data"));
    }
    let mut out = String::new();
    out.push_str(&site_ids.join(","));
    out.push('\n');
    for rep in 0..data.n_replicates() {
        let row: Vec<String> = data.row(rep).iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;

    let mut side = String::new();
    writeln!(side, "scale={}", data.scale().name()).ok();
    writeln!(side, "n={}", data.n_replicates()).ok();
    writeln!(side, "k={}", data.n_sites()).ok();
    for (k, v) in meta {
        writeln!(side, "{k}={v}").ok();
    }
    fs::write(meta_path(path), side)?;
    Ok(())
}

/// Read a data matrix and its metadata sidecar.
pub fn read_data_csv(path: &Path) -> Result<(DataMatrix, Vec<String>, BTreeMap<String, String>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(format!("{}: empty file", path.display())))?;
    let ids: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let k = ids.len();
    let mut values = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                parse_f64(tok).ok_or_else(|| {
                    Error::parse(format!("{}:{}: bad float '{tok}'", path.display(), lineno + 2))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != k {
            return Err(Error::parse(format!(
                "{}:{}: expected {k} columns, got {}",
                path.display(),
                lineno + 2,
                row.len()
            )));
        }
        values.extend(row);
        n += 1;
    }
    let meta = read_key_values(&meta_path(path))?;
    let scale = meta
        .get("scale")
        .map(|s| Scale::from_name(s))
        .transpose()?
        .unwrap_or(Scale::Raw);
    Ok((DataMatrix::new(values, n, k, scale)?, ids, meta))
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".meta");
    std::path::PathBuf::from(p)
}

/// Parse a flat `key=value` text file; `#` starts a comment line.
pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    if !path.exists() {
        return Ok(map);
    }
    let text = fs::read_to_string(path)?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("{}: expected key=value, got '{line}'", path.display())))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Write sites as CSV: `id,x,y` for planar sets, `id,lon,lat` for geographic.
pub fn write_sites_csv(path: &Path, sites: &SiteSet) -> Result<()> {
    let mut out = String::new();
    out.push_str(match sites.crs() {
        Crs::Planar => "id,x,y\n",
        Crs::Geographic => "id,lon,lat\n",
    });
    for (id, c) in sites.ids().iter().zip(sites.coords()) {
        writeln!(out, "{id},{},{}", fmt_f64(c[0]), fmt_f64(c[1])).ok();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read sites written by [`write_sites_csv`]; the header names pick the CRS.
pub fn read_sites_csv(path: &Path) -> Result<SiteSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(format!("{}: empty file", path.display())))?
        .trim()
        .to_ascii_lowercase();
    let crs = if header == "id,x,y" {
        Crs::Planar
    } else if header == "id,lon,lat" {
        Crs::Geographic
    } else {
        return Err(Error::parse(format!(
            "{}: expected header 'id,x,y' or 'id,lon,lat', got '{header}'",
            path.display()
        )));
    };
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::parse(format!("{}: bad site row '{line}'", path.display())));
        }
        ids.push(parts[0].trim().to_string());
        let a = parse_f64(parts[1]).ok_or_else(|| Error::parse(format!("bad coordinate '{}'", parts[1])))?;
        let b = parse_f64(parts[2]).ok_or_else(|| Error::parse(format!("bad coordinate '{}'", parts[2])))?;
        coords.push([a, b]);
    }
    match crs {
        Crs::Planar => SiteSet::from_planar_with_ids(coords, ids),
        Crs::Geographic => SiteSet::from_geographic(coords, ids),
    }
}

/// Human-readable key-value rendering of a fit.
pub fn fit_to_text(fit: &FitResult) -> String {
    let mut s = String::new();
    writeln!(s, "model={}", fit.spec.name()).ok();
    for (name, v) in fit.spec.param_names().iter().zip(&fit.params) {
        writeln!(s, "{name}={}", fmt_f64(*v)).ok();
    }
    writeln!(s, "logpl={}", fmt_f64(fit.logpl)).ok();
    writeln!(s, "converged={}", fit.converged).ok();
    writeln!(s, "iterations={}", fit.iterations).ok();
    writeln!(s, "evals={}", fit.evals).ok();
    writeln!(s, "n_replicates={}", fit.n_replicates).ok();
    writeln!(s, "skipped_contributions={}", fit.skipped).ok();
    if let Some(a0) = fit.constrained_a {
        writeln!(s, "constrained_a={}", fmt_f64(a0)).ok();
    }
    s
}

/// One machine-readable CSV row per fit (fixed five-parameter layout,
/// absent parameters empty).
pub fn fit_csv_header() -> &'static str {
    "model,a,phi_x,r_x,phi_y,r_y,logpl,converged,iterations,evals"
}

pub fn fit_to_csv_row(fit: &FitResult) -> String {
    let names = ["a", "phi_x", "r_x", "phi_y", "r_y"];
    let mut cells = vec![fit.spec.name().to_string()];
    for want in names {
        let cell = fit
            .spec
            .param_names()
            .iter()
            .position(|n| *n == want)
            .map(|i| fmt_f64(fit.params[i]))
            .unwrap_or_default();
        cells.push(cell);
    }
    cells.push(fmt_f64(fit.logpl));
    cells.push(fit.converged.to_string());
    cells.push(fit.iterations.to_string());
    cells.push(fit.evals.to_string());
    cells.join(",")
}

/// Matrices of a Godambe estimate as labelled CSV blocks plus a summary.
pub fn godambe_to_text(est: &GodambeEstimate) -> String {
    let mut s = String::new();
    writeln!(s, "model={}", est.spec.name()).ok();
    writeln!(s, "m={}", est.m).ok();
    writeln!(s, "seed={}", est.seed).ok();
    writeln!(s, "mean_score_norm={}", fmt_f64(est.mean_score_norm)).ok();
    writeln!(s, "pinv_fallback={}", est.pinv_fallback).ok();
    writeln!(s, "variance_scaling=total").ok();
    for (name, v) in est.spec.param_names().iter().zip(&est.se_natural) {
        writeln!(s, "se_{name}={}", fmt_f64(*v)).ok();
    }
    for (label, m) in [("H", &est.h), ("J", &est.j), ("Ginv", &est.ginv)] {
        writeln!(s, "[{label}]").ok();
        s.push_str(&matrix_csv(m));
    }
    s
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Text rendering of a test report.
pub fn test_to_text(r: &TestReport) -> String {
    let mut s = String::new();
    writeln!(s, "test={}", r.kind.name()).ok();
    if let Some(a0) = r.a0 {
        writeln!(s, "a0={}", fmt_f64(a0)).ok();
    }
    writeln!(s, "statistic={}", fmt_f64(r.statistic)).ok();
    if let Some(l) = r.lambda {
        writeln!(s, "lambda={}", fmt_f64(l)).ok();
    }
    writeln!(s, "p_value={}", fmt_f64(r.p_value)).ok();
    for (alpha, reject) in &r.decisions {
        writeln!(s, "reject_at_{alpha}={reject}").ok();
    }
    if !r.provenance.is_empty() {
        writeln!(s, "provenance={}", r.provenance).ok();
    }
    s
}

pub fn test_csv_header() -> &'static str {
    "test,a0,statistic,lambda,p_value,reject_0.01,reject_0.05,reject_0.10"
}

pub fn test_to_csv_row(r: &TestReport) -> String {
    let mut cells = vec![
        r.kind.name().to_string(),
        r.a0.map(fmt_f64).unwrap_or_default(),
        fmt_f64(r.statistic),
        r.lambda.map(fmt_f64).unwrap_or_default(),
        fmt_f64(r.p_value),
    ];
    for (_, reject) in &r.decisions {
        cells.push(reject.to_string());
    }
    cells.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::sample_sites_uniform;

    #[test]
    fn data_csv_round_trips_losslessly() {
        let dir = tempfile::tempdir().unwrap();
        let data = DataMatrix::new(
            vec![1.234567890123456, 7.5e-3, f64::NAN, 42.0],
            2,
            2,
            Scale::Frechet,
        )
        .unwrap();
        let ids = vec!["s0".to_string(), "s1".to_string()];
        let mut meta = BTreeMap::new();
        meta.insert("seed".to_string(), "17".to_string());
        let path = dir.path().join("data.csv");
        write_data_csv(&path, &data, &ids, &meta).unwrap();
        let (back, ids2, meta2) = read_data_csv(&path).unwrap();
        assert_eq!(ids, ids2);
        assert_eq!(meta2.get("seed").unwrap(), "17");
        assert_eq!(back.scale(), Scale::Frechet);
        for (a, b) in data.values().iter().zip(back.values()) {
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
        }
    }

    #[test]
    fn sites_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sites = sample_sites_uniform(6, 2.0, 9).unwrap();
        let path = dir.path().join("sites.csv");
        write_sites_csv(&path, &sites).unwrap();
        let back = read_sites_csv(&path).unwrap();
        assert_eq!(sites.coords(), back.coords());
        assert_eq!(sites.crs(), back.crs());
    }

    #[test]
    fn geographic_sites_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sites = SiteSet::from_geographic(
            vec![[151.2, -33.8], [153.0, -27.5]],
            vec!["syd".into(), "bne".into()],
        )
        .unwrap();
        let path = dir.path().join("stations.csv");
        write_sites_csv(&path, &sites).unwrap();
        let back = read_sites_csv(&path).unwrap();
        assert_eq!(back.crs(), Crs::Geographic);
        assert!((back.distance(0, 1) - sites.distance(0, 1)).abs() < 1e-9);
    }
}
