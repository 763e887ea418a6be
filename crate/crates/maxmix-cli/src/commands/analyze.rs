//! Station-data pipeline: season filter, GEV margins, unit Fréchet
//! transform, dependence diagnostics, model menu with CLIC selection on
//! group A, mixing-coefficient tests on group B, and the two-sample
//! comparison of the groups.

use super::write_gev_csv;
use crate::config::Config;
use crate::stations::{read_group_list, read_series, read_stations};
use anyhow::{bail, Context, Result};
use maxmix::diagnostics::{pair_dependence_table, smooth_by_distance};
use maxmix::hypothesis::{boundary_adjust, lr_test, two_sample_z, z_test};
use maxmix::inference::{
    fit_constrained, fit_gev_per_site, fit_model, to_unit_frechet, CensoringConfig, FitOptions,
    ThresholdMode,
};
use maxmix::model::ModelSpec;
use maxmix::sim::{DataMatrix, SiteSet};
use maxmix::uncertainty::{clic, estimate_godambe_mc, GodambeEstimate};
use maxmix::util::{fmt_f64, mix_seed};
use maxmix::{inference::FitResult, io};
use std::fmt::Write as _;
use std::path::Path;

pub fn run(
    cfg: &Config,
    seed: u64,
    out: &Path,
    stations_path: &Path,
    series_path: &Path,
    group_a_path: &Path,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut report = String::new();

    // ingest and filter
    let stations = read_stations(stations_path)?;
    let months = cfg.season_months()?;
    let (raw, dates) = read_series(series_path, &stations, months)?;
    writeln!(
        report,
        "stations={} days={} months={}-{}",
        stations.sites.len(),
        dates.len(),
        months.0,
        months.1
    )?;
    let altitudes: Vec<f64> = stations.altitude.iter().flatten().copied().collect();
    if !altitudes.is_empty() {
        writeln!(
            report,
            "altitude_m={}..{}",
            altitudes.iter().copied().fold(f64::INFINITY, f64::min),
            altitudes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        )?;
    }

    // margins
    let margins = fit_gev_per_site(&raw)?;
    write_gev_csv(&out.join("gev.csv"), &margins, &stations.sites)?;
    for (site, reason) in &margins.failures {
        writeln!(report, "gev_failed site={} reason={}", stations.sites.ids()[*site], reason)?;
    }
    let (frechet, flagged) = to_unit_frechet(&raw, &margins)?;
    writeln!(report, "gev_flagged_values={flagged}")?;

    // dependence diagnostics on all stations
    let u_diag = cfg.f64_or("u_diag", 0.97)?;
    write_dependence_csv(out, &frechet, &stations.sites, u_diag)?;

    // group split
    let group_a_ids = read_group_list(group_a_path)?;
    let (idx_a, idx_b) = split_groups(&stations.sites, &group_a_ids)?;
    writeln!(report, "group_a={} group_b={}", idx_a.len(), idx_b.len())?;
    let (sites_a, data_a) = subset(&stations.sites, &frechet, &idx_a)?;
    let (sites_b, data_b) = subset(&stations.sites, &frechet, &idx_b)?;

    // censoring: fixed Fréchet threshold u = −1/log(0.90) unless overridden
    let u_default = -1.0 / 0.9f64.ln();
    let censoring = CensoringConfig {
        threshold: ThresholdMode::FixedFrechet(cfg.f64_or("u_frechet", u_default)?),
        ..cfg.censoring()?
    };
    let m = cfg.usize_or("m", 1500)?;

    // model menu on group A, ranked by CLIC
    let mut menu: Vec<(ModelSpec, FitResult, GodambeEstimate, f64)> = Vec::new();
    let mut models_csv = String::from("model,a,phi_x,r_x,phi_y,r_y,logpl,clic,se_a\n");
    for (i, spec) in ModelSpec::ALL.into_iter().enumerate() {
        let fit = fit_model(&data_a, &sites_a, spec, &censoring, &FitOptions::default())
            .with_context(|| format!("fitting {} on group A", spec.name()))?;
        eprintln!("group A {}: params {:?} logpl {:.1}", spec.name(), fit.params, fit.logpl);
        let godambe = estimate_godambe_mc(
            &fit,
            &sites_a,
            &censoring,
            m,
            mix_seed(seed, 0xE0 + i as u64),
            None,
        )
        .with_context(|| format!("Godambe step for {} (params {:?})", spec.name(), fit.params))?;
        let clic_value = clic(fit.logpl, &godambe.h, &godambe.j)?;
        let row = io::fit_to_csv_row(&fit);
        let mut cells: Vec<String> = row.split(',').map(|s| s.to_string()).collect();
        cells.truncate(7); // model + 5 params + logpl
        cells.push(fmt_f64(clic_value));
        cells.push(godambe.se_a_natural().map(fmt_f64).unwrap_or_default());
        models_csv.push_str(&cells.join(","));
        models_csv.push('\n');
        writeln!(
            report,
            "model={} logpl={} clic={}",
            spec.name(),
            fmt_f64(fit.logpl),
            fmt_f64(clic_value)
        )?;
        menu.push((spec, fit, godambe, clic_value));
    }
    std::fs::write(out.join("models.csv"), &models_csv)?;
    menu.sort_by(|a, b| a.3.partial_cmp(&b.3).unwrap());
    let (best_spec, best_fit_a, godambe_a, best_clic) = &menu[0];
    writeln!(report, "selected_model={} clic={}", best_spec.name(), fmt_f64(*best_clic))?;

    // group-B test at group A's mixing coefficient
    match best_fit_a.a_hat() {
        None => {
            writeln!(
                report,
                "selected model has no mixing coefficient; group-B test skipped"
            )?;
        }
        Some(a_hat_a) => {
            let (a0, warned) = boundary_adjust(a_hat_a);
            if warned {
                writeln!(report, "a0 moved to {a0} (boundary convention)")?;
            }
            let fit_b = fit_model(&data_b, &sites_b, *best_spec, &censoring, &FitOptions::default())?;
            let godambe_b = estimate_godambe_mc(
                &fit_b,
                &sites_b,
                &censoring,
                m,
                mix_seed(seed, 0xF0),
                None,
            )?;
            let a_hat_b = fit_b.a_hat().context("selected model carries a")?;
            let var_b = godambe_b.var_a_natural().context("variance of a-hat")?;
            let (g_aa, h_aa) = godambe_b.submatrix_a()?;
            let provenance = format!("m={m} seed={seed} scaling=total");

            let mut z = z_test(a_hat_b, a0, var_b)?;
            z.provenance = provenance.clone();
            let constrained = fit_constrained(
                &data_b,
                &sites_b,
                *best_spec,
                &censoring,
                a0,
                &FitOptions { start: Some(fit_b.params.clone()), ..Default::default() },
            )?;
            let mut lr =
                lr_test(fit_b.logpl.max(constrained.logpl), constrained.logpl, h_aa, g_aa)?;
            lr.a0 = Some(a0);
            lr.provenance = provenance.clone();

            let se_a = godambe_a.se_a_natural().context("group-A se")?;
            let mut two = two_sample_z(a_hat_a, se_a, a_hat_b, var_b.sqrt())?;
            two.provenance = provenance;

            let mut tests_csv = String::from(io::test_csv_header().to_string() + "\n");
            for t in [&z, &lr, &two] {
                tests_csv.push_str(&io::test_to_csv_row(t));
                tests_csv.push('\n');
                report.push_str(&io::test_to_text(t));
            }
            std::fs::write(out.join("tests.csv"), tests_csv)?;
            writeln!(report, "a_hat_A={} a_hat_B={}", fmt_f64(a_hat_a), fmt_f64(a_hat_b))?;
        }
    }

    std::fs::write(out.join("report.txt"), &report)?;
    println!("{report}");
    Ok(())
}

fn split_groups(sites: &SiteSet, group_a_ids: &[String]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut idx_a = Vec::new();
    for id in group_a_ids {
        match sites.ids().iter().position(|s| s == id) {
            Some(i) => idx_a.push(i),
            None => bail!("group list names unknown station id '{id}'"),
        }
    }
    let idx_b: Vec<usize> = (0..sites.len()).filter(|i| !idx_a.contains(i)).collect();
    if idx_a.len() < 2 || idx_b.len() < 2 {
        bail!(
            "both groups need at least 2 stations (A has {}, B has {})",
            idx_a.len(),
            idx_b.len()
        );
    }
    Ok((idx_a, idx_b))
}

fn subset(sites: &SiteSet, data: &DataMatrix, idx: &[usize]) -> Result<(SiteSet, DataMatrix)> {
    let coords: Vec<[f64; 2]> = idx.iter().map(|&i| sites.coords()[i]).collect();
    let ids: Vec<String> = idx.iter().map(|&i| sites.ids()[i].clone()).collect();
    let sub_sites = match sites.crs() {
        maxmix::sim::Crs::Planar => SiteSet::from_planar_with_ids(coords, ids)?,
        maxmix::sim::Crs::Geographic => SiteSet::from_geographic(coords, ids)?,
    };
    let mut values = Vec::with_capacity(data.n_replicates() * idx.len());
    for rep in 0..data.n_replicates() {
        for &i in idx {
            values.push(data.get(rep, i));
        }
    }
    let sub_data =
        DataMatrix::new(values, data.n_replicates(), idx.len(), data.scale())?;
    Ok((sub_sites, sub_data))
}

fn write_dependence_csv(out: &Path, data: &DataMatrix, sites: &SiteSet, u: f64) -> Result<()> {
    let table = pair_dependence_table(data, sites, u);
    let mut csv = String::from("site_i,site_j,h,sector,chi,chibar,u\n");
    for p in &table {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            sites.ids()[p.site_i],
            sites.ids()[p.site_j],
            fmt_f64(p.h),
            p.sector,
            p.chi.map(fmt_f64).unwrap_or_default(),
            p.chibar.map(fmt_f64).unwrap_or_default(),
            fmt_f64(p.u)
        ));
    }
    std::fs::write(out.join("dependence.csv"), csv)?;

    // loess curves per sector, plot-ready
    let mut sm = String::from("sector,measure,h,value\n");
    for sector in 0..4 {
        for (measure, pick) in [
            ("chi", Box::new(|p: &maxmix::diagnostics::PairStatistic| p.chi)
                as Box<dyn Fn(&maxmix::diagnostics::PairStatistic) -> Option<f64>>),
            ("chibar", Box::new(|p: &maxmix::diagnostics::PairStatistic| p.chibar)),
        ] {
            let pts: Vec<(f64, f64)> = table
                .iter()
                .filter(|p| p.sector == sector)
                .filter_map(|p| pick(p).map(|v| (p.h, v)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            for (h, v) in smooth_by_distance(&pts, 0.75, 40)? {
                sm.push_str(&format!("{sector},{measure},{},{}\n", fmt_f64(h), fmt_f64(v)));
            }
        }
    }
    std::fs::write(out.join("dependence_smoothed.csv"), sm)?;
    Ok(())
}
