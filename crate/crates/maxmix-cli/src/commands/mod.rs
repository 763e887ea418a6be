pub mod analyze;
pub mod fit;
pub mod power;
pub mod simulate;
pub mod test;

use anyhow::{Context, Result};
use maxmix::inference::CensoringConfig;
use maxmix::io;
use maxmix::sim::{DataMatrix, Scale, SiteSet};
use std::path::Path;

/// Load a data/sites pair, optionally transforming raw/GEV data to unit
/// Fréchet margins first. Fréchet data is required otherwise.
pub fn load_frechet(
    data_path: &Path,
    sites_path: &Path,
    gev_transform: bool,
    out: &Path,
) -> Result<(DataMatrix, SiteSet)> {
    let (data, _ids, _meta) = io::read_data_csv(data_path)?;
    let sites = io::read_sites_csv(sites_path)?;
    let data = if data.scale() == Scale::Frechet {
        data
    } else if gev_transform {
        let margins = maxmix::inference::fit_gev_per_site(&data)?;
        write_gev_csv(&out.join("gev.csv"), &margins, &sites)?;
        let (frechet, flagged) = maxmix::inference::to_unit_frechet(&data, &margins)?;
        if flagged > 0 {
            eprintln!("note: {flagged} values flagged missing by the GEV transform");
        }
        frechet
    } else {
        anyhow::bail!(
            "data at {} has scale '{}'; rerun with --gev-transform or supply Fréchet-scale data",
            data_path.display(),
            data.scale().name()
        );
    };
    Ok((data, sites))
}

pub fn write_gev_csv(
    path: &Path,
    margins: &maxmix::inference::GevMargins,
    sites: &SiteSet,
) -> Result<()> {
    use maxmix::util::fmt_f64;
    let mut out = String::from("site,mu,sigma,xi,converged\n");
    for (i, fit) in margins.fits.iter().enumerate() {
        let id = &sites.ids()[i];
        match fit {
            Some(p) => out.push_str(&format!(
                "{id},{},{},{},true\n",
                fmt_f64(p.mu),
                fmt_f64(p.sigma),
                fmt_f64(p.xi)
            )),
            None => out.push_str(&format!("{id},,,,false\n")),
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Censoring description for provenance lines.
pub fn censoring_tag(c: &CensoringConfig) -> String {
    use maxmix::inference::ThresholdMode;
    let th = match c.threshold {
        ThresholdMode::EmpiricalQuantile(p) => format!("q{p}"),
        ThresholdMode::FixedFrechet(u) => format!("u{u}"),
    };
    format!("censor={th} scheme={:?} delta={}", c.scheme, c.delta)
}
