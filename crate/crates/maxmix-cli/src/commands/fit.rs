use super::{censoring_tag, load_frechet};
use crate::config::Config;
use anyhow::{Context, Result};
use maxmix::inference::{fit_model, FitOptions};
use maxmix::uncertainty::{clic, estimate_godambe_mc};
use maxmix::util::fmt_f64;
use maxmix::{io, util};
use std::path::Path;

pub fn run(
    cfg: &Config,
    seed: u64,
    out: &Path,
    data_path: &Path,
    sites_path: &Path,
    gev_transform: bool,
    no_godambe: bool,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let (data, sites) = load_frechet(data_path, sites_path, gev_transform, out)?;
    let spec = cfg.model()?;
    let censoring = cfg.censoring()?;
    let fit = fit_model(&data, &sites, spec, &censoring, &FitOptions::default())?;

    let mut text = io::fit_to_text(&fit);
    text.push_str(&format!("{}\n", censoring_tag(&censoring)));

    if !no_godambe {
        let m = cfg.usize_or("m", 1500)?;
        let accuracy = match cfg.usize_or("accuracy", 0)? {
            0 => None,
            v => Some(v),
        };
        let godambe = estimate_godambe_mc(
            &fit,
            &sites,
            &censoring,
            m,
            util::mix_seed(seed, 0xD4),
            accuracy,
        )?;
        let clic_value = clic(fit.logpl, &godambe.h, &godambe.j)?;
        text.push_str(&format!("clic={}\n", fmt_f64(clic_value)));
        std::fs::write(out.join("godambe.txt"), io::godambe_to_text(&godambe))
            .context("writing godambe.txt")?;
        for (name, se) in spec.param_names().iter().zip(&godambe.se_natural) {
            text.push_str(&format!("se_{name}={}\n", fmt_f64(*se)));
        }
    }

    std::fs::write(out.join("fit.txt"), &text).context("writing fit.txt")?;
    std::fs::write(
        out.join("fit.csv"),
        format!("{}\n{}\n", io::fit_csv_header(), io::fit_to_csv_row(&fit)),
    )?;
    println!("{text}");
    Ok(())
}
