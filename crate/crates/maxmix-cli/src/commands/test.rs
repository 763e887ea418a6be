use super::{censoring_tag, load_frechet};
use crate::config::{parse_grid, Config};
use anyhow::{Context, Result};
use maxmix::hypothesis::{boundary_adjust, lr_test, z_test};
use maxmix::inference::{fit_constrained, fit_model, FitOptions};
use maxmix::uncertainty::estimate_godambe_mc;
use maxmix::{io, util};
use std::path::Path;

pub fn run(
    cfg: &Config,
    seed: u64,
    out: &Path,
    data_path: &Path,
    sites_path: &Path,
    a0_text: &str,
    gev_transform: bool,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let (data, sites) = load_frechet(data_path, sites_path, gev_transform, out)?;
    let spec = cfg.model()?;
    anyhow::ensure!(
        spec.index_of_a().is_some(),
        "model {} has no mixing coefficient to test",
        spec.name()
    );
    let censoring = cfg.censoring()?;
    let m = cfg.usize_or("m", 1500)?;
    let accuracy = match cfg.usize_or("accuracy", 0)? {
        0 => None,
        v => Some(v),
    };
    let a0_values = parse_grid(a0_text)?;

    let fit = fit_model(&data, &sites, spec, &censoring, &FitOptions::default())?;
    let a_hat = fit.a_hat().expect("mixture fit");
    let godambe = estimate_godambe_mc(
        &fit,
        &sites,
        &censoring,
        m,
        util::mix_seed(seed, 0xD4),
        accuracy,
    )?;
    let var_a = godambe
        .var_a_natural()
        .context("variance of a-hat unavailable")?;
    let (g_aa, h_aa) = godambe.submatrix_a()?;

    let mut rows = vec![io::test_csv_header().to_string()];
    let mut text = String::new();
    text.push_str(&format!(
        "a_hat={}\nse_a={}\nm={m}\nseed={seed}\n{}\n\n",
        maxmix::util::fmt_f64(a_hat),
        maxmix::util::fmt_f64(var_a.sqrt()),
        censoring_tag(&censoring)
    ));
    for &raw in &a0_values {
        let (a0, warned) = boundary_adjust(raw);
        if warned {
            text.push_str(&format!("note: a0={raw} moved to {a0} (boundary convention)\n"));
        }
        let provenance = format!("m={m} seed={seed} scaling=total");
        let mut z = z_test(a_hat, a0, var_a)?;
        z.provenance = provenance.clone();
        rows.push(io::test_to_csv_row(&z));
        text.push_str(&io::test_to_text(&z));

        let constrained = fit_constrained(
            &data,
            &sites,
            spec,
            &censoring,
            a0,
            &FitOptions { start: Some(fit.params.clone()), ..Default::default() },
        )?;
        let mut lr = lr_test(fit.logpl.max(constrained.logpl), constrained.logpl, h_aa, g_aa)?;
        lr.a0 = Some(a0);
        lr.provenance = provenance;
        rows.push(io::test_to_csv_row(&lr));
        text.push_str(&io::test_to_text(&lr));
        text.push('\n');
    }

    std::fs::write(out.join("tests.csv"), rows.join("\n") + "\n")?;
    std::fs::write(out.join("tests.txt"), &text)?;
    println!("{text}");
    Ok(())
}
