//! Power study: J replicates of simulate → fit → Godambe → tests over the
//! a₀ grid, with per-replicate result files so an interrupted run resumes
//! where it stopped and aggregation is a pure recount of those files.

use crate::config::Config;
use anyhow::{Context, Result};
use maxmix::hypothesis::ALPHA_LEVELS;
use maxmix::study::{run_replicate, StudyConfig};
use maxmix::util::{fmt_f64, parse_f64};
use std::path::Path;

const REPLICATE_HEADER: &str =
    "replicate,a_hat,a0,test,statistic,lambda,p_value,reject_0.01,reject_0.05,reject_0.10";

pub fn run(cfg: &Config, seed: u64, out: &Path) -> Result<()> {
    let rep_dir = out.join("replicates");
    std::fs::create_dir_all(&rep_dir)?;
    let spec = cfg.model()?;
    let study = StudyConfig {
        true_spec: spec,
        true_params: cfg.params_for(spec)?,
        fit_spec: maxmix::model::ModelSpec::MmTegITeg,
        k_sites: cfg.usize_or("k", 50)?,
        n_copies: cfg.usize_or("n", 1000)?,
        square_side: cfg.f64_or("side", 2.0)?,
        censoring: cfg.censoring()?,
        m_godambe: cfg.usize_or("m", 1500)?,
        a0_grid: cfg.a0_grid()?,
        run_lr: cfg.bool_or("run_lr", true)?,
        seed,
        accuracy: match cfg.usize_or("accuracy", 0)? {
            0 => None,
            v => Some(v),
        },
        fixed_sites: cfg.bool_or("fixed_sites", false)?,
    };
    let j = cfg.usize_or("j", 150)?;

    for rep in 0..j {
        let path = rep_dir.join(format!("rep_{rep:05}.csv"));
        if path.exists() && parse_replicate_file(&path).is_ok() {
            continue; // resume: already computed
        }
        let outcome = run_replicate(&study, rep)
            .with_context(|| format!("replicate {rep} failed"))?;
        let mut rows = vec![REPLICATE_HEADER.to_string()];
        let a_hat = outcome.fit.a_hat().unwrap_or(f64::NAN);
        for t in &outcome.tests {
            let mut cells = vec![
                rep.to_string(),
                fmt_f64(a_hat),
                t.a0.map(fmt_f64).unwrap_or_default(),
                t.kind.name().to_string(),
                fmt_f64(t.statistic),
                t.lambda.map(fmt_f64).unwrap_or_default(),
                fmt_f64(t.p_value),
            ];
            for (_, reject) in &t.decisions {
                cells.push(reject.to_string());
            }
            rows.push(cells.join(","));
        }
        std::fs::write(&path, rows.join("\n") + "\n")?;
        println!("replicate {rep}: a_hat = {a_hat:.4}");
    }

    aggregate(&rep_dir, &out.join("power.csv"))?;
    println!("aggregated rejection rates -> {}", out.join("power.csv").display());
    Ok(())
}

struct TestRow {
    a0: f64,
    test: String,
    rejects: [bool; 3],
}

fn parse_replicate_file(path: &Path) -> Result<Vec<TestRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    anyhow::ensure!(
        lines.next() == Some(REPLICATE_HEADER),
        "{}: unexpected header",
        path.display()
    );
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(cells.len() == 10, "{}: bad row '{line}'", path.display());
        rows.push(TestRow {
            a0: parse_f64(cells[2]).context("bad a0")?,
            test: cells[3].to_string(),
            rejects: [cells[7] == "true", cells[8] == "true", cells[9] == "true"],
        });
    }
    anyhow::ensure!(!rows.is_empty(), "{}: empty replicate file", path.display());
    Ok(rows)
}

/// Recount the per-replicate files into rejection rates per (a0, α, test).
pub fn aggregate(rep_dir: &Path, out_csv: &Path) -> Result<()> {
    let mut files: Vec<_> = std::fs::read_dir(rep_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "csv").unwrap_or(false))
        .collect();
    files.sort();
    let mut counts: Vec<(f64, f64, String, usize, usize)> = Vec::new();
    for file in &files {
        for row in parse_replicate_file(file)? {
            for (ai, &alpha) in ALPHA_LEVELS.iter().enumerate() {
                match counts
                    .iter_mut()
                    .find(|(a0, al, t, _, _)| *a0 == row.a0 && *al == alpha && *t == row.test)
                {
                    Some(c) => {
                        c.3 += row.rejects[ai] as usize;
                        c.4 += 1;
                    }
                    None => counts.push((
                        row.a0,
                        alpha,
                        row.test.clone(),
                        row.rejects[ai] as usize,
                        1,
                    )),
                }
            }
        }
    }
    counts.sort_by(|a, b| (a.0, a.1, &a.2).partial_cmp(&(b.0, b.1, &b.2)).unwrap());
    let mut out = String::from("a0,alpha,test,n_reject,n_total,rate\n");
    for (a0, alpha, test, nr, nt) in counts {
        out.push_str(&format!(
            "{},{},{test},{nr},{nt},{}\n",
            fmt_f64(a0),
            fmt_f64(alpha),
            fmt_f64(nr as f64 / nt as f64)
        ));
    }
    std::fs::write(out_csv, out)?;
    Ok(())
}
