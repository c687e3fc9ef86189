//! Surface-plot data export: evaluate learned collection factors and the
//! closed-form supervised scores on a (tpr, fpr) grid so the weighting
//! behavior can be plotted as a surface over the two free variables.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use termweight::ltw::LtwModel;
use termweight::stats::{chi_square_rates, gain_ratio_rates, relevance_frequency_rates};

use crate::config::ExperimentConfig;

#[derive(Debug, Default)]
pub struct SurfaceReport {
    pub reference: usize,
    pub learned: usize,
    pub skipped: usize,
}

fn write_reference(
    path: &Path,
    resolution: usize,
    score: impl Fn(f64, f64) -> f64,
) -> Result<()> {
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = String::from("tpr\tfpr\tvalue\n");
    for i in 0..resolution {
        let tpr = i as f64 * step;
        for j in 0..resolution {
            let fpr = j as f64 * step;
            out.push_str(&format!(
                "{tpr:.8e}\t{fpr:.8e}\t{:.8e}\n",
                score(tpr, fpr)
            ));
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Emit the closed-form chi-square / gain-ratio / relevance-frequency
/// surfaces at the configured class prior, plus one grid + scatter file per
/// local-variant checkpoint found under `checkpoints/`. Global-variant or
/// unreadable checkpoints produce warnings, not failures.
pub fn emit_surfaces(config: &ExperimentConfig) -> Result<SurfaceReport> {
    let out_dir = config.output.join("surfaces");
    fs::create_dir_all(&out_dir)?;
    let res = config.surface_resolution;
    let prior = config.surface_prior;
    let docs = config.surface_docs;

    let mut report = SurfaceReport::default();
    write_reference(&out_dir.join("reference.chi2.tsv"), res, |tpr, fpr| {
        chi_square_rates(tpr, fpr, prior, docs)
    })?;
    write_reference(&out_dir.join("reference.gr.tsv"), res, |tpr, fpr| {
        gain_ratio_rates(tpr, fpr, prior).unwrap_or(0.0)
    })?;
    write_reference(&out_dir.join("reference.rf.tsv"), res, |tpr, fpr| {
        relevance_frequency_rates(tpr, fpr, prior, docs)
    })?;
    report.reference = 3;

    let ckpt_dir = config.output.join("checkpoints");
    let mut first_rep: Vec<std::path::PathBuf> = match fs::read_dir(&ckpt_dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(".r0.json"))
            })
            .collect(),
        Err(_) => {
            eprintln!(
                "warning: no checkpoint directory at {}; emitting reference surfaces only",
                ckpt_dir.display()
            );
            Vec::new()
        }
    };
    first_rep.sort();

    for path in first_rep {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(".r0.json"))
            .unwrap_or("checkpoint")
            .to_owned();
        let model = match LtwModel::load(&path) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", path.display());
                report.skipped += 1;
                continue;
            }
        };
        match model.export_surface(res) {
            Ok(surface) => {
                surface.write_grid_tsv(out_dir.join(format!("{name}.tsv")))?;
                surface.write_scatter_tsv(out_dir.join(format!("{name}.scatter.tsv")))?;
                report.learned += 1;
            }
            Err(e) => {
                eprintln!("warning: no surface for {}: {e}", path.display());
                report.skipped += 1;
            }
        }
    }
    Ok(report)
}
