//! Writing a [`RunReport`] to an output directory.
//!
//! Files are written into a fresh temporary directory next to the target
//! and moved into place with one rename, so a failure never leaves a
//! half-written report behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::RunReport;
use crate::error::{Error, Result};

/// Percent-valued metrics: 2 decimals.
pub fn fmt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.2}"))
}

/// Fraction-valued metrics: 4 decimals.
pub fn fmt_ratio(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

/// Wasserstein distances: 4 decimals.
pub fn fmt_wd(v: Option<f64>) -> String {
    fmt_ratio(v)
}

pub const METRICS_HEADER: [&str; 7] = ["Zero-day Attack", "Z-DR", "Accuracy", "F1 Score", "FAR", "DR", "AUC"];

/// One row per held-out class, fold means, in the column order of the
/// usual zero-day results table.
pub fn metrics_csv(report: &RunReport, model: crate::classifiers::ModelKind) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    if let Some(section) = report.model(model) {
        for z in &section.zero_day {
            let m = &z.mean;
            w.write_record([
                z.held_out_class.clone(),
                fmt_pct(m.zdr.and_then(|s| s.mean)),
                fmt_pct(m.accuracy.mean),
                fmt_ratio(m.f1.mean),
                fmt_pct(m.far.mean),
                fmt_pct(m.dr.mean),
                fmt_ratio(m.auc.mean),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::io("writing metrics CSV", e.into_error()))
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Known-attack DR next to zero-day Z-DR for each class.
pub fn dr_vs_zdr_tsv(report: &RunReport, model: crate::classifiers::ModelKind) -> String {
    let mut out = String::from("attack_class\tknown_dr\tzdr\n");
    if let Some(section) = report.model(model) {
        for z in &section.zero_day {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                tsv_field(&z.held_out_class),
                fmt_pct(section.known_dr_for(&z.held_out_class)),
                fmt_pct(z.mean.zdr.and_then(|s| s.mean)),
            ));
        }
    }
    out
}

pub fn wd_means_tsv(report: &RunReport) -> String {
    let mut out = String::from("attack_class\tmean_wd\tstd_wd\n");
    for w in &report.wd {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            tsv_field(&w.held_out_class),
            fmt_wd(w.mean_wd.mean),
            fmt_wd(w.mean_wd.std)
        ));
    }
    out
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let p = dir.join(name);
    let mut f = fs::File::create(&p).map_err(|e| Error::io(format!("creating {}", p.display()), e))?;
    f.write_all(bytes).map_err(|e| Error::io(format!("writing {}", p.display()), e))?;
    Ok(p)
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn write_all(report: &RunReport, dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        write_file(dir, &name, bytes)?;
        names.push(name);
        Ok(())
    };
    put("run.json".into(), &json_bytes(report)?)?;
    for section in &report.models {
        let kind = section.model;
        put(format!("metrics_{}.csv", kind.as_str()), &metrics_csv(report, kind)?)?;
        put(format!("dr_vs_zdr_{}.tsv", kind.as_str()), dr_vs_zdr_tsv(report, kind).as_bytes())?;
    }
    put("wd_means.tsv".into(), wd_means_tsv(report).as_bytes())?;
    put("transforms.json".into(), &json_bytes(&report.artifacts.transforms)?)?;

    let sub = |name: &str| -> Result<PathBuf> {
        let p = dir.join(name);
        fs::create_dir(&p).map_err(|e| Error::io(format!("creating {}", p.display()), e))?;
        Ok(p)
    };
    let models = sub("models")?;
    for (name, json) in &report.artifacts.models {
        write_file(&models, name, json.as_bytes())?;
        names.push(format!("models/{name}"));
    }
    if !report.artifacts.wd_details.is_empty() {
        let wd = sub("wd")?;
        for r in &report.artifacts.wd_details {
            let name = format!(
                "{}_fold{}.csv",
                slug(r.held_out_class.as_deref().unwrap_or("all")),
                r.fold_id.unwrap_or(0)
            );
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["feature", "distance", "encoded"])?;
            for f in &r.features {
                w.write_record([f.feature.clone(), fmt_wd(Some(f.distance)), f.encoded.to_string()])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::io("writing WD CSV", e.into_error()))?;
            write_file(&wd, &name, &bytes)?;
            names.push(format!("wd/{name}"));
        }
    }
    Ok(names)
}

/// Writes every report file into `dir` and returns their relative names.
///
/// An existing `dir` is replaced only if it is empty or holds a previous
/// report (a `run.json`); anything else is left alone and reported as an
/// error.
pub fn emit_reports(report: &RunReport, dir: &Path) -> Result<Vec<String>> {
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    if dir.exists() {
        let is_empty = fs::read_dir(dir)
            .map_err(|e| Error::io(format!("reading {}", dir.display()), e))?
            .next()
            .is_none();
        if !is_empty && !dir.join("run.json").is_file() {
            return Err(Error::InvalidInput(format!(
                "{} exists and does not look like a previous report; refusing to replace it",
                dir.display()
            )));
        }
    }
    fs::create_dir_all(&parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    let staging = tempfile::Builder::new()
        .prefix(".zdeval-out-")
        .tempdir_in(&parent)
        .map_err(|e| Error::io(format!("creating a staging directory in {}", parent.display()), e))?;
    let names = write_all(report, staging.path())?;

    // the old directory is moved aside first and removed only once the new
    // one is in place
    let trash = if dir.exists() {
        let t = tempfile::Builder::new()
            .prefix(".zdeval-old-")
            .tempdir_in(&parent)
            .map_err(|e| Error::io("creating a scratch directory", e))?;
        fs::rename(dir, t.path().join("old")).map_err(|e| Error::io(format!("moving {} aside", dir.display()), e))?;
        Some(t)
    } else {
        None
    };
    let staged = staging.keep();
    if let Err(e) = fs::rename(&staged, dir) {
        if let Some(t) = &trash {
            let _ = fs::rename(t.path().join("old"), dir);
        }
        let _ = fs::remove_dir_all(&staged);
        return Err(Error::io(format!("moving report into {}", dir.display()), e));
    }
    drop(trash);
    Ok(names)
}
