//! Sweep artifacts.
//!
//! `out_dir/trials.csv`: one row per trial, sorted by (SNR, trial).
//!
//! `out_dir/summary.json`: a serialized [`SweepSummary`]:
//! `kind` (`fer` | `complexity` | `outage`), `config` (the full
//! configuration), `code_fingerprint` (SHA-256 of the serialized code),
//! `points` (per SNR: `snr_db`, `rho`, `trials`, `errors`, `timeouts`, `fer`,
//! `fer_interval {estimate, lo, hi}`, `outages`, `outage_prob`,
//! `mean_nodes`, `nodes_interval`, `rate_bpcu`, optional `tail_prob` and
//! `ccdf {l, p}`) and `slopes {fer, outage, tail}` (null when unfitted).
//!
//! `out_dir/plotdata/*.dat`: whitespace-separated columns with a `#` header,
//! one file per curve.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{SweepKind, SweepSummary, TrialRecord};
use crate::error::{Error, Result};

pub const TRIALS_CSV_HEADER: &str = "snr_db,trial,decoder,frontend,b,error,nodes,metric_evals,timed_out,outage";

/// CSV text for the records; floats use the shortest round-trip form.
pub fn write_trials_csv(records: &[TrialRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(TRIALS_CSV_HEADER);
    s.push('\n');
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.trial,
            r.decoder.name(),
            r.frontend.name(),
            r.b,
            r.error as u8,
            r.nodes,
            r.metric_evals,
            r.timed_out as u8,
            r.outage as u8
        )
        .expect("writing to a String");
    }
    s
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn dat(header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = format!("# {header}\n");
    for (x, y) in rows {
        writeln!(s, "{x} {y}").expect("writing to a String");
    }
    s
}

/// Writes `trials.csv` (decoding sweeps), `summary.json` and `plotdata/`.
/// Returns the paths written.
pub fn emit_outputs(summary: &SweepSummary, records: &[TrialRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let plot_dir = out_dir.join("plotdata");
    fs::create_dir_all(&plot_dir).map_err(|e| Error::io(&plot_dir, e))?;
    let mut written = Vec::new();

    if summary.kind != SweepKind::Outage {
        let p = out_dir.join("trials.csv");
        write(&p, &write_trials_csv(records))?;
        written.push(p);
    }

    let p = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(summary).map_err(|e| Error::Parse { what: "summary".into(), msg: e.to_string() })?;
    write(&p, &(json + "\n"))?;
    written.push(p);

    let pts = &summary.points;
    let mut curves: Vec<(String, String)> = vec![(
        "outage.dat".into(),
        dat("snr_db outage_prob", pts.iter().map(|p| (p.snr_db, p.outage_prob))),
    )];
    if summary.kind != SweepKind::Outage {
        curves.push(("fer.dat".into(), dat("snr_db fer", pts.iter().map(|p| (p.snr_db, p.fer)))));
        curves.push(("mean_nodes.dat".into(), dat("snr_db mean_nodes", pts.iter().map(|p| (p.snr_db, p.mean_nodes)))));
    }
    if summary.kind == SweepKind::Complexity {
        curves.push((
            "tail.dat".into(),
            dat("snr_db tail_prob", pts.iter().filter_map(|p| p.tail_prob.map(|t| (p.snr_db, t)))),
        ));
        for p in pts {
            if let Some(c) = &p.ccdf {
                curves.push((
                    format!("ccdf_{}db.dat", p.snr_db),
                    dat("L pr_c_ge_l", c.l.iter().copied().zip(c.p.iter().copied())),
                ));
            }
        }
    }
    for (name, text) in curves {
        let p = plot_dir.join(name);
        write(&p, &text)?;
        written.push(p);
    }
    Ok(written)
}

pub fn read_summary(path: &Path) -> Result<SweepSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { what: path.display().to_string(), msg: e.to_string() })
}
