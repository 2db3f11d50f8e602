use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::schema::{DzLine, CERT_SCHEMA, DZ_SCHEMA};
use crate::error::{Error, Result};
use crate::theta::EIGHT_POW_11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub q: f64,
    pub zeta: f64,
    pub distance_to_minus_e_pi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub records_total: usize,
    pub max_multiple_zero_modulus: f64,
    pub bound_violations: usize,
    /// Real-`q`, real-`ζ` records sorted by `q`.
    pub trend_sequence: Vec<TrendPoint>,
}

/// Reads a `dz/1` JSONL file and recomputes `|ζ|` for every record.
/// Blank lines and `cert/1` lines are ignored.
pub fn audit(path: impl AsRef<Path>) -> Result<AuditSummary> {
    audit_reader(BufReader::new(File::open(path)?))
}

pub fn audit_reader(reader: impl BufRead) -> Result<AuditSummary> {
    let e_pi = std::f64::consts::PI.exp();
    let mut s = AuditSummary {
        records_total: 0,
        max_multiple_zero_modulus: 0.0,
        bound_violations: 0,
        trend_sequence: Vec::new(),
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let perr = |message: String| Error::Parse { line: i + 1, message };
        let v: serde_json::Value = serde_json::from_str(t).map_err(|e| perr(e.to_string()))?;
        match v.get("schema").and_then(|s| s.as_str()) {
            Some(DZ_SCHEMA) => {}
            Some(CERT_SCHEMA) => continue,
            other => return Err(perr(format!("unknown schema {other:?}"))),
        }
        let r: DzLine = serde_json::from_value(v).map_err(|e| perr(e.to_string()))?;
        let m = r.zeta().norm();
        if !m.is_finite() {
            return Err(perr("non-finite ζ".into()));
        }
        s.records_total += 1;
        s.max_multiple_zero_modulus = s.max_multiple_zero_modulus.max(m);
        if m > EIGHT_POW_11 {
            s.bound_violations += 1;
        }
        if r.q_im == 0.0 && r.zeta_im == 0.0 {
            s.trend_sequence.push(TrendPoint {
                q: r.q_re,
                zeta: r.zeta_re,
                distance_to_minus_e_pi: (r.zeta_re + e_pi).abs(),
            });
        }
    }
    s.trend_sequence
        .sort_by(|a, b| a.q.total_cmp(&b.q).then(a.zeta.total_cmp(&b.zeta)));
    Ok(s)
}

/// Plot export: `q, zeta_re, zeta_im, dist_to_minus_e_pi`.
pub fn write_trend_csv(summary: &AuditSummary, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Domain(e.to_string());
    w.write_record(["q", "zeta_re", "zeta_im", "dist_to_minus_e_pi"])
        .map_err(csv_err)?;
    for p in &summary.trend_sequence {
        w.write_record(&[
            p.q.to_string(),
            p.zeta.to_string(),
            "0".to_string(),
            p.distance_to_minus_e_pi.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
