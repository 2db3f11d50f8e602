use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::mpsc;
use std::thread;

use log::{debug, info, warn};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{QRegion, SeedStrategy, SweepConfig};
use super::schema::{CertLine, DzLine};
use crate::bounds::{certify_disk_rouche, DiskCertificate, Regime};
use crate::error::{Error, Result};
use crate::theta::{mu, QParameter};
use crate::zeros::{dedupe_double_zeros, solve_double_zero_with, DoubleZeroOptions, DoubleZeroRecord};

/// Grid of `q` values for the configured region.
pub fn q_grid(cfg: &SweepConfig) -> Result<Vec<QParameter>> {
    cfg.validate()?;
    let lin = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    match cfg.q_region {
        QRegion::RealInterval { lo, hi } => {
            let n = cfg.grid_steps[0];
            (0..n).map(|i| QParameter::real(lin(lo, hi, n, i))).collect()
        }
        QRegion::Sector {
            r_lo,
            r_hi,
            arg_lo,
            arg_hi,
        } => {
            let (nr, na) = (cfg.grid_steps[0], cfg.grid_steps[1]);
            let mut out = Vec::with_capacity(nr * na);
            for i in 0..nr {
                for j in 0..na {
                    out.push(QParameter::from_polar(
                        lin(r_lo, r_hi, nr, i),
                        lin(arg_lo, arg_hi, na, j),
                    )?);
                }
            }
            Ok(out)
        }
    }
}

/// Starting `x` values for one `q`.
pub fn seeds_for(q: &QParameter, strategy: &SeedStrategy) -> Vec<Complex64> {
    match strategy {
        SeedStrategy::MuLattice { lo, hi } => (*lo..=*hi)
            .flat_map(|s| [mu(q, s), 0.5 * (mu(q, s) + mu(q, s + 1))])
            .collect(),
        SeedStrategy::Ring { lo, hi } => (*lo..=*hi)
            .map(|k| {
                let t = k as f64 + 0.5;
                -Complex64::from_polar((-t * q.ln_modulus()).exp(), -t * q.argument())
            })
            .collect(),
        SeedStrategy::RealLine { lo, hi, steps } => (0..*steps)
            .map(|i| {
                let t = if *steps == 1 {
                    0.5
                } else {
                    i as f64 / (*steps - 1) as f64
                };
                Complex64::new(lo + (hi - lo) * t, 0.0)
            })
            .collect(),
        SeedStrategy::Explicit { points } => points.clone(),
    }
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))
}

/// A sink thread owning the output file; producers send finished lines.
struct Appender {
    tx: Option<mpsc::Sender<String>>,
    handle: Option<thread::JoinHandle<std::io::Result<()>>>,
}

impl Appender {
    fn open(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self { tx: None, handle: None });
        };
        let file = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
        let (tx, rx) = mpsc::channel::<String>();
        let handle = thread::spawn(move || {
            let mut w = BufWriter::new(file);
            for line in rx {
                w.write_all(line.as_bytes())?;
                w.write_all(b"\n")?;
            }
            w.flush()
        });
        Ok(Self {
            tx: Some(tx),
            handle: Some(handle),
        })
    }

    fn sender(&self) -> Option<mpsc::Sender<String>> {
        self.tx.clone()
    }

    fn close(mut self) -> Result<()> {
        drop(self.tx.take());
        if let Some(h) = self.handle.take() {
            h.join().map_err(|_| Error::Domain("output writer panicked".into()))??;
        }
        Ok(())
    }
}

fn rewrite_sorted<T: Serialize>(path: &Path, lines: &[T]) -> Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for l in lines {
            serde_json::to_writer(&mut w, l).map_err(|e| Error::Domain(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the double-zero solver from every `(q, x)` seed of the grid.
///
/// Converged records are appended to `output_path` as they arrive. At the
/// end, records outside the region are dropped, the rest are deduplicated and
/// sorted by `(|q|, arg q, |ζ|)`, and the file is rewritten in that order.
pub fn sweep_double_zeros(cfg: &SweepConfig) -> Result<Vec<DoubleZeroRecord>> {
    let qs = q_grid(cfg)?;
    let work: Vec<(QParameter, Complex64)> = qs
        .iter()
        .flat_map(|q| seeds_for(q, &cfg.seed_strategy).into_iter().map(move |x| (*q, x)))
        .collect();
    info!("double-zero sweep: {} q values, {} seeds", qs.len(), work.len());
    let opts = DoubleZeroOptions {
        tol: cfg.tolerances.newton,
        max_iter: cfg.tolerances.max_iter,
        mode: cfg.mode,
    };
    let sink = Appender::open(cfg.output_path.as_deref())?;
    let tx = sink.sender();
    let found: Vec<Option<DoubleZeroRecord>> = pool(cfg.parallelism)?.install(|| {
        work.par_iter()
            .map_with(tx, |tx, (q, x)| match solve_double_zero_with(q.value(), *x, opts) {
                Ok(r) => {
                    if let Some(tx) = tx {
                        let line = serde_json::to_string(&DzLine::from(&r)).expect("record serializes");
                        let _ = tx.send(line);
                    }
                    Some(r)
                }
                Err(e) => {
                    debug!("seed q = {q}, x = {x}: {e}");
                    None
                }
            })
            .collect()
    });
    sink.close()?;
    let inside: Vec<DoubleZeroRecord> = found
        .into_iter()
        .flatten()
        .filter(|r| cfg.q_region.contains(r.q.value(), 1e-12))
        .collect();
    let records = dedupe_double_zeros(inside);
    for r in records.iter().filter(|r| !r.bound_check()) {
        warn!("double zero with |ζ| > 8^11 at q = {}, ζ = {}", r.q, r.zeta);
    }
    if let Some(path) = &cfg.output_path {
        let lines: Vec<DzLine> = records.iter().map(DzLine::from).collect();
        rewrite_sorted(path, &lines)?;
    }
    Ok(records)
}

/// A `(q, s)` pair for which no certificate was attempted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub q: QParameter,
    pub s: i64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSweep {
    pub certificates: Vec<DiskCertificate>,
    pub skipped: Vec<SkippedPoint>,
    pub passed: usize,
    pub failed: usize,
}

/// One certificate per grid `q` and `s ∈ s_range`, in the regime matching `|q|`.
pub fn sweep_certificates(cfg: &SweepConfig, s_range: (i64, i64)) -> Result<CertificateSweep> {
    let qs = q_grid(cfg)?;
    let work: Vec<(QParameter, i64)> = qs
        .iter()
        .flat_map(|q| (s_range.0..=s_range.1).map(move |s| (*q, s)))
        .collect();
    let samples = cfg.tolerances.winding_samples;
    let results: Vec<std::result::Result<DiskCertificate, SkippedPoint>> = pool(cfg.parallelism)?.install(|| {
        work.par_iter()
            .map(|(q, s)| {
                let skip = |reason: String| SkippedPoint { q: *q, s: *s, reason };
                let regime = Regime::for_modulus(q.modulus())
                    .ok_or_else(|| skip(format!("|q| = {} is below c0", q.modulus())))?;
                certify_disk_rouche(q, *s, regime, samples).map_err(|e| {
                    warn!("certificate at q = {q}, s = {s}: {e}");
                    skip(e.to_string())
                })
            })
            .collect()
    });
    let mut out = CertificateSweep {
        certificates: Vec::new(),
        skipped: Vec::new(),
        passed: 0,
        failed: 0,
    };
    for r in results {
        match r {
            Ok(c) => {
                if c.pass {
                    out.passed += 1;
                } else {
                    out.failed += 1;
                }
                out.certificates.push(c);
            }
            Err(s) => out.skipped.push(s),
        }
    }
    if let Some(path) = &cfg.output_path {
        let lines: Vec<CertLine> = out.certificates.iter().map(CertLine::from).collect();
        rewrite_sorted(path, &lines)?;
    }
    Ok(out)
}
