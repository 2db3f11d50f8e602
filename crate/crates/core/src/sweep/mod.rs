//! Parameter sweeps over `q` with JSONL persistence, deduplication, the
//! `|ζ| <= 8^11` audit and the real-axis trend of double zeros.

mod audit;
mod config;
mod run;
mod schema;

pub use audit::{audit, audit_reader, write_trend_csv, AuditSummary, TrendPoint};
pub use config::{QRegion, SeedStrategy, SweepConfig, Tolerances};
pub use run::{q_grid, seeds_for, sweep_certificates, sweep_double_zeros, CertificateSweep, SkippedPoint};
pub use schema::{CertLine, DzLine, CERT_SCHEMA, DZ_SCHEMA};
