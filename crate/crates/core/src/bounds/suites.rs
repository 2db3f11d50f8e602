use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::{
    c0_root, check_dominant_term_detail, verify_disk_separation, verify_g_bound, verify_kappa_chain,
    verify_kappa_lower, verify_lemma_l_bounds,
};
use super::prop::{verify_half_q_case, verify_prop_steps};
use super::report::{BoundReport, Relation};
use super::rouche::{minimal_s, Regime};
use crate::error::{Error, Result};
use crate::theta::{mu, QParameter, C0, EIGHT_POW_11};

/// Randomized families of hypothesis-satisfying inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GBound,
    DiskSeparation,
    #[serde(rename = "lemma-L")]
    LemmaL,
    Kappa,
    Prop,
    HalfQ,
    Dominant,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::GBound,
        Suite::DiskSeparation,
        Suite::LemmaL,
        Suite::Kappa,
        Suite::Prop,
        Suite::HalfQ,
        Suite::Dominant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::GBound => "g-bound",
            Suite::DiskSeparation => "disk-separation",
            Suite::LemmaL => "lemma-L",
            Suite::Kappa => "kappa",
            Suite::Prop => "prop",
            Suite::HalfQ => "half-q",
            Suite::Dominant => "dominant",
        }
    }

    /// Parses a suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.eq_ignore_ascii_case("all") {
            Ok(Suite::ALL.to_vec())
        } else {
            s.split(',').map(|p| p.trim().parse()).collect()
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub trials: usize,
    pub reports: usize,
    pub failures: usize,
    /// Trials that raised an error instead of producing reports.
    pub errors: usize,
    /// Smallest margin among non-log reports and among log reports.
    pub min_margin: f64,
    pub min_log_margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub summary: SuiteSummary,
    pub reports: Vec<BoundReport>,
}

fn arg(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn band_q(rng: &mut ChaCha8Rng, n: u32) -> Result<QParameter> {
    let lo = 1.0 - 1.0 / (n - 1) as f64;
    let hi = 1.0 - 1.0 / n as f64;
    QParameter::from_polar(rng.gen_range(lo..=hi), arg(rng))
}

/// Lattice index in `[s_min, s_max]` where `|μ_{s_max}| <= 1e12`, so that a
/// point at distance `1/(2n)` from `μ_s` is resolved in binary64.
fn lattice_index(rng: &mut ChaCha8Rng, q: &QParameter, regime: Regime) -> i64 {
    let lo = minimal_s(q, regime);
    let hi = ((1e12f64.ln() / -q.ln_modulus()).floor() as i64).max(lo);
    rng.gen_range(lo..=hi)
}

fn trial(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>> {
    match suite {
        Suite::GBound => {
            let q = QParameter::from_polar(rng.gen_range(0.01..=0.99), arg(rng))?;
            let x = Complex64::from_polar(log_uniform(rng, 1.01, 1e11), arg(rng));
            Ok(vec![verify_g_bound(&q, x)?])
        }
        Suite::DiskSeparation => {
            let n = rng.gen_range(3..=8);
            let q = band_q(rng, n)?;
            let s2 = rng.gen_range(1..=200);
            let s1 = s2 + rng.gen_range(1..=50);
            Ok(vec![verify_disk_separation(&q, n, s1, s2)?])
        }
        Suite::LemmaL => {
            let b = 1.0 + 19.0 * rng.gen_range(1e-6..=1.0);
            let r = (1.0 - 1.0 / b) * rng.gen_range(1e-6..=1.0);
            let q = QParameter::from_polar(r, arg(rng))?;
            let x = Complex64::from_polar(log_uniform(rng, 1.01, 1e12), arg(rng));
            verify_lemma_l_bounds(&q, x, b)
        }
        Suite::Kappa => {
            let n = rng.gen_range(3..=8);
            let q = band_q(rng, n)?;
            let x = Complex64::from_polar(
                log_uniform(rng, EIGHT_POW_11 * (1.0 + 1e-9), EIGHT_POW_11 * 1e4),
                arg(rng),
            );
            let mut out = vec![verify_kappa_lower(&q, x, n)?];
            out.extend(verify_kappa_chain(&q, x, n)?);
            Ok(out)
        }
        Suite::Prop => {
            let n = rng.gen_range(3..=8);
            let q = band_q(rng, n)?;
            let s = lattice_index(rng, &q, Regime::NBand { n });
            let x = mu(&q, s) + Complex64::from_polar(0.5 / n as f64, arg(rng));
            verify_prop_steps(&q, s, n, x)
        }
        Suite::HalfQ => {
            let q = QParameter::from_polar(rng.gen_range(C0..=0.5), arg(rng))?;
            let x = if rng.gen_bool(0.5) {
                let s = lattice_index(rng, &q, Regime::HalfQ);
                mu(&q, s) + Complex64::from_polar(0.25, arg(rng))
            } else {
                loop {
                    let x = Complex64::from_polar(
                        log_uniform(rng, EIGHT_POW_11 * (1.0 + 1e-9), EIGHT_POW_11 * 1e4),
                        arg(rng),
                    );
                    let s = (x.norm().ln() / -q.ln_modulus()).round() as i64;
                    if (s - 1..=s + 1).all(|i| (x - mu(&q, i)).norm() >= 0.25) {
                        break x;
                    }
                }
            };
            verify_half_q_case(&q, x)
        }
        Suite::Dominant => {
            let q = QParameter::from_polar(rng.gen_range(1e-3..=c0_root()), arg(rng))?;
            // keep |q|^{(k+1)²/2}, the gap in M < |L|τ, above the binary64 range floor
            let k_max = ((1200.0 / -q.ln_modulus()).sqrt() - 1.0).floor().clamp(0.0, 40.0) as u32;
            let k = rng.gen_range(0..=k_max);
            check_dominant_term_detail(&q, k)
        }
    }
}

/// Runs `trials` randomized trials of `suite`. Trial `i` draws from a
/// ChaCha8 stream keyed by `(seed, i)`, so the output does not depend on
/// scheduling. Trials that error are recorded as failing reports.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> SuiteOutcome {
    let per_trial: Vec<(Vec<BoundReport>, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1 + ((suite as u64) << 48));
            match trial(suite, &mut rng) {
                Ok(r) => (r.into_iter().map(|r| r.with("trial", i as f64)).collect(), false),
                Err(e) => {
                    let r = BoundReport::new(
                        &format!("{}_error", suite.name().replace('-', "_")),
                        0.0,
                        Relation::Gt,
                        0.0,
                    )
                    .with("trial", i as f64);
                    log::warn!("{suite} trial {i}: {e}");
                    (vec![r], true)
                }
            }
        })
        .collect();
    let errors = per_trial.iter().filter(|(_, e)| *e).count();
    let reports: Vec<BoundReport> = per_trial.into_iter().flat_map(|(r, _)| r).collect();
    let failures = reports.iter().filter(|r| !r.pass).count();
    let min_of = |log: bool| {
        reports
            .iter()
            .filter(|r| r.log_scale == log)
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    };
    SuiteOutcome {
        summary: SuiteSummary {
            suite,
            trials,
            reports: reports.len(),
            failures,
            errors,
            min_margin: min_of(false),
            min_log_margin: min_of(true),
        },
        reports,
    }
}
