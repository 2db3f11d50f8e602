use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zeros::SolveMode;

/// The part of the `q`-disk covered by a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QRegion {
    /// Real `q ∈ [lo, hi]`.
    RealInterval { lo: f64, hi: f64 },
    /// `|q| ∈ [r_lo, r_hi]`, `arg q ∈ [arg_lo, arg_hi]`.
    Sector {
        r_lo: f64,
        r_hi: f64,
        arg_lo: f64,
        arg_hi: f64,
    },
}

impl QRegion {
    fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo > 0.0 && hi < 1.0 && lo <= hi;
        match *self {
            QRegion::RealInterval { lo, hi } => {
                if !(lo <= hi && lo > -1.0 && hi < 1.0 && (lo > 0.0 || hi < 0.0)) {
                    return Err(Error::Domain(format!(
                        "real q interval [{lo}, {hi}] must avoid 0 and ±1"
                    )));
                }
            }
            QRegion::Sector {
                r_lo,
                r_hi,
                arg_lo,
                arg_hi,
            } => {
                if !ok(r_lo, r_hi) || !(arg_lo <= arg_hi) || arg_hi - arg_lo > 2.0 * PI {
                    return Err(Error::Domain(
                        "sector must satisfy 0 < r_lo <= r_hi < 1 and a valid argument range".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Whether `q` lies in the region, up to `eps` in modulus and argument.
    pub fn contains(&self, q: Complex64, eps: f64) -> bool {
        match *self {
            QRegion::RealInterval { lo, hi } => q.im.abs() <= eps && q.re >= lo - eps && q.re <= hi + eps,
            QRegion::Sector {
                r_lo,
                r_hi,
                arg_lo,
                arg_hi,
            } => {
                let r = q.norm();
                if r < r_lo - eps || r > r_hi + eps {
                    return false;
                }
                let d = (q.arg() - arg_lo).rem_euclid(2.0 * PI);
                d <= arg_hi - arg_lo + eps || d >= 2.0 * PI - eps
            }
        }
    }
}

/// Starting points for the `x` unknown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedStrategy {
    /// `μ_s` and the midpoint of `μ_s`, `μ_{s+1}` for `s ∈ [lo, hi]`.
    MuLattice {
        lo: i64,
        hi: i64,
    },
    /// The circles `|x| = |q|^{−k−1/2}` on the ray of the lattice, `k ∈ [lo, hi]`.
    Ring {
        lo: u32,
        hi: u32,
    },
    /// `steps` equally spaced real points in `[lo, hi]`.
    RealLine {
        lo: f64,
        hi: f64,
        steps: usize,
    },
    Explicit {
        points: Vec<Complex64>,
    },
}

impl SeedStrategy {
    fn validate(&self) -> Result<()> {
        match self {
            SeedStrategy::MuLattice { lo, hi } if !(1 <= *lo && lo <= hi) => Err(Error::Domain(format!(
                "lattice range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            ))),
            SeedStrategy::Ring { lo, hi } if lo > hi => Err(Error::Domain(format!("empty ring range [{lo}, {hi}]"))),
            SeedStrategy::RealLine { lo, hi, steps } if *steps == 0 || !(lo <= hi) => {
                Err(Error::Domain("real seed line needs steps >= 1 and lo <= hi".into()))
            }
            SeedStrategy::Explicit { points } if points.is_empty() => Err(Error::Domain("no explicit seeds".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub newton: f64,
    pub max_iter: usize,
    pub winding_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton: 1e-10,
            max_iter: 100,
            winding_samples: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub q_region: QRegion,
    /// Grid points along the region: one entry for a real interval, two
    /// (modulus, argument) for a sector.
    pub grid_steps: Vec<usize>,
    pub seed_strategy: SeedStrategy,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Worker threads; `0` uses the rayon default.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default = "default_mode")]
    pub mode: SolveMode,
}

fn default_mode() -> SolveMode {
    SolveMode::Real
}

impl SweepConfig {
    pub fn real(lo: f64, hi: f64, steps: usize, seeds: SeedStrategy) -> Self {
        Self {
            q_region: QRegion::RealInterval { lo, hi },
            grid_steps: vec![steps],
            seed_strategy: seeds,
            tolerances: Tolerances::default(),
            output_path: None,
            parallelism: 0,
            mode: SolveMode::Real,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.q_region.validate()?;
        self.seed_strategy.validate()?;
        let want = match self.q_region {
            QRegion::RealInterval { .. } => 1,
            QRegion::Sector { .. } => 2,
        };
        if self.grid_steps.len() != want || self.grid_steps.contains(&0) {
            return Err(Error::Domain(format!("grid_steps must have {want} entries, each >= 1")));
        }
        if !(self.tolerances.newton > 0.0) || self.tolerances.max_iter == 0 {
            return Err(Error::InvalidTolerance(self.tolerances.newton));
        }
        if self.mode == SolveMode::Real && matches!(self.q_region, QRegion::Sector { .. }) {
            return Err(Error::Domain("real solve mode needs a real q interval".into()));
        }
        Ok(())
    }
}
