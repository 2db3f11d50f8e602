use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{eval_theta_auto, eval_thetastar_product, reduce_angle, LogComplex, QParameter};

pub const MIN_SAMPLES: usize = 256;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const MAX_SAMPLES: usize = 1 << 20;

/// `min |f| / max |f|` on the contour below which the contour is treated as
/// passing through a zero.
const NEAR_ZERO_RATIO: f64 = 1e-10;
/// Largest accepted argument change between neighbouring samples.
const MAX_JUMP: f64 = PI / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourFunction {
    Theta,
    ThetaStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub count: i64,
    /// Total argument change divided by `2π`, before rounding.
    pub raw: f64,
    pub samples: usize,
    pub min_log_abs: f64,
    pub max_log_abs: f64,
}

pub(crate) fn eval_contour(q: &QParameter, x: Complex64, f: ContourFunction) -> Result<LogComplex> {
    match f {
        ContourFunction::Theta => Ok(eval_theta_auto(q, x, 1e-15)?.0.value),
        ContourFunction::ThetaStar => Ok(eval_thetastar_product(q, x, 1e-15)?.value),
    }
}

fn sample_once(
    q: &QParameter,
    center: Complex64,
    radius: f64,
    f: ContourFunction,
    n: usize,
) -> Result<(f64, f64, f64, f64)> {
    let values: Vec<LogComplex> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            eval_contour(q, center + Complex64::from_polar(radius, t), f)
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut max_jump = 0.0f64;
    let mut min_l = f64::INFINITY;
    let mut max_l = f64::NEG_INFINITY;
    for i in 0..n {
        let a = values[i];
        let b = values[(i + 1) % n];
        min_l = min_l.min(a.log_modulus);
        max_l = max_l.max(a.log_modulus);
        let d = reduce_angle(b.argument - a.argument);
        max_jump = max_jump.max(d.abs());
        total += d;
    }
    Ok((total / (2.0 * PI), max_jump, min_l, max_l))
}

/// Winding number of `f(q,·)` around the circle `C(center, radius)`.
pub fn winding_count(
    q: &QParameter,
    center: Complex64,
    radius: f64,
    function: ContourFunction,
    samples: usize,
) -> Result<i64> {
    winding_detail(q, center, radius, function, samples).map(|w| w.count)
}

/// As [`winding_count`], with the raw value and the sampled modulus range.
///
/// The sample count is doubled until every neighbouring argument change is
/// below `π/2` and the raw value is within `0.25` of an integer.
pub fn winding_detail(
    q: &QParameter,
    center: Complex64,
    radius: f64,
    function: ContourFunction,
    samples: usize,
) -> Result<WindingResult> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("contour radius must be positive, got {radius}")));
    }
    let mut n = samples;
    while n <= MAX_SAMPLES {
        let (raw, max_jump, min_l, max_l) = sample_once(q, center, radius, function, n)?;
        if min_l == f64::NEG_INFINITY || min_l - max_l < NEAR_ZERO_RATIO.ln() {
            return Err(Error::ContourNearZero {
                ratio: (min_l - max_l).exp(),
            });
        }
        let count = raw.round();
        if max_jump < MAX_JUMP && (raw - count).abs() <= 0.25 {
            return Ok(WindingResult {
                count: count as i64,
                raw,
                samples: n,
                min_log_abs: min_l,
                max_log_abs: max_l,
            });
        }
        n *= 2;
    }
    Err(Error::WindingNotConverged { samples: n / 2 })
}
