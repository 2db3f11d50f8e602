use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::{in_n_band, PRODUCT_TOL};
use crate::error::{Error, Result};
use crate::theta::{eval_g, eval_thetastar_product, mu, QParameter, C0, EIGHT_POW_11};
use crate::zeros::{winding_detail, ContourFunction, MIN_SAMPLES};

/// Which disk radius is used about the lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Regime {
    /// `1 − 1/(n−1) <= |q| <= 1 − 1/n`, radius `1/(2n)`.
    NBand { n: u32 },
    /// `c₀ <= |q| <= 1/2`, radius `1/4`.
    HalfQ,
}

impl Regime {
    pub fn radius(&self) -> f64 {
        match self {
            Regime::NBand { n } => 0.5 / *n as f64,
            Regime::HalfQ => 0.25,
        }
    }

    /// The disk parameter: `n`, or `2` in the half-q regime.
    pub fn n(&self) -> u32 {
        match self {
            Regime::NBand { n } => *n,
            Regime::HalfQ => 2,
        }
    }

    /// The regime used for `|q|`: half-q up to and including `1/2`, the
    /// lowest containing band above.
    pub fn for_modulus(r: f64) -> Option<Self> {
        if (C0..=0.5).contains(&r) {
            Some(Regime::HalfQ)
        } else {
            super::lemmas::band_of(r).map(|(n, _)| Regime::NBand { n })
        }
    }

    pub fn admits(&self, r: f64) -> bool {
        match self {
            Regime::NBand { n } => in_n_band(r, *n),
            Regime::HalfQ => (C0..=0.5 + 1e-15).contains(&r),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::NBand { n } => write!(f, "n-band({n})"),
            Regime::HalfQ => f.write_str("half-q"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "half-q" || t == "halfq" {
            return Ok(Regime::HalfQ);
        }
        let inner = t
            .strip_prefix("n-band(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("n="))
            .unwrap_or(t);
        inner
            .parse::<u32>()
            .ok()
            .filter(|n| *n >= 3)
            .map(|n| Regime::NBand { n })
            .ok_or_else(|| Error::Domain(format!("unknown regime '{s}'")))
    }
}

/// Result of checking `|Θ*| > 1 > 1/(8^11 − 1) >= |G|` on samples of
/// `C(μ_s, radius)` together with the winding number of θ about `μ_s`.
///
/// Moduli are stored as natural logarithms since `|Θ*|` overflows binary64
/// on these circles for moderate `|q|`. The sampled fields are `None` when
/// the circle is not inside `|x| > 8^11`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskCertificate {
    pub q: QParameter,
    pub s: i64,
    pub regime: Regime,
    pub n: u32,
    pub radius: f64,
    pub samples: usize,
    /// `min ln|Θ*|` over the samples, tail bound subtracted.
    pub min_log_thetastar: Option<f64>,
    /// `max ln|G|` over the samples, tail bound added.
    pub max_log_g: Option<f64>,
    pub winding_theta: Option<i64>,
    pub in_x: bool,
    /// The sampled quantities keep their verdict at twice the sample count.
    pub stable: bool,
    pub pass: bool,
}

impl DiskCertificate {
    pub fn min_abs_thetastar(&self) -> Option<f64> {
        self.min_log_thetastar.map(f64::exp)
    }

    pub fn max_abs_g(&self) -> Option<f64> {
        self.max_log_g.map(f64::exp)
    }
}

fn log_g_bound() -> f64 {
    -(EIGHT_POW_11 - 1.0).ln()
}

fn sample_extrema(q: &QParameter, center: Complex64, radius: f64, samples: usize) -> Result<(f64, f64)> {
    let vals: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = center + Complex64::from_polar(radius, 2.0 * PI * i as f64 / samples as f64);
            let t = eval_thetastar_product(q, x, PRODUCT_TOL)?;
            let lt = t.value.log_modulus;
            let t_low = lt + (-(t.tail_bound - lt).exp()).ln_1p();
            let g = eval_g(q, x, 1e-16)?;
            let g_up = (g.abs() + g.tail()).ln();
            Ok((t_low, g_up))
        })
        .collect::<Result<_>>()?;
    Ok(vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (t, g)| {
        (a.min(*t), b.max(*g))
    }))
}

/// Samples `C(μ_s, r)` for the regime's radius and checks the Rouché
/// inequality together with the winding number of θ about `μ_s`.
pub fn certify_disk_rouche(q: &QParameter, s: i64, regime: Regime, samples: usize) -> Result<DiskCertificate> {
    if s < 1 {
        return Err(Error::Hypothesis(format!("certificates need s >= 1, got {s}")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if !regime.admits(q.modulus()) {
        return Err(Error::Hypothesis(format!(
            "|q| = {} is outside the {regime} regime",
            q.modulus()
        )));
    }
    let radius = regime.radius();
    let center = mu(q, s);
    let in_x = circle_in_x(q, s, regime);
    let mut cert = DiskCertificate {
        q: *q,
        s,
        regime,
        n: regime.n(),
        radius,
        samples,
        min_log_thetastar: None,
        max_log_g: None,
        winding_theta: None,
        in_x,
        stable: false,
        pass: false,
    };
    if !in_x {
        return Ok(cert);
    }
    if 8.0 * f64::EPSILON * center.norm() > 1e-2 * radius {
        return Err(Error::Domain(format!(
            "C(μ_{s}, {radius}) is not resolved in binary64 at |μ_s| = {:e}",
            center.norm()
        )));
    }
    let (t1, g1) = sample_extrema(q, center, radius, samples)?;
    let (t2, g2) = sample_extrema(q, center, radius, 2 * samples)?;
    let w1 = winding_detail(q, center, radius, ContourFunction::Theta, samples)?;
    let w2 = winding_detail(q, center, radius, ContourFunction::Theta, 2 * samples)?;
    let ok = |t: f64, g: f64| t > 0.0 && g <= log_g_bound();
    cert.min_log_thetastar = Some(t1);
    cert.max_log_g = Some(g1);
    cert.winding_theta = Some(w1.count);
    cert.stable = ok(t1, g1) == ok(t2, g2) && w1.count == w2.count;
    cert.pass = ok(t1, g1) && w1.count == 1 && cert.stable;
    Ok(cert)
}

/// Whether `C(μ_s, radius)` lies in `|x| > 8^11`, i.e. `|μ_s| − radius > 8^11`.
pub fn circle_in_x(q: &QParameter, s: i64, regime: Regime) -> bool {
    let ln_mu = -(s as f64) * q.ln_modulus();
    ln_mu > 40.0 || mu(q, s).norm() - regime.radius() > EIGHT_POW_11
}

/// The smallest `s >= 1` with `|μ_s| − radius > 8^11`.
pub fn minimal_s(q: &QParameter, regime: Regime) -> i64 {
    let radius = regime.radius();
    let mut s = ((EIGHT_POW_11.ln()) / -q.ln_modulus()).floor().max(1.0) as i64;
    while s > 1 && mu(q, s - 1).norm() - radius > EIGHT_POW_11 {
        s -= 1;
    }
    while mu(q, s).norm() - radius <= EIGHT_POW_11 {
        s += 1;
    }
    s
}
