use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::logc::LogComplex;
use super::qparam::{cpowi, QParameter};
use crate::error::{Error, Result};

/// `8^11`, the radius in the multiple-zero bound.
pub const EIGHT_POW_11: f64 = 8_589_934_592.0;
/// `ln 8^11 = 33 ln 2`.
pub const LN_EIGHT_POW_11: f64 = 33.0 * std::f64::consts::LN_2;
/// `π²/6 = Σ 1/s²`.
pub const PI2_OVER_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// The published ten-digit values of the three constants, used as the bounds
/// in the `c0 <= |q| <= 1/2` chain.
pub const C0: f64 = 0.2078750206;
pub const C1: f64 = 0.2887880950;
pub const C2: f64 = 0.2887880949;
const _: () = assert!(C2 < C1 && C1 - C2 < 2e-10);

pub(crate) fn mu_c(qv: Complex64, s: i64) -> Complex64 {
    if s >= 0 {
        -cpowi(qv.inv(), s as u64)
    } else {
        -cpowi(qv, (-s) as u64)
    }
}

/// The zeros `μ_s = −q^{−s}` of `Θ*`.
///
/// Built from integer powers so that `1 + μ_s q^s` evaluates to exactly zero
/// inside the product evaluators. Overflows to infinity once `|q|^{−s}`
/// leaves the double range; use [`mu_log`] there.
pub fn mu(q: &QParameter, s: i64) -> Complex64 {
    mu_c(q.value(), s)
}

/// `μ_s` in log-polar form, valid for any `s`.
pub fn mu_log(q: &QParameter, s: i64) -> LogComplex {
    let s = s as f64;
    LogComplex::new(-s * q.ln_modulus(), std::f64::consts::PI - s * q.argument())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaResult {
    pub value: u64,
    /// `|x||q|^m` was within `1e-15` of one at `m = value` or `value − 1`.
    pub near_tie: bool,
}

const KAPPA_TIE: f64 = 1e-15;

/// The least `m >= 1` with `|x q^m| < 1`, for `|x| > 1`.
pub fn kappa(q: &QParameter, x: Complex64) -> Result<u64> {
    kappa_detailed(q, x).map(|k| k.value)
}

/// As [`kappa`], also reporting whether the decision sat on a near tie. Ties
/// are resolved towards the larger `m`.
pub fn kappa_detailed(q: &QParameter, x: Complex64) -> Result<KappaResult> {
    let ax = x.norm();
    if !(ax > 1.0) || !ax.is_finite() {
        return Err(Error::Domain(format!("κ requires finite |x| > 1, got {ax}")));
    }
    let r = q.modulus();
    let v = |m: u64| ax * r.powi(m as i32);
    let below = |m: u64| v(m) < 1.0 - KAPPA_TIE;
    let mut m = ((ax.ln() / -r.ln()).floor() as u64 + 1).max(1);
    while !below(m) {
        m += 1;
    }
    while m > 1 && below(m - 1) {
        m -= 1;
    }
    let near_tie = (v(m) - 1.0).abs() <= KAPPA_TIE || (v(m - 1) - 1.0).abs() <= KAPPA_TIE;
    Ok(KappaResult { value: m, near_tie })
}

/// `τ(r) = 2 Σ_{ν≥1} r^{ν²/2}` for `0 <= r < 1`.
pub fn tau(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("τ(r) requires 0 <= r < 1, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let lr = r.ln();
    let mut sum = 0.0;
    let mut nu = 1.0f64;
    loop {
        let term = (0.5 * nu * nu * lr).exp();
        sum += term;
        // the remaining terms shrink at least geometrically with ratio r^{ν+1/2}
        let ratio = ((nu + 0.5) * lr).exp();
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 {
            break;
        }
        nu += 1.0;
    }
    Ok(2.0 * sum)
}

/// The root of `τ(r) = 1` in `[0.1, 0.3]` by bisection to interval width `tol`.
pub fn compute_c0(tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::InvalidTolerance(tol));
    }
    let (mut lo, mut hi) = (0.1, 0.3);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tau(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The circle `|x| = |q|^{−k−1/2}` between consecutive zeros.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    pub k: u32,
    pub radius: f64,
}

impl RingSpec {
    pub fn new(q: &QParameter, k: u32) -> Self {
        Self {
            k,
            radius: (-(k as f64 + 0.5) * q.ln_modulus()).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParameter {
        QParameter::real(v).unwrap()
    }

    #[test]
    fn mu_small_cases() {
        assert_eq!(mu(&q(0.5), 1), Complex64::new(-2.0, 0.0));
        assert_eq!(mu(&q(0.5), 3), Complex64::new(-8.0, 0.0));
        assert_eq!(mu(&q(0.5), 0), Complex64::new(-1.0, 0.0));
        assert_eq!(mu(&q(0.5), -2), Complex64::new(-0.25, 0.0));
    }

    #[test]
    fn mu_log_matches_mu() {
        let qq = QParameter::from_polar(0.7, 0.4).unwrap();
        for s in [-3, 0, 5, 40] {
            let a = mu_log(&qq, s).to_complex();
            let b = mu(&qq, s);
            assert!((a - b).norm() <= 1e-12 * b.norm(), "s={s}");
        }
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&q(0.5), Complex64::new(3.0, 0.0)).unwrap(), 2);
        assert!(kappa(&q(0.5), Complex64::new(1.0, 0.0)).is_err());
        assert!(kappa(&q(0.5), Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn tau_edges() {
        assert_eq!(tau(0.0).unwrap(), 0.0);
        assert!(tau(1.0).is_err());
        assert!(tau(-0.5).is_err());
    }

    #[test]
    fn c0_rejects_bad_tol() {
        assert!(compute_c0(0.0).is_err());
        assert!(compute_c0(1e-2).is_err());
    }

    #[test]
    fn ring_radius() {
        let qq = q(0.1);
        let r = RingSpec::new(&qq, 1);
        assert!((r.radius - 0.1f64.powf(-1.5)).abs() <= 1e-14 * r.radius);
    }
}
