use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::logc::LogComplex;
use super::product::eval_thetastar_product;
use super::qparam::{cpowi, QParameter};
use super::{log_add_exp, EvalResult};
use crate::error::{check_tol, Error, Result};

/// Largest peak log-term the direct path accepts. Beyond it the partial sums
/// would overflow or lose every significant digit to cancellation.
pub const LOG_DIRECT_LIMIT: f64 = 600.0;

const MAX_TERMS: usize = 1 << 22;

/// Which evaluation route produced a θ value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Direct,
    Identity,
}

pub(crate) struct SeriesSum {
    pub sum: Complex64,
    /// Absolute bound on `Σ_{omitted} |c_j|`.
    pub tail: f64,
    pub terms: usize,
}

/// Sums `c_0 + c_1 + ...` with `c_{j+1} = c_j * ratio(j)`.
///
/// `|ratio(j)|` must be non-increasing in `j`. Once `|ratio| <= 1/2` the
/// omitted terms are majorised by a geometric series, which gives the tail.
pub(crate) fn sum_ratio_series(first: Complex64, ratio: impl Fn(u64) -> Complex64, tol: f64) -> Result<SeriesSum> {
    let mut term = first;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = term.norm();
    let mut j: u64 = 0;
    loop {
        sum += term;
        let terms = j as usize + 1;
        let next = term * ratio(j);
        let next_abs = next.norm();
        peak = peak.max(next_abs);
        if next_abs == 0.0 {
            return Ok(SeriesSum { sum, tail: 0.0, terms });
        }
        let rho = ratio(j + 1).norm();
        if rho <= 0.5 {
            let tail = next_abs / (1.0 - rho);
            if tail <= tol * sum.norm() || tail <= tol * f64::EPSILON * peak {
                return Ok(SeriesSum { sum, tail, terms });
            }
        }
        if terms >= MAX_TERMS {
            return Err(Error::TruncationCap(terms));
        }
        term = next;
        j += 1;
    }
}

/// `max_j ln|q^{j(j+1)/2} x^j|`, optionally with an extra `ln j` weight.
fn log_peak_term(ln_q: f64, ln_x: f64, weight_j: bool) -> f64 {
    let f = |j: f64| {
        let w = if weight_j && j > 0.0 { j.ln() } else { 0.0 };
        0.5 * j * (j + 1.0) * ln_q + j * ln_x + w
    };
    if !ln_x.is_finite() {
        return f(0.0).max(if weight_j { ln_q } else { 0.0 });
    }
    let centre = (ln_x / -ln_q).floor().max(0.0);
    [centre - 1.0, centre, centre + 1.0, 0.0, 1.0]
        .into_iter()
        .filter(|j| *j >= 0.0)
        .map(f)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn log_of(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

fn direct_theta_sum(q: &QParameter, x: Complex64, tol: f64) -> Result<SeriesSum> {
    let log_peak = log_peak_term(q.ln_modulus(), x.norm().ln(), false);
    if log_peak > LOG_DIRECT_LIMIT {
        return Err(Error::Overflow { log_peak });
    }
    let qv = q.value();
    sum_ratio_series(Complex64::new(1.0, 0.0), |j| cpowi(qv, j + 1) * x, tol)
}

/// `θ(q,x)` by direct summation of the defining series.
pub fn eval_theta(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    let s = direct_theta_sum(q, x, tol)?;
    Ok(EvalResult {
        value: LogComplex::from_complex(s.sum),
        tail_bound: log_of(s.tail),
        terms_used: s.terms,
        precision_loss: false,
    })
}

/// `∂θ/∂x = Σ_{j≥1} j q^{j(j+1)/2} x^{j-1}` by direct summation.
pub fn eval_theta_dx(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    let log_peak = log_peak_term(q.ln_modulus(), x.norm().ln(), true);
    if log_peak > LOG_DIRECT_LIMIT {
        return Err(Error::Overflow { log_peak });
    }
    let qv = q.value();
    // c_i = (i+1) q^{(i+1)(i+2)/2} x^i
    let s = sum_ratio_series(
        qv,
        |i| {
            let k = i as f64;
            cpowi(qv, i + 2) * x * ((k + 2.0) / (k + 1.0))
        },
        tol,
    )?;
    Ok(EvalResult {
        value: LogComplex::from_complex(s.sum),
        tail_bound: log_of(s.tail),
        terms_used: s.terms,
        precision_loss: false,
    })
}

/// `Σ_{j≤-1} q^{j(j+1)/2} x^j = θ(q, 1/x) / x`, valid for every `x ≠ 0`.
fn g_sum(q: &QParameter, x: Complex64, tol: f64) -> Result<SeriesSum> {
    let y = x.inv();
    let s = direct_theta_sum(q, y, tol)?;
    Ok(SeriesSum {
        sum: s.sum * y,
        tail: s.tail * y.norm(),
        terms: s.terms,
    })
}

/// The negative-index tail `G(q,x) = Σ_{j≤-1} q^{j(j+1)/2} x^j` for `|x| > 1`.
pub fn eval_g(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if !(x.norm() > 1.0) {
        return Err(Error::Domain(format!("G requires |x| > 1, got |x| = {}", x.norm())));
    }
    let s = g_sum(q, x, tol)?;
    Ok(EvalResult {
        value: LogComplex::from_complex(s.sum),
        tail_bound: log_of(s.tail),
        terms_used: s.terms,
        precision_loss: false,
    })
}

/// The bilateral sum `Θ*(q,x) = Σ_{j∈ℤ} q^{j(j+1)/2} x^j` as `θ + G`.
pub fn eval_thetastar_series(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Θ* is undefined at x = 0".into()));
    }
    let pos = direct_theta_sum(q, x, tol)?;
    let neg = g_sum(q, x, tol)?;
    Ok(EvalResult {
        value: LogComplex::from_complex(pos.sum + neg.sum),
        tail_bound: log_of(pos.tail + neg.tail),
        terms_used: pos.terms + neg.terms,
        precision_loss: false,
    })
}

/// `θ = Θ* − G` with `Θ*` from the triple product. Overflow-free for `|x| > 1`.
pub fn eval_theta_via_identity(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if !(x.norm() > 1.0) {
        return Err(Error::Domain(format!(
            "identity path requires |x| > 1, got |x| = {}",
            x.norm()
        )));
    }
    let p = eval_thetastar_product(q, x, tol)?;
    let g = eval_g(q, x, tol)?;
    let value = p.value.sub(g.value);
    let big = p.value.log_modulus.max(g.value.log_modulus);
    let precision_loss =
        !value.is_zero() && value.log_modulus <= big + (1e-12f64).ln() || value.is_zero() && !p.value.is_zero();
    Ok(EvalResult {
        value,
        tail_bound: log_add_exp(p.tail_bound, g.tail_bound),
        terms_used: p.terms_used + g.terms_used,
        precision_loss,
    })
}

/// Chooses the direct series for `|x| <= 1` and the identity path otherwise.
pub fn eval_theta_auto(q: &QParameter, x: Complex64, tol: f64) -> Result<(EvalResult, EvalPath)> {
    if x.norm() <= 1.0 {
        Ok((eval_theta(q, x, tol)?, EvalPath::Direct))
    } else {
        Ok((eval_theta_via_identity(q, x, tol)?, EvalPath::Identity))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParameter {
        QParameter::real(v).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn theta_at_zero_is_one_exactly() {
        let r = eval_theta(&q(0.5), c(0.0), 1e-12).unwrap();
        assert_eq!(r.to_complex(), c(1.0));
        assert_eq!(r.terms_used, 1);
        assert_eq!(r.tail_bound, f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(matches!(
            eval_theta(&q(0.5), c(1.0), 0.0),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(eval_theta(&q(0.5), c(1.0), -1.0).is_err());
    }

    #[test]
    fn direct_path_flags_overflow() {
        let x = c(-(8f64.powi(11)));
        assert!(matches!(eval_theta(&q(0.9), x, 1e-12), Err(Error::Overflow { .. })));
    }

    #[test]
    fn g_rejects_unit_disk() {
        assert!(matches!(eval_g(&q(0.5), c(1.0), 1e-12), Err(Error::Domain(_))));
        assert!(eval_g(&q(0.5), c(0.3), 1e-12).is_err());
    }

    #[test]
    fn thetastar_rejects_zero() {
        assert!(eval_thetastar_series(&q(0.5), c(0.0), 1e-12).is_err());
    }

    #[test]
    fn derivative_at_origin_is_q() {
        for v in [0.5, 0.1] {
            let r = eval_theta_dx(&q(v), c(0.0), 1e-12).unwrap();
            assert!((r.to_complex() - c(v)).norm() <= 2.0 * f64::EPSILON * v);
        }
    }

    #[test]
    fn tail_is_below_tolerance() {
        let r = eval_theta(&q(0.5), c(1.0), 1e-12).unwrap();
        assert!(r.tail() <= 1e-12 * r.abs());
    }

    #[test]
    fn identity_flags_cancellation_at_lattice() {
        // x = μ_1 makes Θ* vanish exactly; θ = −G is then not a cancellation.
        let r = eval_theta_via_identity(&q(0.5), c(-2.0), 1e-14).unwrap();
        assert!(!r.value.is_zero());
    }
}
