//! Log-space evaluation of the infinite products
//! `Q = Π_{m≥1}(1−q^m)`, `R = Π_{m≥1}(1+q^{m−1}/x)`, `U_p^s = Π_{m=p}^{s}(1+xq^m)`
//! and the triple product `Θ* = Q·R·U_1^∞`.
//!
//! Truncation uses `|ln(1+w)| <= 2|w|` for `|w| <= 1/2`, summed as a geometric
//! series over the omitted factors. `log_tail` is that bound on the error of
//! the log-modulus (and the argument).

use num_complex::Complex64;

use super::aux::mu_c as mu;
use super::logc::{LogAccumulator, LogComplex};
use super::qparam::{cpowi, QParameter};
use super::EvalResult;
use crate::error::{check_tol, Error, Result};

const MAX_FACTORS: u64 = 1 << 24;

/// A truncated product in log-polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogProduct {
    pub value: LogComplex,
    /// Bound on `|ln P_true − ln P_computed|` from the omitted factors.
    pub log_tail: f64,
    pub factors: usize,
}

impl LogProduct {
    /// Lower bound on `ln |P|`.
    pub fn log_abs_lower(&self) -> f64 {
        self.value.log_modulus - self.log_tail
    }

    /// Upper bound on `ln |P|`.
    pub fn log_abs_upper(&self) -> f64 {
        self.value.log_modulus + self.log_tail
    }
}

/// `1 + x q^m`, switching to `q^m (x − μ_m)` where cancellation is possible so
/// that the factor vanishes exactly at the lattice point `x = μ_m`.
pub fn factor_one_plus_xq(qv: Complex64, x: Complex64, m: u64) -> Complex64 {
    let qm = cpowi(qv, m);
    let w = x * qm;
    if (0.5..=2.0).contains(&w.norm()) {
        qm * (x - mu(qv, m as i64))
    } else {
        Complex64::new(1.0, 0.0) + w
    }
}

/// `1 + q^k / x`, written as `(x − μ_{−k}) / x` near its zero `x = −q^k`.
pub fn factor_one_plus_q_over_x(qv: Complex64, x: Complex64, k: u64) -> Complex64 {
    let qk = cpowi(qv, k);
    let w = qk / x;
    if (0.5..=2.0).contains(&w.norm()) {
        (x - mu(qv, -(k as i64))) / x
    } else {
        Complex64::new(1.0, 0.0) + w
    }
}

/// `Q = Π_{m≥1}(1 − q^m)`.
pub fn q_product(q: &QParameter, tol: f64) -> Result<LogProduct> {
    check_tol(tol)?;
    let qv = q.value();
    let r = q.modulus();
    let mut acc = LogAccumulator::new();
    let mut m: u64 = 1;
    loop {
        let qm = cpowi(qv, m);
        acc.push(Complex64::new(1.0, 0.0) - qm);
        let next = r.powi((m + 1) as i32);
        let tail = 2.0 * next / (1.0 - r);
        if next <= 0.5 && tail <= tol {
            return Ok(LogProduct {
                value: acc.finish(),
                log_tail: tail,
                factors: m as usize,
            });
        }
        m += 1;
        if m > MAX_FACTORS {
            return Err(Error::TruncationCap(m as usize));
        }
    }
}

/// `R = Π_{m≥1}(1 + q^{m−1}/x)`, `x ≠ 0`.
pub fn r_product(q: &QParameter, x: Complex64, tol: f64) -> Result<LogProduct> {
    check_tol(tol)?;
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("R is undefined at x = 0".into()));
    }
    let qv = q.value();
    let r = q.modulus();
    let ax = x.norm();
    let mut acc = LogAccumulator::new();
    let mut m: u64 = 1;
    loop {
        acc.push(factor_one_plus_q_over_x(qv, x, m - 1));
        if acc.is_zero() {
            return Ok(LogProduct {
                value: LogComplex::ZERO,
                log_tail: 0.0,
                factors: m as usize,
            });
        }
        // omitted factors m+1, m+2, ... deviate from 1 by |q|^{m'}/|x|, m' >= m
        let next = r.powi(m as i32) / ax;
        let tail = 2.0 * next / (1.0 - r);
        if next <= 0.5 && tail <= tol {
            return Ok(LogProduct {
                value: acc.finish(),
                log_tail: tail,
                factors: m as usize,
            });
        }
        m += 1;
        if m > MAX_FACTORS {
            return Err(Error::TruncationCap(m as usize));
        }
    }
}

/// `U_p^s = Π_{m=p}^{s}(1 + x q^m)`; `last = None` means `s = ∞`.
pub fn u_product(q: &QParameter, x: Complex64, first: u64, last: Option<u64>, tol: f64) -> Result<LogProduct> {
    check_tol(tol)?;
    let qv = q.value();
    let r = q.modulus();
    let ax = x.norm();
    let mut acc = LogAccumulator::new();
    let mut m = first;
    if let Some(s) = last {
        if s < first {
            return Ok(LogProduct {
                value: LogComplex::ONE,
                log_tail: 0.0,
                factors: 0,
            });
        }
        while m <= s {
            acc.push(factor_one_plus_xq(qv, x, m));
            m += 1;
        }
        return Ok(LogProduct {
            value: acc.finish(),
            log_tail: 0.0,
            factors: (s - first + 1) as usize,
        });
    }
    loop {
        acc.push(factor_one_plus_xq(qv, x, m));
        if acc.is_zero() {
            return Ok(LogProduct {
                value: LogComplex::ZERO,
                log_tail: 0.0,
                factors: (m - first + 1) as usize,
            });
        }
        let next = ax * r.powi((m + 1) as i32);
        let tail = 2.0 * next / (1.0 - r);
        if next <= 0.5 && tail <= tol {
            return Ok(LogProduct {
                value: acc.finish(),
                log_tail: tail,
                factors: (m - first + 1) as usize,
            });
        }
        m += 1;
        if m - first > MAX_FACTORS {
            return Err(Error::TruncationCap((m - first) as usize));
        }
    }
}

/// `Θ*(q,x) = Π_{m≥1}(1−q^m)(1+xq^m)(1+q^{m−1}/x)`.
pub fn eval_thetastar_product(q: &QParameter, x: Complex64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Θ* is undefined at x = 0".into()));
    }
    let t = tol / 3.0;
    let qp = q_product(q, t)?;
    let rp = r_product(q, x, t)?;
    let up = u_product(q, x, 1, None, t)?;
    let value = qp.value * rp.value * up.value;
    let terms_used = qp.factors + rp.factors + up.factors;
    if value.is_zero() {
        return Ok(EvalResult {
            value,
            tail_bound: f64::NEG_INFINITY,
            terms_used,
            precision_loss: false,
        });
    }
    let delta = qp.log_tail + rp.log_tail + up.log_tail;
    Ok(EvalResult {
        value,
        tail_bound: value.log_modulus + delta.exp_m1().ln(),
        terms_used,
        precision_loss: false,
    })
}

/// The Euler product `S(r) = Π_{m≥1}(1 − r^m)` for real `0 <= r < 1`.
pub fn euler_product_s(r: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("S(r) requires 0 <= r < 1, got {r}")));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let mut log_sum = 0.0;
    let mut rm = 1.0;
    let mut m = 1u64;
    loop {
        rm *= r;
        log_sum += (-rm).ln_1p();
        let next = rm * r;
        if next <= 0.5 && 2.0 * next / (1.0 - r) <= tol {
            return Ok(log_sum.exp());
        }
        m += 1;
        if m > MAX_FACTORS {
            return Err(Error::TruncationCap(m as usize));
        }
    }
}
