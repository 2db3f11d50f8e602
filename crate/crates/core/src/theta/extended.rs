//! Double-double arithmetic (about 106 significant bits) for recomputing the
//! real-valued constants and real-axis sums with headroom over binary64.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        // one Newton step on the binary64 root doubles the precision
        let x = self.hi.sqrt();
        let xx = DoubleDouble::from_f64(x) * DoubleDouble::from_f64(x);
        let corr = (self - xx).hi / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Self { hi, lo }
    }

    pub fn powi(self, n: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

const DD_EPS: f64 = 1e-32;

/// `τ(r)` in double-double: `r^{ν²/2} = s^{ν²}` with `s = √r`.
pub fn tau_extended(r: DoubleDouble) -> Result<DoubleDouble> {
    if !(r.hi >= 0.0 && r.hi < 1.0) {
        return Err(Error::Domain(format!("τ(r) requires 0 <= r < 1, got {}", r.hi)));
    }
    if r.hi == 0.0 {
        return Ok(DoubleDouble::ZERO);
    }
    let s = r.sqrt();
    let s2 = s * s;
    let mut odd = s; // s^{2ν−1}
    let mut term = s; // s^{ν²}
    let mut sum = DoubleDouble::ZERO;
    for _ in 0..100_000 {
        sum = sum + term;
        odd = odd * s2;
        term = term * odd;
        if term.hi < DD_EPS * sum.hi {
            break;
        }
    }
    Ok(sum + sum)
}

/// Bisection for `τ(c0) = 1` carried out in double-double.
pub fn compute_c0_extended(tol: f64) -> Result<DoubleDouble> {
    if !(1e-30..1e-3).contains(&tol) {
        return Err(Error::InvalidTolerance(tol));
    }
    let half = DoubleDouble::from_f64(0.5);
    let mut lo = DoubleDouble::from_f64(0.1);
    let mut hi = DoubleDouble::from_f64(0.3);
    while (hi - lo).to_f64() > tol {
        let mid = (lo + hi) * half;
        if tau_extended(mid)? < DoubleDouble::ONE {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// `S(r) = Π(1 − r^m)` in double-double.
pub fn euler_product_s_extended(r: DoubleDouble) -> Result<DoubleDouble> {
    if !(r.hi >= 0.0 && r.hi < 1.0) {
        return Err(Error::Domain(format!("S(r) requires 0 <= r < 1, got {}", r.hi)));
    }
    let mut prod = DoubleDouble::ONE;
    let mut rm = DoubleDouble::ONE;
    for _ in 0..10_000_000u64 {
        rm = rm * r;
        prod = prod * (DoubleDouble::ONE - rm);
        if rm.hi < DD_EPS {
            break;
        }
    }
    Ok(prod)
}

/// `θ(q,x)` for real `q`, `x` in double-double by direct summation.
pub fn theta_real_extended(q: DoubleDouble, x: DoubleDouble) -> Result<DoubleDouble> {
    if !(q.hi.abs() > 0.0 && q.hi.abs() < 1.0) {
        return Err(Error::InvalidQ { re: q.hi, im: 0.0 });
    }
    let mut term = DoubleDouble::ONE;
    let mut qpow = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ZERO;
    let mut peak = 1.0f64;
    for _ in 0..10_000_000u64 {
        sum = sum + term;
        qpow = qpow * q;
        term = term * qpow * x;
        let a = term.hi.abs();
        peak = peak.max(a);
        if peak > 1e250 {
            return Err(Error::Overflow { log_peak: peak.ln() });
        }
        if a == 0.0 || (qpow.hi.abs() * x.hi.abs() < 0.5 && a < DD_EPS * (sum.hi.abs() + peak * 1e-16)) {
            break;
        }
    }
    Ok(sum)
}
