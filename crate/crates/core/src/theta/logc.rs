use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number stored as `(ln |z|, arg z)`.
///
/// `log_modulus = -inf` encodes zero. Products of many large or small factors
/// stay representable long after the ordinary complex form would overflow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_modulus: f64,
    pub argument: f64,
}

/// Reduces an angle to `(-pi, pi]`.
pub fn reduce_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

#[allow(clippy::should_implement_trait)]
impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_modulus: f64::NEG_INFINITY,
        argument: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_modulus: 0.0,
        argument: 0.0,
    };

    pub fn new(log_modulus: f64, argument: f64) -> Self {
        if log_modulus == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_modulus,
            argument: reduce_angle(argument),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let m = z.re.hypot(z.im);
        if m == 0.0 {
            return Self::ZERO;
        }
        Self::new(m.ln(), z.im.atan2(z.re))
    }

    pub fn from_real(v: f64) -> Self {
        Self::from_complex(Complex64::new(v, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    /// Ordinary complex form; overflows to infinity for `log_modulus > ~709.78`.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.argument)
    }

    /// `z * exp(-log_scale)` in ordinary complex form.
    pub fn scaled(&self, log_scale: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_modulus - log_scale).exp(), self.argument)
    }

    pub fn abs(&self) -> f64 {
        self.log_modulus.exp()
    }

    pub fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.log_modulus, self.argument + PI)
    }

    pub fn powi(self, n: i64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return if n > 0 {
                Self::ZERO
            } else {
                Self::new(f64::INFINITY, 0.0)
            };
        }
        Self::new(self.log_modulus * n as f64, self.argument * n as f64)
    }

    /// Sum computed relative to the larger operand so neither side overflows.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let s = self.log_modulus.max(other.log_modulus);
        let z = self.scaled(s) + other.scaled(s);
        let r = Self::from_complex(z);
        if r.is_zero() {
            return Self::ZERO;
        }
        Self::new(r.log_modulus + s, r.argument)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_modulus + rhs.log_modulus, self.argument + rhs.argument)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_modulus - rhs.log_modulus, self.argument - rhs.argument)
    }
}

/// Running product of factors in log-polar form.
///
/// The argument is kept as an unreduced sum and wrapped once at the end, which
/// avoids repeated `rem_euclid` calls inside hot loops.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogAccumulator {
    log_modulus: f64,
    argument: f64,
    zero: bool,
}

impl LogAccumulator {
    pub fn new() -> Self {
        Self {
            log_modulus: 0.0,
            argument: 0.0,
            zero: false,
        }
    }

    pub fn push(&mut self, factor: Complex64) {
        if self.zero {
            return;
        }
        let m = factor.re.hypot(factor.im);
        if m == 0.0 {
            self.zero = true;
            return;
        }
        self.log_modulus += m.ln();
        self.argument += factor.im.atan2(factor.re);
        if self.argument.abs() > 1e6 {
            self.argument = reduce_angle(self.argument);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn finish(&self) -> LogComplex {
        if self.zero {
            LogComplex::ZERO
        } else {
            LogComplex::new(self.log_modulus, self.argument)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_encoding() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.to_complex(), Complex64::new(0.0, 0.0));
        assert!((z * LogComplex::ONE).is_zero());
        assert_eq!(z.add(LogComplex::ONE), LogComplex::ONE);
    }

    #[test]
    fn argument_is_reduced() {
        let z = LogComplex::new(0.0, 7.0 * PI);
        assert!((z.argument - PI).abs() < 1e-12);
        let w = LogComplex::new(0.0, -PI);
        assert_eq!(w.argument, PI);
        assert!(LogComplex::from_real(-3.0).argument == PI);
    }

    #[test]
    fn huge_sum_does_not_overflow() {
        let a = LogComplex::new(2000.0, 0.3);
        let b = LogComplex::new(2000.0 + 2f64.ln(), 0.3);
        let c = a.add(a);
        assert!((c.log_modulus - b.log_modulus).abs() < 1e-12);
        assert!((c.argument - 0.3).abs() < 1e-12);
        assert!(a.sub(a).is_zero());
    }

    proptest! {
        #[test]
        fn complex_round_trip(re in -1e10f64..1e10, im in -1e10f64..1e10) {
            let z = Complex64::new(re, im);
            prop_assume!(z.norm() > 1e-300);
            let back = LogComplex::from_complex(z).to_complex();
            prop_assert!((back - z).norm() <= 1e-14 * z.norm());
        }

        #[test]
        fn product_matches_complex(a_re in -5.0f64..5.0, a_im in -5.0f64..5.0,
                                   b_re in -5.0f64..5.0, b_im in -5.0f64..5.0) {
            let a = Complex64::new(a_re, a_im);
            let b = Complex64::new(b_re, b_im);
            prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
            let p = (LogComplex::from_complex(a) * LogComplex::from_complex(b)).to_complex();
            prop_assert!((p - a * b).norm() <= 1e-13 * (a * b).norm());
            let s = LogComplex::from_complex(a).add(LogComplex::from_complex(b)).to_complex();
            prop_assert!((s - (a + b)).norm() <= 1e-13 * (a.norm() + b.norm()));
        }
    }
}
