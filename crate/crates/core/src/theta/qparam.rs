use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nome `q` of the series, restricted to the punctured open unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQ", into = "RawQ")]
pub struct QParameter {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawQ {
    re: f64,
    im: f64,
}

impl TryFrom<RawQ> for QParameter {
    type Error = Error;
    fn try_from(raw: RawQ) -> Result<Self> {
        QParameter::new(raw.re, raw.im)
    }
}

impl From<QParameter> for RawQ {
    fn from(q: QParameter) -> Self {
        RawQ { re: q.re, im: q.im }
    }
}

impl QParameter {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let m = re.hypot(im);
        if re.is_finite() && im.is_finite() && m > 0.0 && m < 1.0 {
            Ok(Self { re, im })
        } else {
            Err(Error::InvalidQ { re, im })
        }
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// Builds `q = modulus * exp(i * argument)`.
    pub fn from_polar(modulus: f64, argument: f64) -> Result<Self> {
        let z = Complex64::from_polar(modulus, argument);
        Self::new(z.re, z.im)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn argument(&self) -> f64 {
        self.im.atan2(self.re)
    }

    /// `ln |q|`, strictly negative.
    pub fn ln_modulus(&self) -> f64 {
        self.modulus().ln()
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

impl std::fmt::Display for QParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im >= 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

/// `z^n` by binary exponentiation. Deterministic, so that lattice points built
/// from it can be compared bitwise.
pub fn cpowi(z: Complex64, n: u64) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base = base * base;
        }
    }
    acc
}
