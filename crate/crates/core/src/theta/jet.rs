//! Value and first/second derivatives of θ, `Θ*` and `G` with respect to `x`
//! and `q`, carried together as a jet `(f, f_x, f_q, f_xx, f_xq)`.
//!
//! The jet is stored with a shared exponent `e^{log_scale}` so the triple
//! product can be differentiated at `|x| ~ 10^{11}` where `|Θ*|` itself is far
//! outside the binary64 range. Newton steps only use ratios of components, so
//! they never need the absolute scale.

use num_complex::Complex64;

use super::logc::LogComplex;
use super::product::{factor_one_plus_q_over_x, factor_one_plus_xq};
use super::qparam::cpowi;
use super::series::LOG_DIRECT_LIMIT;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const JET_TOL: f64 = 1e-18;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub dx: Complex64,
    pub dq: Complex64,
    pub dxx: Complex64,
    pub dxq: Complex64,
    pub log_scale: f64,
}

impl Jet {
    pub fn constant(v: Complex64) -> Self {
        Self::new(v, ZERO, ZERO, ZERO, ZERO)
    }

    pub fn new(v: Complex64, dx: Complex64, dq: Complex64, dxx: Complex64, dxq: Complex64) -> Self {
        let mut j = Self {
            v,
            dx,
            dq,
            dxx,
            dxq,
            log_scale: 0.0,
        };
        j.normalize();
        j
    }

    fn max_norm(&self) -> f64 {
        [self.v, self.dx, self.dq, self.dxx, self.dxq]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn normalize(&mut self) {
        let m = self.max_norm();
        if m > 1e100 || (m > 0.0 && m < 1e-100) {
            let inv = 1.0 / m;
            self.v *= inv;
            self.dx *= inv;
            self.dq *= inv;
            self.dxx *= inv;
            self.dxq *= inv;
            self.log_scale += m.ln();
        }
    }

    fn rescaled(&self, log_scale: f64) -> [Complex64; 5] {
        let f = (self.log_scale - log_scale).exp();
        [self.v * f, self.dx * f, self.dq * f, self.dxx * f, self.dxq * f]
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = Jet {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dq: self.dq * o.v + self.v * o.dq,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dxq: self.dxq * o.v + self.dx * o.dq + self.dq * o.dx + self.v * o.dxq,
            log_scale: self.log_scale + o.log_scale,
        };
        r.normalize();
        r
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let s = if self.max_norm() == 0.0 {
            o.log_scale
        } else if o.max_norm() == 0.0 {
            self.log_scale
        } else {
            self.log_scale.max(o.log_scale)
        };
        let a = self.rescaled(s);
        let b = o.rescaled(s);
        let mut r = Jet {
            v: a[0] - b[0],
            dx: a[1] - b[1],
            dq: a[2] - b[2],
            dxx: a[3] - b[3],
            dxq: a[4] - b[4],
            log_scale: s,
        };
        r.normalize();
        r
    }

    fn abs_of(&self, c: Complex64) -> LogComplex {
        let l = LogComplex::from_complex(c);
        if l.is_zero() {
            l
        } else {
            LogComplex::new(l.log_modulus + self.log_scale, l.argument)
        }
    }

    pub fn value(&self) -> LogComplex {
        self.abs_of(self.v)
    }

    pub fn d_x(&self) -> LogComplex {
        self.abs_of(self.dx)
    }

    pub fn d_q(&self) -> LogComplex {
        self.abs_of(self.dq)
    }

    pub fn d_xx(&self) -> LogComplex {
        self.abs_of(self.dxx)
    }

    pub fn d_xq(&self) -> LogComplex {
        self.abs_of(self.dxq)
    }

    /// The five components divided by the common scale `e^{log_scale}`.
    pub fn components(&self) -> [Complex64; 5] {
        [self.v, self.dx, self.dq, self.dxx, self.dxq]
    }
}

fn check_q(qv: Complex64) -> Result<()> {
    let r = qv.norm();
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ { re: qv.re, im: qv.im })
    }
}

/// Jet of the triple product `Θ*(q,x)`, `x ≠ 0`.
pub fn product_jet(qv: Complex64, x: Complex64) -> Result<Jet> {
    check_q(qv)?;
    if x == ZERO {
        return Err(Error::Domain("Θ* is undefined at x = 0".into()));
    }
    let r = qv.norm();
    let ax = x.norm();
    let xi = x.inv();
    let xi2 = xi * xi;
    let xi3 = xi2 * xi;
    let mut acc = Jet::constant(ONE);
    let mut m: u64 = 1;
    loop {
        let mf = m as f64;
        let qm = cpowi(qv, m);
        let qm1 = cpowi(qv, m - 1);
        let qm2 = if m >= 2 { cpowi(qv, m - 2) } else { ZERO };
        let a = Jet::new(ONE - qm, ZERO, -mf * qm1, ZERO, ZERO);
        let b = Jet::new(factor_one_plus_xq(qv, x, m), qm, mf * x * qm1, ZERO, mf * qm1);
        let c = Jet::new(
            factor_one_plus_q_over_x(qv, x, m - 1),
            -qm1 * xi2,
            (mf - 1.0) * qm2 * xi,
            2.0 * qm1 * xi3,
            -(mf - 1.0) * qm2 * xi2,
        );
        acc = acc.mul(&a).mul(&b).mul(&c);
        let rn = r.powi((m + 1) as i32);
        let dev_a = rn;
        let dev_b = ax * rn;
        let dev_c = r.powi(m as i32) / ax;
        if dev_a <= 0.5
            && dev_b <= 0.5
            && dev_c <= 0.5
            && 2.0 * (dev_a + dev_b + dev_c) * (1.0 + mf) / (1.0 - r) <= JET_TOL
        {
            return Ok(acc);
        }
        m += 1;
        if m > 1 << 24 {
            return Err(Error::TruncationCap(m as usize));
        }
    }
}

/// Jet of `G(q,x) = Σ_{i≥1} q^{i(i−1)/2} x^{−i}`.
pub fn g_jet(qv: Complex64, x: Complex64) -> Result<Jet> {
    check_q(qv)?;
    if x == ZERO {
        return Err(Error::Domain("G is undefined at x = 0".into()));
    }
    let r = qv.norm();
    let y = x.inv();
    let ay = y.norm();
    let mut sum = [ZERO; 5];
    let mut i: u64 = 1;
    loop {
        let fi = i as f64;
        let a = i * (i - 1) / 2;
        let af = a as f64;
        let qa = cpowi(qv, a);
        let qa1 = if a >= 1 { cpowi(qv, a - 1) } else { ZERO };
        let yi = cpowi(y, i);
        let yi1 = yi * y;
        let yi2 = yi1 * y;
        let t = [
            qa * yi,
            -fi * qa * yi1,
            af * qa1 * yi,
            fi * (fi + 1.0) * qa * yi2,
            -fi * af * qa1 * yi1,
        ];
        let mut big = 0.0f64;
        for k in 0..5 {
            sum[k] += t[k];
            big = big.max(t[k].norm());
        }
        if i >= 2 && r.powi(i as i32) * ay <= 0.5 && big <= JET_TOL * ay.min(1.0) * r {
            break;
        }
        i += 1;
        if i > 1 << 20 {
            return Err(Error::TruncationCap(i as usize));
        }
    }
    Ok(Jet::new(sum[0], sum[1], sum[2], sum[3], sum[4]))
}

/// Jet of θ by direct summation; suitable for moderate `|x|`.
pub fn theta_direct_jet(qv: Complex64, x: Complex64) -> Result<Jet> {
    check_q(qv)?;
    let r = qv.norm();
    let ax = x.norm();
    if ax > 0.0 {
        let centre = (ax.ln() / -r.ln()).floor().max(0.0);
        let log_peak = 0.5 * centre * (centre + 1.0) * r.ln() + centre * ax.ln() + 2.0 * (centre + 2.0).ln();
        if log_peak > LOG_DIRECT_LIMIT {
            return Err(Error::Overflow { log_peak });
        }
    }
    let mut sum = [ZERO; 5];
    let mut j: u64 = 0;
    loop {
        let fj = j as f64;
        let b = j * (j + 1) / 2;
        let bf = b as f64;
        let qb = cpowi(qv, b);
        let qb1 = if b >= 1 { cpowi(qv, b - 1) } else { ZERO };
        let xj = cpowi(x, j);
        let xj1 = if j >= 1 { cpowi(x, j - 1) } else { ZERO };
        let xj2 = if j >= 2 { cpowi(x, j - 2) } else { ZERO };
        let t = [
            qb * xj,
            fj * qb * xj1,
            bf * qb1 * xj,
            fj * (fj - 1.0) * qb * xj2,
            fj * bf * qb1 * xj1,
        ];
        let mut big = 0.0f64;
        let mut tot = 0.0f64;
        for k in 0..5 {
            sum[k] += t[k];
            big = big.max(t[k].norm());
            tot = tot.max(sum[k].norm());
        }
        if j >= 2 && r.powi(j as i32 + 1) * ax <= 0.5 && big <= JET_TOL * (1.0 + tot) {
            break;
        }
        j += 1;
        if j > 1 << 20 {
            return Err(Error::TruncationCap(j as usize));
        }
    }
    Ok(Jet::new(sum[0], sum[1], sum[2], sum[3], sum[4]))
}

/// Jet of θ: direct series for `|x| <= 1`, `Θ* − G` otherwise.
pub fn theta_jet(qv: Complex64, x: Complex64) -> Result<Jet> {
    if x.norm() <= 1.0 {
        theta_direct_jet(qv, x)
    } else {
        Ok(product_jet(qv, x)?.sub(&g_jet(qv, x)?))
    }
}
