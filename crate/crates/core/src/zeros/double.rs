use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_tol, Error, Result};
use crate::theta::{theta_jet, Jet, QParameter, EIGHT_POW_11};

/// Largest accepted `|θ|` and `|∂θ/∂x|` at a reported double zero.
pub const DOUBLE_ZERO_GATE: f64 = 1e-10;
/// Two solutions closer than this in `|Δq| + |Δζ|/(1+|ζ|)` are merged.
pub const DEDUPE_THRESHOLD: f64 = 1e-6;
const DIVERGENCE_RADIUS: f64 = 1e12;
/// Iterates with `|q|` above this are treated as having left the disk:
/// product lengths grow like `1/(1 − |q|)`.
pub const MAX_Q_MODULUS: f64 = 0.99;
const DEGENERATE_COND: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// Iterate over complex `(q, x)`.
    Complex,
    /// Keep `q` and `x` on the real axis.
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleZeroOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: SolveMode,
}

impl Default for DoubleZeroOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            mode: SolveMode::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleZeroRecord {
    pub q: QParameter,
    pub zeta: Complex64,
    pub residual_theta: f64,
    pub residual_dtheta: f64,
    /// ∞-norm condition number of the final Jacobian of `(θ, ∂θ/∂x)`.
    pub jac_cond: f64,
    pub degenerate: bool,
    pub iterations: usize,
}

impl DoubleZeroRecord {
    /// Whether `|ζ| <= 8^11`.
    pub fn bound_check(&self) -> bool {
        self.zeta.norm() <= EIGHT_POW_11
    }

    fn distance(&self, o: &DoubleZeroRecord) -> f64 {
        (self.q.value() - o.q.value()).norm() + (self.zeta - o.zeta).norm() / (1.0 + self.zeta.norm())
    }
}

/// Solves `θ(q,x) = ∂θ/∂x(q,x) = 0` from `(q0, x0)` in the complex mode.
pub fn solve_double_zero(q0: Complex64, x0: Complex64, tol: f64, max_iter: usize) -> Result<DoubleZeroRecord> {
    solve_double_zero_with(
        q0,
        x0,
        DoubleZeroOptions {
            tol,
            max_iter,
            mode: SolveMode::Complex,
        },
    )
}

/// Real-restricted variant for real `q0` and `x0`.
pub fn solve_double_zero_real(q0: f64, x0: f64, tol: f64, max_iter: usize) -> Result<DoubleZeroRecord> {
    solve_double_zero_with(
        Complex64::new(q0, 0.0),
        Complex64::new(x0, 0.0),
        DoubleZeroOptions {
            tol,
            max_iter,
            mode: SolveMode::Real,
        },
    )
}

fn rescale(j: &Jet) -> [Complex64; 5] {
    let f = j.log_scale.exp();
    j.components().map(|c| c * f)
}

fn merit(c: &[Complex64; 5]) -> f64 {
    c[0].norm() + c[1].norm()
}

fn project(z: Complex64, mode: SolveMode) -> Complex64 {
    match mode {
        SolveMode::Complex => z,
        SolveMode::Real => Complex64::new(z.re, 0.0),
    }
}

fn eval(q: Complex64, x: Complex64) -> Result<[Complex64; 5]> {
    if !(q.norm() <= MAX_Q_MODULUS) || q.norm() == 0.0 {
        return Err(Error::LeftUnitDisk);
    }
    if !(x.norm() <= DIVERGENCE_RADIUS) {
        return Err(Error::Divergence);
    }
    Ok(rescale(&theta_jet(q, x)?))
}

fn cond_inf(a: Complex64, b: Complex64, c: Complex64, d: Complex64, det: Complex64) -> f64 {
    let n = (a.norm() + b.norm()).max(c.norm() + d.norm());
    let ninv = (d.norm() + b.norm()).max(c.norm() + a.norm()) / det.norm();
    n * ninv
}

pub fn solve_double_zero_with(q0: Complex64, x0: Complex64, opts: DoubleZeroOptions) -> Result<DoubleZeroRecord> {
    check_tol(opts.tol)?;
    let (mut q, mut x) = (project(q0, opts.mode), project(x0, opts.mode));
    let mut c = eval(q, x)?;
    let mut cond = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=opts.max_iter {
        // unknowns (q, x); equations f = θ, g = θ_x
        let (a, b) = (c[2], c[1]);
        let (cq, d) = (c[4], c[3]);
        let det = a * d - b * cq;
        if det.norm() == 0.0 || !det.norm().is_finite() {
            return Err(Error::SingularJacobian);
        }
        cond = cond_inf(a, b, cq, d, det);
        let dq = (c[0] * d - b * c[1]) / det;
        let dx = (a * c[1] - cq * c[0]) / det;
        let (dq, dx) = (project(dq, opts.mode), project(dx, opts.mode));
        let m0 = merit(&c);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let (qn, xn) = (q - dq * lambda, x - dx * lambda);
            match eval(qn, xn) {
                Ok(cn) if merit(&cn) <= m0 || lambda < 1e-6 => {
                    accepted = Some((qn, xn, cn));
                    break;
                }
                Ok(_) => {}
                Err(e @ (Error::LeftUnitDisk | Error::Divergence)) if lambda < 1e-6 => return Err(e),
                Err(Error::LeftUnitDisk | Error::Divergence) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        let Some((qn, xn, cn)) = accepted else {
            return Err(Error::Divergence);
        };
        // repeated tiny damped steps: no nearby solution
        stalled = if lambda < 1e-3 { stalled + 1 } else { 0 };
        if stalled >= 5 {
            return Err(Error::Divergence);
        }
        let step = (qn - q).norm() + (xn - x).norm() / (1.0 + xn.norm());
        q = qn;
        x = xn;
        c = cn;
        let small = c[0].norm() <= DOUBLE_ZERO_GATE && c[1].norm() <= DOUBLE_ZERO_GATE;
        if small && step <= opts.tol.max(1e-15) {
            return finish(q, x, &c, cond, it);
        }
        if merit(&c) == 0.0 {
            return finish(q, x, &c, cond, it);
        }
    }
    let small = c[0].norm() <= DOUBLE_ZERO_GATE && c[1].norm() <= DOUBLE_ZERO_GATE;
    if small {
        return finish(q, x, &c, cond, opts.max_iter);
    }
    Err(Error::MaxIterations(opts.max_iter))
}

fn finish(q: Complex64, x: Complex64, c: &[Complex64; 5], cond: f64, iterations: usize) -> Result<DoubleZeroRecord> {
    let (rt, rd) = (c[0].norm(), c[1].norm());
    if rt > DOUBLE_ZERO_GATE || rd > DOUBLE_ZERO_GATE {
        return Err(Error::ResidualGate {
            residual: rt.max(rd),
            gate: DOUBLE_ZERO_GATE,
        });
    }
    Ok(DoubleZeroRecord {
        q: QParameter::from_complex(q)?,
        zeta: x,
        residual_theta: rt,
        residual_dtheta: rd,
        jac_cond: cond,
        degenerate: cond > DEGENERATE_COND,
        iterations,
    })
}

/// Merges records within [`DEDUPE_THRESHOLD`] and sorts by `(|q|, arg q, |ζ|)`.
/// The record with the smaller residual survives a merge.
pub fn dedupe_double_zeros(mut records: Vec<DoubleZeroRecord>) -> Vec<DoubleZeroRecord> {
    records.sort_by(|a, b| (a.residual_theta + a.residual_dtheta).total_cmp(&(b.residual_theta + b.residual_dtheta)));
    let mut kept: Vec<DoubleZeroRecord> = Vec::new();
    for r in records {
        if kept.iter().all(|k| k.distance(&r) > DEDUPE_THRESHOLD) {
            kept.push(r);
        }
    }
    kept.sort_by(|a, b| {
        a.q.modulus()
            .total_cmp(&b.q.modulus())
            .then(a.q.argument().total_cmp(&b.q.argument()))
            .then(a.zeta.norm().total_cmp(&b.zeta.norm()))
    });
    kept
}
