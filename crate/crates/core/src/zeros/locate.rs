use std::f64::consts::PI;

use log::debug;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::winding::{winding_count, ContourFunction, DEFAULT_SAMPLES};
use crate::error::{check_tol, Error, Result};
use crate::theta::{mu, theta_jet, Jet, QParameter, RingSpec};

/// Largest accepted scaled residual `|θ| / max(1, |x ∂θ/∂x|)`.
pub const RESIDUAL_GATE: f64 = 1e-9;
const RESIDUAL_FLOOR: f64 = 1e-15;
/// Relative radius below which neighbouring zeros count as one multiple zero.
pub const MULTIPLICITY_RESOLUTION: f64 = 1e-6;

/// Where a Newton run was started.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedKind {
    MuLattice { s: i64 },
    Ring { k: u32 },
    User,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub q: QParameter,
    pub location: Complex64,
    pub multiplicity: u32,
    /// `|θ|` divided by the local scale `max(1, |x ∂θ/∂x|)`.
    pub residual: f64,
    /// `ln |θ(location)|`.
    pub log_abs_theta: f64,
    pub newton_iterations: usize,
    pub seed: SeedKind,
}

fn log_abs(j: &Jet, c: Complex64) -> f64 {
    let n = c.norm();
    if n == 0.0 {
        f64::NEG_INFINITY
    } else {
        n.ln() + j.log_scale
    }
}

fn scaled_residual(j: &Jet, x: Complex64) -> f64 {
    let lv = log_abs(j, j.v);
    if lv == f64::NEG_INFINITY {
        return 0.0;
    }
    let ls = (log_abs(j, j.dx) + x.norm().ln()).max(0.0);
    (lv - ls).exp()
}

/// A radius about a simple zero that keeps other zeros out: a quarter of the
/// distance `|θ_x / θ_xx|` at which the linear term stops dominating.
fn safe_radius(j: &Jet, x: Complex64) -> f64 {
    let lin = j.dx.norm();
    let quad = j.dxx.norm();
    let base = 1e-3 * x.norm().max(1.0);
    if quad == 0.0 {
        base
    } else {
        base.min(0.25 * lin / quad)
    }
}

/// Polishes a zero of `θ(q,·)` from a user-supplied start.
pub fn refine_zero_newton(q: &QParameter, x0: Complex64, tol: f64, max_iter: usize) -> Result<ZeroRecord> {
    refine_zero_seeded(q, x0, SeedKind::User, tol, max_iter)
}

/// Newton iteration on `θ(q,·)` with step halving whenever the residual grows.
pub fn refine_zero_seeded(
    q: &QParameter,
    x0: Complex64,
    seed: SeedKind,
    tol: f64,
    max_iter: usize,
) -> Result<ZeroRecord> {
    check_tol(tol)?;
    let gate = RESIDUAL_GATE.min(tol);
    let qv = q.value();
    let mut x = x0;
    let mut jet = theta_jet(qv, x)?;
    for it in 1..=max_iter {
        let res = scaled_residual(&jet, x);
        if jet.v.norm() == 0.0 || res <= RESIDUAL_FLOOR {
            return finish(q, x, &jet, seed, it - 1, gate);
        }
        if jet.dx.norm() == 0.0 || (jet.v / jet.dx).norm() > 1e14 * x.norm().max(1.0) {
            return Err(Error::DerivativeVanishing { re: x.re, im: x.im });
        }
        let step = jet.v / jet.dx;
        let current = log_abs(&jet, jet.v);
        let mut lambda = 1.0;
        let (mut xn, mut jn) = (x, jet);
        for _ in 0..30 {
            xn = x - step * lambda;
            jn = theta_jet(qv, xn)?;
            if log_abs(&jn, jn.v) <= current {
                break;
            }
            lambda *= 0.5;
        }
        if !(xn.re.is_finite() && xn.im.is_finite()) {
            return Err(Error::Divergence);
        }
        x = xn;
        jet = jn;
        if (step * lambda).norm() <= tol * x.norm().max(f64::MIN_POSITIVE) && scaled_residual(&jet, x) <= gate {
            return finish(q, x, &jet, seed, it, gate);
        }
    }
    Err(Error::MaxIterations(max_iter))
}

fn finish(q: &QParameter, x: Complex64, jet: &Jet, seed: SeedKind, iterations: usize, gate: f64) -> Result<ZeroRecord> {
    let residual = scaled_residual(jet, x);
    if residual > gate {
        return Err(Error::ResidualGate { residual, gate });
    }
    // zeros closer than ~1e-6 relative are counted together
    let r = safe_radius(jet, x).max(MULTIPLICITY_RESOLUTION * x.norm().max(1.0));
    let multiplicity = winding_count(q, x, r, ContourFunction::Theta, 512)?.max(0) as u32;
    Ok(ZeroRecord {
        q: *q,
        location: x,
        multiplicity,
        residual,
        log_abs_theta: log_abs(jet, jet.v),
        newton_iterations: iterations,
        seed,
    })
}

/// Number of zeros of `θ(q,·)` inside `C(zero, r_tiny)`, by winding.
pub fn multiplicity_estimate(q: &QParameter, zero: Complex64, r_tiny: f64) -> Result<i64> {
    winding_count(q, zero, r_tiny, ContourFunction::Theta, 512)
}

/// The zeros of `θ(q,·)` in the disk `|x| < |q|^{−k_max−1/2}`, annulus by
/// annulus, with the per-annulus multiplicity total matched against the
/// winding difference of the bounding rings.
pub fn zeros_up_to_k(q: &QParameter, k_max: u32) -> Result<Vec<ZeroRecord>> {
    if q.modulus() > 0.95 {
        return Err(Error::Domain(format!(
            "zeros_up_to_k needs |q| <= 0.95, got {}",
            q.modulus()
        )));
    }
    if k_max > 12 {
        return Err(Error::Domain(format!(
            "zeros_up_to_k supports k_max <= 12, got {k_max}"
        )));
    }
    let origin = Complex64::new(0.0, 0.0);
    let mut out = Vec::new();
    let mut inner = 0.0;
    let mut w_inner = 0i64;
    for k in 0..=k_max {
        let ring = RingSpec::new(q, k);
        let w = winding_count(q, origin, ring.radius, ContourFunction::Theta, DEFAULT_SAMPLES)?;
        let expected = w - w_inner;
        let found = locate_in_annulus(q, k, inner, ring.radius, expected, &mut out)?;
        if found != expected {
            return Err(Error::CountMismatch { k, expected, found });
        }
        inner = ring.radius;
        w_inner = w;
    }
    Ok(out)
}

fn seeds_for_annulus(q: &QParameter, k: u32, inner: f64, outer: f64) -> Vec<(Complex64, SeedKind)> {
    let mut seeds = Vec::new();
    if k >= 1 {
        seeds.push((mu(q, k as i64), SeedKind::MuLattice { s: k as i64 }));
    }
    let base_arg = if k >= 1 { mu(q, k as i64).arg() } else { PI };
    let lo = if inner > 0.0 { inner } else { 0.5 * outer };
    for n in [8usize, 16, 32, 64] {
        for t in [0.5, 0.25, 0.75, 0.1, 0.9] {
            let r = lo * (outer / lo).powf(t);
            for i in 0..n {
                let a = base_arg + 2.0 * PI * (i as f64 + 0.5 * (n > 8) as u8 as f64) / n as f64;
                seeds.push((Complex64::from_polar(r, a), SeedKind::Ring { k }));
            }
        }
    }
    seeds
}

fn locate_in_annulus(
    q: &QParameter,
    k: u32,
    inner: f64,
    outer: f64,
    expected: i64,
    out: &mut Vec<ZeroRecord>,
) -> Result<i64> {
    let mut found = 0i64;
    if expected <= 0 {
        return Ok(0);
    }
    let mut here: Vec<ZeroRecord> = Vec::new();
    for (seed, kind) in seeds_for_annulus(q, k, inner, outer) {
        let rec = match refine_zero_seeded(q, seed, kind, 1e-13, 100) {
            Ok(r) => r,
            Err(e) => {
                debug!("seed {seed} in ring {k}: {e}");
                continue;
            }
        };
        let a = rec.location.norm();
        if !(a > inner && a < outer) {
            continue;
        }
        if here
            .iter()
            .any(|z| (z.location - rec.location).norm() <= 1e-8 * a.max(1.0))
        {
            continue;
        }
        found += rec.multiplicity as i64;
        here.push(rec);
        if found >= expected {
            break;
        }
    }
    here.sort_by(|a, b| a.location.norm().total_cmp(&b.location.norm()));
    out.extend(here);
    Ok(found)
}
