use std::sync::OnceLock;

use num_complex::Complex64;

use super::report::{BoundReport, Relation};
use crate::error::{Error, Result};
use crate::theta::{
    compute_c0, eval_g, kappa_detailed, q_product, r_product, tau, u_product, QParameter, LN_EIGHT_POW_11, PI2_OVER_6,
};

pub(crate) const PRODUCT_TOL: f64 = 1e-15;
const BAND_EPS: f64 = 1e-15;

/// The root of `τ = 1` to full double precision.
pub fn c0_root() -> f64 {
    static C0_ROOT: OnceLock<f64> = OnceLock::new();
    *C0_ROOT.get_or_init(|| compute_c0(1e-17).expect("bracket is valid"))
}

/// Whether `1 − 1/(n−1) <= r <= 1 − 1/n`.
pub fn in_n_band(r: f64, n: u32) -> bool {
    n >= 3 && r >= 1.0 - 1.0 / (n - 1) as f64 - BAND_EPS && r <= 1.0 - 1.0 / n as f64 + BAND_EPS
}

/// The band index `n >= 3` containing `r ∈ [1/2, 1)`, and whether `r` sits on
/// the shared endpoint `1 − 1/n` (assigned to the smaller band).
pub fn band_of(r: f64) -> Option<(u32, bool)> {
    if !(0.5 - BAND_EPS..1.0).contains(&r) {
        return None;
    }
    let mut n = 3u32;
    while r > 1.0 - 1.0 / n as f64 + BAND_EPS {
        n += 1;
        if n > 1 << 20 {
            return None;
        }
    }
    let tie = (r - (1.0 - 1.0 / n as f64)).abs() <= BAND_EPS;
    Some((n, tie))
}

pub(crate) fn require_band(q: &QParameter, n: u32) -> Result<()> {
    if !in_n_band(q.modulus(), n) {
        return Err(Error::Hypothesis(format!(
            "|q| = {} is outside the band [1 − 1/{}, 1 − 1/{}]",
            q.modulus(),
            n.saturating_sub(1),
            n
        )));
    }
    Ok(())
}

pub(crate) fn q_context(r: BoundReport, q: &QParameter) -> BoundReport {
    r.with("q_re", q.re()).with("q_im", q.im()).with("q_abs", q.modulus())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Log-moduli of the terms of θ on `|x| = |q|^{−k−1/2}`, summed directly:
/// returns `(ln |L|, ln M)` with `M` including its truncation tail.
fn dominant_parts(q: &QParameter, k: u32) -> (f64, f64) {
    let lr = q.ln_modulus();
    let lx = -(k as f64 + 0.5) * lr;
    let term = |j: u64| (j * (j + 1)) as f64 / 2.0 * lr + j as f64 * lx;
    let ln_l = term(k as u64);
    let mut others = Vec::new();
    let mut j = 0u64;
    loop {
        if j != k as u64 {
            others.push(term(j));
        }
        // beyond j the ratio of consecutive terms is |q|^{j+1}|x| = |q|^{j−k+1/2}
        if j > k as u64 {
            let ln_ratio = (j as f64 + 1.0 - k as f64 - 0.5) * lr;
            let ln_next = term(j + 1);
            if ln_next - ln_l < -40.0 {
                let ln_tail = ln_next - (-ln_ratio.exp()).ln_1p();
                others.push(ln_tail);
                break;
            }
        }
        j += 1;
    }
    (ln_l, log_sum_exp(&others))
}

fn require_dominant_hypothesis(q: &QParameter) -> Result<()> {
    if q.modulus() > c0_root() + 1e-12 {
        return Err(Error::Hypothesis(format!("|q| = {} exceeds c0", q.modulus())));
    }
    Ok(())
}

/// `|L| > M` on `|x| = |q|^{−k−1/2}`, where `L = x^k q^{k(k+1)/2}` and `M` is
/// the sum of the moduli of the other terms of θ. Compared in log scale.
pub fn check_dominant_term(q: &QParameter, k: u32) -> Result<BoundReport> {
    require_dominant_hypothesis(q)?;
    let (ln_l, ln_m) = dominant_parts(q, k);
    Ok(q_context(BoundReport::log("dominant_term", ln_l, Relation::Gt, ln_m), q).with("k", k as f64))
}

/// [`check_dominant_term`] together with `M < |L| τ(|q|)` and `τ(|q|) <= 1`.
pub fn check_dominant_term_detail(q: &QParameter, k: u32) -> Result<Vec<BoundReport>> {
    let main = check_dominant_term(q, k)?;
    let (ln_l, ln_m) = dominant_parts(q, k);
    let t = tau(q.modulus())?;
    // |L|τ − M = |L| Σ_{ν>k} |q|^{ν²/2}: the terms of index j < 0
    let lr = q.ln_modulus();
    let gap: f64 = (k as u64 + 1..k as u64 + 60)
        .map(|nu| (0.5 * (nu * nu) as f64 * lr).exp())
        .sum();
    let by_tau = BoundReport::log("dominant_sum_below_tau", ln_m, Relation::Lt, ln_l + t.ln())
        .with_stable_margin(-(-gap / t).ln_1p(), 1e-12);
    let tau_one = BoundReport::new("tau_at_most_one", t, Relation::Le, 1.0).with_rounding_slack();
    Ok(vec![
        main,
        q_context(by_tau, q).with("k", k as f64).with("tau", t),
        q_context(tau_one, q).with("tau", t),
    ])
}

/// `|μ_{s1} − μ_{s2}| > 1/n`, equivalently the closed `1/(2n)`-disks about
/// the two lattice points are disjoint.
pub fn verify_disk_separation(q: &QParameter, n: u32, s1: i64, s2: i64) -> Result<BoundReport> {
    require_band(q, n)?;
    if !(s1 > s2 && s2 > 0) {
        return Err(Error::Hypothesis(format!("need s1 > s2 > 0, got s1 = {s1}, s2 = {s2}")));
    }
    // μ_{s1} − μ_{s2} = −q^{−s1}(1 − q^{s1−s2})
    let d = crate::theta::cpowi(q.value(), (s1 - s2) as u64);
    let ln_dist = -(s1 as f64) * q.ln_modulus() + (Complex64::new(1.0, 0.0) - d).norm().ln();
    let r = BoundReport::log("disk_separation", ln_dist, Relation::Gt, -(n as f64).ln());
    Ok(q_context(r, q)
        .with("n", n as f64)
        .with("s1", s1 as f64)
        .with("s2", s2 as f64))
}

/// `|G(q,x)| <= 1/(|x| − 1)`, with the evaluation tail added to `|G|`.
pub fn verify_g_bound(q: &QParameter, x: Complex64) -> Result<BoundReport> {
    let ax = x.norm();
    if !(ax > 1.0) {
        return Err(Error::Hypothesis(format!("G bound needs |x| > 1, got {ax}")));
    }
    let g = eval_g(q, x, 1e-16)?;
    let lhs = g.abs() + g.tail();
    let rhs = 1.0 / (ax - 1.0);
    let r = BoundReport::new("g_bound", lhs, Relation::Le, rhs).with_rounding_slack();
    let r = r.with_slack(8.0 * f64::EPSILON * rhs);
    Ok(q_context(r, q).with("x_re", x.re).with("x_im", x.im).with("x_abs", ax))
}

/// The series `T = Σ_{s≥0} r^s / ((s+1)(1 + r + ... + r^s))` with an upper
/// bound on its truncation error.
pub fn lemma_t_series(r: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut rs = 1.0;
    let mut geo = 0.0;
    let mut s = 0u64;
    loop {
        geo += rs;
        sum += rs / ((s + 1) as f64 * geo);
        s += 1;
        rs *= r;
        // remaining terms are below r^s/(s+1) each with ratio <= r
        let tail = rs / ((s + 1) as f64 * (1.0 - r));
        if tail < 1e-17 || s > 10_000_000 {
            return (sum, tail);
        }
    }
}

/// The three lower bounds for `|Q|`, `|R|` and `|U_{κ+1}^∞|` under
/// `|q| <= 1 − 1/b`, `|x| > 1`, and `0 < T < π²/6` for the series in the
/// logarithm of `S`.
pub fn verify_lemma_l_bounds(q: &QParameter, x: Complex64, b: f64) -> Result<Vec<BoundReport>> {
    if !(b > 1.0) {
        return Err(Error::Hypothesis(format!("need b > 1, got {b}")));
    }
    if q.modulus() > 1.0 - 1.0 / b + BAND_EPS {
        return Err(Error::Hypothesis(format!(
            "|q| = {} exceeds 1 − 1/b for b = {b}",
            q.modulus()
        )));
    }
    let ax = x.norm();
    if !(ax > 1.0) {
        return Err(Error::Hypothesis(format!("need |x| > 1, got {ax}")));
    }
    let floor = PI2_OVER_6 * (1.0 - b);
    let kap = kappa_detailed(q, x)?;
    let qp = q_product(q, PRODUCT_TOL)?;
    let rp = r_product(q, x, PRODUCT_TOL)?;
    let up = u_product(q, x, kap.value + 1, None, PRODUCT_TOL)?;
    let (t, t_tail) = lemma_t_series(q.modulus());
    let ctx = |r: BoundReport| {
        q_context(r, q)
            .with("b", b)
            .with("x_re", x.re)
            .with("x_im", x.im)
            .with("x_abs", ax)
    };
    let slack = |r: BoundReport| r.with_rounding_slack();
    Ok(vec![
        ctx(slack(BoundReport::log(
            "lemma_l_q",
            qp.log_abs_lower(),
            Relation::Ge,
            floor,
        ))),
        ctx(slack(BoundReport::log(
            "lemma_l_r",
            rp.log_abs_lower(),
            Relation::Ge,
            (-1.0 / ax).ln_1p() + floor,
        ))),
        ctx(slack(BoundReport::log(
            "lemma_l_u_tail",
            up.log_abs_lower(),
            Relation::Ge,
            floor,
        )))
        .with("kappa", kap.value as f64),
        ctx(BoundReport::new("lemma_l_t_positive", t, Relation::Gt, 0.0)),
        ctx(BoundReport::new(
            "lemma_l_t_below_pi2_6",
            t + t_tail,
            Relation::Lt,
            PI2_OVER_6,
        ))
        .with("t", t),
    ])
}

/// `κ > 11n` for `|x| > 8^11` and `|q|` in the `n`-band.
pub fn verify_kappa_lower(q: &QParameter, x: Complex64, n: u32) -> Result<BoundReport> {
    require_band(q, n)?;
    let ax = x.norm();
    if !(ax.ln() > LN_EIGHT_POW_11) {
        return Err(Error::Hypothesis(format!("need |x| > 8^11, got {ax}")));
    }
    let k = kappa_detailed(q, x)?;
    let r = BoundReport::new("kappa_lower", k.value as f64, Relation::Gt, 11.0 * n as f64);
    Ok(q_context(r, q)
        .with("n", n as f64)
        .with("x_abs", ax)
        .with("kappa_near_tie", k.near_tie as u8 as f64))
}

/// The scalar inequalities behind `κ > 11n`:
/// `1/4 <= (1−1/(n−1))^{n−1} <= 1/e`, `1/8 <= (1−1/(n−1))^n <= 1/e`,
/// `1/e^11 >= (1−1/n)^{11n} >= |q|^{11n} >= (1−1/(n−1))^{11n} >= 1/8^11`
/// and `|x||q|^{11n} > 1`. All compared in log scale.
pub fn verify_kappa_chain(q: &QParameter, x: Complex64, n: u32) -> Result<Vec<BoundReport>> {
    require_band(q, n)?;
    let ax = x.norm();
    if !(ax.ln() > LN_EIGHT_POW_11) {
        return Err(Error::Hypothesis(format!("need |x| > 8^11, got {ax}")));
    }
    let nf = n as f64;
    let lo = (-1.0 / (nf - 1.0)).ln_1p();
    let hi = (-1.0 / nf).ln_1p();
    let lq = q.ln_modulus();
    let ln4 = 4f64.ln();
    let ln8 = 8f64.ln();
    let s = |name: &str, a: f64, rel: Relation, b: f64| {
        q_context(BoundReport::log(name, a, rel, b).with_rounding_slack(), q).with("n", nf)
    };
    Ok(vec![
        s("band_power_n_minus_1_lower", (nf - 1.0) * lo, Relation::Ge, -ln4),
        s("band_power_n_minus_1_upper", (nf - 1.0) * lo, Relation::Le, -1.0),
        s("band_power_n_lower", nf * lo, Relation::Ge, -ln8),
        s("band_power_n_upper", nf * lo, Relation::Le, -1.0),
        s("kappa_chain_e11", 11.0 * nf * hi, Relation::Le, -11.0),
        s("kappa_chain_upper_band", 11.0 * nf * lq, Relation::Le, 11.0 * nf * hi),
        s("kappa_chain_lower_band", 11.0 * nf * lo, Relation::Le, 11.0 * nf * lq),
        s("kappa_chain_eight", -LN_EIGHT_POW_11, Relation::Le, 11.0 * nf * lo),
        q_context(
            BoundReport::log("kappa_x_q_pow", ax.ln() + 11.0 * nf * lq, Relation::Gt, 0.0),
            q,
        )
        .with("n", nf)
        .with("x_abs", ax),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_lookup() {
        assert_eq!(band_of(0.6), Some((3, false)));
        assert_eq!(band_of(0.75), Some((4, true)));
        assert_eq!(band_of(0.76), Some((5, false)));
        assert_eq!(band_of(0.4), None);
        assert!(in_n_band(2.0 / 3.0, 3) && in_n_band(2.0 / 3.0, 4));
    }

    #[test]
    fn t_series_limit() {
        let (t, _) = lemma_t_series(0.0);
        assert_eq!(t, 1.0);
        let (t, _) = lemma_t_series(0.9);
        assert!(t < PI2_OVER_6 && t > 1.0);
    }
}
