use num_complex::Complex64;

use super::lemmas::{q_context, require_band, PRODUCT_TOL};
use super::report::{BoundReport, Relation};
use crate::error::{Error, Result};
use crate::theta::{
    eval_g, eval_thetastar_product, factor_one_plus_xq, kappa_detailed, mu, q_product, r_product, u_product,
    QParameter, C0, C1, C2, EIGHT_POW_11, LN_EIGHT_POW_11, PI2_OVER_6,
};

struct Point<'a> {
    q: &'a QParameter,
    x: Complex64,
    ax: f64,
    lax: f64,
    lq: f64,
    kappa: u64,
}

impl<'a> Point<'a> {
    fn new(q: &'a QParameter, x: Complex64) -> Result<Self> {
        let k = kappa_detailed(q, x)?;
        Ok(Self {
            q,
            x,
            ax: x.norm(),
            lax: x.norm().ln(),
            lq: q.ln_modulus(),
            kappa: k.value,
        })
    }

    /// `ln |1 + x q^m|`.
    fn lf(&self, m: u64) -> f64 {
        factor_one_plus_xq(self.q.value(), self.x, m).norm().ln()
    }

    /// Floating-point allowance on `ln |x − μ_m|`, dominated by the rounding
    /// of `x` and `μ_m` themselves.
    fn dist_slack(&self, m: u64) -> f64 {
        let mm = mu(self.q, m as i64);
        let d = (self.x - mm).norm();
        8.0 * f64::EPSILON * (self.ax + mm.norm()) / d + 1e-14
    }

    fn ctx(&self, r: BoundReport) -> BoundReport {
        q_context(r, self.q)
            .with("x_re", self.x.re)
            .with("x_im", self.x.im)
            .with("x_abs", self.ax)
            .with("kappa", self.kappa as f64)
    }

    /// `ln(1 − |x|^{−s})`.
    fn l1m(&self, s: f64) -> f64 {
        (-(-s * self.lax).exp()).ln_1p()
    }

    fn require_external(&self, radius: f64, around: &[u64]) -> Result<()> {
        for &i in around {
            if i == 0 {
                continue;
            }
            let m = mu(self.q, i as i64);
            let d = (self.x - m).norm();
            let slack = 8.0 * f64::EPSILON * (self.ax + m.norm());
            if d < radius - slack {
                return Err(Error::Hypothesis(format!(
                    "x = {} lies inside the disk of radius {radius} about μ_{i}",
                    self.x
                )));
            }
        }
        Ok(())
    }

    fn neighbours(&self, extra: Option<i64>) -> Vec<u64> {
        let mut v: Vec<u64> = (self.kappa.saturating_sub(3)..=self.kappa + 2).collect();
        if let Some(s) = extra {
            for i in (s - 2)..=(s + 2) {
                if i >= 1 {
                    v.push(i as u64);
                }
            }
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    fn thetastar_lower(&self) -> Result<f64> {
        let t = eval_thetastar_product(self.q, self.x, PRODUCT_TOL)?;
        let l = t.value.log_modulus;
        Ok(l + (-(t.tail_bound - l).exp()).ln_1p())
    }

    fn g_upper(&self) -> Result<f64> {
        let g = eval_g(self.q, self.x, 1e-16)?;
        Ok(g.abs() + g.tail())
    }
}

/// Minimum of `margin` over a nonempty range, returning the report with the
/// smallest margin.
fn worst(reports: impl Iterator<Item = BoundReport>) -> Option<BoundReport> {
    reports.min_by(|a, b| (a.margin + a.slack).total_cmp(&(b.margin + b.slack)))
}

/// The factor estimates around `κ` and `κ−1` and for `ν = 1..4`, with `n`
/// the disk parameter (`2` in the half-q case). Returns the reports and the
/// log-modulus of `(1+xq^κ)(1+xq^{κ−1})U_1^4`.
fn part_c(p: &Point, n: f64, prefix: &str) -> (Vec<BoundReport>, f64) {
    let k = p.kappa;
    let name = |s: &str| format!("{prefix}{s}");
    let ln2n = (2.0 * n).ln();
    let half = p.l1m(0.5);
    let mut out = Vec::new();
    let f_k = p.lf(k);
    let f_k1 = p.lf(k - 1);
    out.push(
        p.ctx(
            BoundReport::log(&name("c_factor_kappa"), f_k, Relation::Ge, k as f64 * p.lq - ln2n)
                .with_slack(p.dist_slack(k)),
        ),
    );
    out.push(
        p.ctx(
            BoundReport::log(
                &name("c_factor_kappa_minus_1"),
                f_k1,
                Relation::Ge,
                (k - 1) as f64 * p.lq - ln2n,
            )
            .with_slack(p.dist_slack(k - 1)),
        ),
    );
    let f: Vec<f64> = (1..=4).map(|nu| p.lf(nu)).collect();
    for nu in 1..=4u64 {
        out.push(
            p.ctx(BoundReport::log(
                &name("c_factor_small"),
                f[nu as usize - 1],
                Relation::Gt,
                p.lax + nu as f64 * p.lq + half,
            ))
            .with("nu", nu as f64),
        );
    }
    let t1 = f_k + f[0] + f[1];
    let b1 = k as f64 * p.lq + 2.0 * p.lax + 3.0 * p.lq + 2.0 * half - ln2n;
    out.push(p.ctx(BoundReport::log(&name("c_triple_kappa"), t1, Relation::Ge, b1).with_slack(p.dist_slack(k))));
    out.push(p.ctx(
        BoundReport::log(&name("c_triple_kappa_bound"), b1, Relation::Ge, 2.0 * half - ln2n).with_rounding_slack(),
    ));
    let t2 = f_k1 + f[2] + f[3];
    let b2 = (k - 1) as f64 * p.lq + 2.0 * p.lax + 7.0 * p.lq + 2.0 * half - ln2n;
    out.push(
        p.ctx(BoundReport::log(&name("c_triple_kappa_minus_1"), t2, Relation::Ge, b2).with_slack(p.dist_slack(k - 1))),
    );
    out.push(
        p.ctx(
            BoundReport::log(
                &name("c_triple_kappa_minus_1_bound"),
                b2,
                Relation::Ge,
                2.0 * half - ln2n,
            )
            .with_rounding_slack(),
        ),
    );
    let star = t1 + t2;
    out.push(
        p.ctx(
            BoundReport::log(&name("f_star"), star, Relation::Ge, 4.0 * half - (4.0 * n * n).ln())
                .with_slack(p.dist_slack(k) + p.dist_slack(k - 1)),
        ),
    );
    (out, star)
}

/// Replays the factor-by-factor estimates that give `|Θ*| > 1` at a point
/// `x` on `C(μ_s, 1/(2n))`: the bounds around `κ`, the partial products of
/// `U_1^{κ−2}`, the large factors, and the three closing inequalities where
/// `P₁` and `P₂` are the `4n` and next `n` smallest factors of `U_5^{κ−3−4n}`.
pub fn verify_prop_steps(q: &QParameter, s: i64, n: u32, x_on_circle: Complex64) -> Result<Vec<BoundReport>> {
    require_band(q, n)?;
    if s < 1 {
        return Err(Error::Hypothesis(format!("need s >= 1, got {s}")));
    }
    let nf = n as f64;
    let radius = 0.5 / nf;
    let ms = mu(q, s);
    let off = ((x_on_circle - ms).norm() - radius).abs();
    if off > 1e-9 * radius + 8.0 * f64::EPSILON * (x_on_circle.norm() + ms.norm()) {
        return Err(Error::Hypothesis(format!(
            "x is not on C(μ_{s}, {radius}): off by {off:e}"
        )));
    }
    let ln_mu = -(s as f64) * q.ln_modulus();
    if ln_mu < LN_EIGHT_POW_11 + 1.0 && ms.norm() - radius <= EIGHT_POW_11 {
        return Err(Error::Hypothesis(format!(
            "C(μ_{s}, {radius}) is not contained in |x| > 8^11"
        )));
    }
    let p = Point::new(q, x_on_circle)?;
    let k = p.kappa;
    if k <= 11 * n as u64 {
        return Err(Error::Hypothesis(format!("κ = {k} <= 11n = {}", 11 * n)));
    }
    p.require_external(radius, &p.neighbours(Some(s)))?;
    let ctx = |r: BoundReport| p.ctx(r).with("n", nf).with("s", s as f64);
    let mut out = vec![ctx(BoundReport::log(
        "precondition_x_ge_q_pow_1_minus_kappa",
        p.lax,
        Relation::Ge,
        (1.0 - k as f64) * p.lq,
    )
    .with_rounding_slack())];

    let (c, star) = part_c(&p, nf, "");
    out.extend(c.into_iter().map(ctx));

    // factors of U_1^{κ−2} against 1 − |q|^{κ−1−m}, and the partial products
    let lf_low: Vec<f64> = (1..=k - 2).map(|m| p.lf(m)).collect();
    let d_floor = worst((1..=k - 2).map(|m| {
        let rhs = (-((k - 1 - m) as f64 * p.lq).exp()).ln_1p();
        BoundReport::log("d_factor_floor", lf_low[m as usize - 1], Relation::Ge, rhs)
            .with_rounding_slack()
            .with("m", m as f64)
    }))
    .expect("κ − 2 >= 1");
    out.push(ctx(d_floor));
    let d_floor_product = PI2_OVER_6 * (1.0 - nf);
    let mut acc = 0.0;
    let mut partial = Vec::with_capacity(k as usize - 2);
    for l in 0..=(k - 3) {
        acc += lf_low[(k - 2 - l) as usize - 1];
        partial.push(
            BoundReport::log("d_partial_product", acc, Relation::Ge, d_floor_product)
                .with_rounding_slack()
                .with("l", l as f64),
        );
    }
    out.push(ctx(worst(partial.into_iter()).expect("κ − 3 >= 0")));

    // the large factors below κ − 2 − 4n
    let split = k - 2 - 4 * n as u64;
    let ln8pow = PI2_OVER_6 * 8f64.ln();
    out.push(ctx(BoundReport::log(
        "e_largest_factor",
        p.lax + split as f64 * p.lq,
        Relation::Gt,
        -4.0 * nf * p.lq,
    )));
    out.push(ctx(BoundReport::log("e_q_power", -4.0 * nf * p.lq, Relation::Gt, 4.0)));
    out.push(ctx(BoundReport::log(
        "e_e4_vs_8pow",
        4.0,
        Relation::Gt,
        ln8pow.exp().ln_1p(),
    )));
    out.push(ctx(BoundReport::log("e_8pow_below_e35", ln8pow, Relation::Lt, 3.5)));
    if let Some(r) =
        worst((1..split).map(|m| {
            BoundReport::log("e_factor_floor", lf_low[m as usize - 1], Relation::Gt, ln8pow).with("m", m as f64)
        }))
    {
        out.push(ctx(r));
    }

    // closing inequalities
    let last = k - 3 - 4 * n as u64;
    let count = last.saturating_sub(4);
    out.push(ctx(BoundReport::new(
        "f_factor_count",
        count as f64,
        Relation::Ge,
        5.0 * nf,
    )));
    if count < 5 * n as u64 {
        return Ok(out);
    }
    let mut pool: Vec<f64> = (5..=last).map(|m| lf_low[m as usize - 1]).collect();
    pool.sort_by(|a, b| a.total_cmp(b));
    let p1: f64 = pool[..4 * n as usize].iter().sum();
    let p2: f64 = pool[4 * n as usize..5 * n as usize].iter().sum();
    let qp = q_product(q, PRODUCT_TOL)?;
    let rp = r_product(q, p.x, PRODUCT_TOL)?;
    let up = u_product(q, p.x, k + 1, None, PRODUCT_TOL)?;
    let u_mid: f64 = (split..=k - 2).map(|m| lf_low[m as usize - 1]).sum();
    let lhs2 = p1 + qp.log_abs_lower() + rp.log_abs_lower() + up.log_abs_lower() + u_mid;
    let bound2 = 4.0 * nf * ln8pow + p.l1m(1.0) + 4.0 * PI2_OVER_6 * (1.0 - nf);
    out.push(ctx(
        BoundReport::log("f_double_star", lhs2, Relation::Ge, bound2).with_rounding_slack()
    ));
    out.push(ctx(BoundReport::log("f_double_star_bound", bound2, Relation::Gt, 0.0)));
    let tail4 = 4.0 * p.l1m(0.5) - (4.0 * nf * nf).ln();
    out.push(ctx(BoundReport::log("f_triple_star", p2 + tail4, Relation::Gt, 0.0)));
    out.push(ctx(BoundReport::log(
        "f_triple_star_bound",
        nf * ln8pow + tail4,
        Relation::Gt,
        0.0,
    )));
    let lower = lhs2 + p2 + star;
    out.push(ctx(BoundReport::log(
        "f_decomposition_above_one",
        lower,
        Relation::Gt,
        0.0,
    )));
    out.push(ctx(BoundReport::log(
        "f_thetastar_above_one",
        p.thetastar_lower()?,
        Relation::Gt,
        0.0,
    )));
    out.push(ctx(BoundReport::new(
        "f_g_below",
        p.g_upper()?,
        Relation::Le,
        1.0 / (EIGHT_POW_11 - 1.0),
    )
    .with_rounding_slack()));
    Ok(out)
}

/// `ln(c₁c₂c₁/16 · (1−8^{−5.5})^4 · Π_{s=5}^{13}(8^11 c₀^s − 1))`.
pub fn half_q_chain_constant() -> f64 {
    let mut l = 2.0 * C1.ln() + C2.ln() - 16f64.ln() + 4.0 * (-(8f64.powf(-5.5))).ln_1p();
    for s in 5..=13 {
        l += (EIGHT_POW_11 * C0.powi(s) - 1.0).ln();
    }
    l
}

/// The chain for `c₀ <= |q| <= 1/2` and `|x| > 8^11` outside the disks
/// `D(μ_i, 1/4)`.
pub fn verify_half_q_case(q: &QParameter, x: Complex64) -> Result<Vec<BoundReport>> {
    let r = q.modulus();
    if !(C0..=0.5 + 1e-15).contains(&r) {
        return Err(Error::Hypothesis(format!("|q| = {r} is outside [c0, 1/2]")));
    }
    if !(x.norm().ln() > LN_EIGHT_POW_11) {
        return Err(Error::Hypothesis(format!("need |x| > 8^11, got {}", x.norm())));
    }
    let p = Point::new(q, x)?;
    p.require_external(0.25, &p.neighbours(None))?;
    let k = p.kappa;
    let mut out = vec![p.ctx(BoundReport::new("halfq_kappa", k as f64, Relation::Ge, 15.0))];
    if k < 15 {
        return Ok(out);
    }
    let qp = q_product(q, PRODUCT_TOL)?;
    let rp = r_product(q, x, PRODUCT_TOL)?;
    let up = u_product(q, x, k + 1, None, PRODUCT_TOL)?;
    let s = |r: BoundReport| p.ctx(r.with_rounding_slack());
    out.push(s(BoundReport::log(
        "halfq_q_ge_c1",
        qp.log_abs_lower(),
        Relation::Ge,
        C1.ln(),
    )));
    out.push(s(BoundReport::log(
        "halfq_r_ge_c2",
        rp.log_abs_lower(),
        Relation::Ge,
        C2.ln(),
    )));
    out.push(p.ctx(BoundReport::log(
        "halfq_r_chain",
        p.l1m(1.0) + C1.ln(),
        Relation::Gt,
        C2.ln(),
    )));
    out.push(s(BoundReport::log(
        "halfq_u_tail_ge_c1",
        up.log_abs_lower(),
        Relation::Ge,
        C1.ln(),
    )));
    let (c, star) = part_c(&p, 2.0, "halfq_");
    out.extend(c);
    let mut u_mid = 0.0;
    for m in 5..=13u64 {
        let f = p.lf(m);
        u_mid += f;
        out.push(
            s(BoundReport::log(
                "halfq_factor_floor",
                f,
                Relation::Ge,
                (EIGHT_POW_11 * C0.powi(m as i32) - 1.0).ln(),
            ))
            .with("s", m as f64),
        );
    }
    let rest: Vec<BoundReport> = (14..=k - 2)
        .map(|m| {
            let f = p.lf(m);
            u_mid += f;
            BoundReport::log("halfq_factor_rest", f, Relation::Ge, 0.0)
                .with_rounding_slack()
                .with("m", m as f64)
        })
        .collect();
    if let Some(r) = worst(rest.into_iter()) {
        out.push(p.ctx(r));
    }
    let star_const = 4.0 * (-(8f64.powf(-5.5))).ln_1p() - 16f64.ln();
    // 4 ln((1 − a)/(1 − b)) with a = |x|^{−1/2} < b = 8^{−5.5}, from b − a directly
    let b = 8f64.powf(-5.5);
    let b_minus_a = -b * (-0.5 * (p.lax - LN_EIGHT_POW_11)).exp_m1();
    out.push(
        p.ctx(
            BoundReport::log(
                "halfq_star_constant",
                4.0 * p.l1m(0.5) - 16f64.ln(),
                Relation::Gt,
                star_const,
            )
            .with_stable_margin(4.0 * (b_minus_a / (1.0 - b)).ln_1p(), 1e-12),
        ),
    );
    let chain = half_q_chain_constant();
    out.push(p.ctx(BoundReport::log("halfq_chain_constant", chain, Relation::Gt, 0.0)));
    let lower = qp.log_abs_lower() + rp.log_abs_lower() + up.log_abs_lower() + star + u_mid;
    out.push(s(BoundReport::log(
        "halfq_decomposition_ge_chain",
        lower,
        Relation::Ge,
        chain,
    )));
    out.push(p.ctx(BoundReport::log(
        "halfq_thetastar_above_one",
        p.thetastar_lower()?,
        Relation::Gt,
        0.0,
    )));
    out.push(s(BoundReport::new(
        "halfq_g_below",
        p.g_upper()?,
        Relation::Le,
        1.0 / (EIGHT_POW_11 - 1.0),
    )));
    Ok(out)
}
