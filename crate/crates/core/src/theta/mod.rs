//! Evaluation of the partial theta function `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`,
//! its companions `Θ*` (bilateral sum / triple product) and `G` (the negative
//! index tail, so that `θ = Θ* − G`), and the scalar auxiliaries used by the
//! bound checks.
//!
//! Every evaluator returns an [`EvalResult`] in log-polar form together with a
//! bound on the truncation error, so values near `|x| ~ 8^11` with `|q|` close
//! to one stay representable.

mod aux;
mod extended;
mod jet;
mod logc;
mod product;
mod qparam;
mod series;

use serde::{Deserialize, Serialize};

pub use aux::{
    compute_c0, kappa, kappa_detailed, mu, mu_log, tau, KappaResult, RingSpec, C0, C1, C2, EIGHT_POW_11,
    LN_EIGHT_POW_11, PI2_OVER_6,
};
pub use extended::{compute_c0_extended, euler_product_s_extended, tau_extended, theta_real_extended, DoubleDouble};
pub use jet::{g_jet, product_jet, theta_direct_jet, theta_jet, Jet};
pub use logc::{reduce_angle, LogComplex};
pub use product::{
    euler_product_s, eval_thetastar_product, factor_one_plus_q_over_x, factor_one_plus_xq, q_product, r_product,
    u_product, LogProduct,
};
pub use qparam::{cpowi, QParameter};
pub use series::{
    eval_g, eval_theta, eval_theta_auto, eval_theta_dx, eval_theta_via_identity, eval_thetastar_series, EvalPath,
};

/// A function value with a certified bound on the omitted series terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: LogComplex,
    /// Natural log of an absolute bound on the truncation error; `-inf` when exact.
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Set when the result is a difference of two nearly equal quantities.
    #[serde(default)]
    pub precision_loss: bool,
}

impl EvalResult {
    pub fn tail(&self) -> f64 {
        self.tail_bound.exp()
    }

    pub fn abs(&self) -> f64 {
        self.value.abs()
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        self.value.to_complex()
    }
}

/// `ln(e^a + e^b)` without overflow.
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
