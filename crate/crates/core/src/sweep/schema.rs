use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::DiskCertificate;
use crate::zeros::DoubleZeroRecord;

pub const DZ_SCHEMA: &str = "dz/1";
pub const CERT_SCHEMA: &str = "cert/1";

/// One double zero per JSONL line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DzLine {
    pub schema: String,
    pub q_re: f64,
    pub q_im: f64,
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub res_theta: f64,
    pub res_dtheta: f64,
    pub jac_cond: f64,
    pub bound_ok: bool,
}

impl DzLine {
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.zeta_re, self.zeta_im)
    }
}

impl From<&DoubleZeroRecord> for DzLine {
    fn from(r: &DoubleZeroRecord) -> Self {
        Self {
            schema: DZ_SCHEMA.into(),
            q_re: r.q.re(),
            q_im: r.q.im(),
            zeta_re: r.zeta.re,
            zeta_im: r.zeta.im,
            res_theta: r.residual_theta,
            res_dtheta: r.residual_dtheta,
            jac_cond: r.jac_cond,
            bound_ok: r.bound_check(),
        }
    }
}

/// One disk certificate per JSONL line. `min_thetastar` and `max_G` hold
/// natural logarithms of the moduli and are `null` when `in_X` is false.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertLine {
    pub schema: String,
    pub q_re: f64,
    pub q_im: f64,
    pub s: i64,
    pub n_or_regime: String,
    pub radius: f64,
    pub samples: usize,
    pub min_thetastar: Option<f64>,
    #[serde(rename = "max_G")]
    pub max_g: Option<f64>,
    pub winding: Option<i64>,
    #[serde(rename = "in_X")]
    pub in_x: bool,
    pub pass: bool,
}

impl From<&DiskCertificate> for CertLine {
    fn from(c: &DiskCertificate) -> Self {
        Self {
            schema: CERT_SCHEMA.into(),
            q_re: c.q.re(),
            q_im: c.q.im(),
            s: c.s,
            n_or_regime: c.regime.to_string(),
            radius: c.radius,
            samples: c.samples,
            min_thetastar: c.min_log_thetastar,
            max_g: c.max_log_g,
            winding: c.winding_theta,
            in_x: c.in_x,
            pass: c.pass,
        }
    }
}
