use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Direction of a checked inequality `lhs ∘ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        })
    }
}

/// One numerically replayed inequality.
///
/// `margin` is `lhs − rhs` for `>`/`>=` and `rhs − lhs` for `<`/`<=`, so a
/// positive margin always means the inequality holds with room to spare.
/// Strict relations pass iff `margin > 0`; non-strict ones pass iff
/// `margin >= −slack`, where `slack` covers the floating-point error of the
/// two sides (several inequalities are attained with equality).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub margin: f64,
    pub slack: f64,
    /// `lhs` and `rhs` are natural logarithms of the compared quantities.
    pub log_scale: bool,
    pub pass: bool,
    pub context: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(name: &str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let mut r = Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            margin: 0.0,
            slack: 0.0,
            log_scale: false,
            pass: false,
            context: BTreeMap::new(),
        };
        r.evaluate();
        r
    }

    /// Same as [`BoundReport::new`] but comparing `ln lhs` with `ln rhs`.
    pub fn log(name: &str, ln_lhs: f64, relation: Relation, ln_rhs: f64) -> Self {
        let mut r = Self::new(name, ln_lhs, relation, ln_rhs);
        r.log_scale = true;
        r
    }

    fn evaluate(&mut self) {
        self.margin = match self.relation {
            Relation::Gt | Relation::Ge => self.lhs - self.rhs,
            Relation::Lt | Relation::Le => self.rhs - self.lhs,
        };
        self.pass = if self.margin.is_nan() {
            false
        } else if self.relation.is_strict() {
            self.margin > 0.0
        } else {
            self.margin >= -self.slack
        };
    }

    /// Replaces the margin with one evaluated in a cancellation-free form.
    /// The report keeps the directly computed margin in its context and
    /// fails unless the two agree to `agree` (absolute).
    pub fn with_stable_margin(mut self, margin: f64, agree: f64) -> Self {
        let direct = self.margin;
        self.context.insert("direct_margin".into(), direct);
        self.margin = margin;
        self.pass = if self.relation.is_strict() {
            margin > 0.0
        } else {
            margin >= -self.slack
        };
        self.pass &= (direct - margin).abs() <= agree;
        self
    }

    /// Sets the rounding allowance for a non-strict comparison.
    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack.max(0.0);
        self.evaluate();
        self
    }

    /// Allowance of a few ulps of the larger side.
    pub fn with_rounding_slack(self) -> Self {
        let s = 16.0 * f64::EPSILON * self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.with_slack(s)
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }

    pub fn with_all(mut self, ctx: &BTreeMap<String, f64>) -> Self {
        for (k, v) in ctx {
            self.context.entry(k.clone()).or_insert(*v);
        }
        self
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.6e} {} {:.6e} (margin {:.3e}{})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.lhs,
            self.relation,
            self.rhs,
            self.margin,
            if self.log_scale { ", log" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_needs_positive_margin() {
        assert!(!BoundReport::new("t", 1.0, Relation::Gt, 1.0).pass);
        assert!(BoundReport::new("t", 1.0, Relation::Ge, 1.0).pass);
        assert!(BoundReport::new("t", 0.5, Relation::Lt, 1.0).pass);
        assert!(!BoundReport::new("t", f64::NAN, Relation::Le, 1.0).pass);
    }

    #[test]
    fn slack_only_affects_non_strict() {
        let r = BoundReport::new("t", 1.0 - 1e-16, Relation::Ge, 1.0).with_rounding_slack();
        assert!(r.pass);
        let r = BoundReport::new("t", 1.0 - 1e-16, Relation::Gt, 1.0).with_rounding_slack();
        assert!(!r.pass);
    }

    #[test]
    fn serializes_relation_symbol() {
        let r = BoundReport::new("t", 2.0, Relation::Gt, 1.0).with("q", 0.5);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\">\""));
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
