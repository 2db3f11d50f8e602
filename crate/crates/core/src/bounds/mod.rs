//! Numerical replay of the inequalities behind the `8^11` bound: the
//! dominant-term argument for small `|q|`, lattice separation, the estimates
//! for `G` and the products `Q`, `R`, `U`, the factor-by-factor chain giving
//! `|Θ*| > 1` on circles about `μ_s`, and sampled Rouché certificates.

mod lemmas;
mod prop;
mod report;
mod rouche;
mod suites;

pub use lemmas::{
    band_of, c0_root, check_dominant_term, check_dominant_term_detail, in_n_band, lemma_t_series,
    verify_disk_separation, verify_g_bound, verify_kappa_chain, verify_kappa_lower, verify_lemma_l_bounds,
};
pub use prop::{half_q_chain_constant, verify_half_q_case, verify_prop_steps};
pub use report::{BoundReport, Relation};
pub use rouche::{certify_disk_rouche, circle_in_x, minimal_s, DiskCertificate, Regime};
pub use suites::{run_suite, Suite, SuiteOutcome, SuiteSummary};
