//! Radial subsolutions of `S_k^{1/k}(D²u + μ|Du|I) = f(u)` in `ℝⁿ`.
//!
//! The crate evaluates the k-Hessian operator on radial profiles, integrates
//! the reduced Cauchy problem, detects finite-radius blow-up, classifies the
//! generalized Keller–Osserman condition and checks closed-form Gaussian
//! subsolutions.
//!
//! ```
//! use hessian_radial::{picard_solve, Nonlinearity, ProblemParams};
//!
//! let p = ProblemParams::new(2, 1, 0.0).unwrap();
//! let f: Nonlinearity = "const:1".parse().unwrap();
//! let profile = picard_solve(&p, &f, 0.0, 2.0, 1e-2, 1e-12, 100).unwrap();
//! // φ(r) = r²/4
//! assert!((profile.phi().last().unwrap() - 1.0).abs() < 1e-10);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod error;
pub mod io;
pub mod keller_osserman;
pub mod nonlinearity;
pub mod radial;
pub mod subsolution;
pub mod symmetric;

pub use cauchy::{
    detect_blowup, epsilon_defect, euler_break_line, picard_solve, refinement_order, BlowupReport, BlowupStatus,
    EscapeBracket, Method, RadialProfile, RefinementStudy,
};
pub use error::{Error, Result};
pub use keller_osserman::{
    existence_verdict, ko_classify, ko_classify_analytic, ko_classify_numeric, ko_classify_numeric_with, Existence,
    ExistenceReport, KoClass, KoEvidence, KoMethod, KoVerdict, NumericOptions,
};
pub use nonlinearity::{AuditReport, Family, Nonlinearity, SourceFlags};
pub use radial::{
    chi, ddphi_at_zero, ddphi_from_ode, dphi_from_integral, ode_residual, radial_spectrum, sk_radial,
    volterra_integrand, ProblemParams,
};
pub use subsolution::{
    cauchy_young_slack, default_radii, example_4_1_threshold, example_4_2_threshold, gaussian_spectrum,
    verify_subsolution, GaussianCandidate, RadiusCheck, SubsolutionReport,
};
pub use symmetric::{binom, elem_sym, in_gamma_k, mu_zero, EigenSpectrum};
