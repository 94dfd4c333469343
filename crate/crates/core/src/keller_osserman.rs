//! Generalized Keller–Osserman test: does
//! `∫^{∞} (∫₀^τ f^k(t) dt)^{−1/(k+1)} dτ` diverge?
//!
//! Divergence means entire admissible subsolutions exist; convergence rules
//! them out whenever `μ < μ₀`. Built-in families are decided in closed form.
//! Anything else goes through a numerical tail fit of the outer integrand.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::{Family, Nonlinearity};
use crate::radial::ProblemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KoClass {
    /// The integral diverges: the condition holds.
    Diverges,
    /// The integral converges: the condition fails.
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KoMethod {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoEvidence {
    pub method: KoMethod,
    /// Estimated (numeric) or exact (analytic, power-law tails) decay
    /// exponent `p` of `g(τ) ~ τ^{−p}`.
    pub tail_exponent_estimate: Option<f64>,
    /// `∫ g dτ` over `tau_range` (numeric path only).
    pub partial_integral: Option<f64>,
    pub tau_range: Option<[f64; 2]>,
    pub exponential_decay: bool,
    /// RMS residual of the log-log tail fit (numeric path only).
    pub fit_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoVerdict {
    pub classification: KoClass,
    pub evidence: KoEvidence,
}

/// Closed-form classification for the built-in families: constants always
/// satisfy the condition, `e^{αt}` only for `α = 0`, and the cut-off power
/// `t^q` exactly when `(kq+1)/(k+1) <= 1`, i.e. `q <= 1`.
pub fn ko_classify_analytic(f: &Nonlinearity, k: usize) -> Result<KoVerdict> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let kf = k as f64;
    let (classification, exponent, exponential_decay) = match f.family() {
        Family::Constant(_) => (KoClass::Diverges, Some(1.0 / (kf + 1.0)), false),
        Family::Exponential(alpha) if *alpha == 0.0 => (KoClass::Diverges, Some(1.0 / (kf + 1.0)), false),
        Family::Exponential(_) => (KoClass::Converges, None, true),
        Family::PowerCutoff(q) => {
            let p = (kf * q + 1.0) / (kf + 1.0);
            let class = if p <= 1.0 {
                KoClass::Diverges
            } else {
                KoClass::Converges
            };
            (class, Some(p), false)
        }
        Family::Custom(_) => return Err(Error::Unsupported("custom sources need the numeric classifier".into())),
    };
    Ok(KoVerdict {
        classification,
        evidence: KoEvidence {
            method: KoMethod::Analytic,
            tail_exponent_estimate: exponent,
            partial_integral: None,
            tau_range: None,
            exponential_decay,
            fit_residual: None,
        },
    })
}

/// Tuning of the numeric classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Half-width of the undecided band around `p = 1`.
    pub margin: f64,
    /// Largest RMS residual of the power-law fit that still counts as a fit.
    pub max_fit_residual: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            margin: 0.05,
            max_fit_residual: 0.05,
        }
    }
}

// 8-point Gauss–Legendre on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    if m == f64::INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ∫_lo^hi f^k(t) dt` by Gauss–Legendre in the log domain.
fn log_cell_integral(f: &Nonlinearity, k: usize, lo: f64, hi: f64) -> Result<f64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = f64::NEG_INFINITY;
    for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        for t in [mid - half * x, mid + half * x] {
            let term = (w * half).ln() + k as f64 * f.ln_eval(t)?;
            acc = log_add_exp(acc, term);
        }
    }
    Ok(acc)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Numerical classification from the decay of `g(τ) = (∫₀^τ f^k)^{−1/(k+1)}`
/// on a geometric grid over `[tau_lo, tau_hi]`.
///
/// The inner integral is accumulated in the log domain, so exponential
/// growth of `f^k` never overflows. Over the top decade `ln g` is fitted both
/// against `ln τ` (power law) and against `τ` (exponential). A better
/// exponential fit means convergence; otherwise the power-law exponent is
/// compared against `1 ± margin` and the band in between is left undecided.
pub fn ko_classify_numeric_with(
    f: &Nonlinearity,
    k: usize,
    tau_lo: f64,
    tau_hi: f64,
    nodes: usize,
    opts: NumericOptions,
) -> Result<KoVerdict> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if !(tau_lo > 0.0 && tau_lo < tau_hi && tau_hi.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < tau_lo < tau_hi, got [{tau_lo}, {tau_hi}]"
        )));
    }
    if nodes < 100 {
        return Err(Error::Domain(format!("need at least 100 nodes, got {nodes}")));
    }

    // ∫₀^{tau_lo} on dyadic cells shrinking toward 0
    let mut log_inner = f64::NEG_INFINITY;
    let mut hi = tau_lo;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        log_inner = log_add_exp(log_inner, log_cell_integral(f, k, lo, hi)?);
        hi = lo;
    }
    log_inner = log_add_exp(log_inner, log_cell_integral(f, k, 0.0, hi)?);

    let ratio = (tau_hi / tau_lo).ln() / (nodes - 1) as f64;
    let taus: Vec<f64> = (0..nodes).map(|j| tau_lo * (ratio * j as f64).exp()).collect();
    let mut log_g = Vec::with_capacity(nodes);
    log_g.push(-log_inner / (k as f64 + 1.0));
    for w in taus.windows(2) {
        log_inner = log_add_exp(log_inner, log_cell_integral(f, k, w[0], w[1])?);
        if log_inner == f64::INFINITY {
            // f itself overflowed: growth faster than any power
            return Ok(KoVerdict {
                classification: KoClass::Converges,
                evidence: KoEvidence {
                    method: KoMethod::Numeric,
                    tail_exponent_estimate: None,
                    partial_integral: None,
                    tau_range: Some([tau_lo, w[0]]),
                    exponential_decay: true,
                    fit_residual: None,
                },
            });
        }
        log_g.push(-log_inner / (k as f64 + 1.0));
    }
    if log_g.contains(&f64::INFINITY) {
        return Err(Error::Domain("f vanishes identically on the sampled range".into()));
    }

    let partial_integral: f64 = taus
        .windows(2)
        .zip(log_g.windows(2))
        .map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0].exp() + g[1].exp()))
        .sum();

    let cutoff = if tau_hi / tau_lo >= 10.0 {
        tau_hi / 10.0
    } else {
        (tau_hi * tau_lo).sqrt()
    };
    let start = taus.iter().position(|&t| t >= cutoff).unwrap_or(0).min(nodes - 3);
    let xs_log: Vec<f64> = taus[start..].iter().map(|t| t.ln()).collect();
    let xs_lin = &taus[start..];
    let ys = &log_g[start..];
    let (power_slope, _, power_rms) = least_squares(&xs_log, ys);
    let (exp_slope, _, exp_rms) = least_squares(xs_lin, ys);
    let p_hat = -power_slope;

    let exponential_decay = exp_slope < 0.0 && exp_rms < power_rms;
    let classification = if exponential_decay {
        KoClass::Converges
    } else if power_rms > opts.max_fit_residual {
        KoClass::Inconclusive
    } else if p_hat <= 1.0 - opts.margin {
        KoClass::Diverges
    } else if p_hat >= 1.0 + opts.margin {
        KoClass::Converges
    } else {
        KoClass::Inconclusive
    };
    Ok(KoVerdict {
        classification,
        evidence: KoEvidence {
            method: KoMethod::Numeric,
            tail_exponent_estimate: Some(p_hat),
            partial_integral: Some(partial_integral),
            tau_range: Some([tau_lo, tau_hi]),
            exponential_decay,
            fit_residual: Some(power_rms),
        },
    })
}

/// [`ko_classify_numeric_with`] at the default margin of 0.05.
pub fn ko_classify_numeric(f: &Nonlinearity, k: usize, tau_lo: f64, tau_hi: f64, nodes: usize) -> Result<KoVerdict> {
    ko_classify_numeric_with(f, k, tau_lo, tau_hi, nodes, NumericOptions::default())
}

/// Analytic for built-in families, numeric on `[1, 1e6]` with 2000 nodes otherwise.
pub fn ko_classify(f: &Nonlinearity, k: usize) -> Result<KoVerdict> {
    if f.is_builtin() {
        ko_classify_analytic(f, k)
    } else {
        ko_classify_numeric(f, k, 1.0, 1e6, 2000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Existence {
    Exists,
    NotExists,
    /// Convergent integral with `μ >= μ₀`: no result is known.
    OutsideTheory,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceReport {
    pub verdict: Existence,
    /// True inside the range where the condition is necessary and sufficient
    /// (`μ < μ₀` and the admissible regime).
    pub sharp: bool,
    pub mu_zero: f64,
    /// The source vanishes on `t <= 0`; statements concern positive subsolutions.
    pub positive_subsolutions_only: bool,
    pub reason: String,
}

/// Combines a KO classification with the `(k, μ)` regime.
///
/// | regime                     | KO diverges | KO converges   |
/// |----------------------------|-------------|----------------|
/// | `k >= 2`, `μ < 0`          | NOT_EXISTS  | NOT_EXISTS     |
/// | admissible, `μ < μ₀`       | EXISTS (sharp) | NOT_EXISTS (sharp) |
/// | admissible, `μ >= μ₀`      | EXISTS      | OUTSIDE_THEORY |
pub fn existence_verdict(p: &ProblemParams, f: &Nonlinearity, ko: &KoVerdict) -> ExistenceReport {
    let mu_zero = p.mu_zero();
    let sharp = p.ko_equiv_regime();
    let positive_subsolutions_only = f.flags().degenerate_at_nonpositive;
    let (verdict, reason) = if !p.admissible_regime() {
        (
            Existence::NotExists,
            format!(
                "k = {} >= 2 with mu = {} < 0: no entire admissible subsolution",
                p.k, p.mu
            ),
        )
    } else {
        match ko.classification {
            KoClass::Diverges => (
                Existence::Exists,
                "Keller-Osserman integral diverges in the admissible regime".to_string(),
            ),
            KoClass::Converges if p.mu < mu_zero => (
                Existence::NotExists,
                format!("Keller-Osserman integral converges and mu = {} < mu0 = {mu_zero}", p.mu),
            ),
            KoClass::Converges => (
                Existence::OutsideTheory,
                format!(
                    "Keller-Osserman integral converges but mu = {} >= mu0 = {mu_zero}",
                    p.mu
                ),
            ),
            KoClass::Inconclusive => (
                Existence::Inconclusive,
                "Keller-Osserman classification is inconclusive".to_string(),
            ),
        }
    };
    ExistenceReport {
        verdict,
        sharp,
        mu_zero,
        positive_subsolutions_only,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::SourceFlags;

    fn exp(a: f64) -> Nonlinearity {
        Nonlinearity::exponential(a).unwrap()
    }

    fn pow(q: f64) -> Nonlinearity {
        Nonlinearity::power_cutoff(q).unwrap()
    }

    #[test]
    fn analytic_examples() {
        for k in 1..=4 {
            assert_eq!(
                ko_classify_analytic(&exp(0.0), k).unwrap().classification,
                KoClass::Diverges
            );
            assert_eq!(
                ko_classify_analytic(&Nonlinearity::constant(3.0).unwrap(), k)
                    .unwrap()
                    .classification,
                KoClass::Diverges
            );
        }
        assert_eq!(
            ko_classify_analytic(&exp(1.0), 1).unwrap().classification,
            KoClass::Converges
        );
        assert_eq!(
            ko_classify_analytic(&pow(1.0), 2).unwrap().classification,
            KoClass::Diverges
        );
        assert_eq!(
            ko_classify_analytic(&pow(1.5), 2).unwrap().classification,
            KoClass::Converges
        );
        let custom = Nonlinearity::custom(
            |t| Ok(1.0 + t.max(0.0)),
            SourceFlags {
                positive_everywhere: true,
                degenerate_at_nonpositive: false,
            },
        );
        assert!(matches!(ko_classify_analytic(&custom, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn numeric_examples() {
        let v = ko_classify_numeric(&pow(1.0), 2, 1.0, 1e6, 2000).unwrap();
        assert_eq!(v.classification, KoClass::Inconclusive);
        assert!((v.evidence.tail_exponent_estimate.unwrap() - 1.0).abs() < 1e-6);

        let v = ko_classify_numeric(&pow(0.5), 2, 1.0, 1e6, 2000).unwrap();
        assert_eq!(v.classification, KoClass::Diverges);
        assert!((v.evidence.tail_exponent_estimate.unwrap() - 2.0 / 3.0).abs() < 1e-6);

        let v = ko_classify_numeric(&exp(1.0), 1, 1.0, 1e6, 2000).unwrap();
        assert_eq!(v.classification, KoClass::Converges);
        assert!(v.evidence.exponential_decay);

        let v = ko_classify_numeric(&exp(0.5), 3, 1.0, 50.0, 200).unwrap();
        assert_eq!(v.classification, KoClass::Converges);
        assert!(v.evidence.exponential_decay);
    }

    #[test]
    fn numeric_rejects_bad_input() {
        assert!(ko_classify_numeric(&pow(1.0), 2, 0.0, 1e6, 2000).is_err());
        assert!(ko_classify_numeric(&pow(1.0), 2, 10.0, 1.0, 2000).is_err());
        assert!(ko_classify_numeric(&pow(1.0), 2, 1.0, 1e6, 10).is_err());
        let zero = Nonlinearity::custom(
            |_| Ok(0.0),
            SourceFlags {
                positive_everywhere: false,
                degenerate_at_nonpositive: false,
            },
        );
        assert!(matches!(
            ko_classify_numeric(&zero, 1, 1.0, 1e3, 200),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn numeric_handles_custom_sources() {
        // tails t^{-3/4} and t^{-7/3}
        let sqrt_like = Nonlinearity::custom(
            |t| Ok(1.0 + t.max(0.0).sqrt()),
            SourceFlags {
                positive_everywhere: true,
                degenerate_at_nonpositive: false,
            },
        );
        assert_eq!(ko_classify(&sqrt_like, 1).unwrap().classification, KoClass::Diverges);
        let cubic = Nonlinearity::custom(
            |t| Ok(1.0 + t.max(0.0).powi(3)),
            SourceFlags {
                positive_everywhere: true,
                degenerate_at_nonpositive: false,
            },
        );
        assert_eq!(ko_classify(&cubic, 2).unwrap().classification, KoClass::Converges);
    }

    #[test]
    fn scaling_never_changes_the_class() {
        for f in [exp(0.0), exp(1.0), pow(0.5), pow(1.5)] {
            for k in 1..=3 {
                let base = ko_classify_numeric(&f, k, 1.0, 1e5, 1000).unwrap().classification;
                for c in [0.01, 3.0, 100.0] {
                    let scaled = f.scaled(c).unwrap();
                    let v = ko_classify_numeric(&scaled, k, 1.0, 1e5, 1000).unwrap().classification;
                    assert_eq!(v, base, "{f} k={k} c={c}");
                }
            }
        }
    }

    #[test]
    fn verdict_examples() {
        let p = ProblemParams::new(2, 1, 0.2).unwrap();
        let f = exp(0.0);
        let r = existence_verdict(&p, &f, &ko_classify_analytic(&f, 1).unwrap());
        assert_eq!(r.verdict, Existence::Exists);
        assert!(r.sharp);

        let p = ProblemParams::new(3, 2, -0.5).unwrap();
        let f = pow(1.0);
        let r = existence_verdict(&p, &f, &ko_classify_analytic(&f, 2).unwrap());
        assert_eq!(r.verdict, Existence::NotExists);
        assert!(r.positive_subsolutions_only);

        let p = ProblemParams::new(2, 1, 1.0).unwrap();
        let f = exp(1.0);
        let r = existence_verdict(&p, &f, &ko_classify_analytic(&f, 1).unwrap());
        assert_eq!(r.verdict, Existence::OutsideTheory);
        assert!(!r.sharp);

        let v = ko_classify_numeric(&pow(1.0), 2, 1.0, 1e6, 2000).unwrap();
        let r = existence_verdict(&ProblemParams::new(3, 2, 0.1).unwrap(), &pow(1.0), &v);
        assert_eq!(r.verdict, Existence::Inconclusive);
    }
}
