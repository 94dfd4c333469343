//! The source term `f` of `S_k^{1/k}(D²u + μ|Du|I) = f(u)`.
//!
//! Three built-in families cover the worked applications: a positive constant,
//! `e^{αt}`, and the degenerate power `t^q` cut off to zero on `t <= 0`.
//! Arbitrary sources are supported through [`Nonlinearity::custom`]; their
//! positivity and monotonicity are declared by the caller, not proved.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Callback type for custom sources. Must be reentrant.
pub type SourceFn = dyn Fn(f64) -> std::result::Result<f64, String> + Send + Sync;

#[derive(Clone)]
pub enum Family {
    Constant(f64),
    Exponential(f64),
    PowerCutoff(f64),
    Custom(Arc<SourceFn>),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant(c) => write!(f, "Constant({c})"),
            Family::Exponential(a) => write!(f, "Exponential({a})"),
            Family::PowerCutoff(q) => write!(f, "PowerCutoff({q})"),
            Family::Custom(_) => write!(f, "Custom(<callback>)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceFlags {
    pub positive_everywhere: bool,
    pub degenerate_at_nonpositive: bool,
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    family: Family,
    flags: SourceFlags,
}

impl Nonlinearity {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("constant source needs c > 0, got {c}")));
        }
        Ok(Self {
            family: Family::Constant(c),
            flags: SourceFlags {
                positive_everywhere: true,
                degenerate_at_nonpositive: false,
            },
        })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Domain(format!(
                "exponential source needs alpha >= 0, got {alpha}"
            )));
        }
        Ok(Self {
            family: Family::Exponential(alpha),
            flags: SourceFlags {
                positive_everywhere: true,
                degenerate_at_nonpositive: false,
            },
        })
    }

    pub fn power_cutoff(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::Domain(format!("power source needs q >= 0, got {q}")));
        }
        Ok(Self {
            family: Family::PowerCutoff(q),
            flags: SourceFlags {
                positive_everywhere: false,
                degenerate_at_nonpositive: true,
            },
        })
    }

    /// Wrap a caller-supplied source together with the properties the caller
    /// asserts for it.
    pub fn custom<F>(callback: F, flags: SourceFlags) -> Self
    where
        F: Fn(f64) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self {
            family: Family::Custom(Arc::new(callback)),
            flags,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn flags(&self) -> SourceFlags {
        self.flags
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.family, Family::Custom(_))
    }

    /// Returns a copy scaled by `c > 0`. Built-in families stay built-in only
    /// for `Constant`; the others become custom callbacks carrying the same flags.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
        }
        if let Family::Constant(v) = self.family {
            return Self::constant(c * v);
        }
        let inner = self.clone();
        Ok(Self::custom(
            move |t| inner.eval(t).map(|v| c * v).map_err(|e| e.to_string()),
            self.flags,
        ))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.family {
            Family::Constant(c) => Ok(*c),
            Family::Exponential(alpha) => Ok((alpha * t).exp()),
            Family::PowerCutoff(q) => Ok(if t > 0.0 { t.powf(*q) } else { 0.0 }),
            Family::Custom(cb) => cb(t).map_err(|message| Error::Evaluation { t, message }),
        }
    }

    /// `ln f(t)`, `-inf` where `f(t) = 0`.
    pub fn ln_eval(&self, t: f64) -> Result<f64> {
        match &self.family {
            Family::Constant(c) => Ok(c.ln()),
            Family::Exponential(alpha) => Ok(alpha * t),
            Family::PowerCutoff(q) => Ok(if t > 0.0 { q * t.ln() } else { f64::NEG_INFINITY }),
            Family::Custom(_) => {
                let v = self.eval(t)?;
                if v < 0.0 {
                    return Err(Error::Evaluation {
                        t,
                        message: format!("negative value {v}"),
                    });
                }
                Ok(v.ln())
            }
        }
    }

    /// `f(t)^k`, evaluated as `exp(k ln f(t))` so that overflow is deferred
    /// as long as possible.
    pub fn eval_pow_k(&self, t: f64, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Domain("power k must be at least 1".into()));
        }
        let ln_f = self.ln_eval(t)?;
        if ln_f == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok((k as f64 * ln_f).exp())
    }

    /// Samples `f` on a uniform grid and reports the first positivity or
    /// monotonicity violation. Advisory only.
    pub fn audit_monotone_positive(&self, t_lo: f64, t_hi: f64, samples: usize) -> Result<AuditReport> {
        if !(t_lo < t_hi) || samples < 2 {
            return Err(Error::Domain(format!(
                "audit needs t_lo < t_hi and samples >= 2, got [{t_lo}, {t_hi}] with {samples}"
            )));
        }
        let step = (t_hi - t_lo) / (samples - 1) as f64;
        let mut report = AuditReport {
            passed: true,
            positivity_violation: None,
            monotonicity_violation: None,
            degenerate_region_seen: false,
        };
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..samples {
            let t = if i + 1 == samples { t_hi } else { t_lo + step * i as f64 };
            let v = self.eval(t)?;
            if !(v > 0.0) {
                if self.flags.degenerate_at_nonpositive && t <= 0.0 && v == 0.0 {
                    report.degenerate_region_seen = true;
                } else if report.positivity_violation.is_none() {
                    report.positivity_violation = Some((t, v));
                }
            }
            if let Some((pt, pv)) = prev {
                if v < pv && report.monotonicity_violation.is_none() {
                    report.monotonicity_violation = Some(((pt, pv), (t, v)));
                }
            }
            prev = Some((t, v));
        }
        report.passed = report.positivity_violation.is_none() && report.monotonicity_violation.is_none();
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub passed: bool,
    /// First sample `(t, f(t))` with `f(t) <= 0` outside a declared degenerate region.
    pub positivity_violation: Option<(f64, f64)>,
    /// First adjacent pair `((t1, f1), (t2, f2))` with `f2 < f1`.
    pub monotonicity_violation: Option<((f64, f64), (f64, f64))>,
    pub degenerate_region_seen: bool,
}

/// Family syntax shared with the command line: `const:<c>`, `exp:<alpha>`, `pow:<q>`.
impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected <family>:<value>, got {s:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numeric parameter in {s:?}")))?;
        match name.trim() {
            "const" => Self::constant(value),
            "exp" => Self::exponential(value),
            "pow" => Self::power_cutoff(value),
            other => Err(Error::Parse(format!("unknown family {other:?} (const, exp, pow)"))),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Constant(c) => write!(f, "const:{c}"),
            Family::Exponential(a) => write!(f, "exp:{a}"),
            Family::PowerCutoff(q) => write!(f, "pow:{q}"),
            Family::Custom(_) => write!(f, "custom"),
        }
    }
}
