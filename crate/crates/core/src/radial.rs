//! Radial reduction of `S_k(D²u + μ|Du|I)` for `u(x) = φ(|x|)`.
//!
//! For radial `u` the augmented Hessian is a rank-one perturbation of a
//! multiple of the identity, so its spectrum is
//! `(φ'' + μφ', b, …, b)` with `b = (1 + μr) φ' / r`, collapsing to
//! `(φ''(0), …, φ''(0))` at the origin. Writing the equation in divergence
//! form with the weight `e^{χ(r)}`, `χ(r) = nμr + (n−k) ln r`, and integrating
//! once turns it into a Volterra-type Cauchy problem for `φ'`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::symmetric::{binom_f64, mu_zero, EigenSpectrum};

/// Space dimension `n`, Hessian order `k` and gradient coefficient `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: usize,
    pub k: usize,
    pub mu: f64,
}

impl ProblemParams {
    pub fn new(n: usize, k: usize, mu: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension n must be >= 2, got {n}")));
        }
        if k == 0 || k > n {
            return Err(Error::Domain(format!("Hessian order k must be in 1..={n}, got {k}")));
        }
        if !mu.is_finite() {
            return Err(Error::Domain(format!("mu must be finite, got {mu}")));
        }
        Ok(Self { n, k, mu })
    }

    /// `k = 1` with any `μ`, or `k >= 2` with `μ >= 0`. Outside this range the
    /// tangential eigenvalue turns negative for `r > −1/μ` and no entire
    /// admissible radial solution exists.
    pub fn admissible_regime(&self) -> bool {
        self.k == 1 || self.mu >= 0.0
    }

    pub fn mu_zero(&self) -> f64 {
        mu_zero(self.n, self.k).expect("validated in constructor")
    }

    /// The range where the Keller–Osserman condition is a sharp criterion.
    pub fn ko_equiv_regime(&self) -> bool {
        self.admissible_regime() && self.mu < self.mu_zero()
    }

    pub(crate) fn require_admissible(&self) -> Result<()> {
        if self.admissible_regime() {
            Ok(())
        } else {
            Err(Error::Admissibility { k: self.k, mu: self.mu })
        }
    }

    /// `k / C(n−1, k−1)`, the constant in front of the Volterra integrand.
    pub(crate) fn integrand_constant(&self) -> f64 {
        self.k as f64 / binom_f64(self.n - 1, self.k - 1)
    }
}

fn check_origin(r: f64, dphi: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    if r == 0.0 && dphi != 0.0 {
        return Err(Error::Contract(format!(
            "a C² radial profile has φ'(0) = 0, got {dphi}"
        )));
    }
    Ok(())
}

/// Tangential eigenvalue `(1 + μr) φ' / r`.
fn tangential(p: &ProblemParams, r: f64, dphi: f64) -> f64 {
    (1.0 + p.mu * r) / r * dphi
}

pub fn radial_spectrum(p: &ProblemParams, r: f64, dphi: f64, ddphi: f64) -> Result<EigenSpectrum> {
    check_origin(r, dphi)?;
    if r == 0.0 {
        return EigenSpectrum::new(vec![ddphi; p.n]);
    }
    let mut values = Vec::with_capacity(p.n);
    values.push(ddphi + p.mu * dphi);
    values.extend(std::iter::repeat_n(tangential(p, r, dphi), p.n - 1));
    EigenSpectrum::new(values)
}

/// `S_k` of the radial spectrum from the two-term closed form
/// `C(n−1,k−1)(φ''+μφ') b^{k−1} + C(n−1,k) b^k`, and `C(n,k) φ''(0)^k` at `r = 0`.
pub fn sk_radial(p: &ProblemParams, r: f64, dphi: f64, ddphi: f64) -> Result<f64> {
    check_origin(r, dphi)?;
    let k = p.k as i32;
    if r == 0.0 {
        return Ok(binom_f64(p.n, p.k) * ddphi.powi(k));
    }
    let b = tangential(p, r, dphi);
    Ok(binom_f64(p.n - 1, p.k - 1) * (ddphi + p.mu * dphi) * b.powi(k - 1) + binom_f64(p.n - 1, p.k) * b.powi(k))
}

/// `χ(r) = nμr + (n−k) ln r`.
pub fn chi(p: &ProblemParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("chi needs r > 0, got {r}")));
    }
    Ok(p.n as f64 * p.mu * r + (p.n - p.k) as f64 * r.ln())
}

/// The factor `g(s) = k/C(n−1,k−1) · e^{nμs} (1+μs)^{1−k} f^k(φ)` that multiplies
/// the weight `s^{n−1}` in the Volterra integrand. Smooth on `[0, ∞)` in the
/// admissible regime.
pub(crate) fn smooth_factor(p: &ProblemParams, f: &Nonlinearity, s: f64, phi_s: f64) -> Result<f64> {
    let ln_f = f.ln_eval(phi_s)?;
    if ln_f == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let denom = if p.k == 1 {
        1.0
    } else {
        (1.0 + p.mu * s).powi(p.k as i32 - 1)
    };
    if denom == 0.0 {
        return Err(Error::Singularity { s });
    }
    let log_part = p.n as f64 * p.mu * s + p.k as f64 * ln_f;
    Ok(p.integrand_constant() * log_part.exp() / denom)
}

/// `k/C(n−1,k−1) · e^{nμs} s^{n−1} / (1+μs)^{k−1} · f^k(φ(s))`.
pub fn volterra_integrand(p: &ProblemParams, f: &Nonlinearity, s: f64, phi_s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("integrand needs s > 0, got {s}")));
    }
    let ln_f = f.ln_eval(phi_s)?;
    if ln_f == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let denom = if p.k == 1 {
        1.0
    } else {
        (1.0 + p.mu * s).powi(p.k as i32 - 1)
    };
    if denom == 0.0 {
        return Err(Error::Singularity { s });
    }
    let log_part = p.n as f64 * p.mu * s + (p.n - 1) as f64 * s.ln() + p.k as f64 * ln_f;
    Ok(p.integrand_constant() * log_part.exp() / denom)
}

/// `φ'(r) = (r^{k−n} e^{−nμr} I)^{1/k}` for an accumulated integral `I >= 0`.
pub fn dphi_from_integral(p: &ProblemParams, r: f64, integral: f64) -> f64 {
    if integral <= 0.0 {
        return 0.0;
    }
    let log_inner = (p.k as f64 - p.n as f64) * r.ln() - p.n as f64 * p.mu * r + integral.ln();
    (log_inner / p.k as f64).exp()
}

/// `S_k(radial spectrum) − f^k(φ)`; zero along exact solutions.
pub fn ode_residual(p: &ProblemParams, f: &Nonlinearity, r: f64, phi: f64, dphi: f64, ddphi: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("residual needs r > 0, got {r}")));
    }
    Ok(sk_radial(p, r, dphi, ddphi)? - f.eval_pow_k(phi, p.k)?)
}

/// Solves the radial equation `S_k = f^k(φ)` for `φ''` given `φ` and `φ' > 0`.
pub fn ddphi_from_ode(p: &ProblemParams, f: &Nonlinearity, r: f64, phi: f64, dphi: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "second derivative recovery needs r > 0, got {r}"
        )));
    }
    let b = tangential(p, r, dphi);
    let k = p.k as i32;
    let lead = binom_f64(p.n - 1, p.k - 1) * b.powi(k - 1);
    if lead == 0.0 {
        return Err(Error::Domain(format!(
            "cannot recover φ'' at r = {r}: tangential eigenvalue vanishes"
        )));
    }
    let rest = binom_f64(p.n - 1, p.k) * b.powi(k);
    Ok((f.eval_pow_k(phi, p.k)? - rest) / lead - p.mu * dphi)
}

/// `φ''(0) = f(a) / C(n,k)^{1/k}` for the Cauchy solution started at `a`.
pub fn ddphi_at_zero(p: &ProblemParams, f: &Nonlinearity, a: f64) -> Result<f64> {
    Ok(f.eval(a)? / binom_f64(p.n, p.k).powf(1.0 / p.k as f64))
}
