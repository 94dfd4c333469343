//! Pointwise checks that the Gaussian `u = e^{A|x|²}` is an admissible
//! subsolution of `S_k^{1/k}(D²u + μ|Du|I) >= u^α`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::ProblemParams;
use crate::symmetric::{binom_f64, elem_sym, in_gamma_k, EigenSpectrum};

/// Slack used when comparing margins against zero. Thresholds are attained
/// with equality at isolated radii and rounding must not flip those.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// `u(x) = e^{A|x|²}` with `A > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianCandidate {
    a: f64,
}

impl GaussianCandidate {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("Gaussian exponent A must be positive, got {a}")));
        }
        Ok(Self { a })
    }

    pub fn exponent(&self) -> f64 {
        self.a
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
    }
    Ok(())
}

/// Spectrum divided by `e^{Ar²}`. Never overflows for moderate `r`.
fn scaled_spectrum(p: &ProblemParams, a: f64, r: f64) -> Result<EigenSpectrum> {
    let t = 1.0 + p.mu * r;
    let mut values = Vec::with_capacity(p.n);
    values.push(4.0 * a * a * (r * r + t / (2.0 * a)));
    values.extend(std::iter::repeat_n(2.0 * a * t, p.n - 1));
    EigenSpectrum::new(values)
}

/// Eigenvalues of `D²u + μ|Du|I` for the Gaussian at radius `r`:
/// `4A²e^{Ar²}(r² + (1+μr)/(2A))` once, then `2Ae^{Ar²}(1+μr)` `n−1` times.
pub fn gaussian_spectrum(p: &ProblemParams, a: f64, r: f64) -> Result<EigenSpectrum> {
    GaussianCandidate::new(a)?;
    check_radius(r)?;
    let scale = (a * r * r).exp();
    let scaled = scaled_spectrum(p, a, r)?;
    EigenSpectrum::new(scaled.values().iter().map(|v| v * scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub r: f64,
    pub pass: bool,
    /// `ln S_k(λ) − kα·Ar²`, i.e. the log of `S_k(λ) / u^{kα}`.
    /// `None` when `S_k(λ) <= 0`.
    pub margin: Option<f64>,
    pub gamma_k_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsolutionReport {
    pub params: ProblemParams,
    pub a: f64,
    pub alpha: f64,
    pub all_pass: bool,
    pub first_failure: Option<f64>,
    pub points: Vec<RadiusCheck>,
}

/// Checks `λ ∈ Γ_k` and `S_k(λ) >= u^{kα}` at every radius.
///
/// Both sides are compared in the log domain after factoring out `e^{kAr²}`,
/// so large radii do not overflow. A radius passes when the cone test holds
/// and the margin is at least `−MARGIN_TOLERANCE`.
pub fn verify_subsolution(p: &ProblemParams, a: f64, alpha: f64, radii: &[f64]) -> Result<SubsolutionReport> {
    GaussianCandidate::new(a)?;
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    let kf = p.k as f64;
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        check_radius(r)?;
        let spectrum = scaled_spectrum(p, a, r)?;
        let gamma_k_ok = in_gamma_k(&spectrum, p.k)?;
        let sk = elem_sym(&spectrum, p.k)?;
        let margin = (sk > 0.0).then(|| sk.ln() + kf * (1.0 - alpha) * a * r * r);
        let pass = gamma_k_ok && margin.is_some_and(|m| m >= -MARGIN_TOLERANCE);
        points.push(RadiusCheck {
            r,
            pass,
            margin,
            gamma_k_ok,
        });
    }
    let first_failure = points.iter().find(|c| !c.pass).map(|c| c.r);
    Ok(SubsolutionReport {
        params: *p,
        a,
        alpha,
        all_pass: first_failure.is_none(),
        first_failure,
        points,
    })
}

/// 512 radii on `[0, r_max]`: 256 evenly spaced (including both ends) and
/// 256 geometric from `1e-4·r_max` upward. When `μ < 0` the minimiser
/// `r* = −μn/(4A)` of the Cauchy–Young slack is added if it lies in range.
pub fn default_radii(p: &ProblemParams, a: f64, r_max: f64) -> Result<Vec<f64>> {
    GaussianCandidate::new(a)?;
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
    }
    let mut radii: Vec<f64> = (0..256).map(|j| r_max * j as f64 / 255.0).collect();
    radii.extend((0..256).map(|j| r_max * 10f64.powf(-4.0 + 4.0 * j as f64 / 256.0)));
    if p.mu < 0.0 {
        let r_star = -p.mu * p.n as f64 / (4.0 * a);
        if r_star <= r_max {
            radii.push(r_star);
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    Ok(radii)
}

/// `½ C(n,k)^{−1/k}`, the smallest `A` for which the Gaussian works when `μ >= 0`.
pub fn example_4_1_threshold(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(0.5 * binom_f64(n, k).powf(-1.0 / k as f64))
}

/// `1/(2n) + nμ²/8`, sufficient for `k = 1` and `μ < 0`.
pub fn example_4_2_threshold(n: usize, mu: f64) -> f64 {
    let nf = n as f64;
    1.0 / (2.0 * nf) + nf * mu * mu / 8.0
}

/// `4A²r² + 2An + 2Anμr − 1`, nonnegative for all `r` once
/// `A >= example_4_2_threshold(n, μ)`.
pub fn cauchy_young_slack(n: usize, mu: f64, a: f64, r: f64) -> f64 {
    let nf = n as f64;
    4.0 * a * a * r * r + 2.0 * a * nf + 2.0 * a * nf * mu * r - 1.0
}
