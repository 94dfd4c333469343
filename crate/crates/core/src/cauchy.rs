//! The radial Cauchy problem
//!
//! ```text
//! φ'(r) = ( r^{k−n} e^{−nμr} ∫₀^r k/C(n−1,k−1) · e^{nμs} s^{n−1} (1+μs)^{1−k} f^k(φ(s)) ds )^{1/k},
//! φ(0)  = a,
//! ```
//!
//! solved three ways: an Euler break line (slope frozen at the left end of each
//! cell), a Picard fixed-point iteration on a fixed grid, and an adaptive break
//! line that hunts for the finite radius where `φ → ∞`.
//!
//! The running integral is accumulated by product integration: on each cell the
//! smooth factor `k/C(n−1,k−1) · e^{nμs} (1+μs)^{1−k} f^k(φ)` is interpolated
//! linearly and integrated exactly against the weight `s^{n−1}`. On the first
//! cell this reproduces the leading-order behaviour `f^k(a) h^n / n` exactly,
//! which is what fixes `φ''(0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::radial::{dphi_from_integral, smooth_factor, ProblemParams};
use crate::symmetric::binom_f64;

/// Discrete solution of the Cauchy problem on a grid starting at `r = 0`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    params: ProblemParams,
    f: Nonlinearity,
    grid: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    volterra: Vec<f64>,
    defect: Option<Vec<f64>>,
    truncated: bool,
}

impl RadialProfile {
    /// Assembles a profile from raw columns. `defect`, when present, has one
    /// entry per cell.
    pub fn from_parts(
        params: ProblemParams,
        f: Nonlinearity,
        grid: Vec<f64>,
        phi: Vec<f64>,
        dphi: Vec<f64>,
        volterra: Vec<f64>,
        defect: Option<Vec<f64>>,
    ) -> Result<Self> {
        let m = grid.len();
        if m == 0 || phi.len() != m || dphi.len() != m || volterra.len() != m {
            return Err(Error::Domain(
                "profile columns must be non-empty and of equal length".into(),
            ));
        }
        if grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("grid must start at 0 and increase strictly".into()));
        }
        if let Some(d) = &defect {
            if d.len() + 1 != m {
                return Err(Error::Domain("defect needs one entry per cell".into()));
            }
        }
        Ok(Self {
            params,
            f,
            grid,
            phi,
            dphi,
            volterra,
            defect,
            truncated: false,
        })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.f
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi(&self) -> &[f64] {
        &self.dphi
    }

    pub fn volterra(&self) -> &[f64] {
        &self.volterra
    }

    pub fn defect(&self) -> Option<&[f64]> {
        self.defect.as_deref()
    }

    pub fn initial_value(&self) -> f64 {
        self.phi[0]
    }

    /// True when the march stopped early because the solution left the
    /// representable range.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn r_end(&self) -> f64 {
        *self.grid.last().expect("non-empty")
    }
}

/// Weights `(w0, w1)` with `∫_{s0}^{s0+h} s^{n−1} g(s) ds ≈ w0 g(s0) + w1 g(s0+h)`,
/// exact when `g` is linear. Expanded in powers of `h` so every term is
/// non-negative.
pub(crate) fn product_weights(s0: f64, h: f64, n: usize) -> (f64, f64) {
    let deg = n - 1;
    let (mut w0, mut w1) = (0.0, 0.0);
    let mut h_pow = 1.0;
    for j in 0..=deg {
        let term = binom_f64(deg, j) * s0.powi((deg - j) as i32) * h_pow;
        let (jf1, jf2) = ((j + 1) as f64, (j + 2) as f64);
        w0 += term / (jf1 * jf2);
        w1 += term / jf2;
        h_pow *= h;
    }
    (w0 * h, w1 * h)
}

pub(crate) fn uniform_grid(r_end: f64, h: f64) -> Vec<f64> {
    let cells = ((r_end / h) - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..cells).map(|i| i as f64 * h).collect();
    grid.push(r_end);
    grid
}

fn check_run(p: &ProblemParams, r_end: f64, h: f64) -> Result<()> {
    p.require_admissible()?;
    if !(r_end > 0.0 && r_end.is_finite()) {
        return Err(Error::Domain(format!("r_end must be positive, got {r_end}")));
    }
    if !(h > 0.0 && h <= r_end) {
        return Err(Error::Domain(format!("step h must satisfy 0 < h <= r_end, got {h}")));
    }
    Ok(())
}

/// Left-endpoint march state shared by the break-line solvers.
struct BreakLine<'a> {
    p: &'a ProblemParams,
    f: &'a Nonlinearity,
    r: f64,
    psi: f64,
    integral: f64,
    slope: f64,
    g: f64,
}

enum Step {
    Accepted,
    /// The step produced a non-finite or capped value; state is unchanged.
    Escaped,
}

impl<'a> BreakLine<'a> {
    fn start(p: &'a ProblemParams, f: &'a Nonlinearity, a: f64) -> Result<Self> {
        let g = smooth_factor(p, f, 0.0, a)?;
        Ok(Self {
            p,
            f,
            r: 0.0,
            psi: a,
            integral: 0.0,
            slope: 0.0,
            g,
        })
    }

    fn step(&mut self, h: f64, phi_cap: f64) -> Result<Step> {
        let psi_new = self.psi + self.slope * h;
        if !psi_new.is_finite() || psi_new > phi_cap {
            return Ok(Step::Escaped);
        }
        let r_new = self.r + h;
        let g_new = smooth_factor(self.p, self.f, r_new, psi_new)?;
        let (w0, w1) = product_weights(self.r, h, self.p.n);
        let integral = self.integral + w0 * self.g + w1 * g_new;
        let slope = dphi_from_integral(self.p, r_new, integral);
        if !(g_new.is_finite() && integral.is_finite() && slope.is_finite()) {
            return Ok(Step::Escaped);
        }
        self.r = r_new;
        self.psi = psi_new;
        self.integral = integral;
        self.slope = slope;
        self.g = g_new;
        Ok(Step::Accepted)
    }
}

#[derive(Default)]
struct Columns {
    grid: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    volterra: Vec<f64>,
}

impl Columns {
    fn push(&mut self, line: &BreakLine<'_>) {
        self.grid.push(line.r);
        self.phi.push(line.psi);
        self.dphi.push(line.slope);
        self.volterra.push(line.integral);
    }

    fn into_profile(self, p: &ProblemParams, f: &Nonlinearity, truncated: bool) -> Result<RadialProfile> {
        let mut profile =
            RadialProfile::from_parts(*p, f.clone(), self.grid, self.phi, self.dphi, self.volterra, None)?;
        profile.truncated = truncated;
        if profile.len() >= 2 {
            profile.defect = Some(cell_defects(&profile)?);
        }
        Ok(profile)
    }
}

/// Euler break line on `{0, h, 2h, …, r_end}` (the last cell may be shorter).
///
/// On each cell the line follows the slope `F(r_{i−1})` computed from the
/// integral accumulated so far. If the solution overflows before `r_end` the
/// profile stops at the last finite node and is flagged as truncated.
pub fn euler_break_line(p: &ProblemParams, f: &Nonlinearity, a: f64, r_end: f64, h: f64) -> Result<RadialProfile> {
    check_run(p, r_end, h)?;
    let grid = uniform_grid(r_end, h);
    let mut line = BreakLine::start(p, f, a)?;
    let mut cols = Columns::default();
    cols.push(&line);
    for w in grid.windows(2) {
        match line.step(w[1] - w[0], f64::INFINITY)? {
            Step::Accepted => {
                // land exactly on the grid node
                line.r = w[1];
                cols.push(&line);
            }
            Step::Escaped => return cols.into_profile(p, f, true),
        }
    }
    cols.into_profile(p, f, false)
}

/// One Picard sweep: from nodal values of `φ` compute the accumulated
/// integral, `φ'`, and the next iterate.
fn picard_sweep(
    p: &ProblemParams,
    f: &Nonlinearity,
    grid: &[f64],
    phi: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let m = grid.len();
    let mut volterra = vec![0.0; m];
    let mut dphi = vec![0.0; m];
    let mut next = vec![phi[0]; m];
    let mut g_prev = smooth_factor(p, f, grid[0], phi[0])?;
    for i in 1..m {
        let h = grid[i] - grid[i - 1];
        let g = smooth_factor(p, f, grid[i], phi[i])?;
        let (w0, w1) = product_weights(grid[i - 1], h, p.n);
        volterra[i] = volterra[i - 1] + w0 * g_prev + w1 * g;
        dphi[i] = dphi_from_integral(p, grid[i], volterra[i]);
        next[i] = next[i - 1] + 0.5 * h * (dphi[i - 1] + dphi[i]);
        g_prev = g;
    }
    Ok((volterra, dphi, next))
}

/// Picard iteration `φ ← a + ∫₀^r F(s, φ) ds` on a fixed grid, starting from
/// `φ ≡ a`, until the largest nodal change drops below `tol`.
pub fn picard_solve(
    p: &ProblemParams,
    f: &Nonlinearity,
    a: f64,
    r_end: f64,
    h: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RadialProfile> {
    check_run(p, r_end, h)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let grid = uniform_grid(r_end, h);
    let mut phi = vec![a; grid.len()];
    let mut distance = f64::INFINITY;
    for _ in 0..max_iter {
        let (volterra, dphi, next) = picard_sweep(p, f, &grid, &phi)?;
        distance = next
            .iter()
            .zip(&phi)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, |acc: f64, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) });
        if !distance.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence {
                iterations: max_iter,
                distance: f64::INFINITY,
            });
        }
        phi = next;
        if distance < tol {
            let mut profile = RadialProfile::from_parts(*p, f.clone(), grid, phi, dphi, volterra, None)?;
            profile.defect = Some(cell_defects(&profile)?);
            return Ok(profile);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        distance,
    })
}

/// Per-cell slope defect `|Δφ/Δr − F(midpoint, φ)|`, with `F` rebuilt from the
/// stored accumulation at the left node plus the half-cell integral.
pub(crate) fn cell_defects(profile: &RadialProfile) -> Result<Vec<f64>> {
    let p = &profile.params;
    let f = &profile.f;
    let (grid, phi) = (&profile.grid, &profile.phi);
    let mut out = Vec::with_capacity(grid.len().saturating_sub(1));
    for i in 1..grid.len() {
        let h = grid[i] - grid[i - 1];
        let slope = (phi[i] - phi[i - 1]) / h;
        let g0 = smooth_factor(p, f, grid[i - 1], phi[i - 1])?;
        let g1 = smooth_factor(p, f, grid[i], phi[i])?;
        let (w0, w1) = product_weights(grid[i - 1], 0.5 * h, p.n);
        let mid_integral = profile.volterra[i - 1] + w0 * g0 + w1 * 0.5 * (g0 + g1);
        let mid_slope = dphi_from_integral(p, grid[i - 1] + 0.5 * h, mid_integral);
        out.push((slope - mid_slope).abs());
    }
    Ok(out)
}

/// Largest per-cell slope defect of the profile.
pub fn epsilon_defect(profile: &RadialProfile) -> Result<f64> {
    if profile.len() < 2 {
        return Err(Error::Domain("defect needs at least two nodes".into()));
    }
    Ok(cell_defects(profile)?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BlowupStatus {
    /// `r_max` reached with `φ <= phi_cap`.
    Global {
        r_max: f64,
    },
    FiniteBlowup {
        r_estimate: f64,
        bracket: [f64; 2],
    },
    /// `k >= 2`, `μ < 0`: the tangential eigenvalue changes sign at `r_fail = −1/μ`.
    AdmissibilityFailure {
        r_fail: f64,
    },
}

/// Raw result of one adaptive march.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeBracket {
    /// Last radius with a finite `φ <= phi_cap`.
    pub lo: f64,
    /// First radius where `φ` exceeded the cap, overflowed, or the step collapsed.
    pub hi: f64,
    pub h0: f64,
}

#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub status: BlowupStatus,
    /// Profile of the coarse march (absent for admissibility failures).
    pub profile: Option<RadialProfile>,
    /// Brackets of the coarse and refined marches when blow-up was found.
    pub raw_brackets: Vec<EscapeBracket>,
}

/// Minimum step as a fraction of `h0` before the march declares blow-up.
const STEP_FLOOR: f64 = 1.0 / (1u64 << 40) as f64;

fn adaptive_march(
    p: &ProblemParams,
    f: &Nonlinearity,
    a: f64,
    r_max: f64,
    phi_cap: f64,
    h0: f64,
) -> Result<(RadialProfile, Option<EscapeBracket>)> {
    let jump_limit = f64::max(1.0, 0.01 * phi_cap);
    let mut line = BreakLine::start(p, f, a)?;
    let mut cols = Columns::default();
    cols.push(&line);
    let mut h = h0;
    while line.r < r_max {
        let step = h.min(r_max - line.r);
        if line.slope * step > jump_limit {
            h *= 0.5;
            if h < h0 * STEP_FLOOR {
                let bracket = EscapeBracket {
                    lo: line.r,
                    hi: line.r + h,
                    h0,
                };
                return Ok((cols.into_profile(p, f, true)?, Some(bracket)));
            }
            continue;
        }
        let last_step = step >= r_max - line.r;
        match line.step(step, phi_cap)? {
            Step::Accepted => {
                if last_step {
                    line.r = r_max;
                }
                cols.push(&line);
            }
            Step::Escaped => {
                let bracket = EscapeBracket {
                    lo: line.r,
                    hi: line.r + step,
                    h0,
                };
                return Ok((cols.into_profile(p, f, true)?, Some(bracket)));
            }
        }
    }
    Ok((cols.into_profile(p, f, false)?, None))
}

/// Marches the break line out to `r_max`, classifying the solution as global
/// or blowing up at a finite radius.
///
/// Steps are halved whenever a single step would raise `φ` by more than
/// `max(1, phi_cap/100)`. Blow-up is declared when `φ` exceeds `phi_cap`,
/// overflows, or the step collapses below `h0·2⁻⁴⁰`. The escape radius is then
/// recomputed at `h0/2` and the two first-order estimates are combined by
/// Richardson extrapolation; the reported bracket is centred on that estimate
/// with half-width equal to the extrapolation correction plus the fine
/// march's own resolution.
pub fn detect_blowup(
    p: &ProblemParams,
    f: &Nonlinearity,
    a: f64,
    r_max: f64,
    phi_cap: f64,
    h0: f64,
) -> Result<BlowupReport> {
    if !p.admissible_regime() {
        return Ok(BlowupReport {
            status: BlowupStatus::AdmissibilityFailure { r_fail: -1.0 / p.mu },
            profile: None,
            raw_brackets: Vec::new(),
        });
    }
    if !(r_max > 0.0 && h0 > 0.0 && h0 <= r_max) {
        return Err(Error::Domain(format!(
            "need 0 < h0 <= r_max, got h0 = {h0}, r_max = {r_max}"
        )));
    }
    if !(phi_cap > a) {
        return Err(Error::Domain(format!("phi_cap = {phi_cap} must exceed a = {a}")));
    }
    let (profile, coarse) = adaptive_march(p, f, a, r_max, phi_cap, h0)?;
    let Some(coarse) = coarse else {
        return Ok(BlowupReport {
            status: BlowupStatus::Global { r_max },
            profile: Some(profile),
            raw_brackets: Vec::new(),
        });
    };
    let (_, fine) = adaptive_march(p, f, a, r_max, phi_cap, 0.5 * h0)?;
    let status = match fine {
        Some(fine) => {
            let estimate = 2.0 * fine.hi - coarse.hi;
            let mut half_width = (fine.hi - coarse.hi).abs() + (fine.hi - fine.lo);
            if !(half_width > 0.0) {
                half_width = 0.5 * h0;
            }
            BlowupStatus::FiniteBlowup {
                r_estimate: estimate,
                bracket: [estimate - half_width, estimate + half_width],
            }
        }
        // the refined march survived to r_max: keep the coarse bracket
        None => BlowupStatus::FiniteBlowup {
            r_estimate: coarse.hi,
            bracket: [coarse.lo, coarse.hi],
        },
    };
    let raw_brackets = std::iter::once(coarse).chain(fine).collect();
    Ok(BlowupReport {
        status,
        profile: Some(profile),
        raw_brackets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    EulerBreakLine,
    Picard { tol: f64, max_iter: usize },
}

impl Method {
    pub fn solve(&self, p: &ProblemParams, f: &Nonlinearity, a: f64, r_end: f64, h: f64) -> Result<RadialProfile> {
        match *self {
            Method::EulerBreakLine => euler_break_line(p, f, a, r_end, h),
            Method::Picard { tol, max_iter } => picard_solve(p, f, a, r_end, h, tol, max_iter),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Order from each consecutive pair of errors.
    pub pair_orders: Vec<f64>,
    /// Mean of `pair_orders`.
    pub order: f64,
}

/// Empirical convergence order over a geometric step sequence.
///
/// With a `reference` solution the error of each run is the largest nodal
/// deviation from it; without one, successive differences of `φ(r_end)` are
/// used. Errors must decrease strictly.
pub fn refinement_order(
    method: Method,
    p: &ProblemParams,
    f: &Nonlinearity,
    a: f64,
    r_end: f64,
    steps: &[f64],
    reference: Option<&dyn Fn(f64) -> f64>,
) -> Result<RefinementStudy> {
    if steps.len() < 3 {
        return Err(Error::Refinement("need at least three step sizes".into()));
    }
    let ratio = steps[0] / steps[1];
    if !(ratio > 1.0) || steps.windows(2).any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::Refinement("step sizes must decrease geometrically".into()));
    }
    let profiles = steps
        .iter()
        .map(|&h| method.solve(p, f, a, r_end, h))
        .collect::<Result<Vec<_>>>()?;
    if profiles.iter().any(RadialProfile::truncated) {
        return Err(Error::Refinement("solution escaped before r_end".into()));
    }
    let (errors, step_pairs): (Vec<f64>, Vec<f64>) = match reference {
        Some(exact) => (
            profiles
                .iter()
                .map(|pr| {
                    pr.grid()
                        .iter()
                        .zip(pr.phi())
                        .map(|(&r, &v)| (v - exact(r)).abs())
                        .fold(0.0, f64::max)
                })
                .collect(),
            steps.to_vec(),
        ),
        None => (
            profiles
                .windows(2)
                .map(|w| (w[0].phi().last().unwrap() - w[1].phi().last().unwrap()).abs())
                .collect(),
            steps[..steps.len() - 1].to_vec(),
        ),
    };
    if errors.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::Refinement(format!("order undefined: errors {errors:?}")));
    }
    if errors.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Refinement(format!(
            "error sequence is not decreasing: {errors:?}"
        )));
    }
    let pair_orders: Vec<f64> = errors
        .windows(2)
        .zip(step_pairs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let order = pair_orders.iter().sum::<f64>() / pair_orders.len() as f64;
    Ok(RefinementStudy {
        steps: steps.to_vec(),
        errors,
        pair_orders,
        order,
    })
}
