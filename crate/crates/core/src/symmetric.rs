//! Elementary symmetric polynomials, the Garding cone `Γ_k`, binomial
//! coefficients and the gradient threshold `μ₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues of `D²u + μ|Du|I` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigenSpectrum(Vec<f64>);

impl EigenSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("spectrum must be non-empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite eigenvalue {bad}")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for EigenSpectrum {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Coefficients `e_0..=e_p` of `∏(x + λ_i)` read from the top, i.e. the
/// elementary symmetric polynomials up to order `p`.
fn elem_sym_all(values: &[f64], p: usize) -> Vec<f64> {
    let mut e = vec![0.0; p + 1];
    e[0] = 1.0;
    for (i, &lambda) in values.iter().enumerate() {
        for j in (1..=p.min(i + 1)).rev() {
            e[j] += lambda * e[j - 1];
        }
    }
    e
}

/// `S_p(λ)`, the `p`-th elementary symmetric polynomial of the entries.
pub fn elem_sym(lambda: &EigenSpectrum, p: usize) -> Result<f64> {
    let n = lambda.len();
    if p == 0 || p > n {
        return Err(Error::Domain(format!("order p = {p} outside 1..={n}")));
    }
    Ok(elem_sym_all(lambda.values(), p)[p])
}

/// Strict membership in `Γ_k = {λ : S_p(λ) > 0, p = 1..k}`.
///
/// The comparison is against zero exactly; the cone is open.
pub fn in_gamma_k(lambda: &EigenSpectrum, k: usize) -> Result<bool> {
    let n = lambda.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cone order k = {k} outside 1..={n}")));
    }
    let e = elem_sym_all(lambda.values(), k);
    Ok(e[1..].iter().all(|&s| s > 0.0))
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binom(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Err(Error::Domain(format!("binomial C({n}, {k}) needs k <= n")));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return Err(Error::Domain(format!("binomial C({n}, {k}) overflows u64")));
        }
    }
    Ok(acc as u64)
}

/// `C(n, k)` as a float, for use inside formulas.
pub(crate) fn binom_f64(n: usize, k: usize) -> f64 {
    binom(n as u64, k as u64).map(|v| v as f64).unwrap_or(0.0)
}

/// The gradient threshold `μ₀ = sqrt(k / (n (k+1) C(n,k)^{1/k}))` below which
/// the generalized Keller–Osserman condition is both necessary and sufficient.
pub fn mu_zero(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "mu_zero needs 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let c = binom(n as u64, k as u64)? as f64;
    let k_f = k as f64;
    Ok((k_f / (n as f64 * (k_f + 1.0) * c.powf(1.0 / k_f))).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn elem_sym_examples() {
        assert_eq!(elem_sym(&spec(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0);
        assert_eq!(elem_sym(&spec(&[2.0, 2.0, -1.0]), 2).unwrap(), 0.0);
        for n in 1..=8 {
            let ones = spec(&vec![1.0; n]);
            for k in 1..=n {
                let expected = binom(n as u64, k as u64).unwrap() as f64;
                assert_eq!(elem_sym(&ones, k).unwrap(), expected);
            }
        }
    }

    #[test]
    fn elem_sym_rejects_bad_order() {
        let s = spec(&[1.0, 2.0]);
        assert!(matches!(elem_sym(&s, 0), Err(Error::Domain(_))));
        assert!(matches!(elem_sym(&s, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn spectrum_rejects_non_finite() {
        assert!(EigenSpectrum::new(vec![1.0, f64::NAN]).is_err());
        assert!(EigenSpectrum::new(vec![]).is_err());
    }

    #[test]
    fn gamma_k_examples() {
        assert!(in_gamma_k(&spec(&[1.0, 1.0, 1.0]), 3).unwrap());
        assert!(!in_gamma_k(&spec(&[2.0, 2.0, -1.0]), 2).unwrap());
        assert!(in_gamma_k(&spec(&[3.0, -1.0, -1.0]), 1).unwrap());
        assert!(in_gamma_k(&spec(&[1.0]), 2).is_err());
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(4, 2).unwrap(), 6);
        assert_eq!(binom(7, 0).unwrap(), 1);
        assert_eq!(binom(3, 2).unwrap(), 3);
        assert_eq!(binom(64, 32).unwrap(), 1_832_624_140_942_590_534);
        assert!(binom(2, 3).is_err());
    }

    #[test]
    fn mu_zero_examples() {
        assert!((mu_zero(2, 1).unwrap() - (1.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((mu_zero(3, 3).unwrap() - 0.5).abs() < 1e-15);
        // frozen from a 40-digit evaluation
        assert!((mu_zero(3, 2).unwrap() - 0.358_189_977_274_513_97).abs() < 1e-15);
        assert!(mu_zero(2, 3).is_err());
        assert!(mu_zero(2, 0).is_err());
    }
}
