//! Estimation of the Gaussian conditional approximation from `(u, v)` samples:
//! Kendall-based correlation, pseudo-radii, Weibull-tail fit of the radius and
//! plug-in conditional survivor and quantile functions.

mod kendall;

pub use kendall::kendall_tau;

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::special::{normal_quantile, normal_sf};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl SampleBatch {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::domain("u and v columns differ in length"));
        }
        if u.len() < 2 {
            return Err(Error::domain("a sample batch needs at least two pairs"));
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::domain("sample values must be finite"));
        }
        Ok(SampleBatch { u, v })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }
}

/// Kendall's tau and the correlation `sin(pi tau / 2)` it implies for elliptical laws.
pub fn kendall_rho(batch: &SampleBatch) -> Result<(f64, f64)> {
    let tau = kendall_tau(&batch.u, &batch.v)?;
    Ok((tau, (FRAC_PI_2 * tau).sin().clamp(-1.0, 1.0)))
}

/// Radius proxies: `u` itself, and the radius of `(u, (v - rho u) / sqrt(1 - rho^2))`.
pub fn pseudo_radii(batch: &SampleBatch, rho: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Degenerate("|rho| = 1 leaves no second coordinate".into()));
    }
    let s = 1.0 - rho * rho;
    let r2 = batch
        .u
        .iter()
        .zip(&batch.v)
        .map(|(&u, &v)| {
            let w = v - rho * u;
            (u * u + w * w / s).sqrt()
        })
        .collect();
    Ok((batch.u.clone(), r2))
}

fn descending(radii: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = radii.len();
    if k < 1 || k >= n {
        return Err(Error::domain("need 1 <= k < n"));
    }
    if radii.iter().any(|r| !r.is_finite()) {
        return Err(Error::domain("radii must be finite"));
    }
    let mut s = radii.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s.truncate(k);
    if !(s[k - 1] > 0.0) {
        return Err(Error::domain("the top k radii must be positive"));
    }
    Ok(s)
}

/// Weibull-tail exponent `theta` of `sf(x) ~ exp(-r x^theta)` from the top `k`
/// order statistics (Gardes-Girard form, normalized to target `theta`).
pub fn gg_theta(radii: &[f64], k: usize) -> Result<f64> {
    let top = descending(radii, k)?;
    let n = radii.len() as f64;
    let kf = k as f64;
    let anchor_r = top[k - 1].ln();
    let anchor_t = (n / kf).ln().ln();
    let mut m = 0.0;
    let mut t = 0.0;
    for (i, r) in top.iter().enumerate() {
        m += r.ln() - anchor_r;
        t += (n / (i + 1) as f64).ln().ln() - anchor_t;
    }
    if !(m > 0.0) {
        return Err(Error::Degenerate("the top order statistics are all equal".into()));
    }
    let theta = t / m;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Degenerate("tail exponent estimate is not positive".into()));
    }
    Ok(theta)
}

/// `(1/k) sum_{i<=k} log(n/i) / R_{n-i+1:n}^theta`.
pub fn r_hat(radii: &[f64], theta: f64, k: usize) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::domain("theta must be positive"));
    }
    let top = descending(radii, k)?;
    let n = radii.len() as f64;
    let s: f64 = top
        .iter()
        .enumerate()
        .map(|(i, r)| (n / (i + 1) as f64).ln() / r.powf(theta))
        .sum();
    let r = s / k as f64;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Degenerate("scale estimate is not positive".into()));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusSource {
    /// The first coordinate.
    R1,
    /// The decorrelated Euclidean radius.
    R2,
    /// The second coordinate, which has the same law as the first.
    V,
}

impl RadiusSource {
    pub fn label(self) -> &'static str {
        match self {
            RadiusSource::R1 => "r1",
            RadiusSource::R2 => "r2",
            RadiusSource::V => "v",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Number of upper order statistics; `None` means `ceil(n^0.6)`.
    pub kn: Option<usize>,
    pub source: RadiusSource,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { kn: None, source: RadiusSource::R1 }
    }
}

pub fn default_kn(n: usize) -> usize {
    ((n as f64).powf(0.6).ceil() as usize).clamp(1, n.saturating_sub(1).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFitResult {
    pub theta: f64,
    pub r: f64,
    pub source: RadiusSource,
    pub kn: usize,
    /// Nonpositive radii. They still count towards `n` in `log(n / i)`,
    /// since only the top `k_n` enter the fit.
    pub nonpositive: usize,
}

impl TailFitResult {
    /// `w(x) = r theta x^(theta - 1)`.
    pub fn w_hat(&self, x: f64) -> f64 {
        self.r * self.theta * x.powf(self.theta - 1.0)
    }

    /// `sqrt(w(x) / x)`.
    pub fn h_hat(&self, x: f64) -> f64 {
        (self.w_hat(x) / x).sqrt()
    }
}

pub fn w_hat(fit: &TailFitResult, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x must be positive"));
    }
    Ok(fit.w_hat(x))
}

pub fn h_hat(fit: &TailFitResult, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x must be positive"));
    }
    Ok(fit.h_hat(x))
}

fn check_plugin(rho: f64, x: f64) -> Result<()> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Degenerate("|rho| must be below 1".into()));
    }
    if !(x > 0.0) {
        return Err(Error::domain("x must be positive"));
    }
    Ok(())
}

/// Plug-in `P(V > y | U > x) ~ 1 - Phi(h(x) (y - rho x) / sqrt(1 - rho^2))`.
pub fn psi_hat(fit: &TailFitResult, rho: f64, x: f64, y: f64) -> Result<f64> {
    check_plugin(rho, x)?;
    Ok(normal_sf(fit.h_hat(x) * (y - rho * x) / (1.0 - rho * rho).sqrt()))
}

/// Inverse of [`psi_hat`] in `y` at level `1 - s`.
pub fn quantile_hat(fit: &TailFitResult, rho: f64, x: f64, s: f64) -> Result<f64> {
    check_plugin(rho, x)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain("s must lie in (0, 1)"));
    }
    Ok(rho * x + (1.0 - rho * rho).sqrt() * normal_quantile(s)? / fit.h_hat(x))
}

/// Fitted estimators bound to one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineResult {
    pub tau: f64,
    pub rho: f64,
    pub fit: TailFitResult,
    /// Set when the sample has fewer than 100 pairs.
    pub small_sample: bool,
}

impl PipelineResult {
    pub fn psi(&self, x: f64, y: f64) -> Result<f64> {
        psi_hat(&self.fit, self.rho, x, y)
    }

    pub fn quantile(&self, x: f64, s: f64) -> Result<f64> {
        quantile_hat(&self.fit, self.rho, x, s)
    }
}

pub const SMALL_SAMPLE: usize = 100;

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InStage { stage: name, inner: alloc::boxed::Box::new(e) })
}

/// Correlation, pseudo-radii and tail fit on the configured radius source.
pub fn pipeline(batch: &SampleBatch, cfg: &EstimatorConfig) -> Result<PipelineResult> {
    let (tau, rho) = stage("kendall", kendall_rho(batch))?;
    let (r1, r2) = stage("pseudo-radii", pseudo_radii(batch, rho))?;
    let raw = match cfg.source {
        RadiusSource::R1 => r1,
        RadiusSource::R2 => r2,
        RadiusSource::V => batch.v.clone(),
    };
    let nonpositive = raw.iter().filter(|&&r| !(r > 0.0)).count();
    let kn = cfg.kn.unwrap_or_else(|| default_kn(raw.len()));
    let theta = stage("theta", gg_theta(&raw, kn))?;
    let r = stage("scale", r_hat(&raw, theta, kn))?;
    Ok(PipelineResult {
        tau,
        rho,
        fit: TailFitResult { theta, r, source: cfg.source, kn, nonpositive },
        small_sample: batch.len() < SMALL_SAMPLE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weibull_quantiles(n: usize, r: f64, theta: f64) -> Vec<f64> {
        (1..=n).map(|i| ((n as f64 / i as f64).ln() / r).powf(1.0 / theta)).collect()
    }

    #[test]
    fn exact_quantiles_recover_parameters() {
        let x = weibull_quantiles(4, 1.0, 2.0);
        assert!((gg_theta(&x, 2).unwrap() - 2.0).abs() < 1e-12);
        let x = weibull_quantiles(500, 0.3, 1.5);
        let t = gg_theta(&x, 40).unwrap();
        assert!((t - 1.5).abs() < 1e-12);
        assert!((r_hat(&x, t, 40).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn plug_in_examples() {
        let fit = TailFitResult { theta: 2.0, r: 0.5, source: RadiusSource::R1, kn: 1, nonpositive: 0 };
        assert_eq!(fit.w_hat(3.0), 3.0);
        assert_eq!(fit.h_hat(3.0), 1.0);
        let one = TailFitResult { theta: 2.0, r: 0.5, ..fit };
        assert!((psi_hat(&one, 0.0, 1.0, 1.959964).unwrap() - 0.025).abs() < 1e-6);
        assert!((quantile_hat(&one, 0.0, 1.0, 0.975).unwrap() - 1.959964).abs() < 1e-6);
        let y = quantile_hat(&fit, 0.3, 4.0, 0.9).unwrap();
        assert!((psi_hat(&fit, 0.3, 4.0, y).unwrap() - 0.1).abs() < 1e-12);
        assert!(quantile_hat(&fit, 0.3, 4.0, 1.0).is_err());
    }

    #[test]
    fn radii_examples() {
        let b = SampleBatch::from_pairs(&[(3.0, 4.0), (2.0, 1.0)]).unwrap();
        let (r1, r2) = pseudo_radii(&b, 0.0).unwrap();
        assert_eq!((r1[0], r2[0]), (3.0, 5.0));
        let (_, r2) = pseudo_radii(&b, 0.5).unwrap();
        assert!((r2[1] - 2.0).abs() < 1e-15);
        assert!(pseudo_radii(&b, 1.0).is_err());
    }
}
