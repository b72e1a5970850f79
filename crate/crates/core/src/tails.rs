//! Tail asymptotes of beta-scaled laws in the three max-domains, each paired
//! with a direct numerical value so the two can be compared.

use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

pub use crate::distributions::MdaClass;
use crate::distributions::{mda_classify, Distribution, ScalingFunction};
use crate::fractional::{weyl_integral_with_breaks, weyl_stieltjes, Weight};
use crate::quadrature::QuadratureConfig;
use crate::scaling::{forward_pdf, forward_sf, ForwardMode, ScalingParams};
use crate::special::{beta_moment, lgamma, ln_beta};
use crate::{Error, Result};

/// A predicted tail value next to the directly computed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPrediction {
    pub prediction: f64,
    pub direct: f64,
    /// `direct / prediction`.
    pub ratio: f64,
}

impl TailPrediction {
    pub fn new(prediction: f64, direct: f64) -> Self {
        TailPrediction { prediction, direct, ratio: direct / prediction }
    }
}

fn gumbel_w(h: &Distribution) -> Result<ScalingFunction> {
    match mda_classify(h).class {
        MdaClass::Gumbel(w) => Ok(w),
        other => Err(Error::Domain(alloc::format!(
            "law is classified {}, not Gumbel",
            other.label()
        ))),
    }
}

fn frechet_index(h: &Distribution) -> Result<f64> {
    match mda_classify(h).class {
        MdaClass::Frechet(g) => Ok(g),
        other => Err(Error::Domain(alloc::format!(
            "law is classified {}, not Frechet",
            other.label()
        ))),
    }
}

fn weibull_index(h: &Distribution) -> Result<(f64, f64)> {
    match mda_classify(h).class {
        MdaClass::Weibull { gamma, endpoint } => Ok((gamma, endpoint)),
        other => Err(Error::Domain(alloc::format!(
            "law is classified {}, not Weibull",
            other.label()
        ))),
    }
}

fn ln_k(p: ScalingParams) -> f64 {
    lgamma(p.alpha + p.beta) - lgamma(p.alpha)
}

/// Gumbel case: `sf_{alpha,beta}(x) ~ K (x w(x))^(-beta) sf(x)`, `K = Gamma(alpha+beta)/Gamma(alpha)`.
pub fn predict_gumbel(h: &Distribution, p: ScalingParams, x: f64, cfg: &QuadratureConfig) -> Result<TailPrediction> {
    p.validate()?;
    let w = gumbel_w(h)?;
    let pred = (ln_k(p) - p.beta * (x * w.eval(x)).ln() + h.ln_sf(x)).exp();
    let direct = forward_sf(h, p, x, ForwardMode::Weyl, cfg)?;
    Ok(TailPrediction::new(pred, direct))
}

/// Reverse Gumbel statement: `sf(x) ~ (x w(x))^beta sf_{alpha,beta}(x) / K`.
pub fn reverse_gumbel(scaled_sf: f64, w_at_x: f64, p: ScalingParams, x: f64) -> f64 {
    (p.beta * (x * w_at_x).ln() - ln_k(p)).exp() * scaled_sf
}

/// Frechet case: `sf_{alpha,beta}(x) ~ E[B^gamma] sf(x)`.
pub fn predict_frechet(h: &Distribution, p: ScalingParams, x: f64, cfg: &QuadratureConfig) -> Result<TailPrediction> {
    p.validate()?;
    let gamma = frechet_index(h)?;
    let pred = beta_moment(p.alpha, p.beta, gamma)? * h.sf(x);
    let direct = forward_sf(h, p, x, ForwardMode::Weyl, cfg)?;
    Ok(TailPrediction::new(pred, direct))
}

/// Weibull case at distance `d` below the endpoint `r`:
/// `sf_{alpha,beta}(r - d) ~ K (d/r)^beta sf(r - d)` with
/// `K = Gamma(alpha+beta) Gamma(gamma+1) / (Gamma(alpha) Gamma(gamma+beta+1))`.
pub fn predict_weibull(h: &Distribution, p: ScalingParams, d: f64, cfg: &QuadratureConfig) -> Result<TailPrediction> {
    p.validate()?;
    let (gamma, r) = weibull_index(h)?;
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::domain("Weibull prediction needs a finite positive endpoint"));
    }
    if !(d > 0.0 && d < r) {
        return Err(Error::domain("distance below the endpoint must lie in (0, r_H)"));
    }
    let ln_c = ln_k(p) + lgamma(gamma + 1.0) - lgamma(gamma + p.beta + 1.0);
    let pred = (ln_c + p.beta * (d / r).ln()).exp() * h.sf(r - d);
    let direct = forward_sf(h, p, r - d, ForwardMode::Weyl, cfg)?;
    Ok(TailPrediction::new(pred, direct))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    Gumbel,
    Frechet,
    Weibull,
}

/// Density/survivor ratio of the scaled law and its limit:
/// Gumbel `h / (w sf) -> 1`, Frechet `x h / sf -> gamma`,
/// Weibull `d h(r-d) / sf(r-d) -> beta + gamma`.
pub fn density_ratio(
    h: &Distribution,
    p: ScalingParams,
    x: f64,
    mode: TailMode,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    p.validate()?;
    match mode {
        TailMode::Gumbel => {
            let w = gumbel_w(h)?;
            let dens = forward_pdf(h, p, x, cfg)?;
            let sf = forward_sf(h, p, x, ForwardMode::Weyl, cfg)?;
            Ok((dens / (w.eval(x) * sf), 1.0))
        }
        TailMode::Frechet => {
            let gamma = frechet_index(h)?;
            let dens = forward_pdf(h, p, x, cfg)?;
            let sf = forward_sf(h, p, x, ForwardMode::Weyl, cfg)?;
            Ok((x * dens / sf, gamma))
        }
        TailMode::Weibull => {
            let (gamma, r) = weibull_index(h)?;
            if !r.is_finite() {
                return Err(Error::domain("Weibull mode needs a finite endpoint"));
            }
            let y = r - x;
            let dens = forward_pdf(h, p, y, cfg)?;
            let sf = forward_sf(h, p, y, ForwardMode::Weyl, cfg)?;
            Ok((x * dens / sf, p.beta + gamma))
        }
    }
}

/// Tail of a general bounded multiplier `B` on `[0, 1]`:
/// `P(B > 1 - s) ~ constant s^exponent` (kind I) or density
/// `~ constant s^(exponent - 1)` (kind J).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierTail {
    pub constant: f64,
    pub exponent: f64,
}

impl MultiplierTail {
    /// `B ~ beta(alpha, beta)`: constant `1 / (beta B(alpha, beta))`, exponent `beta`.
    pub fn beta(alpha: f64, beta: f64) -> Self {
        MultiplierTail { constant: (-ln_beta(alpha, beta)).exp() / beta, exponent: beta }
    }

    /// `sqrt(1 - B)` with `B ~ beta(alpha, beta)`: constant `2^alpha / (alpha B(alpha, beta))`, exponent `alpha`.
    pub fn sqrt_complement_beta(alpha: f64, beta: f64) -> Self {
        MultiplierTail {
            constant: (alpha * 2f64.ln() - ln_beta(alpha, beta)).exp() / alpha,
            exponent: alpha,
        }
    }

    /// `lambda U1 + (1 - lambda) U2` with `P(U_i > 1 - s) ~ c_i s^d_i`.
    pub fn convex_combination(c1: f64, d1: f64, c2: f64, d2: f64, lambda: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && d1 > 0.0 && d2 > 0.0 && lambda > 0.0 && lambda < 1.0) {
            return Err(Error::domain("convex combination needs positive c_i, d_i and lambda in (0, 1)"));
        }
        let ln_c = c1.ln() + c2.ln() - d1 * lambda.ln() - d2 * (1.0 - lambda).ln() + lgamma(d1 + 1.0)
            + lgamma(d2 + 1.0)
            - lgamma(d1 + d2 + 1.0);
        Ok(MultiplierTail { constant: ln_c.exp(), exponent: d1 + d2 })
    }
}

/// Constant of `P(B Y > x) ~ C x^(n - theta d) exp(-r x^theta)` when
/// `sf_Y(x) ~ m x^n exp(-r x^theta)` and `B` is the convex combination above:
/// `C = m (r theta)^(-d1-d2) c1 c2 / (lambda^d1 (1-lambda)^d2) Gamma(d1+1) Gamma(d2+1)`.
pub fn convex_multiplier_constant(
    m: f64,
    r: f64,
    theta: f64,
    c1: f64,
    d1: f64,
    c2: f64,
    d2: f64,
    lambda: f64,
) -> Result<f64> {
    let t = MultiplierTail::convex_combination(c1, d1, c2, d2, lambda)?;
    let d = d1 + d2;
    Ok(m * (r * theta).powf(-d) * t.constant * (lgamma(d + 1.0)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Survivor-function (Weyl integral) form.
    I,
    /// Stieltjes form.
    J,
}

/// Predicted tail of `P(B Y > x)` for a general multiplier (Gumbel), or of
/// `P(B Y > 1 - x)` (Weibull with `r_H = 1`).
pub fn general_multiplier_tail(
    h: &Distribution,
    tail: MultiplierTail,
    x: f64,
    mode: TailMode,
    kind: OperatorKind,
) -> Result<f64> {
    let (c, b) = (tail.constant, tail.exponent);
    if !(c >= 0.0 && b >= 0.0) {
        return Err(Error::domain("multiplier tail needs nonnegative constant and exponent"));
    }
    match mode {
        TailMode::Frechet => Err(Error::domain("Frechet tails follow from predict_frechet")),
        TailMode::Gumbel => {
            let w = gumbel_w(h)?.eval(x);
            let ln_sf = h.ln_sf(x);
            Ok(match kind {
                OperatorKind::I => c * (lgamma(1.0 + b) + ln_sf - b * (x * w).ln()).exp(),
                OperatorKind::J => c * (lgamma(b) + ln_sf - b * x.ln() - (b - 1.0) * w.ln()).exp(),
            })
        }
        TailMode::Weibull => {
            let (gamma, r) = weibull_index(h)?;
            if r != 1.0 {
                return Err(Error::domain("general multiplier tail in the Weibull case needs r_H = 1"));
            }
            let sf = h.sf(1.0 - x);
            Ok(match kind {
                OperatorKind::I => {
                    c * (lgamma(b + 1.0) + lgamma(gamma + 1.0) - lgamma(b + gamma + 1.0)).exp() * x.powf(b) * sf
                }
                OperatorKind::J => {
                    c * (lgamma(b) + lgamma(gamma + 1.0) - lgamma(b + gamma)).exp() * x.powf(b - 1.0) * sf
                }
            })
        }
    }
}

/// Asymptote of `(J_{beta,p_s} H)(x)` or `(I_beta p_s sf)(x)` next to its
/// direct value. In the Weibull mode `x` is the distance below `r_H = 1`.
pub fn fractional_asymptote(
    h: &Distribution,
    beta: f64,
    s: f64,
    x: f64,
    mode: TailMode,
    kind: OperatorKind,
    cfg: &QuadratureConfig,
) -> Result<TailPrediction> {
    if !(beta > 0.0) {
        return Err(Error::domain("fractional asymptote needs beta > 0"));
    }
    let (at, pred) = match mode {
        TailMode::Gumbel => {
            let w = gumbel_w(h)?.eval(x);
            // J ~ w^(1-beta) x^s sf, I ~ J / w
            let ln_j = (1.0 - beta) * w.ln() + s * x.ln() + h.ln_sf(x);
            let v = match kind {
                OperatorKind::J => ln_j.exp(),
                OperatorKind::I => (ln_j - w.ln()).exp(),
            };
            (x, v)
        }
        TailMode::Frechet => {
            let gamma = frechet_index(h)?;
            let v = match kind {
                OperatorKind::J => {
                    if !(beta + s < gamma + 1.0) {
                        return Err(Error::domain("Frechet J asymptote needs beta + s < gamma + 1"));
                    }
                    gamma * (lgamma(gamma + 1.0 - beta - s) - lgamma(gamma + 1.0 - s)).exp()
                        * h.sf(x)
                        * x.powf(beta + s - 1.0)
                }
                OperatorKind::I => {
                    if !(beta + s < gamma) {
                        return Err(Error::domain("Frechet I asymptote needs beta + s < gamma"));
                    }
                    (lgamma(gamma - beta - s) - lgamma(gamma - s)).exp() * h.sf(x) * x.powf(beta + s)
                }
            };
            (x, v)
        }
        TailMode::Weibull => {
            let (gamma, r) = weibull_index(h)?;
            if r != 1.0 {
                return Err(Error::domain("Weibull asymptote needs r_H = 1"));
            }
            let sf = h.sf(1.0 - x);
            let v = match kind {
                OperatorKind::J => {
                    if !(gamma > 0.0) {
                        return Err(Error::domain("Weibull J asymptote needs gamma > 0"));
                    }
                    (lgamma(gamma + 1.0) - lgamma(beta + gamma)).exp() * sf * x.powf(beta - 1.0)
                }
                OperatorKind::I => (lgamma(gamma + 1.0) - lgamma(beta + gamma + 1.0)).exp() * x.powf(beta) * sf,
            };
            (1.0 - x, v)
        }
    };
    let direct = match kind {
        OperatorKind::J => weyl_stieltjes(h, Weight::Power(s), beta, at, cfg)?,
        OperatorKind::I => {
            let (_, r) = h.support();
            weyl_integral_with_breaks(
                |y| {
                    let sf = h.sf(y);
                    if sf == 0.0 {
                        0.0
                    } else {
                        Weight::Power(s).eval(y) * sf
                    }
                },
                beta,
                at,
                r,
                &h.breakpoints(),
                cfg,
            )?
        }
    };
    Ok(TailPrediction::new(pred, direct))
}

/// `(x w(x))^mu sf(c x) / sf(x)` on the grid; tends to zero for rapidly varying tails.
pub fn rapid_variation_profile(h: &Distribution, w: &ScalingFunction, mu: f64, c: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if h.support().1.is_finite() {
        return Err(Error::domain("rapid variation profile needs an infinite endpoint"));
    }
    if !(mu >= 0.0 && c > 1.0) {
        return Err(Error::domain("rapid variation profile needs mu >= 0 and c > 1"));
    }
    Ok(grid
        .iter()
        .map(|&x| (mu * (x * w.eval(x)).ln() + h.ln_sf(c * x) - h.ln_sf(x)).exp())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasKind {
    /// `sf_F(x) ~ c int_x^inf y^(q-1) sf(y) dy ~ c x^(q-1) sf(x) / w(x)`.
    StationaryExcess,
    /// `sf_F(x) ~ c int_x^inf y^q dH(y) ~ c x^q sf(x)`.
    SizeBiased,
}

pub fn biased_tail_asymptote(
    h: &Distribution,
    q: f64,
    c: f64,
    x: f64,
    kind: BiasKind,
    cfg: &QuadratureConfig,
) -> Result<TailPrediction> {
    if !(c > 0.0) {
        return Err(Error::domain("biased tail needs c > 0"));
    }
    let w = gumbel_w(h)?;
    let (_, r) = h.support();
    let ln_sf = h.ln_sf(x);
    match kind {
        BiasKind::StationaryExcess => {
            let pred = c * ((q - 1.0) * x.ln() + ln_sf - w.eval(x).ln()).exp();
            let direct = c * weyl_integral_with_breaks(
                |y| {
                    let sf = h.sf(y);
                    if sf == 0.0 {
                        0.0
                    } else {
                        y.powf(q - 1.0) * sf
                    }
                },
                1.0,
                x,
                r,
                &h.breakpoints(),
                cfg,
            )?;
            Ok(TailPrediction::new(pred, direct))
        }
        BiasKind::SizeBiased => {
            let pred = c * (q * x.ln() + ln_sf).exp();
            let direct = c * weyl_stieltjes(h, Weight::Power(q), 1.0, x, cfg)?;
            Ok(TailPrediction::new(pred, direct))
        }
    }
}

/// `sup_t |H(a_n t + b_n)^n - Q(t)|` with the standard norming constants of
/// the law's max-domain and its extreme value limit `Q`.
pub fn max_stability_check(h: &Distribution, n: f64, t_grid: &[f64]) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::domain("max-stability check needs n >= 1"));
    }
    let upper = h.quantile_sf(1.0 / n)?;
    let pow_n = |y: f64| {
        let sf = h.sf(y);
        if sf >= 1.0 {
            0.0
        } else {
            (n * (-sf).ln_1p()).exp()
        }
    };
    let dist = |f: &dyn Fn(f64) -> f64, q: &dyn Fn(f64) -> f64| {
        t_grid.iter().map(|&t| (f(t) - q(t)).abs()).fold(0.0, f64::max)
    };
    match mda_classify(h).class {
        MdaClass::Gumbel(w) => {
            let (a, b) = (1.0 / w.eval(upper), upper);
            Ok(dist(&|t| pow_n(a * t + b), &|t| (-(-t).exp()).exp()))
        }
        MdaClass::Frechet(gamma) => {
            let a = upper;
            Ok(dist(&|t| pow_n(a * t), &|t| if t <= 0.0 { 0.0 } else { (-t.powf(-gamma)).exp() }))
        }
        MdaClass::Weibull { gamma, endpoint } => {
            let a = endpoint - upper;
            Ok(dist(&|t| pow_n(a * t + endpoint), &|t| if t >= 0.0 { 1.0 } else { (-(-t).powf(gamma)).exp() }))
        }
        MdaClass::Unclassified => Err(Error::Unclassified),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64, b: f64) -> ScalingParams {
        ScalingParams::new(a, b).unwrap()
    }

    #[test]
    fn frechet_exact_on_pareto() {
        let cfg = QuadratureConfig::precise();
        let h = Distribution::pareto(2.0, 1.0).unwrap();
        let t = predict_frechet(&h, sp(1.0, 1.0), 2.0, &cfg).unwrap();
        assert!((t.prediction - 1.0 / 12.0).abs() < 1e-15);
        assert!((t.ratio - 1.0).abs() < 1e-9);
        let h = Distribution::pareto(1.0, 1.0).unwrap();
        let t = predict_frechet(&h, sp(1.0, 1.0), 4.0, &cfg).unwrap();
        assert!((t.prediction - 0.125).abs() < 1e-15);
        assert!((t.ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weibull_uniform() {
        let cfg = QuadratureConfig::precise();
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let t = predict_weibull(&u, sp(1.0, 1.0), 0.01, &cfg).unwrap();
        assert!((t.prediction - 5e-5).abs() < 1e-15);
        let exact = 0.01 + 0.99 * 0.99f64.ln();
        assert!((t.direct / exact - 1.0).abs() < 1e-8);
        assert!((t.ratio - 1.0033).abs() < 1e-3);
    }

    #[test]
    fn fractional_exact_cases() {
        let cfg = QuadratureConfig::precise();
        let e = Distribution::exponential(1.0).unwrap();
        let t = fractional_asymptote(&e, 2.0, 0.0, 3.0, TailMode::Gumbel, OperatorKind::J, &cfg).unwrap();
        assert!((t.prediction - (-3.0f64).exp()).abs() < 1e-16);
        assert!((t.ratio - 1.0).abs() < 1e-10);
        let p = Distribution::pareto(3.0, 1.0).unwrap();
        let t = fractional_asymptote(&p, 1.0, 0.0, 5.0, TailMode::Frechet, OperatorKind::J, &cfg).unwrap();
        assert!((t.prediction - 5f64.powi(-3)).abs() < 1e-15);
        assert!((t.ratio - 1.0).abs() < 1e-10);
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        let t = fractional_asymptote(&u, 2.0, 0.0, 0.1, TailMode::Weibull, OperatorKind::J, &cfg).unwrap();
        assert!((t.prediction - 0.005).abs() < 1e-15);
        assert!((t.ratio - 1.0).abs() < 1e-10);
        assert!(fractional_asymptote(&p, 2.0, 2.0, 5.0, TailMode::Frechet, OperatorKind::J, &cfg).is_err());
    }

    #[test]
    fn multiplier_constants() {
        let (a, b) = (1.5, 2.5);
        let e = Distribution::exponential(1.0).unwrap();
        let direct = general_multiplier_tail(&e, MultiplierTail::beta(a, b), 12.0, TailMode::Gumbel, OperatorKind::I).unwrap();
        let cfg = QuadratureConfig::relative(1e-10);
        let g = predict_gumbel(&e, sp(a, b), 12.0, &cfg).unwrap();
        assert!((direct / g.prediction - 1.0).abs() < 1e-12);
        let t = MultiplierTail::convex_combination(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((t.constant - 2.0).abs() < 1e-12 && t.exponent == 2.0);
        assert!((convex_multiplier_constant(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rapid_and_biased() {
        let e = Distribution::exponential(1.0).unwrap();
        let v = rapid_variation_profile(&e, &ScalingFunction::Constant(1.0), 1.0, 2.0, &[10.0]).unwrap();
        assert!((v[0] - 10.0 * (-10.0f64).exp()).abs() < 1e-15);
        let cfg = QuadratureConfig::relative(1e-10);
        let t = biased_tail_asymptote(&e, 1.0, 1.0, 7.0, BiasKind::StationaryExcess, &cfg).unwrap();
        assert!((t.ratio - 1.0).abs() < 1e-9);
        let t = biased_tail_asymptote(&e, 0.0, 1.0, 7.0, BiasKind::SizeBiased, &cfg).unwrap();
        assert!((t.prediction - (-7.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn max_stability() {
        let t: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
        let tp: Vec<f64> = (1..=80).map(|i| 0.1 * i as f64).collect();
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert!(max_stability_check(&u, 1e4, &t).unwrap() <= 0.01);
        let p = Distribution::pareto(2.0, 1.0).unwrap();
        assert!(max_stability_check(&p, 1e4, &tp).unwrap() <= 0.01);
        let e = Distribution::exponential(1.0).unwrap();
        assert!(max_stability_check(&e, 1e4, &t).unwrap() <= 0.01);
    }
}
