//! Bivariate elliptical vectors `(U, V) = (S1, rho S1 + sqrt(1 - rho^2) S2)`
//! with `(S1, S2) = R (cos phi, sin phi)`, `phi` uniform and `R ~ H`.

use alloc::vec::Vec;
use core::f64::consts::PI;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{mda_classify, Distribution, MdaClass, ScalingFunction, SAMPLE_CHUNK};
use crate::fractional::weyl_integral;
use crate::quadrature::{integrate, integrate_range, integrate_to_infinity, QuadratureConfig};
use crate::rng::StreamRng;
use crate::special::{lgamma, normal_cdf, normal_sf};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalModel {
    pub rho: f64,
    pub radial: Distribution,
}

impl EllipticalModel {
    pub fn new(rho: f64, radial: Distribution) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::domain("elliptical model needs |rho| < 1"));
        }
        radial.validate()?;
        if radial.support().0 < 0.0 {
            return Err(Error::domain("radial law must live on [0, infinity)"));
        }
        Ok(EllipticalModel { rho, radial })
    }

    fn co_rho(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt()
    }

    fn pair(&self, r: f64, phi: f64) -> (f64, f64) {
        let (s, c) = phi.sin_cos();
        let u = r * c;
        (u, self.rho * u + self.co_rho() * r * s)
    }

    /// Scaling function of the radial law (Gumbel max-domain required).
    pub fn scaling_function(&self) -> Result<ScalingFunction> {
        match mda_classify(&self.radial).class {
            MdaClass::Gumbel(w) => Ok(w),
            other => Err(Error::Domain(alloc::format!(
                "radial law is classified {}, not Gumbel",
                other.label()
            ))),
        }
    }

    /// `c(x) = sqrt(w(x) / x)`.
    pub fn norming(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("conditioning level must be positive"));
        }
        Ok((self.scaling_function()?.eval(x) / x).sqrt())
    }
}

/// `n` pairs; chunk `k` of [`SAMPLE_CHUNK`] pairs uses stream `k` of `seed`.
pub fn sample_elliptical(m: &EllipticalModel, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let mut k = 0u64;
    while out.len() < n {
        let len = (n - out.len()).min(SAMPLE_CHUNK);
        out.extend(sample_elliptical_chunk(m, seed, k, len));
        k += 1;
    }
    out
}

pub fn sample_elliptical_chunk(m: &EllipticalModel, seed: u64, chunk: u64, len: usize) -> Vec<(f64, f64)> {
    let mut rng = StreamRng::new(seed, chunk);
    (0..len)
        .map(|_| {
            let r = m.radial.draw(&mut rng);
            let phi = 2.0 * PI * rng.uniform();
            m.pair(r, phi)
        })
        .collect()
}

/// `ln h_2(z)` for the density `h_2(z) = h(sqrt z) / (2 sqrt z)` of `R^2`.
fn ln_h2(radial: &Distribution, z: f64) -> f64 {
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let r = z.sqrt();
    match radial.ln_pdf(r) {
        Ok(v) => v - core::f64::consts::LN_2 - r.ln(),
        Err(_) => f64::NAN,
    }
}

/// Point-conditioned density `zeta(t | x)` of `c(x) S2` given `S1 = x`, i.e. of
/// `c(x) (V - rho x) / sqrt(1 - rho^2)` given `U = x`.
pub fn conditional_density_point(m: &EllipticalModel, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let z = PointConditional::new(m, x, cfg)?;
    Ok(z.density(t))
}

/// Precomputed normalization of `zeta(. | x)`.
pub struct PointConditional<'a> {
    radial: &'a Distribution,
    s: f64,
    c: f64,
    ln_h2_s: f64,
    denom: f64,
}

impl<'a> PointConditional<'a> {
    pub fn new(m: &'a EllipticalModel, x: f64, cfg: &QuadratureConfig) -> Result<Self> {
        if !m.radial.has_density() {
            return Err(Error::NoDensity(alloc::string::String::from("radial law has no density")));
        }
        let c = m.norming(x)?;
        let s = x * x;
        let ln_h2_s = ln_h2(&m.radial, s);
        if !ln_h2_s.is_finite() {
            return Err(Error::domain("radial density vanishes at the conditioning level"));
        }
        let radial = &m.radial;
        // Gamma(1/2) I_{1/2} h_2(s), relative to h_2(s)
        let i_half = weyl_integral(
            |z| {
                let v = ln_h2(radial, z) - ln_h2_s;
                if v.is_nan() {
                    0.0
                } else {
                    v.exp()
                }
            },
            0.5,
            s,
            f64::INFINITY,
            cfg,
        )?;
        let denom = i_half * (lgamma(0.5)).exp();
        Ok(PointConditional { radial, s, c, ln_h2_s, denom })
    }

    pub fn density(&self, t: f64) -> f64 {
        let z = self.s + (t / self.c).powi(2);
        let v = ln_h2(self.radial, z) - self.ln_h2_s;
        if v.is_nan() || !z.is_finite() {
            return 0.0;
        }
        v.exp() / (self.c * self.denom)
    }

    /// Distribution function of `zeta(. | x)` at `t`.
    pub fn cdf(&self, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let half = integrate(|u| self.density(u), 0.0, t.abs(), &[], cfg)?.value;
        Ok(if t >= 0.0 { 0.5 + half } else { 0.5 - half })
    }

    pub fn total_mass(&self, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(2.0 * integrate_to_infinity(|u| self.density(u), 0.0, &[], cfg)?.value)
    }
}

/// Length of `(-a, a)` intersected with the arc of half-width `b` centred at `phi0`.
fn arc_overlap(a: f64, phi0: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    if b >= PI {
        return 2.0 * a;
    }
    if a >= PI {
        return 2.0 * b;
    }
    let mut len = 0.0;
    for k in -1..=1 {
        let shift = 2.0 * PI * k as f64;
        let lo = (-a).max(phi0 - b + shift);
        let hi = a.min(phi0 + b + shift);
        if hi > lo {
            len += hi - lo;
        }
    }
    len
}

fn half_width(level: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return if level < 0.0 { PI } else { 0.0 };
    }
    (level / r).clamp(-1.0, 1.0).acos()
}

/// `E[g(R)]` over the radial law, with the radius substituted as `r0 + u^2`
/// above the kink `r0` so square-root edges integrate smoothly.
fn radial_expectation(m: &EllipticalModel, g: &dyn Fn(f64) -> f64, kinks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let h = &m.radial;
    match h {
        Distribution::PointMass(c) => return Ok(g(*c)),
        _ if !h.has_density() => {
            // quantile transform works for any law
            let est = integrate(|u| g(h.quantile(u).unwrap_or(f64::NAN)), 0.0, 1.0, &[], cfg)?;
            return Ok(est.value);
        }
        _ => {}
    }
    let r0 = kinks.iter().copied().fold(0.0f64, f64::max);
    let mut total = 0.0;
    let mut inner_breaks: Vec<f64> = kinks.iter().copied().filter(|&k| k > 0.0 && k < r0).collect();
    inner_breaks.extend(h.breakpoints());
    if r0 > 0.0 {
        total += integrate(
            |r| {
                let gr = g(r);
                if gr == 0.0 {
                    0.0
                } else {
                    gr * h.pdf(r).unwrap_or(0.0)
                }
            },
            0.0,
            r0,
            &inner_breaks,
            cfg,
        )?
        .value;
    }
    let (_, rh) = h.support();
    let ub: Vec<f64> = h.breakpoints().into_iter().filter(|&b| b > r0).map(|b| (b - r0).sqrt()).collect();
    let upper = if rh.is_finite() { (rh - r0).max(0.0).sqrt() } else { f64::INFINITY };
    total += integrate_range(
        |u| {
            let r = r0 + u * u;
            if !r.is_finite() {
                return 0.0;
            }
            let gr = g(r);
            if gr == 0.0 {
                return 0.0;
            }
            let f = h.pdf(r).unwrap_or(0.0);
            if f == 0.0 {
                0.0
            } else {
                2.0 * u * gr * f
            }
        },
        0.0,
        upper,
        &ub,
        cfg,
    )?
    .value;
    Ok(total)
}

/// `P(U > x)` by quadrature over the radius.
pub fn exceed_probability(m: &EllipticalModel, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    radial_expectation(m, &|r| half_width(x, r) / PI, &[x.abs()], cfg)
}

/// `P(U > x, V > y)` by quadrature over the radius.
pub fn joint_exceed_probability(m: &EllipticalModel, x: f64, y: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let phi0 = m.rho.clamp(-1.0, 1.0).acos();
    radial_expectation(
        m,
        &|r| arc_overlap(half_width(x, r), phi0, half_width(y, r)) / (2.0 * PI),
        &[x.abs(), y.abs()],
        cfg,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExceedMethod {
    Quadrature,
    MonteCarlo { n: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceedEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Below this exceedance probability, conditional samples come from the
/// radius-conditioned importance sampler instead of rejection.
pub const REJECTION_MIN_PROB: f64 = 1e-4;

/// Draws of `(U, V)` given `U > x`, with optional importance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSample {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub weights: Option<Vec<f64>>,
}

impl ConditionalSample {
    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Weighted fraction and its standard error of the event `pred(u, v)`.
    pub fn fraction(&self, pred: impl Fn(f64, f64) -> bool) -> ExceedEstimate {
        let n = self.u.len();
        let mut sw = 0.0;
        let mut hit = 0.0;
        for i in 0..n {
            let w = self.weight(i);
            sw += w;
            if pred(self.u[i], self.v[i]) {
                hit += w;
            }
        }
        let p = hit / sw;
        let mut var = 0.0;
        for i in 0..n {
            let w = self.weight(i);
            let ind = if pred(self.u[i], self.v[i]) { 1.0 } else { 0.0 };
            var += w * w * (ind - p) * (ind - p);
        }
        ExceedEstimate { value: p, std_error: var.sqrt() / sw }
    }

    /// Kish effective sample size.
    pub fn effective_size(&self) -> f64 {
        match &self.weights {
            None => self.u.len() as f64,
            Some(w) => {
                let s: f64 = w.iter().sum();
                let s2: f64 = w.iter().map(|v| v * v).sum();
                s * s / s2
            }
        }
    }
}

/// `n` draws of `(U, V)` conditioned on `U > x`.
pub fn sample_exceedances(m: &EllipticalModel, x: f64, n: usize, seed: u64, cfg: &QuadratureConfig) -> Result<ConditionalSample> {
    if n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    let p = exceed_probability(m, x, cfg)?;
    if !(p > 0.0) {
        return Err(Error::domain(
            "P(U > x) vanishes numerically; lower x or use a larger sample",
        ));
    }
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    if p >= REJECTION_MIN_PROB || x <= 0.0 {
        let mut chunk = 0u64;
        while u.len() < n {
            let mut rng = StreamRng::new(seed, chunk);
            for _ in 0..SAMPLE_CHUNK {
                let r = m.radial.draw(&mut rng);
                let phi = 2.0 * PI * rng.uniform();
                let (a, b) = m.pair(r, phi);
                if a > x {
                    u.push(a);
                    v.push(b);
                    if u.len() == n {
                        break;
                    }
                }
            }
            chunk += 1;
        }
        return Ok(ConditionalSample { u, v, weights: None });
    }
    // R given R > x, then phi uniform on the arc where U > x; weight = arc / pi
    let tail = m.radial.sf(x);
    let ln_tail = m.radial.ln_sf(x);
    let mut w = Vec::with_capacity(n);
    let mut rng = StreamRng::new(seed, 0);
    for i in 0..n {
        if i > 0 && i % SAMPLE_CHUNK == 0 {
            rng = StreamRng::new(seed, (i / SAMPLE_CHUNK) as u64);
        }
        let q = rng.uniform();
        let r = if tail > 1e-300 {
            m.radial.quantile_sf(q * tail)?
        } else {
            m.radial.quantile_sf((q.ln() + ln_tail).exp())?
        };
        let a = half_width(x, r);
        let phi = a * (2.0 * rng.uniform() - 1.0);
        let (uu, vv) = m.pair(r, phi);
        u.push(uu);
        v.push(vv);
        w.push(a / PI);
    }
    Ok(ConditionalSample { u, v, weights: Some(w) })
}

/// `Psi_x(y) = P(V > y | U > x)`.
pub fn conditional_sf_exceed(
    m: &EllipticalModel,
    x: f64,
    y: f64,
    method: ExceedMethod,
    cfg: &QuadratureConfig,
) -> Result<ExceedEstimate> {
    match method {
        ExceedMethod::Quadrature => {
            let den = exceed_probability(m, x, cfg)?;
            if !(den > 0.0) {
                return Err(Error::domain(
                    "P(U > x) vanishes numerically; lower x or use Monte Carlo with a larger sample",
                ));
            }
            let num = joint_exceed_probability(m, x, y, cfg)?;
            Ok(ExceedEstimate { value: (num / den).clamp(0.0, 1.0), std_error: 0.0 })
        }
        ExceedMethod::MonteCarlo { n, seed } => {
            let s = sample_exceedances(m, x, n, seed, cfg)?;
            Ok(s.fraction(|_, v| v > y))
        }
    }
}

/// Gaussian approximation `Psi_x(y) ~ 1 - Phi((y - rho x) c(x) / sqrt(1 - rho^2))`.
pub fn gaussian_approx_sf(m: &EllipticalModel, x: f64, y: f64, w: &ScalingFunction) -> Result<f64> {
    m.scaling_function()?;
    if !(x > 0.0) {
        return Err(Error::domain("conditioning level must be positive"));
    }
    let c = (w.eval(x) / x).sqrt();
    Ok(normal_sf((y - m.rho * x) * c / m.co_rho()))
}

/// Per-level sup distances to the standard normal cdf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub x: f64,
    /// Monte Carlo `sup_t |P(c(x) Z*_x <= t sqrt(1-rho^2)) - Phi(t)|` for `Z*_x = V - rho x` given `U > x`.
    pub exceed_sup: f64,
    /// Standard error scale `1 / sqrt(n_eff)` of the Monte Carlo distance.
    pub noise: f64,
    /// `sup_t |int_{-inf}^t zeta(s|x) ds - Phi(t)|`.
    pub point_sup: f64,
}

/// Default grid of 61 points on `[-3, 3]`.
pub fn default_t_grid() -> Vec<f64> {
    (0..61).map(|i| -3.0 + 0.1 * i as f64).collect()
}

/// Level `x_grid[i]` uses random streams of seed `seed + i`.
pub fn convergence_diagnostic(
    m: &EllipticalModel,
    x_grid: &[f64],
    t_grid: &[f64],
    n: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<Vec<DiagnosticRow>> {
    m.scaling_function()?;
    let mut rows = Vec::with_capacity(x_grid.len());
    for (i, &x) in x_grid.iter().enumerate() {
        let c = m.norming(x)?;
        let s = sample_exceedances(m, x, n, seed.wrapping_add(i as u64), cfg)?;
        let scale = c / m.co_rho();
        let mut exceed_sup = 0.0f64;
        for &t in t_grid {
            let f = 1.0 - s.fraction(|_, v| (v - m.rho * x) * scale > t).value;
            exceed_sup = exceed_sup.max((f - normal_cdf(t)).abs());
        }
        let pc = PointConditional::new(m, x, cfg)?;
        let mut point_sup = 0.0f64;
        for &t in t_grid {
            point_sup = point_sup.max((pc.cdf(t, cfg)? - normal_cdf(t)).abs());
        }
        rows.push(DiagnosticRow {
            x,
            exceed_sup,
            noise: 1.0 / s.effective_size().sqrt(),
            point_sup,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_pdf;

    fn gauss(rho: f64) -> EllipticalModel {
        EllipticalModel::new(rho, Distribution::rayleigh(1.0).unwrap()).unwrap()
    }

    #[test]
    fn rayleigh_zeta_is_normal() {
        let m = gauss(0.3);
        let cfg = QuadratureConfig::precise();
        for &x in &[0.5, 2.0, 10.0, 30.0] {
            let pc = PointConditional::new(&m, x, &cfg).unwrap();
            for &t in &[-3.0, -1.0, 0.0, 0.7, 2.5] {
                assert!((pc.density(t) - normal_pdf(t)).abs() < 1e-10, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn arc_overlap_cases() {
        assert!((arc_overlap(0.5, 0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((arc_overlap(0.5, 1.0, 0.25) - 0.0).abs() < 1e-15);
        assert!((arc_overlap(1.0, 0.5, PI) - 2.0).abs() < 1e-15);
        // wrap-around
        assert!((arc_overlap(0.5, 2.0 * PI - 0.1, 0.2) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn gaussian_exceedances() {
        let cfg = QuadratureConfig::relative(1e-10);
        let m = gauss(0.0);
        for &x in &[0.5, 1.0, 3.0] {
            let v = conditional_sf_exceed(&m, x, 0.0, ExceedMethod::Quadrature, &cfg).unwrap();
            assert!((v.value - 0.5).abs() < 1e-8);
        }
        let v = conditional_sf_exceed(&m, 1.0, 1.0, ExceedMethod::Quadrature, &cfg).unwrap();
        assert!((v.value - normal_sf(1.0)).abs() < 1e-8);
        let p = exceed_probability(&m, 2.0, &cfg).unwrap();
        assert!((p - normal_sf(2.0)).abs() < 1e-12);
        // deep tail stays accurate
        let p = exceed_probability(&m, 20.0, &cfg).unwrap();
        assert!((p / normal_sf(20.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn point_mass_circle() {
        let m = EllipticalModel::new(0.0, Distribution::point_mass(1.0).unwrap()).unwrap();
        for (u, v) in sample_elliptical(&m, 1000, 3) {
            assert!((u * u + v * v - 1.0).abs() < 1e-12);
        }
        let cfg = QuadratureConfig::default();
        assert!(convergence_diagnostic(&m, &[0.5], &default_t_grid(), 100, 1, &cfg).is_err());
    }
}
