//! The forward map `H -> H_{alpha,beta}` (law of `B Y`) and its inversion.

use alloc::boxed::Box;
use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{
    mda_classify, Above, Below, Distribution, Interpolation, MdaClass, ScaledLaw, TabulatedCdf,
};
use crate::fractional::{weyl_integral_with_breaks, weyl_stieltjes, Weight};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::{inc_beta_pair, lgamma, ln_beta};
use crate::{Error, Result};

/// Parameters of the beta multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ScalingParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = ScalingParams { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) || !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::domain("scaling parameters need alpha > 0 and beta > 0"));
        }
        Ok(())
    }

    /// `Gamma(alpha + beta) / Gamma(alpha)`.
    pub fn k(&self) -> f64 {
        (lgamma(self.alpha + self.beta) - lgamma(self.alpha)).exp()
    }
}

/// Decreasing orders `beta = beta_0 > beta_1 > ... > beta_k > 0` of an
/// iterative inversion; the final order 0 is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationPlan {
    orders: Vec<f64>,
}

impl IterationPlan {
    /// Accepts the orders with or without the trailing 0.
    pub fn new(orders: &[f64]) -> Result<Self> {
        let mut v: Vec<f64> = orders.to_vec();
        if v.last() == Some(&0.0) {
            v.pop();
        }
        if v.is_empty() {
            return Err(Error::domain("iteration plan needs at least one positive order"));
        }
        if v.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::domain("iteration plan orders must be positive"));
        }
        let plan = IterationPlan { orders: v };
        for (i, lambda) in plan.gaps().into_iter().enumerate() {
            if !(lambda > 0.0 && lambda <= 1.0) {
                return Err(Error::Domain(alloc::format!(
                    "iteration plan gap {} is {lambda}; every gap must lie in (0, 1]",
                    i + 1
                )));
            }
        }
        Ok(plan)
    }

    /// Equal gaps of at most one.
    pub fn uniform(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain("plan needs beta > 0"));
        }
        let k = beta.ceil() as usize;
        let orders: Vec<f64> = (0..k).map(|i| beta * (k - i) as f64 / k as f64).collect();
        IterationPlan::new(&orders)
    }

    pub fn beta(&self) -> f64 {
        self.orders[0]
    }

    /// `beta_0, ..., beta_k, 0`.
    pub fn orders(&self) -> Vec<f64> {
        let mut v = self.orders.clone();
        v.push(0.0);
        v
    }

    /// `lambda_i = beta_{i-1} - beta_i` for `i = 1..=k+1`.
    pub fn gaps(&self) -> Vec<f64> {
        self.orders().windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// `delta_i = 1 - lambda_i`.
    pub fn deltas(&self) -> Vec<f64> {
        self.gaps().into_iter().map(|l| 1.0 - l).collect()
    }
}

/// How the forward map is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardMode {
    /// Weyl fractional-integral representation.
    Weyl,
    /// Direct mixture `E[H(x / B)]` over the beta density.
    Mixture,
}

fn check_base(h: &Distribution, p: ScalingParams, x: f64) -> Result<()> {
    p.validate()?;
    if x.is_nan() {
        return Err(Error::domain("evaluation point is NaN"));
    }
    if h.support().0 < 0.0 {
        return Err(Error::domain("beta scaling needs a base law with H(0-) = 0"));
    }
    Ok(())
}

/// `x^alpha (I_beta p_{-alpha-beta} G)(x)` over `[x, r_H]` for `G = H` or `1 - H`.
fn weyl_piece(h: &Distribution, p: ScalingParams, x: f64, survivor: bool, cfg: &QuadratureConfig) -> Result<f64> {
    let (_, r) = h.support();
    let ab = p.alpha + p.beta;
    let breaks = h.breakpoints();
    let v = weyl_integral_with_breaks(
        |y: f64| {
            let gy = if survivor { h.sf(y) } else { h.cdf(y) };
            if gy == 0.0 {
                0.0
            } else {
                // (x/y)^alpha y^-beta keeps the factor near one
                (x / y).powf(p.alpha) * y.powf(-p.beta) * gy
            }
        },
        p.beta,
        x,
        r,
        &breaks,
        cfg,
    );
    let _ = ab;
    v
}

fn scale_err(e: Error, f: f64, add: f64) -> Error {
    match e {
        Error::NumericFailure { value, error_estimate } => Error::NumericFailure {
            value: value * f + add,
            error_estimate: error_estimate * f,
        },
        other => other,
    }
}

/// `H_{alpha,beta}(x) = P(B Y <= x)`.
pub fn forward_cdf(h: &Distribution, p: ScalingParams, x: f64, mode: ForwardMode, cfg: &QuadratureConfig) -> Result<f64> {
    check_base(h, p, x)?;
    let (_, r) = h.support();
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= r {
        return Ok(1.0);
    }
    match mode {
        ForwardMode::Weyl => {
            // mass above r_H contributes P(B <= x / r_H)
            let beyond = if r.is_finite() { inc_beta_pair(p.alpha, p.beta, x / r).0 } else { 0.0 };
            let k = p.k();
            weyl_piece(h, p, x, false, cfg)
                .map(|v| k * v + beyond)
                .map_err(|e| scale_err(e, k, beyond))
        }
        ForwardMode::Mixture => mixture(h, p, x, false, cfg),
    }
}

/// `1 - H_{alpha,beta}(x) = P(B Y > x)`.
pub fn forward_sf(h: &Distribution, p: ScalingParams, x: f64, mode: ForwardMode, cfg: &QuadratureConfig) -> Result<f64> {
    check_base(h, p, x)?;
    let (_, r) = h.support();
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x >= r {
        return Ok(0.0);
    }
    match mode {
        ForwardMode::Weyl => {
            let k = p.k();
            weyl_piece(h, p, x, true, cfg)
                .map(|v| k * v)
                .map_err(|e| scale_err(e, k, 0.0))
        }
        ForwardMode::Mixture => mixture(h, p, x, true, cfg),
    }
}

/// `int_0^1 G(x/b) beta_pdf(b) db`, split at 1/2 with `u = b^alpha` below and
/// `u = (1-b)^beta` above so neither endpoint is singular.
fn mixture(h: &Distribution, p: ScalingParams, x: f64, survivor: bool, cfg: &QuadratureConfig) -> Result<f64> {
    let (a, b) = (p.alpha, p.beta);
    let lb = ln_beta(a, b);
    let g = |bb: f64| {
        if bb <= 0.0 {
            return if survivor { 0.0 } else { 1.0 };
        }
        let y = x / bb;
        if survivor {
            h.sf(y)
        } else {
            h.cdf(y)
        }
    };
    // b values where G(x/b) is not smooth
    let kinks: Vec<f64> = h.breakpoints().into_iter().filter(|&c| c > x).map(|c| x / c).collect();
    let lower_breaks: Vec<f64> = kinks.iter().filter(|&&k| k < 0.5).map(|k| k.powf(a)).collect();
    let upper_breaks: Vec<f64> = kinks.iter().filter(|&&k| k > 0.5).map(|k| (1.0 - k).powf(b)).collect();
    let lower = integrate(
        |u: f64| {
            let bb = u.powf(1.0 / a);
            g(bb) * ((b - 1.0) * (-bb).ln_1p() - lb).exp() / a
        },
        0.0,
        0.5f64.powf(a),
        &lower_breaks,
        cfg,
    )?;
    let upper = integrate(
        |u: f64| {
            let s = u.powf(1.0 / b);
            let bb = 1.0 - s;
            g(bb) * ((a - 1.0) * bb.ln() - lb).exp() / b
        },
        0.0,
        0.5f64.powf(b),
        &upper_breaks,
        cfg,
    )?;
    Ok(lower.value + upper.value)
}

/// Density `h_{alpha,beta}(x) = K x^(alpha-1) (J_{beta, p_{1-alpha-beta}} H)(x)`.
pub fn forward_pdf(h: &Distribution, p: ScalingParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_base(h, p, x)?;
    let (_, r) = h.support();
    if x <= 0.0 || x >= r {
        return Ok(0.0);
    }
    // x^(alpha-1) y^(1-alpha-beta) = (x/y)^(alpha-1) y^-beta
    let w = move |y: f64| if y > 0.0 { (x / y).powf(p.alpha - 1.0) * y.powf(-p.beta) } else { 0.0 };
    let k = p.k();
    weyl_stieltjes(h, Weight::Custom(&w), p.beta, x, cfg)
        .map(|v| k * v)
        .map_err(|e| scale_err(e, k, 0.0))
}

/// Options for the explicit inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertOptions {
    /// Permit `beta > 1` through nested central differences (noisy).
    pub allow_higher_order: bool,
    pub cfg: QuadratureConfig,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions { allow_higher_order: false, cfg: QuadratureConfig::default() }
    }
}

/// Recover `1 - H(x)` from `F = H_{alpha,beta}` in one step.
///
/// With `n = ceil(beta)` and `delta = n - beta`,
/// `sf_H(x) = (-1)^n Gamma(alpha)/Gamma(alpha+beta) x^(alpha+beta) (I_delta D^n p_{-alpha} sf_F)(x)`.
pub fn invert_onestep(f: &Distribution, p: ScalingParams, x: f64, opts: &InvertOptions) -> Result<f64> {
    p.validate()?;
    if p.beta <= 1.0 {
        return invert_step(f, p.alpha, p.beta, p.beta, x, &opts.cfg);
    }
    if !opts.allow_higher_order {
        return Err(Error::UseIterative { beta: p.beta });
    }
    higher_order(f, p, x, &opts.cfg)
}

fn higher_order(f: &Distribution, p: ScalingParams, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_base(f, p, x)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    let n = p.beta.ceil() as i32;
    let delta = n as f64 - p.beta;
    let (_, r) = f.support();
    if x >= r {
        return Ok(0.0);
    }
    let a = p.alpha;
    // D^n of y^-alpha sf_F(y) by nested central differences
    let step = 1e-3 * x.max(1e-3);
    let g = |y: f64| if y > 0.0 { y.powf(-a) * f.sf(y) } else { 0.0 };
    let dn = |y: f64| {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * g(y + (0.5 * n as f64 - j as f64) * step);
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        }
        acc / step.powi(n)
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let v = weyl_integral_with_breaks(dn, delta, x, r, &f.breakpoints(), cfg)?;
    let c = (lgamma(a) - lgamma(a + p.beta)).exp() * x.powf(a + p.beta);
    Ok((sign * c * v).clamp(0.0, 1.0))
}

/// One fractional step of the inversion: from `F = H_{alpha,beta}` remove a
/// factor `B_{alpha+beta-lambda, lambda}` and return `1 - H_{alpha,beta-lambda}(x)`.
///
/// With `a' = alpha + beta - lambda` and `delta = 1 - lambda`,
/// `Gamma(a')/Gamma(alpha+beta) x^(alpha+beta) [a' (I_delta p_{-a'-1} sf_F)(x) + (J_{delta,p_{-a'}} F)(x)]`.
/// `lambda = beta` recovers the base law.
pub fn invert_step(f: &Distribution, alpha: f64, lambda: f64, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::domain("invert_step needs alpha > 0 and beta > 0"));
    }
    if !(lambda > 0.0 && lambda <= 1.0 && lambda <= beta + 1e-15) {
        return Err(Error::domain("invert_step needs 0 < lambda <= min(1, beta)"));
    }
    if x.is_nan() {
        return Err(Error::domain("evaluation point is NaN"));
    }
    if f.support().0 < 0.0 {
        return Err(Error::domain("inversion needs F(0-) = 0"));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let (_, r) = f.support();
    if x >= r {
        return Ok(0.0);
    }
    let delta = (1.0 - lambda).max(0.0);
    let a1 = alpha + beta - lambda;
    let ab = alpha + beta;
    // x^(alpha+beta) y^(-a'-1) = (x/y)^(a'+1) x^(lambda - 1)
    let xl = x.powf(lambda - 1.0);
    let first = weyl_integral_with_breaks(
        |y: f64| {
            let s = f.sf(y);
            if s == 0.0 {
                0.0
            } else {
                (x / y).powf(a1 + 1.0) * s
            }
        },
        delta,
        x,
        r,
        &f.breakpoints(),
        cfg,
    )?;
    let w = move |y: f64| if y > 0.0 { (x / y).powf(a1) } else { 0.0 };
    let second = if delta == 0.0 && !f.has_density() {
        // order zero needs a density: differentiate the cdf
        let h = (1e-5 * x).max(1e-5).min(0.5 * x);
        w(x) * (f.cdf(x + h) - f.cdf(x - h)) / (2.0 * h)
    } else {
        weyl_stieltjes(f, Weight::Custom(&w), delta, x, cfg)?
    };
    // x^(alpha+beta) p_{-a'}(y) = (x/y)^a' x^lambda
    let c = (lgamma(a1) - lgamma(ab)).exp();
    let v = c * (a1 * xl * first + x.powf(lambda) * second);
    if !v.is_finite() {
        return Err(Error::NumericFailure { value: v, error_estimate: f64::INFINITY });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Default inversion grid: 200 geometric points between the `1e-4` and
/// `1 - 1e-4` quantiles; with a finite endpoint, half of them are placed
/// geometrically in the distance to the endpoint.
pub fn default_grid(f: &Distribution, points: usize) -> Result<Vec<f64>> {
    let lo = f.quantile(1e-4)?;
    let hi = f.quantile_sf(1e-4)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain("cannot build a geometric grid for this law"));
    }
    let (_, r) = f.support();
    let mut grid = if r.is_finite() {
        let mid = f.quantile(0.5)?;
        let lower = geometric(lo, mid, points / 2);
        let upper: Vec<f64> = geometric(r - mid, (r - hi).max(1e-12 * r), points - points / 2)
            .into_iter()
            .map(|d| r - d)
            .collect();
        let mut g = lower;
        g.extend(upper);
        g
    } else {
        geometric(lo, hi, points)
    };
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    grid.retain(|&x| x > 0.0 && x < r);
    Ok(grid)
}

pub(crate) fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Largest drop of the cdf along the table before rectification.
const STAGE_TOLERANCE: f64 = 1e-3;

/// Iterative inversion: stages `i = k+1, ..., 1` each remove one gap of the
/// plan. Every intermediate law is tabulated on `grid`, made monotone and
/// used as the input of the next stage. Returns the recovered base law.
pub fn invert_iterative(
    f: &Distribution,
    alpha: f64,
    plan: &IterationPlan,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<TabulatedCdf> {
    invert_iterative_with(f, alpha, plan, grid, cfg, |xs, eval| xs.iter().map(|&x| eval(x)).collect())
}

/// As [`invert_iterative`], with a caller-supplied map over grid points so
/// the points of a stage can be evaluated in parallel.
pub fn invert_iterative_with<M>(
    f: &Distribution,
    alpha: f64,
    plan: &IterationPlan,
    grid: &[f64],
    cfg: &QuadratureConfig,
    map: M,
) -> Result<TabulatedCdf>
where
    M: Fn(&[f64], &(dyn Fn(f64) -> Result<f64> + Sync)) -> Vec<Result<f64>>,
{
    if !(alpha > 0.0) {
        return Err(Error::domain("invert_iterative needs alpha > 0"));
    }
    let (_, r) = f.support();
    let mut xs: Vec<f64> = grid.iter().copied().filter(|&x| x > 0.0 && x < r).collect();
    if xs.len() < 3 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid must hold at least three increasing points inside (0, r_F)"));
    }
    let tail = match mda_classify(f).class {
        MdaClass::Frechet(_) => Above::PowerTail,
        _ => Above::ExponentialTail,
    };
    if r.is_finite() {
        xs.push(r);
    }
    let orders = plan.orders();
    let gaps = plan.gaps();
    let stages = gaps.len();
    let mut current: Distribution = f.clone();
    let mut table: Option<TabulatedCdf> = None;
    for (j, &lambda) in gaps.iter().enumerate() {
        let stage = stages - j;
        let beta_now = orders[j];
        let src = &current;
        let eval = move |x: f64| -> Result<f64> {
            if x >= r {
                return Ok(0.0);
            }
            invert_step(src, alpha, lambda, beta_now, x, cfg).or_else(|e| match e.estimate() {
                Some(v) if v.is_finite() => Ok(v.clamp(0.0, 1.0)),
                _ => Err(e),
            })
        };
        let sfs: Vec<f64> = map(&xs, &eval).into_iter().collect::<Result<Vec<f64>>>()?;
        let mut cdf: Vec<f64> = sfs.iter().map(|s| 1.0 - s).collect();
        let mut violation = 0.0f64;
        let mut run = 0.0f64;
        for v in cdf.iter_mut() {
            violation = violation.max(run - *v);
            run = run.max(*v);
            *v = run.clamp(0.0, 1.0);
        }
        if violation > STAGE_TOLERANCE {
            return Err(Error::StageFailure { stage, violation });
        }
        let above = if r.is_finite() { Above::One } else { tail };
        let t = TabulatedCdf::with_options(xs.clone(), cdf, Interpolation::MonotoneCubic, Below::LinearTo(0.0), above)
            .or_else(|_| {
                // tail fit failed (flat end): fall back to a jump to one
                let cdf: Vec<f64> = sfs.iter().map(|s| 1.0 - s).collect();
                let mut run = 0.0f64;
                let cdf: Vec<f64> = cdf.into_iter().map(|v| { run = run.max(v); run.clamp(0.0, 1.0) }).collect();
                TabulatedCdf::with_options(xs.clone(), cdf, Interpolation::MonotoneCubic, Below::LinearTo(0.0), Above::One)
            })?;
        current = Distribution::Tabulated(t.clone());
        table = Some(t);
    }
    table.ok_or(Error::domain("empty plan"))
}

/// Both sides of `x^(alpha-1) (J_{beta,p_{1-alpha-beta}} H)(x) = D[p_alpha I_beta p_{-alpha-beta} H](x)`,
/// the right side by a central difference.
pub fn corollary_check(h: &Distribution, p: ScalingParams, x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_base(h, p, x)?;
    if !h.has_density() {
        return Err(Error::NoDensity(alloc::string::String::from("corollary check needs a density")));
    }
    let k = p.k();
    let lhs = forward_pdf(h, p, x, cfg)? / k;
    let step = (1e-3 * x).max(1e-5);
    let g = |y: f64| forward_cdf(h, p, y, ForwardMode::Weyl, cfg).map(|v| v / k);
    // fourth-order central difference
    let d = (-g(x + 2.0 * step)? + 8.0 * g(x + step)? - 8.0 * g(x - step)? + g(x - 2.0 * step)?) / (12.0 * step);
    Ok((lhs, d))
}

/// `H` scaled successively by each parameter pair, evaluated as a cdf at `x`.
pub fn chain_forward(h: &Distribution, params: &[ScalingParams], x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let Some((last, rest)) = params.split_last() else {
        return Ok(h.cdf(x));
    };
    let mut inner = h.clone();
    for p in rest {
        inner = Distribution::Scaled(Box::new(ScaledLaw { base: inner, params: *p, cfg: *cfg })).validated()?;
    }
    forward_cdf(&inner, *last, x, ForwardMode::Weyl, cfg)
}
