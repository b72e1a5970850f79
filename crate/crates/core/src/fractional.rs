//! Weyl fractional integrals
//! `I_beta h(x) = Gamma(beta)^-1 int_x^inf (y - x)^(beta-1) h(y) dy`
//! and the Stieltjes version `J_{beta,g} H(x)` that integrates against `g dH`.

use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::distributions::{Distribution, Interpolation};
use crate::quadrature::{integrate, integrate_to_infinity, QuadratureConfig};
use crate::special::lgamma;
use crate::{Error, Result};

/// Weight functions `g` for the Stieltjes operator.
#[derive(Clone, Copy)]
pub enum Weight<'a> {
    /// `p_s(y) = y^s`.
    Power(f64),
    Custom(&'a dyn Fn(f64) -> f64),
}

impl Weight<'_> {
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Weight::Power(s) => {
                if *s == 0.0 {
                    1.0
                } else if y > 0.0 {
                    y.powf(*s)
                } else {
                    0.0
                }
            }
            Weight::Custom(f) => f(y),
        }
    }
}

impl core::fmt::Debug for Weight<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Weight::Power(s) => write!(f, "Power({s})"),
            Weight::Custom(_) => f.write_str("Custom"),
        }
    }
}

fn check_order(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain("fractional order must be a finite beta >= 0"));
    }
    Ok(())
}

fn scale_failure(e: Error, factor: f64) -> Error {
    match e {
        Error::NumericFailure { value, error_estimate } => Error::NumericFailure {
            value: value * factor,
            error_estimate: error_estimate * factor,
        },
        other => other,
    }
}

/// `(I_beta h)(x)` with the integral truncated at `upper` (which may be infinite).
pub fn weyl_integral<F: Fn(f64) -> f64>(
    h: F,
    beta: f64,
    x: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    weyl_integral_with_breaks(h, beta, x, upper, &[], cfg)
}

/// As [`weyl_integral`], with known non-smooth points of `h`.
pub fn weyl_integral_with_breaks<F: Fn(f64) -> f64>(
    h: F,
    beta: f64,
    x: f64,
    upper: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_order(beta)?;
    if x.is_nan() || upper.is_nan() {
        return Err(Error::domain("weyl_integral at NaN"));
    }
    if beta == 0.0 {
        return Ok(h(x));
    }
    if !x.is_finite() {
        return Err(Error::domain("weyl_integral needs a finite x"));
    }
    if upper <= x {
        return Ok(0.0);
    }
    let norm = (-lgamma(beta)).exp();
    let raw = raw_weyl(&h, beta, x, upper, breaks, cfg).map_err(|e| scale_failure(e, norm))?;
    Ok(raw * norm)
}

/// `int_x^upper (y - x)^(beta-1) h(y) dy` without the Gamma normalization.
fn raw_weyl<F: Fn(f64) -> f64>(
    h: &F,
    beta: f64,
    x: f64,
    upper: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let split = cfg.tail_split.unwrap_or_else(|| x.abs().max(1.0));
    let c = if upper.is_finite() { upper } else { x + split };
    let mut total = 0.0;
    let mut total_err = 0.0;

    // with a finite upper limit the head stops halfway and the rest is taken
    // with y = c - v^2, which also tames endpoint singularities of h
    let m = if upper.is_finite() { x + 0.5 * (c - x) } else { c };
    let head = if beta < 1.0 {
        // u = (y - x)^beta removes the singularity at x
        let inv = 1.0 / beta;
        let ub: Vec<f64> = breaks
            .iter()
            .filter(|&&b| b > x && b < m)
            .map(|&b| (b - x).powf(beta))
            .collect();
        integrate(
            |u: f64| {
                let v = h(x + u.powf(inv));
                if v == 0.0 {
                    0.0
                } else {
                    v * inv
                }
            },
            0.0,
            (m - x).powf(beta),
            &ub,
            cfg,
        )
    } else {
        let hb: Vec<f64> = breaks.iter().copied().filter(|&b| b > x && b < m).collect();
        integrate(
            |y: f64| {
                let v = h(y);
                if v == 0.0 {
                    0.0
                } else {
                    (y - x).powf(beta - 1.0) * v
                }
            },
            x,
            m,
            &hb,
            cfg,
        )
    }?;
    total += head.value;
    total_err += head.error;
    if upper.is_finite() {
        let vb: Vec<f64> = breaks
            .iter()
            .filter(|&&b| b > m && b < c)
            .map(|&b| (c - b).sqrt())
            .collect();
        let rest = integrate(
            |v: f64| {
                let y = c - v * v;
                let hy = h(y);
                if hy == 0.0 {
                    0.0
                } else {
                    2.0 * v * (y - x).powf(beta - 1.0) * hy
                }
            },
            0.0,
            (c - m).sqrt(),
            &vb,
            cfg,
        )?;
        total += rest.value;
        total_err += rest.error;
    }
    if upper.is_finite() {
        return Ok(total);
    }
    let tail_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol.max(cfg.rel_tol * total.abs()),
        ..*cfg
    };
    let tail_breaks: Vec<f64> = breaks.iter().copied().filter(|&b| b > c).collect();
    let tail = integrate_to_infinity(
        |y: f64| {
            let v = h(y);
            if v == 0.0 {
                0.0
            } else {
                (y - x).powf(beta - 1.0) * v
            }
        },
        c,
        &tail_breaks,
        &tail_cfg,
    );
    match tail {
        Ok(e) => Ok(total + e.value),
        Err(Error::NumericFailure { value, error_estimate }) => Err(Error::NumericFailure {
            value: total + value,
            error_estimate: total_err + error_estimate,
        }),
        Err(e) => Err(e),
    }
}

/// `(J_{beta,g} H)(x) = Gamma(beta)^-1 int_x^{r_H} (y - x)^(beta-1) g(y) dH(y)`;
/// order zero gives `g(x) h(x)`.
pub fn weyl_stieltjes(
    dist: &Distribution,
    g: Weight<'_>,
    beta: f64,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_order(beta)?;
    if x.is_nan() {
        return Err(Error::domain("weyl_stieltjes at NaN"));
    }
    if beta == 0.0 {
        return Ok(g.eval(x) * dist.pdf(x)?);
    }
    let norm = (-lgamma(beta)).exp();
    match dist {
        Distribution::PointMass(c) => {
            if *c > x {
                Ok(g.eval(*c) * (c - x).powf(beta - 1.0) * norm)
            } else {
                Ok(0.0)
            }
        }
        Distribution::Tabulated(t) if !t.has_density() => {
            let mut sum = 0.0;
            for (loc, mass) in t.atoms() {
                if loc > x {
                    sum += g.eval(loc) * (loc - x).powf(beta - 1.0) * mass;
                }
            }
            let grid = t.grid();
            let vals = t.values();
            // cell masses, with the kernel integrated exactly over each cell
            let kernel = |a: f64, b: f64| {
                let lo = a.max(x);
                if b <= lo {
                    0.0
                } else {
                    ((b - x).powf(beta) - (lo - x).powf(beta)) / beta
                }
            };
            // g is taken at the kernel centroid of the cell, exact for linear g
            let centroid = |a: f64, b: f64| {
                let lo = a.max(x);
                let num = (b - x).powf(beta + 1.0) - (lo - x).powf(beta + 1.0);
                let den = (b - x).powf(beta) - (lo - x).powf(beta);
                let c = x + beta / (beta + 1.0) * num / den;
                if c.is_finite() && c >= lo && c <= b {
                    c
                } else {
                    0.5 * (lo + b)
                }
            };
            let mut cell = |a: f64, b: f64, mass: f64| {
                if mass > 0.0 && b > x {
                    sum += g.eval(centroid(a, b)) * mass / (b - a) * kernel(a, b);
                }
            };
            if t.interpolation() == Interpolation::Linear {
                for k in 0..grid.len() - 1 {
                    cell(grid[k], grid[k + 1], vals[k + 1] - vals[k]);
                }
            } else {
                for k in 0..grid.len() - 1 {
                    cell(grid[k], grid[k + 1], t.cdf(grid[k + 1]) - t.cdf(grid[k]));
                }
            }
            if let crate::distributions::Below::LinearTo(l) = t.below() {
                cell(l, grid[0], vals[0]);
            }
            // smooth extrapolated tail beyond the grid
            let xn = grid[grid.len() - 1];
            let upper = t.upper();
            if upper > xn {
                let start = x.max(xn);
                let tail = raw_weyl(
                    &|y: f64| if y > xn { g.eval(y) * t.density_unchecked(y) } else { 0.0 },
                    beta,
                    x,
                    upper,
                    &[start],
                    cfg,
                )
                .map_err(|e| scale_failure(e, norm))?;
                sum += tail;
            }
            Ok(sum * norm)
        }
        _ => {
            if !dist.has_density() {
                return Err(Error::NoDensity(alloc::format!(
                    "{} law has no density for the Stieltjes integral",
                    dist.family().name()
                )));
            }
            let (_, r) = dist.support();
            let breaks = dist.breakpoints();
            weyl_integral_with_breaks(
                |y| {
                    let gy = g.eval(y);
                    if gy == 0.0 {
                        return 0.0;
                    }
                    match dist.pdf(y) {
                        Ok(f) if f > 0.0 && f.is_finite() => gy * f,
                        _ => 0.0,
                    }
                },
                beta,
                x,
                r,
                &breaks,
                cfg,
            )
        }
    }
}
