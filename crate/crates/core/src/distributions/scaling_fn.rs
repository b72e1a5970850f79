use alloc::boxed::Box;
use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::Distribution;
use crate::{Error, Result};

/// Scaling function `w` of a law in the Gumbel max-domain:
/// `sf(x + t / w(x)) / sf(x) -> exp(-t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingFunction {
    Constant(f64),
    /// `w(x) = r theta x^(theta - 1)`.
    Power { r: f64, theta: f64 },
    /// Numeric von Mises ratio `pdf / sf` of the given law.
    VonMises(Box<Distribution>),
    /// `w_p(x) = x^(1/p - 1) w(x^(1/p)) / p`, the scaling function of `X^p`.
    Transformed { inner: Box<ScalingFunction>, p: f64 },
}

impl ScalingFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalingFunction::Constant(b) => *b,
            ScalingFunction::Power { r, theta } => {
                if *theta == 1.0 {
                    *r
                } else {
                    r * theta * x.powf(theta - 1.0)
                }
            }
            ScalingFunction::VonMises(d) => {
                let f = match d.ln_pdf(x) {
                    Ok(v) => v,
                    Err(_) => return f64::NAN,
                };
                (f - d.ln_sf(x)).exp()
            }
            ScalingFunction::Transformed { inner, p } => {
                let q = 1.0 / p;
                x.powf(q - 1.0) * inner.eval(x.powf(q)) / p
            }
        }
    }

    /// Scaling function of `X^p` when `X` has scaling function `self`.
    /// Power forms stay closed: `(r, theta) -> (r, theta / p)`.
    pub fn power_transform(&self, p: f64) -> Result<ScalingFunction> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::domain("power transform needs p > 0"));
        }
        if p == 1.0 {
            return Ok(self.clone());
        }
        let closed = |r: f64, theta: f64| {
            let t = theta / p;
            if t == 1.0 {
                ScalingFunction::Constant(r)
            } else {
                ScalingFunction::Power { r, theta: t }
            }
        };
        Ok(match self {
            ScalingFunction::Constant(b) => closed(*b, 1.0),
            ScalingFunction::Power { r, theta } => closed(*r, *theta),
            other => ScalingFunction::Transformed {
                inner: Box::new(other.clone()),
                p,
            },
        })
    }

    /// `x w(x)` on the grid; it should grow without bound toward the endpoint.
    pub fn x_w_profile(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&x| x * self.eval(x)).collect()
    }

    /// `max_t |w(x + t / w(x)) / w(x) - 1|` over `ts`.
    pub fn self_neglecting_defect(&self, x: f64, ts: &[f64]) -> f64 {
        let wx = self.eval(x);
        ts.iter()
            .map(|&t| (self.eval(x + t / wx) / wx - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `sf(x) = exp(-r x^theta (1 + o(1)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullTailModel {
    pub r: f64,
    pub theta: f64,
}

impl WeibullTailModel {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && theta > 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::domain("Weibull-tail model needs r > 0 and theta > 0"));
        }
        Ok(WeibullTailModel { r, theta })
    }

    /// Leading-order survivor function.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.r * x.powf(self.theta)).exp()
        }
    }

    pub fn scaling_function(&self) -> ScalingFunction {
        if self.theta == 1.0 {
            ScalingFunction::Constant(self.r)
        } else {
            ScalingFunction::Power {
                r: self.r,
                theta: self.theta,
            }
        }
    }
}
