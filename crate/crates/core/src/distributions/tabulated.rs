use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interpolation {
    /// Monotone piecewise-cubic Hermite (PCHIP slopes).
    MonotoneCubic,
    /// Piecewise linear; the law has no continuous density.
    Linear,
}

/// Behaviour left of the first grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Below {
    /// cdf is 0; a positive first value becomes an atom.
    Zero,
    /// cdf decreases linearly to 0 at the given abscissa.
    LinearTo(f64),
}

/// Behaviour right of the last grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Above {
    /// cdf jumps to 1; a last value below 1 becomes an atom.
    One,
    /// sf decays like `exp(-kappa (x - x_n))`.
    ExponentialTail,
    /// sf decays like `(x / x_n)^(-gamma)`.
    PowerTail,
    /// cdf increases linearly to 1 at the given abscissa.
    LinearTo(f64),
}

/// What is known about the tail of a tabulated law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailHint {
    /// Finite upper endpoint.
    Endpoint(f64),
    /// Regularly varying tail.
    Frechet,
    /// Rapidly varying tail with infinite endpoint.
    Gumbel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    interpolation: Interpolation,
    below: Below,
    above: Above,
    // decay rate of the exponential tail or index of the power tail
    tail_rate: f64,
    hint: Option<TailHint>,
}

impl TabulatedCdf {
    /// Monotone cubic table, zero below the grid and an atom-free jump to one above.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_options(grid, values, Interpolation::MonotoneCubic, Below::Zero, Above::One)
    }

    pub fn with_options(
        grid: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
        below: Below,
        above: Above,
    ) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::domain("tabulated cdf needs at least two (x, cdf) pairs"));
        }
        if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("tabulated cdf grid must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::domain("tabulated cdf values must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("tabulated cdf values must be nondecreasing"));
        }
        if let Below::LinearTo(l) = below {
            if !(l < grid[0]) {
                return Err(Error::domain("lower extrapolation point must lie left of the grid"));
            }
        }
        if let Above::LinearTo(r) = above {
            if !(r > grid[grid.len() - 1]) {
                return Err(Error::domain("upper extrapolation point must lie right of the grid"));
            }
        }
        let slopes = match interpolation {
            Interpolation::MonotoneCubic => pchip_slopes(&grid, &values),
            Interpolation::Linear => Vec::new(),
        };
        let mut t = TabulatedCdf {
            grid,
            values,
            slopes,
            interpolation,
            below,
            above,
            tail_rate: 0.0,
            hint: None,
        };
        t.fit_tail()?;
        Ok(t)
    }

    pub fn with_hint(mut self, hint: TailHint) -> Self {
        self.hint = Some(hint);
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn below(&self) -> Below {
        self.below
    }

    pub fn above(&self) -> Above {
        self.above
    }

    pub fn hint(&self) -> Option<TailHint> {
        self.hint
    }

    fn last(&self) -> (f64, f64) {
        let n = self.grid.len() - 1;
        (self.grid[n], self.values[n])
    }

    fn fit_tail(&mut self) -> Result<()> {
        let n = self.grid.len() - 1;
        let (xn, vn) = self.last();
        let sf_n = 1.0 - vn;
        match self.above {
            Above::ExponentialTail | Above::PowerTail if sf_n > 0.0 => {
                let (xp, sf_p) = (self.grid[n - 1], 1.0 - self.values[n - 1]);
                let rate = match self.above {
                    Above::ExponentialTail => (sf_p / sf_n).ln() / (xn - xp),
                    _ => {
                        if !(xp > 0.0) {
                            return Err(Error::domain("power tail needs a positive grid"));
                        }
                        (sf_p / sf_n).ln() / (xn / xp).ln()
                    }
                };
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::domain(
                        "cannot fit a decaying tail to the last two grid values",
                    ));
                }
                self.tail_rate = rate;
                if self.interpolation == Interpolation::MonotoneCubic {
                    // match the tail density at the last node
                    let tail_slope = match self.above {
                        Above::ExponentialTail => rate * sf_n,
                        _ => rate * sf_n / xn,
                    };
                    let secant = (vn - self.values[n - 1]) / (xn - xp);
                    self.slopes[n] = tail_slope.min(3.0 * secant).max(0.0);
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Upper end of the support.
    pub fn upper(&self) -> f64 {
        let (xn, vn) = self.last();
        match self.above {
            Above::One => xn,
            Above::LinearTo(r) => r,
            _ if vn >= 1.0 => xn,
            _ => f64::INFINITY,
        }
    }

    pub fn lower(&self) -> f64 {
        match self.below {
            Below::Zero => {
                // first point where the cdf leaves zero
                let k = self.values.iter().position(|&v| v > 0.0).unwrap_or(0);
                if k == 0 {
                    self.grid[0]
                } else {
                    self.grid[k - 1]
                }
            }
            Below::LinearTo(l) => l,
        }
    }

    /// Atoms `(location, mass)` created by the extrapolation policy.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if self.below == Below::Zero && self.values[0] > 0.0 {
            out.push((self.grid[0], self.values[0]));
        }
        let (xn, vn) = self.last();
        if self.above == Above::One && vn < 1.0 {
            out.push((xn, 1.0 - vn));
        }
        out
    }

    /// True when the law has a density (cubic interpolation, no atoms).
    pub fn has_density(&self) -> bool {
        self.interpolation == Interpolation::MonotoneCubic && self.atoms().is_empty()
    }

    fn cell(&self, x: f64) -> usize {
        // index k with grid[k] <= x < grid[k+1]
        let k = self.grid.partition_point(|&g| g <= x);
        k.saturating_sub(1).min(self.grid.len() - 2)
    }

    fn inside(&self, x: f64) -> (f64, f64) {
        let k = self.cell(x);
        let (x0, x1) = (self.grid[k], self.grid[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let h = x1 - x0;
        match self.interpolation {
            Interpolation::Linear => {
                let t = (x - x0) / h;
                (v0 + t * (v1 - v0), (v1 - v0) / h)
            }
            Interpolation::MonotoneCubic => {
                let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
                let t = (x - x0) / h;
                let t2 = t * t;
                let t3 = t2 * t;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                let v = h00 * v0 + h10 * h * m0 + h01 * v1 + h11 * h * m1;
                let d00 = 6.0 * t2 - 6.0 * t;
                let d10 = 3.0 * t2 - 4.0 * t + 1.0;
                let d01 = -d00;
                let d11 = 3.0 * t2 - 2.0 * t;
                let d = (d00 * v0 + d01 * v1) / h + d10 * m0 + d11 * m1;
                (v.clamp(v0, v1), d.max(0.0))
            }
        }
    }

    /// Survivor function of the extrapolated tail right of the grid.
    fn tail_sf(&self, x: f64) -> f64 {
        let (xn, vn) = self.last();
        let sf_n = 1.0 - vn;
        match self.above {
            Above::One => 0.0,
            Above::LinearTo(r) => {
                if x >= r {
                    0.0
                } else {
                    sf_n * (r - x) / (r - xn)
                }
            }
            Above::ExponentialTail => sf_n * (-self.tail_rate * (x - xn)).exp(),
            Above::PowerTail => sf_n * (x / xn).powf(-self.tail_rate),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x0 = self.grid[0];
        let (xn, _) = self.last();
        if x < x0 {
            match self.below {
                Below::Zero => 0.0,
                Below::LinearTo(l) => {
                    if x <= l {
                        0.0
                    } else {
                        self.values[0] * (x - l) / (x0 - l)
                    }
                }
            }
        } else if x >= xn {
            if x == xn && self.above != Above::One {
                return self.values[self.grid.len() - 1];
            }
            1.0 - self.tail_sf(x)
        } else {
            self.inside(x).0
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        let (xn, _) = self.last();
        if x > xn {
            self.tail_sf(x)
        } else {
            1.0 - self.cdf(x)
        }
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        let (xn, vn) = self.last();
        if x > xn && vn < 1.0 {
            let ln_n = (1.0 - vn).ln();
            match self.above {
                Above::ExponentialTail => return ln_n - self.tail_rate * (x - xn),
                Above::PowerTail => return ln_n - self.tail_rate * (x / xn).ln(),
                _ => {}
            }
        }
        self.sf(x).ln()
    }

    /// Density from the analytic derivative of the interpolant.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !self.has_density() {
            return Err(Error::NoDensity(alloc::string::String::from(
                "tabulated law without a continuous density",
            )));
        }
        Ok(self.density_unchecked(x))
    }

    /// Piecewise derivative of the cdf (ignores atoms).
    pub(crate) fn density_unchecked(&self, x: f64) -> f64 {
        let x0 = self.grid[0];
        let (xn, vn) = self.last();
        if x < x0 {
            return match self.below {
                Below::Zero => 0.0,
                Below::LinearTo(l) => {
                    if x <= l {
                        0.0
                    } else {
                        self.values[0] / (x0 - l)
                    }
                }
            };
        }
        if x > xn {
            let sf = self.tail_sf(x);
            return match self.above {
                Above::One => 0.0,
                Above::LinearTo(r) => {
                    if x >= r {
                        0.0
                    } else {
                        (1.0 - vn) / (r - xn)
                    }
                }
                Above::ExponentialTail => self.tail_rate * sf,
                Above::PowerTail => self.tail_rate * sf / x,
            };
        }
        self.inside(x).1
    }

    /// Generalized inverse by bisection (abscissa tolerance 1e-10).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("quantile requires p in [0, 1]"));
        }
        let n = self.grid.len() - 1;
        let (xn, vn) = self.last();
        if p == 0.0 {
            return Ok(self.lower());
        }
        if p > vn {
            let q = 1.0 - p;
            let sf_n = 1.0 - vn;
            return Ok(match self.above {
                Above::One => xn,
                Above::LinearTo(r) => r - q / sf_n * (r - xn),
                Above::ExponentialTail => {
                    if q == 0.0 {
                        f64::INFINITY
                    } else {
                        xn + (sf_n / q).ln() / self.tail_rate
                    }
                }
                Above::PowerTail => {
                    if q == 0.0 {
                        f64::INFINITY
                    } else {
                        xn * (sf_n / q).powf(1.0 / self.tail_rate)
                    }
                }
            });
        }
        if p <= self.values[0] {
            return Ok(match self.below {
                Below::Zero => self.grid[0],
                Below::LinearTo(l) => l + p / self.values[0] * (self.grid[0] - l),
            });
        }
        // first node with value >= p
        let k = self.values.partition_point(|&v| v < p).min(n);
        let (mut lo, mut hi) = (self.grid[k - 1], self.grid[k]);
        while hi - lo > 1e-10 * (1.0 + hi.abs()) {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// PCHIP slopes (Fritsch-Butland weighted harmonic means, one-sided
/// three-point ends with the monotonicity limiter).
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = alloc::vec![0.0; n];
    if n == 2 {
        m[0] = d[0];
        m[1] = d[0];
        return m;
    }
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = end_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        s = 0.0;
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}
