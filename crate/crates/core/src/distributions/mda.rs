use alloc::vec::Vec;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{Above, Distribution, ScalingFunction, TabulatedCdf, TailHint};

/// Max-domain of attraction.
#[derive(Debug, Clone, PartialEq)]
pub enum MdaClass {
    Gumbel(ScalingFunction),
    Frechet(f64),
    Weibull { gamma: f64, endpoint: f64 },
    Unclassified,
}

impl MdaClass {
    pub fn label(&self) -> &'static str {
        match self {
            MdaClass::Gumbel(_) => "gumbel",
            MdaClass::Frechet(_) => "frechet",
            MdaClass::Weibull { .. } => "weibull",
            MdaClass::Unclassified => "unclassified",
        }
    }
}

/// Outcome of [`mda_classify`]. Numeric fits report their goodness of fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: MdaClass,
    /// True when the class came from a regression on tabulated values.
    pub numeric: bool,
    /// Coefficient of determination of the deciding regression (1 for exact).
    pub r_squared: f64,
}

impl Classification {
    fn exact(class: MdaClass) -> Self {
        Classification { class, numeric: false, r_squared: 1.0 }
    }
}

pub fn mda_classify(dist: &Distribution) -> Classification {
    use Distribution as D;
    let class = match dist {
        D::Uniform { b, .. } => MdaClass::Weibull { gamma: 1.0, endpoint: *b },
        D::Beta { b, .. } => MdaClass::Weibull { gamma: *b, endpoint: 1.0 },
        D::Gamma { rate, .. } | D::Exponential { rate } => MdaClass::Gumbel(ScalingFunction::Constant(*rate)),
        D::Pareto { gamma, .. } => MdaClass::Frechet(*gamma),
        D::Rayleigh { sigma } => MdaClass::Gumbel(ScalingFunction::Power {
            r: 0.5 / (sigma * sigma),
            theta: 2.0,
        }),
        D::Kotz { r, theta, .. } => MdaClass::Gumbel(if *theta == 1.0 {
            ScalingFunction::Constant(*r)
        } else {
            ScalingFunction::Power { r: *r, theta: *theta }
        }),
        D::PointMass(c) => MdaClass::Weibull { gamma: 0.0, endpoint: *c },
        D::Tabulated(t) => return classify_table(t),
        D::Scaled(s) => {
            let inner = mda_classify(&s.base);
            let class = match inner.class {
                MdaClass::Weibull { gamma, endpoint } => MdaClass::Weibull {
                    gamma: gamma + s.params.beta,
                    endpoint,
                },
                other => other,
            };
            return Classification { class, ..inner };
        }
    };
    Classification::exact(class)
}

// Probability window used by the numeric tail fits.
const SF_HI: f64 = 1e-2;
const SF_LO: f64 = 1e-4;
const POINTS: usize = 40;
const FRECHET_SLOPE_AGREEMENT: f64 = 0.15;
const MIN_R2: f64 = 0.99;

struct Fit {
    slope: f64,
    intercept: f64,
    r2: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let n = xs.len() as f64;
    if xs.len() < 3 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some(Fit { slope, intercept: my - slope * mx, r2 })
}

/// Numeric classification of a tabulated law from the tail window
/// `sf in [1e-4, 1e-2]`, restricted to the tabulated range.
pub fn classify_table(t: &TabulatedCdf) -> Classification {
    let unclassified = |r2: f64| Classification { class: MdaClass::Unclassified, numeric: true, r_squared: r2 };
    let grid = t.grid();
    let xn = grid[grid.len() - 1];
    let vn = t.values()[grid.len() - 1];
    let endpoint = match t.hint() {
        Some(TailHint::Endpoint(r)) => Some(r),
        Some(_) => None,
        // a table that reaches one without a tail extension has a finite endpoint
        None if vn >= 1.0 && matches!(t.above(), Above::One | Above::LinearTo(_)) => {
            t.values().iter().position(|&v| v >= 1.0).map(|i| grid[i])
        }
        None => None,
    };
    let q = |p: f64| t.quantile(p).unwrap_or(f64::NAN);
    let x_hi_sf = q(1.0 - SF_HI);
    let x_lo_sf = if 1.0 - vn > SF_LO { xn } else { q(1.0 - SF_LO) };
    if !(x_lo_sf > x_hi_sf) {
        return unclassified(0.0);
    }
    let sf_span = t.sf(x_hi_sf) / t.sf(x_lo_sf).max(f64::MIN_POSITIVE);
    if !(sf_span >= 10.0) {
        return unclassified(0.0);
    }

    if let Some(r) = endpoint {
        // sf(r - d) ~ c d^gamma: slope of log sf against log d
        let d_far = r - x_hi_sf;
        let d_near = r - x_lo_sf;
        if !(d_near > 0.0 && d_far > d_near) {
            return unclassified(0.0);
        }
        let ds: Vec<f64> = geometric(d_near, d_far, POINTS);
        let xs: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = ds.iter().map(|&d| t.sf(r - d).ln()).collect();
        return match least_squares(&xs, &ys) {
            Some(f) if f.r2 >= MIN_R2 && f.slope >= 0.0 => Classification {
                class: MdaClass::Weibull { gamma: f.slope, endpoint: r },
                numeric: true,
                r_squared: f.r2,
            },
            Some(f) => unclassified(f.r2),
            None => unclassified(0.0),
        };
    }

    if !(x_hi_sf > 0.0) {
        return unclassified(0.0);
    }
    let xs_lin = geometric(x_hi_sf, x_lo_sf, POINTS);
    let lx: Vec<f64> = xs_lin.iter().map(|x| x.ln()).collect();
    let lsf: Vec<f64> = xs_lin.iter().map(|&x| t.ln_sf(x)).collect();
    let half = POINTS / 2;
    let whole = least_squares(&lx, &lsf);
    let lower = least_squares(&lx[..half], &lsf[..half]);
    let upper = least_squares(&lx[half..], &lsf[half..]);
    let allow_frechet = t.hint() != Some(TailHint::Gumbel);
    let allow_gumbel = t.hint() != Some(TailHint::Frechet);
    if let (Some(w), Some(a), Some(b)) = (whole, lower, upper) {
        let agree = (a.slope - b.slope).abs() <= FRECHET_SLOPE_AGREEMENT * a.slope.abs().max(b.slope.abs());
        if allow_frechet && agree && w.r2 >= MIN_R2 && w.slope < 0.0 {
            return Classification {
                class: MdaClass::Frechet(-w.slope),
                numeric: true,
                r_squared: w.r2,
            };
        }
    }
    if !allow_gumbel {
        return unclassified(0.0);
    }
    // -ln sf ~ r x^theta
    let lls: Vec<f64> = lsf.iter().map(|v| (-v).ln()).collect();
    match least_squares(&lx, &lls) {
        Some(f) if f.r2 >= MIN_R2 && f.slope > 0.0 => {
            let r = f.intercept.exp();
            let w = if (f.slope - 1.0).abs() < 1e-12 {
                ScalingFunction::Constant(r)
            } else {
                ScalingFunction::Power { r, theta: f.slope }
            };
            Classification { class: MdaClass::Gumbel(w), numeric: true, r_squared: f.r2 }
        }
        Some(f) => unclassified(f.r2),
        None => unclassified(0.0),
    }
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}
