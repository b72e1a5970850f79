//! Globally adaptive Gauss-Kronrod (10/21) quadrature with helpers for
//! half-infinite ranges.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

// inherent float methods shadow these when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Tolerances and limits for every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals kept by the adaptive scheme.
    pub max_subdivisions: usize,
    /// Length of the finite piece `[x, x + L]` integrated directly before the
    /// remaining tail is mapped by `y = c e^v`. `None` picks `max(1, |x|)`.
    pub tail_split: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            tail_split: None,
        }
    }
}

impl QuadratureConfig {
    /// Tight tolerances for identity checks and tail values.
    pub fn precise() -> Self {
        QuadratureConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
            tail_split: None,
        }
    }

    /// Tolerance on a tiny scale: relative accuracy only.
    pub fn relative(rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol: 1e-300,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

/// Result of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_460,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_958_109_831,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

fn qk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]`, starting from the subintervals cut by `breaks`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    if a.is_nan() || b.is_nan() || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if b < a {
        let est = integrate(f, b, a, breaks, cfg)?;
        return Ok(Estimate { value: -est.value, error: est.error });
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(a);
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::with_capacity(cfg.max_subdivisions + cuts.len());
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let (value, error) = qk21(&mut f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    loop {
        if !total.is_finite() || total_err.is_nan() {
            return Err(Error::NumericFailure { value: total, error_estimate: total_err });
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(Estimate { value: total, error: total_err });
        }
        if heap.len() >= cfg.max_subdivisions {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = qk21(&mut f, worst.a, mid);
        let (v2, e2) = qk21(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // Resum to keep rounding drift out of the running totals.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    total = heap.iter().map(|p| p.value).sum();
    total_err = heap.iter().map(|p| p.error).sum();
    if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        return Ok(Estimate { value: total, error: total_err });
    }
    Err(Error::NumericFailure { value: total, error_estimate: total_err })
}

/// Integrate `f` over `[a, infinity)`.
///
/// The range is split at `c = a + L`; `[a, c]` is integrated directly and the
/// tail through `y = c e^v`, `v = (1 - t) / t`, which turns both exponential and
/// power-law decay into an integrand that vanishes smoothly at `t = 0`.
/// `a + L` must be positive; when `a <= 0` the split is placed at `max(1, a + L)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let split = cfg.tail_split.unwrap_or_else(|| a.abs().max(1.0));
    let c = (a + split).max(1.0);
    let head = integrate(&mut f, a, c, breaks, cfg)?;
    let tail_breaks: Vec<f64> = breaks
        .iter()
        .filter(|&&p| p > c)
        .map(|&p| {
            // invert y = c exp((1 - t)/t)
            let v = (p / c).ln();
            1.0 / (1.0 + v)
        })
        .collect();
    let sub = QuadratureConfig {
        abs_tol: cfg.abs_tol.max(cfg.rel_tol * head.value.abs()) * 0.5,
        ..*cfg
    };
    let tail = integrate(
        |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let v = (1.0 - t) / t;
            let ev = v.exp();
            let y = c * ev;
            if !y.is_finite() {
                return 0.0;
            }
            let fy = f(y);
            if fy == 0.0 {
                return 0.0;
            }
            let jac = y / (t * t);
            if !jac.is_finite() {
                return 0.0;
            }
            fy * jac
        },
        0.0,
        1.0,
        &tail_breaks,
        &sub,
    );
    let tail = match tail {
        Ok(t) => t,
        Err(Error::NumericFailure { value, error_estimate }) => {
            return Err(Error::NumericFailure {
                value: head.value + value,
                error_estimate: head.error + error_estimate,
            })
        }
        Err(e) => return Err(e),
    };
    Ok(Estimate {
        value: head.value + tail.value,
        error: head.error + tail.error,
    })
}

/// Integrate over `[a, b]` where `b` may be `+infinity`.
pub fn integrate_range<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if b == f64::INFINITY {
        integrate_to_infinity(f, a, breaks, cfg)
    } else {
        integrate(f, a, b, breaks, cfg)
    }
}
