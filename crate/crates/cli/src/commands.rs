//! Subcommand definitions and their evaluation.

use std::path::PathBuf;

use betascale_core::distributions::{eval, mda_classify, What, SAMPLE_CHUNK};
use betascale_core::elliptical::{
    conditional_sf_exceed, default_t_grid, gaussian_approx_sf, sample_elliptical_chunk, EllipticalModel, ExceedMethod,
    PointConditional,
};
use betascale_core::estimation::{pipeline, EstimatorConfig, RadiusSource, SampleBatch, SMALL_SAMPLE};
use betascale_core::fractional::{weyl_integral, weyl_stieltjes, Weight};
use betascale_core::scaling::{
    default_grid, forward_cdf, forward_pdf, forward_sf, invert_iterative, invert_onestep, ForwardMode, InvertOptions,
};
use betascale_core::tails::{predict_frechet, predict_gumbel, predict_weibull, MdaClass, TailPrediction};
use betascale_core::{IterationPlan, QuadratureConfig, ScalingFunction, ScalingParams};
use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::Output;
use crate::spec::{read_pairs, Inputs};

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cmd {
    /// Evaluate, sample or classify a distribution.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Weyl fractional integrals, for debugging.
    #[command(subcommand)]
    Frac(FracCmd),
    /// Forward beta scaling and its inversion.
    #[command(subcommand)]
    Scale(ScaleCmd),
    /// Tail asymptotics of the scaled law.
    #[command(subcommand)]
    Tail(TailCmd),
    /// Elliptical pairs and their conditional limits.
    #[command(subcommand)]
    Ellip(EllipCmd),
    /// Correlation and Weibull-tail fit from a `u,v` sample.
    Estimate(EstimateArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistCmd {
    Eval {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value = "cdf")]
        what: WhatArg,
        #[command(flatten)]
        points: Points,
    },
    Sample {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Classify {
        #[arg(long)]
        dist: PathBuf,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FracCmd {
    /// `I_beta p_s` at each x.
    Weyl {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        weight: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        upper: f64,
        #[command(flatten)]
        points: Points,
    },
    /// `J_{beta, p_s} H` at each x.
    Stieltjes {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        weight: f64,
        #[command(flatten)]
        points: Points,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleCmd {
    /// cdf, sf or pdf of `B Y`.
    Forward {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value = "cdf")]
        what: WhatArg,
        #[arg(long, value_enum, default_value = "weyl")]
        mode: ModeArg,
        #[command(flatten)]
        points: Points,
    },
    /// cdf of `Y` recovered from the law of `B Y`.
    Invert {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Decreasing orders starting at beta; runs the iterative scheme.
        #[arg(long, value_delimiter = ',')]
        plan: Vec<f64>,
        /// Allow nested differences for beta > 1 without a plan.
        #[arg(long)]
        higher_order: bool,
        #[command(flatten)]
        points: Points,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailCmd {
    /// (prediction, direct, ratio) triples. Weibull points are distances below the endpoint.
    Ratio {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value = "auto")]
        mda: MdaArg,
        #[command(flatten)]
        points: Points,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EllipCmd {
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Conditional {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, value_enum, default_value = "point")]
        kind: KindArg,
        /// Standardized points for the point kind; defaults to 61 points on [-3, 3].
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Levels for the exceed kind; defaults to rho x + sqrt(1 - rho^2) t / c(x) on the t grid.
        #[arg(long, value_delimiter = ',')]
        y: Vec<f64>,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: MethodArg,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    radial: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of upper order statistics, or `auto` for ceil(n^0.6).
    #[arg(long, default_value = "auto")]
    kn: String,
    #[arg(long, value_enum, default_value = "r1")]
    source: SourceArg,
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.95,0.99")]
    s: Vec<f64>,
    /// Levels for the conditional survivor; defaults to rho_hat x.
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
}

/// Evaluation points: a list or an inclusive `a:b:n` grid.
#[derive(Debug, Args, Serialize)]
pub struct Points {
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long, value_name = "A:B:N")]
    x_grid: Option<String>,
}

impl Points {
    fn resolve(&self) -> CliResult<Option<Vec<f64>>> {
        match (&self.x_grid, self.x.is_empty()) {
            (Some(_), false) => Err(CliError::Usage("give either --x or --x-grid, not both".into())),
            (Some(g), true) => parse_grid(g).map(Some),
            (None, false) => Ok(Some(self.x.clone())),
            (None, true) => Ok(None),
        }
    }

    fn required(&self) -> CliResult<Vec<f64>> {
        self.resolve()?.ok_or_else(|| CliError::Usage("evaluation points needed: --x or --x-grid".into()))
    }
}

pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("grid '{s}' is not of the form a:b:n"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WhatArg {
    Cdf,
    Sf,
    Pdf,
    Quantile,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Weyl,
    Mixture,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MdaArg {
    Auto,
    Gumbel,
    Frechet,
    Weibull,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Point,
    Exceed,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Quadrature,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceArg {
    R1,
    R2,
    V,
}

/// Evaluates `f` at every point in parallel. The first failure in grid order wins.
fn par_map<F>(xs: &[f64], f: F) -> CliResult<Vec<f64>>
where
    F: Fn(f64) -> betascale_core::Result<f64> + Sync,
{
    let out: Vec<betascale_core::Result<f64>> = xs.par_iter().map(|&x| f(x)).collect();
    out.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn columns(xs: &[f64], vals: &[f64]) -> Output {
    Output::csv(&["x", "value"], xs.iter().zip(vals).map(|(&x, &v)| vec![x, v]).collect())
}

/// Chunked parallel draws; identical to the sequential stream layout.
fn chunked<T: Send>(n: usize, f: impl Fn(u64, usize) -> Vec<T> + Sync) -> Vec<T> {
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|k| f(k as u64, SAMPLE_CHUNK.min(n - k * SAMPLE_CHUNK)))
        .collect();
    parts.into_iter().flatten().collect()
}

pub struct Run {
    pub name: &'static str,
    pub output: Output,
    pub seeds: Vec<u64>,
}

pub fn execute(cmd: &Cmd, inputs: &mut Inputs) -> CliResult<Run> {
    let cfg = QuadratureConfig::default();
    let run = |name, output| Ok(Run { name, output, seeds: vec![] });
    match cmd {
        Cmd::Dist(DistCmd::Eval { dist, what, points }) => {
            let d = inputs.distribution(dist)?;
            let xs = points.required()?;
            let what = match what {
                WhatArg::Cdf => What::Cdf,
                WhatArg::Sf => What::Sf,
                WhatArg::Pdf => What::Pdf,
                WhatArg::Quantile => What::Quantile,
            };
            let vals = par_map(&xs, |x| eval(&d, what, x))?;
            run("dist eval", columns(&xs, &vals))
        }
        Cmd::Dist(DistCmd::Sample { dist, n, seed }) => {
            let d = inputs.distribution(dist)?;
            let draws = chunked(*n, |k, len| d.sample_chunk(*seed, k, len));
            let rows = draws.into_iter().map(|v| vec![v]).collect();
            Ok(Run { name: "dist sample", output: Output::csv(&["value"], rows), seeds: vec![*seed] })
        }
        Cmd::Dist(DistCmd::Classify { dist }) => {
            let d = inputs.distribution(dist)?;
            let c = mda_classify(&d);
            let mut v = class_json(&c.class);
            v["numeric"] = json!(c.numeric);
            v["r_squared"] = json!(c.r_squared);
            run("dist classify", Output::Json(v))
        }
        Cmd::Frac(FracCmd::Weyl { beta, weight, upper, points }) => {
            let xs = points.required()?;
            let s = *weight;
            let vals = par_map(&xs, |x| weyl_integral(|y| Weight::Power(s).eval(y), *beta, x, *upper, &cfg))?;
            run("frac weyl", columns(&xs, &vals))
        }
        Cmd::Frac(FracCmd::Stieltjes { dist, beta, weight, points }) => {
            let d = inputs.distribution(dist)?;
            let xs = points.required()?;
            let vals = par_map(&xs, |x| weyl_stieltjes(&d, Weight::Power(*weight), *beta, x, &cfg))?;
            run("frac stieltjes", columns(&xs, &vals))
        }
        Cmd::Scale(ScaleCmd::Forward { dist, alpha, beta, what, mode, points }) => {
            let h = inputs.distribution(dist)?;
            let p = ScalingParams::new(*alpha, *beta)?;
            let xs = points.required()?;
            let mode = match mode {
                ModeArg::Weyl => ForwardMode::Weyl,
                ModeArg::Mixture => ForwardMode::Mixture,
            };
            let vals = match what {
                WhatArg::Cdf => par_map(&xs, |x| forward_cdf(&h, p, x, mode, &cfg))?,
                WhatArg::Sf => par_map(&xs, |x| forward_sf(&h, p, x, mode, &cfg))?,
                WhatArg::Pdf => par_map(&xs, |x| forward_pdf(&h, p, x, &cfg))?,
                WhatArg::Quantile => {
                    return Err(CliError::Usage("scale forward evaluates cdf, sf or pdf".into()));
                }
            };
            run("scale forward", columns(&xs, &vals))
        }
        Cmd::Scale(ScaleCmd::Invert { dist, alpha, beta, plan, higher_order, points }) => {
            let f = inputs.distribution(dist)?;
            let p = ScalingParams::new(*alpha, *beta)?;
            let given = points.resolve()?;
            if plan.is_empty() {
                let xs = match given {
                    Some(xs) => xs,
                    None => default_grid(&f, 200)?,
                };
                let opts = InvertOptions { allow_higher_order: *higher_order, cfg };
                let vals = par_map(&xs, |x| invert_onestep(&f, p, x, &opts).map(|sf| 1.0 - sf))?;
                run("scale invert", columns(&xs, &vals))
            } else {
                let plan = IterationPlan::new(plan)?;
                if (plan.beta() - beta).abs() > 1e-12 * beta.max(1.0) {
                    return Err(CliError::Usage(format!(
                        "the plan starts at {} but --beta is {beta}",
                        plan.beta()
                    )));
                }
                let grid = match given {
                    Some(xs) => xs,
                    None => default_grid(&f, 200)?,
                };
                let table = invert_iterative(&f, *alpha, &plan, &grid, &cfg)?;
                let vals: Vec<f64> = grid.iter().map(|&x| table.cdf(x)).collect();
                run("scale invert", columns(&grid, &vals))
            }
        }
        Cmd::Tail(TailCmd::Ratio { dist, alpha, beta, mda, points }) => {
            let h = inputs.distribution(dist)?;
            let p = ScalingParams::new(*alpha, *beta)?;
            let xs = points.required()?;
            let mode = match mda {
                MdaArg::Auto => match mda_classify(&h).class {
                    MdaClass::Gumbel(_) => MdaArg::Gumbel,
                    MdaClass::Frechet(_) => MdaArg::Frechet,
                    MdaClass::Weibull { .. } => MdaArg::Weibull,
                    MdaClass::Unclassified => {
                        return Err(CliError::Core(betascale_core::Error::Unclassified));
                    }
                },
                m => *m,
            };
            let rows: Vec<betascale_core::Result<TailPrediction>> = xs
                .par_iter()
                .map(|&x| match mode {
                    MdaArg::Gumbel => predict_gumbel(&h, p, x, &cfg),
                    MdaArg::Frechet => predict_frechet(&h, p, x, &cfg),
                    _ => predict_weibull(&h, p, x, &cfg),
                })
                .collect();
            let mut out = Vec::with_capacity(rows.len());
            for (x, r) in xs.iter().zip(rows) {
                let t = r?;
                out.push(json!({"x": x, "prediction": t.prediction, "direct": t.direct, "ratio": t.ratio}));
            }
            let label = match mode {
                MdaArg::Gumbel => "gumbel",
                MdaArg::Frechet => "frechet",
                _ => "weibull",
            };
            run("tail ratio", Output::Json(json!({"mda": label, "rows": out})))
        }
        Cmd::Ellip(EllipCmd::Simulate { model, n, seed }) => {
            let m = model.build(inputs)?;
            let pairs = chunked(*n, |k, len| sample_elliptical_chunk(&m, *seed, k, len));
            let rows = pairs.into_iter().map(|(u, v)| vec![u, v]).collect();
            Ok(Run { name: "ellip simulate", output: Output::csv(&["u", "v"], rows), seeds: vec![*seed] })
        }
        Cmd::Ellip(EllipCmd::Conditional { model, x, kind, t, y, method, n, seed }) => {
            let m = model.build(inputs)?;
            let cfg = QuadratureConfig::relative(1e-10);
            let c = m.norming(*x)?;
            let ts = if t.is_empty() { default_t_grid() } else { t.clone() };
            match kind {
                KindArg::Point => {
                    let pc = PointConditional::new(&m, *x, &cfg)?;
                    let mut rows = Vec::with_capacity(ts.len());
                    for &t in &ts {
                        rows.push(json!({"t": t, "density": pc.density(t), "cdf": pc.cdf(t, &cfg)?}));
                    }
                    run("ellip conditional", Output::Json(json!({"x": x, "kind": "point", "norming": c, "rows": rows})))
                }
                KindArg::Exceed => {
                    let s = (1.0 - m.rho * m.rho).sqrt();
                    let ys = if y.is_empty() { ts.iter().map(|t| m.rho * x + s * t / c).collect() } else { y.clone() };
                    let method_v = match method {
                        MethodArg::Quadrature => ExceedMethod::Quadrature,
                        MethodArg::Montecarlo => ExceedMethod::MonteCarlo { n: *n, seed: *seed },
                    };
                    let w = m.scaling_function()?;
                    let mut rows = Vec::with_capacity(ys.len());
                    for &yv in &ys {
                        let e = conditional_sf_exceed(&m, *x, yv, method_v, &cfg)?;
                        let g = gaussian_approx_sf(&m, *x, yv, &w)?;
                        rows.push(json!({"y": yv, "value": e.value, "std_error": e.std_error, "gaussian": g}));
                    }
                    let seeds = match method {
                        MethodArg::Montecarlo => vec![*seed],
                        MethodArg::Quadrature => vec![],
                    };
                    let out = json!({"x": x, "kind": "exceed", "norming": c, "rows": rows});
                    Ok(Run { name: "ellip conditional", output: Output::Json(out), seeds })
                }
            }
        }
        Cmd::Estimate(a) => estimate(a, inputs),
    }
}

impl ModelArgs {
    fn build(&self, inputs: &mut Inputs) -> CliResult<EllipticalModel> {
        let radial = inputs.distribution(&self.radial)?;
        Ok(EllipticalModel::new(self.rho, radial)?)
    }
}

fn estimate(a: &EstimateArgs, inputs: &mut Inputs) -> CliResult<Run> {
    let bytes = inputs.read(&a.input)?;
    let (u, v) = read_pairs(&bytes).map_err(|m| CliError::Input(format!("{}: {m}", a.input.display())))?;
    let batch = SampleBatch::new(u, v)?;
    let kn = match a.kn.as_str() {
        "auto" => None,
        s => Some(s.parse::<usize>().map_err(|_| CliError::Usage(format!("--kn must be 'auto' or a count, got '{s}'")))?),
    };
    let source = match a.source {
        SourceArg::R1 => RadiusSource::R1,
        SourceArg::R2 => RadiusSource::R2,
        SourceArg::V => RadiusSource::V,
    };
    let res = pipeline(&batch, &EstimatorConfig { kn, source })?;
    let mut warnings = Vec::new();
    if res.small_sample {
        warnings.push(format!("small sample: n = {} < {SMALL_SAMPLE}", batch.len()));
    }
    if res.fit.nonpositive > 0 {
        warnings.push(format!("{} nonpositive radii never enter the tail fit", res.fit.nonpositive));
    }
    let mut psi = Vec::new();
    let mut theta_fn = Vec::new();
    for &x in &a.x {
        let ys = if a.y.is_empty() { vec![res.rho * x] } else { a.y.clone() };
        for y in ys {
            psi.push(json!({"x": x, "y": y, "value": res.psi(x, y)?}));
        }
        for &s in &a.s {
            theta_fn.push(json!({"x": x, "s": s, "value": res.quantile(x, s)?}));
        }
    }
    let out = json!({
        "n": batch.len(),
        "tau_hat": res.tau,
        "rho_hat": res.rho,
        "theta_hat": res.fit.theta,
        "r_hat": res.fit.r,
        "kn": res.fit.kn,
        "source": res.fit.source.label(),
        "psi": psi,
        "theta_fn": theta_fn,
        "warnings": warnings,
    });
    Ok(Run { name: "estimate", output: Output::Json(out), seeds: vec![] })
}

fn w_json(w: &ScalingFunction) -> Value {
    match w {
        ScalingFunction::Constant(b) => json!({"kind": "constant", "value": b}),
        ScalingFunction::Power { r, theta } => json!({"kind": "power", "r": r, "theta": theta}),
        ScalingFunction::VonMises(_) => json!({"kind": "pdf_over_sf"}),
        ScalingFunction::Transformed { inner, p } => json!({"kind": "transformed", "p": p, "inner": w_json(inner)}),
    }
}

fn class_json(c: &MdaClass) -> Value {
    match c {
        MdaClass::Gumbel(w) => json!({"class": "gumbel", "scaling_function": w_json(w)}),
        MdaClass::Frechet(g) => json!({"class": "frechet", "index": g}),
        MdaClass::Weibull { gamma, endpoint } => json!({"class": "weibull", "index": gamma, "endpoint": endpoint}),
        MdaClass::Unclassified => json!({"class": "unclassified"}),
    }
}
