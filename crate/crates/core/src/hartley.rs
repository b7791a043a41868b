//! The half-Hartley transform
//! `(H f)(x) = sqrt(2/pi) int_0^inf [cos(xt) + sin(xt)] f(t) dt`,
//! computed three independent ways, and its inverse through the Fresnel
//! kernel.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{AnalyticTestFunction, DecayClass, HalfLineFunction, SampledFunction};
use crate::mellin::{line_integral, mellin_forward_default, parseval_sq_norm, MellinLineFunction};
use crate::quadrature::{
    integrate_adaptive, integrate_adaptive_breaks, integrate_half_line_oscillatory,
    integrate_oscillatory_tail, integrate_semi_infinite, Estimate, QuadratureConfig,
};
use crate::report::VerificationReport;
use crate::special::{k_unchecked, theta_multiplier, CriticalPoint};

pub(crate) const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Which route produced a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Oscillatory quadrature of the defining integral.
    Direct,
    /// Derivative of the smoother primitive
    /// `int [1 + sin(xt) - cos(xt)] f(t)/t dt`.
    Regularized,
    /// Contour integral of the Mellin multiplier against `f*(1-s)`.
    Mellin,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Regularized => "regularized",
            Method::Mellin => "mellin",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "regularized" => Ok(Method::Regularized),
            "mellin" => Ok(Method::Mellin),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Transform values on an `x` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformResult {
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub residual_estimates: Vec<f64>,
}

impl TransformResult {
    /// The samples as a function on the half-line. Transforms of `L2`
    /// functions decay like `1/x`, which is the annotated tail.
    pub fn to_sampled(&self) -> Result<SampledFunction> {
        SampledFunction::new(
            self.x_grid.clone(),
            self.values.clone(),
            DecayClass::Polynomial { exponent: 1.0 },
        )
    }
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("x = {x}")))
    }
}

/// `(H f)(x)` by oscillatory quadrature. The kernel `cos + sin =
/// sqrt2 sin(xt + pi/4)` vanishes at `xt = 3pi/4 + k pi`, which fixes the
/// partition of the tail.
pub fn hartley_forward_direct<F: HalfLineFunction + ?Sized>(
    f: &F,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    check_x("hartley_forward_direct", x)?;
    let r = integrate_half_line_oscillatory(
        |t: f64| {
            let (s, c) = (x * t).sin_cos();
            (s + c) * f.eval(t)
        },
        3.0 * FRAC_PI_4 / x,
        x,
        f.decay().support_end(),
        &f.breakpoints(),
        cfg,
    )?;
    Ok(Estimate {
        value: SQRT_2_OVER_PI * r.value,
        err_est: SQRT_2_OVER_PI * r.err_est,
    })
}

/// `G(y) = sqrt(2/pi) int_0^inf [1 + sin(yt) - cos(yt)] f(t)/t dt` up to an
/// additive constant independent of `y`: beyond the cut `a` the
/// non-oscillating `f(t)/t` part is dropped.
fn primitive<F: HalfLineFunction + ?Sized>(
    f: &F,
    y: f64,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    let near = |t: f64| {
        if t == 0.0 {
            return y * f.eval(0.0);
        }
        let s = (y * t).sin();
        // 1 - cos(yt) = 2 sin^2(yt/2), kept accurate for small yt.
        let h = (0.5 * y * t).sin();
        (2.0 * h * h + s) * f.eval(t) / t
    };
    let mut pts = vec![0.0];
    pts.extend(f.breakpoints().into_iter().filter(|&b| b > 0.0 && b < a));
    pts.push(a);
    let head = integrate_adaptive_breaks(near, &pts, cfg)?;
    if f.decay().support_end().is_some() {
        return Ok(Estimate {
            value: SQRT_2_OVER_PI * head.value,
            err_est: SQRT_2_OVER_PI * head.err_est,
        });
    }
    // sin - cos = sqrt2 sin(yt - pi/4), zero at yt = pi/4 + k pi.
    let far = |t: f64| {
        let (s, c) = (y * t).sin_cos();
        (s - c) * f.eval(t) / t
    };
    let k = ((a * y - FRAC_PI_4) / PI).ceil().max(0.0);
    let z0 = (FRAC_PI_4 + k * PI) / y;
    let mid = if z0 > a {
        integrate_adaptive(far, a, z0, cfg)?
    } else {
        Estimate {
            value: 0.0,
            err_est: 0.0,
        }
    };
    let tail = integrate_oscillatory_tail(far, z0.max(a), y, cfg)?;
    Ok(Estimate {
        value: SQRT_2_OVER_PI * (head.value + mid.value + tail.value),
        err_est: SQRT_2_OVER_PI * (head.err_est + mid.err_est + tail.err_est),
    })
}

/// `(H f)(x)` as the derivative of the primitive `G`, by a five-point
/// central difference with step `h = 1e-3 max(1, x)`.
pub fn hartley_forward_regularized<F: HalfLineFunction + ?Sized>(
    f: &F,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    check_x("hartley_forward_regularized", x)?;
    let h = 1e-3 * x.max(1.0);
    if x <= 2.0 * h {
        return Err(Error::domain(
            "hartley_forward_regularized",
            format!("x = {x} is too close to 0 for the difference stencil"),
        ));
    }
    // The difference amplifies quadrature error by about 1.5/h.
    let inner_tol = (cfg.abs_tol.min(cfg.rel_tol) * h).max(1e-15);
    let inner = cfg.clone().with_tol(inner_tol);
    let a = f.decay().support_end().unwrap_or(1.0);
    let mut g = [0.0; 4];
    let mut err = 0.0;
    for (slot, k) in g.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
        let e = primitive(f, x + k * h, a, &inner)?;
        *slot = e.value;
        err += e.err_est;
    }
    let value = (g[0] - 8.0 * g[1] + 8.0 * g[2] - g[3]) / (12.0 * h);
    // Compare with the three-point difference for a truncation estimate.
    let coarse = (g[2] - g[1]) / (2.0 * h);
    let trunc = (value - coarse).abs() * h * h;
    Ok(Estimate {
        value,
        err_est: 1.5 * err / h + trunc,
    })
}

/// `theta(1/2 + i tau)` on the nodes of a line grid.
pub fn theta_on_grid(grid: &[f64]) -> Result<Vec<Complex64>> {
    grid.iter()
        .map(|&t| theta_multiplier(CriticalPoint::new(t)?))
        .collect()
}

/// `theta(s) f*(1-s)` on the grid of `big_f`: the Mellin transform of `H f`.
pub fn transformed_line(big_f: &MellinLineFunction) -> Result<MellinLineFunction> {
    let th = theta_on_grid(big_f.tau_grid())?;
    let values = (0..big_f.len()).map(|i| th[i] * big_f.reflected(i)).collect();
    MellinLineFunction::new(big_f.tau_grid().to_vec(), values, false)
}

/// `(H f)(x) = (1/2pi i) int_sigma theta(s) f*(1-s) x^{-s} ds`.
pub fn hartley_forward_mellin(
    big_f: &MellinLineFunction,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    check_x("hartley_forward_mellin", x)?;
    let th = theta_on_grid(big_f.tau_grid())?;
    let (lx, scale) = (x.ln(), x.powf(-0.5));
    let g: Vec<Complex64> = (0..big_f.len())
        .map(|i| {
            let t = big_f.tau_grid()[i];
            th[i] * big_f.reflected(i) * Complex64::from_polar(scale, -t * lx)
        })
        .collect();
    let r = line_integral(big_f.tau_grid(), &g, cfg)?;
    Ok(Estimate {
        value: r.value.re,
        err_est: r.err_est,
    })
}

/// `H f` on a grid of points by one route. The Mellin route transforms `f`
/// once on its default line grid.
pub fn hartley_transform<F: HalfLineFunction + ?Sized>(
    f: &F,
    x_grid: &[f64],
    method: Method,
    cfg: &QuadratureConfig,
) -> Result<TransformResult> {
    let line = match method {
        Method::Mellin => Some(mellin_forward_default(f, cfg)?),
        _ => None,
    };
    let mut values = Vec::with_capacity(x_grid.len());
    let mut residual_estimates = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let e = match (&line, method) {
            (Some(big), _) => hartley_forward_mellin(big, x, cfg)?,
            (None, Method::Regularized) => hartley_forward_regularized(f, x, cfg)?,
            (None, _) => hartley_forward_direct(f, x, cfg)?,
        };
        values.push(e.value);
        residual_estimates.push(e.err_est);
    }
    Ok(TransformResult {
        x_grid: x_grid.to_vec(),
        values,
        method,
        residual_estimates,
    })
}

/// Recovers `f(x)` from `h = H f`:
/// `f(x) = int_0^inf Phi(xt) h(t) dt` with
/// `Phi(u) = sqrt(2/pi) [sin u S(u) + cos u C(u)]`.
///
/// `Phi` splits into `(sin u + cos u)/sqrt(2pi)`, whose integral against `h`
/// is half the forward transform of `h`, and `-k(u)/(2 pi^{3/2})` with the
/// completely monotone `k ~ u^{-3/2}`, whose integral converges absolutely.
pub fn hartley_inverse<F: HalfLineFunction + ?Sized>(
    h: &F,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    check_x("hartley_inverse", x)?;
    let osc = hartley_forward_direct(h, x, cfg)?;
    let smooth = |t: f64| k_unchecked(x * t) * h.eval(t);
    let mut pts = vec![0.0];
    pts.extend(h.breakpoints().into_iter().filter(|&b| b > 0.0 && b < 1.0));
    pts.push(1.0);
    let near = integrate_adaptive_breaks(smooth, &pts, cfg)?;
    let far = match h.decay().support_end() {
        Some(end) if end <= 1.0 => Estimate {
            value: 0.0,
            err_est: 0.0,
        },
        Some(end) => integrate_adaptive(smooth, 1.0, end, cfg)?,
        None => integrate_semi_infinite(smooth, 1.0, cfg)?,
    };
    let c = 1.0 / (2.0 * PI.powf(1.5));
    Ok(Estimate {
        value: 0.5 * osc.value - c * (near.value + far.value),
        err_est: 0.5 * osc.err_est + c * (near.err_est + far.err_est),
    })
}

/// `||H f||^2` by Parseval on `theta(s) f*(1-s)`.
pub fn transform_sq_norm(big_f: &MellinLineFunction, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(parseval_sq_norm(&transformed_line(big_f)?, cfg)?.value.re)
}

/// Checks `sqrt2 ||f|| <= ||H f|| <= 2 ||f||` with both norms computed on the
/// Mellin side.
pub fn norm_bounds_check(f: &AnalyticTestFunction, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let big = mellin_forward_default(f, cfg)?;
    let f_sq = match f.l2_norm_sq {
        Some(v) => v,
        None => parseval_sq_norm(&big, cfg)?.value.re,
    };
    let hf_sq = transform_sq_norm(&big, cfg)?;
    let (nf, nh) = (f_sq.sqrt(), hf_sq.max(0.0).sqrt());
    let mut report = VerificationReport::new(
        "norms",
        serde_json::to_value(cfg).expect("config serializes"),
    );
    report.at_least(format!("{}: ||Hf|| >= sqrt2 ||f||", f.name), nh, 2f64.sqrt() * nf, 1e-6);
    report.at_most(format!("{}: ||Hf|| <= 2 ||f||", f.name), nh, 2.0 * nf, 1e-6);
    if nf > 0.0 {
        let ratio = nh / nf;
        report.at_least(format!("{}: ratio lower", f.name), ratio, 2f64.sqrt(), 1e-6);
        report.at_most(format!("{}: ratio upper", f.name), ratio, 2.0, 1e-6);
    }
    Ok(report)
}
