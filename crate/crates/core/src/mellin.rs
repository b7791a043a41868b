//! Mellin transforms on the critical line `Re s = 1/2`.
//!
//! Functions on the line are stored as samples on a symmetric `tau` grid.
//! Integrals along the line use the trapezoid rule on that grid (spectrally
//! accurate on uniform grids for analytic integrands) plus an explicit model
//! of the tails beyond `+-T`: near each end the integrand is fitted to
//! `C tau^{-p} e^{-kappa tau} e^{i omega tau}` and that model is integrated
//! to infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{AnalyticTestFunction, DecayClass, HalfLineFunction};
use crate::quadrature::{
    integrate_adaptive_breaks, integrate_semi_infinite, Estimate, LineIntegral, QuadratureConfig,
};

/// Default number of samples on the line for `T = 40`. Odd, so that `0` is a
/// node and differences of nodes are nodes.
pub const DEFAULT_GRID_POINTS: usize = 2049;

/// `ln t` below which the forward transform switches to a power-law head.
const U_LO: f64 = -20.0;
/// Upper cut for polynomially decaying functions; beyond it a fitted power
/// law is integrated exactly.
const POLY_T_HI: f64 = 1e6;
/// Relative tolerance used when declaring a symmetry.
const SYMMETRY_TOL: f64 = 1e-9;

/// The default line grid for functions of the given decay class.
pub fn default_line_grid(decay: DecayClass) -> Vec<f64> {
    symmetric_grid(decay.default_truncation(), decay.default_grid_points())
}

/// `n` uniformly spaced points on `[-t, t]`.
pub fn symmetric_grid(t: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs two points");
    let h = 2.0 * t / (n - 1) as f64;
    let mid = (n - 1) as f64 / 2.0;
    (0..n).map(|i| (i as f64 - mid) * h).collect()
}

/// Samples of `f*(1/2 + i tau)` on a symmetric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinLineFunction {
    tau_grid: Vec<f64>,
    values: Vec<Complex64>,
    truncation_t: f64,
    symmetry_flag: bool,
}

impl MellinLineFunction {
    /// Validates the grid (strictly increasing, symmetric about 0) and, when
    /// `symmetry_flag` is set, that `value(tau) = value(-tau)`.
    pub fn new(tau_grid: Vec<f64>, values: Vec<Complex64>, symmetry_flag: bool) -> Result<Self> {
        let n = tau_grid.len();
        if n < 3 {
            return Err(Error::InvalidInput("line grid needs at least three points".into()));
        }
        if values.len() != n {
            return Err(Error::InvalidInput(format!(
                "line grid has {n} points but {} values",
                values.len()
            )));
        }
        if tau_grid.iter().any(|t| !t.is_finite()) || tau_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("tau grid must be finite and strictly increasing".into()));
        }
        let t = tau_grid[n - 1];
        if t <= 0.0 {
            return Err(Error::InvalidInput("tau grid must straddle zero".into()));
        }
        for i in 0..n / 2 {
            if (tau_grid[i] + tau_grid[n - 1 - i]).abs() > 1e-9 * t {
                return Err(Error::InvalidInput("tau grid is not symmetric about zero".into()));
            }
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("line values"));
        }
        let out = Self {
            tau_grid,
            values,
            truncation_t: t,
            symmetry_flag,
        };
        if symmetry_flag {
            let dev = out.even_deviation();
            if dev > SYMMETRY_TOL {
                return Err(Error::Symmetry { deviation: dev });
            }
        }
        Ok(out)
    }

    pub fn from_fn(
        tau_grid: Vec<f64>,
        f: impl Fn(f64) -> Complex64 + Sync,
        symmetry_flag: bool,
    ) -> Result<Self> {
        let values = tau_grid.par_iter().map(|&t| f(t)).collect();
        Self::new(tau_grid, values, symmetry_flag)
    }

    /// Samples the closed-form transform of a catalog function.
    pub fn from_analytic(f: &AnalyticTestFunction, tau_grid: Vec<f64>) -> Result<Self> {
        Self::from_fn(tau_grid, |t| f.mellin_on_line(t), false)
    }

    pub fn zero(tau_grid: Vec<f64>) -> Result<Self> {
        let n = tau_grid.len();
        Self::new(tau_grid, vec![Complex64::new(0.0, 0.0); n], true)
    }

    pub fn tau_grid(&self) -> &[f64] {
        &self.tau_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn truncation_t(&self) -> f64 {
        self.truncation_t
    }

    pub fn symmetry_flag(&self) -> bool {
        self.symmetry_flag
    }

    pub fn len(&self) -> usize {
        self.tau_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_grid.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Value at the mirrored node, i.e. `f*(1 - s)` for the `s` at node `i`.
    pub fn reflected(&self, i: usize) -> Complex64 {
        self.values[self.len() - 1 - i]
    }

    /// `max |F(tau) - F(-tau)| / max |F|`.
    pub fn even_deviation(&self) -> f64 {
        self.relative_deviation(|a, b| a - b)
    }

    /// `max |F(-tau) - conj F(tau)| / max |F|`; zero for transforms of real
    /// functions.
    pub fn hermitian_deviation(&self) -> f64 {
        self.relative_deviation(|a, b| b - a.conj())
    }

    fn relative_deviation(&self, diff: impl Fn(Complex64, Complex64) -> Complex64) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        (0..self.len())
            .map(|i| diff(self.values[i], self.reflected(i)).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= SYMMETRY_TOL
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.tau_grid == other.tau_grid
    }

    /// Pointwise map on the same grid. The symmetry flag is dropped.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .tau_grid
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| f(t, v))
            .collect();
        Self::new(self.tau_grid.clone(), values, false)
    }

    /// Interpolated value at `tau` (8-point Lagrange on the nearest nodes);
    /// zero outside `[-T, T]`.
    pub fn eval(&self, tau: f64) -> Complex64 {
        let g = &self.tau_grid;
        let n = g.len();
        if !(tau >= g[0] && tau <= g[n - 1]) {
            return Complex64::new(0.0, 0.0);
        }
        let k = g.partition_point(|&x| x < tau);
        let snap = 1e-12 * self.truncation_t;
        for j in [k.saturating_sub(1), k.min(n - 1)] {
            if (g[j] - tau).abs() <= snap {
                return self.values[j];
            }
        }
        let m = 8.min(n);
        let lo = k.saturating_sub(m / 2).min(n - m);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..lo + m {
            let mut w = 1.0;
            for j in lo..lo + m {
                if j != i {
                    w *= (tau - g[j]) / (g[i] - g[j]);
                }
            }
            acc += self.values[i] * w;
        }
        acc
    }
}

/// Number of nodes carrying an endpoint correction on uniform grids.
const GREGORY_NODES: usize = 8;

/// Endpoint corrections `c_j` (unit spacing) that cancel the Euler-Maclaurin
/// terms of the trapezoid rule at a left end, exact for polynomials of degree
/// below [`GREGORY_NODES`]. Solves `sum_j c_j j^d = B_{d+1}/(d+1)` (odd `d`),
/// `0` (even `d`).
fn gregory_corrections() -> [f64; GREGORY_NODES] {
    const M: usize = GREGORY_NODES;
    let bernoulli_ratio = |d: usize| -> f64 {
        match d {
            1 => 1.0 / 12.0,
            3 => -1.0 / 120.0,
            5 => 1.0 / 252.0,
            7 => -1.0 / 240.0,
            _ => 0.0,
        }
    };
    let mut a = [[0.0f64; M + 1]; M];
    for (d, row) in a.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().take(M).enumerate() {
            *cell = (j as f64).powi(d as i32);
        }
        row[M] = bernoulli_ratio(d);
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..M {
        let piv = (col..M)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in 0..M {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for k in col..=M {
                    a[r][k] -= factor * a[col][k];
                }
            }
        }
    }
    let mut c = [0.0; M];
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = a[j][M] / a[j][j];
    }
    c
}

/// Quadrature weights on `grid`: the trapezoid rule, plus Gregory endpoint
/// corrections when the grid is uniform. With the ends corrected the rule
/// stays high order even when the integrand is not small at `+-T`.
fn line_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
            let right = if i + 1 < n { grid[i + 1] - grid[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let uniform = grid
        .windows(2)
        .all(|p| ((p[1] - p[0]) - h).abs() <= 1e-9 * h);
    if uniform && n >= 4 * GREGORY_NODES {
        for (j, c) in gregory_corrections().iter().enumerate() {
            w[j] += c * h;
            w[n - 1 - j] += c * h;
        }
    }
    w
}

/// `int_0^inf (1 + v/T)^{-p} e^{(-kappa + i omega) v + i beta v^2/2} dv`, the
/// integral of the tail model. `None` when the model does not decay.
fn tail_model_integral(p: f64, kappa: f64, omega: f64, beta: f64, t: f64) -> Option<Complex64> {
    let cfg = QuadratureConfig::default().with_tol(1e-13);
    if omega.abs() * t < 1e-9 {
        if kappa > 0.0 {
            let r = integrate_semi_infinite(
                |v: f64| (1.0 + v / t).powf(-p) * (-kappa * v).exp(),
                0.0,
                &cfg,
            )
            .ok()?;
            return Some(Complex64::new(r.value, 0.0));
        }
        if p > 1.0 {
            return Some(Complex64::new(t / (p - 1.0), 0.0));
        }
        return None;
    }
    if kappa == 0.0 && p <= 0.0 {
        return None;
    }
    // Rotate onto the imaginary axis, v = i sg y, where the oscillation turns
    // into exponential decay. The quarter plane swept holds no singularity.
    let sg = omega.signum();
    let i = Complex64::i();
    let g = |y: f64| {
        let base = Complex64::new(1.0, sg * y / t);
        let expo = Complex64::new(-omega.abs() * y, -kappa * sg * y - 0.5 * beta * y * y);
        i * sg * base.powf(-p) * expo.exp()
    };
    let r = integrate_semi_infinite(g, 0.0, &cfg).ok()?;
    Some(r.value)
}

/// Tail beyond the last node in the outward direction. `pos` is the outward
/// coordinate (positive, increasing towards the end) and `vals` the samples,
/// both ordered with the end point last.
fn fitted_tail(pos: &[f64], vals: &[Complex64], fractions: (f64, f64)) -> Option<Complex64> {
    let n = pos.len();
    let t = pos[n - 1];
    let g0 = vals[n - 1];
    let pick = |frac: f64| -> usize {
        let target = t * (1.0 - frac);
        let k = pos.partition_point(|&x| x < target).min(n - 1);
        k.min(n - 2)
    };
    let mut i1 = pick(fractions.0);
    let mut i2 = pick(fractions.1);
    if i2 >= i1 {
        i1 = n - 2;
        i2 = n - 3;
    }
    let (t0, t1, t2) = (t, pos[i1], pos[i2]);
    let (a0, a1, a2) = (g0.norm(), vals[i1].norm(), vals[i2].norm());
    if a1 == 0.0 || a2 == 0.0 {
        return None;
    }
    let (l0, l1, l2) = (a0.ln(), a1.ln(), a2.ln());
    let (u0, u1, u2) = (t0.ln(), t1.ln(), t2.ln());
    // ln|g| = c - p ln(tau) - kappa tau through the three points.
    let det = (u1 - u0) * (t2 - t0) - (u2 - u0) * (t1 - t0);
    let (r1, r2) = (l0 - l1, l0 - l2);
    let (p, mut kappa) = if det.abs() < 1e-300 {
        (r1 / (u0 - u1), 0.0)
    } else {
        (
            (r1 * (t2 - t0) - r2 * (t1 - t0)) / det,
            ((u1 - u0) * r2 - (u2 - u0) * r1) / det,
        )
    };
    if kappa < 0.0 {
        if kappa * t > -1e-2 {
            kappa = 0.0;
        } else {
            return None;
        }
    }
    // Phase velocity and acceleration from the adjacent nodes.
    let (g1, g2) = (vals[n - 2], vals[n - 3]);
    if g1.norm() == 0.0 || g2.norm() == 0.0 {
        return None;
    }
    let (d1, d2) = ((g0 / g1).arg(), (g1 / g2).arg());
    if d1.abs() > 2.5 || d2.abs() > 2.5 {
        // Grid too coarse to follow the phase.
        return None;
    }
    let (h1, h2) = (t0 - pos[n - 2], pos[n - 2] - pos[n - 3]);
    let (w1, w2) = (d1 / h1, d2 / h2);
    let beta = (w1 - w2) / (0.5 * (h1 + h2));
    let omega = w1 + 0.5 * beta * h1;
    tail_model_integral(p, kappa, omega, beta, t).map(|i| g0 * i)
}

/// Tail contribution and its uncertainty at one end of the grid.
fn end_tail(pos: &[f64], vals: &[Complex64], scale: f64) -> (Complex64, f64, bool) {
    let n = pos.len();
    let t = pos[n - 1];
    let g0 = vals[n - 1];
    if g0.norm() <= 1e-9 * scale || n < 4 {
        // At or below the noise level of the samples.
        return (Complex64::new(0.0, 0.0), g0.norm() * 0.02 * t, true);
    }
    match (
        fitted_tail(pos, vals, (0.02, 0.04)),
        fitted_tail(pos, vals, (0.01, 0.02)),
    ) {
        (Some(a), Some(b)) => (a, (a - b).norm(), true),
        (Some(a), None) | (None, Some(a)) => (a, a.norm(), true),
        (None, None) => (Complex64::new(0.0, 0.0), f64::INFINITY, false),
    }
}

/// `(1/2pi) int_{-inf}^{inf} g(tau) d tau` for `g` sampled on `grid`: the
/// trapezoid rule on the grid plus fitted tails beyond `+-T`.
///
/// With strict truncation enabled, a tail whose uncertainty exceeds the
/// tolerance (or a tail that does not decay) is an error.
pub fn line_integral(
    grid: &[f64],
    values: &[Complex64],
    cfg: &QuadratureConfig,
) -> Result<LineIntegral> {
    let n = grid.len();
    if n != values.len() || n < 3 {
        return Err(Error::InvalidInput("line integral needs matching samples".into()));
    }
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("line integrand"));
    }
    let w = line_weights(grid);
    let mut body = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (v, wi) in values.iter().zip(&w) {
        body += v * wi;
        abs_sum += v.norm() * wi;
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let right = end_tail(grid, values, scale);
    let pos_left: Vec<f64> = grid.iter().rev().map(|t| -t).collect();
    let vals_left: Vec<Complex64> = values.iter().rev().copied().collect();
    let left = end_tail(&pos_left, &vals_left, scale);
    let tails = right.0 + left.0;
    let value = (body + tails) / (2.0 * PI);
    let tail_err = (right.1 + left.1) / (2.0 * PI);
    let truncation_bound = tails.norm() / (2.0 * PI);
    let roundoff = 1e-15 * abs_sum / (2.0 * PI);
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.norm());
    if cfg.strict_truncation && (tail_err > tol || !(right.2 && left.2)) {
        return Err(Error::Truncation {
            estimate: tail_err,
            tolerance: tol,
        });
    }
    Ok(LineIntegral {
        value,
        err_est: tail_err + roundoff,
        truncation_bound,
    })
}

/// Shared per-function data for the forward transform.
struct ForwardPlan {
    u_lo: f64,
    u_hi: f64,
    /// `(f(t_lo), q)`: below `t_lo` the function is modelled as `f(t_lo) (t/t_lo)^q`.
    head: (f64, f64),
    /// `(f(t_hi), q)`: above `t_hi` the function is modelled as `f(t_hi) (t/t_hi)^{-q}`.
    tail: Option<(f64, f64)>,
    breaks: Vec<f64>,
    zero: bool,
}

fn local_exponent(f0: f64, f1: f64, ratio: f64) -> Option<f64> {
    if f0 != 0.0 && f1 != 0.0 && f0.signum() == f1.signum() {
        let q = (f1 / f0).ln() / ratio.ln();
        q.is_finite().then_some(q)
    } else {
        None
    }
}

impl ForwardPlan {
    fn new<F: HalfLineFunction + ?Sized>(f: &F) -> Result<Self> {
        let mut u_lo = U_LO;
        let mut tail = None;
        let u_hi = match f.decay() {
            DecayClass::Compact { end } => {
                if !(end > 0.0) {
                    return Ok(Self {
                        u_lo,
                        u_hi: u_lo,
                        head: (0.0, 0.0),
                        tail: None,
                        breaks: Vec::new(),
                        zero: true,
                    });
                }
                let u = end.ln();
                u_lo = u_lo.min(u - 20.0);
                u
            }
            DecayClass::Exponential | DecayClass::Gaussian => {
                // Scan out until the integrand is negligible.
                let weight = |t: f64| f.eval(t).abs() * t.sqrt();
                let mut scale: f64 = (0..=40)
                    .map(|k| weight((U_LO + 0.5 * k as f64).exp()))
                    .fold(0.0, f64::max);
                let mut t: f64 = 1.0;
                loop {
                    let w = weight(t).max(weight(1.5 * t));
                    scale = scale.max(w);
                    if (w <= 1e-17 * scale && t >= 2.0) || t >= 1e8 {
                        break;
                    }
                    t *= 1.25;
                }
                t.ln()
            }
            DecayClass::Polynomial { exponent } => {
                if !(exponent > 0.5) {
                    return Err(Error::domain(
                        "mellin_forward",
                        format!("decay t^-{exponent} is not square integrable"),
                    ));
                }
                let f_hi = f.eval(POLY_T_HI);
                let q = local_exponent(f.eval(POLY_T_HI / 2.0), f_hi, 2.0)
                    .filter(|q| *q > 0.5)
                    .unwrap_or(exponent);
                tail = Some((f_hi, q));
                POLY_T_HI.ln()
            }
        };
        let t_lo = u_lo.exp();
        let f_lo = f.eval(t_lo);
        let q = if f_lo == 0.0 {
            0.0
        } else {
            local_exponent(f_lo, f.eval(t_lo * 0.5f64.exp()), 0.5f64.exp()).unwrap_or(0.0)
        };
        if q <= -0.5 {
            return Err(Error::domain(
                "mellin_forward",
                format!("behaviour t^{q} near zero is not square integrable"),
            ));
        }
        let breaks = f
            .breakpoints()
            .into_iter()
            .filter(|&b| b > 0.0)
            .map(f64::ln)
            .filter(|&u| u > u_lo && u < u_hi)
            .collect();
        Ok(Self {
            u_lo,
            u_hi,
            head: (f_lo, q),
            tail,
            breaks,
            zero: false,
        })
    }

    fn at<F: HalfLineFunction + ?Sized>(
        &self,
        f: &F,
        tau: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Estimate<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        if self.zero {
            return Ok(Estimate {
                value: zero,
                err_est: 0.0,
            });
        }
        let s = Complex64::new(0.5, tau);
        let chunk = if tau == 0.0 { 1.0 } else { (PI / tau.abs()).min(1.0) };
        let mut pts = vec![self.u_lo];
        let mut u = self.u_lo + chunk;
        while u < self.u_hi {
            pts.push(u);
            u += chunk;
        }
        pts.extend(self.breaks.iter().copied());
        pts.push(self.u_hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let local = QuadratureConfig {
            max_subdivisions: cfg.max_subdivisions.max(8 * pts.len()),
            ..cfg.clone()
        };
        let body = integrate_adaptive_breaks(
            |u: f64| {
                let v = f.eval(u.exp());
                if v == 0.0 {
                    return zero;
                }
                Complex64::from_polar(v * (0.5 * u).exp(), tau * u)
            },
            &pts,
            &local,
        )?;
        let t_lo = self.u_lo.exp();
        let (f_lo, q) = self.head;
        let head = if f_lo == 0.0 {
            zero
        } else {
            f_lo * Complex64::new(t_lo, 0.0).powc(s) / (s + q)
        };
        let tail = match self.tail {
            Some((f_hi, q)) => f_hi * Complex64::new(self.u_hi.exp(), 0.0).powc(s) / (q - s),
            None => zero,
        };
        Ok(Estimate {
            value: head + body.value + tail,
            err_est: body.err_est,
        })
    }
}

/// `f*(1/2 + i tau) = int_0^inf f(t) t^{-1/2 + i tau} dt` at one point.
///
/// Computed in `u = ln t`, where `t^{i tau}` becomes `e^{i tau u}`; the range
/// is cut into pieces no longer than half a period.
pub fn mellin_at<F: HalfLineFunction + ?Sized>(
    f: &F,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>> {
    ForwardPlan::new(f)?.at(f, tau, cfg)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const PANEL_NODES: usize = 20;
/// Largest phase change `tau * width` allowed across one panel.
const PANEL_PHASE: f64 = 10.0;

impl ForwardPlan {
    /// Values at all `taus` from one composite Gauss-Legendre rule in `u`.
    /// `f` is sampled once; `e^{i tau u}` is advanced by recurrence when the
    /// taus are uniformly spaced.
    fn on_grid<F: HalfLineFunction + ?Sized>(&self, f: &F, taus: &[f64]) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        if self.zero {
            return vec![zero; taus.len()];
        }
        let tau_max = taus.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let width = (PANEL_PHASE / tau_max.max(1.0)).min(0.05);
        let mut edges = vec![self.u_lo];
        let count = ((self.u_hi - self.u_lo) / width).ceil() as usize;
        for k in 1..count {
            edges.push(self.u_lo + k as f64 * width);
        }
        edges.extend(self.breaks.iter().copied());
        edges.push(self.u_hi);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let (gx, gw) = gauss_legendre(PANEL_NODES);
        let mut nodes = Vec::with_capacity(edges.len() * PANEL_NODES);
        let mut coef = Vec::with_capacity(edges.len() * PANEL_NODES);
        for e in edges.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in gx.iter().zip(&gw) {
                let u = mid + half * x;
                let v = f.eval(u.exp());
                if v != 0.0 {
                    nodes.push(u);
                    coef.push(v * (0.5 * u).exp() * w * half);
                }
            }
        }
        let analytic = |tau: f64| {
            let s = Complex64::new(0.5, tau);
            let (f_lo, q) = self.head;
            let head = if f_lo == 0.0 {
                zero
            } else {
                f_lo * Complex64::new(self.u_lo.exp(), 0.0).powc(s) / (s + q)
            };
            let tail = match self.tail {
                Some((f_hi, q)) => f_hi * Complex64::new(self.u_hi.exp(), 0.0).powc(s) / (q - s),
                None => zero,
            };
            head + tail
        };
        let uniform = taus.len() > 2 && {
            let h = taus[1] - taus[0];
            taus.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
        };
        let mut out = Vec::with_capacity(taus.len());
        if uniform {
            let h = taus[1] - taus[0];
            let step: Vec<Complex64> = nodes.iter().map(|&u| Complex64::from_polar(1.0, h * u)).collect();
            let mut phase = vec![zero; nodes.len()];
            for (k, &tau) in taus.iter().enumerate() {
                if k % 256 == 0 {
                    // Re-seed exactly to stop rounding drift.
                    for (p, &u) in phase.iter_mut().zip(&nodes) {
                        *p = Complex64::from_polar(1.0, tau * u);
                    }
                }
                let mut acc = zero;
                for ((p, c), z) in phase.iter_mut().zip(&coef).zip(&step) {
                    acc += *p * *c;
                    *p *= *z;
                }
                out.push(acc + analytic(tau));
            }
        } else {
            for &tau in taus {
                let acc: Complex64 = nodes
                    .iter()
                    .zip(&coef)
                    .map(|(&u, &c)| Complex64::from_polar(c, tau * u))
                    .sum();
                out.push(acc + analytic(tau));
            }
        }
        out
    }
}

/// Forward transform of a real function on a symmetric grid. Values at
/// negative `tau` are filled in by conjugation.
///
/// Uses a fixed composite Gauss-Legendre rule in `u = ln t` with panels
/// narrow enough for the largest `|tau|` on the grid; [`mellin_at`] is the
/// adaptive counterpart.
pub fn mellin_forward<F: HalfLineFunction + ?Sized>(
    f: &F,
    tau_grid: Vec<f64>,
    cfg: &QuadratureConfig,
) -> Result<MellinLineFunction> {
    cfg.validate()?;
    let plan = ForwardPlan::new(f)?;
    let n = tau_grid.len();
    // Validate the grid before doing any work.
    MellinLineFunction::new(tau_grid.clone(), vec![Complex64::new(0.0, 0.0); n], false)?;
    let half = n / 2;
    let upper = plan.on_grid(f, &tau_grid[half..]);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in upper.iter().enumerate() {
        values[half + k] = *v;
        values[n - 1 - half - k] = v.conj();
    }
    if n % 2 == 1 {
        values[half].im = 0.0;
    }
    MellinLineFunction::new(tau_grid, values, false)
}

/// [`mellin_forward`] on the default grid for the function's decay class.
pub fn mellin_forward_default<F: HalfLineFunction + ?Sized>(
    f: &F,
    cfg: &QuadratureConfig,
) -> Result<MellinLineFunction> {
    mellin_forward(f, default_line_grid(f.decay()), cfg)
}

/// `(1/2pi i) int_sigma F(s) x^{-s} ds` without taking the real part.
pub fn mellin_inverse_complex(
    big_f: &MellinLineFunction,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<LineIntegral> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain("mellin_inverse", format!("x = {x}")));
    }
    let lx = x.ln();
    let scale = x.powf(-0.5);
    let g: Vec<Complex64> = big_f
        .tau_grid
        .iter()
        .zip(&big_f.values)
        .map(|(&t, &v)| v * Complex64::from_polar(scale, -t * lx))
        .collect();
    line_integral(&big_f.tau_grid, &g, cfg)
}

/// Inverse Mellin transform at `x`, real part. For Hermitian input the
/// imaginary residue is checked against the real part.
pub fn mellin_inverse(big_f: &MellinLineFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let r = mellin_inverse_complex(big_f, x, cfg)?;
    if big_f.is_hermitian() {
        let floor = 1e-12 * big_f.max_abs() * x.powf(-0.5) * big_f.truncation_t;
        if r.value.im.abs() > 1e-8 * r.value.re.abs() + floor {
            return Err(Error::Symmetry {
                deviation: r.value.im.abs(),
            });
        }
    }
    Ok(r.value.re)
}

/// `(1/2pi) int |F|^2 d tau`, which equals `int_0^inf |f|^2` for `F = f*`.
pub fn parseval_sq_norm(big_f: &MellinLineFunction, cfg: &QuadratureConfig) -> Result<LineIntegral> {
    let g: Vec<Complex64> = big_f
        .values
        .iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    line_integral(&big_f.tau_grid, &g, cfg)
}

/// Right-hand side of `int_0^inf f1(xt) f2(t) dt = (1/2pi i) int_sigma
/// f1*(s) f2*(1-s) x^{-s} ds`. Both factors must share one grid.
pub fn generalized_parseval(
    f1: &MellinLineFunction,
    f2: &MellinLineFunction,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !f1.same_grid(f2) {
        return Err(Error::InvalidInput("both transforms must share one tau grid".into()));
    }
    let prod: Vec<Complex64> = (0..f1.len()).map(|i| f1.values[i] * f2.reflected(i)).collect();
    let joint = MellinLineFunction::new(f1.tau_grid.clone(), prod, false)?;
    mellin_inverse(&joint, x, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::special::gamma;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn func(name: &str) -> AnalyticTestFunction {
        lookup(name).unwrap().func
    }

    #[test]
    fn grid_validation() {
        let bad = vec![-1.0, 0.0, 2.0];
        let v = vec![Complex64::new(1.0, 0.0); 3];
        assert!(MellinLineFunction::new(bad, v.clone(), false).is_err());
        assert!(MellinLineFunction::new(vec![-1.0, 0.0, 1.0], v[..2].to_vec(), false).is_err());
        let g = symmetric_grid(5.0, 11);
        assert_eq!(g[5], 0.0);
        assert_eq!(g[0], -5.0);
        let odd = MellinLineFunction::from_fn(g.clone(), |t| Complex64::new(t, 0.0), true);
        assert!(matches!(odd, Err(Error::Symmetry { .. })));
        let even = MellinLineFunction::from_fn(g, |t| Complex64::new(t * t, 0.0), true).unwrap();
        assert!(even.even_deviation() == 0.0);
    }

    #[test]
    fn interpolation_hits_nodes_and_smooth_values() {
        let f = MellinLineFunction::from_fn(symmetric_grid(10.0, 201), |t| {
            Complex64::new((-t * t).exp(), t.sin())
        }, false)
        .unwrap();
        assert_eq!(f.eval(0.5), f.values()[105]);
        let t = 0.537;
        assert!((f.eval(t) - Complex64::new((-t * t).exp(), t.sin())).norm() < 1e-7);
        assert_eq!(f.eval(11.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn forward_pairs() {
        // Box: 1/s.
        let bx = func("box");
        for tau in [0.0, 1.0, 7.5, 150.0] {
            let v = mellin_at(&bx, tau, &cfg()).unwrap().value;
            let exact = 1.0 / Complex64::new(0.5, tau);
            assert!((v - exact).norm() < 1e-9, "box at {tau}: {v} vs {exact}");
        }
        // Exponential: Gamma(s).
        let e = mellin_at(&func("exp"), 1.0, &cfg()).unwrap().value;
        assert!((e - gamma(Complex64::new(0.5, 1.0)).unwrap()).norm() < 1e-8);
        // Lorentzian: (pi/2)/sin(pi s/2).
        let lz = func("lorentz");
        for tau in [0.0, 1.0, 2.0] {
            let v = mellin_at(&lz, tau, &cfg()).unwrap().value;
            let s = Complex64::new(0.5, tau);
            let exact = (PI / 2.0) / (s * (PI / 2.0)).sin();
            assert!((v - exact).norm() < 1e-8, "lorentz at {tau}: {v} vs {exact}");
        }
    }

    #[test]
    fn forward_rejects_slow_decay() {
        let slow = crate::function::FnFunction::new(
            |t: f64| 1.0 / (1.0 + t).sqrt(),
            DecayClass::Polynomial { exponent: 0.5 },
        );
        assert!(matches!(mellin_at(&slow, 0.0, &cfg()), Err(Error::Domain { .. })));
    }

    #[test]
    fn inverse_pairs() {
        let grid = symmetric_grid(40.0, DEFAULT_GRID_POINTS);
        let gam = MellinLineFunction::from_analytic(&func("exp"), grid.clone()).unwrap();
        let v = mellin_inverse(&gam, 1.0, &cfg()).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-8, "{v}");
        let inv_s = MellinLineFunction::from_analytic(&func("box"), symmetric_grid(200.0, 8193)).unwrap();
        let v = mellin_inverse(&inv_s, 0.5, &cfg().lenient()).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
        let zero = MellinLineFunction::zero(grid).unwrap();
        assert_eq!(mellin_inverse(&zero, 2.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn parseval_pairs() {
        let gam = MellinLineFunction::from_analytic(&func("exp"), symmetric_grid(40.0, DEFAULT_GRID_POINTS)).unwrap();
        let n = parseval_sq_norm(&gam, &cfg()).unwrap();
        assert!((n.value.re - 0.5).abs() < 1e-10, "{}", n.value);
        let inv_s = MellinLineFunction::from_analytic(&func("box"), symmetric_grid(200.0, 8193)).unwrap();
        let n = parseval_sq_norm(&inv_s, &cfg().lenient()).unwrap();
        assert!((n.value.re - 1.0).abs() < 1e-6, "{}", n.value);
        assert!(n.truncation_bound > 1e-3);
    }

    #[test]
    fn generalized_parseval_pairs() {
        let grid = symmetric_grid(200.0, 8193);
        let e = MellinLineFunction::from_analytic(&func("exp"), grid.clone()).unwrap();
        let b = MellinLineFunction::from_analytic(&func("box"), grid).unwrap();
        let c = cfg().lenient();
        let v = generalized_parseval(&e, &e, 1.0, &c).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
        let v = generalized_parseval(&e, &b, 2.0, &c).unwrap();
        assert!((v - (1.0 - (-2f64).exp()) / 2.0).abs() < 1e-8, "{v} {}", (1.0 - (-2f64).exp()) / 2.0);
    }

    #[test]
    fn corrected_weights_integrate_polynomials_exactly() {
        let grid = symmetric_grid(1.0, 65);
        let w = line_weights(&grid);
        for d in 0..8 {
            let q: f64 = grid.iter().zip(&w).map(|(t, w)| w * t.powi(d)).sum();
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
            // Rounding from the 8x8 moment solve.
            assert!((q - exact).abs() < 1e-12, "degree {d}: {q}");
        }
        // A non-decaying smooth integrand: the plain trapezoid rule would
        // err by O(h^2) here.
        let q: f64 = grid.iter().zip(&w).map(|(t, w)| w * (3.0 * t).cos()).sum();
        assert!((q - 2.0 * 3f64.sin() / 3.0).abs() < 1e-11, "{q}");
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(PANEL_NODES);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let m38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m38 - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn grid_engine_agrees_with_adaptive() {
        for name in ["box", "gauss", "lorentz"] {
            let f = func(name);
            let grid = default_line_grid(f.decay);
            let big = mellin_forward(&f, grid.clone(), &cfg()).unwrap();
            for i in [grid.len() / 2, grid.len() / 2 + 7, grid.len() - 3] {
                let a = mellin_at(&f, grid[i], &cfg()).unwrap();
                assert!((a.value - big.values()[i]).norm() < 1e-9, "{name} at {}", grid[i]);
            }
        }
    }

    #[test]
    fn forward_round_trip_exp() {
        let f = func("exp");
        let big = mellin_forward_default(&f, &cfg()).unwrap();
        assert!(big.hermitian_deviation() < 1e-14);
        for tau in [0.0, 1.0, -3.0] {
            let exact = gamma(Complex64::new(0.5, tau)).unwrap();
            assert!((big.eval(tau) - exact).norm() < 1e-9);
        }
        for x in [0.3, 1.0, 2.7] {
            let v = mellin_inverse(&big, x, &cfg()).unwrap();
            assert!((v - (-x).exp()).abs() < 1e-8, "x = {x}: {v}");
        }
    }
}
