//! Real functions on the positive half-line: closed-form test functions,
//! sampled data with head/tail extension models, and closure adapters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a function behaves at infinity. Drives truncation choices in the
/// Mellin and Hartley engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum DecayClass {
    /// Identically zero beyond `end`.
    Compact { end: f64 },
    Exponential,
    Gaussian,
    /// Decays like `t^{-exponent}`.
    Polynomial { exponent: f64 },
}

impl DecayClass {
    pub fn support_end(&self) -> Option<f64> {
        match *self {
            DecayClass::Compact { end } => Some(end),
            _ => None,
        }
    }

    /// Truncation of the critical line suited to the Mellin transform of a
    /// function in this class.
    pub fn default_truncation(&self) -> f64 {
        match self {
            DecayClass::Gaussian => 20.0,
            DecayClass::Exponential => 40.0,
            DecayClass::Compact { .. } | DecayClass::Polynomial { .. } => 200.0,
        }
    }

    /// Number of samples on `[-T, T]`. Transforms in every class have
    /// singularities at distance 1/2 from the line, so the trapezoid rule
    /// errs by about `exp(-pi/h)`; the count keeps that below 1e-12.
    pub fn default_grid_points(&self) -> usize {
        match self {
            DecayClass::Gaussian | DecayClass::Exponential => 2049,
            DecayClass::Compact { .. } | DecayClass::Polynomial { .. } => 8193,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DecayClass::Compact { .. } => "compact",
            DecayClass::Exponential => "exponential",
            DecayClass::Gaussian => "gaussian",
            DecayClass::Polynomial { .. } => "polynomial",
        }
    }
}

/// A real function on `(0, inf)`.
pub trait HalfLineFunction: Sync {
    fn eval(&self, t: f64) -> f64;

    fn decay(&self) -> DecayClass;

    /// Interior points where the function is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A closed-form function paired with its Mellin transform.
#[derive(Clone, Copy)]
pub struct AnalyticTestFunction {
    pub name: &'static str,
    pub eval: fn(f64) -> f64,
    pub mellin_closed_form: fn(Complex64) -> Complex64,
    /// `int_0^inf f^2`, when known in closed form.
    pub l2_norm_sq: Option<f64>,
    pub decay: DecayClass,
}

impl std::fmt::Debug for AnalyticTestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticTestFunction")
            .field("name", &self.name)
            .field("decay", &self.decay)
            .finish()
    }
}

impl AnalyticTestFunction {
    /// Closed-form Mellin transform at `s = 1/2 + i tau`.
    pub fn mellin_on_line(&self, tau: f64) -> Complex64 {
        (self.mellin_closed_form)(Complex64::new(0.5, tau))
    }
}

impl HalfLineFunction for AnalyticTestFunction {
    fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    fn decay(&self) -> DecayClass {
        self.decay
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.decay.support_end().into_iter().collect()
    }
}

/// Wraps a closure as a [`HalfLineFunction`].
pub struct FnFunction<F> {
    f: F,
    decay: DecayClass,
    breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnFunction<F> {
    pub fn new(f: F, decay: DecayClass) -> Self {
        Self {
            f,
            decay,
            breakpoints: decay.support_end().into_iter().collect(),
        }
    }
}

impl<F: Fn(f64) -> f64 + Sync> HalfLineFunction for FnFunction<F> {
    fn eval(&self, t: f64) -> f64 {
        if let Some(end) = self.decay.support_end() {
            if t > end {
                return 0.0;
            }
        }
        (self.f)(t)
    }

    fn decay(&self) -> DecayClass {
        self.decay
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

impl<T: HalfLineFunction + ?Sized> HalfLineFunction for &T {
    fn eval(&self, t: f64) -> f64 {
        (**self).eval(t)
    }
    fn decay(&self) -> DecayClass {
        (**self).decay()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// Extension of sampled data below the first grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum HeadModel {
    /// `v0 + d1 (t - t0) + d2 (t - t0)(t - t1)`: the Newton polynomial
    /// through the first three samples.
    Quadratic {
        t0: f64,
        t1: f64,
        v0: f64,
        d1: f64,
        d2: f64,
    },
    /// `v0 (t / t0)^exponent`, used for non-analytic behaviour like `sqrt t`.
    Power { t0: f64, v0: f64, exponent: f64 },
}

/// Extension of sampled data beyond the last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum TailModel {
    Zero,
    /// `v_n exp(-rate (t - t_n))`.
    Exponential { t_n: f64, v_n: f64, rate: f64 },
    /// `v_n exp(-rate (t^2 - t_n^2))`.
    Gaussian { t_n: f64, v_n: f64, rate: f64 },
    /// `v_n (t / t_n)^{-exponent}`.
    Power { t_n: f64, v_n: f64, exponent: f64 },
}

impl TailModel {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            TailModel::Zero => 0.0,
            TailModel::Exponential { t_n, v_n, rate } => v_n * (-rate * (t - t_n)).exp(),
            TailModel::Gaussian { t_n, v_n, rate } => v_n * (-rate * (t * t - t_n * t_n)).exp(),
            TailModel::Power { t_n, v_n, exponent } => v_n * (t / t_n).powf(-exponent),
        }
    }
}

/// Values of a real function on a strictly increasing positive grid.
///
/// Between samples the function is a natural cubic spline in `ln t`; outside
/// the grid it follows the fitted head and tail models.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    decay: DecayClass,
    log_grid: Vec<f64>,
    second: Vec<f64>,
    head: HeadModel,
    tail: TailModel,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, decay: DecayClass) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidInput("need at least two samples".into()));
        }
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidInput("grid points must be positive and finite".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("values must be finite".into()));
        }
        let log_grid: Vec<f64> = grid.iter().map(|t| t.ln()).collect();
        let second = natural_spline(&log_grid, &values);
        let head = fit_head(&grid, &values);
        let tail = fit_tail(&grid, &values, decay);
        Ok(Self {
            grid,
            values,
            decay,
            log_grid,
            second,
            head,
            tail,
        })
    }

    /// Sample `f` on `grid`.
    pub fn from_fn(grid: Vec<f64>, decay: DecayClass, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values, decay)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn head_model(&self) -> HeadModel {
        self.head
    }

    pub fn tail_params(&self) -> TailModel {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn spline(&self, u: f64) -> f64 {
        let n = self.log_grid.len();
        let i = self
            .log_grid
            .partition_point(|&g| g <= u)
            .clamp(1, n - 1)
            - 1;
        let (u0, u1) = (self.log_grid[i], self.log_grid[i + 1]);
        let h = u1 - u0;
        let a = (u1 - u) / h;
        let b = (u - u0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }
}

impl HalfLineFunction for SampledFunction {
    fn eval(&self, t: f64) -> f64 {
        let first = self.grid[0];
        let last = self.grid[self.grid.len() - 1];
        if t < first {
            match self.head {
                HeadModel::Quadratic { t0, t1, v0, d1, d2 } => {
                    v0 + d1 * (t - t0) + d2 * (t - t0) * (t - t1)
                }
                HeadModel::Power { t0, v0, exponent } => v0 * (t / t0).powf(exponent),
            }
        } else if t > last {
            self.tail.eval(t)
        } else {
            self.spline(t.ln())
        }
    }

    fn decay(&self) -> DecayClass {
        self.decay
    }
}

/// Second derivatives of the natural cubic spline through `(x, y)`.
fn natural_spline(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        let p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for k in (0..n - 1).rev() {
        m[k] = m[k] * m[k + 1] + u[k];
    }
    m
}

fn fit_head(grid: &[f64], values: &[f64]) -> HeadModel {
    let (t0, t1, v0, v1) = (grid[0], grid[1], values[0], values[1]);
    if v0 != 0.0 && v1 != 0.0 && v0.signum() == v1.signum() {
        let q = (v1 / v0).ln() / (t1 / t0).ln();
        if (0.25..=8.0).contains(&q) {
            return HeadModel::Power {
                t0,
                v0,
                exponent: q,
            };
        }
    }
    let d1 = (v1 - v0) / (t1 - t0);
    let d2 = if grid.len() > 2 {
        let d12 = (values[2] - v1) / (grid[2] - t1);
        (d12 - d1) / (grid[2] - t0)
    } else {
        0.0
    };
    HeadModel::Quadratic { t0, t1, v0, d1, d2 }
}

fn fit_tail(grid: &[f64], values: &[f64], decay: DecayClass) -> TailModel {
    let n = grid.len();
    let (t_n, v_n) = (grid[n - 1], values[n - 1]);
    // Reference sample one decade back (or the first sample).
    let j = grid.partition_point(|&t| t <= t_n / 10.0).saturating_sub(1).min(n - 2);
    let (t_j, v_j) = (grid[j], values[j]);
    let same_sign = v_j != 0.0 && v_n != 0.0 && v_j.signum() == v_n.signum();
    match decay {
        DecayClass::Compact { .. } => TailModel::Zero,
        DecayClass::Exponential => {
            let rate = if same_sign {
                (v_j / v_n).ln() / (t_n - t_j)
            } else {
                f64::NAN
            };
            if rate > 0.0 && rate.is_finite() {
                TailModel::Exponential { t_n, v_n, rate }
            } else {
                TailModel::Zero
            }
        }
        DecayClass::Gaussian => {
            let rate = if same_sign {
                (v_j / v_n).ln() / (t_n * t_n - t_j * t_j)
            } else {
                f64::NAN
            };
            if rate > 0.0 && rate.is_finite() {
                TailModel::Gaussian { t_n, v_n, rate }
            } else {
                TailModel::Zero
            }
        }
        DecayClass::Polynomial { exponent } => {
            let fitted = if same_sign {
                (v_j / v_n).ln() / (t_n / t_j).ln()
            } else {
                f64::NAN
            };
            let exponent = if fitted > 0.5 && fitted.is_finite() {
                fitted
            } else {
                exponent
            };
            TailModel::Power {
                t_n,
                v_n,
                exponent,
            }
        }
    }
}

/// `n` points geometrically spaced over `[a, b]`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points uniformly spaced over `[a, b]`.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_samples() {
        let d = DecayClass::Exponential;
        assert!(SampledFunction::new(vec![1.0], vec![1.0], d).is_err());
        assert!(SampledFunction::new(vec![1.0, 2.0], vec![1.0], d).is_err());
        assert!(SampledFunction::new(vec![2.0, 1.0], vec![1.0, 1.0], d).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0, 1.0], d).is_err());
        assert!(SampledFunction::new(vec![1.0, 1.0], vec![1.0, 1.0], d).is_err());
        assert!(SampledFunction::new(vec![1.0, 2.0], vec![1.0, f64::NAN], d).is_err());
    }

    #[test]
    fn spline_reproduces_smooth_function() {
        let grid = geometric_grid(1e-3, 40.0, 400);
        let f = SampledFunction::from_fn(grid, DecayClass::Exponential, |t| (-t).exp()).unwrap();
        for t in [2e-3, 0.1, 0.77, 3.3, 17.0] {
            assert!((f.eval(t) - (-t).exp()).abs() < 1e-7, "t = {t}");
        }
        // Tail: exponential fit recovers the rate.
        match f.tail_params() {
            TailModel::Exponential { rate, .. } => assert!((rate - 1.0).abs() < 1e-6),
            other => panic!("unexpected tail {other:?}"),
        }
        assert!((f.eval(50.0) - (-50f64).exp()).abs() < 1e-25);
        // Head: polynomial extrapolation towards f(0) = 1.
        assert!((f.eval(1e-6) - (-1e-6f64).exp()).abs() < 1e-9);
        let coarse = SampledFunction::from_fn(geometric_grid(0.1, 10.0, 50), DecayClass::Exponential, |t| (-t).exp()).unwrap();
        assert!((coarse.eval(0.0) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn power_head_and_tail() {
        let grid = geometric_grid(1e-2, 1e2, 257);
        let g = |t: f64| t.sqrt() / (1.0 + t * t);
        let f = SampledFunction::from_fn(grid, DecayClass::Polynomial { exponent: 1.5 }, g).unwrap();
        assert!(matches!(f.head_model(), HeadModel::Power { .. }));
        // The local exponent of g drifts by O(t^2); one decade out that is
        // a relative error of a few parts in 10^4. Same story at the tail,
        // where the exponent is fitted over the last decade.
        assert!((f.eval(1e-3) / g(1e-3) - 1.0).abs() < 1e-3);
        assert!((f.eval(1e3) / g(1e3) - 1.0).abs() < 1e-2);
    }
}
