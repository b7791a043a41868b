//! The convolution attached to the half-Hartley transform, defined by
//! `H(f * g)(x) = sqrt(x pi/2) (H f)(x) (H g)(x)`.
//!
//! Three routes: a real oscillatory integral against the inversion kernel
//! (primary), a single contour integral along the critical line, and the
//! double contour integral kept as a low-accuracy oracle.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::function::{geometric_grid, DecayClass, FnFunction, HalfLineFunction, SampledFunction};
use crate::hartley::hartley_forward_direct;
use crate::mellin::{
    default_line_grid, mellin_inverse, parseval_sq_norm, MellinLineFunction,
};
use crate::quadrature::{integrate_adaptive, integrate_semi_infinite, Estimate, QuadratureConfig};
use crate::report::VerificationReport;
use crate::special::{k_unchecked, log_cosh, log_gamma, CriticalPoint};

/// Upper limit on kernel evaluations for the double contour integral.
pub const DOUBLE_MB_MAX_EVALS: usize = 4_000_000;

/// Points per decade and decades used when sampling a convolution for
/// re-transformation.
pub const SAMPLES_PER_DECADE: usize = 64;
pub const SAMPLE_DECADES: (f64, f64) = (-2.0, 2.0);

/// Which route produced a convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Parseval,
    MellinLine,
    DoubleMb,
}

/// Convolution samples on an `x` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionResult {
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub route: Route,
    /// Relative factorization residual per grid point; empty when not
    /// computed.
    pub factorization_residual: Vec<f64>,
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("x = {x}")))
    }
}

/// `H f` of a catalog entry: the closed form when there is one, the direct
/// route otherwise. Transforms decay like `1/t`.
pub fn transform_of<'a>(
    entry: &'a CatalogEntry,
    cfg: &'a QuadratureConfig,
) -> FnFunction<impl Fn(f64) -> f64 + Sync + 'a> {
    FnFunction::new(
        move |t: f64| match entry.hartley_closed_form {
            Some(h) => h(t),
            None => hartley_forward_direct(&entry.func, t, cfg)
                .map(|e| e.value)
                .unwrap_or(f64::NAN),
        },
        DecayClass::Polynomial { exponent: 1.0 },
    )
}

/// Rejects entries whose Mellin transform does not satisfy
/// `s f*(s) in L2` on the line, judged by the weighted transform at the grid
/// ends.
pub fn check_weighted_decay(entry: &CatalogEntry) -> Result<()> {
    let big = MellinLineFunction::from_analytic(&entry.func, default_line_grid(entry.func.decay))?;
    let weighted: Vec<f64> = big
        .tau_grid()
        .iter()
        .zip(big.values())
        .map(|(&t, v)| Complex64::new(0.5, t).norm() * v.norm())
        .collect();
    let peak = weighted.iter().cloned().fold(0.0, f64::max);
    let ends = weighted[0].max(weighted[weighted.len() - 1]);
    if peak > 0.0 && ends > 1e-3 * peak {
        return Err(Error::InvalidInput(format!(
            "{}: s f*(s) is not square integrable on the critical line",
            entry.name()
        )));
    }
    Ok(())
}

/// `(f * g)(x) = int_0^inf Phi(xt) sqrt(t pi/2) (H f)(t) (H g)(t) dt`, the
/// inversion formula applied to the factorized transform.
///
/// With `Phi(u) = (sin u + cos u)/sqrt(2 pi) - k(u)/(2 pi^{3/2})` this is half
/// of `sqrt(pi/2) H[sqrt t (H f)(H g)](x)` minus an absolutely convergent
/// integral against the monotone kernel `k`.
pub fn convolve_parseval(
    f: &CatalogEntry,
    g: &CatalogEntry,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    check_x("convolve_parseval", x)?;
    check_weighted_decay(f)?;
    check_weighted_decay(g)?;
    let (hf, hg) = (transform_of(f, cfg), transform_of(g, cfg));
    let p = |t: f64| t.sqrt() * hf.eval(t) * hg.eval(t);
    let osc = hartley_forward_direct(&FnFunction::new(p, DecayClass::Polynomial { exponent: 1.5 }), x, cfg)?;
    let smooth = |t: f64| k_unchecked(x * t) * p(t);
    let near = integrate_adaptive(smooth, 0.0, 1.0, cfg)?;
    let far = integrate_semi_infinite(smooth, 1.0, cfg)?;
    let a = 0.5 * (PI / 2.0).sqrt();
    let c = 1.0 / (2.0 * SQRT_2 * PI);
    let value = a * osc.value - c * (near.value + far.value);
    if !value.is_finite() {
        return Err(Error::NonFinite("convolve_parseval"));
    }
    Ok(Estimate {
        value,
        err_est: a * osc.err_est + c * (near.err_est + far.err_est),
    })
}

/// `K(u) = Gamma(1/2 + iu) cosh(pi u/2)`, which is `Gamma(s) sin(pi(s+1/2)/2)`
/// at `s = 1/2 + iu`.
fn kernel_factor(u: f64) -> Result<Complex64> {
    let lg = log_gamma(Complex64::new(0.5, u))?;
    Ok((lg + log_cosh(PI * u / 2.0)).exp())
}

/// `(M(f*g))(1-s)` at one `s = 1/2 + i tau`:
/// `sqrt2 / K(tau) (1/2pi) int K(tau - th) K(th) F(th - tau) G(-th) d th`.
///
/// `F` is interpolated; the integral runs over the nodes of `G`.
pub fn convolve_mellin_line(
    big_f: &MellinLineFunction,
    big_g: &MellinLineFunction,
    s: CriticalPoint,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let tau = s.tau();
    if big_f.max_abs() == 0.0 || big_g.max_abs() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k_tau = kernel_factor(tau)?;
    let grid = big_g.tau_grid();
    let vals: Vec<Complex64> = (0..grid.len())
        .map(|j| {
            let th = grid[j];
            let fv = big_f.eval(th - tau);
            if fv == Complex64::new(0.0, 0.0) {
                return Ok(fv);
            }
            Ok(kernel_factor(tau - th)? * kernel_factor(th)? * fv * big_g.reflected(j))
        })
        .collect::<Result<_>>()?;
    let r = crate::mellin::line_integral(grid, &vals, &cfg.clone().lenient())?;
    Ok(r.value * SQRT_2 / k_tau)
}

/// The Mellin transform of `f * g` on the common grid of `F` and `G`, by the
/// same integral evaluated as a discrete correlation on the uniform grid.
pub fn convolution_line(big_f: &MellinLineFunction, big_g: &MellinLineFunction) -> Result<MellinLineFunction> {
    if !big_f.same_grid(big_g) {
        return Err(Error::InvalidInput("both transforms must share one tau grid".into()));
    }
    let grid = big_f.tau_grid().to_vec();
    let n = grid.len();
    if n.is_multiple_of(2) {
        return Err(Error::InvalidInput("the grid needs an odd number of nodes".into()));
    }
    if big_f.max_abs() == 0.0 || big_g.max_abs() == 0.0 {
        return MellinLineFunction::zero(grid);
    }
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if grid.windows(2).any(|p| ((p[1] - p[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidInput("the grid must be uniform".into()));
    }
    let mid = (n / 2) as isize;
    let k: Vec<Complex64> = grid.iter().map(|&u| kernel_factor(u)).collect::<Result<_>>()?;
    let (fv, gv) = (big_f.values(), big_g.values());
    let scale = SQRT_2 * h / (2.0 * PI);
    // Entry i holds M(f*g)(1/2 - i tau_i); it is stored at the mirrored node.
    let at_reflected: Vec<Complex64> = (0..n as isize)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            // th_j - tau_i must stay on the grid.
            let lo = (i - mid).max(0);
            let hi = (i + mid).min(n as isize - 1);
            for j in lo..=hi {
                let fi = (mid + j - i) as usize;
                let ki = (mid + i - j) as usize;
                let j = j as usize;
                acc += k[ki] * k[j] * fv[fi] * gv[n - 1 - j];
            }
            acc * scale / k[i as usize]
        })
        .collect();
    let values: Vec<Complex64> = at_reflected.into_iter().rev().collect();
    MellinLineFunction::new(grid, values, false)
}

/// Common line grid for a pair: the one of the more slowly decaying factor.
pub fn pair_grid(f: &CatalogEntry, g: &CatalogEntry) -> Vec<f64> {
    let (df, dg) = (f.func.decay, g.func.decay);
    if df.default_truncation() >= dg.default_truncation() {
        default_line_grid(df)
    } else {
        default_line_grid(dg)
    }
}

/// The Mellin transform of `f * g` for a catalog pair, built from the closed
/// forms of `f*` and `g*`.
pub fn pair_convolution_line(f: &CatalogEntry, g: &CatalogEntry) -> Result<MellinLineFunction> {
    let grid = pair_grid(f, g);
    let big_f = MellinLineFunction::from_analytic(&f.func, grid.clone())?;
    let big_g = MellinLineFunction::from_analytic(&g.func, grid)?;
    convolution_line(&big_f, &big_g)
}

/// `(f * g)(x)` through the critical-line route.
pub fn convolve_mellin_route(
    line: &MellinLineFunction,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_x("convolve_mellin_route", x)?;
    if line.max_abs() == 0.0 {
        return Ok(0.0);
    }
    mellin_inverse(line, x, cfg)
}

/// `K(tau, th) = Gamma(s)Gamma(w)/Gamma(s+w-1/2) [sin(pi(s+w)/2) +
/// cos(pi(s-w)/2)] / sin(pi(s+w)/2)` at `s = 1/2 + i tau`, `w = 1/2 + i th`.
pub fn double_kernel(tau: f64, th: f64) -> Result<Complex64> {
    let lg = log_gamma(Complex64::new(0.5, tau))? + log_gamma(Complex64::new(0.5, th))?
        - log_gamma(Complex64::new(0.5, tau + th))?;
    let trig = std::f64::consts::LN_2 + log_cosh(PI * tau / 2.0) + log_cosh(PI * th / 2.0)
        - log_cosh(PI * (tau + th) / 2.0);
    Ok((lg + trig).exp())
}

/// The bound `4 sqrt(2 pi)` on `|K(tau, th)|` over the critical line.
pub const DOUBLE_KERNEL_BOUND: f64 = 10.026_513_098_524_001;

/// `(f * g)(x)` from the double contour integral, as iterated trapezoid sums
/// over the grids of `F` and `G`. The integral as written is `sqrt 2` times
/// the convolution fixed by the factorization identity; the factor is
/// removed here.
pub fn convolve_double_mb(
    big_f: &MellinLineFunction,
    big_g: &MellinLineFunction,
    x: f64,
    _cfg: &QuadratureConfig,
) -> Result<f64> {
    check_x("convolve_double_mb", x)?;
    let (nf, ng) = (big_f.len(), big_g.len());
    let requested = nf.saturating_mul(ng);
    if requested > DOUBLE_MB_MAX_EVALS {
        return Err(Error::CostGuard {
            requested,
            limit: DOUBLE_MB_MAX_EVALS,
        });
    }
    if big_f.max_abs() == 0.0 || big_g.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let weights = |grid: &[f64]| -> Vec<f64> {
        let n = grid.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
                let r = if i + 1 < n { grid[i + 1] - grid[i] } else { 0.0 };
                0.5 * (l + r)
            })
            .collect()
    };
    let (wf, wg) = (weights(big_f.tau_grid()), weights(big_g.tau_grid()));
    let lx = x.ln();
    let rows: Vec<Complex64> = (0..nf)
        .into_par_iter()
        .map(|i| {
            let tau = big_f.tau_grid()[i];
            let fv = big_f.reflected(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..ng {
                let th = big_g.tau_grid()[j];
                let prod = fv * big_g.reflected(j);
                if prod.norm() == 0.0 {
                    continue;
                }
                let k = double_kernel(tau, th)?;
                acc += k * prod * Complex64::from_polar(wg[j], (tau + th) * lx);
            }
            Ok(acc * wf[i])
        })
        .collect::<Result<_>>()?;
    let total: Complex64 = rows.iter().sum();
    let value = total.re * x.powf(-0.5) / (4.0 * PI * PI) / SQRT_2;
    if !value.is_finite() {
        return Err(Error::NonFinite("convolve_double_mb"));
    }
    Ok(value)
}

/// Largest `|K(tau, th)|` on an `n x n` grid over `[-a, a]^2`.
pub fn double_kernel_max(a: f64, n: usize) -> Result<f64> {
    let pts: Vec<f64> = (0..n).map(|i| -a + 2.0 * a * i as f64 / (n - 1) as f64).collect();
    let mut max = 0.0f64;
    for &t in &pts {
        for &th in &pts {
            max = max.max(double_kernel(t, th)?.norm());
        }
    }
    Ok(max)
}

/// Convolution of a catalog pair on `x_grid` by one route.
pub fn convolve(
    f: &CatalogEntry,
    g: &CatalogEntry,
    x_grid: &[f64],
    route: Route,
    cfg: &QuadratureConfig,
) -> Result<ConvolutionResult> {
    let values = match route {
        Route::Parseval => x_grid
            .iter()
            .map(|&x| convolve_parseval(f, g, x, cfg).map(|e| e.value))
            .collect::<Result<Vec<_>>>()?,
        Route::MellinLine => {
            let line = pair_convolution_line(f, g)?;
            x_grid
                .iter()
                .map(|&x| convolve_mellin_route(&line, x, cfg))
                .collect::<Result<Vec<_>>>()?
        }
        Route::DoubleMb => {
            let grid = double_mb_grid(f, g);
            let big_f = MellinLineFunction::from_analytic(&f.func, grid.clone())?;
            let big_g = MellinLineFunction::from_analytic(&g.func, grid)?;
            x_grid
                .iter()
                .map(|&x| convolve_double_mb(&big_f, &big_g, x, cfg))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ConvolutionResult {
        x_grid: x_grid.to_vec(),
        values,
        route,
        factorization_residual: Vec::new(),
    })
}

/// Grid for the double integral: the pair's truncation with the largest odd
/// node count whose square stays under the cost guard.
pub fn double_mb_grid(f: &CatalogEntry, g: &CatalogEntry) -> Vec<f64> {
    let t = f
        .func
        .decay
        .default_truncation()
        .max(g.func.decay.default_truncation())
        .min(crate::special::MAX_IMAG / 2.0);
    crate::mellin::symmetric_grid(t, 1025)
}

/// `f * g` sampled through the critical-line route on a geometric grid, as a
/// function ready for re-transformation. The convolution behaves like
/// `sqrt x` at the origin and decays like `x^{-3/2}`.
pub fn sampled_convolution(
    f: &CatalogEntry,
    g: &CatalogEntry,
    cfg: &QuadratureConfig,
) -> Result<SampledFunction> {
    let (lo, hi) = SAMPLE_DECADES;
    let n = SAMPLES_PER_DECADE * (hi - lo) as usize + 1;
    let grid = geometric_grid(10f64.powf(lo), 10f64.powf(hi), n);
    let line = pair_convolution_line(f, g)?;
    let values = grid
        .iter()
        .map(|&x| convolve_mellin_route(&line, x, cfg))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid, values, DecayClass::Polynomial { exponent: 1.5 })
}

/// Checks `H(f*g)(x) = sqrt(x pi/2) (H f)(x) (H g)(x)` on `x_grid`; the left
/// side transforms a dense sampling of the convolution.
pub fn factorization_residual(
    f: &CatalogEntry,
    g: &CatalogEntry,
    x_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "factorization",
        serde_json::to_value(cfg).expect("config serializes"),
    );
    let conv = sampled_convolution(f, g, cfg)?;
    let (hf, hg) = (transform_of(f, cfg), transform_of(g, cfg));
    let mut worst = 0.0f64;
    for &x in x_grid {
        check_x("factorization_residual", x)?;
        let left = hartley_forward_direct(&conv, x, cfg)?.value;
        let right = (x * PI / 2.0).sqrt() * hf.eval(x) * hg.eval(x);
        let resid = if right == 0.0 {
            left.abs()
        } else {
            (left - right).abs() / right.abs()
        };
        worst = worst.max(resid);
        report.at_most(
            format!("{}*{} at x = {x}: relative residual", f.name(), g.name()),
            resid,
            1e-3,
            0.0,
        );
    }
    report.at_most(format!("{}*{}: max relative residual", f.name(), g.name()), worst, 1e-3, 0.0);
    Ok(report)
}

/// `(int |(1/2 + i tau) F(tau)|^2 d tau)^{1/2}` on the grid of `F`.
pub fn weighted_line_norm(big_f: &MellinLineFunction, cfg: &QuadratureConfig) -> Result<f64> {
    let w = big_f.map(|t, v| v * Complex64::new(0.5, t))?;
    // parseval_sq_norm carries a 1/2pi factor.
    Ok((2.0 * PI * parseval_sq_norm(&w, cfg)?.value.re).max(0.0).sqrt())
}

/// Checks `||f*g|| <= 4 sqrt(2/pi) ||s g*|| ||s f*||`, the left side by
/// Parseval on the critical-line route.
pub fn norm_bound_check(f: &CatalogEntry, g: &CatalogEntry, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let grid = pair_grid(f, g);
    let big_f = MellinLineFunction::from_analytic(&f.func, grid.clone())?;
    let big_g = MellinLineFunction::from_analytic(&g.func, grid)?;
    let line = convolution_line(&big_f, &big_g)?;
    let lenient = cfg.clone().lenient();
    let conv_norm = parseval_sq_norm(&line, &lenient)?.value.re.max(0.0).sqrt();
    let bound = 4.0 * (2.0 / PI).sqrt() * weighted_line_norm(&big_f, &lenient)? * weighted_line_norm(&big_g, &lenient)?;
    let mut report = VerificationReport::new(
        "convolution-norm",
        serde_json::to_value(cfg).expect("config serializes"),
    );
    report.at_most(format!("{}*{}: norm bound", f.name(), g.name()), conv_norm, bound, 1e-6);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;

    fn entry(name: &str) -> &'static CatalogEntry {
        lookup(name).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    // Reference values for exp * exp from a 30-digit evaluation of the
    // factorized transform.
    const EXP_EXP: [(f64, f64); 3] = [
        (0.5, 0.588_056_909_265_29),
        (1.0, 0.366_573_063_437_86),
        (2.0, 0.073_113_735_226_39),
    ];

    #[test]
    fn parseval_route_matches_reference() {
        let e = entry("exp");
        for (x, v) in EXP_EXP {
            let got = convolve_parseval(e, e, x, &cfg()).unwrap().value;
            assert!((got - v).abs() < 1e-7, "x = {x}: {got} vs {v}");
        }
    }

    #[test]
    fn mellin_route_matches_reference() {
        let e = entry("exp");
        let line = pair_convolution_line(e, e).unwrap();
        for (x, v) in EXP_EXP {
            let got = convolve_mellin_route(&line, x, &cfg()).unwrap();
            assert!((got - v).abs() < 1e-7, "x = {x}: {got} vs {v}");
        }
    }

    #[test]
    fn double_mb_matches_reference() {
        let e = entry("exp");
        let grid = double_mb_grid(e, e);
        let big = MellinLineFunction::from_analytic(&e.func, grid).unwrap();
        for (x, v) in EXP_EXP {
            let got = convolve_double_mb(&big, &big, x, &cfg()).unwrap();
            assert!((got - v).abs() < 1e-3, "x = {x}: {got} vs {v}");
        }
    }

    #[test]
    fn zero_factor_gives_zero() {
        let (e, z) = (entry("exp"), entry("zero"));
        assert_eq!(convolve_parseval(e, z, 1.0, &cfg()).unwrap().value, 0.0);
        let line = pair_convolution_line(e, z).unwrap();
        assert_eq!(convolve_mellin_route(&line, 1.0, &cfg()).unwrap(), 0.0);
        let grid = double_mb_grid(e, z);
        let big = MellinLineFunction::from_analytic(&e.func, grid.clone()).unwrap();
        let zero = MellinLineFunction::zero(grid).unwrap();
        assert_eq!(convolve_double_mb(&zero, &big, 1.0, &cfg()).unwrap(), 0.0);
        let p = CriticalPoint::new(0.0).unwrap();
        assert_eq!(convolve_mellin_line(&big, &zero, p, &cfg()).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cost_guard_and_hypothesis() {
        let e = entry("exp");
        let big = MellinLineFunction::from_analytic(&e.func, crate::mellin::symmetric_grid(40.0, 2049)).unwrap();
        assert!(matches!(
            convolve_double_mb(&big, &big, 1.0, &cfg()),
            Err(Error::CostGuard { .. })
        ));
        assert!(matches!(
            convolve_parseval(entry("box"), e, 1.0, &cfg()),
            Err(Error::InvalidInput(_))
        ));
        assert!(convolve_parseval(e, e, -1.0, &cfg()).is_err());
    }

    #[test]
    fn kernel_bound_on_grid() {
        let max = double_kernel_max(5.0, 41).unwrap();
        assert!(max <= DOUBLE_KERNEL_BOUND + 1e-8);
        // At the origin the kernel is 2 Gamma(1/2) = 2 sqrt(pi).
        assert!((double_kernel(0.0, 0.0).unwrap().norm() - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert!((DOUBLE_KERNEL_BOUND - 4.0 * (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn point_and_grid_forms_agree() {
        let e = entry("exp");
        let grid = pair_grid(e, e);
        let big = MellinLineFunction::from_analytic(&e.func, grid.clone()).unwrap();
        let line = convolution_line(&big, &big).unwrap();
        for tau in [0.0, 1.0, -2.5] {
            let p = CriticalPoint::new(tau).unwrap();
            let point = convolve_mellin_line(&big, &big, p, &cfg()).unwrap();
            let from_grid = line.eval(-tau);
            assert!((point - from_grid).norm() < 1e-9, "tau = {tau}: {point} vs {from_grid}");
        }
    }
}
