//! Verification suites: every identity the library relies on, checked
//! numerically and recorded as a [`VerificationReport`].

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog, lookup, CatalogEntry};
use crate::convolution::{
    convolve_double_mb, convolve_mellin_route, convolve_parseval, double_kernel_max, double_mb_grid,
    factorization_residual, norm_bound_check, pair_convolution_line, transform_of,
    DOUBLE_KERNEL_BOUND,
};
use crate::error::{Error, Result};
use crate::function::{DecayClass, FnFunction, HalfLineFunction};
use crate::hartley::{
    hartley_forward_direct, hartley_forward_mellin, hartley_forward_regularized, hartley_inverse,
    norm_bounds_check, theta_on_grid, transform_sq_norm, transformed_line,
};
use crate::homogeneous::{
    corollary1_check, eigen_residual, eigen_residual_line, sandwich_check, solution_candidate,
    stieltjes_apply, SpectralParameter, CANDIDATE_EIGEN_FLOOR, EIGEN_X_GRID, EXP_EIGEN_FLOOR,
};
use crate::mellin::{
    default_line_grid, generalized_parseval, mellin_forward, mellin_forward_default,
    parseval_sq_norm, symmetric_grid, MellinLineFunction,
};
use crate::quadrature::{integrate_adaptive, integrate_semi_infinite, QuadratureConfig};
use crate::report::VerificationReport;
use crate::special::{inverse_kernel_phi, kernel_k, theta_multiplier, CriticalPoint};

/// A named group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Forward,
    Inversion,
    Norms,
    Multiplier,
    Parseval,
    Factorization,
    OperatorIdentity,
    Homogeneous,
    SpecialKernels,
    All,
}

impl Suite {
    /// Every suite except `All`, in run order.
    pub const EACH: [Suite; 9] = [
        Suite::Forward,
        Suite::Inversion,
        Suite::Norms,
        Suite::Multiplier,
        Suite::Parseval,
        Suite::Factorization,
        Suite::OperatorIdentity,
        Suite::Homogeneous,
        Suite::SpecialKernels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Forward => "forward",
            Suite::Inversion => "inversion",
            Suite::Norms => "norms",
            Suite::Multiplier => "multiplier",
            Suite::Parseval => "parseval",
            Suite::Factorization => "factorization",
            Suite::OperatorIdentity => "operator-identity",
            Suite::Homogeneous => "homogeneous",
            Suite::SpecialKernels => "special-kernels",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Settings shared by the suites; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    pub quadrature: QuadratureConfig,
}

impl VerifyConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            tol_scale: 1.0,
            quadrature: QuadratureConfig::default(),
        }
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.tol_scale
    }

    fn report(&self, suite: Suite) -> VerificationReport {
        let mut echo = self.clone();
        echo.suite = suite;
        VerificationReport::new(suite.name(), serde_json::to_value(echo).expect("config serializes"))
    }
}

fn entry(name: &str) -> &'static CatalogEntry {
    lookup(name).expect("catalog entry")
}

/// Runs one suite, or all of them.
pub fn run_suite(cfg: &VerifyConfig) -> Result<VerificationReport> {
    if cfg.tol_scale.is_nan() || cfg.tol_scale <= 0.0 {
        return Err(Error::InvalidInput(format!("tol_scale = {}", cfg.tol_scale)));
    }
    cfg.quadrature.validate()?;
    match cfg.suite {
        Suite::All => {
            let mut all = cfg.report(Suite::All);
            for s in Suite::EACH {
                all.absorb(run_one(s, cfg)?);
            }
            Ok(all)
        }
        s => run_one(s, cfg),
    }
}

fn run_one(suite: Suite, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let mut r = cfg.report(suite);
    match suite {
        Suite::Forward => forward(cfg, &mut r)?,
        Suite::Inversion => inversion(cfg, &mut r)?,
        Suite::Norms => norms(cfg, &mut r)?,
        Suite::Multiplier => multiplier(cfg, &mut r)?,
        Suite::Parseval => parseval(cfg, &mut r)?,
        Suite::Factorization => factorization(cfg, &mut r)?,
        Suite::OperatorIdentity => operator_identity(cfg, &mut r)?,
        Suite::Homogeneous => homogeneous(cfg, &mut r)?,
        Suite::SpecialKernels => special_kernels(cfg, &mut r)?,
        Suite::All => unreachable!("handled by run_suite"),
    }
    Ok(r)
}

/// Forward routes against the closed form for `e^{-t}`, and pairwise route
/// agreement on the catalog.
fn forward(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = &cfg.quadrature;
    let exp = entry("exp");
    let closed = exp.hartley_closed_form.expect("closed form");
    let big = mellin_forward_default(&exp.func, q)?;
    let (mut d, mut g, mut m) = (0.0f64, 0.0f64, 0.0f64);
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let h = closed(x);
        d = d.max((hartley_forward_direct(&exp.func, x, q)?.value - h).abs());
        g = g.max((hartley_forward_regularized(&exp.func, x, q)?.value - h).abs());
        m = m.max((hartley_forward_mellin(&big, x, q)?.value - h).abs());
    }
    r.at_most("exp: direct vs closed form", d, cfg.tol(1e-7), 0.0);
    r.at_most("exp: regularized vs closed form", g, cfg.tol(1e-7), 0.0);
    r.at_most("exp: mellin vs closed form", m, cfg.tol(1e-7), 0.0);
    let lenient = q.clone().lenient();
    for e in catalog().iter().filter(|e| !e.synthetic) {
        let big = mellin_forward_default(&e.func, q)?;
        let mut worst = 0.0f64;
        for x in [0.3, 1.0, 2.7, 8.0] {
            let d = hartley_forward_direct(&e.func, x, q)?.value;
            let g = hartley_forward_regularized(&e.func, x, q)?.value;
            let m = hartley_forward_mellin(&big, x, &lenient)?.value;
            let scale = 1.0 + d.abs();
            worst = worst.max((d - g).abs() / scale).max((d - m).abs() / scale);
        }
        r.at_most(format!("{}: route agreement", e.name()), worst, cfg.tol(1e-6), 0.0);
    }
    Ok(())
}

/// Round trip through the transform and its Fresnel-kernel inverse.
fn inversion(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = cfg.quadrature.clone();
    let inner = q.clone();
    let loose = q.with_tol(1e-8);
    for name in ["exp", "texp", "gauss"] {
        let f = entry(name).func;
        let inner = inner.clone();
        let h = FnFunction::new(
            move |t: f64| {
                hartley_forward_direct(&f, t, &inner)
                    .map(|e| e.value)
                    .unwrap_or(f64::NAN)
            },
            DecayClass::Polynomial { exponent: 1.0 },
        );
        for x in [0.3, 0.7, 1.0, 2.7] {
            let back = hartley_inverse(&h, x, &loose)?.value;
            let exact = f.eval(x);
            r.at_most(
                format!("{name} at x = {x}: relative error"),
                (back - exact).abs() / (1.0 + exact.abs()),
                cfg.tol(1e-3),
                0.0,
            );
        }
    }
    Ok(())
}

/// `sqrt2 ||f|| <= ||H f|| <= 2 ||f||` on the catalog.
fn norms(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let lenient = cfg.quadrature.clone().lenient();
    for e in catalog() {
        let mut sub = norm_bounds_check(&e.func, &lenient)?;
        for c in &mut sub.cases {
            c.tolerance = cfg.tol(c.tolerance);
        }
        for c in sub.cases {
            r.push(crate::report::Case::new(c.name, c.measured, c.bound, c.tolerance, c.relation));
        }
    }
    let big = mellin_forward_default(&entry("exp").func, &cfg.quadrature)?;
    r.equals(
        "exp: ||Hf||^2 = 1 + 2/pi",
        transform_sq_norm(&big, &cfg.quadrature)?,
        1.0 + 2.0 / PI,
        cfg.tol(1e-6),
    );
    Ok(())
}

/// Band and reflection of `theta`, and the multiplier acting on `e^{-t}`.
fn multiplier(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let grid = symmetric_grid(20.0, 1001);
    let th = theta_on_grid(&grid)?;
    let (mut lo, mut hi, mut refl) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (&t, v) in grid.iter().zip(&th) {
        lo = lo.min(v.norm());
        hi = hi.max(v.norm());
        let other = theta_multiplier(CriticalPoint::new(-t)?)?;
        let expected = 2.0 + 2.0 / (PI * t).cosh();
        refl = refl.max((v * other - expected).norm());
    }
    r.at_least("|theta| >= sqrt2", lo, SQRT_2, cfg.tol(1e-10));
    r.at_most("|theta| <= 2", hi, 2.0, cfg.tol(1e-10));
    r.at_most("theta(s) theta(1-s) = 2 + 2 sech(pi tau)", refl, cfg.tol(1e-9), 0.0);
    let h = FnFunction::new(entry("exp").hartley_closed_form.expect("closed form"), DecayClass::Polynomial {
        exponent: 1.0,
    });
    let grid = symmetric_grid(10.0, 201);
    let lhs = mellin_forward(&h, grid.clone(), &cfg.quadrature)?;
    let rhs = transformed_line(&mellin_forward(&entry("exp").func, grid, &cfg.quadrature)?)?;
    let worst = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    r.at_most("exp: M[Hf](s) = theta(s) f*(1-s)", worst, cfg.tol(1e-6), 0.0);
    Ok(())
}

/// `int_0^inf f1(xt) f2(t) dt` by direct quadrature, split at kinks.
fn direct_pairing(f1: &CatalogEntry, f2: &CatalogEntry, x: f64) -> Result<f64> {
    let c = QuadratureConfig::default().with_tol(1e-12);
    let g = |t: f64| f1.func.eval(x * t) * f2.func.eval(t);
    let mut pts = vec![0.0];
    if let Some(e) = f1.func.decay.support_end() {
        pts.push(e / x);
    }
    if let Some(e) = f2.func.decay.support_end() {
        pts.push(e);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut v = 0.0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            v += integrate_adaptive(g, w[0], w[1], &c)?.value;
        }
    }
    let last = *pts.last().expect("nonempty");
    Ok(v + integrate_semi_infinite(g, last.max(1e-300), &c)?.value)
}

/// Plain and generalized Parseval identities.
fn parseval(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = &cfg.quadrature;
    let exp = entry("exp");
    let big = mellin_forward_default(&exp.func, q)?;
    let c = q.clone().with_tol(1e-12);
    let left = integrate_semi_infinite(|t: f64| (-2.0 * t).exp(), 0.0, &c)?.value;
    r.equals("exp: int f^2 = 1/2", left, 0.5, cfg.tol(1e-8));
    r.equals("exp: line norm = 1/2", parseval_sq_norm(&big, q)?.value.re, 0.5, cfg.tol(1e-8));
    let names = ["exp", "gauss", "texp", "box", "lorentz"];
    let lenient = q.clone().lenient();
    for a in names {
        for b in names {
            let (fa, fb) = (entry(a), entry(b));
            let grid = [fa.func.decay, fb.func.decay]
                .into_iter()
                .max_by(|x, y| x.default_truncation().total_cmp(&y.default_truncation()))
                .map(default_line_grid)
                .expect("two classes");
            let ba = MellinLineFunction::from_analytic(&fa.func, grid.clone())?;
            let bb = MellinLineFunction::from_analytic(&fb.func, grid)?;
            let mut worst = 0.0f64;
            for x in [0.5, 1.0, 2.0] {
                let rhs = generalized_parseval(&ba, &bb, x, &lenient)?;
                worst = worst.max((direct_pairing(fa, fb, x)? - rhs).abs());
            }
            r.at_most(format!("{a},{b}: generalized Parseval"), worst, cfg.tol(1e-6), 0.0);
        }
    }
    Ok(())
}

/// Convolution routes, factorization, kernel and norm bounds.
fn factorization(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = &cfg.quadrature;
    let xs = [0.5, 1.0, 2.0];
    for (a, b) in [("exp", "exp"), ("exp", "texp")] {
        let (f, g) = (entry(a), entry(b));
        let line = pair_convolution_line(f, g)?;
        let grid = double_mb_grid(f, g);
        let big_f = MellinLineFunction::from_analytic(&f.func, grid.clone())?;
        let big_g = MellinLineFunction::from_analytic(&g.func, grid)?;
        let mut worst = 0.0f64;
        for x in xs {
            let p = convolve_parseval(f, g, x, q)?.value;
            let m = convolve_mellin_route(&line, x, q)?;
            let d = convolve_double_mb(&big_f, &big_g, x, q)?;
            worst = worst.max((p - m).abs()).max((p - d).abs()).max((m - d).abs());
        }
        r.at_most(format!("{a}*{b}: route triangle"), worst, cfg.tol(2e-3), 0.0);
        let swapped = (convolve_parseval(f, g, 1.0, q)?.value - convolve_parseval(g, f, 1.0, q)?.value).abs();
        r.at_most(format!("{a}*{b}: commutativity"), swapped, cfg.tol(1e-6), 0.0);
    }
    for (a, b) in [("exp", "exp"), ("exp", "texp"), ("exp", "gauss")] {
        let mut sub = factorization_residual(entry(a), entry(b), &xs, q)?;
        for c in &mut sub.cases {
            c.bound = cfg.tol(c.bound);
        }
        for c in sub.cases {
            r.push(crate::report::Case::new(c.name, c.measured, c.bound, c.tolerance, c.relation));
        }
        r.absorb(norm_bound_check(entry(a), entry(b), q)?);
    }
    let e = entry("exp");
    let witness = convolve_parseval(e, e, 1.0, q)?.value.abs();
    r.at_least("exp*exp: |(f*g)(1)| > 1e-3", witness, 1e-3, 0.0);
    r.at_most("kernel bound on [-5,5]^2", double_kernel_max(5.0, 41)?, DOUBLE_KERNEL_BOUND, 1e-8);
    Ok(())
}

/// `H(H f) = 2 f + (2/pi) int f(t)/(x+t) dt` for `e^{-t}`.
fn operator_identity(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = &cfg.quadrature;
    let exp = entry("exp");
    let h = transform_of(exp, q);
    for x in [0.5, 1.0, 2.0] {
        let left = hartley_forward_direct(&h, x, q)?.value;
        let right = 2.0 * exp.func.eval(x) + stieltjes_apply(&exp.func, x, q)?.value;
        r.at_most(format!("x = {x}: |H^2 f - 2f - S f|"), (left - right).abs(), cfg.tol(1e-4), 0.0);
    }
    Ok(())
}

/// Multiplier sign, bracket band, norm sandwich and eigen residual floors.
fn homogeneous(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let q = &cfg.quadrature;
    let grid = symmetric_grid(30.0, 1001);
    for l in [0.0, 0.5, -0.5, 1.0, -1.0, 1.41, -1.41] {
        r.absorb(corollary1_check(l, &grid)?);
    }
    let th = theta_on_grid(&grid)?;
    let band = grid
        .iter()
        .zip(&th)
        .map(|(&t, v)| (v.norm() - 2.0 * (PI * t / 2.0).cosh() / (PI * t).cosh().sqrt()).abs())
        .fold(0.0, f64::max);
    r.at_most("bracket = 2 cosh(pi tau/2)/sqrt(cosh(pi tau))", band, cfg.tol(1e-10), 0.0);
    let phi_grid = symmetric_grid(40.0, 4097);
    let phis = [
        (
            "gaussian",
            MellinLineFunction::from_fn(phi_grid.clone(), |t| Complex64::new((-t * t).exp(), 0.0), true)?,
        ),
        (
            "sech",
            MellinLineFunction::from_fn(phi_grid, |t| Complex64::new(1.0 / t.cosh(), 0.0), true)?,
        ),
    ];
    for (name, phi) in &phis {
        for l in [0.0, 0.5, 1.0] {
            let lam = SpectralParameter::real(l)?;
            let c = solution_candidate(phi, lam, &[1.0], q)?;
            sandwich_check(name, &c, lam, r);
        }
    }
    let sech = solution_candidate(&phis[1].1, SpectralParameter::real(0.0)?, &[0.3, 0.7, 1.0, 2.7], q)?;
    r.at_most("sech, lambda = 0: imaginary residue", sech.imag_residue, cfg.tol(1e-8), 0.0);
    let exp = entry("exp").func;
    let big = mellin_forward_default(&exp, q)?;
    let res = eigen_residual(&exp, &big, 1.0, &EIGEN_X_GRID, q)?;
    r.at_least("exp, lambda = 1: eigen residual (sup)", res.sup, EXP_EIGEN_FLOOR, 0.0);
    r.at_least("exp, lambda = 1: eigen residual (L2)", res.l2, 0.0, 0.0);
    let cand = solution_candidate(&phis[0].1, SpectralParameter::real(1.0)?, &EIGEN_X_GRID, q)?;
    let res = eigen_residual_line(&cand.f_star, 1.0, &EIGEN_X_GRID, q)?;
    r.at_least("gaussian candidate, lambda = 1: eigen residual (sup)", res.sup, CANDIDATE_EIGEN_FLOOR, 0.0);
    r.at_least("gaussian candidate, lambda = 1: eigen residual (L2)", res.l2, 0.0, 0.0);
    let s = stieltjes_apply(&exp, 1.0, &q.clone().with_tol(1e-12))?.value;
    // (2/pi) e E1(1)
    r.equals("Stieltjes of e^-t at x = 1", s, 0.379_646_522_054_199, cfg.tol(1e-10));
    Ok(())
}

/// Fresnel kernel identities against runtime quadrature oracles.
fn special_kernels(cfg: &VerifyConfig, r: &mut VerificationReport) -> Result<()> {
    let c = QuadratureConfig::default().with_tol(1e-13);
    for u in [0.5f64, 2.0, 10.0] {
        // (1/pi) int_0^u cos t / sqrt(u - t) dt with t = u - v^2.
        let oracle = 2.0 / PI * integrate_adaptive(|v: f64| (u - v * v).cos(), 0.0, u.sqrt(), &c)?.value;
        r.at_most(
            format!("Phi({u}) against the Abel integral"),
            (inverse_kernel_phi(u)? - oracle).abs(),
            cfg.tol(1e-8),
            0.0,
        );
    }
    for x in [0.5, 1.0, 5.0] {
        // 2 int_0^inf e^{-xt} sqrt t/(1+t^2) dt with t = v^2 near the origin.
        let near = integrate_adaptive(|v: f64| 4.0 * v * v * (-x * v * v).exp() / (1.0 + v.powi(4)), 0.0, 1.0, &c)?;
        let far = integrate_semi_infinite(|t: f64| 2.0 * (-x * t).exp() * t.sqrt() / (1.0 + t * t), 1.0, &c)?;
        r.at_most(
            format!("k({x}) against the Laplace integral"),
            (kernel_k(x)? - near.value - far.value).abs(),
            cfg.tol(1e-8),
            0.0,
        );
    }
    r.equals("k(0+) = pi sqrt2", kernel_k(1e-12)?, PI * SQRT_2, cfg.tol(1e-5));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
            assert_eq!(serde_json::to_value(s).unwrap(), serde_json::json!(s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn bad_scale_is_rejected() {
        let mut c = VerifyConfig::new(Suite::Norms);
        c.tol_scale = 0.0;
        assert!(run_suite(&c).is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        for s in [Suite::Multiplier, Suite::SpecialKernels, Suite::OperatorIdentity] {
            let r = run_suite(&VerifyConfig::new(s)).unwrap();
            assert!(r.pass, "{}", r.to_json());
            assert_eq!(r.suite, s.name());
        }
    }
}
