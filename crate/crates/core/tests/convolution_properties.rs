use halfhartley::catalog::{lookup, CatalogEntry};
use halfhartley::convolution::{
    convolve, convolve_double_mb, convolve_mellin_line, convolve_mellin_route, convolve_parseval,
    double_mb_grid, factorization_residual, norm_bound_check, pair_convolution_line, pair_grid,
    Route,
};
use halfhartley::function::{geometric_grid, DecayClass, SampledFunction};
use halfhartley::mellin::{mellin_at, MellinLineFunction};
use halfhartley::quadrature::QuadratureConfig;
use halfhartley::special::CriticalPoint;

fn entry(name: &str) -> &'static CatalogEntry {
    lookup(name).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

const PAIRS: [(&str, &str); 4] = [("exp", "exp"), ("exp", "texp"), ("exp", "gauss"), ("texp", "lorentz")];

#[test]
fn routes_agree_pairwise() {
    for (a, b) in PAIRS {
        let (f, g) = (entry(a), entry(b));
        let line = pair_convolution_line(f, g).unwrap();
        let grid = double_mb_grid(f, g);
        let big_f = MellinLineFunction::from_analytic(&f.func, grid.clone()).unwrap();
        let big_g = MellinLineFunction::from_analytic(&g.func, grid).unwrap();
        for x in [0.5, 1.0, 2.0] {
            let p = convolve_parseval(f, g, x, &cfg()).unwrap().value;
            let m = convolve_mellin_route(&line, x, &cfg()).unwrap();
            assert!((p - m).abs() < 1e-4, "{a}*{b} at {x}: parseval {p} mellin {m}");
            if a == "exp" && (b == "exp" || b == "texp") {
                let d = convolve_double_mb(&big_f, &big_g, x, &cfg()).unwrap();
                assert!((p - d).abs() < 2e-3, "{a}*{b} at {x}: parseval {p} double {d}");
            }
        }
    }
}

#[test]
fn convolution_commutes() {
    for (a, b) in PAIRS {
        let (f, g) = (entry(a), entry(b));
        for x in [0.5, 2.0] {
            let fg = convolve_parseval(f, g, x, &cfg()).unwrap().value;
            let gf = convolve_parseval(g, f, x, &cfg()).unwrap().value;
            assert!((fg - gf).abs() <= 1e-6, "{a}*{b} at {x}");
        }
    }
}

#[test]
fn factorization_holds_on_pairs() {
    let x_grid = [0.5, 1.0, 2.0];
    for (a, b) in [("exp", "exp"), ("exp", "gauss"), ("exp", "texp"), ("exp", "zero")] {
        let report = factorization_residual(entry(a), entry(b), &x_grid, &cfg()).unwrap();
        assert!(report.pass, "{a}*{b}: {}", report.to_json());
    }
}

#[test]
fn norm_bound_holds() {
    for (a, b) in [("exp", "exp"), ("exp", "texp"), ("zero", "zero")] {
        let report = norm_bound_check(entry(a), entry(b), &cfg()).unwrap();
        assert!(report.pass, "{a}*{b}: {}", report.to_json());
    }
}

#[test]
fn convolution_of_nonzero_factors_is_nonzero() {
    let e = entry("exp");
    let v = convolve_parseval(e, e, 1.0, &cfg()).unwrap().value;
    assert!(v.abs() > 1e-3);
}

#[test]
fn transform_of_sampled_convolution_matches_line_route() {
    // Mellin transform of the primary route's output against the single
    // contour integral, at s = 1/2 and s = 1/2 + i.
    let e = entry("exp");
    let grid = geometric_grid(1e-3, 1e3, 24 * 6 + 1);
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| convolve_parseval(e, e, x, &cfg()).unwrap().value)
        .collect();
    let conv = SampledFunction::new(grid, values, DecayClass::Polynomial { exponent: 1.5 }).unwrap();
    let big = MellinLineFunction::from_analytic(&e.func, pair_grid(e, e)).unwrap();
    for tau in [0.0, 1.0] {
        let line = convolve_mellin_line(&big, &big, CriticalPoint::new(tau).unwrap(), &cfg()).unwrap();
        // The contour form gives the transform at 1 - s.
        let sampled = mellin_at(&conv, -tau, &cfg().with_tol(1e-8)).unwrap().value;
        assert!((line - sampled).norm() < 1e-4, "tau = {tau}: {line} vs {sampled}");
    }
}

#[test]
fn zero_factor_in_every_route() {
    let (e, z) = (entry("exp"), entry("zero"));
    for route in [Route::Parseval, Route::MellinLine, Route::DoubleMb] {
        let r = convolve(e, z, &[0.5, 1.0], route, &cfg()).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0), "{route:?}");
    }
}
