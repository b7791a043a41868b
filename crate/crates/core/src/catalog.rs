//! Frozen catalog of closed-form test functions. Every closed form listed here
//! is pinned against brute-force quadrature in the tests below.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::function::{AnalyticTestFunction, DecayClass};
use crate::special::gamma;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// A catalog function plus its half-Hartley transform when elementary.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub func: AnalyticTestFunction,
    pub hartley_closed_form: Option<fn(f64) -> f64>,
    /// Present only to exercise degenerate paths (the zero function).
    pub synthetic: bool,
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.func.name
    }
}

fn nan_on_err(r: crate::Result<Complex64>) -> Complex64 {
    r.unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn exp_eval(t: f64) -> f64 {
    (-t).exp()
}
fn exp_mellin(s: Complex64) -> Complex64 {
    nan_on_err(gamma(s))
}
fn exp_hartley(x: f64) -> f64 {
    SQRT_2_OVER_PI * (1.0 + x) / (1.0 + x * x)
}

fn gauss_eval(t: f64) -> f64 {
    (-t * t).exp()
}
fn gauss_mellin(s: Complex64) -> Complex64 {
    nan_on_err(gamma(s * 0.5)) * 0.5
}

fn texp_eval(t: f64) -> f64 {
    t * (-t).exp()
}
fn texp_mellin(s: Complex64) -> Complex64 {
    nan_on_err(gamma(s + 1.0))
}
fn texp_hartley(x: f64) -> f64 {
    let d = 1.0 + x * x;
    SQRT_2_OVER_PI * (1.0 - x * x + 2.0 * x) / (d * d)
}

fn box_eval(t: f64) -> f64 {
    if (0.0..=1.0).contains(&t) {
        1.0
    } else {
        0.0
    }
}
fn box_mellin(s: Complex64) -> Complex64 {
    1.0 / s
}
fn box_hartley(x: f64) -> f64 {
    if x == 0.0 {
        return SQRT_2_OVER_PI;
    }
    SQRT_2_OVER_PI * (x.sin() + 1.0 - x.cos()) / x
}

fn lorentz_eval(t: f64) -> f64 {
    1.0 / (1.0 + t * t)
}
fn lorentz_mellin(s: Complex64) -> Complex64 {
    (PI / 2.0) / (s * (PI / 2.0)).sin()
}

fn zero_eval(_: f64) -> f64 {
    0.0
}
fn zero_mellin(_: Complex64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}
fn zero_hartley(_: f64) -> f64 {
    0.0
}

static CATALOG: [CatalogEntry; 6] = [
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "exp",
            eval: exp_eval,
            mellin_closed_form: exp_mellin,
            l2_norm_sq: Some(0.5),
            decay: DecayClass::Exponential,
        },
        hartley_closed_form: Some(exp_hartley),
        synthetic: false,
    },
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "gauss",
            eval: gauss_eval,
            mellin_closed_form: gauss_mellin,
            // sqrt(pi/8)
            l2_norm_sq: Some(0.626_657_068_657_750_1),
            decay: DecayClass::Gaussian,
        },
        hartley_closed_form: None,
        synthetic: false,
    },
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "texp",
            eval: texp_eval,
            mellin_closed_form: texp_mellin,
            l2_norm_sq: Some(0.25),
            decay: DecayClass::Exponential,
        },
        hartley_closed_form: Some(texp_hartley),
        synthetic: false,
    },
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "box",
            eval: box_eval,
            mellin_closed_form: box_mellin,
            l2_norm_sq: Some(1.0),
            decay: DecayClass::Compact { end: 1.0 },
        },
        hartley_closed_form: Some(box_hartley),
        synthetic: false,
    },
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "lorentz",
            eval: lorentz_eval,
            mellin_closed_form: lorentz_mellin,
            l2_norm_sq: Some(PI / 4.0),
            decay: DecayClass::Polynomial { exponent: 2.0 },
        },
        hartley_closed_form: None,
        synthetic: false,
    },
    CatalogEntry {
        func: AnalyticTestFunction {
            name: "zero",
            eval: zero_eval,
            mellin_closed_form: zero_mellin,
            l2_norm_sq: Some(0.0),
            decay: DecayClass::Compact { end: 0.0 },
        },
        hartley_closed_form: Some(zero_hartley),
        synthetic: true,
    },
];

/// All catalog entries, in a fixed order.
pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

/// Look up an entry by name.
pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name() == name)
}

/// Names accepted by [`lookup`].
pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name()).collect()
}
