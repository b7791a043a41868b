//! Scalar special functions: Fresnel integrals with upper limit `sqrt(x)`,
//! complex log-gamma, the half-Hartley Mellin multiplier and the two kernels
//! that appear in the inversion formula.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|Im s|` accepted by [`log_gamma`].
pub const MAX_IMAG: f64 = 200.0;

/// Argument, in the sqrt-upper-limit normalization, at which Fresnel
/// evaluation switches from the power series to the continued fraction.
/// Equals `pi/2 * 1.5^2`, the standard-normalized argument 1.5.
pub const FRESNEL_SWITCH: f64 = PI / 2.0 * 1.5 * 1.5;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// A point `s = 1/2 + i*tau` on the critical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    tau: f64,
}

impl CriticalPoint {
    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::domain("CriticalPoint", format!("tau = {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(self) -> f64 {
        self.tau
    }

    pub fn s(self) -> Complex64 {
        Complex64::new(0.5, self.tau)
    }

    /// The point `1 - s`, which sits at `-tau`.
    pub fn reflect(self) -> Self {
        Self { tau: -self.tau }
    }
}

/// Fresnel data at one argument in the sqrt-upper-limit normalization.
///
/// `aux_g` is the auxiliary function defined by
/// `(1/2 - C) + i (1/2 - S) = (aux_g + i aux_f) e^{ix}`; it carries the
/// non-oscillatory remainder and is what the inversion kernels need.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fresnel {
    pub s: f64,
    pub c: f64,
    pub aux_g: f64,
}

/// Power series of the standard integrals `int_0^z cos(pi t^2/2)` and
/// `int_0^z sin(pi t^2/2)` written in terms of `x = pi z^2 / 2`.
fn fresnel_series(x: f64) -> (f64, f64) {
    let z = (2.0 * x / PI).sqrt();
    let mut term = 1.0; // x^n / n!
    let mut c = 1.0;
    let mut s = 0.0;
    for n in 1..200usize {
        term *= x / n as f64;
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let contrib = sign * term / (2 * n + 1) as f64;
        if n % 2 == 0 {
            c += contrib;
        } else {
            s += contrib;
        }
        if term < 1e-17 * (c.abs() + s.abs()) {
            break;
        }
    }
    (z * c, z * s)
}

/// Continued fraction (modified Lentz) for `aux_g + i aux_f`, valid for
/// standard argument `z > 1.5`.
fn fresnel_cf(x: f64) -> (f64, f64) {
    let z = (2.0 * x / PI).sqrt();
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, -2.0 * x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0_f64;
    for _ in 0..500 {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    let gf = h * z;
    (gf.im, gf.re)
}

pub(crate) fn fresnel(x: f64) -> Fresnel {
    let (sx, cx) = x.sin_cos();
    if x <= FRESNEL_SWITCH {
        let (c, s) = fresnel_series(x);
        let a = 0.5 - c;
        let b = 0.5 - s;
        Fresnel {
            s,
            c,
            aux_g: a * cx + b * sx,
        }
    } else {
        let (f, g) = fresnel_cf(x);
        let half_minus_c = g * cx - f * sx;
        let half_minus_s = f * cx + g * sx;
        Fresnel {
            s: 0.5 - half_minus_s,
            c: 0.5 - half_minus_c,
            aux_g: g,
        }
    }
}

fn check_nonneg(op: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(op, format!("x = {x}")));
    }
    Ok(())
}

/// `S(x) = sqrt(2/pi) * int_0^{sqrt x} sin(t^2) dt`. Note the upper limit
/// `sqrt x`: this is the standard `S` evaluated at `sqrt(2x/pi)`.
pub fn fresnel_s(x: f64) -> Result<f64> {
    check_nonneg("fresnel_s", x)?;
    Ok(fresnel(x).s)
}

/// `C(x) = sqrt(2/pi) * int_0^{sqrt x} cos(t^2) dt`.
pub fn fresnel_c(x: f64) -> Result<f64> {
    check_nonneg("fresnel_c", x)?;
    Ok(fresnel(x).c)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut series = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + series.ln() + LN_SQRT_2PI
}

/// Principal branch of `log Gamma(s)`.
///
/// Arguments with `Re s < 1/2` are shifted up with `log Gamma(z+1) = log
/// Gamma(z) + log z`, which keeps the branch principal.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("log_gamma", format!("s = {s}")));
    }
    if s.im.abs() > MAX_IMAG {
        return Err(Error::domain(
            "log_gamma",
            format!("|Im s| = {} exceeds {MAX_IMAG}", s.im.abs()),
        ));
    }
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::Pole(s.re));
    }
    if s.re >= 0.5 {
        return Ok(lanczos_ln_gamma(s));
    }
    let shift = (0.5 - s.re).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut z = s;
    for _ in 0..shift {
        acc += z.ln();
        z += 1.0;
    }
    Ok(lanczos_ln_gamma(z) - acc)
}

/// `Gamma(s)` for complex `s`.
pub fn gamma(s: Complex64) -> Result<Complex64> {
    log_gamma(s).map(|l| l.exp())
}

/// `log sin(pi z)` evaluated without overflow for large `|Im z|`. The branch
/// of the imaginary part is unspecified; only `exp` of the result is meant.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i) for Im z > 0 and the
    // mirrored form below the axis.
    if z.im > 0.0 {
        let small = (i * 2.0 * PI * z).exp();
        -i * PI * z + ((small - 1.0) / (2.0 * i)).ln()
    } else {
        let small = (-i * 2.0 * PI * z).exp();
        i * PI * z + ((1.0 - small) / (2.0 * i)).ln()
    }
}

/// `log cosh(y)` for real `y`, overflow free.
pub fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Log of the Mellin multiplier of the half-Hartley transform,
/// `theta(s) = sqrt(2/pi) Gamma(s) [sin(pi s/2) + cos(pi s/2)]`, for any
/// complex `s` where `Gamma` is defined.
pub fn log_theta(s: Complex64) -> Result<Complex64> {
    // sqrt(2/pi) * sqrt(2) = 2/sqrt(pi); sin + cos = sqrt2 sin(pi(s+1/2)/2).
    let lg = log_gamma(s)?;
    Ok(lg + log_sin_pi((s + 0.5) * 0.5) + (2.0 / PI.sqrt()).ln())
}

/// Mellin multiplier `theta(s)` on the critical line: the half-Hartley
/// transform acts as `(H f)*(s) = theta(s) f*(1-s)`.
pub fn theta_multiplier(p: CriticalPoint) -> Result<Complex64> {
    log_theta(p.s()).map(|l| l.exp())
}

/// `theta(s)` for general complex argument.
pub fn theta(s: Complex64) -> Result<Complex64> {
    log_theta(s).map(|l| l.exp())
}

/// `k(x) = pi sqrt2 [sin x + cos x] - 2^{3/2} pi [sin x S(x) + cos x C(x)]`.
///
/// The combination collapses to `2^{3/2} pi` times the auxiliary Fresnel
/// function `g`, which is evaluated directly so that large `x` suffers no
/// cancellation. `k` is completely monotone, `k(0+) = pi sqrt2` and
/// `k(x) ~ x^{-3/2}` at infinity.
pub fn kernel_k(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain("kernel_k", format!("x = {x}")));
    }
    Ok(2.0 * SQRT_2 * PI * fresnel(x).aux_g)
}

/// `Phi(u) = sqrt(2/pi) [sin u S(u) + cos u C(u)]`, the kernel of the
/// inversion formula.
pub fn inverse_kernel_phi(u: f64) -> Result<f64> {
    check_nonneg("inverse_kernel_phi", u)?;
    Ok(phi_unchecked(u))
}

pub(crate) fn phi_unchecked(u: f64) -> f64 {
    let fr = fresnel(u);
    let (su, cu) = u.sin_cos();
    if u <= FRESNEL_SWITCH {
        SQRT_2_OVER_PI * (su * fr.s + cu * fr.c)
    } else {
        SQRT_2_OVER_PI * (0.5 * (su + cu) - fr.aux_g)
    }
}

pub(crate) fn k_unchecked(x: f64) -> f64 {
    2.0 * SQRT_2 * PI * fresnel(x).aux_g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn fresnel_at_zero_is_zero() {
        assert_eq!(fresnel_s(0.0).unwrap(), 0.0);
        assert_eq!(fresnel_c(0.0).unwrap(), 0.0);
    }

    #[test]
    fn fresnel_uses_sqrt_upper_limit() {
        // Brute-force Simpson oracle on int_0^1 sin(t^2), int_0^1 cos(t^2).
        let s_ref = SQRT_2_OVER_PI * simpson(|t| (t * t).sin(), 0.0, 1.0, 20_000);
        let c_ref = SQRT_2_OVER_PI * simpson(|t| (t * t).cos(), 0.0, 1.0, 20_000);
        assert!((fresnel_s(1.0).unwrap() - s_ref).abs() < 1e-12);
        assert!((fresnel_c(1.0).unwrap() - c_ref).abs() < 1e-12);
        // Frozen mpmath values with the sqrt(x) convention.
        assert!((fresnel_s(1.0).unwrap() - 0.247_558_287_651_610_84).abs() < 1e-14);
        assert!((fresnel_c(1.0).unwrap() - 0.721_705_924_292_605_1).abs() < 1e-14);
        // Distinguish from the convention with upper limit x: at x = 4 the
        // two differ by a lot.
        let s4 = SQRT_2_OVER_PI * simpson(|t| (t * t).sin(), 0.0, 2.0, 40_000);
        assert!((fresnel_s(4.0).unwrap() - s4).abs() < 1e-12);
    }

    #[test]
    fn fresnel_limits_one_half() {
        for x in [1e6, 3.7e7] {
            let s = fresnel_s(x).unwrap();
            let c = fresnel_c(x).unwrap();
            assert!((0.499..=0.501).contains(&s), "S({x}) = {s}");
            assert!((0.499..=0.501).contains(&c), "C({x}) = {c}");
        }
    }

    #[test]
    fn fresnel_branches_agree_at_seam() {
        for dx in [-1e-9, 0.0, 1e-9] {
            let x = FRESNEL_SWITCH + dx;
            let (c1, s1) = fresnel_series(x);
            let (f, g) = fresnel_cf(x);
            let (sx, cx) = x.sin_cos();
            let c2 = 0.5 - (g * cx - f * sx);
            let s2 = 0.5 - (f * cx + g * sx);
            assert!((c1 - c2).abs() < 1e-13, "C seam {c1} {c2}");
            assert!((s1 - s2).abs() < 1e-13, "S seam {s1} {s2}");
        }
    }

    #[test]
    fn fresnel_rejects_bad_arguments() {
        assert!(fresnel_s(-1.0).is_err());
        assert!(fresnel_c(f64::NAN).is_err());
        assert!(fresnel_c(f64::INFINITY).is_err());
    }

    #[test]
    fn fresnel_range_and_oscillation_decay() {
        let mut x = 0.0;
        while x <= 100.0 {
            let s = fresnel_s(x).unwrap();
            let c = fresnel_c(x).unwrap();
            assert!((-0.1..=1.0).contains(&s) && (-0.1..=1.0).contains(&c));
            if x >= 4.0 {
                assert!((s - 0.5).abs() <= 1.0 / x.sqrt());
                assert!((c - 0.5).abs() <= 1.0 / x.sqrt());
            }
            x += 0.037;
        }
    }

    #[test]
    fn log_gamma_basic_values() {
        let half = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((half.re - PI.sqrt().ln()).abs() < 1e-14 && half.im.abs() < 1e-15);
        let one = log_gamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!(one.norm() < 1e-14);
        let five = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((five.re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_poles_and_domain() {
        assert_eq!(log_gamma(Complex64::new(0.0, 0.0)), Err(Error::Pole(0.0)));
        assert_eq!(log_gamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(-3.0)));
        assert!(log_gamma(Complex64::new(0.5, 250.0)).is_err());
        assert!(log_gamma(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn gamma_modulus_on_critical_line() {
        for tau in [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0] {
            let g = gamma(Complex64::new(0.5, tau)).unwrap();
            let expected = PI / (PI * tau).cosh();
            assert!(
                (g.norm_sqr() - expected).abs() <= 1e-10 * expected,
                "tau = {tau}"
            );
        }
    }

    #[test]
    fn log_gamma_recurrence_and_reflection() {
        for &(re, im) in &[(0.25, 3.0), (0.1, -7.5), (-1.3, 2.0), (0.75, 150.0)] {
            let z = Complex64::new(re, im);
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            assert!(((lhs - rhs).exp() - 1.0).norm() < 1e-12, "z = {z}");
            // Gamma(z) Gamma(1-z) = pi / sin(pi z)
            let prod = log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap() + log_sin_pi(z);
            assert!(((prod - PI.ln()).exp() - 1.0).norm() < 1e-11, "z = {z}");
        }
    }

    #[test]
    fn log_gamma_principal_branch_is_continuous() {
        // The imaginary part must vary continuously along a vertical line.
        let mut prev = log_gamma(Complex64::new(0.3, 0.0)).unwrap();
        let mut tau = 0.0;
        while tau < 199.0 {
            tau += 0.25;
            let cur = log_gamma(Complex64::new(0.3, tau)).unwrap();
            assert!((cur.im - prev.im).abs() < 2.0, "jump at tau = {tau}");
            prev = cur;
        }
        // Stirling: Im log Gamma(1/2 + i t) ~ t ln t - t for large t.
        let t: f64 = 150.0;
        let lg = log_gamma(Complex64::new(0.5, t)).unwrap();
        assert!((lg.im - (t * t.ln() - t)).abs() < 1e-2);
    }

    #[test]
    fn theta_values() {
        let t0 = theta_multiplier(CriticalPoint::new(0.0).unwrap()).unwrap();
        assert!((t0 - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let t2 = theta_multiplier(CriticalPoint::new(2.0).unwrap()).unwrap();
        let expected = 2.0 * (PI).cosh() / (2.0 * PI).cosh().sqrt();
        assert!((t2.norm() - expected).abs() < 1e-10);
        let t50 = theta_multiplier(CriticalPoint::new(50.0).unwrap()).unwrap();
        assert!(t50.norm() >= SQRT_2 - 1e-14 && t50.norm() <= SQRT_2 + 1e-6);
    }

    #[test]
    fn theta_band_and_reflection_product() {
        for i in 0..1001 {
            let tau = -20.0 + 40.0 * i as f64 / 1000.0;
            let p = CriticalPoint::new(tau).unwrap();
            let t = theta_multiplier(p).unwrap();
            let tr = theta_multiplier(p.reflect()).unwrap();
            assert!(t.norm() >= SQRT_2 - 1e-10 && t.norm() <= 2.0 + 1e-10);
            let target = 2.0 + 2.0 / (PI * tau).cosh();
            assert!((t * tr - target).norm() <= 1e-9, "tau = {tau}");
        }
    }

    #[test]
    fn kernel_k_closed_form_matches_fresnel_expression() {
        // Direct printed form against the auxiliary-function evaluation.
        let mut x = 0.013;
        for _ in 0..50 {
            let (sx, cx) = f64::sin_cos(x);
            let printed = PI * SQRT_2 * (sx + cx)
                - 2.0 * SQRT_2 * PI * (sx * fresnel_s(x).unwrap() + cx * fresnel_c(x).unwrap());
            assert!((kernel_k(x).unwrap() - printed).abs() <= 1e-10, "x = {x}");
            x = (x * 1.31 + 0.7) % 50.0 + 1e-3;
        }
    }

    #[test]
    fn kernel_k_limits() {
        // k(0+) = 2 int_0^inf sqrt(t)/(1+t^2) dt = pi sqrt2, finite.
        let k_small = kernel_k(1e-4).unwrap();
        assert!((k_small - 4.372_429_050_389_868).abs() < 1e-10);
        assert!(k_small < PI * SQRT_2);
        let k100 = kernel_k(100.0).unwrap();
        assert!(k100 > 0.0 && k100 < 0.05);
        assert!((k100 - 1.771_790_223_848_09e-3).abs() < 1e-12);
        assert!(kernel_k(0.0).is_err());
        assert!(kernel_k(-1.0).is_err());
    }

    #[test]
    fn phi_values() {
        assert_eq!(inverse_kernel_phi(0.0).unwrap(), 0.0);
        assert!(inverse_kernel_phi(-0.1).is_err());
        // Frozen from (1/pi) int_0^u cos t / sqrt(u - t) dt at 30 digits.
        assert!((inverse_kernel_phi(0.5).unwrap() - 0.420_620_653_902_927_84).abs() < 1e-13);
        assert!((inverse_kernel_phi(2.0).unwrap() - 0.158_230_610_912_120_73).abs() < 1e-13);
        assert!((inverse_kernel_phi(10.0).unwrap() + 0.556_641_117_145_786_2).abs() < 1e-13);
        let mut sup = 0.0_f64;
        let mut u = 0.0;
        while u <= 1000.0 {
            sup = sup.max(inverse_kernel_phi(u).unwrap().abs());
            u += 0.01;
        }
        assert!(sup <= 1.0, "sup |Phi| = {sup}");
    }

    #[test]
    fn phi_branches_agree_at_seam() {
        let x = FRESNEL_SWITCH * (1.0 + 1e-12);
        let fr = fresnel(x);
        let (sx, cx) = x.sin_cos();
        let a = SQRT_2_OVER_PI * (sx * fr.s + cx * fr.c);
        let b = SQRT_2_OVER_PI * (0.5 * (sx + cx) - fr.aux_g);
        assert!((a - b).abs() < 1e-13);
    }
}
