//! Special functions used by the closed-form rate and coupling formulas.
//!
//! Only four functions live here: the sine and cosine integrals, the Bessel
//! function `J0`, and the Bose-Einstein occupation. Si and Ci use their power
//! series below [`SERIES_LIMIT`] and the continued fraction of `E1(ix)` above
//! it; `J0` is delegated to `libm`.

use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switchover between power series and continued fraction for Si/Ci.
const SERIES_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("{function}: argument {value} outside the domain")]
    Domain { function: &'static str, value: f64 },
    #[error("{function}: divergent at argument {value}")]
    Divergent { function: &'static str, value: f64 },
}

/// Sine integral `Si(x) = ∫₀ˣ sin(τ)/τ dτ`.
pub fn sin_integral(x: f64) -> Result<f64, SpecialFunctionError> {
    if !x.is_finite() {
        return Err(SpecialFunctionError::Domain { function: "sin_integral", value: x });
    }
    Ok(si(x))
}

/// Cosine integral `Ci(x) = -∫ₓ^∞ cos(τ)/τ dτ` for `x > 0`.
pub fn cos_integral(x: f64) -> Result<f64, SpecialFunctionError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialFunctionError::Domain { function: "cos_integral", value: x });
    }
    Ok(ci(x))
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> Result<f64, SpecialFunctionError> {
    if !x.is_finite() {
        return Err(SpecialFunctionError::Domain { function: "bessel_j0", value: x });
    }
    Ok(libm::j0(x))
}

/// Bose-Einstein occupation `1/(e^{βω} - 1)` with ħ = 1.
pub fn bose_einstein(omega: f64, beta: f64) -> Result<f64, SpecialFunctionError> {
    let x = beta * omega;
    if x.is_nan() {
        return Err(SpecialFunctionError::Domain { function: "bose_einstein", value: x });
    }
    if x == 0.0 {
        return Err(SpecialFunctionError::Divergent { function: "bose_einstein", value: x });
    }
    Ok(1.0 / libm::expm1(x))
}

pub(crate) fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        si_series(x)
    } else {
        let (_, s) = cisi_continued_fraction(x);
        s
    }
}

pub(crate) fn ci(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= SERIES_LIMIT {
        EULER_GAMMA + libm::log(x) - cin_series(x)
    } else {
        let (c, _) = cisi_continued_fraction(x);
        c
    }
}

/// Entire cosine integral `Cin(x) = ∫₀ˣ (1 - cos τ)/τ dτ = γ + ln x - Ci(x)`.
///
/// Evaluated without cancellation for small arguments.
pub(crate) fn cin(x: f64) -> f64 {
    let x = libm::fabs(x);
    if x == 0.0 {
        0.0
    } else if x <= SERIES_LIMIT {
        cin_series(x)
    } else {
        EULER_GAMMA + libm::log(x) - ci(x)
    }
}

fn si_series(x: f64) -> f64 {
    // Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let x2 = x * x;
    let mut term = x; // x^{2k+1}/(2k+1)!
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        let n = f64::from(2 * k);
        term *= -x2 / (n * (n + 1.0));
        let add = term / (n + 1.0);
        sum += add;
        if libm::fabs(add) <= f64::EPSILON * 1e-2 * libm::fabs(sum) || k > 200 {
            break;
        }
    }
    sum
}

fn cin_series(x: f64) -> f64 {
    // -Σ_{k≥1} (-x²)^k / (2k (2k)!)
    let x2 = x * x;
    let mut term = 1.0; // (-x²)^k/(2k)!
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        k += 1;
        let n = f64::from(2 * k);
        term *= -x2 / ((n - 1.0) * n);
        let add = term / n;
        sum -= add;
        if libm::fabs(add) <= f64::EPSILON * 1e-2 * libm::fabs(sum) || k > 200 {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of `E1(ix)`; returns `(Ci(x), Si(x))` for `x > 0`.
fn cisi_continued_fraction(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..10_000u32 {
        let a = -f64::from((i - 1) * (i - 1));
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - Complex64::new(1.0, 0.0)).norm_sqr() < 1e-34 {
            break;
        }
    }
    h *= Complex64::new(libm::cos(x), -libm::sin(x));
    (-h.re, FRAC_PI_2 + h.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gauss_legendre, integrate_panels};
    use core::f64::consts::PI;

    /// Independent Si oracle: Gauss-Legendre panels of width ≤ π/2.
    fn si_oracle(x: f64) -> f64 {
        let rule = gauss_legendre(24);
        let panels = ((x / (PI / 2.0)).ceil() as usize).max(1);
        integrate_panels(&rule, 0.0, x, panels, |t| if t == 0.0 { 1.0 } else { t.sin() / t })
    }

    /// Independent Ci oracle: γ + ln x - ∫₀ˣ (1 - cos t)/t dt by quadrature.
    fn ci_oracle(x: f64) -> f64 {
        let rule = gauss_legendre(24);
        let panels = ((x / (PI / 2.0)).ceil() as usize).max(1);
        let cin = integrate_panels(&rule, 0.0, x, panels, |t| {
            if t < 1e-4 {
                t / 2.0 - t * t * t / 24.0
            } else {
                (1.0 - t.cos()) / t
            }
        });
        EULER_GAMMA + x.ln() - cin
    }

    #[test]
    fn si_basic_values() {
        assert_eq!(sin_integral(0.0).unwrap(), 0.0);
        assert!((sin_integral(1e4).unwrap() - FRAC_PI_2).abs() < 1e-3);
        // Si(1) = 0.946083070367183...
        assert!((sin_integral(1.0).unwrap() - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((si_oracle(1.0) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!(sin_integral(f64::NAN).is_err());
        assert!(sin_integral(f64::INFINITY).is_err());
    }

    #[test]
    fn si_is_odd() {
        for &x in &[0.3, 2.0, 3.99, 4.01, 17.0, 250.0, 9999.0] {
            assert_eq!(si(-x), -si(x));
        }
    }

    #[test]
    fn ci_basic_values() {
        // Ci(1) = 0.337403922900968...
        assert!((cos_integral(1.0).unwrap() - 0.337_403_922_900_968_1).abs() < 1e-14);
        assert!((ci_oracle(1.0) - 0.337_403_922_900_968_1).abs() < 1e-13);
        assert!(cos_integral(1e4).unwrap().abs() < 1e-3);
        let x = 1e-6;
        assert!((cos_integral(x).unwrap() - (EULER_GAMMA + x.ln())).abs() < 1e-10);
        assert!(cos_integral(0.0).is_err());
        assert!(cos_integral(-1.0).is_err());
    }

    #[test]
    fn si_ci_match_quadrature_on_log_grid() {
        for i in 0..100 {
            let x = 10f64.powf(-3.0 + 6.0 * f64::from(i) / 99.0);
            let (s, c) = (si(x), ci(x));
            let (so, co) = (si_oracle(x), ci_oracle(x));
            assert!((s - so).abs() <= 1e-10 * so.abs().max(1e-3), "Si({x}): {s} vs {so}");
            assert!((c - co).abs() <= 1e-10 * co.abs().max(1.0), "Ci({x}): {c} vs {co}");
        }
    }

    #[test]
    fn series_and_continued_fraction_agree_at_switchover() {
        for &x in &[2.5, 3.0, 4.0, 5.0] {
            let (c, s) = cisi_continued_fraction(x);
            assert!((s - si_series(x)).abs() < 1e-13);
            assert!((c - (EULER_GAMMA + x.ln() - cin_series(x))).abs() < 1e-13);
        }
    }

    #[test]
    fn cin_is_consistent() {
        for &x in &[1e-5, 0.1, 1.0, 3.9, 4.1, 50.0, 1e3] {
            assert!((cin(x) - (EULER_GAMMA + x.ln() - ci(x))).abs() < 1e-12 * x.ln().abs().max(1.0));
        }
        assert_eq!(cin(0.0), 0.0);
    }

    fn j0_series(x: f64) -> f64 {
        let q = -x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= q / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(f64::NAN).is_err());
        // Root of the series oracle near 2.4048 by bisection.
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0_series(lo) * j0_series(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j0(2.404_826).unwrap().abs() < 1e-6);
        assert!(bessel_j0(lo).unwrap().abs() < 1e-9);
        for i in 0..400 {
            let x = -50.0 + 0.25 * i as f64;
            let v = bessel_j0(x).unwrap();
            assert!(v.abs() <= 1.0);
            assert_eq!(v, bessel_j0(-x).unwrap());
            if x.abs() < 12.0 {
                assert!((v - j0_series(x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn j0_satisfies_bessel_equation() {
        let h = 1e-3;
        let mut x = 0.1;
        while x <= 50.0 {
            let f = |y: f64| bessel_j0(y).unwrap();
            // fourth-order central differences
            let d1 = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
            let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                - f(x - 2.0 * h))
                / (12.0 * h * h);
            let residual = x * d2 + d1 + x * f(x);
            assert!(residual.abs() < 1e-8, "residual {residual} at {x}");
            x += 0.37;
        }
    }

    #[test]
    fn bose_einstein_values() {
        assert!((bose_einstein(2f64.ln(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bose_einstein(1.0, 1e6).unwrap() < 1e-300);
        assert!(matches!(bose_einstein(1.0, 0.0), Err(SpecialFunctionError::Divergent { .. })));
        // 1/(e - 1) = 0.58197670686932642...
        assert!((bose_einstein(1.0, 1.0).unwrap() - 0.581_976_706_869_326_4).abs() < 1e-15);
    }

    #[test]
    fn bose_einstein_coth_identity() {
        for i in 1..200 {
            let x = -10.0 + 0.1 * i as f64 + 0.013;
            let lhs = 1.0 + 2.0 * bose_einstein(x, 1.0).unwrap();
            let coth = 1.0 / (x / 2.0).tanh();
            assert!((lhs - coth).abs() <= 1e-12 * coth.abs(), "x = {x}");
        }
    }
}
