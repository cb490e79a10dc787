//! Reference quadrature and random-state helpers shared by the unit tests.
//!
//! Deliberately independent of the library's adaptive Gauss-Kronrod code.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Fixed-rule integration over `panels` equal sub-intervals.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    rule: &[(f64, f64)],
    a: f64,
    b: f64,
    panels: usize,
    f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in rule {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Haar-ish random pure state vector.
pub fn random_ket<R: Rng>(rng: &mut R) -> [Complex64; 4] {
    let mut v = [Complex64::new(0.0, 0.0); 4];
    let mut norm = 0.0;
    for z in v.iter_mut() {
        *z = c(gauss(rng), gauss(rng));
        norm += z.norm_sqr();
    }
    let norm = norm.sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

pub fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn projector(v: &[Complex64; 4]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| v[i] * v[j].conj())
}

/// Random mixed state: Ginibre construction G G† / tr.
pub fn random_density<R: Rng>(rng: &mut R) -> Matrix4<Complex64> {
    let g = Matrix4::from_fn(|_, _| c(gauss(rng), gauss(rng)));
    let m = g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Random 2×2 unitary.
pub fn random_unitary2<R: Rng>(rng: &mut R) -> nalgebra::Matrix2<Complex64> {
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    let b = rng.random::<f64>() * std::f64::consts::TAU;
    let d = rng.random::<f64>() * std::f64::consts::TAU;
    let th = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let e = |x: f64| Complex64::from_polar(1.0, x);
    nalgebra::Matrix2::new(
        e(a) * th.cos(),
        e(b) * th.sin(),
        -e(d - b) * th.sin(),
        e(d - a) * th.cos(),
    )
}

pub fn kron2(
    a: &nalgebra::Matrix2<Complex64>,
    b: &nalgebra::Matrix2<Complex64>,
) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}
