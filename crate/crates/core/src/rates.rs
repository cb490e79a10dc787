//! Time-dependent rates and coherent couplings of the TCL generators.
//!
//! Everything here is expressed through the two filter functions
//! `F_c(ω,t) = (cos ωt − 1)/ω` and `F_s(ω,t) = sin ωt/ω`. The 1/f spectrum
//! admits closed forms for every coefficient; [`generic_rate`] evaluates the
//! defining frequency integrals directly for any other spectrum.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::sync::atomic::{AtomicBool, Ordering};

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::noise::{self, CorrelationGeometry, NoiseError, SpectrumModel};
use crate::quad;
use crate::specfun::{ci, cin, si, EULER_GAMMA};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("quadrature did not converge at t = {t}: estimate {value}, error {error} after {evaluations} evaluations")]
    Quadrature { t: f64, value: Complex64, error: f64, evaluations: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("invalid argument: {0}")]
    Invalid(&'static str),
}

/// Rates and couplings entering a generator at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub time: f64,
    /// Ising coupling 𝒥ᶻ.
    pub ising: f64,
    /// Transverse coupling 𝒥 = 𝒥_s + i𝒟.
    pub exchange: Complex64,
    pub gamma_z: Matrix2<Complex64>,
    pub gamma_down: Matrix2<Complex64>,
    pub gamma_up: Matrix2<Complex64>,
}

impl CoefficientSet {
    pub fn zero(time: f64) -> Self {
        Self {
            time,
            ising: 0.0,
            exchange: ZERO,
            gamma_z: Matrix2::zeros(),
            gamma_down: Matrix2::zeros(),
            gamma_up: Matrix2::zeros(),
        }
    }

    /// Largest deviation from Hermiticity among the three rate matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        [self.gamma_z, self.gamma_down, self.gamma_up]
            .iter()
            .map(|m| (m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm())))
            .fold(0.0, f64::max)
    }

    /// Largest magnitude among all rates.
    pub fn max_rate(&self) -> f64 {
        [self.gamma_z, self.gamma_down, self.gamma_up]
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    /// Largest coherent coupling magnitude.
    pub fn max_coupling(&self) -> f64 {
        libm::fabs(self.ising).max(self.exchange.norm())
    }

    /// Entry-wise linear interpolation `(1-u)·a + u·b`.
    pub fn lerp(a: &Self, b: &Self, u: f64) -> Self {
        let w = 1.0 - u;
        Self {
            time: w * a.time + u * b.time,
            ising: w * a.ising + u * b.ising,
            exchange: a.exchange * w + b.exchange * u,
            gamma_z: a.gamma_z * Complex64::from(w) + b.gamma_z * Complex64::from(u),
            gamma_down: a.gamma_down * Complex64::from(w) + b.gamma_down * Complex64::from(u),
            gamma_up: a.gamma_up * Complex64::from(w) + b.gamma_up * Complex64::from(u),
        }
    }
}

/// Hermitian 2×2 rate matrix with equal diagonal `local` and off-diagonal `correlated`.
pub fn rate_matrix(local: f64, correlated: Complex64) -> Matrix2<Complex64> {
    Matrix2::new(Complex64::from(local), correlated, correlated.conj(), Complex64::from(local))
}

pub fn filter_fc(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    let s = libm::sin(0.5 * omega * t);
    -2.0 * s * s / omega
}

pub fn filter_fs(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        return t;
    }
    libm::sin(omega * t) / omega
}

static CUTOFF_WARNED: AtomicBool = AtomicBool::new(false);

fn warn_cutoff(t: f64, omega_low: f64) {
    if omega_low * t > 1.0 && !CUTOFF_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!(
            "ω_l·t = {:.3} exceeds 1; the 1/f closed forms assume times short against 1/ω_l",
            omega_low * t
        );
    }
}

/// 𝒥ᶻ(t) = −2πσ̃² cos θ · t.
pub fn ising_coupling_1f(t: f64, sigma: f64, theta: f64) -> f64 {
    -2.0 * PI * sigma * sigma * libm::cos(theta) * t
}

/// V(t) = ∫₀ᵗ 𝒥ᶻ = −πσ̃² t² cos θ.
pub fn ising_phase_1f(t: f64, sigma: f64, theta: f64) -> f64 {
    -PI * sigma * sigma * t * t * libm::cos(theta)
}

/// γᶻ(t) = 4σ̃² t [1 − Ci(ω_l t)].
pub fn dephasing_rate_1f(t: f64, sigma: f64, omega_low: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    warn_cutoff(t, omega_low);
    4.0 * sigma * sigma * t * (1.0 - ci(omega_low * t))
}

/// Γᶻ(t) = ∫₀ᵗ γᶻ, exact.
pub fn dephasing_integral_1f(t: f64, sigma: f64, omega_low: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let u = omega_low * t;
    let h = libm::sin(0.5 * u) / u;
    4.0 * sigma * sigma * t * t * (0.5 - 0.5 * ci(u) + 0.5 * libm::sin(u) / u - h * h)
}

/// Small-ω_l t form Γᶻ ≈ σ̃²t²[3 − 2γ_E − 2 ln(ω_l t)].
pub fn dephasing_integral_1f_approx(t: f64, sigma: f64, omega_low: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    sigma * sigma * t * t * (3.0 - 2.0 * EULER_GAMMA - 2.0 * libm::log(omega_low * t))
}

/// Classical 1/f decay rate γ(t) = (4σ̃²/Ω)[Si(Ωt) − sin(Ωt) Ci(ω_l t)].
pub fn classical_rate_1f(t: f64, sigma: f64, omega_low: f64, omega: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    4.0 * sigma * sigma / omega * (si(omega * t) - libm::sin(omega * t) * ci(omega_low * t))
}

// ∫₀ᵗ [Si(Ωs) − sin(Ωs) Ci(ω_l s)] ds
fn classical_kernel_integral(t: f64, omega_low: f64, omega: f64) -> f64 {
    let x = omega * t;
    let one_minus_cos = 2.0 * libm::sin(0.5 * x) * libm::sin(0.5 * x);
    let a = t * si(x) - one_minus_cos / omega;
    let b = one_minus_cos * ci(omega_low * t) / omega
        - (0.5 * cin((omega + omega_low) * t) + 0.5 * cin((omega - omega_low) * t)
            - cin(omega_low * t))
            / omega;
    a - b
}

/// Γ(t) = ∫₀ᵗ γ for the classical 1/f rate.
pub fn classical_integral_1f(t: f64, sigma: f64, omega_low: f64, omega: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    4.0 * sigma * sigma / omega * classical_kernel_integral(t, omega_low, omega)
}

/// γ↓(t) = (4σ̃²/Ω)[π(1 − cos Ωt)/2 − sin Ωt Ci(ω_l t) + Si(Ωt)].
pub fn quantum_decay_rate_1f(t: f64, sigma: f64, omega_low: f64, omega: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = omega * t;
    let one_minus_cos = 2.0 * libm::sin(0.5 * x) * libm::sin(0.5 * x);
    4.0 * sigma * sigma / omega
        * (FRAC_PI_2 * one_minus_cos - libm::sin(x) * ci(omega_low * t) + si(x))
}

/// Γ↓(t) = ∫₀ᵗ γ↓.
pub fn quantum_decay_integral_1f(t: f64, sigma: f64, omega_low: f64, omega: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = omega * t;
    4.0 * sigma * sigma / omega
        * (FRAC_PI_2 * (t - libm::sin(x) / omega) + classical_kernel_integral(t, omega_low, omega))
}

/// 𝒥(t) = −2πσ̃² sin(Ωt)/Ω.
pub fn transverse_coupling_1f(t: f64, sigma: f64, omega: f64) -> f64 {
    -2.0 * PI * sigma * sigma * libm::sin(omega * t) / omega
}

/// Φ(t) = ∫₀ᵗ 𝒥 = 2πσ̃²(cos Ωt − 1)/Ω².
pub fn transverse_phase_1f(t: f64, sigma: f64, omega: f64) -> f64 {
    let s = libm::sin(0.5 * omega * t);
    -4.0 * PI * sigma * sigma * s * s / (omega * omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Fc,
    Fs,
}

impl Filter {
    pub fn eval(self, omega: f64, t: f64) -> f64 {
        match self {
            Filter::Fc => filter_fc(omega, t),
            Filter::Fs => filter_fs(omega, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Overrides the default upper cutoff `max(10⁴/t, 100·|shift|)`.
    pub omega_hi: Option<f64>,
    pub max_segments: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-14, omega_hi: None, max_segments: 200_000 }
    }
}

/// Default upper frequency cutoff for the filter integrals.
pub fn default_cutoff(t: f64, shift: f64) -> f64 {
    (1e4 / t).max(100.0 * libm::fabs(shift))
}

/// `∫_{lo}^{ω_hi} (dω/2π) S(ω) F(ω − shift, t)` by adaptive quadrature.
///
/// `lo` is the lower edge of the spectrum's support. Both filters are entire
/// in ω, so no singular points arise for finite `t`; the breakpoints only
/// resolve the oscillation scale `π/t` near `lo` and near `shift`.
pub fn generic_rate<S: FnMut(f64) -> Complex64>(
    mut spectrum: S,
    filter: Filter,
    shift: f64,
    t: f64,
    lo: f64,
    opts: &QuadratureOptions,
) -> Result<Complex64, RateError> {
    if t < 0.0 || !t.is_finite() {
        return Err(RateError::Invalid("time must be finite and non-negative"));
    }
    if t == 0.0 {
        return Ok(ZERO);
    }
    let hi = opts.omega_hi.unwrap_or_else(|| default_cutoff(t, shift));
    let lo = lo.max(0.0);
    if hi <= lo {
        return Ok(ZERO);
    }
    let breaks = filter_breakpoints(lo, hi, shift, t);
    let r = quad::integrate(
        |w| spectrum(w) * (filter.eval(w - shift, t) / (2.0 * PI)),
        &breaks,
        opts.rel_tol,
        opts.abs_tol,
        opts.max_segments,
    );
    if !r.converged {
        return Err(RateError::Quadrature {
            t,
            value: r.value,
            error: r.error,
            evaluations: r.evaluations,
        });
    }
    Ok(r.value)
}

fn filter_breakpoints(lo: f64, hi: f64, shift: f64, t: f64) -> Vec<f64> {
    let step = PI / t;
    let mut pts = Vec::new();
    for centre in [lo, shift] {
        for k in -64i32..=64 {
            pts.push(centre + f64::from(k) * step);
        }
    }
    // geometric panels carry the smooth decay of spectrum and filter
    let mut x = lo.max(step * 1e-3).max(1e-12);
    while x < hi {
        pts.push(x);
        x *= 1.25;
    }
    quad::breakpoints(lo, hi, &pts)
}

/// Principal value `PV ∫_{lo}^{hi} g(ω)/(ω − pole) dω` by symmetric exclusion
/// of `[pole − ε, pole + ε]` and Richardson extrapolation in ε.
pub fn principal_value<G: FnMut(f64) -> f64>(
    mut g: G,
    pole: f64,
    lo: f64,
    hi: f64,
    opts: &QuadratureOptions,
) -> Result<f64, RateError> {
    if !(lo < pole && pole < hi) {
        let r = quad::integrate(
            |w| Complex64::from(g(w) / (w - pole)),
            &geometric_breaks(lo, hi, pole),
            opts.rel_tol,
            opts.abs_tol,
            opts.max_segments,
        );
        return Ok(r.value.re);
    }
    let eps0 = 0.25 * (pole - lo).min(hi - pole);
    let mut excluded = |eps: f64| -> Result<f64, RateError> {
        let mut pts = geometric_breaks(lo, pole - eps, pole);
        pts.extend(geometric_breaks(pole + eps, hi, pole));
        let mut total = 0.0;
        for seg in [(lo, pole - eps), (pole + eps, hi)] {
            let br: Vec<f64> = pts.iter().copied().filter(|&x| x >= seg.0 && x <= seg.1).collect();
            let r = quad::integrate(
                |w| Complex64::from(g(w) / (w - pole)),
                &br,
                opts.rel_tol * 1e-2,
                opts.abs_tol,
                opts.max_segments,
            );
            if !r.converged {
                return Err(RateError::Quadrature {
                    t: f64::INFINITY,
                    value: r.value,
                    error: r.error,
                    evaluations: r.evaluations,
                });
            }
            total += r.value.re;
        }
        Ok(total)
    };
    // I(ε) = I₀ − 2g'(p)ε − (2/3)g'''(p)ε³ + …
    let i1 = excluded(eps0)?;
    let i2 = excluded(0.5 * eps0)?;
    let i3 = excluded(0.25 * eps0)?;
    let r1 = 2.0 * i2 - i1;
    let r2 = 2.0 * i3 - i2;
    Ok((8.0 * r2 - r1) / 7.0)
}

fn geometric_breaks(lo: f64, hi: f64, pole: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    let mut d = 1e-9 * pole.abs().max(1.0);
    while d < (hi - lo).abs() {
        pts.push(pole - d);
        pts.push(pole + d);
        d *= 1.5;
    }
    let mut x = lo.max(1e-12);
    while x < hi {
        pts.push(x);
        x *= 1.25;
    }
    quad::breakpoints(lo, hi, &pts)
}

/// Markovian rates for one ordered pair from the spectra at Ω.
///
/// Returns `(γ↓_ij, γ↑_ji)` from `S^C_ij(Ω)` and `S^Q_ij(Ω)`.
pub fn markovian_rates(s_c: Complex64, s_q: Complex64) -> (Complex64, Complex64) {
    (s_c + s_q, s_c - s_q)
}

/// Result of a composite quadrature with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// `∫₀ᵗ f` by composite Simpson on `n_points` and `2·n_points` panels,
/// Richardson-combined.
pub fn integrated<F: FnMut(f64) -> f64>(mut f: F, t: f64, n_points: usize) -> Integral {
    if t == 0.0 {
        return Integral { value: 0.0, error: 0.0 };
    }
    let n = n_points.max(2).next_multiple_of(2);
    let simpson = |f: &mut F, n: usize| {
        let h = t / n as f64;
        let mut s = f(0.0) + f(t);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        s * h / 3.0
    };
    let coarse = simpson(&mut f, n);
    let fine = simpson(&mut f, 2 * n);
    Integral { value: fine + (fine - coarse) / 15.0, error: libm::fabs(fine - coarse) / 15.0 }
}

/// Source of generator coefficients as a function of time.
pub trait CoefficientSource: Send + Sync {
    fn coefficients(&self, t: f64) -> CoefficientSet;

    /// Long-time (Markovian) limit, when it exists.
    fn asymptotic(&self) -> Option<CoefficientSet> {
        None
    }

    /// Fastest angular frequency present in the coefficients' time dependence.
    fn bandwidth(&self) -> f64 {
        0.0
    }
}

/// Time-independent coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub CoefficientSet);

impl CoefficientSource for Constant {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        CoefficientSet { time: t, ..self.0 }
    }

    fn asymptotic(&self) -> Option<CoefficientSet> {
        Some(self.0)
    }
}

impl Constant {
    /// Transverse Markovian coefficients with complex correlated rates.
    pub fn transverse(
        gamma_down: f64,
        gamma_down_12: Complex64,
        gamma_up: f64,
        gamma_up_12: Complex64,
        exchange: Complex64,
    ) -> Self {
        Constant(CoefficientSet {
            exchange,
            gamma_down: rate_matrix(gamma_down, gamma_down_12),
            gamma_up: rate_matrix(gamma_up, gamma_up_12),
            ..CoefficientSet::zero(0.0)
        })
    }

    /// Zero-temperature transverse coefficients with 𝒥 = 𝒥_s + i𝒟.
    pub fn quantum_transverse(gamma_down: f64, gamma_12: f64, js: f64, dm: f64) -> Self {
        Self::transverse(gamma_down, gamma_12.into(), 0.0, ZERO, Complex64::new(js, dm))
    }

    /// Thermal transverse coefficients obeying detailed balance at `βΩ`.
    pub fn thermal_transverse(gamma_down: f64, gamma_12: f64, beta_omega: f64, js: f64, dm: f64) -> Self {
        let alpha = libm::exp(-beta_omega);
        Self::transverse(
            gamma_down,
            gamma_12.into(),
            alpha * gamma_down,
            Complex64::from(alpha * gamma_12),
            Complex64::new(js, dm),
        )
    }

    /// Classical Markovian noise: equal emission and absorption, no coupling.
    pub fn classical_transverse(gamma: f64, gamma_12: f64) -> Self {
        Self::transverse(gamma, gamma_12.into(), gamma, gamma_12.into(), ZERO)
    }
}

/// Pure dephasing by 1/f noise with an idealised constant-phase cross spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingOneOverF {
    pub sigma: f64,
    pub omega_low: f64,
    pub theta: f64,
    pub correlation_scale: f64,
    pub regime: noise::NoiseRegime,
}

impl DephasingOneOverF {
    /// Complex ratio γᶻ₁₂/γᶻ.
    pub fn correlation(&self) -> Complex64 {
        match self.regime {
            noise::NoiseRegime::Quantum => Complex64::from_polar(self.correlation_scale, self.theta),
            noise::NoiseRegime::Classical => {
                Complex64::from(self.correlation_scale * libm::cos(self.theta))
            }
        }
    }

    /// Ising coupling; only correlated quantum noise contributes.
    pub fn ising(&self, t: f64) -> f64 {
        match self.regime {
            noise::NoiseRegime::Quantum => {
                self.correlation_scale * ising_coupling_1f(t, self.sigma, self.theta)
            }
            noise::NoiseRegime::Classical => 0.0,
        }
    }

    /// V(t) = ∫₀ᵗ 𝒥ᶻ.
    pub fn ising_phase(&self, t: f64) -> f64 {
        match self.regime {
            noise::NoiseRegime::Quantum => {
                self.correlation_scale * ising_phase_1f(t, self.sigma, self.theta)
            }
            noise::NoiseRegime::Classical => 0.0,
        }
    }

    pub fn integrated_rate(&self, t: f64) -> f64 {
        dephasing_integral_1f(t, self.sigma, self.omega_low)
    }
}

impl CoefficientSource for DephasingOneOverF {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        let g = dephasing_rate_1f(t, self.sigma, self.omega_low);
        CoefficientSet {
            ising: self.ising(t),
            gamma_z: rate_matrix(g, self.correlation() * g),
            ..CoefficientSet::zero(t)
        }
    }
}

/// Driven qubits under classical 1/f noise: γ↓_ij = γ↑_ij, no coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalOneOverF {
    pub sigma: f64,
    pub omega_low: f64,
    pub omega: f64,
    pub correlation_scale: f64,
}

impl ClassicalOneOverF {
    pub fn rate(&self, t: f64) -> f64 {
        classical_rate_1f(t, self.sigma, self.omega_low, self.omega)
    }

    pub fn integrated_rate(&self, t: f64) -> f64 {
        classical_integral_1f(t, self.sigma, self.omega_low, self.omega)
    }
}

impl CoefficientSource for ClassicalOneOverF {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        let g = self.rate(t);
        let m = rate_matrix(g, Complex64::from(self.correlation_scale * g));
        CoefficientSet { gamma_down: m, gamma_up: m, ..CoefficientSet::zero(t) }
    }

    fn bandwidth(&self) -> f64 {
        self.omega
    }
}

/// Driven qubits under quantum 1/f noise (`S^Q ≈ S^C`), absorption neglected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumOneOverF {
    pub sigma: f64,
    pub omega_low: f64,
    pub omega: f64,
    pub correlation_scale: f64,
}

impl QuantumOneOverF {
    pub fn rate(&self, t: f64) -> f64 {
        quantum_decay_rate_1f(t, self.sigma, self.omega_low, self.omega)
    }

    pub fn integrated_rate(&self, t: f64) -> f64 {
        quantum_decay_integral_1f(t, self.sigma, self.omega_low, self.omega)
    }

    pub fn coupling(&self, t: f64) -> f64 {
        self.correlation_scale * transverse_coupling_1f(t, self.sigma, self.omega)
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.correlation_scale * transverse_phase_1f(t, self.sigma, self.omega)
    }
}

impl CoefficientSource for QuantumOneOverF {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        let g = self.rate(t);
        CoefficientSet {
            exchange: Complex64::from(self.coupling(t)),
            gamma_down: rate_matrix(g, Complex64::from(self.correlation_scale * g)),
            ..CoefficientSet::zero(t)
        }
    }

    fn bandwidth(&self) -> f64 {
        self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Dephasing,
    Transverse,
}

/// Coefficients of an arbitrary spectrum by direct quadrature at every `t`.
#[derive(Debug, Clone)]
pub struct SpectralNoise {
    pub model: SpectrumModel,
    pub geometry: CorrelationGeometry,
    /// Drive (Rabi) frequency Ω; unused for dephasing.
    pub omega: f64,
    pub kind: NoiseKind,
    pub options: QuadratureOptions,
}

impl SpectralNoise {
    fn parts(&self, w: f64) -> [(Complex64, Complex64); 3] {
        // (S^C, S^Q) for the orderings 11, 12, 21
        let (sc, sq) = noise::local_parts(&self.model, w).unwrap_or((0.0, 0.0));
        let f = self.geometry.factor(w).unwrap_or(ZERO);
        [(sc.into(), sq.into()), (f * sc, f * sq), (f.conj() * sc, f.conj() * sq)]
    }

    fn rate(&self, t: f64, filter: Filter, shift: f64, pick: impl Fn(&[(Complex64, Complex64); 3]) -> Complex64) -> Result<Complex64, RateError> {
        generic_rate(|w| pick(&self.parts(w)), filter, shift, t, self.model.support_start(), &self.options)
    }

    /// Coefficients at `t`, reporting quadrature failures.
    pub fn try_coefficients(&self, t: f64) -> Result<CoefficientSet, RateError> {
        let mut set = CoefficientSet::zero(t);
        match self.kind {
            NoiseKind::Dephasing => {
                set.ising = 4.0 * self.rate(t, Filter::Fc, 0.0, |p| p[1].1.re.into())?.re;
                let local = 4.0 * self.rate(t, Filter::Fs, 0.0, |p| p[0].0.re.into())?.re;
                let corr = self.rate(t, Filter::Fs, 0.0, |p| Complex64::new(p[1].0.re, p[1].1.im))? * 4.0;
                set.gamma_z = rate_matrix(local, corr);
            }
            NoiseKind::Transverse => {
                let o = self.omega;
                let j = self.rate(t, Filter::Fc, o, |p| p[1].1)? + self.rate(t, Filter::Fc, -o, |p| p[2].1)?;
                set.exchange = j * 2.0;
                // local: S_ij = S_ji
                let minus = self.rate(t, Filter::Fs, o, |p| p[0].0 + p[0].1)?;
                let plus = self.rate(t, Filter::Fs, -o, |p| p[0].0 - p[0].1)?;
                let local_down = 2.0 * (minus + plus).re;
                let minus_up = self.rate(t, Filter::Fs, o, |p| p[0].0 - p[0].1)?;
                let plus_up = self.rate(t, Filter::Fs, -o, |p| p[0].0 + p[0].1)?;
                let local_up = 2.0 * (minus_up + plus_up).re;
                // correlated, ij = 12
                let down_12 = (self.rate(t, Filter::Fs, o, |p| p[1].0 + p[1].1)?
                    + self.rate(t, Filter::Fs, -o, |p| p[2].0 - p[2].1)?)
                    * 2.0;
                let up_12 = (self.rate(t, Filter::Fs, -o, |p| p[1].0 + p[1].1)?
                    + self.rate(t, Filter::Fs, o, |p| p[2].0 - p[2].1)?)
                    * 2.0;
                set.gamma_down = rate_matrix(local_down, down_12);
                set.gamma_up = rate_matrix(local_up, up_12);
            }
        }
        Ok(set)
    }

    /// Markovian limit: rates from the spectra at ±Ω and the principal-value coupling.
    pub fn markovian_coefficients(&self) -> Result<CoefficientSet, RateError> {
        if self.kind != NoiseKind::Transverse {
            return Err(RateError::Invalid("only transverse noise has a Markovian limit"));
        }
        let o = self.omega;
        let [local, c12, c21] = self.parts(o);
        let (down, up) = markovian_rates(local.0, local.1);
        let (down_12, _) = markovian_rates(c12.0, c12.1);
        // γ↑_12 = S^C_21 − S^Q_21
        let (_, up_12) = markovian_rates(c21.0, c21.1);
        // F_c(ω ∓ Ω, t) → −PV 1/(ω ∓ Ω)
        let hi = self.options.omega_hi.unwrap_or(1e4 * o);
        let lo = self.model.support_start();
        let pv = |im: bool, sel: usize, pole: f64| {
            principal_value(
                |w| {
                    let q = self.parts(w)[sel].1;
                    if im { q.im } else { q.re }
                },
                pole,
                lo,
                hi,
                &self.options,
            )
        };
        let j_re = -(pv(false, 1, o)? + pv(false, 2, -o)?);
        let j_im = -(pv(true, 1, o)? + pv(true, 2, -o)?);
        Ok(CoefficientSet {
            exchange: Complex64::new(j_re, j_im) * (2.0 / (2.0 * PI)),
            gamma_down: rate_matrix(down.re, down_12),
            gamma_up: rate_matrix(up.re, up_12),
            ..CoefficientSet::zero(f64::INFINITY)
        })
    }
}

impl CoefficientSource for SpectralNoise {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        match self.try_coefficients(t) {
            Ok(c) => c,
            Err(e) => {
                log::error!("{e}");
                CoefficientSet { ising: f64::NAN, ..CoefficientSet::zero(t) }
            }
        }
    }

    fn asymptotic(&self) -> Option<CoefficientSet> {
        self.markovian_coefficients().ok()
    }

    fn bandwidth(&self) -> f64 {
        match self.kind {
            NoiseKind::Dephasing => 0.0,
            NoiseKind::Transverse => self.omega,
        }
    }
}

/// Coefficients tabulated on a time grid and linearly interpolated.
///
/// Built once from any source; read-only afterwards, so it can be shared by
/// concurrent evolutions.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    sets: Vec<CoefficientSet>,
    asymptotic: Option<CoefficientSet>,
    bandwidth: f64,
}

impl CoefficientTable {
    pub fn build<S: CoefficientSource + ?Sized>(source: &S, times: &[f64]) -> Result<Self, RateError> {
        if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RateError::Invalid("table times must be strictly increasing with ≥ 2 points"));
        }
        let sets = times.iter().map(|&t| source.coefficients(t)).collect();
        Ok(Self { sets, asymptotic: source.asymptotic(), bandwidth: source.bandwidth() })
    }

    pub fn sets(&self) -> &[CoefficientSet] {
        &self.sets
    }
}

impl CoefficientSource for CoefficientTable {
    fn coefficients(&self, t: f64) -> CoefficientSet {
        let k = self.sets.partition_point(|s| s.time <= t);
        if k == 0 {
            return CoefficientSet { time: t, ..self.sets[0] };
        }
        if k == self.sets.len() {
            return CoefficientSet { time: t, ..self.sets[k - 1] };
        }
        let (a, b) = (&self.sets[k - 1], &self.sets[k]);
        CoefficientSet::lerp(a, b, (t - a.time) / (b.time - a.time))
    }

    fn asymptotic(&self) -> Option<CoefficientSet> {
        self.asymptotic
    }

    fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}
