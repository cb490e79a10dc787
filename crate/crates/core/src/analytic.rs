//! Closed-form solutions: pure-dephasing element factors, Markovian
//! concurrences from |↑↓⟩, and the 1/f concurrences and residual entanglement
//! for driven qubits.

use core::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{DensityMatrix4, Matrix4c};
use crate::rates;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("wrong regime: {0}")]
    WrongRegime(&'static str),
    #[error("{what} = {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
}

/// Pure dephasing by 1/f noise with `S₁₂ = s·e^{iθ}S_ii`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    pub sigma: f64,
    pub omega_low: f64,
    pub theta: f64,
    /// `S^Q ≈ S^C` when set, `S^Q = 0` otherwise.
    pub quantum_regime: bool,
    /// Magnitude `s` of the correlation; 1 for the idealised model.
    pub correlation_scale: f64,
}

impl DephasingParams {
    pub fn new(sigma: f64, omega_low: f64, theta: f64, quantum_regime: bool) -> Self {
        Self { sigma, omega_low, theta, quantum_regime, correlation_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        if !(self.sigma > 0.0 && self.omega_low > 0.0) {
            return Err(AnalyticError::InvalidParams("σ̃ and ω_l must be positive"));
        }
        if !(0.0..=1.0).contains(&self.correlation_scale) {
            return Err(AnalyticError::InvalidParams("correlation scale must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Γᶻ(t).
    pub fn gamma_integral(&self, t: f64) -> f64 {
        rates::dephasing_integral_1f(t, self.sigma, self.omega_low)
    }

    /// V(t); zero without quantum noise.
    pub fn ising_phase(&self, t: f64) -> f64 {
        if self.quantum_regime {
            self.correlation_scale * rates::ising_phase_1f(t, self.sigma, self.theta)
        } else {
            0.0
        }
    }
}

/// Multiplicative factor per density-matrix element, `G_ab(t) = f_ab(t)·G_ab(0)`.
pub fn dephasing_elements(t: f64, p: &DephasingParams) -> Matrix4c {
    let gamma = p.gamma_integral(t);
    let v = p.ising_phase(t);
    let sin = if p.quantum_regime { p.correlation_scale * libm::sin(p.theta) } else { 0.0 };
    let cos = p.correlation_scale * libm::cos(p.theta);
    let e = |re: f64, im: f64| Complex64::from_polar(libm::exp(re), im);
    let mut f = Matrix4::from_element(Complex64::from(1.0));
    // G₁₂, G₁₃, G₂₄, G₃₄ (1-based labels)
    f[(0, 1)] = e(-2.0 * gamma, 2.0 * sin * gamma - 2.0 * v);
    f[(0, 2)] = e(-2.0 * gamma, -2.0 * sin * gamma - 2.0 * v);
    f[(1, 3)] = e(-2.0 * gamma, 2.0 * sin * gamma + 2.0 * v);
    f[(2, 3)] = e(-2.0 * gamma, -2.0 * sin * gamma + 2.0 * v);
    f[(1, 2)] = e(-4.0 * (1.0 - cos) * gamma, 0.0);
    f[(0, 3)] = e(-4.0 * (1.0 + cos) * gamma, 0.0);
    for a in 0..4 {
        for b in 0..a {
            f[(a, b)] = f[(b, a)].conj();
        }
    }
    f
}

/// `ρ(t)` under pure dephasing from any `ρ₀`.
pub fn dephased_state(rho0: &DensityMatrix4, t: f64, p: &DephasingParams) -> DensityMatrix4 {
    DensityMatrix4::from_matrix_unchecked(dephasing_elements(t, p).component_mul(rho0.matrix()))
}

/// Markovian transverse noise with constant rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovianParams {
    pub gamma_down: f64,
    pub gamma_12: f64,
    /// Symmetric exchange 𝒥_s.
    pub js: f64,
    /// DM coupling 𝒟.
    pub dm: f64,
}

impl MarkovianParams {
    pub fn validate(&self) -> Result<(), AnalyticError> {
        if !(0.0 <= self.gamma_12 && self.gamma_12 <= self.gamma_down) {
            return Err(AnalyticError::InvalidParams("need 0 ≤ γ↓₁₂ ≤ γ↓"));
        }
        Ok(())
    }

    /// `ω_r = √(4𝒟² − γ↓₁₂²)` in the underdamped regime.
    pub fn dm_frequency(&self) -> Option<f64> {
        let disc = 4.0 * self.dm * self.dm - self.gamma_12 * self.gamma_12;
        (disc > 0.0).then(|| libm::sqrt(disc))
    }
}

/// `e^{−γ↓t}√(sinh²(γ↓₁₂t) + sin²(2𝒥_s t))` from |↑↓⟩ without DM coupling.
pub fn concurrence_sym_exchange(t: f64, p: &MarkovianParams) -> Result<f64, AnalyticError> {
    p.validate()?;
    if p.dm != 0.0 {
        return Err(AnalyticError::WrongRegime("symmetric-exchange form needs 𝒟 = 0"));
    }
    let s = libm::sinh(p.gamma_12 * t);
    let o = libm::sin(2.0 * p.js * t);
    Ok(libm::exp(-p.gamma_down * t) * libm::sqrt(s * s + o * o))
}

/// Concurrence from |↑↓⟩ with DM coupling only, in the under-, critically
/// or overdamped regime.
///
/// The prefactor is `|γ↓₁₂ + 2𝒟|`, the initial slope of `C_R`; it is not
/// symmetric under 𝒟 → −𝒟 (at 𝒟 = −γ↓₁₂/2 no entanglement forms).
pub fn concurrence_dm(t: f64, p: &MarkovianParams) -> Result<f64, AnalyticError> {
    p.validate()?;
    if p.js != 0.0 {
        return Err(AnalyticError::WrongRegime("DM form needs 𝒥_s = 0"));
    }
    let amp = (p.gamma_12 + 2.0 * p.dm).abs();
    let (a, b) = (4.0 * p.dm * p.dm, p.gamma_12 * p.gamma_12);
    let disc = a - b;
    let shape = if disc.abs() <= 1e-12 * a.max(b) {
        t
    } else if disc > 0.0 {
        let w = libm::sqrt(disc);
        (libm::sin(w * t) / w).abs()
    } else {
        let k = libm::sqrt(-disc);
        libm::sinh(k * t) / k
    };
    Ok(libm::exp(-p.gamma_down * t) * amp * shape)
}

/// Bell-state concurrence under classical 1/f noise as a function of Γ(t),
/// clamped at zero.
pub fn concurrence_classical_1f_bell(gamma: f64) -> Result<f64, AnalyticError> {
    if !(gamma >= 0.0) {
        return Err(AnalyticError::Domain { what: "Γ", value: gamma });
    }
    let s = libm::sinh(3.0 * gamma);
    let e6 = libm::exp(-6.0 * gamma);
    let root = libm::sqrt(4.0 * e6 * s * s + 9.0 * libm::exp(-4.0 * gamma));
    Ok(((root + e6 - 1.0) / 3.0).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumInitial {
    /// (|↑↓⟩ + i|↓↑⟩)/√2.
    Bell,
    /// |↑↓⟩.
    Product,
}

/// Concurrence under quantum 1/f noise (γ↑ ≈ 0, γ↓₁₂ = γ↓) from Γ↓(t) and
/// Φ(t) = ∫𝒥.
///
/// The exchange coupling rotates (Re G_ts, Im G_ts) by 2Φ, so the oscillating
/// term is cos²(2Φ) for the Bell state and sin²(2Φ) for |↑↓⟩.
pub fn concurrence_quantum_1f(gamma_down: f64, phi: f64, initial: QuantumInitial) -> Result<f64, AnalyticError> {
    if !(gamma_down >= 0.0) {
        return Err(AnalyticError::Domain { what: "Γ↓", value: gamma_down });
    }
    let s = libm::sinh(gamma_down);
    let o = match initial {
        QuantumInitial::Bell => libm::cos(2.0 * phi),
        QuantumInitial::Product => libm::sin(2.0 * phi),
    };
    Ok(libm::exp(-gamma_down) * libm::sqrt(s * s + o * o))
}

/// Steady-state concurrence `1/2 − 3/(4cosh βΩ + 2)`.
pub fn residual_entanglement(beta_omega: f64) -> Result<f64, AnalyticError> {
    if !(beta_omega >= 0.0) {
        return Err(AnalyticError::Domain { what: "βΩ", value: beta_omega });
    }
    if beta_omega > 700.0 {
        return Ok(0.5);
    }
    Ok(0.5 - 3.0 / (4.0 * libm::cosh(beta_omega) + 2.0))
}

/// Same quantity from the noise spectra, `2(S^Q)²/(3(S^C)² + (S^Q)²)`.
pub fn residual_entanglement_spectral(s_c: f64, s_q: f64) -> f64 {
    2.0 * s_q * s_q / (3.0 * s_c * s_c + s_q * s_q)
}

/// Period of the DM oscillation, `π/ω_r`, the first zero of the concurrence.
pub fn first_dm_zero(p: &MarkovianParams) -> Option<f64> {
    p.dm_frequency().map(|w| PI / w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, EvolveOptions, GeneratorKind, GeneratorSpec, NamedState};
    use crate::noise::NoiseRegime;
    use crate::rates::{Constant, DephasingOneOverF};
    use crate::testutil::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TWO_PI: f64 = 2.0 * PI;

    fn fig4(js: f64, dm: f64) -> MarkovianParams {
        MarkovianParams { gamma_down: 1.0, gamma_12: 0.9, js, dm }
    }

    fn numeric_concurrence(p: &MarkovianParams, times: &[f64]) -> Vec<f64> {
        let src = Constant::quantum_transverse(p.gamma_down, p.gamma_12, p.js, p.dm);
        let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        evolve(&NamedState::UpDown.state(), &spec, times, &EvolveOptions::with_tolerance(1e-10))
            .unwrap()
            .concurrence()
    }

    #[test]
    fn dephasing_factor_examples() {
        for quantum in [true, false] {
            for &theta in &[0.0, PI / 3.0, PI / 2.0, PI] {
                let p = DephasingParams::new(2.0, TWO_PI, theta, quantum);
                let f0 = dephasing_elements(0.0, &p);
                assert!(f0.iter().all(|z| (z - Complex64::from(1.0)).norm() < 1e-15));
            }
        }
        let p = DephasingParams::new(2.0, TWO_PI, 0.0, true);
        for &t in &[0.05, 0.1, 0.2] {
            assert!((dephasing_elements(t, &p)[(1, 2)] - Complex64::from(1.0)).norm() < 1e-15);
        }
        let p = DephasingParams::new(2.0, TWO_PI, PI / 3.0, true);
        for &t in &[0.05, 0.1, 0.2] {
            let f = dephasing_elements(t, &p)[(1, 2)].norm();
            assert!((f - (-2.0 * p.gamma_integral(t)).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn dephasing_factors_match_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho0 = DensityMatrix4::new(random_density(&mut rng)).unwrap();
        let times = [0.0, 0.05, 0.1, 0.2];
        for quantum in [true, false] {
            for &theta in &[0.0, PI / 3.0, PI / 2.0, PI, 2.2] {
                let p = DephasingParams::new(2.0, TWO_PI, theta, quantum);
                let src = DephasingOneOverF {
                    sigma: p.sigma,
                    omega_low: p.omega_low,
                    theta,
                    correlation_scale: 1.0,
                    regime: if quantum { NoiseRegime::Quantum } else { NoiseRegime::Classical },
                };
                let spec = GeneratorSpec { kind: GeneratorKind::Dephasing, source: &src, markovian: false };
                let traj = evolve(&rho0, &spec, &times, &EvolveOptions::with_tolerance(1e-11)).unwrap();
                for (k, &t) in times.iter().enumerate() {
                    let expect = dephased_state(&rho0, t, &p);
                    let diff = (traj.states[k].matrix() - expect.matrix()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                    assert!(diff < 1e-8, "θ={theta} t={t}: {diff}");
                }
            }
        }
    }

    #[test]
    fn sym_exchange_examples() {
        assert_eq!(concurrence_sym_exchange(0.0, &fig4(5.0, 0.0)).unwrap(), 0.0);
        assert!(concurrence_sym_exchange(1.0, &fig4(1.0, 0.5)).is_err());
        // long times: ∝ exp[−(γ↓−γ↓₁₂)t]/2
        let p = fig4(0.0, 0.0);
        let t = 40.0;
        let c = concurrence_sym_exchange(t, &p).unwrap();
        assert!((c / ((-0.1 * t).exp() / 2.0) - 1.0).abs() < 1e-12);
        // symmetric in 𝒥_s
        for k in 0..50 {
            let t = 0.1 * k as f64;
            let a = concurrence_sym_exchange(t, &fig4(3.0, 0.0)).unwrap();
            let b = concurrence_sym_exchange(t, &fig4(-3.0, 0.0)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sym_exchange_matches_evolution() {
        let times: Vec<f64> = (0..=50).map(|k| 0.01 * k as f64).collect();
        let p = fig4(5.0, 0.0);
        let numeric = numeric_concurrence(&p, &times);
        for (t, n) in times.iter().zip(numeric) {
            assert!((concurrence_sym_exchange(*t, &p).unwrap() - n).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn dm_regimes() {
        let p = fig4(0.0, 0.45);
        for &t in &[0.3, 1.0, 2.5] {
            let c = concurrence_dm(t, &p).unwrap();
            assert!((c - 1.8 * t * (-t).exp()).abs() < 1e-15);
        }
        let p = fig4(0.0, 0.0);
        for &t in &[0.3, 1.0, 2.5] {
            let c = concurrence_dm(t, &p).unwrap();
            assert!((c - (-t).exp() * (0.9 * t).sinh()).abs() < 1e-14);
        }
        // continuity across the critical point
        for &eps in &[1e-6, -1e-6] {
            let q = fig4(0.0, 0.45 * (1.0 + eps));
            for &t in &[0.5, 2.0, 4.0] {
                let crit = concurrence_dm(t, &p_crit()).unwrap();
                let near = concurrence_dm(t, &q).unwrap();
                assert!((near - crit).abs() < 1e-4 * crit);
            }
        }
        assert!(concurrence_dm(1.0, &fig4(1.0, 0.3)).is_err());
    }

    fn p_crit() -> MarkovianParams {
        fig4(0.0, 0.45)
    }

    #[test]
    fn dm_matches_evolution_for_both_signs() {
        let times: Vec<f64> = (0..=80).map(|k| 0.05 * k as f64).collect();
        for &dm in &[0.2, 0.45, 5.0, -0.2, -0.45, -5.0] {
            let p = fig4(0.0, dm);
            let numeric = numeric_concurrence(&p, &times);
            for (t, n) in times.iter().zip(numeric) {
                let a = concurrence_dm(*t, &p).unwrap();
                assert!((a - n).abs() < 1e-6, "𝒟={dm} t={t}: {a} vs {n}");
            }
        }
        // 𝒟 → −𝒟 changes the curve
        let a = concurrence_dm(1.0, &fig4(0.0, 0.2)).unwrap();
        let b = concurrence_dm(1.0, &fig4(0.0, -0.2)).unwrap();
        assert!((a - b).abs() > 0.1);
        assert_eq!(concurrence_dm(1.0, &fig4(0.0, -0.45)).unwrap(), 0.0);
    }

    #[test]
    fn dm_first_zero() {
        let p = fig4(0.0, 5.0);
        let tz = first_dm_zero(&p).unwrap();
        assert!(concurrence_dm(tz, &p).unwrap() < 1e-15);
        assert!(concurrence_dm(0.5 * tz, &p).unwrap() > 0.1);
    }

    #[test]
    fn classical_bell_examples() {
        assert!((concurrence_classical_1f_bell(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_classical_1f_bell(50.0).unwrap(), 0.0);
        assert!(concurrence_classical_1f_bell(-0.1).is_err());
        let mut last = 2.0;
        for k in 0..200 {
            let c = concurrence_classical_1f_bell(0.01 * k as f64).unwrap();
            assert!(c <= last);
            last = c;
        }
    }

    #[test]
    fn quantum_1f_examples() {
        assert_eq!(concurrence_quantum_1f(0.0, 0.0, QuantumInitial::Product).unwrap(), 0.0);
        assert_eq!(concurrence_quantum_1f(0.0, 0.0, QuantumInitial::Bell).unwrap(), 1.0);
        for init in [QuantumInitial::Bell, QuantumInitial::Product] {
            for &phi in &[0.0, 0.3, 1.0] {
                let c = concurrence_quantum_1f(20.0, phi, init).unwrap();
                assert!((c - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn residual_entanglement_forms() {
        assert!(residual_entanglement(0.0).unwrap().abs() < 1e-15);
        assert!((residual_entanglement(800.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((residual_entanglement(40.0).unwrap() - 0.5).abs() < 1e-15);
        for k in 1..=100 {
            let bo = 0.1 * k as f64;
            let s_q = 1.7;
            let s_c = s_q / (bo / 2.0).tanh();
            let a = residual_entanglement(bo).unwrap();
            let b = residual_entanglement_spectral(s_c, s_q);
            assert!((a - b).abs() < 1e-12, "βΩ={bo}");
        }
    }

    #[test]
    fn residual_matches_steady_state_concurrence() {
        for &bo in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let s = crate::dynamics::thermal_steady_state(bo).unwrap();
            let c = crate::entanglement::concurrence(s.matrix()).unwrap();
            assert!((c - residual_entanglement(bo).unwrap()).abs() < 1e-10);
        }
    }
}
