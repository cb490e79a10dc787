//! Noise power spectral densities.
//!
//! A [`SpectrumModel`] gives the local spectrum `S_ii(ω)` together with its
//! classical (symmetrised) and quantum (antisymmetrised) parts. The cross
//! spectrum `S_12(ω)` is derived from it through a [`CorrelationGeometry`],
//! either with an idealised constant ratio `scale·e^{iθ}` or with the
//! spatial factor of a linear dispersion `ω = c_s|k|` in 1, 2 or 3 dimensions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::specfun;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("invalid spectrum parameter: {0}")]
    InvalidModel(&'static str),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),
    #[error("frequency {omega} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { omega: f64, lo: f64, hi: f64 },
    #[error("spatial dimension must be 1, 2 or 3, got {0}")]
    Dimension(u8),
}

/// Whether a 1/f spectrum carries an antisymmetric (quantum) part.
///
/// `Classical` means `S^Q = 0`; `Quantum` means `S^Q(ω) = sgn(ω)·S^C(ω)`, the
/// low-temperature limit in which the environment can only absorb energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseRegime {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    /// `S^C(ω) = 2πσ̃²/|ω|` for `|ω| > ω_l`, zero below the cutoff.
    OneOverF { sigma: f64, omega_low: f64, regime: NoiseRegime },
    /// Thermal bath with `S(ω) = A·ω·(n_B(ω) + 1)`; `A/β` at `ω = 0`.
    LinearDispersion { amplitude: f64, sound_speed: f64, beta: f64 },
    Tabulated(TabulatedSpectrum),
}

/// Linearly interpolated spectrum on a strictly increasing frequency grid.
///
/// A grid starting at `ω ≥ 0` is taken to describe an even spectrum, so that
/// `S(-ω) = S(ω)`; otherwise lookups outside the grid fail.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    values: Vec<Complex64>,
}

impl TabulatedSpectrum {
    pub fn new(points: Vec<(f64, Complex64)>) -> Result<Self, NoiseError> {
        if points.len() < 2 {
            return Err(NoiseError::InvalidModel("tabulated spectrum needs at least two nodes"));
        }
        let mut omega = Vec::with_capacity(points.len());
        let mut values = Vec::with_capacity(points.len());
        for (w, s) in points {
            if !w.is_finite() || !s.re.is_finite() || !s.im.is_finite() {
                return Err(NoiseError::InvalidModel("non-finite tabulated value"));
            }
            if omega.last().is_some_and(|&last| w <= last) {
                return Err(NoiseError::InvalidModel("frequency grid must be strictly increasing"));
            }
            if s.re < 0.0 {
                return Err(NoiseError::InvalidModel("local spectrum must be non-negative"));
            }
            omega.push(w);
            values.push(s);
        }
        Ok(Self { omega, values })
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.omega.iter().copied().zip(self.values.iter().copied())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    fn is_even(&self) -> bool {
        self.omega[0] >= 0.0
    }

    /// Interpolated value at `omega`.
    pub fn value(&self, omega: f64) -> Result<Complex64, NoiseError> {
        let w = if self.is_even() { libm::fabs(omega) } else { omega };
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&w) {
            return Err(NoiseError::OutOfRange { omega, lo, hi });
        }
        let k = self.omega.partition_point(|&x| x <= w);
        if k == 0 {
            return Ok(self.values[0]);
        }
        if k == self.omega.len() {
            return Ok(self.values[k - 1]);
        }
        let (x0, x1) = (self.omega[k - 1], self.omega[k]);
        let u = (w - x0) / (x1 - x0);
        Ok(self.values[k - 1] * (1.0 - u) + self.values[k] * u)
    }
}

impl SpectrumModel {
    pub fn validate(&self) -> Result<(), NoiseError> {
        match *self {
            SpectrumModel::OneOverF { sigma, omega_low, .. } => {
                if !(sigma > 0.0) || !sigma.is_finite() {
                    return Err(NoiseError::InvalidModel("sigma must be positive"));
                }
                if !(omega_low > 0.0) || !omega_low.is_finite() {
                    return Err(NoiseError::InvalidModel("omega_low must be positive"));
                }
            }
            SpectrumModel::LinearDispersion { amplitude, sound_speed, beta } => {
                if !(amplitude >= 0.0) {
                    return Err(NoiseError::InvalidModel("amplitude must be non-negative"));
                }
                if !(sound_speed > 0.0) {
                    return Err(NoiseError::InvalidModel("sound speed must be positive"));
                }
                if !(beta > 0.0) {
                    return Err(NoiseError::InvalidModel("beta must be positive"));
                }
            }
            SpectrumModel::Tabulated(_) => {}
        }
        Ok(())
    }

    /// Lower edge of the frequency support (the 1/f cutoff), zero otherwise.
    pub fn support_start(&self) -> f64 {
        match *self {
            SpectrumModel::OneOverF { omega_low, .. } => omega_low,
            _ => 0.0,
        }
    }

    /// Sound speed carried by the model, if any.
    pub fn sound_speed(&self) -> Option<f64> {
        match *self {
            SpectrumModel::LinearDispersion { sound_speed, .. } => Some(sound_speed),
            _ => None,
        }
    }
}

/// Local spectrum `S_ii(ω) = S^C_ii(ω) + S^Q_ii(ω)`.
pub fn local_spectrum(model: &SpectrumModel, omega: f64) -> Result<f64, NoiseError> {
    let (sc, sq) = local_parts(model, omega)?;
    Ok(sc + sq)
}

/// Classical and quantum parts `(S^C_ii(ω), S^Q_ii(ω))` of the local spectrum.
pub fn local_parts(model: &SpectrumModel, omega: f64) -> Result<(f64, f64), NoiseError> {
    match model {
        &SpectrumModel::OneOverF { sigma, omega_low, regime } => {
            let w = libm::fabs(omega);
            if w <= omega_low {
                return Ok((0.0, 0.0));
            }
            let sc = 2.0 * PI * sigma * sigma / w;
            let sq = match regime {
                NoiseRegime::Classical => 0.0,
                NoiseRegime::Quantum => libm::copysign(sc, omega),
            };
            Ok((sc, sq))
        }
        SpectrumModel::LinearDispersion { amplitude, beta, .. } => {
            let plus = linear_dispersion(*amplitude, *beta, omega);
            let minus = linear_dispersion(*amplitude, *beta, -omega);
            Ok((
                classical_part(plus.into(), minus.into()).re,
                quantum_part(plus.into(), minus.into()).re,
            ))
        }
        SpectrumModel::Tabulated(tab) => {
            let plus = tab.value(omega)?.re;
            let minus = tab.value(-omega)?.re;
            Ok((0.5 * (plus + minus), 0.5 * (plus - minus)))
        }
    }
}

fn linear_dispersion(amplitude: f64, beta: f64, omega: f64) -> f64 {
    let x = beta * omega;
    if libm::fabs(x) < 1e-8 {
        // ω(n_B + 1) → 1/β + ω/2 near zero
        return amplitude * (1.0 / beta + 0.5 * omega);
    }
    amplitude * omega * (1.0 / libm::expm1(x) + 1.0)
}

/// `S^C_ij(ω) = (S_ij(ω) + S_ji(-ω))/2`.
pub fn classical_part(s_plus: Complex64, s_minus_transposed: Complex64) -> Complex64 {
    (s_plus + s_minus_transposed) * 0.5
}

/// `S^Q_ij(ω) = (S_ij(ω) - S_ji(-ω))/2`.
pub fn quantum_part(s_plus: Complex64, s_minus_transposed: Complex64) -> Complex64 {
    (s_plus - s_minus_transposed) * 0.5
}

/// Ratio `S_12/S_ii` for a linear dispersion in `dimension` dimensions.
pub fn spatial_factor(dimension: u8, kd: f64) -> Result<f64, NoiseError> {
    if !(kd >= 0.0) {
        return Err(NoiseError::InvalidGeometry("kd must be non-negative"));
    }
    match dimension {
        1 => Ok(libm::cos(kd)),
        2 => Ok(libm::j0(kd)),
        3 => {
            if kd < 1e-4 {
                Ok(1.0 - kd * kd / 6.0)
            } else {
                Ok(libm::sin(kd) / kd)
            }
        }
        d => Err(NoiseError::Dimension(d)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    /// `S_12 = scale·e^{iθ}·S_ii`.
    Idealized,
    /// `S_12 = f_dim(|ω|d/c_s)·S_ii`.
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationGeometry {
    pub dimension: u8,
    /// Qubit separation in µm.
    pub distance: f64,
    /// Sound speed in µm/µs.
    pub sound_speed: f64,
    pub phase_theta: f64,
    pub correlation_scale: f64,
    pub mode: CorrelationMode,
}

impl CorrelationGeometry {
    pub fn idealized(phase_theta: f64, correlation_scale: f64) -> Self {
        Self {
            dimension: 2,
            distance: 0.0,
            sound_speed: 1.0,
            phase_theta,
            correlation_scale,
            mode: CorrelationMode::Idealized,
        }
    }

    pub fn geometric(dimension: u8, distance: f64, sound_speed: f64) -> Self {
        Self {
            dimension,
            distance,
            sound_speed,
            phase_theta: 0.0,
            correlation_scale: 1.0,
            mode: CorrelationMode::Geometric,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.distance >= 0.0) {
            return Err(NoiseError::InvalidGeometry("distance must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.correlation_scale) {
            return Err(NoiseError::InvalidGeometry("correlation_scale must lie in [0, 1]"));
        }
        if !self.phase_theta.is_finite() {
            return Err(NoiseError::InvalidGeometry("phase must be finite"));
        }
        if self.mode == CorrelationMode::Geometric {
            if !(self.sound_speed > 0.0) {
                return Err(NoiseError::InvalidGeometry("sound speed must be positive"));
            }
            if !(1..=3).contains(&self.dimension) {
                return Err(NoiseError::Dimension(self.dimension));
            }
        }
        Ok(())
    }

    /// Same geometry seen with the qubit labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { phase_theta: -self.phase_theta, ..*self }
    }

    /// Complex ratio `S_12(ω)/S_ii(ω)`.
    pub fn factor(&self, omega: f64) -> Result<Complex64, NoiseError> {
        match self.mode {
            CorrelationMode::Idealized => {
                Ok(Complex64::from_polar(self.correlation_scale, self.phase_theta))
            }
            CorrelationMode::Geometric => {
                if !(self.sound_speed > 0.0) {
                    return Err(NoiseError::InvalidGeometry("sound speed must be positive"));
                }
                let kd = libm::fabs(omega) * self.distance / self.sound_speed;
                Ok(Complex64::new(spatial_factor(self.dimension, kd)?, 0.0))
            }
        }
    }
}

/// Cross spectrum `S_12(ω)`.
pub fn cross_spectrum(
    model: &SpectrumModel,
    geom: &CorrelationGeometry,
    omega: f64,
) -> Result<Complex64, NoiseError> {
    Ok(geom.factor(omega)? * local_spectrum(model, omega)?)
}

/// Classical and quantum parts `(S^C_12(ω), S^Q_12(ω))` of the cross spectrum.
pub fn cross_parts(
    model: &SpectrumModel,
    geom: &CorrelationGeometry,
    omega: f64,
) -> Result<(Complex64, Complex64), NoiseError> {
    let f = geom.factor(omega)?;
    let (sc, sq) = local_parts(model, omega)?;
    Ok((f * sc, f * sq))
}

/// Bose-Einstein occupation re-exported for spectrum construction.
pub fn occupation(omega: f64, beta: f64) -> Result<f64, specfun::SpecialFunctionError> {
    specfun::bose_einstein(omega, beta)
}
