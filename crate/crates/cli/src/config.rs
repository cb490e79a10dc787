//! Run configuration: a TOML file whose physical quantities carry units.
//!
//! ```toml
//! scenario = "markovian_transverse"
//! initial_state = "up_down"
//! tolerance = 1e-9
//!
//! [time]
//! t_max = "5 us"
//! n_points = 501
//!
//! [rates]
//! gamma_down = "1 /us"
//! gamma_down_12 = "0.9 /us"
//! js = "5 /us"
//! ```
//!
//! Every validation error is reported with the line and column of the
//! offending value.

use std::fmt;
use std::ops::Range;

use corrnoise_core::dynamics::{DensityMatrix4, GeneratorKind, Matrix4c, NamedState};
use corrnoise_core::noise::{CorrelationGeometry, CorrelationMode, NoiseRegime, SpectrumModel, TabulatedSpectrum};
use corrnoise_core::rates::{
    ClassicalOneOverF, CoefficientSource, Constant, DephasingOneOverF, NoiseKind, QuadratureOptions, QuantumOneOverF,
    SpectralNoise,
};
use corrnoise_core::Complex64;
use serde::Deserialize;
use toml::Spanned;

use crate::output::Column;
use crate::units::{self, Dimension};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn plain(message: impl Into<String>) -> Self {
        ConfigError { line: None, column: None, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Scenario {
    #[serde(rename = "dephasing_1f", alias = "Dephasing1f")]
    Dephasing1f,
    #[serde(rename = "markovian_transverse", alias = "MarkovianTransverse")]
    MarkovianTransverse,
    #[serde(rename = "classical_1f", alias = "Classical1f")]
    Classical1f,
    #[serde(rename = "quantum_1f", alias = "Quantum1f")]
    Quantum1f,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Dephasing1f => "dephasing_1f",
            Scenario::MarkovianTransverse => "markovian_transverse",
            Scenario::Classical1f => "classical_1f",
            Scenario::Quantum1f => "quantum_1f",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Spanned<Scenario>,
    initial_state: Spanned<RawState>,
    tolerance: Option<Spanned<f64>>,
    outputs: Option<Vec<Spanned<String>>>,
    time: Spanned<RawTime>,
    drive: Option<RawDrive>,
    noise: Option<Spanned<RawNoise>>,
    geometry: Option<Spanned<RawGeometry>>,
    rates: Option<Spanned<RawRates>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawState {
    Named(String),
    Explicit { re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_max: Spanned<String>,
    n_points: Spanned<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    omega: Spanned<String>,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum SpectrumKind {
    OneOverF,
    LinearDispersion,
    Tabulated,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum RawRegime {
    Classical,
    Quantum,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    spectrum: Spanned<SpectrumKind>,
    sigma: Option<Spanned<String>>,
    omega_low: Option<Spanned<String>>,
    regime: Option<Spanned<RawRegime>>,
    amplitude: Option<Spanned<f64>>,
    sound_speed: Option<Spanned<String>>,
    beta: Option<Spanned<String>>,
    points: Option<Spanned<Vec<RawPoint>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    omega: Spanned<String>,
    re: Spanned<String>,
    im: Option<Spanned<String>>,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum GeometryMode {
    Idealized,
    Geometric,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    mode: Spanned<GeometryMode>,
    theta: Option<Spanned<String>>,
    correlation_scale: Option<Spanned<f64>>,
    dimension: Option<Spanned<i64>>,
    distance: Option<Spanned<String>>,
    sound_speed: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    gamma_down: Spanned<String>,
    gamma_down_12: Option<Spanned<String>>,
    gamma_down_12_phase: Option<Spanned<String>>,
    gamma_up: Option<Spanned<String>>,
    gamma_up_12: Option<Spanned<String>>,
    beta_omega: Option<Spanned<f64>>,
    js: Option<Spanned<String>>,
    dm: Option<Spanned<String>>,
}

/// Markovian transverse rates given directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectRates {
    pub gamma_down: f64,
    pub gamma_down_12: Complex64,
    pub gamma_up: f64,
    pub gamma_up_12: Complex64,
    pub js: f64,
    pub dm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Rates(DirectRates),
    Spectrum { model: SpectrumModel, geometry: CorrelationGeometry },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Named(NamedState),
    Explicit(DensityMatrix4),
}

impl InitialState {
    pub fn state(&self) -> DensityMatrix4 {
        match self {
            InitialState::Named(s) => s.state(),
            InitialState::Explicit(rho) => *rho,
        }
    }

    pub fn label(&self) -> String {
        match self {
            InitialState::Named(s) => s.name().to_owned(),
            InitialState::Explicit(_) => "explicit".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub noise: NoiseSpec,
    /// Rabi frequency Ω in rad/µs.
    pub drive: Option<f64>,
    pub initial_state: InitialState,
    pub t_max: f64,
    pub n_points: usize,
    pub tolerance: f64,
    pub outputs: Vec<Column>,
}

/// Maps a byte span of the source to a 1-based (line, column).
fn locate(src: &str, span: &Range<usize>) -> (usize, usize) {
    let start = span.start.min(src.len());
    let before = &src[..start];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(start, |i| start - i - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: &Range<usize>, message: impl Into<String>) -> ConfigError {
        let (line, column) = locate(self.src, span);
        ConfigError { line: Some(line), column: Some(column), message: message.into() }
    }

    fn quantity(&self, v: &Spanned<String>, dim: Dimension, what: &str) -> Result<f64, ConfigError> {
        units::parse(v.get_ref(), dim).map_err(|e| self.err(&v.span(), format!("{what}: {e}")))
    }

    fn opt_quantity(&self, v: &Option<Spanned<String>>, dim: Dimension, what: &str) -> Result<Option<f64>, ConfigError> {
        v.as_ref().map(|v| self.quantity(v, dim, what)).transpose()
    }

    fn required<'v, T>(&self, v: &'v Option<T>, table: &Range<usize>, what: &str) -> Result<&'v T, ConfigError> {
        v.as_ref().ok_or_else(|| self.err(table, format!("missing required field `{what}`")))
    }

    fn positive(&self, v: &Spanned<String>, dim: Dimension, what: &str) -> Result<f64, ConfigError> {
        let x = self.quantity(v, dim, what)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(self.err(&v.span(), format!("{what} must be positive")))
        }
    }

    fn non_negative(&self, v: &Spanned<String>, dim: Dimension, what: &str) -> Result<f64, ConfigError> {
        let x = self.quantity(v, dim, what)?;
        if x >= 0.0 {
            Ok(x)
        } else {
            Err(self.err(&v.span(), format!("{what} must be non-negative")))
        }
    }
}

impl RunConfig {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let (l, c) = locate(src, &span);
                    (Some(l), Some(c))
                }
                None => (None, None),
            };
            ConfigError { line, column, message: e.message().trim().to_owned() }
        })?;
        let cx = Ctx { src };
        let scenario = *raw.scenario.get_ref();

        let tolerance = match &raw.tolerance {
            Some(t) => {
                let v = *t.get_ref();
                if !(v > 0.0 && v <= 1e-2) {
                    return Err(cx.err(&t.span(), format!("tolerance must lie in (0, 1e-2], got {v}")));
                }
                v
            }
            None => 1e-8,
        };

        let time = raw.time.get_ref();
        let t_max = cx.positive(&time.t_max, Dimension::Time, "t_max")?;
        let n = *time.n_points.get_ref();
        if n < 2 {
            return Err(cx.err(&time.n_points.span(), format!("n_points must be at least 2, got {n}")));
        }
        let n_points = n as usize;

        let initial_state = match raw.initial_state.get_ref() {
            RawState::Named(name) => InitialState::Named(
                name.parse::<NamedState>().map_err(|e| cx.err(&raw.initial_state.span(), e.to_string()))?,
            ),
            RawState::Explicit { re, im } => {
                let span = raw.initial_state.span();
                let shape_ok = |m: &Vec<Vec<f64>>| m.len() == 4 && m.iter().all(|r| r.len() == 4);
                if !shape_ok(re) || im.as_ref().is_some_and(|m| !shape_ok(m)) {
                    return Err(cx.err(&span, "explicit initial_state needs 4×4 `re` (and optional `im`) arrays"));
                }
                let m = Matrix4c::from_fn(|a, b| {
                    Complex64::new(re[a][b], im.as_ref().map_or(0.0, |m| m[a][b]))
                });
                InitialState::Explicit(
                    DensityMatrix4::new(m).map_err(|e| cx.err(&span, format!("initial_state: {e}")))?,
                )
            }
        };

        let drive = match &raw.drive {
            Some(d) => Some(cx.positive(&d.omega, Dimension::Frequency, "drive.omega")?),
            None => None,
        };

        let outputs = match &raw.outputs {
            None => Column::all(),
            Some(list) => {
                let mut cols = Vec::new();
                for sel in list {
                    let picked = Column::select(sel.get_ref())
                        .ok_or_else(|| cx.err(&sel.span(), format!("unknown output selector `{}`; {}", sel.get_ref(), Column::selector_help())))?;
                    for c in picked {
                        if !cols.contains(&c) {
                            cols.push(c);
                        }
                    }
                }
                // keep the canonical column order regardless of selector order
                cols.sort();
                cols
            }
        };

        let noise = Self::noise(&cx, scenario, &raw, drive)?;

        Ok(RunConfig { scenario, noise, drive, initial_state, t_max, n_points, tolerance, outputs })
    }

    fn noise(cx: &Ctx<'_>, scenario: Scenario, raw: &RawConfig, drive: Option<f64>) -> Result<NoiseSpec, ConfigError> {
        if let Some(rates) = &raw.rates {
            if scenario != Scenario::MarkovianTransverse {
                return Err(cx.err(&rates.span(), "[rates] is only valid for scenario markovian_transverse"));
            }
            if let Some(n) = &raw.noise {
                return Err(cx.err(&n.span(), "give either [rates] or [noise], not both"));
            }
            return Ok(NoiseSpec::Rates(Self::direct_rates(cx, rates)?));
        }
        let noise = raw.noise.as_ref().ok_or_else(|| {
            ConfigError::plain(format!("scenario {} needs a [noise] table{}", scenario.name(), if scenario == Scenario::MarkovianTransverse { " or a [rates] table" } else { "" }))
        })?;
        let span = noise.span();
        let n = noise.get_ref();
        let kind = *n.spectrum.get_ref();

        let model = match kind {
            SpectrumKind::OneOverF => {
                let sigma = cx.positive(cx.required(&n.sigma, &span, "sigma")?, Dimension::Frequency, "sigma")?;
                let omega_low = cx.positive(cx.required(&n.omega_low, &span, "omega_low")?, Dimension::Frequency, "omega_low")?;
                let implied = match scenario {
                    Scenario::Classical1f => Some(RawRegime::Classical),
                    Scenario::Quantum1f => Some(RawRegime::Quantum),
                    _ => None,
                };
                let regime = match (&n.regime, implied) {
                    (Some(r), Some(i)) if *r.get_ref() != i => {
                        return Err(cx.err(&r.span(), format!("regime contradicts scenario {}", scenario.name())));
                    }
                    (Some(r), _) => *r.get_ref(),
                    (None, Some(i)) => i,
                    (None, None) => return Err(cx.err(&span, "missing required field `regime` (classical or quantum)")),
                };
                let regime = match regime {
                    RawRegime::Classical => NoiseRegime::Classical,
                    RawRegime::Quantum => NoiseRegime::Quantum,
                };
                SpectrumModel::OneOverF { sigma, omega_low, regime }
            }
            SpectrumKind::LinearDispersion => {
                let amplitude = cx.required(&n.amplitude, &span, "amplitude")?;
                if !(*amplitude.get_ref() >= 0.0) {
                    return Err(cx.err(&amplitude.span(), "amplitude must be non-negative"));
                }
                SpectrumModel::LinearDispersion {
                    amplitude: *amplitude.get_ref(),
                    sound_speed: cx.positive(cx.required(&n.sound_speed, &span, "sound_speed")?, Dimension::Speed, "sound_speed")?,
                    beta: cx.positive(cx.required(&n.beta, &span, "beta")?, Dimension::Time, "beta")?,
                }
            }
            SpectrumKind::Tabulated => {
                let pts = cx.required(&n.points, &span, "points")?;
                let mut nodes = Vec::with_capacity(pts.get_ref().len());
                for p in pts.get_ref() {
                    let w = cx.quantity(&p.omega, Dimension::Frequency, "points.omega")?;
                    let re = cx.quantity(&p.re, Dimension::Frequency, "points.re")?;
                    let im = cx.opt_quantity(&p.im, Dimension::Frequency, "points.im")?.unwrap_or(0.0);
                    nodes.push((w, Complex64::new(re, im)));
                }
                SpectrumModel::Tabulated(TabulatedSpectrum::new(nodes).map_err(|e| cx.err(&pts.span(), e.to_string()))?)
            }
        };
        model.validate().map_err(|e| cx.err(&span, e.to_string()))?;

        let geometry = match &raw.geometry {
            None => CorrelationGeometry::idealized(0.0, 1.0),
            Some(g) => Self::geometry(cx, g, &model)?,
        };
        let geom_span = raw.geometry.as_ref().map_or(span.clone(), |g| g.span());

        match scenario {
            Scenario::Dephasing1f | Scenario::Classical1f | Scenario::Quantum1f => {
                if kind != SpectrumKind::OneOverF {
                    return Err(cx.err(&n.spectrum.span(), format!("scenario {} needs spectrum = \"one_over_f\"", scenario.name())));
                }
                if geometry.mode != CorrelationMode::Idealized {
                    return Err(cx.err(&geom_span, format!("scenario {} needs an idealized geometry", scenario.name())));
                }
                if scenario != Scenario::Dephasing1f && geometry.phase_theta != 0.0 {
                    return Err(cx.err(&geom_span, "driven 1/f scenarios assume a real cross spectrum (theta = 0)"));
                }
                if scenario != Scenario::Dephasing1f && drive.is_none() {
                    return Err(ConfigError::plain(format!("scenario {} needs [drive] omega", scenario.name())));
                }
            }
            Scenario::MarkovianTransverse => {
                if drive.is_none() {
                    return Err(ConfigError::plain("a spectrum-based markovian_transverse run needs [drive] omega"));
                }
            }
        }
        Ok(NoiseSpec::Spectrum { model, geometry })
    }

    fn geometry(cx: &Ctx<'_>, g: &Spanned<RawGeometry>, model: &SpectrumModel) -> Result<CorrelationGeometry, ConfigError> {
        let span = g.span();
        let r = g.get_ref();
        let geom = match *r.mode.get_ref() {
            GeometryMode::Idealized => {
                let theta = cx.opt_quantity(&r.theta, Dimension::Angle, "theta")?.unwrap_or(0.0);
                let scale = r.correlation_scale.as_ref().map_or(1.0, |s| *s.get_ref());
                CorrelationGeometry::idealized(theta, scale)
            }
            GeometryMode::Geometric => {
                let dim = cx.required(&r.dimension, &span, "dimension")?;
                let d = *dim.get_ref();
                if !(1..=3).contains(&d) {
                    return Err(cx.err(&dim.span(), format!("dimension must be 1, 2 or 3, got {d}")));
                }
                let distance = cx.non_negative(cx.required(&r.distance, &span, "distance")?, Dimension::Length, "distance")?;
                let speed = match (&r.sound_speed, model.sound_speed()) {
                    (Some(s), _) => cx.positive(s, Dimension::Speed, "sound_speed")?,
                    (None, Some(c)) => c,
                    (None, None) => return Err(cx.err(&span, "missing required field `sound_speed`")),
                };
                CorrelationGeometry::geometric(d as u8, distance, speed)
            }
        };
        geom.validate().map_err(|e| cx.err(&span, e.to_string()))?;
        Ok(geom)
    }

    fn direct_rates(cx: &Ctx<'_>, rates: &Spanned<RawRates>) -> Result<DirectRates, ConfigError> {
        let r = rates.get_ref();
        let f = Dimension::Frequency;
        let gamma_down = cx.non_negative(&r.gamma_down, f, "gamma_down")?;
        let g12 = match &r.gamma_down_12 {
            Some(v) => cx.non_negative(v, f, "gamma_down_12")?,
            None => 0.0,
        };
        if g12 > gamma_down {
            let span = r.gamma_down_12.as_ref().map_or(rates.span(), |v| v.span());
            return Err(cx.err(&span, "gamma_down_12 must not exceed gamma_down"));
        }
        let phase = cx.opt_quantity(&r.gamma_down_12_phase, Dimension::Angle, "gamma_down_12_phase")?.unwrap_or(0.0);
        let gamma_down_12 = Complex64::from_polar(g12, phase);
        let (gamma_up, gamma_up_12) = match (&r.gamma_up, &r.beta_omega) {
            (Some(u), None) => {
                let up = cx.non_negative(u, f, "gamma_up")?;
                let up12 = match &r.gamma_up_12 {
                    Some(v) => cx.non_negative(v, f, "gamma_up_12")?,
                    None => 0.0,
                };
                if up12 > up {
                    return Err(cx.err(&u.span(), "gamma_up_12 must not exceed gamma_up"));
                }
                (up, Complex64::from_polar(up12, -phase))
            }
            (None, Some(b)) => {
                let bo = *b.get_ref();
                if !(bo >= 0.0) {
                    return Err(cx.err(&b.span(), "beta_omega must be non-negative"));
                }
                if r.gamma_up_12.is_some() {
                    return Err(cx.err(&b.span(), "gamma_up_12 is implied by beta_omega"));
                }
                let a = (-bo).exp();
                (a * gamma_down, Complex64::from_polar(a * g12, -phase))
            }
            (Some(u), Some(_)) => return Err(cx.err(&u.span(), "give either gamma_up or beta_omega, not both")),
            (None, None) => {
                if let Some(v) = &r.gamma_up_12 {
                    return Err(cx.err(&v.span(), "gamma_up_12 needs gamma_up"));
                }
                (0.0, Complex64::new(0.0, 0.0))
            }
        };
        let js = cx.opt_quantity(&r.js, f, "js")?.unwrap_or(0.0);
        let dm = cx.opt_quantity(&r.dm, f, "dm")?.unwrap_or(0.0);
        Ok(DirectRates { gamma_down, gamma_down_12, gamma_up, gamma_up_12, js, dm })
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max, self.n_points)
    }

    pub fn kind(&self) -> GeneratorKind {
        match self.scenario {
            Scenario::Dephasing1f => GeneratorKind::Dephasing,
            _ => GeneratorKind::Transverse,
        }
    }

    pub fn markovian(&self) -> bool {
        self.scenario == Scenario::MarkovianTransverse
    }

    /// Closed-form coefficient source where one exists, generic quadrature
    /// otherwise (`generic = true` forces quadrature for the 1/f scenarios).
    pub fn source(&self, generic: bool) -> Box<dyn CoefficientSource> {
        match &self.noise {
            NoiseSpec::Rates(r) => Box::new(Constant::transverse(
                r.gamma_down,
                r.gamma_down_12,
                r.gamma_up,
                r.gamma_up_12,
                Complex64::new(r.js, r.dm),
            )),
            NoiseSpec::Spectrum { model, geometry } => {
                let spectral = |kind| SpectralNoise {
                    model: model.clone(),
                    geometry: *geometry,
                    omega: self.drive.unwrap_or(0.0),
                    kind,
                    options: QuadratureOptions::default(),
                };
                match (self.scenario, model) {
                    (Scenario::MarkovianTransverse, _) => Box::new(spectral(NoiseKind::Transverse)),
                    (_, _) if generic => Box::new(spectral(match self.kind() {
                        GeneratorKind::Dephasing => NoiseKind::Dephasing,
                        GeneratorKind::Transverse => NoiseKind::Transverse,
                    })),
                    (Scenario::Dephasing1f, SpectrumModel::OneOverF { sigma, omega_low, regime }) => {
                        Box::new(DephasingOneOverF {
                            sigma: *sigma,
                            omega_low: *omega_low,
                            theta: geometry.phase_theta,
                            correlation_scale: geometry.correlation_scale,
                            regime: *regime,
                        })
                    }
                    (Scenario::Classical1f, SpectrumModel::OneOverF { sigma, omega_low, .. }) => Box::new(ClassicalOneOverF {
                        sigma: *sigma,
                        omega_low: *omega_low,
                        omega: self.drive.unwrap_or(0.0),
                        correlation_scale: geometry.correlation_scale,
                    }),
                    (Scenario::Quantum1f, SpectrumModel::OneOverF { sigma, omega_low, .. }) => Box::new(QuantumOneOverF {
                        sigma: *sigma,
                        omega_low: *omega_low,
                        omega: self.drive.unwrap_or(0.0),
                        correlation_scale: geometry.correlation_scale,
                    }),
                    // excluded by validation
                    _ => Box::new(spectral(NoiseKind::Transverse)),
                }
            }
        }
    }

    /// `key = value` lines recording every input, for file headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("scenario".to_owned(), self.scenario.name().to_owned()),
            ("initial_state".to_owned(), self.initial_state.label()),
            ("t_max".to_owned(), units::describe(self.t_max, Dimension::Time)),
            ("n_points".to_owned(), self.n_points.to_string()),
            ("tolerance".to_owned(), self.tolerance.to_string()),
        ];
        if let Some(o) = self.drive {
            out.push(("drive.omega".to_owned(), units::describe(o, Dimension::Frequency)));
        }
        if let InitialState::Explicit(rho) = &self.initial_state {
            for a in 0..4 {
                let row: Vec<String> = (0..4).map(|b| {
                    let z = rho.matrix()[(a, b)];
                    format!("{}{:+}i", z.re, z.im)
                }).collect();
                out.push((format!("initial_state.row{a}"), row.join(" ")));
            }
        }
        match &self.noise {
            NoiseSpec::Rates(r) => {
                out.push(("rates".to_owned(), format!("{r:?}")));
            }
            NoiseSpec::Spectrum { model, geometry } => {
                out.push(("noise".to_owned(), format!("{model:?}")));
                out.push(("geometry".to_owned(), format!("{geometry:?}")));
            }
        }
        out
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo + step * k as f64 }).collect()
}
