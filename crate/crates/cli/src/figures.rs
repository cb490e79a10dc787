//! Data behind each figure, as parameter-stamped CSV tables.
//!
//! Closed forms are used wherever they are exact; quantities without one
//! (populations under Markovian decay, product states under classical 1/f
//! noise) come from `evolve`. Sweeps fan out over the rayon pool and are
//! collected in grid order, so output is byte-identical across runs and
//! worker counts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use corrnoise_core::analytic::{self, DephasingParams, MarkovianParams, QuantumInitial};
use corrnoise_core::dynamics::{
    evolve, null_space_steady_state, DynamicsError, EvolveOptions, GeneratorKind, GeneratorSpec, NamedState, Trajectory,
};
use corrnoise_core::entanglement;
use corrnoise_core::noise::CorrelationGeometry;
use corrnoise_core::rates::{ClassicalOneOverF, CoefficientSource, Constant, QuantumOneOverF};
use rayon::prelude::*;

use crate::config::linspace;
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 7] =
        [Figure::Fig2, Figure::Fig3a, Figure::Fig3b, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown figure `{0}`; valid names: fig2, fig3a, fig3b, fig4, fig5, fig6, fig7")]
pub struct UnknownFigure(pub String);

impl FromStr for Figure {
    type Err = UnknownFigure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| UnknownFigure(s.to_owned()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analytic(#[from] analytic::AnalyticError),
    #[error(transparent)]
    Entanglement(#[from] entanglement::EntanglementError),
    #[error(transparent)]
    Noise(#[from] corrnoise_core::noise::NoiseError),
    #[error("grid size must be at least 2, got {0}")]
    Grid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FigureOptions {
    /// θ-points of the fig3b density plot (time points are 2N − 1).
    pub grid: Option<usize>,
}

/// One output file.
pub type Output = (String, Table);

const TWO_PI: f64 = 2.0 * PI;
/// ω/2π = 1 GHz in rad/µs.
const GHZ: f64 = TWO_PI * 1e3;
/// ω_l/2π = 1 MHz.
const OMEGA_LOW: f64 = TWO_PI;
/// c_s = 5 km/s in µm/µs.
const SOUND_SPEED: f64 = 5e3;

fn stamp(figure: Figure, params: &[(&str, String)]) -> Vec<(String, String)> {
    let mut meta = vec![
        ("corrnoise".to_owned(), env!("CARGO_PKG_VERSION").to_owned()),
        ("figure".to_owned(), figure.name().to_owned()),
        ("units".to_owned(), "time us unless the column says ns; rates and frequencies rad/us".to_owned()),
    ];
    meta.extend(params.iter().map(|(k, v)| ((*k).to_owned(), v.clone())));
    meta
}

pub fn generate(figure: Figure, opts: &FigureOptions) -> Result<Vec<Output>, FigureError> {
    if opts.grid.is_some() && figure != Figure::Fig3b {
        log::warn!("--grid only applies to fig3b; ignored for {figure}");
    }
    match figure {
        Figure::Fig2 => fig2(),
        Figure::Fig3a => fig3a(),
        Figure::Fig3b => fig3b(opts.grid.unwrap_or(201)),
        Figure::Fig4 => fig4(),
        Figure::Fig5 => fig5(),
        Figure::Fig6 => fig6(),
        Figure::Fig7 => fig7(),
    }
}

fn fig2() -> Result<Vec<Output>, FigureError> {
    let freqs = linspace(0.0, 10.0, 101);
    let dists = linspace(0.0, 5.0, 101);
    let mut a = Table::new(
        stamp(
            Figure::Fig2,
            &[
                ("panel", "a: S12/Sii in 2D, J0(omega d / c_s)".into()),
                ("sound_speed", format!("{SOUND_SPEED} um/us")),
                ("freq_ghz", "0..10, 101 points (omega/2pi)".into()),
                ("distance_um", "0..5, 101 points".into()),
            ],
        ),
        &["freq_ghz", "distance_um", "ratio"],
    );
    for &f in &freqs {
        for &d in &dists {
            let g = CorrelationGeometry::geometric(2, d, SOUND_SPEED);
            a.push(vec![f, d, g.factor(f * GHZ)?.re]);
        }
    }
    let mut b = Table::new(
        stamp(
            Figure::Fig2,
            &[
                ("panel", "b: S12/Sii vs distance in 1, 2, 3 dimensions".into()),
                ("sound_speed", format!("{SOUND_SPEED} um/us")),
                ("omega", format!("{GHZ} rad/us (1 GHz)")),
            ],
        ),
        &["distance_um", "ratio_1d", "ratio_2d", "ratio_3d"],
    );
    for d in linspace(0.0, 5.0, 501) {
        let mut row = vec![d];
        for dim in 1..=3 {
            row.push(CorrelationGeometry::geometric(dim, d, SOUND_SPEED).factor(GHZ)?.re);
        }
        b.push(row);
    }
    Ok(vec![("fig2a.csv".into(), a), ("fig2b.csv".into(), b)])
}

/// ħ/σ = 500 ns.
const FIG3_SIGMA: f64 = 2.0;

fn dephased_concurrence(state: NamedState, t: f64, p: &DephasingParams) -> Result<f64, FigureError> {
    Ok(entanglement::concurrence(analytic::dephased_state(&state.state(), t, p).matrix())?)
}

fn fig3a() -> Result<Vec<Output>, FigureError> {
    let theta = PI / 3.0;
    let local = DephasingParams { correlation_scale: 0.0, ..DephasingParams::new(FIG3_SIGMA, OMEGA_LOW, 0.0, false) };
    let corr = DephasingParams::new(FIG3_SIGMA, OMEGA_LOW, theta, false);
    let mut t = Table::new(
        stamp(
            Figure::Fig3a,
            &[
                ("sigma", format!("{FIG3_SIGMA} rad/us (hbar/sigma = 500 ns)")),
                ("omega_low", format!("{OMEGA_LOW} rad/us (1 MHz)")),
                ("theta", format!("{theta} rad")),
                ("regime", "classical (quantum noise zero)".into()),
                ("t_us", "0..1, 401 points".into()),
            ],
        ),
        &["t_us", "concurrence_local_psi_plus", "concurrence_local_phi_plus", "concurrence_psi_plus", "concurrence_phi_plus"],
    );
    for time in linspace(0.0, 1.0, 401) {
        t.push(vec![
            time,
            dephased_concurrence(NamedState::BellPsiPlus, time, &local)?,
            dephased_concurrence(NamedState::BellPhiPlus, time, &local)?,
            dephased_concurrence(NamedState::BellPsiPlus, time, &corr)?,
            dephased_concurrence(NamedState::BellPhiPlus, time, &corr)?,
        ]);
    }
    Ok(vec![("fig3a.csv".into(), t)])
}

fn fig3b(n_theta: usize) -> Result<Vec<Output>, FigureError> {
    if n_theta < 2 {
        return Err(FigureError::Grid(n_theta));
    }
    let n_time = 2 * n_theta - 1;
    let thetas = linspace(0.0, TWO_PI, n_theta);
    let times = linspace(0.0, 1.0, n_time);
    let rows: Vec<Vec<Vec<f64>>> = thetas
        .par_iter()
        .map(|&theta| {
            let p = DephasingParams::new(FIG3_SIGMA, OMEGA_LOW, theta, true);
            times
                .iter()
                .map(|&time| Ok(vec![theta, time, dephased_concurrence(NamedState::PlusPlus, time, &p)?]))
                .collect::<Result<Vec<_>, FigureError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        stamp(
            Figure::Fig3b,
            &[
                ("sigma", format!("{FIG3_SIGMA} rad/us (hbar/sigma = 500 ns)")),
                ("omega_low", format!("{OMEGA_LOW} rad/us (1 MHz)")),
                ("regime", "quantum".into()),
                ("initial_state", "plus_plus".into()),
                ("theta_rad", format!("0..2pi, {n_theta} points")),
                ("t_us", format!("0..1, {n_time} points")),
            ],
        ),
        &["theta_rad", "t_us", "concurrence"],
    );
    t.rows = rows.into_iter().flatten().collect();
    Ok(vec![("fig3b.csv".into(), t)])
}

/// γ↓ = 1 µs⁻¹, γ↓₁₂ = 0.9γ↓.
const FIG4_GAMMA: f64 = 1.0;
const FIG4_GAMMA_12: f64 = 0.9;

pub fn markovian_trajectory(js: f64, dm: f64, times: &[f64]) -> Result<Trajectory, DynamicsError> {
    let src = Constant::quantum_transverse(FIG4_GAMMA, FIG4_GAMMA_12, js, dm);
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
    evolve(&NamedState::UpDown.state(), &spec, times, &EvolveOptions::with_tolerance(1e-10))
}

fn fig4() -> Result<Vec<Output>, FigureError> {
    let times = linspace(0.0, 5.0, 501);
    let params = |extra: (&'static str, String)| {
        vec![
            ("gamma_down", format!("{FIG4_GAMMA} rad/us")),
            ("gamma_down_12", format!("{FIG4_GAMMA_12} rad/us")),
            ("initial_state", "up_down".into()),
            ("t_us", "0..5, 501 points".into()),
            extra,
        ]
    };

    let js_values = [0.0, 1.0, 5.0];
    let trajs: Vec<Trajectory> =
        js_values.par_iter().map(|&js| markovian_trajectory(js, 0.0, &times)).collect::<Result<_, _>>()?;
    let mut cols = vec!["t_us".to_owned()];
    for js in js_values {
        cols.push(format!("concurrence_js_{js}"));
        cols.push(format!("concurrence_js_{js}_analytic"));
    }
    cols.extend(["g_t", "g_s", "re_g_ts", "im_g_ts", "abs_gs_minus_gt"].map(String::from));
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut ex = Table::new(stamp(Figure::Fig4, &params(("panels", "b, c: symmetric exchange js in {0, 1, 5} rad/us; populations for js = 5".into()))), &names);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for (traj, &js) in trajs.iter().zip(&js_values) {
            let p = MarkovianParams { gamma_down: FIG4_GAMMA, gamma_12: FIG4_GAMMA_12, js, dm: 0.0 };
            row.push(traj.measures[i].concurrence);
            row.push(analytic::concurrence_sym_exchange(t, &p)?);
        }
        let m = &trajs[2].measures[i];
        row.extend([m.g_t, m.g_s, m.re_g_ts, m.im_g_ts, (m.g_s - m.g_t).abs()]);
        ex.push(row);
    }

    let dm_values = [0.2, 0.45, 5.0];
    let trajs: Vec<Trajectory> =
        dm_values.par_iter().map(|&dm| markovian_trajectory(0.0, dm, &times)).collect::<Result<_, _>>()?;
    let mut cols = vec!["t_us".to_owned()];
    for dm in dm_values {
        cols.push(format!("concurrence_dm_{dm}"));
        cols.push(format!("concurrence_dm_{dm}_analytic"));
        cols.push(format!("g_t_dm_{dm}"));
        cols.push(format!("g_s_dm_{dm}"));
    }
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut dm_table = Table::new(
        stamp(Figure::Fig4, &params(("panels", "d-f: DM coupling dm in {0.2, 0.45, 5} rad/us (over, critical, underdamped)".into()))),
        &names,
    );
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for (traj, &dm) in trajs.iter().zip(&dm_values) {
            let p = MarkovianParams { gamma_down: FIG4_GAMMA, gamma_12: FIG4_GAMMA_12, js: 0.0, dm };
            let m = &traj.measures[i];
            row.extend([m.concurrence, analytic::concurrence_dm(t, &p)?, m.g_t, m.g_s]);
        }
        dm_table.push(row);
    }
    Ok(vec![("fig4_exchange.csv".into(), ex), ("fig4_dm.csv".into(), dm_table)])
}

fn fig5() -> Result<Vec<Output>, FigureError> {
    let dms = linspace(0.0, 2.0, 81);
    let times = linspace(0.0, 5.0, 251);
    let critical = FIG4_GAMMA_12 / 2.0;
    let rows: Vec<Vec<Vec<f64>>> = dms
        .par_iter()
        .map(|&dm| {
            let traj = markovian_trajectory(0.0, dm * FIG4_GAMMA, &times)?;
            let p = MarkovianParams { gamma_down: FIG4_GAMMA, gamma_12: FIG4_GAMMA_12, js: 0.0, dm: dm * FIG4_GAMMA };
            times
                .iter()
                .zip(&traj.measures)
                .map(|(&t, m)| Ok(vec![dm, t, m.concurrence, analytic::concurrence_dm(t, &p)?]))
                .collect::<Result<Vec<_>, FigureError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        stamp(
            Figure::Fig5,
            &[
                ("gamma_down", format!("{FIG4_GAMMA} rad/us")),
                ("gamma_down_12", format!("{FIG4_GAMMA_12} rad/us")),
                ("initial_state", "up_down".into()),
                ("dm_over_gamma", "0..2, 81 points".into()),
                ("t_us", "0..5, 251 points".into()),
                ("critical_dm_over_gamma", format!("{} (2|dm| = gamma_down_12)", critical / FIG4_GAMMA)),
            ],
        ),
        &["dm_over_gamma", "t_us", "concurrence", "concurrence_analytic"],
    );
    t.rows = rows.into_iter().flatten().collect();
    Ok(vec![("fig5.csv".into(), t)])
}

/// ħ/σ = 100 ns.
const FIG67_SIGMA: f64 = 10.0;

fn classical_fig6() -> ClassicalOneOverF {
    ClassicalOneOverF { sigma: FIG67_SIGMA, omega_low: OMEGA_LOW, omega: GHZ, correlation_scale: 1.0 }
}

fn quantum_fig7(sigma: f64) -> QuantumOneOverF {
    QuantumOneOverF { sigma, omega_low: OMEGA_LOW, omega: GHZ, correlation_scale: 1.0 }
}

fn driven_params(extra: &[(&'static str, String)]) -> Vec<(&'static str, String)> {
    let mut v: Vec<(&'static str, String)> = vec![
        ("omega_low", format!("{OMEGA_LOW} rad/us (1 MHz)")),
        ("omega", format!("{GHZ} rad/us (1 GHz)")),
        ("correlation_scale", "1".into()),
    ];
    v.extend_from_slice(extra);
    v
}

fn numeric_concurrence(source: &dyn CoefficientSource, state: NamedState, times_us: &[f64]) -> Result<Vec<f64>, FigureError> {
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source, markovian: false };
    Ok(evolve(&state.state(), &spec, times_us, &EvolveOptions::with_tolerance(1e-9))?.concurrence())
}

fn fig6() -> Result<Vec<Output>, FigureError> {
    let src = classical_fig6();
    let t_ns = linspace(0.0, 50.0, 2001);
    let t_us: Vec<f64> = t_ns.iter().map(|t| t * 1e-3).collect();
    let product = numeric_concurrence(&src, NamedState::UpDown, &t_us)?;
    let mut t = Table::new(
        stamp(
            Figure::Fig6,
            &driven_params(&[
                ("sigma", format!("{FIG67_SIGMA} rad/us (hbar/sigma = 100 ns)")),
                ("panel", "a: rate gamma and integral Gamma; b: bell_i concurrence, inset up_down concurrence (numeric)".into()),
                ("t_ns", "0..50, 2001 points".into()),
            ]),
        ),
        &["t_ns", "gamma", "big_gamma", "concurrence_bell", "concurrence_product"],
    );
    for (i, &tu) in t_us.iter().enumerate() {
        let g = src.integrated_rate(tu);
        t.push(vec![t_ns[i], src.rate(tu), g, analytic::concurrence_classical_1f_bell(g)?, product[i]]);
    }
    Ok(vec![("fig6.csv".into(), t)])
}

/// Steady-state concurrence from the Liouvillian null space at `βΩ`, for
/// comparable local and correlated noise, starting from |↑↓⟩.
pub fn residual_null_space(beta_omega: f64) -> Result<f64, FigureError> {
    let c = Constant::thermal_transverse(1.0, 1.0, beta_omega, 0.0, 0.0).0;
    let rho = null_space_steady_state(&c, GeneratorKind::Transverse, &NamedState::UpDown.state())?;
    Ok(entanglement::concurrence(rho.matrix())?)
}

fn fig7() -> Result<Vec<Output>, FigureError> {
    let quantum = quantum_fig7(FIG67_SIGMA);
    let classical = classical_fig6();
    let t_ns = linspace(0.0, 50.0, 2001);
    let t_us: Vec<f64> = t_ns.iter().map(|t| t * 1e-3).collect();
    let classical_product = numeric_concurrence(&classical, NamedState::UpDown, &t_us)?;
    let mut main = Table::new(
        stamp(
            Figure::Fig7,
            &driven_params(&[
                ("sigma", format!("{FIG67_SIGMA} rad/us (hbar/sigma = 100 ns)")),
                ("panel", "a: gamma_down, Gamma_down, coupling J; b: bell_i concurrence with/without quantum noise; c: up_down concurrence".into()),
                ("t_ns", "0..50, 2001 points".into()),
            ]),
        ),
        &[
            "t_ns",
            "gamma_down",
            "big_gamma_down",
            "coupling_j",
            "phase_phi",
            "concurrence_bell_quantum",
            "concurrence_bell_classical",
            "concurrence_product_quantum",
            "concurrence_product_classical",
        ],
    );
    for (i, &tu) in t_us.iter().enumerate() {
        let (g, phi) = (quantum.integrated_rate(tu), quantum.phase(tu));
        main.push(vec![
            t_ns[i],
            quantum.rate(tu),
            g,
            quantum.coupling(tu),
            phi,
            analytic::concurrence_quantum_1f(g, phi, QuantumInitial::Bell)?,
            analytic::concurrence_classical_1f_bell(classical.integrated_rate(tu))?,
            analytic::concurrence_quantum_1f(g, phi, QuantumInitial::Product)?,
            classical_product[i],
        ]);
    }

    let strong_sigma = 1e3 / 3.0;
    let strong = quantum_fig7(strong_sigma);
    let mut inset_c = Table::new(
        stamp(
            Figure::Fig7,
            &driven_params(&[
                ("sigma", format!("{strong_sigma} rad/us (hbar/sigma = 3 ns)")),
                ("panel", "c inset: up_down concurrence under strong quantum noise".into()),
                ("t_ns", "0..10, 1001 points".into()),
            ]),
        ),
        &["t_ns", "big_gamma_down", "phase_phi", "concurrence_product"],
    );
    for tn in linspace(0.0, 10.0, 1001) {
        let tu = tn * 1e-3;
        let (g, phi) = (strong.integrated_rate(tu), strong.phase(tu));
        inset_c.push(vec![tn, g, phi, analytic::concurrence_quantum_1f(g, phi, QuantumInitial::Product)?]);
    }

    let betas = linspace(0.1, 10.0, 100);
    let rows: Vec<Vec<f64>> = betas
        .par_iter()
        .map(|&b| Ok(vec![b, analytic::residual_entanglement(b)?, residual_null_space(b)?]))
        .collect::<Result<_, FigureError>>()?;
    let mut inset_b = Table::new(
        stamp(
            Figure::Fig7,
            &[
                ("panel", "b inset: steady-state concurrence vs beta*Omega".into()),
                ("model", "markovian, gamma_down_12 = gamma_down, detailed balance, from up_down".into()),
                ("beta_omega", "0.1..10, 100 points".into()),
            ],
        ),
        &["beta_omega", "residual_closed_form", "residual_null_space"],
    );
    inset_b.rows = rows;
    Ok(vec![("fig7.csv".into(), main), ("fig7_inset_b.csv".into(), inset_b), ("fig7_inset_c.csv".into(), inset_c)])
}
