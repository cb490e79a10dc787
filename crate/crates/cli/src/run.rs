//! `simulate` and `rates`: evolve a configured scenario, or tabulate its
//! coefficients.

use corrnoise_core::dynamics::{evolve, DynamicsError, EvolveOptions, GeneratorSpec, Trajectory};
use corrnoise_core::rates::CoefficientSet;

use crate::config::{NoiseSpec, RunConfig};
use crate::output::Table;

pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, DynamicsError> {
    let source = cfg.source(false);
    let spec = GeneratorSpec { kind: cfg.kind(), source: source.as_ref(), markovian: cfg.markovian() };
    evolve(&cfg.initial_state.state(), &spec, &cfg.times(), &EvolveOptions::with_tolerance(cfg.tolerance))
}

pub fn trajectory_table(cfg: &RunConfig, traj: &Trajectory) -> Table {
    let mut meta = vec![("corrnoise".to_owned(), env!("CARGO_PKG_VERSION").to_owned())];
    meta.extend(cfg.describe());
    meta.push(("frame_phase".to_owned(), format!("{} rad", traj.frame_phase)));
    meta.push(("step".to_owned(), format!("{} us", traj.step)));
    Table::from_trajectory(traj, &cfg.outputs, meta)
}

pub const COEFFICIENT_COLUMNS: [&str; 13] = [
    "t_us",
    "ising_coupling",
    "gamma_z",
    "gamma_z_12_re",
    "gamma_z_12_im",
    "gamma_down",
    "gamma_down_12_re",
    "gamma_down_12_im",
    "gamma_up",
    "gamma_up_12_re",
    "gamma_up_12_im",
    "exchange_re",
    "exchange_im",
];

pub fn coefficient_row(t: f64, c: &CoefficientSet) -> Vec<f64> {
    vec![
        t,
        c.ising,
        c.gamma_z[(0, 0)].re,
        c.gamma_z[(0, 1)].re,
        c.gamma_z[(0, 1)].im,
        c.gamma_down[(0, 0)].re,
        c.gamma_down[(0, 1)].re,
        c.gamma_down[(0, 1)].im,
        c.gamma_up[(0, 0)].re,
        c.gamma_up[(0, 1)].re,
        c.gamma_up[(0, 1)].im,
        c.exchange.re,
        c.exchange.im,
    ]
}

#[derive(Debug, thiserror::Error)]
pub enum RatesError {
    #[error("coefficients are not finite at t = {0} us (quadrature failure, see log)")]
    NonFinite(f64),
    #[error("this configuration has no Markovian limit")]
    NoMarkovianLimit,
}

/// Coefficients at the requested times. Markovian scenarios report their
/// time-independent limit; `generic` evaluates 1/f scenarios by quadrature.
pub fn rates_at(cfg: &RunConfig, times: &[f64], generic: bool) -> Result<Table, RatesError> {
    let source = cfg.source(generic);
    let mut meta = vec![("corrnoise".to_owned(), env!("CARGO_PKG_VERSION").to_owned())];
    meta.extend(cfg.describe());
    meta.push((
        "method".to_owned(),
        match (&cfg.noise, cfg.markovian(), generic) {
            (NoiseSpec::Rates(_), _, _) => "direct",
            (_, true, _) => "markovian limit of spectrum",
            (_, false, true) => "generic quadrature",
            (_, false, false) => "closed form",
        }
        .to_owned(),
    ));
    let mut table = Table::new(meta, &COEFFICIENT_COLUMNS);
    let frozen = if cfg.markovian() { Some(source.asymptotic().ok_or(RatesError::NoMarkovianLimit)?) } else { None };
    for &t in times {
        let c = frozen.unwrap_or_else(|| source.coefficients(t));
        let row = coefficient_row(t, &c);
        if row.iter().skip(1).any(|v| !v.is_finite()) {
            return Err(RatesError::NonFinite(t));
        }
        table.push(row);
    }
    Ok(table)
}
