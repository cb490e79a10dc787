//! Cross-module property suites: analytic-vs-numeric oracles and physical
//! invariants (positivity, detailed balance, bounds), run on demand.
//!
//! Every check is a deterministic function of the seed, so the report is
//! byte-identical for a fixed seed.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use corrnoise_core::analytic::{self, DephasingParams, MarkovianParams, QuantumInitial};
use corrnoise_core::dynamics::{
    evolve, generator_apply, validate_state, DensityMatrix4, EvolveOptions, GeneratorKind, GeneratorSpec, Matrix4c,
    NamedState, StateTolerance, Trajectory,
};
use corrnoise_core::entanglement;
use corrnoise_core::noise::{self, CorrelationGeometry, NoiseRegime, SpectrumModel};
use corrnoise_core::rates::{
    self, ClassicalOneOverF, CoefficientSet, CoefficientSource, Constant, DephasingOneOverF, QuantumOneOverF,
};
use corrnoise_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::linspace;
use crate::figures::{markovian_trajectory, residual_null_space};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Invariants,
    Oracles,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "invariants" => Ok(Suite::Invariants),
            "oracles" => Ok(Suite::Oracles),
            other => Err(format!("unknown suite `{other}`; valid: all, invariants, oracles")),
        }
    }
}

/// Deliberate defects for checking that the suites notice them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// sinh → cosh (a sign flip inside sinh) in the symmetric-exchange
    /// concurrence reference.
    SymExchangeSign,
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sym-exchange-sign" => Ok(Mutation::SymExchangeSign),
            other => Err(format!("unknown mutation `{other}`; valid: sym-exchange-sign")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { suite: Suite::All, seed: 2024, mutation: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub suite: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.results.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "{:<10} {:<w$} {:<6} detail", "suite", "check", "result")?;
        for r in &self.results {
            writeln!(f, "{:<10} {:<w$} {:<6} {}", r.suite, r.name, if r.passed { "PASS" } else { "FAIL" }, r.detail)?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        write!(f, "{} checks, {} failed", self.results.len(), failed)
    }
}

type Check = fn(&mut ChaCha8Rng, &VerifyOptions) -> (bool, String);

const INVARIANTS: &[(&str, Check)] = &[
    ("state_validity", check_state_validity),
    ("generator_trace_hermiticity", check_generator),
    ("dephasing_keeps_diagonal", check_dephasing_diagonal),
    ("detailed_balance", check_detailed_balance),
    ("cross_spectrum_bound", check_cross_spectrum_bound),
    ("concurrence_bounds", check_concurrence_bounds),
    ("integrated_rates_nonnegative", check_integrated_rates),
    ("classical_noise_no_entanglement", check_classical_no_entanglement),
];

const ORACLES: &[(&str, Check)] = &[
    ("sym_exchange_closed_form", check_sym_exchange),
    ("dm_closed_form", check_dm),
    ("dephasing_closed_form", check_dephasing_closed_form),
    ("classical_1f_bell", check_classical_1f),
    ("quantum_1f", check_quantum_1f),
    ("residual_entanglement", check_residual),
    ("quantum_1f_long_time", check_long_time),
    ("ode_residuals", check_ode_residuals),
    ("rates_vs_quadrature", check_rates_quadrature),
];

pub fn run(opts: &VerifyOptions) -> Report {
    let mut plan: Vec<(&'static str, &'static str, Check)> = Vec::new();
    if opts.suite != Suite::Oracles {
        plan.extend(INVARIANTS.iter().map(|&(n, c)| ("invariants", n, c)));
    }
    if opts.suite != Suite::Invariants {
        plan.extend(ORACLES.iter().map(|&(n, c)| ("oracles", n, c)));
    }
    let results = plan
        .par_iter()
        .enumerate()
        .map(|(i, &(suite, name, check))| {
            // independent stream per check so results do not depend on order
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64 + if suite == "oracles" { 1000 } else { 0 });
            let (passed, detail) = check(&mut rng, opts);
            CheckResult { name, suite, passed, detail }
        })
        .collect();
    Report { seed: opts.seed, results }
}

fn max_abs_diff(a: &Matrix4c, b: &Matrix4c) -> f64 {
    (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Random density matrix of random rank (Ginibre ensemble).
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix4 {
    let rank = rng.random_range(1..=4);
    let g = Matrix4c::from_fn(|_, j| if j < rank { Complex64::new(gauss(rng), gauss(rng)) } else { Complex64::new(0.0, 0.0) });
    let m = g * g.adjoint();
    let tr = m.trace();
    let m = m / tr;
    // mirror to remove rounding-level anti-Hermitian parts
    DensityMatrix4::from_matrix_unchecked((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

fn random_qubit<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    let v = [Complex64::new(gauss(rng), gauss(rng)), Complex64::new(gauss(rng), gauss(rng))];
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Random pure product state |a⟩⊗|b⟩.
pub fn random_product<R: Rng>(rng: &mut R) -> DensityMatrix4 {
    let (a, b) = (random_qubit(rng), random_qubit(rng));
    DensityMatrix4::from_ket([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
}

/// A randomly drawn scenario, parameter set and initial state.
pub struct RandomCase {
    pub label: String,
    pub source: Box<dyn CoefficientSource>,
    pub kind: GeneratorKind,
    pub markovian: bool,
    pub rho0: DensityMatrix4,
    pub times: Vec<f64>,
}

impl RandomCase {
    pub fn draw<R: Rng>(rng: &mut R) -> Self {
        let rho0 = if rng.random_bool(0.8) {
            random_density(rng)
        } else {
            NamedState::ALL[rng.random_range(0..NamedState::ALL.len())].state()
        };
        let u = |rng: &mut R, lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
        match rng.random_range(0..5) {
            0 => {
                let g = u(rng, 0.1, 2.0);
                let g12 = g * u(rng, 0.0, 1.0);
                let phase = u(rng, 0.0, 2.0 * PI);
                let alpha = (-u(rng, 0.0, 5.0)).exp();
                let (js, dm) = (u(rng, -3.0, 3.0), u(rng, -3.0, 3.0));
                let src = Constant::transverse(
                    g,
                    Complex64::from_polar(g12, phase),
                    alpha * g,
                    Complex64::from_polar(alpha * g12, -phase),
                    Complex64::new(js, dm),
                );
                RandomCase {
                    label: format!("thermal markovian g={g:.3} g12={g12:.3} phase={phase:.3} alpha={alpha:.3} js={js:.3} dm={dm:.3}"),
                    source: Box::new(src),
                    kind: GeneratorKind::Transverse,
                    markovian: true,
                    rho0,
                    times: linspace(0.0, 5.0 / g, 11),
                }
            }
            1 => {
                let g = u(rng, 0.1, 2.0);
                let g12 = g * u(rng, -1.0, 1.0);
                RandomCase {
                    label: format!("classical markovian g={g:.3} g12={g12:.3}"),
                    source: Box::new(Constant::classical_transverse(g, g12)),
                    kind: GeneratorKind::Transverse,
                    markovian: true,
                    rho0,
                    times: linspace(0.0, 5.0 / g, 11),
                }
            }
            2 => {
                let src = DephasingOneOverF {
                    sigma: u(rng, 0.5, 5.0),
                    omega_low: 2.0 * PI,
                    theta: u(rng, 0.0, 2.0 * PI),
                    correlation_scale: u(rng, 0.0, 1.0),
                    regime: if rng.random_bool(0.5) { NoiseRegime::Quantum } else { NoiseRegime::Classical },
                };
                let t_max = u(rng, 0.05, 1.0);
                RandomCase {
                    label: format!("dephasing 1/f {src:?}"),
                    source: Box::new(src),
                    kind: GeneratorKind::Dephasing,
                    markovian: false,
                    rho0,
                    times: linspace(0.0, t_max, 11),
                }
            }
            k => {
                let sigma = u(rng, 1.0, 30.0);
                let omega = 2.0 * PI * u(rng, 20.0, 200.0);
                let scale = u(rng, 0.0, 1.0);
                let periods = u(rng, 2.0, 10.0);
                let times = linspace(0.0, periods * 2.0 * PI / omega, 11);
                let (label, source): (String, Box<dyn CoefficientSource>) = if k == 3 {
                    let s = ClassicalOneOverF { sigma, omega_low: 2.0 * PI, omega, correlation_scale: scale };
                    (format!("classical 1/f {s:?}"), Box::new(s))
                } else {
                    let s = QuantumOneOverF { sigma, omega_low: 2.0 * PI, omega, correlation_scale: scale };
                    (format!("quantum 1/f {s:?}"), Box::new(s))
                };
                RandomCase { label, source, kind: GeneratorKind::Transverse, markovian: false, rho0, times }
            }
        }
    }

    pub fn run(&self, tolerance: f64) -> Result<Trajectory, corrnoise_core::dynamics::DynamicsError> {
        let spec = GeneratorSpec { kind: self.kind, source: self.source.as_ref(), markovian: self.markovian };
        evolve(&self.rho0, &spec, &self.times, &EvolveOptions::with_tolerance(tolerance))
    }
}

/// Worst (hermiticity defect, trace defect, min eigenvalue) over `n` random
/// evolutions, or the first failure.
pub fn random_state_validity(seed: u64, stream: u64, n: usize) -> Result<(f64, f64, f64), String> {
    let cases: Vec<RandomCase> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (0..n).map(|_| RandomCase::draw(&mut rng)).collect()
    };
    let worst = cases
        .par_iter()
        .map(|case| {
            let traj = case.run(1e-8).map_err(|e| format!("{}: {e}", case.label))?;
            let mut w = (0.0f64, 0.0f64, f64::INFINITY);
            for s in &traj.states {
                let d = validate_state(s.matrix());
                if !d.within(&StateTolerance::default()) {
                    return Err(format!("{}: {d}", case.label));
                }
                w = (w.0.max(d.hermiticity_defect), w.1.max(d.trace_defect), w.2.min(d.min_eigenvalue));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(worst.into_iter().fold((0.0f64, 0.0f64, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.min(b.2))))
}

fn check_state_validity(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let seed = rng.random::<u64>();
    match random_state_validity(seed, 0, 300) {
        Ok((h, t, e)) => (true, format!("300 random evolutions; max hermiticity {h:.1e}, max trace {t:.1e}, min eigenvalue {e:.1e}")),
        Err(e) => (false, e),
    }
}

fn random_coefficients<R: Rng>(rng: &mut R) -> CoefficientSet {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let rate = |u: &mut dyn FnMut(f64, f64) -> f64| {
        let g = u(-1.0, 2.0);
        rates::rate_matrix(g, Complex64::from_polar(u(0.0, 1.5), u(0.0, 2.0 * PI)))
    };
    let gamma_z = rate(&mut u);
    let gamma_down = rate(&mut u);
    let gamma_up = rate(&mut u);
    CoefficientSet {
        time: 0.0,
        ising: u(-2.0, 2.0),
        exchange: Complex64::new(u(-2.0, 2.0), u(-2.0, 2.0)),
        gamma_z,
        gamma_down,
        gamma_up,
    }
}

fn check_generator(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    // trace and Hermiticity preservation hold for any Hermitian rate matrices,
    // positive or not
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let c = random_coefficients(rng);
        let rho = random_density(rng);
        for kind in [GeneratorKind::Dephasing, GeneratorKind::Transverse] {
            let d = generator_apply(rho.matrix(), &c, kind);
            worst = worst.max(d.trace().norm()).max(max_abs_diff(&d, &d.adjoint()));
        }
    }
    (worst < 1e-13, format!("max |tr L(rho)|, |L - L^dag| = {worst:.1e}"))
}

fn check_dephasing_diagonal(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let src = DephasingOneOverF {
            sigma: rng.random_range(0.5..5.0),
            omega_low: 2.0 * PI,
            theta: rng.random_range(0.0..2.0 * PI),
            correlation_scale: rng.random_range(0.0..1.0),
            regime: NoiseRegime::Quantum,
        };
        let spec = GeneratorSpec { kind: GeneratorKind::Dephasing, source: &src, markovian: false };
        let rho0 = random_density(rng);
        let traj = match evolve(&rho0, &spec, &linspace(0.0, 0.5, 11), &EvolveOptions::default()) {
            Ok(t) => t,
            Err(e) => return (false, e.to_string()),
        };
        for s in &traj.states {
            for a in 0..4 {
                worst = worst.max((s.matrix()[(a, a)] - rho0.matrix()[(a, a)]).norm());
            }
        }
    }
    (worst < 1e-10, format!("max diagonal drift {worst:.1e}"))
}

fn check_detailed_balance(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        // beyond βΩ ≈ 10 the classical/quantum split loses e^{βΩ}·ε of
        // relative accuracy in γ↑ to cancellation
        let omega = rng.random_range(10.0..5e3);
        let beta = rng.random_range(1e-3..10.0) / omega;
        let model = SpectrumModel::LinearDispersion { amplitude: rng.random_range(1e-4..1e-1), sound_speed: 5e3, beta };
        let geom = CorrelationGeometry::geometric(rng.random_range(1..=3), rng.random_range(0.0..3.0), 5e3);
        let Ok((sc, sq)) = noise::local_parts(&model, omega) else { return (false, format!("spectrum failed at {omega}")) };
        let (down, up) = rates::markovian_rates(sc.into(), sq.into());
        let Ok((c12, q12)) = noise::cross_parts(&model, &geom, omega) else { return (false, "cross spectrum failed".into()) };
        // (γ↓_12, γ↑_21) from the same cross spectrum
        let (down12, up21) = rates::markovian_rates(c12, q12);
        let ratio = (beta * omega).exp();
        worst = worst.max((down.re - ratio * up.re).abs() / down.re);
        if down12.norm() > 1e-12 * down.re {
            worst = worst.max((down12 - up21 * ratio).norm() / down.re);
        }
    }
    (worst < 1e-10, format!("max relative |gamma_down - e^(beta Omega) gamma_up| = {worst:.1e}"))
}

fn check_cross_spectrum_bound(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..3000 {
        let geom = if rng.random_bool(0.5) {
            CorrelationGeometry::geometric(rng.random_range(1..=3), rng.random_range(0.0..50.0), rng.random_range(1e2..1e4))
        } else {
            CorrelationGeometry::idealized(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..1.0))
        };
        match geom.factor(rng.random_range(-1e5..1e5)) {
            Ok(f) => worst = worst.max(f.norm() - 1.0),
            Err(e) => return (false, e.to_string()),
        }
    }
    (worst <= 1e-15, format!("max |S12|/Sii - 1 = {worst:.1e}"))
}

fn check_concurrence_bounds(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut msgs = Vec::new();
    for _ in 0..500 {
        let rho = random_density(rng);
        let Ok(c) = entanglement::concurrence(rho.matrix()) else { return (false, "concurrence failed".into()) };
        if !(-1e-12..=1.0 + 1e-12).contains(&c) {
            msgs.push(format!("C = {c}"));
        }
        let eof = entanglement::entanglement_of_formation(c).unwrap_or(f64::NAN);
        let bound = entanglement::werner_lower_bound(entanglement::singlet_fidelity(rho.matrix()));
        if !(eof >= bound - 1e-12) {
            msgs.push(format!("EoF {eof} below singlet-fidelity bound {bound}"));
        }
        let p = random_product(rng);
        let cp = entanglement::concurrence(p.matrix()).unwrap_or(f64::NAN);
        if !(cp < 1e-7) {
            msgs.push(format!("product state C = {cp}"));
        }
    }
    for s in [NamedState::BellPsiPlus, NamedState::BellPsiMinus, NamedState::BellPhiPlus, NamedState::BellPhiMinus, NamedState::BellI] {
        let c = entanglement::concurrence(s.state().matrix()).unwrap_or(f64::NAN);
        if !((c - 1.0).abs() < 1e-12) {
            msgs.push(format!("{} has C = {c}", s.name()));
        }
    }
    match msgs.first() {
        None => (true, "500 random states: 0 <= C <= 1, EoF >= H(F) bound, products separable, Bell states C = 1".into()),
        Some(m) => (false, format!("{} violations, first: {m}", msgs.len())),
    }
}

fn check_integrated_rates(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let (cl, qu) = (fig6_classical(), fig7_quantum(10.0));
    let grid = linspace(0.0, 0.05, 2000);
    let min_big = grid.iter().map(|&t| cl.integrated_rate(t).min(qu.integrated_rate(t))).fold(f64::INFINITY, f64::min);
    let neg_c = grid.iter().any(|&t| cl.rate(t) < 0.0);
    let neg_q = grid.iter().any(|&t| qu.rate(t) < 0.0);
    (
        min_big >= -1e-12 && neg_c && neg_q,
        format!("min Gamma, Gamma_down = {min_big:.1e}; negative rate intervals: classical {neg_c}, quantum {neg_q}"),
    )
}

fn check_classical_no_entanglement(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let g12 = rng.random_range(-1.0..1.0);
        let src = Constant::classical_transverse(1.0, g12);
        let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        let rho0 = if rng.random_bool(0.5) { NamedState::UpDown.state() } else { random_product(rng) };
        match evolve(&rho0, &spec, &linspace(0.0, 5.0, 101), &EvolveOptions::with_tolerance(1e-10)) {
            Ok(t) => worst = t.concurrence().into_iter().fold(worst, f64::max),
            Err(e) => return (false, e.to_string()),
        }
    }
    let src = fig6_classical();
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
    for rho0 in [NamedState::UpDown.state(), random_product(rng)] {
        match evolve(&rho0, &spec, &linspace(0.0, 0.05, 51), &EvolveOptions::with_tolerance(1e-10)) {
            Ok(t) => worst = t.concurrence().into_iter().fold(worst, f64::max),
            Err(e) => return (false, e.to_string()),
        }
    }
    (worst < 1e-8, format!("max concurrence from product states {worst:.1e}"))
}

/// Reference for the symmetric-exchange concurrence, optionally mutated.
fn sym_exchange_reference(t: f64, p: &MarkovianParams, mutation: Option<Mutation>) -> f64 {
    match mutation {
        Some(Mutation::SymExchangeSign) => {
            let x = p.gamma_12 * t;
            let s = 0.5 * (x.exp() + (-x).exp());
            let o = (2.0 * p.js * t).sin();
            (-p.gamma_down * t).exp() * (s * s + o * o).sqrt()
        }
        None => analytic::concurrence_sym_exchange(t, p).unwrap_or(f64::NAN),
    }
}

fn check_sym_exchange(_: &mut ChaCha8Rng, opts: &VerifyOptions) -> (bool, String) {
    let times = linspace(0.0, 5.0, 501);
    let mut worst = 0.0f64;
    for js in [0.0, 1.0, 5.0] {
        let traj = match markovian_trajectory(js, 0.0, &times) {
            Ok(t) => t,
            Err(e) => return (false, e.to_string()),
        };
        let p = MarkovianParams { gamma_down: 1.0, gamma_12: 0.9, js, dm: 0.0 };
        for (&t, m) in times.iter().zip(&traj.measures) {
            let d = (m.concurrence - sym_exchange_reference(t, &p, opts.mutation)).abs();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    (worst < 1e-5, format!("js in {{0,1,5}}: max |numeric - closed form| = {worst:.1e}"))
}

/// First local minimum of `c` after `t = 0` (time of the first zero of an
/// oscillating concurrence), refined by a parabola through the neighbours.
pub fn first_minimum(times: &[f64], c: &[f64]) -> Option<f64> {
    (1..c.len() - 1).find(|&i| c[i] <= c[i - 1] && c[i] < c[i + 1]).map(|i| times[i])
}

fn check_dm(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let times = linspace(0.0, 5.0, 2001);
    let mut worst = 0.0f64;
    let mut zero_msg = String::new();
    let mut ok = true;
    for dm in [0.2, 0.45, 5.0] {
        let traj = match markovian_trajectory(0.0, dm, &times) {
            Ok(t) => t,
            Err(e) => return (false, e.to_string()),
        };
        let p = MarkovianParams { gamma_down: 1.0, gamma_12: 0.9, js: 0.0, dm };
        for (&t, m) in times.iter().zip(&traj.measures) {
            worst = worst.max((m.concurrence - analytic::concurrence_dm(t, &p).unwrap_or(f64::NAN)).abs());
        }
        if let Some(expect) = analytic::first_dm_zero(&p) {
            let found = first_minimum(&times, &traj.concurrence());
            let dt = times[1] - times[0];
            let hit = found.is_some_and(|f| (f - expect).abs() <= dt);
            ok &= hit;
            zero_msg = format!("; first zero at {found:?} vs pi/omega_r = {expect:.5}");
        }
    }
    (ok && worst < 1e-5, format!("dm in {{0.2,0.45,5}}: max diff {worst:.1e}{zero_msg}"))
}

fn check_dephasing_closed_form(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let rho0 = random_density(rng);
    let times = linspace(0.0, 1.0, 21);
    let mut worst = 0.0f64;
    for quantum in [true, false] {
        for theta in [0.0, PI / 3.0, PI / 2.0, PI] {
            let p = DephasingParams::new(2.0, 2.0 * PI, theta, quantum);
            let src = DephasingOneOverF {
                sigma: 2.0,
                omega_low: 2.0 * PI,
                theta,
                correlation_scale: 1.0,
                regime: if quantum { NoiseRegime::Quantum } else { NoiseRegime::Classical },
            };
            let spec = GeneratorSpec { kind: GeneratorKind::Dephasing, source: &src, markovian: false };
            let traj = match evolve(&rho0, &spec, &times, &EvolveOptions::with_tolerance(1e-11)) {
                Ok(t) => t,
                Err(e) => return (false, e.to_string()),
            };
            for (&t, s) in times.iter().zip(&traj.states) {
                worst = worst.max(max_abs_diff(s.matrix(), analytic::dephased_state(&rho0, t, &p).matrix()));
            }
        }
    }
    (worst < 1e-8, format!("16 entries, theta in {{0, pi/3, pi/2, pi}}: max diff {worst:.1e}"))
}

pub fn fig6_classical() -> ClassicalOneOverF {
    ClassicalOneOverF { sigma: 10.0, omega_low: 2.0 * PI, omega: 2.0 * PI * 1e3, correlation_scale: 1.0 }
}

pub fn fig7_quantum(sigma: f64) -> QuantumOneOverF {
    QuantumOneOverF { sigma, omega_low: 2.0 * PI, omega: 2.0 * PI * 1e3, correlation_scale: 1.0 }
}

fn check_classical_1f(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let src = fig6_classical();
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
    let times = linspace(0.0, 0.05, 201);
    let traj = match evolve(&NamedState::BellI.state(), &spec, &times, &EvolveOptions::with_tolerance(1e-9)) {
        Ok(t) => t,
        Err(e) => return (false, e.to_string()),
    };
    let worst = times.iter().zip(&traj.measures).fold(0.0f64, |w, (&t, m)| {
        let c = analytic::concurrence_classical_1f_bell(src.integrated_rate(t)).unwrap_or(f64::NAN);
        w.max((c - m.concurrence).abs())
    });
    (worst < 1e-5, format!("bell_i, 0..50 ns: max diff {worst:.1e}"))
}

fn check_quantum_1f(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let src = fig7_quantum(1e3 / 3.0);
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
    let times = linspace(0.0, 0.01, 101);
    let mut worst = 0.0f64;
    for (state, init) in [(NamedState::BellI, QuantumInitial::Bell), (NamedState::UpDown, QuantumInitial::Product)] {
        let traj = match evolve(&state.state(), &spec, &times, &EvolveOptions::with_tolerance(1e-9)) {
            Ok(t) => t,
            Err(e) => return (false, e.to_string()),
        };
        for (&t, m) in times.iter().zip(&traj.measures) {
            let c = analytic::concurrence_quantum_1f(src.integrated_rate(t), src.phase(t), init).unwrap_or(f64::NAN);
            worst = worst.max((c - m.concurrence).abs());
        }
    }
    (worst < 1e-5, format!("bell_i and up_down, hbar/sigma = 3 ns, 0..10 ns: max diff {worst:.1e}"))
}

fn check_residual(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    let mut worst = 0.0f64;
    for b in linspace(0.1, 10.0, 100) {
        let closed = analytic::residual_entanglement(b).unwrap_or(f64::NAN);
        let oracle = residual_null_space(b).unwrap_or(f64::NAN);
        // the same quantity from fluctuation-dissipation spectra, S^C = coth(βΩ/2) S^Q
        let spectral = analytic::residual_entanglement_spectral(1.0 / (0.5 * b).tanh(), 1.0);
        worst = worst.max((closed - oracle).abs()).max((closed - spectral).abs());
    }
    (worst < 1e-4, format!("beta*Omega in [0.1, 10]: max |closed form - null space| = {worst:.1e}"))
}

/// Bell-state concurrence at `t_end` under strong quantum 1/f noise.
pub fn long_time_bell_concurrence(t_end: f64) -> Result<f64, corrnoise_core::dynamics::DynamicsError> {
    let src = fig7_quantum(1e3 / 3.0);
    let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
    let traj = evolve(&NamedState::BellI.state(), &spec, &linspace(0.0, t_end, 41), &EvolveOptions::with_tolerance(1e-9))?;
    Ok(*traj.concurrence().last().unwrap())
}

fn check_long_time(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    match long_time_bell_concurrence(0.03) {
        Ok(c) => ((c - 0.5).abs() < 1e-3, format!("bell_i at 30 ns, hbar/sigma = 3 ns: C = {c:.6}")),
        Err(e) => (false, e.to_string()),
    }
}

/// Fourth-order central differences of `y` on a uniform grid (interior points
/// `2..n-2`): returns (y, y', y'') there.
fn derivatives(y: &[f64], h: f64) -> Vec<(f64, f64, f64)> {
    (2..y.len() - 2)
        .map(|i| {
            let d1 = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
            let d2 = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2]) / (12.0 * h * h);
            (y[i], d1, d2)
        })
        .collect()
}

/// Max residual of `ÿ + 2γẏ + k·y = 0` relative to max|y|.
fn oscillator_residual(y: &[f64], h: f64, gamma: f64, k: f64) -> f64 {
    let amp = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let res = derivatives(y, h).into_iter().fold(0.0f64, |m, (v, d1, d2)| m.max((d2 + 2.0 * gamma * d1 + k * v).abs()));
    res / amp
}

/// Relative finite-difference residuals of the C_R and C_I oscillator
/// equations on a 2000-step grid over [0, 5] µs, for 𝒥_s-only and DM-only
/// parameters: `[(label, residual)]`.
pub fn ode_residuals() -> Result<Vec<(String, f64)>, corrnoise_core::dynamics::DynamicsError> {
    let times = linspace(0.0, 5.0, 2001);
    let h = times[1] - times[0];
    let (g, g12) = (1.0, 0.9);
    let mut out = Vec::new();
    for js in [1.0, 5.0] {
        let traj = markovian_trajectory(js, 0.0, &times)?;
        let cr: Vec<f64> = traj.measures.iter().map(|m| m.c_r()).collect();
        let ci: Vec<f64> = traj.measures.iter().map(|m| m.c_i()).collect();
        out.push((format!("C_R js={js}"), oscillator_residual(&cr, h, g, g * g - g12 * g12)));
        out.push((format!("C_I js={js}"), oscillator_residual(&ci, h, g, g * g + 4.0 * js * js)));
    }
    for dm in [0.2, 0.45, 5.0] {
        let traj = markovian_trajectory(0.0, dm, &times)?;
        let cr: Vec<f64> = traj.measures.iter().map(|m| m.c_r()).collect();
        out.push((format!("C_R dm={dm}"), oscillator_residual(&cr, h, g, g * g - g12 * g12 + 4.0 * dm * dm)));
    }
    Ok(out)
}

fn check_ode_residuals(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    match ode_residuals() {
        Ok(r) => {
            let (label, worst) = r.into_iter().fold((String::new(), 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
            (worst < 1e-4, format!("max relative residual {worst:.1e} ({label})"))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn check_rates_quadrature(_: &mut ChaCha8Rng, _: &VerifyOptions) -> (bool, String) {
    use corrnoise_core::rates::{NoiseKind, QuadratureOptions, SpectralNoise};
    let model = SpectrumModel::OneOverF { sigma: 10.0, omega_low: 2.0 * PI, regime: NoiseRegime::Quantum };
    let omega = 2.0 * PI * 1e3;
    let noise = SpectralNoise {
        model,
        geometry: CorrelationGeometry::idealized(0.0, 1.0),
        omega,
        kind: NoiseKind::Transverse,
        options: QuadratureOptions::default(),
    };
    let closed = fig7_quantum(10.0);
    let times = linspace(1e-4, 2e-3, 8);
    let mut rows = Vec::new();
    for &t in &times {
        match noise.try_coefficients(t) {
            Ok(c) => rows.push((closed.rate(t), c.gamma_down[(0, 0)].re, closed.coupling(t), c.exchange.re)),
            Err(e) => return (false, e.to_string()),
        }
    }
    let scale = |f: fn(&(f64, f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0f64, |m, v| m.max(v.abs()));
    let (sg, sj) = (scale(|r| r.0), scale(|r| r.2));
    let worst = rows.iter().fold(0.0f64, |m, r| m.max((r.0 - r.1).abs() / sg).max((r.2 - r.3).abs() / sj));
    let mut detail = String::new();
    let _ = write!(detail, "quantum 1/f gamma_down and J, 0.1..2 ns: max deviation {worst:.1e} of peak");
    (worst < 1e-2, detail)
}
