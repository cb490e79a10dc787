//! Two-qubit density matrices and their evolution under the dephasing and
//! transverse TCL generators.
//!
//! Index `a = 2q₁ + q₂` with `q = 0` for ↑, so the basis is
//! (↑↑, ↑↓, ↓↑, ↓↓). Generators act in the interaction picture; populations
//! and concurrence are frame independent.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{Matrix4, SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::entanglement::{self, EntanglementError, TsMeasures};
use crate::rates::{CoefficientSet, CoefficientSource};

pub type Matrix4c = Matrix4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid state at t = {time}: {diagnostics}")]
    InvalidState { time: f64, diagnostics: StateDiagnostics },
    #[error("step halving did not converge after {halvings} halvings (difference {difference:e}, step {step:e})")]
    NotConverged { halvings: u32, difference: f64, step: f64 },
    #[error("non-finite coefficients at t = {0}")]
    Coefficients(f64),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("invalid input: {0}")]
    Input(&'static str),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl fmt::Display for StateDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

/// Acceptance thresholds for a physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        Self { hermiticity: 1e-12, trace: 1e-10, min_eigenvalue: -1e-8 }
    }
}

impl StateDiagnostics {
    pub fn within(&self, tol: &StateTolerance) -> bool {
        self.hermiticity_defect <= tol.hermiticity
            && self.trace_defect <= tol.trace
            && self.min_eigenvalue >= tol.min_eigenvalue
    }
}

/// Hermiticity defect, trace defect and smallest eigenvalue (of the Hermitian part).
pub fn validate_state(rho: &Matrix4c) -> StateDiagnostics {
    let hermiticity_defect = (rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let trace_defect = (rho.trace() - Complex64::from(1.0)).norm();
    let h = (rho + rho.adjoint()) * Complex64::from(0.5);
    let min_eigenvalue = SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    StateDiagnostics { hermiticity_defect, trace_defect, min_eigenvalue }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4c);

impl DensityMatrix4 {
    /// Validates against the default tolerances.
    pub fn new(m: Matrix4c) -> Result<Self, DynamicsError> {
        let d = validate_state(&m);
        if !d.within(&StateTolerance::default()) {
            return Err(DynamicsError::InvalidState { time: 0.0, diagnostics: d });
        }
        Ok(Self(m))
    }

    pub fn from_matrix_unchecked(m: Matrix4c) -> Self {
        Self(m)
    }

    pub fn from_ket(v: [Complex64; 4]) -> Self {
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        Self(Matrix4::from_fn(|i, j| v[i] * v[j].conj() / (norm * norm)))
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * Complex64::from(0.25))
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn into_inner(self) -> Matrix4c {
        self.0
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        validate_state(&self.0)
    }

    pub fn measures(&self) -> Result<Measures, EntanglementError> {
        Measures::of(&self.0)
    }
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    UpUp,
    UpDown,
    DownUp,
    DownDown,
    /// (|↑↓⟩ + |↓↑⟩)/√2, the triplet |T⟩.
    BellPsiPlus,
    /// (|↑↓⟩ − |↓↑⟩)/√2, the singlet |S⟩.
    BellPsiMinus,
    BellPhiPlus,
    BellPhiMinus,
    /// (|↑↓⟩ + i|↓↑⟩)/√2.
    BellI,
    /// |+⟩|+⟩ with |+⟩ = (|↑⟩ + |↓⟩)/√2.
    PlusPlus,
    MaximallyMixed,
}

impl NamedState {
    pub const ALL: [NamedState; 11] = [
        NamedState::UpUp,
        NamedState::UpDown,
        NamedState::DownUp,
        NamedState::DownDown,
        NamedState::BellPsiPlus,
        NamedState::BellPsiMinus,
        NamedState::BellPhiPlus,
        NamedState::BellPhiMinus,
        NamedState::BellI,
        NamedState::PlusPlus,
        NamedState::MaximallyMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::UpUp => "up_up",
            NamedState::UpDown => "up_down",
            NamedState::DownUp => "down_up",
            NamedState::DownDown => "down_down",
            NamedState::BellPsiPlus => "bell_psi_plus",
            NamedState::BellPsiMinus => "bell_psi_minus",
            NamedState::BellPhiPlus => "bell_phi_plus",
            NamedState::BellPhiMinus => "bell_phi_minus",
            NamedState::BellI => "bell_i",
            NamedState::PlusPlus => "plus_plus",
            NamedState::MaximallyMixed => "maximally_mixed",
        }
    }

    pub fn state(self) -> DensityMatrix4 {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::from(x);
        let ket = match self {
            NamedState::UpUp => [r(1.0), ZERO, ZERO, ZERO],
            NamedState::UpDown => [ZERO, r(1.0), ZERO, ZERO],
            NamedState::DownUp => [ZERO, ZERO, r(1.0), ZERO],
            NamedState::DownDown => [ZERO, ZERO, ZERO, r(1.0)],
            NamedState::BellPsiPlus => [ZERO, r(h), r(h), ZERO],
            NamedState::BellPsiMinus => [ZERO, r(h), r(-h), ZERO],
            NamedState::BellPhiPlus => [r(h), ZERO, ZERO, r(h)],
            NamedState::BellPhiMinus => [r(h), ZERO, ZERO, r(-h)],
            NamedState::BellI => [ZERO, r(h), Complex64::new(0.0, h), ZERO],
            NamedState::PlusPlus => [r(0.5); 4],
            NamedState::MaximallyMixed => return DensityMatrix4::maximally_mixed(),
        };
        DensityMatrix4::from_ket(ket)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown state `{0}`; valid names: up_up, up_down, down_up, down_down, bell_psi_plus, bell_psi_minus, bell_phi_plus, bell_phi_minus, bell_i, plus_plus, maximally_mixed")]
pub struct UnknownState(pub alloc::string::String);

impl FromStr for NamedState {
    type Err = UnknownState;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedState::ALL
            .iter()
            .copied()
            .find(|n| n.name() == s)
            .ok_or_else(|| UnknownState(s.into()))
    }
}

/// Per-time observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub concurrence: f64,
    pub g_t: f64,
    pub g_s: f64,
    pub re_g_ts: f64,
    pub im_g_ts: f64,
    pub g11: f64,
    pub g44: f64,
}

impl Measures {
    pub fn of(rho: &Matrix4c) -> Result<Self, EntanglementError> {
        let ts = TsMeasures::of(rho);
        Ok(Self {
            concurrence: entanglement::concurrence(rho)?,
            g_t: ts.g_t,
            g_s: ts.g_s,
            re_g_ts: ts.re_g_ts,
            im_g_ts: ts.im_g_ts,
            g11: ts.g11,
            g44: ts.g44,
        })
    }

    /// C_R = G_s − G_t.
    pub fn c_r(&self) -> f64 {
        self.g_s - self.g_t
    }

    /// C_I = 2 Im G_ts.
    pub fn c_i(&self) -> f64 {
        2.0 * self.im_g_ts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Ising coupling plus σᶻ dissipators.
    Dephasing,
    /// Exchange coupling plus σ± dissipators.
    Transverse,
}

/// Generator kind plus a source of coefficients.
#[derive(Clone, Copy)]
pub struct GeneratorSpec<'a> {
    pub kind: GeneratorKind,
    pub source: &'a dyn CoefficientSource,
    /// Freeze the coefficients at their t → ∞ values.
    pub markovian: bool,
}

impl fmt::Debug for GeneratorSpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSpec").field("kind", &self.kind).field("markovian", &self.markovian).finish()
    }
}

// --- sparse single-qubit ladder operators --------------------------------
//
// Every operator used below is a partial permutation with unit entries, so it
// is stored as at most two (row, column) pairs.

#[derive(Clone, Copy)]
struct Op {
    n: usize,
    e: [(usize, usize); 2],
}

const fn lower(qubit: usize) -> Op {
    if qubit == 0 {
        Op { n: 2, e: [(2, 0), (3, 1)] }
    } else {
        Op { n: 2, e: [(1, 0), (3, 2)] }
    }
}

const fn adjoint(a: Op) -> Op {
    Op { n: a.n, e: [(a.e[0].1, a.e[0].0), (a.e[1].1, a.e[1].0)] }
}

const fn compose(a: Op, b: Op) -> Op {
    let mut out = Op { n: 0, e: [(0, 0); 2] };
    let mut i = 0;
    while i < a.n {
        let mut j = 0;
        while j < b.n {
            if a.e[i].1 == b.e[j].0 {
                out.e[out.n] = (a.e[i].0, b.e[j].1);
                out.n += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
}

struct Ladder {
    down: [[(Op, Op, Op); 2]; 2],
    up: [[(Op, Op, Op); 2]; 2],
}

/// `(A, B, P)` per (i, j) so that the dissipator is `A ρ B − ½{P, ρ}`.
const LADDER: Ladder = {
    let m = [lower(0), lower(1)];
    let p = [adjoint(m[0]), adjoint(m[1])];
    let mut down = [[(m[0], p[0], m[0]); 2]; 2];
    let mut up = down;
    let mut i = 0;
    while i < 2 {
        let mut j = 0;
        while j < 2 {
            down[i][j] = (m[j], p[i], compose(p[i], m[j]));
            up[i][j] = (p[j], m[i], compose(m[i], p[j]));
            j += 1;
        }
        i += 1;
    }
    Ladder { down, up }
};

fn add_dissipator(out: &mut Matrix4c, rho: &Matrix4c, g: Complex64, (a, b, p): (Op, Op, Op)) {
    if g == ZERO {
        return;
    }
    for &(r1, c1) in &a.e[..a.n] {
        for &(r2, c2) in &b.e[..b.n] {
            out[(r1, c2)] += g * rho[(c1, r2)];
        }
    }
    let half = g * 0.5;
    for &(r, c) in &p.e[..p.n] {
        for k in 0..4 {
            out[(r, k)] -= half * rho[(c, k)];
            out[(k, c)] -= half * rho[(k, r)];
        }
    }
}

/// z-eigenvalues of (qubit 1, qubit 2) for basis index `a`.
fn z_signs(a: usize) -> [f64; 2] {
    [if a & 2 == 0 { 1.0 } else { -1.0 }, if a & 1 == 0 { 1.0 } else { -1.0 }]
}

/// Element-wise rates of the dephasing generator: `ρ̇_ab = κ_ab ρ_ab`.
pub fn dephasing_kernel(c: &CoefficientSet) -> Matrix4c {
    Matrix4::from_fn(|a, b| {
        let (za, zb) = (z_signs(a), z_signs(b));
        let (pa, pb) = (za[0] * za[1], zb[0] * zb[1]);
        let mut k = -I * (c.ising * (pa - pb));
        for i in 0..2 {
            for j in 0..2 {
                let w = za[j] * zb[i] - 0.5 * (za[i] * za[j] + zb[i] * zb[j]);
                k += c.gamma_z[(i, j)] * w;
            }
        }
        k
    })
}

fn apply_raw(rho: &Matrix4c, c: &CoefficientSet, kind: GeneratorKind) -> Matrix4c {
    match kind {
        GeneratorKind::Dephasing => dephasing_kernel(c).component_mul(rho),
        GeneratorKind::Transverse => {
            let mut out = Matrix4::zeros();
            // −i[H, ρ] with H = 𝒥|↑↓⟩⟨↓↑| + h.c.
            for (r, col, h) in [(1usize, 2usize, c.exchange), (2, 1, c.exchange.conj())] {
                if h == ZERO {
                    continue;
                }
                for k in 0..4 {
                    out[(r, k)] -= I * h * rho[(col, k)];
                    out[(k, col)] += I * h * rho[(k, r)];
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    add_dissipator(&mut out, rho, c.gamma_down[(i, j)], LADDER.down[i][j]);
                    add_dissipator(&mut out, rho, c.gamma_up[(i, j)], LADDER.up[i][j]);
                }
            }
            out
        }
    }
}

/// `dρ/dt` for a Hermitian `ρ`; the result is made exactly Hermitian.
pub fn generator_apply(rho: &Matrix4c, c: &CoefficientSet, kind: GeneratorKind) -> Matrix4c {
    let mut out = apply_raw(rho, c, kind);
    for i in 0..4 {
        out[(i, i)].im = 0.0;
        for j in (i + 1)..4 {
            out[(j, i)] = out[(i, j)].conj();
        }
    }
    out
}

/// Liouvillian on column-stacked `vec(ρ)`.
pub fn liouvillian(c: &CoefficientSet, kind: GeneratorKind) -> SMatrix<Complex64, 16, 16> {
    let mut l = SMatrix::<Complex64, 16, 16>::zeros();
    for col in 0..16 {
        let mut e = Matrix4::zeros();
        e[(col % 4, col / 4)] = Complex64::from(1.0);
        let image = apply_raw(&e, c, kind);
        for row in 0..16 {
            l[(row, col)] = image[(row % 4, row / 4)];
        }
    }
    l
}

/// Qubit-2 rotation diag(e^{iφ/2}, e^{−iφ/2}) applied as `WρW†`.
fn rotate_qubit2(rho: &Matrix4c, phi: f64) -> Matrix4c {
    let w = |a: usize| Complex64::from_polar(1.0, if a & 1 == 0 { 0.5 * phi } else { -0.5 * phi });
    Matrix4::from_fn(|a, b| w(a) * rho[(a, b)] * w(b).conj())
}

/// Coefficients seen in the frame `WρW†`: the correlated decay becomes real.
fn rotate_coefficients(c: &CoefficientSet, phi: f64) -> CoefficientSet {
    let ph = Complex64::from_polar(1.0, -phi);
    let mut out = *c;
    out.gamma_down[(0, 1)] *= ph;
    out.gamma_down[(1, 0)] *= ph.conj();
    out.gamma_up[(0, 1)] *= ph.conj();
    out.gamma_up[(1, 0)] *= ph;
    out.exchange *= ph;
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Max-abs difference between successive step halvings.
    pub tolerance: f64,
    pub max_halvings: u32,
    /// Overrides the automatic initial step.
    pub initial_step: Option<f64>,
    pub state_tolerance: StateTolerance,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_halvings: 12, initial_step: None, state_tolerance: StateTolerance::default() }
    }
}

impl EvolveOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix4>,
    pub coefficients: Vec<CoefficientSet>,
    pub measures: Vec<Measures>,
    /// Qubit-2 rotation applied to make the correlated decay real (radians).
    pub frame_phase: f64,
    /// Accepted internal step.
    pub step: f64,
    pub halvings: u32,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn concurrence(&self) -> Vec<f64> {
        self.measures.iter().map(|m| m.concurrence).collect()
    }
}

enum Coefficients<'a> {
    Frozen(CoefficientSet),
    Live(&'a dyn CoefficientSource),
}

impl Coefficients<'_> {
    fn at(&self, t: f64) -> CoefficientSet {
        match self {
            Coefficients::Frozen(c) => CoefficientSet { time: t, ..*c },
            Coefficients::Live(s) => s.coefficients(t),
        }
    }
}

fn finite(c: &CoefficientSet) -> bool {
    c.ising.is_finite()
        && c.exchange.re.is_finite()
        && c.exchange.im.is_finite()
        && [c.gamma_z, c.gamma_down, c.gamma_up].iter().all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
}

fn rk4_run(
    rho0: &Matrix4c,
    coeffs: &Coefficients<'_>,
    kind: GeneratorKind,
    times: &[f64],
    h_target: f64,
) -> Result<Vec<Matrix4c>, DynamicsError> {
    let mut out = Vec::with_capacity(times.len());
    let mut rho = *rho0;
    out.push(rho);
    let mut c_start = coeffs.at(times[0]);
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let n = libm::ceil(span / h_target).max(1.0) as usize;
        let h = span / n as f64;
        for k in 0..n {
            let t = w[0] + k as f64 * h;
            let c_mid = coeffs.at(t + 0.5 * h);
            let c_end = coeffs.at(if k + 1 == n { w[1] } else { t + h });
            if !finite(&c_mid) || !finite(&c_end) {
                return Err(DynamicsError::Coefficients(t));
            }
            let k1 = apply_raw(&rho, &c_start, kind);
            let k2 = apply_raw(&(rho + k1 * Complex64::from(0.5 * h)), &c_mid, kind);
            let k3 = apply_raw(&(rho + k2 * Complex64::from(0.5 * h)), &c_mid, kind);
            let k4 = apply_raw(&(rho + k3 * Complex64::from(h)), &c_end, kind);
            rho += (k1 + (k2 + k3) * Complex64::from(2.0) + k4) * Complex64::from(h / 6.0);
            // the exact flow preserves Hermiticity; remove round-off drift
            for i in 0..4 {
                rho[(i, i)].im = 0.0;
                for j in (i + 1)..4 {
                    rho[(j, i)] = rho[(i, j)].conj();
                }
            }
            c_start = c_end;
        }
        out.push(rho);
    }
    Ok(out)
}

fn max_difference(a: &[Matrix4c], b: &[Matrix4c]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| (x - y).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Initial RK4 step: `min(1/(50·max rate), 1/(50·max coupling), span/1000, 1/(8·bandwidth))`.
fn initial_step(coeffs: &Coefficients<'_>, source: &dyn CoefficientSource, times: &[f64]) -> f64 {
    let span = times[times.len() - 1] - times[0];
    let stride = (times.len() / 200).max(1);
    let (mut rate, mut coupling) = (0.0f64, 0.0f64);
    for (k, &t) in times.iter().enumerate() {
        if k % stride != 0 && k + 1 != times.len() {
            continue;
        }
        let c = coeffs.at(t);
        rate = rate.max(c.max_rate());
        coupling = coupling.max(c.max_coupling());
    }
    let mut h = span / 1000.0;
    if rate > 0.0 {
        h = h.min(1.0 / (50.0 * rate));
    }
    if coupling > 0.0 {
        h = h.min(1.0 / (50.0 * coupling));
    }
    if let Coefficients::Live(_) = coeffs {
        let band = source.bandwidth();
        if band > 0.0 {
            h = h.min(1.0 / (8.0 * band));
        }
    }
    h
}

/// Integrates the generator over `times` (output grid, strictly increasing)
/// with classical RK4, halving the step until successive trajectories agree
/// to `opts.tolerance` in max-abs over all entries and output times.
pub fn evolve(
    rho0: &DensityMatrix4,
    spec: &GeneratorSpec<'_>,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory, DynamicsError> {
    if times.len() < 2 {
        return Err(DynamicsError::Input("time grid needs at least two points"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
        return Err(DynamicsError::Input("time grid must be finite and strictly increasing"));
    }
    if !(opts.tolerance > 0.0) {
        return Err(DynamicsError::Input("tolerance must be positive"));
    }
    let d0 = rho0.diagnostics();
    if !d0.within(&opts.state_tolerance) {
        return Err(DynamicsError::InvalidState { time: times[0], diagnostics: d0 });
    }

    let mut frame_phase = 0.0;
    let coeffs = if spec.markovian {
        let mut c = spec.source.asymptotic().ok_or(DynamicsError::Unsupported("source has no Markovian limit"))?;
        if !finite(&c) {
            return Err(DynamicsError::Coefficients(f64::INFINITY));
        }
        if spec.kind == GeneratorKind::Transverse {
            let (local, corr) = (c.gamma_down[(0, 0)].re, c.gamma_down[(0, 1)]);
            if corr.norm() > local * (1.0 + 1e-12) {
                return Err(DynamicsError::Input("correlated decay exceeds local decay"));
            }
            if corr.norm() > 0.0 && corr.arg() != 0.0 {
                frame_phase = corr.arg();
                c = rotate_coefficients(&c, frame_phase);
                log::debug!("absorbed correlated-decay phase {frame_phase} into qubit 2");
            }
        }
        Coefficients::Frozen(c)
    } else {
        Coefficients::Live(spec.source)
    };
    let start = if frame_phase != 0.0 { rotate_qubit2(rho0.matrix(), frame_phase) } else { *rho0.matrix() };

    let mut h = match opts.initial_step {
        Some(h) if h > 0.0 => h,
        Some(_) => return Err(DynamicsError::Input("initial step must be positive")),
        None => initial_step(&coeffs, spec.source, times),
    };
    let mut coarse = rk4_run(&start, &coeffs, spec.kind, times, h)?;
    let mut halvings = 0;
    let states = loop {
        h *= 0.5;
        halvings += 1;
        let fine = rk4_run(&start, &coeffs, spec.kind, times, h)?;
        let diff = max_difference(&coarse, &fine);
        if diff < opts.tolerance {
            break fine;
        }
        if halvings >= opts.max_halvings {
            return Err(DynamicsError::NotConverged { halvings, difference: diff, step: h });
        }
        coarse = fine;
    };

    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        coefficients: Vec::with_capacity(times.len()),
        measures: Vec::with_capacity(times.len()),
        frame_phase,
        step: h,
        halvings,
    };
    for (&t, m) in times.iter().zip(states) {
        let m = if frame_phase != 0.0 { rotate_qubit2(&m, -frame_phase) } else { m };
        let d = validate_state(&m);
        if !d.within(&opts.state_tolerance) {
            return Err(DynamicsError::InvalidState { time: t, diagnostics: d });
        }
        let mut c = coeffs.at(t);
        if frame_phase != 0.0 {
            c = rotate_coefficients(&c, -frame_phase);
        }
        traj.measures.push(Measures::of(&m)?);
        traj.states.push(DensityMatrix4(m));
        traj.coefficients.push(c);
    }
    Ok(traj)
}

/// Thermal steady state of the comparable-noise Markovian model:
/// `G_s = 1/2`, `G₁₁ : G_t : G₄₄ = α² : α : 1` with α = e^{−βΩ}.
pub fn thermal_steady_state(beta_omega: f64) -> Result<DensityMatrix4, DynamicsError> {
    if !(beta_omega >= 0.0) {
        return Err(DynamicsError::Input("βΩ must be non-negative"));
    }
    let alpha = libm::exp(-beta_omega);
    let g44 = 0.5 / (1.0 + alpha + alpha * alpha);
    let (g_t, g_s, g11) = (alpha * g44, 0.5, alpha * alpha * g44);
    let mut m = Matrix4::zeros();
    m[(0, 0)] = Complex64::from(g11);
    m[(3, 3)] = Complex64::from(g44);
    m[(1, 1)] = Complex64::from(0.5 * (g_t + g_s));
    m[(2, 2)] = Complex64::from(0.5 * (g_t + g_s));
    m[(1, 2)] = Complex64::from(0.5 * (g_t - g_s));
    m[(2, 1)] = Complex64::from(0.5 * (g_t - g_s));
    Ok(DensityMatrix4(m))
}

/// Closed-form steady state for a Markovian transverse generator with
/// `γ↓₁₂ = γ↓`, `γ↑ = e^{−βΩ}γ↓`, no DM term, from the family of initial
/// states with `G_s = 1/2`.
pub fn steady_state(spec: &GeneratorSpec<'_>, beta_omega: f64) -> Result<DensityMatrix4, DynamicsError> {
    if !spec.markovian || spec.kind != GeneratorKind::Transverse {
        return Err(DynamicsError::Unsupported("steady state requires a Markovian transverse generator"));
    }
    let c = spec.source.asymptotic().ok_or(DynamicsError::Unsupported("source has no Markovian limit"))?;
    let down = c.gamma_down[(0, 0)].re;
    let alpha = libm::exp(-beta_omega);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * down.abs().max(1e-300);
    if !close(c.gamma_down[(0, 1)].norm(), down) {
        return Err(DynamicsError::Unsupported("closed form requires γ↓₁₂ = γ↓"));
    }
    if !close(c.gamma_up[(0, 0)].re, alpha * down) || !close(c.gamma_up[(0, 1)].norm(), alpha * down) {
        return Err(DynamicsError::Unsupported("rates do not obey detailed balance at this βΩ"));
    }
    if c.exchange.im.abs() > 1e-12 * down {
        return Err(DynamicsError::Unsupported("closed form requires 𝒟 = 0"));
    }
    thermal_steady_state(beta_omega)
}

/// `lim_{t→∞} e^{ℒt}ρ₀` from the spectral projector onto the kernel of ℒ,
/// built from right and left null vectors (singular values below
/// `1e-10·‖ℒ‖`). Assumes all other eigenvalues have negative real part.
pub fn null_space_steady_state(c: &CoefficientSet, kind: GeneratorKind, rho0: &DensityMatrix4) -> Result<DensityMatrix4, DynamicsError> {
    let l = liouvillian(c, kind);
    let right = null_vectors(&l)?;
    let left = null_vectors(&l.adjoint())?;
    if right.len() != left.len() || right.is_empty() {
        return Err(DynamicsError::Unsupported("kernel of the Liouvillian is not semisimple"));
    }
    let k = right.len();
    let r = nalgebra::DMatrix::from_fn(16, k, |i, j| right[j][i]);
    let lm = nalgebra::DMatrix::from_fn(16, k, |i, j| left[j][i]);
    let gram = lm.adjoint() * &r;
    let inv = gram.try_inverse().ok_or(DynamicsError::Unsupported("degenerate null-space pairing"))?;
    let v0 = nalgebra::DVector::from_fn(16, |i, _| rho0.matrix()[(i % 4, i / 4)]);
    let v = r * (inv * (lm.adjoint() * v0));
    let m = Matrix4::from_fn(|i, j| v[i + 4 * j]);
    let m = (m + m.adjoint()) * Complex64::from(0.5);
    let tr = m.trace();
    Ok(DensityMatrix4(m / tr))
}

fn null_vectors(l: &SMatrix<Complex64, 16, 16>) -> Result<Vec<SVector<Complex64, 16>>, DynamicsError> {
    // ℒ v = 0 ⇔ v in the span of right singular vectors with σ ≈ 0
    let svd = l.svd(false, true);
    let vt = svd.v_t.ok_or(DynamicsError::Unsupported("SVD failed"))?;
    let top = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= 1e-10 * top.max(1e-300) {
            out.push(vt.row(k).adjoint());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{Constant, DephasingOneOverF, rate_matrix};
    use crate::noise::NoiseRegime;
    use crate::testutil::{c, random_density};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_lowering(q: usize) -> Matrix4c {
        let mut m = Matrix4::zeros();
        for &(r, col) in &lower(q).e {
            m[(r, col)] = c(1.0, 0.0);
        }
        m
    }

    /// Dense reference generator written directly from the operator form.
    fn dense_generator(rho: &Matrix4c, co: &CoefficientSet, kind: GeneratorKind) -> Matrix4c {
        let anti = |p: &Matrix4c| p * rho + rho * p;
        match kind {
            GeneratorKind::Dephasing => {
                let z = [
                    Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0))),
                    Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0))),
                ];
                let h = z[0] * z[1] * c(co.ising, 0.0);
                let mut out = (h * rho - rho * h) * c(0.0, -1.0);
                for i in 0..2 {
                    for j in 0..2 {
                        out += (z[j] * rho * z[i] - anti(&(z[i] * z[j])) * c(0.5, 0.0)) * co.gamma_z[(i, j)];
                    }
                }
                out
            }
            GeneratorKind::Transverse => {
                let m = [dense_lowering(0), dense_lowering(1)];
                let p = [m[0].adjoint(), m[1].adjoint()];
                let h = p[0] * m[1] * co.exchange + m[0] * p[1] * co.exchange.conj();
                let mut out = (h * rho - rho * h) * c(0.0, -1.0);
                for i in 0..2 {
                    for j in 0..2 {
                        out += (m[j] * rho * p[i] - anti(&(p[i] * m[j])) * c(0.5, 0.0)) * co.gamma_down[(i, j)];
                        out += (p[j] * rho * m[i] - anti(&(m[i] * p[j])) * c(0.5, 0.0)) * co.gamma_up[(i, j)];
                    }
                }
                out
            }
        }
    }

    fn random_coefficients<R: Rng>(rng: &mut R) -> CoefficientSet {
        let mut herm = |scale: f64| {
            let d: f64 = rng.random::<f64>() * scale;
            let o = Complex64::from_polar(d * rng.random::<f64>(), rng.random::<f64>() * core::f64::consts::TAU);
            rate_matrix(d, o)
        };
        let (gz, gd, gu) = (herm(2.0), herm(2.0), herm(1.0));
        CoefficientSet {
            time: 0.0,
            ising: rng.random::<f64>() * 4.0 - 2.0,
            exchange: c(rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0),
            gamma_z: gz,
            gamma_down: gd,
            gamma_up: gu,
        }
    }

    #[test]
    fn sparse_generator_matches_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rho = random_density(&mut rng);
            let co = random_coefficients(&mut rng);
            for kind in [GeneratorKind::Dephasing, GeneratorKind::Transverse] {
                let a = generator_apply(&rho, &co, kind);
                let b = dense_generator(&rho, &co, kind);
                assert!((a - b).norm() < 1e-12, "{kind:?}");
            }
        }
    }

    #[test]
    fn generator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let co = random_coefficients(&mut rng);
        let mixed = DensityMatrix4::maximally_mixed();
        assert!(generator_apply(mixed.matrix(), &co, GeneratorKind::Dephasing).norm() < 1e-15);
        let mut zero_up = co;
        zero_up.gamma_up = Matrix4::zeros().fixed_view::<2, 2>(0, 0).into_owned();
        let dd = NamedState::DownDown.state();
        assert!(generator_apply(dd.matrix(), &zero_up, GeneratorKind::Transverse).norm() < 1e-15);
        for _ in 0..50 {
            let rho = random_density(&mut rng);
            let co = random_coefficients(&mut rng);
            for kind in [GeneratorKind::Dephasing, GeneratorKind::Transverse] {
                let out = generator_apply(&rho, &co, kind);
                assert!(out.trace().norm() < 1e-13);
                assert!((out - out.adjoint()).norm() == 0.0);
                // Hermiticity is already exact before mirroring
                let raw = apply_raw(&rho, &co, kind);
                assert!((raw - raw.adjoint()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn liouvillian_matches_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let co = random_coefficients(&mut rng);
        let rho = random_density(&mut rng);
        for kind in [GeneratorKind::Dephasing, GeneratorKind::Transverse] {
            let l = liouvillian(&co, kind);
            let v = SVector::<Complex64, 16>::from_fn(|i, _| rho[(i % 4, i / 4)]);
            let w = l * v;
            let g = generator_apply(&rho, &co, kind);
            for i in 0..16 {
                assert!((w[i] - g[(i % 4, i / 4)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn validate_state_examples() {
        let d = DensityMatrix4::maximally_mixed().diagnostics();
        assert_eq!(d.hermiticity_defect, 0.0);
        assert!(d.trace_defect < 1e-15);
        assert!((d.min_eigenvalue - 0.25).abs() < 1e-15);
        let d = NamedState::BellPsiMinus.state().diagnostics();
        assert!(d.min_eigenvalue.abs() < 1e-15 && d.trace_defect < 1e-15);
        let m = Matrix4::identity() * c(1.01 / 4.0, 0.0);
        assert!((validate_state(&m).trace_defect - 0.01).abs() < 1e-15);
        assert!(DensityMatrix4::new(m).is_err());
    }

    #[test]
    fn named_states_parse() {
        for s in NamedState::ALL {
            assert_eq!(s.name().parse::<NamedState>().unwrap(), s);
            assert!(s.state().diagnostics().within(&StateTolerance::default()));
        }
        let err = "bogus".parse::<NamedState>().unwrap_err().to_string();
        assert!(err.contains("up_down") && err.contains("bell_i"));
    }

    #[test]
    fn zero_coefficients_leave_state_unchanged() {
        let src = Constant(CoefficientSet::zero(0.0));
        let rho0 = NamedState::PlusPlus.state();
        let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        for kind in [GeneratorKind::Dephasing, GeneratorKind::Transverse] {
            let spec = GeneratorSpec { kind, source: &src, markovian: false };
            let traj = evolve(&rho0, &spec, &times, &EvolveOptions::default()).unwrap();
            for s in &traj.states {
                assert_eq!(s, &rho0);
            }
        }
    }

    fn single_exponential_fit(times: &[f64], values: &[f64]) -> f64 {
        let n = times.len() as f64;
        let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let (mx, my) = (times.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let sxy: f64 = times.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = times.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn superradiant_and_subradiant_rates() {
        let (g, g12) = (1.0, 0.9);
        let src = Constant::quantum_transverse(g, g12, 2.0, 0.0);
        let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        let times: Vec<f64> = (0..=100).map(|k| 0.03 * k as f64).collect();
        let traj = evolve(&NamedState::UpDown.state(), &spec, &times, &EvolveOptions::with_tolerance(1e-11)).unwrap();
        let gt: Vec<f64> = traj.measures.iter().map(|m| m.g_t).collect();
        let gs: Vec<f64> = traj.measures.iter().map(|m| m.g_s).collect();
        let st = single_exponential_fit(&times, &gt);
        let ss = single_exponential_fit(&times, &gs);
        assert!((st + (g + g12)).abs() < 1e-4 * (g + g12), "{st}");
        assert!((ss + (g - g12)).abs() < 1e-4 * (g - g12), "{ss}");
    }

    #[test]
    fn dephasing_keeps_diagonal() {
        let src = DephasingOneOverF { sigma: 2.0, omega_low: core::f64::consts::TAU, theta: 0.4, correlation_scale: 1.0, regime: NoiseRegime::Quantum };
        let spec = GeneratorSpec { kind: GeneratorKind::Dephasing, source: &src, markovian: false };
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let rho0 = DensityMatrix4::new(random_density(&mut rng)).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| 0.01 * k as f64).collect();
        let traj = evolve(&rho0, &spec, &times, &EvolveOptions::default()).unwrap();
        for s in &traj.states {
            for a in 0..4 {
                assert!((s.matrix()[(a, a)] - rho0.matrix()[(a, a)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn phase_absorption_is_transparent() {
        // complex correlated decay: evolve with and without the frame change
        let corr = Complex64::from_polar(0.7, 1.1);
        let src = Constant::transverse(1.0, corr, 0.3, corr.conj() * 0.3, c(0.8, -0.4));
        let times: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        let rho0 = NamedState::BellI.state();
        let frozen = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        let live = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
        let opts = EvolveOptions::with_tolerance(1e-11);
        let a = evolve(&rho0, &frozen, &times, &opts).unwrap();
        let b = evolve(&rho0, &live, &times, &opts).unwrap();
        assert!((a.frame_phase - 1.1).abs() < 1e-15);
        assert_eq!(b.frame_phase, 0.0);
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.matrix() - y.matrix()).norm() < 1e-9);
        }
        assert!((a.coefficients[3].gamma_down[(0, 1)] - corr).norm() < 1e-15);
    }

    #[test]
    fn correlated_decay_bound_enforced() {
        let src = Constant::quantum_transverse(1.0, 1.2, 0.0, 0.0);
        let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        let r = evolve(&NamedState::UpDown.state(), &spec, &[0.0, 1.0], &EvolveOptions::default());
        assert!(matches!(r, Err(DynamicsError::Input(_))));
    }

    #[test]
    fn steady_state_limits_and_null_space() {
        let s = thermal_steady_state(60.0).unwrap();
        let m = s.measures().unwrap();
        assert!((m.g_s - 0.5).abs() < 1e-15 && (m.g44 - 0.5).abs() < 1e-12);
        let s = thermal_steady_state(0.0).unwrap();
        assert!((s.measures().unwrap().g44 - 1.0 / 6.0).abs() < 1e-15);
        for &bo in &[0.5, 1.0, 2.0, 5.0] {
            let src = Constant::thermal_transverse(1.0, 1.0, bo, 0.7, 0.0);
            let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
            let closed = steady_state(&spec, bo).unwrap();
            let numeric = null_space_steady_state(&src.0, GeneratorKind::Transverse, &NamedState::UpDown.state()).unwrap();
            assert!((closed.matrix() - numeric.matrix()).norm() < 1e-8, "βΩ={bo}");
        }
        let src = Constant::quantum_transverse(1.0, 0.9, 0.0, 0.0);
        let live = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: false };
        assert!(matches!(steady_state(&live, 1.0), Err(DynamicsError::Unsupported(_))));
    }

    #[test]
    fn null_space_matches_long_evolution() {
        // unique steady state when γ↓₁₂ < γ↓
        let src = Constant::thermal_transverse(1.0, 0.6, 0.8, 0.5, 0.3);
        let spec = GeneratorSpec { kind: GeneratorKind::Transverse, source: &src, markovian: true };
        let rho0 = NamedState::BellI.state();
        let traj = evolve(&rho0, &spec, &[0.0, 20.0, 40.0], &EvolveOptions::with_tolerance(1e-10)).unwrap();
        let ns = null_space_steady_state(&src.0, GeneratorKind::Transverse, &rho0).unwrap();
        assert!((traj.states[2].matrix() - ns.matrix()).norm() < 1e-8);
    }

    #[test]
    fn invalid_grid_rejected() {
        let src = Constant(CoefficientSet::zero(0.0));
        let spec = GeneratorSpec { kind: GeneratorKind::Dephasing, source: &src, markovian: false };
        let rho = NamedState::UpUp.state();
        assert!(evolve(&rho, &spec, &[0.0], &EvolveOptions::default()).is_err());
        assert!(evolve(&rho, &spec, &[0.0, 1.0, 1.0], &EvolveOptions::default()).is_err());
    }
}
