//! CSV output: column catalogue for trajectories and a writer that prefixes
//! `# key: value` header rows recording every input.

use std::io::{self, Write};
use std::path::Path;

use corrnoise_core::dynamics::Trajectory;

/// Trajectory column. The derived order is the on-disk order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    Time,
    /// ρ_{ab}, 1-based indices in the basis (↑↑, ↑↓, ↓↑, ↓↓).
    Rho { a: u8, b: u8, imag: bool },
    GT,
    GS,
    ReGts,
    ImGts,
    Concurrence,
    TraceDefect,
    HermiticityDefect,
    MinEigenvalue,
    Ising,
    GammaZ,
    GammaZ12Re,
    GammaZ12Im,
    GammaDown,
    GammaDown12Re,
    GammaDown12Im,
    GammaUp,
    GammaUp12Re,
    GammaUp12Im,
    ExchangeRe,
    ExchangeIm,
}

const MEASURES: [Column; 5] = [Column::GT, Column::GS, Column::ReGts, Column::ImGts, Column::Concurrence];
const DIAGNOSTICS: [Column; 3] = [Column::TraceDefect, Column::HermiticityDefect, Column::MinEigenvalue];
const COEFFICIENTS: [Column; 12] = [
    Column::Ising,
    Column::GammaZ,
    Column::GammaZ12Re,
    Column::GammaZ12Im,
    Column::GammaDown,
    Column::GammaDown12Re,
    Column::GammaDown12Im,
    Column::GammaUp,
    Column::GammaUp12Re,
    Column::GammaUp12Im,
    Column::ExchangeRe,
    Column::ExchangeIm,
];

fn rho_columns() -> impl Iterator<Item = Column> {
    (1..=4u8).flat_map(|a| (1..=4u8).flat_map(move |b| [false, true].map(|imag| Column::Rho { a, b, imag })))
}

impl Column {
    pub fn all() -> Vec<Column> {
        let mut v = vec![Column::Time];
        v.extend(rho_columns());
        v.extend(MEASURES);
        v.extend(DIAGNOSTICS);
        v.extend(COEFFICIENTS);
        v
    }

    pub fn name(self) -> String {
        match self {
            Column::Time => "t_us".into(),
            Column::Rho { a, b, imag } => format!("rho_{a}{b}_{}", if imag { "im" } else { "re" }),
            Column::GT => "g_t".into(),
            Column::GS => "g_s".into(),
            Column::ReGts => "re_g_ts".into(),
            Column::ImGts => "im_g_ts".into(),
            Column::Concurrence => "concurrence".into(),
            Column::TraceDefect => "trace_defect".into(),
            Column::HermiticityDefect => "hermiticity_defect".into(),
            Column::MinEigenvalue => "min_eigenvalue".into(),
            Column::Ising => "ising_coupling".into(),
            Column::GammaZ => "gamma_z".into(),
            Column::GammaZ12Re => "gamma_z_12_re".into(),
            Column::GammaZ12Im => "gamma_z_12_im".into(),
            Column::GammaDown => "gamma_down".into(),
            Column::GammaDown12Re => "gamma_down_12_re".into(),
            Column::GammaDown12Im => "gamma_down_12_im".into(),
            Column::GammaUp => "gamma_up".into(),
            Column::GammaUp12Re => "gamma_up_12_re".into(),
            Column::GammaUp12Im => "gamma_up_12_im".into(),
            Column::ExchangeRe => "exchange_re".into(),
            Column::ExchangeIm => "exchange_im".into(),
        }
    }

    /// Resolves a selector: a group (`all`, `rho`, `measures`, `diagnostics`,
    /// `coefficients`), a column name, or `t` as shorthand for `t_us`.
    pub fn select(selector: &str) -> Option<Vec<Column>> {
        match selector {
            "all" => Some(Column::all()),
            "rho" => Some(rho_columns().collect()),
            "measures" => Some(MEASURES.to_vec()),
            "diagnostics" => Some(DIAGNOSTICS.to_vec()),
            "coefficients" => Some(COEFFICIENTS.to_vec()),
            "t" => Some(vec![Column::Time]),
            name => Column::all().into_iter().find(|c| c.name() == name).map(|c| vec![c]),
        }
    }

    pub fn selector_help() -> &'static str {
        "use a group (all, rho, measures, diagnostics, coefficients) or a column name such as t_us, rho_23_im, concurrence, gamma_down"
    }

    fn value(self, traj: &Trajectory, i: usize) -> f64 {
        let rho = traj.states[i].matrix();
        let m = &traj.measures[i];
        let c = &traj.coefficients[i];
        match self {
            Column::Time => traj.times[i],
            Column::Rho { a, b, imag } => {
                let z = rho[(a as usize - 1, b as usize - 1)];
                if imag {
                    z.im
                } else {
                    z.re
                }
            }
            Column::GT => m.g_t,
            Column::GS => m.g_s,
            Column::ReGts => m.re_g_ts,
            Column::ImGts => m.im_g_ts,
            Column::Concurrence => m.concurrence,
            Column::TraceDefect => traj.states[i].diagnostics().trace_defect,
            Column::HermiticityDefect => traj.states[i].diagnostics().hermiticity_defect,
            Column::MinEigenvalue => traj.states[i].diagnostics().min_eigenvalue,
            Column::Ising => c.ising,
            Column::GammaZ => c.gamma_z[(0, 0)].re,
            Column::GammaZ12Re => c.gamma_z[(0, 1)].re,
            Column::GammaZ12Im => c.gamma_z[(0, 1)].im,
            Column::GammaDown => c.gamma_down[(0, 0)].re,
            Column::GammaDown12Re => c.gamma_down[(0, 1)].re,
            Column::GammaDown12Im => c.gamma_down[(0, 1)].im,
            Column::GammaUp => c.gamma_up[(0, 0)].re,
            Column::GammaUp12Re => c.gamma_up[(0, 1)].re,
            Column::GammaUp12Im => c.gamma_up[(0, 1)].im,
            Column::ExchangeRe => c.exchange.re,
            Column::ExchangeIm => c.exchange.im,
        }
    }
}

/// A table of floats with header metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(meta: Vec<(String, String)>, columns: &[&str]) -> Self {
        Table { meta, columns: columns.iter().map(|s| (*s).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn from_trajectory(traj: &Trajectory, columns: &[Column], meta: Vec<(String, String)>) -> Self {
        let names: Vec<String> = columns.iter().map(|c| c.name()).collect();
        let rows = (0..traj.len()).map(|i| columns.iter().map(|c| c.value(traj, i)).collect()).collect();
        Table { meta, columns: names, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            // shortest round-trip representation: deterministic and lossless
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let f = std::fs::File::create(path)?;
        let mut buf = io::BufWriter::new(f);
        self.write(&mut buf)?;
        buf.flush()
    }

    /// Reads back a table written by [`Table::write`].
    pub fn read(text: &str) -> Result<Self, csv::Error> {
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            match line.strip_prefix("# ") {
                Some(rest) => {
                    let rest = rest.trim_end_matches(['\n', '\r']);
                    let (k, v) = rest.split_once(": ").unwrap_or((rest, ""));
                    meta.push((k.to_owned(), v.to_owned()));
                    body_start += line.len();
                }
                None => break,
            }
        }
        let mut r = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let columns = r.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push(rec.iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect());
        }
        Ok(Table { meta, columns, rows })
    }
}
