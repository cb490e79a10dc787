use std::path::Path;
use std::process::{Command, Output};

use corrnoise::output::Table;
use corrnoise_core::analytic::{self, MarkovianParams};

fn corrnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrnoise")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const EXCHANGE: &str = r#"
scenario = "markovian_transverse"
initial_state = "up_down"
tolerance = 1e-10

[time]
t_max = "5 us"
n_points = 201

[rates]
gamma_down = "1 /us"
gamma_down_12 = "0.9 /us"
js = "5 /us"
"#;

fn simulate(config: &str) -> (Output, Option<Table>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", config);
    let out = dir.path().join("out.csv");
    let res = corrnoise(&["simulate", &cfg, "--out", out.to_str().unwrap()]);
    let table = std::fs::read_to_string(&out).ok().map(|t| Table::read(&t).unwrap());
    (res, table)
}

#[test]
fn zero_noise_trajectory_is_constant() {
    let cfg = EXCHANGE
        .replace("\"1 /us\"", "\"0 /us\"")
        .replace("\"0.9 /us\"", "\"0 /us\"")
        .replace("js = \"5 /us\"", "")
        .replace("\"up_down\"", "\"bell_psi_plus\"");
    let (res, table) = simulate(&cfg);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = table.unwrap();
    let first = table.rows[0].clone();
    for row in &table.rows {
        for (j, (a, b)) in row.iter().zip(&first).enumerate().skip(1) {
            assert!((a - b).abs() < 1e-14, "{} drifted: {a} vs {b}", table.columns[j]);
        }
    }
    assert!((table.column("concurrence").unwrap()[0] - 1.0).abs() < 1e-14);
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("final concurrence") && stderr.contains("trace defect"), "{stderr}");
}

#[test]
fn exchange_run_matches_closed_form() {
    let (res, table) = simulate(EXCHANGE);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = table.unwrap();
    assert!(table.meta.iter().any(|(k, _)| k == "scenario"));
    let p = MarkovianParams { gamma_down: 1.0, gamma_12: 0.9, js: 5.0, dm: 0.0 };
    let t = table.column("t_us").unwrap();
    let c = table.column("concurrence").unwrap();
    for (t, c) in t.iter().zip(&c) {
        let exact = analytic::concurrence_sym_exchange(*t, &p).unwrap();
        assert!((c - exact).abs() < 1e-5, "t = {t}: {c} vs {exact}");
    }
}

#[test]
fn bad_state_name_is_a_usage_error() {
    let (res, _) = simulate(&EXCHANGE.replace("\"up_down\"", "\"sideways\""));
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
    for name in ["up_down", "bell_psi_plus", "plus_plus"] {
        assert!(stderr.contains(name), "{stderr}");
    }
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = corrnoise(&["figure", "fig9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("fig3b"));
}

#[test]
fn figure_files_are_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let res = corrnoise(&["figure", "fig6", "--out", dir.path().to_str().unwrap()]);
    assert!(res.status.success());
    let table = Table::read(&std::fs::read_to_string(dir.path().join("fig6.csv")).unwrap()).unwrap();
    assert!(table.meta.iter().any(|(k, v)| k == "sigma" && v.contains("rad/us")));
    assert_eq!(table.columns, ["t_ns", "gamma", "big_gamma", "concurrence_bell", "concurrence_product"]);
}

#[test]
fn injected_mutation_fails_the_named_check() {
    let res = corrnoise(&["verify", "--suite", "oracles", "--inject", "sym-exchange-sign"]);
    assert_eq!(res.status.code(), Some(1));
    let report = String::from_utf8_lossy(&res.stdout);
    let failing: Vec<&str> = report.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 1, "{report}");
    assert!(failing[0].contains("sym_exchange_closed_form"));
}

#[test]
fn verify_report_is_reproducible() {
    let a = corrnoise(&["verify", "--suite", "invariants", "--seed", "11"]);
    let b = corrnoise(&["verify", "--suite", "invariants", "--seed", "11"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rates_command_reports_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", EXCHANGE);
    let res = corrnoise(&["rates", &cfg, "--at", "0 us,1 us"]);
    assert!(res.status.success());
    let table = Table::read(&String::from_utf8_lossy(&res.stdout)).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.column("gamma_down").unwrap(), [1.0, 1.0]);
    assert_eq!(table.column("exchange_re").unwrap(), [5.0, 5.0]);
    let bad = corrnoise(&["rates", &cfg, "--at", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}
