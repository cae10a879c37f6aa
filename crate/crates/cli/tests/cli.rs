//! End-to-end behavior of the command layer: scenarios, sweeps, CSV
//! round-trips, determinism and the binary's exit conventions.

use std::collections::BTreeMap;
use std::process::Command;

use dotprobe_cli::config::{parse_config_with_overrides, ParamMap, RunMode, ScenarioName};
use dotprobe_cli::scenario::run_scenario;
use dotprobe_cli::table::Cell;
use dotprobe_cli::{commands, parse_config};
use dotprobe_core::{dephased_double_dot_dc, double_dot_dc, DoubleDotParams};

const DD_STEADY: &str = "\
[model]
name = \"double_dot\"

[params]
Gamma_L = 1.0
Gamma_R = 1.0
Omega = 1.0
epsilon = 0.0

[run]
mode = \"steady\"
";

fn scenario(name: ScenarioName, sets: &[(&str, f64)]) -> dotprobe_cli::ScenarioOutput {
    let params: ParamMap = sets
        .iter()
        .map(|(k, v)| (k.to_string(), dotprobe_cli::ParamValue::Number(*v)))
        .collect();
    run_scenario(name, &params, &BTreeMap::new()).unwrap()
}

#[test]
fn identical_inputs_give_byte_identical_csv() {
    let a = scenario(ScenarioName::Fig3, &[]).table.to_csv_string();
    let b = scenario(ScenarioName::Fig3, &[]).table.to_csv_string();
    assert_eq!(a, b);

    let cfg = parse_config(DD_STEADY).unwrap();
    let t1 = commands::run_command(&cfg).unwrap().to_csv_string();
    let t2 = commands::run_command(&cfg).unwrap().to_csv_string();
    assert_eq!(t1, t2);
}

#[test]
fn fig3_profile_is_piecewise_constant_with_flagged_extension() {
    let out = scenario(ScenarioName::Fig3, &[]);
    let table = &out.table;
    assert_eq!(table.n_rows(), 121);
    let regime_col = table.column("regime").unwrap();
    let is_col = table.column("I_S").unwrap();
    let bare_col = table.column("I_S_bare").unwrap();
    let note_col = table.column("note").unwrap();

    let bare = double_dot_dc(&DoubleDotParams {
        Gamma_L: 1.0,
        Gamma_R: 1.0,
        Omega: 1.0,
        epsilon: 0.0,
    })
    .unwrap();

    let mut seen = std::collections::BTreeMap::<String, Vec<f64>>::new();
    for row in table.rows() {
        let regime = row[regime_col].as_text().unwrap().to_string();
        let i_s = row[is_col].as_num().unwrap();
        assert_eq!(row[bare_col].as_num().unwrap(), bare);
        let note = row[note_col].as_text().unwrap();
        assert_eq!(note == "extension", regime == "never_blocked");
        seen.entry(regime).or_default().push(i_s);
    }
    assert_eq!(seen.len(), 3, "all three regimes appear in the window");
    for (regime, values) in &seen {
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            spread <= 1e-12,
            "I_S varies within regime {regime} by {spread:.3e}"
        );
    }
    // The observing regime suppresses the current; the blocked regime does not.
    assert!((seen["always_blocked"][0] - bare).abs() <= 1e-10);
    assert!(seen["blocked_by_dot1"][0] < 0.5 * bare);
}

#[test]
fn zeno_sweep_is_strictly_decreasing_and_matches_the_closed_form() {
    let out = scenario(ScenarioName::Zeno, &[]);
    let table = &out.table;
    assert_eq!(table.n_rows(), 20);
    let g_col = table.column("gamma_L").unwrap();
    let is_col = table.column("I_S").unwrap();
    let closed_col = table.column("I_closed").unwrap();
    let dot = DoubleDotParams { Gamma_L: 1.0, Gamma_R: 1.0, Omega: 1.0, epsilon: 0.0 };
    let mut prev = f64::INFINITY;
    for row in table.rows() {
        let g = row[g_col].as_num().unwrap();
        let i_s = row[is_col].as_num().unwrap();
        let closed = row[closed_col].as_num().unwrap();
        assert!((closed - dephased_double_dot_dc(&dot, g).unwrap()).abs() < 1e-14);
        assert!((i_s - closed).abs() < 1e-10, "numeric vs closed form at gamma_L = {g}");
        assert!(i_s < prev, "I_S not strictly decreasing at gamma_L = {g}");
        prev = i_s;
    }
}

#[test]
fn noninvasive_sweep_converges_to_the_undistorted_values() {
    let out = scenario(ScenarioName::Noninvasive, &[]);
    let table = &out.table;
    let last = table.rows().last().unwrap();
    let ratio = last[table.column("gamma_R_over_gamma_L").unwrap()].as_num().unwrap();
    assert!((ratio - 1e3).abs() / 1e3 < 1e-12);
    let i_s = last[table.column("I_S").unwrap()].as_num().unwrap();
    let readout = last[table.column("I_D_over_I_S").unwrap()].as_num().unwrap();
    let target = last[table.column("gamma_L_over_Gamma_L").unwrap()].as_num().unwrap();
    assert!((i_s - 0.5).abs() / 0.5 < 0.005, "I_S = {i_s}");
    assert!((readout - target).abs() / target < 0.005, "I_D/I_S = {readout}");
}

#[test]
fn reduction_scenario_reports_the_ladder() {
    let out = scenario(ScenarioName::Reduction, &[]);
    assert_eq!(out.table.n_rows(), 4);
    assert!(out.summary.iter().any(|l| l.contains("exponent")));
    let disc_col = out.table.column("steady_current_discrepancy").unwrap();
    let discs: Vec<f64> = out.table.rows().iter().map(|r| r[disc_col].as_num().unwrap()).collect();
    assert!(discs.windows(2).all(|w| w[1] < w[0]), "discrepancy must fall along the ladder");
}

#[test]
fn sweep_over_energy_classifies_regimes_per_point() {
    let text = "\
[model]
name = \"double_dot_detector\"

[params]
Gamma_L = 1.0
Gamma_R = 1.0
Omega = 1.0
gamma_L = 50.0
gamma_R = 50.0
U1 = 2.0
U2 = 0.0
E0 = 0.0
EF_det = 1.0

[run]
mode = \"sweep\"
parameter = \"EF_det\"
start = -0.5
stop = 2.5
count = 7
";
    let cfg = parse_config(text).unwrap();
    let table = commands::run_command(&cfg).unwrap();
    assert_eq!(table.n_rows(), 7);
    let regime_col = table.column("regime").unwrap();
    let regimes: Vec<&str> =
        table.rows().iter().map(|r| r[regime_col].as_text().unwrap()).collect();
    assert!(regimes.contains(&"always_blocked"));
    assert!(regimes.contains(&"blocked_by_dot1"));
    assert!(regimes.contains(&"never_blocked"));
}

#[test]
fn evolve_command_tabulates_state_current_and_charge() {
    let cfg = parse_config_with_overrides(
        DD_STEADY,
        &["run.mode=evolve".into(), "run.tmax=10".into(), "run.npoints=51".into()],
    )
    .unwrap();
    assert!(matches!(cfg.run, RunMode::Evolve { .. }));
    let table = commands::run_command(&cfg).unwrap();
    assert_eq!(table.n_rows(), 51);
    let q_col = table.column("Q_S").unwrap();
    let qs: Vec<f64> = table.rows().iter().map(|r| r[q_col].as_num().unwrap()).collect();
    assert_eq!(qs[0], 0.0);
    assert!(qs.windows(2).all(|w| w[1] >= w[0]), "charge must be nondecreasing");
    let t_col = table.column("t").unwrap();
    assert_eq!(table.rows()[50][t_col].as_num().unwrap(), 10.0);
}

#[test]
fn csv_written_to_disk_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("steady.csv");
    let cfg = parse_config(DD_STEADY).unwrap();
    let table = commands::run_command(&cfg).unwrap();
    table.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, table.to_csv_string());
    // Parse the numeric row back and compare bitwise.
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for (field, cell) in lines[1].split(',').zip(table.rows()[0].iter()) {
        match cell {
            Cell::Num(v) => assert_eq!(field.parse::<f64>().unwrap().to_bits(), v.to_bits()),
            Cell::Text(s) => assert_eq!(field, s),
        }
    }
}

#[test]
fn binary_exits_zero_on_success_and_nonzero_with_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(&cfg_path, DD_STEADY).unwrap();

    let ok = Command::new(env!("CARGO_BIN_EXE_dotprobe"))
        .args(["steady", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(ok.status.success());
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.starts_with("sigma_aa,"));
    assert!(stdout.contains("3.0769230769230771e-1"));

    // Unknown key: nonzero exit, single machine-readable error line.
    let bad = Command::new(env!("CARGO_BIN_EXE_dotprobe"))
        .args(["steady", "--config"])
        .arg(&cfg_path)
        .args(["--set", "nonsense=1"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert!(stderr.starts_with("error: "), "stderr was {stderr:?}");
    assert!(stderr.contains("nonsense"));
}

#[test]
fn scenario_binary_accepts_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_dotprobe"))
        .args(["scenario", "zeno", "--set", "run.count=5", "--set", "Omega=0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 6, "header plus five rows:\n{stdout}");
}
