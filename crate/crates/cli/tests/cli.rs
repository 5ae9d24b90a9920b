use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn oppq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oppq")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// `value` rounds to the printed decimal string.
fn rounds_to(value: &str, printed: &str) -> bool {
    let decimals = printed.split('.').nth(1).map_or(0, str::len) as i32;
    let v: f64 = value.parse().unwrap();
    let p: f64 = printed.parse().unwrap();
    (v - p).abs() <= 0.5 * 10f64.powi(-decimals) * (1.0 + 1e-9)
}

const HARMONIC: &str = r#"{
    "system": {"kind": "harmonic"},
    "precision": 60,
    "orders": [6, 7, 8, 9, 10, 11, 12, 13, 14, 20],
    "window": ["3", "7"],
    "bounds_window": ["0", "20"],
    "tol_exponent": 30
}"#;

#[test]
fn scan_curves_are_ordered_pointwise() {
    let dir = tempfile::tempdir().unwrap();
    let orders: Vec<String> = (5..=32).step_by(3).map(|i| i.to_string()).collect();
    let config = format!(
        r#"{{"system": {{"kind": "harmonic"}}, "precision": 80, "orders": [{}],
            "window": ["0", "20"], "scan_points": 41, "tol_exponent": 30}}"#,
        orders.join(", ")
    );
    let path = write_config(dir.path(), &config);
    let out = oppq(&["scan", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curves: Vec<Vec<Vec<String>>> = orders
        .iter()
        .map(|o| {
            let (header, rows) = read_csv(&dir.path().join(format!("scan_harmonic_{o}.csv")));
            assert_eq!(header, ["E", "value", "log10_value"]);
            assert_eq!(rows.len(), 41);
            rows
        })
        .collect();
    assert_eq!(curves.len(), 10);
    for pair in curves.windows(2) {
        for (lo, hi) in pair[0].iter().zip(&pair[1]) {
            assert_eq!(lo[0], hi[0]);
            let (a, b): (f64, f64) = (lo[1].parse().unwrap(), hi[1].parse().unwrap());
            assert!(a > 0.0 && a <= b * (1.0 + 1e-12), "E = {}: {a} > {b}", lo[0]);
        }
    }
}

#[test]
fn minimize_and_bound_reproduce_harmonic_table() {
    let table = [
        ("6", "4.53222", "3.20587", "4.07088", "5.00593"),
        ("7", "4.73661", "3.37132", "4.48590", "5.00591"),
        ("10", "4.97454", "3.56996", "4.94437", "5.00541"),
        ("14", "4.99961", "3.59017", "4.99741", "5.00181"),
        ("20", "4.9999996", "3.5904802", "4.99993", "5.00007"),
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), HARMONIC);
    let out_dir = dir.path().to_str().unwrap();
    let out = oppq(&["minimize", "--config", &path, "--out", out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, minima) = read_csv(&dir.path().join("minima_harmonic.csv"));
    assert_eq!(header[..5], ["order", "E_min", "S_min", "E_L", "E_U"]);
    assert!(minima.iter().all(|r| r[3].is_empty() && r[4].is_empty()));
    assert!(minima.iter().all(|r| r[10] == "true"), "sequence should rise at every order");

    let out = oppq(&["bound", "--config", &path, "--bu", "3.6", "--out", out_dir]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, bounds) = read_csv(&dir.path().join("bounds_harmonic.csv"));
    for (order, e_min, s_min, e_l, e_u) in table {
        let row = bounds.iter().find(|r| r[0] == order).unwrap();
        let mrow = minima.iter().find(|r| r[0] == order).unwrap();
        assert_eq!(row[1], mrow[1], "bound reuses the minimum");
        for (got, want) in [(&row[1], e_min), (&row[2], s_min), (&row[3], e_l), (&row[4], e_u)] {
            assert!(rounds_to(got, want), "order {order}: {got} vs {want}");
        }
    }
}

#[test]
fn outputs_are_byte_reproducible_across_runs_and_exec_modes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let path = write_config(dir.path(), &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[6, 9]"));
    for d in [&a, &b] {
        assert!(oppq(&["bound", "--config", &path, "--bu", "3.6", "--out", d.to_str().unwrap()]).status.success());
    }
    let seq = write_config(
        dir.path(),
        &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[6, 9]").replace(
            "\"tol_exponent\": 30",
            "\"tol_exponent\": 30, \"exec\": \"sequential\"",
        ),
    );
    assert!(oppq(&["bound", "--config", &seq, "--bu", "3.6", "--out", c.to_str().unwrap()]).status.success());
    let csv = |d: &Path| std::fs::read(d.join("bounds_harmonic.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
    assert_eq!(csv(&a), csv(&c));
}

#[test]
fn ledger_follows_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[6, 7, 8]"));
    let out = oppq(&["bound", "--config", &path, "--bu", "3.6", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("ledger_harmonic_bound.json")).unwrap();
    let ledger: Value = serde_json::from_str(&text).unwrap();
    for key in ["config", "system", "precision", "sequence", "b_u", "rows", "versions"] {
        assert!(ledger.get(key).is_some(), "missing {key}");
    }
    assert_eq!(ledger["precision"], 60);
    assert_eq!(ledger["b_u"]["source"], "manual");
    assert_eq!(ledger["config"]["b_u"], "3.6");
    assert_eq!(ledger["system"]["kind"], "harmonic");
    assert!(ledger["versions"]["oppq-core"].is_string());
    let sequence = ledger["sequence"].as_array().unwrap();
    let rows = ledger["rows"].as_array().unwrap();
    assert_eq!(sequence.len(), 3);
    assert_eq!(rows.len(), 3);
    for (row, s) in rows.iter().zip(sequence) {
        assert_eq!(&row["s_min"], s);
        assert!(row["wall_time_s"].as_f64().unwrap() >= 0.0);
        let num = |k: &str| row[k].as_str().unwrap().parse::<f64>().unwrap();
        assert!(num("e_l") <= num("e_min") && num("e_min") <= num("e_u"));
        assert!(row["residuals"]["bisection_steps"].as_u64().unwrap() > 0);
        assert!(row["residuals"]["bracket_width"].is_string());
    }
}

#[test]
fn single_order_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[8]"));
    assert!(oppq(&["minimize", "--config", &path, "--out", dir.path().to_str().unwrap()]).status.success());
    let (_, rows) = read_csv(&dir.path().join("minima_harmonic.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "8");
}

#[test]
fn bound_below_the_minimum_is_reported_per_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[6, 14]"));
    // 3.4 sits above S_min(6) and below S_min(14).
    let out = oppq(&["bound", "--config", &path, "--bu", "3.4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("bounds_harmonic.csv"));
    let note = header.iter().position(|h| h == "note").unwrap();
    assert!(!rows[0][3].is_empty() && rows[0][note].is_empty());
    assert!(rows[1][3].is_empty() && rows[1][note].contains("crossing"), "{:?}", rows[1]);
}

#[test]
fn unconverged_sequence_asks_for_manual_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[6, 7, 8]"));
    let out = oppq(&["bound", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sequence of minima") && err.contains("--bu"), "{err}");
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (HARMONIC.replace("[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]", "[]"), "orders"),
        (HARMONIC.replace("\"tol_exponent\"", "\"tol\": 1, \"tol_exponent\""), "unknown field `tol`"),
        (
            r#"{"system": {"kind": "qzm", "b": "2", "eps0": "1"}, "precision": 60, "orders": [2],
                "window": ["0.5", "1.1"], "tol_exponent": 20}"#
                .to_string(),
            "eps0",
        ),
    ];
    for (body, needle) in cases {
        let path = write_config(dir.path(), &body);
        let out = oppq(&["scan", "--config", &path, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{err}");
    }
    let out = oppq(&["minimize", "--preset", "no_such_preset"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zeeman_minimum_matches_table_at_low_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        r#"{"system": {"kind": "qzm", "b": "2", "z": "1", "eps0": "1.0"}, "precision": 120,
            "orders": [10], "window": ["1.00001", "1.1"], "scan_points": 12, "tol_exponent": 24}"#,
    );
    let out = oppq(&["minimize", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&dir.path().join("minima_qzm.csv"));
    assert!(rounds_to(&rows[0][1][..20], "1.02221390772094855"));
    assert!(rows[0][1].starts_with("1.0222139077209485"), "{}", rows[0][1]);
    assert!(rows[0][2].starts_with("1.192243533436049559"), "{}", rows[0][2]);
    assert_eq!(rows[0][5], "1.0");
}

#[test]
fn presets_are_listed_and_printed() {
    let out = oppq(&["presets"]);
    let list = String::from_utf8_lossy(&out.stdout);
    assert!(list.lines().any(|l| l == "qzm_B2_gr"));
    assert_eq!(list.lines().filter(|l| l.starts_with("qzm_B")).count(), 14);
    let out = oppq(&["presets", "qzm_B0.2_ex1"]);
    let config: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(config["b_u_stages"].as_array().unwrap().len(), 3);
}

#[test]
fn custom_recurrence_matches_builtin_harmonic() {
    let dir = tempfile::tempdir().unwrap();
    let custom = HARMONIC.replace(
        r#""system": {"kind": "harmonic"}"#,
        r#""name": "harmonic", "system": {
            "kind": "custom-1d",
            "label": "oscillator",
            "missing_order": 0,
            "coeffs": [[{"c": "1", "e_pow": 1}], [{"c": "4", "p_pow": 2}, {"c": "-2", "p_pow": 1}]],
            "weight": {"kind": "harmonic-half-line"},
            "normalization": "unit-missing-moment-vector"
        }"#,
    );
    let orders = "[6, 7, 8, 9, 10, 11, 12, 13, 14, 20]";
    let a = dir.path().join("builtin");
    let b = dir.path().join("custom");
    let builtin = write_config(dir.path(), &HARMONIC.replace(orders, "[6, 10]"));
    assert!(oppq(&["minimize", "--config", &builtin, "--out", a.to_str().unwrap()]).status.success());
    let custom = write_config(dir.path(), &custom.replace(orders, "[6, 10]"));
    let out = oppq(&["minimize", "--config", &custom, "--out", b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, x) = read_csv(&a.join("minima_harmonic.csv"));
    let (_, y) = read_csv(&b.join("minima_harmonic.csv"));
    for (r, s) in x.iter().zip(&y) {
        assert_eq!(r[..3], s[..3]);
    }
}
