use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn hfavg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfavg"))
        .args(args)
        .env_remove("HFAVG_SPECIES_PATH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn records(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn temp(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

/// Two J = 0 levels: the averaged shift is exactly linear minus quadratic.
const TOY_SPECIES: &str = r#"{
  "species": {
    "toy": {
      "gI": -0.001,
      "levels": [
        { "label": "g", "twoI": 2, "twoJ": 0, "gJ": 0.0, "A_hf_Hz": 0.0, "B_hf_Hz": 0.0, "theta_q_ea02": 0.0, "fs_partner": null },
        { "label": "e", "twoI": 2, "twoJ": 0, "gJ": 0.0, "A_hf_Hz": 0.0, "B_hf_Hz": 0.0, "theta_q_ea02": 0.0,
          "fs_partner": { "omega_fs_rad_s": 8.796459430051421e12, "gL": 1.0, "gS": 2.0 } }
      ]
    }
  },
  "schemes": [
    { "name": "toy", "species": "toy", "delta_m_twice": -2,
      "transitions": [ { "ground": ["g", 2, 2], "excited": ["e", 2, 0], "weight": [1, 1] } ] }
  ]
}"#;

const SINGLE_LINE: &str = r#"{
  "schemes": [
    { "name": "one", "species": "lu176", "delta_m_twice": 0,
      "transitions": [ { "ground": ["1S0", 14, 0], "excited": ["3D1", 14, 0], "weight": [1, 1] } ] }
  ]
}"#;

#[test]
fn spectrum_shape_and_header() {
    let o = hfavg(&["spectrum", "--level", "lu176/3D1", "--b-lo", "0", "--b-hi", "1", "--steps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.ends_with("\r\n"));
    assert_eq!(text.matches("\r\n").count(), 4);
    let (header, rows) = records(&text);
    assert_eq!(header.len(), 46);
    assert_eq!(rows.len(), 3);
    assert_eq!(header[0], "B_gauss");
    let grammar = |h: &str| {
        let rest = h.strip_prefix("3D1_F").unwrap();
        let (f, m) = rest.split_once("_mF").unwrap();
        let (f, m): (i32, i32) = (f.parse().unwrap(), m.parse().unwrap());
        [12, 14, 16].contains(&f) && m.abs() <= f && (f - m) % 2 == 0
    };
    assert!(header[1..].iter().all(|h| grammar(h)), "{header:?}");
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    // zero field: every state sits at its hyperfine energy
    let by_f = |tf: &str| {
        header
            .iter()
            .zip(&rows[0])
            .filter(|(h, _)| h.starts_with(&format!("3D1_F{tf}_")))
            .map(|(_, &e)| e)
            .collect::<Vec<_>>()
    };
    for tf in ["12", "14", "16"] {
        let e = by_f(tf);
        assert!(e.iter().all(|&x| x == e[0]));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["curve", "--scheme", "lu175_fip", "--steps", "9"];
    assert_eq!(hfavg(&args).stdout, hfavg(&args).stdout);
    let args = ["verify", "--scheme", "sr87_m0", "--geom-samples", "5"];
    assert_eq!(hfavg(&args).stdout, hfavg(&args).stdout);
}

#[test]
fn tesla_converts_the_field_column_only() {
    let g = records(&stdout(&hfavg(&["spectrum", "--level", "lu175/3D1", "--b-hi", "100", "--steps", "3"])));
    let t = records(&stdout(&hfavg(&[
        "spectrum", "--level", "lu175/3D1", "--b-hi", "100", "--steps", "3", "--tesla",
    ])));
    assert_eq!(t.0[0], "B_tesla");
    assert_eq!(t.1[2][0], 0.01);
    assert_eq!(g.1[2][1..], t.1[2][1..]);
}

#[test]
fn curve_for_lu175_has_interior_extremum_near_4750() {
    let o = hfavg(&["curve", "--scheme", "lu175_fip", "--b-lo", "0", "--b-hi", "8000", "--steps", "161"]);
    assert!(o.status.success());
    let (header, rows) = records(&stdout(&o));
    assert_eq!(header.last().unwrap(), "avg");
    assert_eq!(header.len(), 5);
    assert!(rows[0][1..].iter().all(|&x| x == 0.0));
    let (k, _) = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1[4].partial_cmp(&b.1[4]).unwrap())
        .unwrap();
    assert!(k > 0 && k + 1 < rows.len());
    assert!((rows[k][0] - 4750.0).abs() <= 50.0, "{}", rows[k][0]);
}

#[test]
fn single_transition_average_is_the_component() {
    let f = temp(SINGLE_LINE);
    let o = hfavg(&["curve", "--scheme", path(&f), "--b-hi", "50", "--steps", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = records(&stdout(&o));
    assert_eq!(header, ["B_gauss", "1S0_F14_mF0->3D1_F14_mF0", "avg"]);
    assert!(rows.iter().all(|r| r[1] == r[2]));
}

#[test]
fn verify_builtins_pass() {
    let o = hfavg(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["status"], "pass", "{c}");
        assert!(c["name"].is_string() && c["measured"].is_number() && c["threshold"].is_number());
    }
}

#[test]
fn incomplete_scheme_fails_quadrupole_check() {
    let f = temp(SINGLE_LINE);
    let o = hfavg(&["verify", "--scheme", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let quad = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "quadrupole_residual")
        .unwrap();
    assert_eq!(quad["status"], "fail");
}

#[test]
fn geometry_samples_scale_sum_rule_evaluations() {
    let count = |n: &str| {
        let v = json(&hfavg(&["verify", "--scheme", "lu176_m0", "--geom-samples", n]));
        v["schemes"][0]["sum_rule_evaluations"].as_u64().unwrap()
    };
    assert_eq!(count("100"), 100 * count("1"));
}

#[test]
fn fip_for_lu175() {
    let o = hfavg(&["fip", "--scheme", "lu175_fip"]);
    assert!(o.status.success());
    let v = json(&o);
    let analytic = v["analytic_b_star"].as_f64().unwrap();
    let numeric = v["numeric_b_star"].as_f64().unwrap();
    assert!((analytic - 4750.0).abs() < 5.0);
    assert!(((numeric - analytic) / analytic).abs() < 0.05);
    let slopes: Vec<f64> = v["numeric"]["component_slopes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["slope"].as_f64().unwrap())
        .collect();
    for (s, r) in slopes.iter().zip([25.5e3, -20.3e3, -5.2e3]) {
        assert!(((s - r) / r).abs() < 0.25, "{s}");
    }
    assert!(v["numeric"]["curvature"].as_f64().unwrap() < 0.0);
}

#[test]
fn fip_without_delta_m_reports_zero() {
    let v = json(&hfavg(&["fip", "--scheme", "lu176_m0"]));
    assert_eq!(v["analytic_b_star"], 0.0);
    assert!(v["numeric_b_star"].is_null());
}

#[test]
fn fip_toy_model_agrees_with_closed_form() {
    let f = temp(TOY_SPECIES);
    let o = hfavg(&["fip", "--scheme", path(&f), "--b-lo", "1", "--b-hi", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let a = v["analytic_b_star"].as_f64().unwrap();
    let n = v["numeric_b_star"].as_f64().unwrap();
    assert!(((a - n) / a).abs() < 1e-6, "{a} vs {n}");
}

#[test]
fn domain_errors_exit_three() {
    let o = hfavg(&["fip", "--scheme", "lu175_fip", "--b-lo", "1", "--b-hi", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sign change"));
    assert!(o.stdout.is_empty());
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["curve", "--scheme", "nope"],
        vec!["spectrum", "--level", "lu176/3D9"],
        vec!["spectrum", "--level", "lu176/3D1", "--b-lo", "2", "--b-hi", "1"],
        vec!["spectrum", "--level", "lu176/3D1", "--b-lo", "-1"],
        vec!["spectrum", "--level", "lu176/3D1", "--steps", "1"],
        vec!["verify", "--geom", "1,2"],
        vec!["verify", "--geom", "1e7,1.5,0,0"],
        vec!["spectrum", "--level", "lu176/3D1", "--stamp"],
        vec!["nonsense"],
    ] {
        let o = hfavg(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn species_file_from_environment_and_strictness() {
    let text = TOY_SPECIES.replace("\"gI\": -0.001,", "\"gI\": -0.001, \"comment\": \"x\",");
    let f = temp(&text);
    let run = |lax: bool| {
        let mut args = vec!["spectrum", "--level", "toy/e", "--steps", "2"];
        if lax {
            args.push("--lax");
        }
        Command::new(env!("CARGO_BIN_EXE_hfavg"))
            .args(&args)
            .env("HFAVG_SPECIES_PATH", path(&f))
            .output()
            .unwrap()
    };
    assert_eq!(run(false).status.code(), Some(2));
    let o = run(true);
    assert!(o.status.success());
    let (header, _) = records(&stdout(&o));
    assert_eq!(header, ["B_gauss", "e_F2_mF-2", "e_F2_mF0", "e_F2_mF2"]);
}

#[test]
fn stamp_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fip.json");
    let o = hfavg(&["fip", "--scheme", "lu175_fip", "--stamp", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["meta"]["tool"], "hfavg");
    let plain = json(&hfavg(&["fip", "--scheme", "lu175_fip"]));
    assert!(plain.get("meta").is_none());
}

#[test]
fn json_table_format() {
    let v = json(&hfavg(&["curve", "--scheme", "lu176_m0", "--format", "json", "--b-hi", "1", "--steps", "3"]));
    assert_eq!(v["columns"].as_array().unwrap().len(), 5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}
