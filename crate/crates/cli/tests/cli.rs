use std::process::{Command, Output};

use serde_json::Value;

fn wucat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wucat"))
        .args(args)
        .env("WUCAT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON report on stdout")
}

#[test]
fn default_operad_grid_passes() {
    let o = wucat(&["verify-operad"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["seed"], 0);
    let cases = r["operad"]["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 8);
    for c in cases {
        assert_eq!(c["h0_class"], true);
        assert_eq!(c["at_top"]["0"], 1);
        assert_eq!(c["at_top"]["-1"], 0);
    }
    assert!(r.get("millis").is_none());
}

#[test]
fn injected_sign_flip_is_caught() {
    let o = wucat(&["verify-operad", "--mode", "o", "--n-range", "2", "--q-max", "2", "--fault", "flip-merge-sign"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    let f = &r["operad"]["first_failure"];
    assert_eq!(f["kind"], "square_nonzero");
    assert!(!f["witness"].as_str().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL operad"));
}

#[test]
fn category_suites_pass_and_agree_across_fields() {
    let o = wucat(&["verify-categories"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["suites"].as_array().unwrap().len(), 10);
    let cross = r["cross_field"].as_array().unwrap();
    assert_eq!(cross.len(), 5);
    assert!(cross.iter().all(|c| c["agree"] == true));
}

#[test]
fn short_k_truncation_is_refused() {
    let o = wucat(&["verify-categories", "--len", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too small"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_configurations_exit_2() {
    for args in [
        &["verify-operad", "--window=0..-2"][..],
        &["verify-operad", "--q-max", "0"],
        &["verify-operad", "--n-range", "x"],
        &["table", "--field", "both"],
        &["verify-operad", "--mode", "nope"],
    ] {
        assert_eq!(wucat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn table_shape_and_agreement() {
    let args = ["--n-range", "1..2", "--q-max", "3", "--window=-2..0"];
    let t = wucat(&[&["table"][..], &args].concat());
    assert_eq!(t.status.code(), Some(0));
    let text = String::from_utf8(t.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mode,N,Q_max,degree,dim,stabilized,basis_size,millis"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // 2 modes × 2 arities × 4 truncations × 3 degrees
    assert_eq!(rows.len(), 2 * 2 * 4 * 3);
    assert!(rows.iter().all(|r| r[7] == "0"));

    let v = wucat(&[&["verify-operad"][..], &args].concat());
    assert_eq!(v.status.code(), Some(0));
    let r = json(&v);
    for c in r["operad"]["cases"].as_array().unwrap() {
        let mode = if c["mode"] == "O" { "O" } else { "Oprime" };
        let n = c["arity"].to_string();
        for (d, dim) in c["at_top"].as_object().unwrap() {
            let row = rows
                .iter()
                .find(|r| r[0] == mode && r[1] == n && r[2] == "3" && r[3] == d)
                .unwrap_or_else(|| panic!("{mode} {n} {d}"));
            assert_eq!(row[4], dim.to_string());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["table", "--n-range", "0..2", "--q-max", "3"],
        vec!["verify-operad", "--n-range", "1..2", "--q-max", "2", "--field", "prime"],
        vec!["verify-categories", "--field", "rational", "--seed", "5"],
    ] {
        let mut outs = Vec::new();
        for k in 0..2 {
            let p = dir.path().join(format!("{}-{k}", args[0]));
            let mut a = args.clone();
            a.extend(["--out", p.to_str().unwrap()]);
            let o = wucat(&a);
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            outs.push(std::fs::read(&p).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{args:?}");
        assert!(!outs[0].is_empty());
    }
    let o = wucat(&["verify-categories", "--field", "rational", "--seed", "5"]);
    assert_eq!(json(&o)["seed"], 5);
}

#[test]
fn timings_fill_the_millis_column() {
    let o = wucat(&["table", "--mode", "o", "--n-range", "3", "--q-max", "3", "--timings"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).any(|l| !l.ends_with(",0")), "{text}");
}
