use std::path::PathBuf;
use std::process::{Command, Output};

use nilsep::rational::ratio;
use nilsep::{registry, GroupElement, SetDescriptor};
use serde_json::Value;

fn nilsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("nilsep-cli-{}-{name}", std::process::id()))
}

#[test]
fn orbit_csv_matches_library() {
    let o = nilsep(&["orbit", "--spec", "heisenberg", "--g", "1/2,1/2,0", "--set", "1..8"]);
    assert_eq!(o.status.code(), Some(0));
    let h = registry::heisenberg();
    let g = GroupElement(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]);
    let set = SetDescriptor::parse("1..8").unwrap().prefix(8).unwrap();
    let expected = nilsep::orbit::orbit(&h, &g, &h.identity(), &set).unwrap().to_csv();
    assert_eq!(stdout(&o), expected);
    assert_eq!(stdout(&o).lines().count(), 9);
}

#[test]
fn orbit_with_base_point() {
    let o = nilsep(&[
        "orbit", "--spec", "heisenberg", "--g", "1/3,1/5,0", "--base", "0,0,1/3", "--set", "squares", "--N", "4",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["base"], serde_json::json!(["0", "0", "1/3"]));
    assert_eq!(v["exponents"], serde_json::json!([1, 4, 9, 16]));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["orbit", "--spec", "heisenberg", "--g", "1/0,1,0", "--set", "1..8"][..],
        &["orbit", "--spec", "heisenberg", "--g", "1,2", "--set", "1..8"],
        &["orbit", "--spec", "heisenberg", "--g", "1,2,3", "--set", "squares"],
        &["orbit", "--spec", "no-such-group", "--g", "1", "--set", "1..3"],
        &["nice-census", "--set", "squares", "--N", "4"],
        &["separate", "--A", "pow2", "--B", "pow2+2n"],
        &["i0", "--t", "2n", "--N", "6"],
        &["classify", "--set", "n^^2"],
    ] {
        let o = nilsep(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn nice_census_single_row() {
    let o = nilsep(&["nice-census", "--spec", "heisenberg", "--set", "squares", "--N", "1..1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "N,realized_nice_sets,two_pow_N,rN_c3,eps,M,resolution,spec_id");
    assert_eq!(lines[1..], ["1,2,2,1,1/4,1,21,heisenberg"]);
}

#[test]
fn nice_census_cross_check() {
    let o = nilsep(&[
        "nice-census", "--spec", "heisenberg", "--set", "squares", "--N", "4..6", "--res", "7", "--cross-check",
        "--refine", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(v["rows"][0]["refined_nice_sets"].is_u64());
}

#[test]
fn separate_certifies_parity_of_powers() {
    let o = nilsep(&["separate", "--A", "pow2", "--B", "pow2+1", "--dmax", "2", "--den", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "found");
    assert_eq!(v["certificate"]["alpha"], serde_json::json!(["1/2"]));
    assert_eq!(v["certificate"]["gap"], "1/2");
    assert_eq!(v["certificate"]["exact"], true);
}

#[test]
fn separate_reports_not_found() {
    let o = nilsep(&["separate", "--A", "pow2", "--B", "pow2+2n@3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "not_found");
    assert_eq!(v["best"]["gap"], "0");
}

#[test]
fn separate_given_rotation_and_nilrotation() {
    let o = nilsep(&["separate", "--A", "odd", "--B", "even", "--alpha", "1/4"]);
    assert_eq!(json(&o)["gap"], "1/4");
    let o = nilsep(&[
        "separate", "--A", "2,4", "--B", "1,3,5", "--spec", "abelian1", "--g", "1/2", "--eps", "1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["separable"], true);
    assert_eq!(v["min_distance"], "1/2");
    let o = nilsep(&["separate", "--A", "pow2", "--F", "0,1,2"]);
    assert_eq!(json(&o)["all_certified"], true);
}

#[test]
fn i0_partition_verifies() {
    let o = nilsep(&["i0", "--N", "12", "--square-lift"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verification"]["failures"], serde_json::json!([]));
    assert_eq!(v["square_lift"]["chain_holds"], true);
    let pieces: usize = v["partition"]["pieces"].as_array().unwrap().iter().map(|p| p.as_array().unwrap().len()).sum();
    assert_eq!(pieces, 24);
}

#[test]
fn regions_counts() {
    let o = nilsep(&["regions", "--poly", "x^2 - y^2 - 1", "--poly", "y^2 - x^2 - 1", "--res", "301"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["count"], 5);
    assert_eq!(v["bound"], "64");
    let o = nilsep(&["regions", "--poly", "x^2 - 2", "--poly", "x^3 - 3*x + 1", "--box", "-2,2", "--res", "801", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["exact_count"], 6);
}

#[test]
fn coarse_grid_disagreement_exits_with_one() {
    let o = nilsep(&["regions", "--poly", "x^2 - 1/1000000", "--box", "-1,1", "--res", "8", "--exact"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["exact_count"], 3);
}

#[test]
fn regions_separability_mode() {
    let o = nilsep(&["regions", "--spec", "abelian1", "--set", "1,2", "--res", "401", "--delta", "1/10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["census"]["region_count"], 5);
}

#[test]
fn classify_reports_both_tests() {
    let v = json(&nilsep(&["classify", "--set", "pow2", "--N", "30"]));
    assert_eq!(v["lacunary"], true);
    assert_eq!(v["lacunary_ratio"], "2");
    assert_eq!(v["sublacunarity"]["consistent"], false);
}

#[test]
fn spec_file_and_degree_policy() {
    let path = temp("heis.spec");
    std::fs::write(&path, "3 2\n0\n1:s1*t2\n").unwrap();
    let p = path.to_str().unwrap();
    let strict = nilsep(&["orbit", "--spec", p, "--g", "1/2,1/2,0", "--set", "1..4"]);
    assert_eq!(strict.status.code(), Some(2));
    let relaxed = nilsep(&["orbit", "--spec", p, "--allow-degree-k", "--g", "1/2,1/2,0", "--set", "1..4"]);
    let builtin = nilsep(&["orbit", "--spec", "heisenberg", "--g", "1/2,1/2,0", "--set", "1..4"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(relaxed.status.code(), Some(0));
    let body = |o: &Output| stdout(o).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&relaxed), body(&builtin));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = temp("run.cfg");
    std::fs::write(&cfg, "# census\nspec = heisenberg\nset = squares\nN = 3..4\nres = 5\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = nilsep(&["nice-census", "--config", c]);
    let overridden = nilsep(&["nice-census", "--config", c, "--res", "7"]);
    std::fs::remove_file(&cfg).unwrap();
    assert_eq!(from_file.status.code(), Some(0));
    assert!(stdout(&from_file).lines().nth(1).unwrap().ends_with(",5,heisenberg"));
    assert!(stdout(&overridden).lines().nth(1).unwrap().ends_with(",7,heisenberg"));
}

#[test]
fn out_file_and_determinism() {
    let path = temp("cert.json");
    let p = path.to_str().unwrap();
    let args = ["separate", "--A", "squares", "--B", "2*n^2", "--seed", "7", "--threads", "1", "--out", p];
    assert_eq!(nilsep(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    assert_eq!(nilsep(&args).status.code(), Some(0));
    let second = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(first, second);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert!(v["status"].is_string());
}

#[test]
fn csv_only_where_available() {
    let o = nilsep(&["classify", "--set", "squares", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}
