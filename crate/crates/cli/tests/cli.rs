use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptcurves"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "invalid json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn construct_alpha_instance() {
    let out = run(&["construct", "--family", "F1_a2c2", "--alpha", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["curve"]["a4"], "-3025/4096");
    assert_eq!(v["curve"]["a6"], "5329/4096");
    assert_eq!(v["points"].as_object().unwrap().len(), 3);
    assert_eq!(v["points"]["R"]["x"], "1");
}

#[test]
fn construct_degenerate_alpha_exits_2() {
    let out = run(&["construct", "--family", "F1_a2c2", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn construct_frey_triple() {
    let out = run(&["construct", "--family", "F6_frey_ac", "--triple", "3,4,5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["curve"]["a2"], "16");
    assert_eq!(v["curve"]["a4"], "-225");
    assert_eq!(v["curve"]["a6"], "0");
    assert_eq!(v["points"].as_object().unwrap().len(), 4);
    assert_eq!(v["points"]["P1"]["x"], "225/16");
}

#[test]
fn construct_requires_exactly_one_parameter() {
    let out = run(&["construct", "--family", "F1_a2c2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "construct", "--family", "F1_a2c2", "--alpha", "2", "--t", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_single_triple() {
    let out = run(&["certify", "--family", "F7_frey_bc", "--triple", "3,4,5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "infinite");
    assert_eq!(v["witness"]["x"], "400/9");
    assert_eq!(v["certificate"], "non_integral_coordinates");
}

#[test]
fn certify_non_primitive_exits_2() {
    let out = run(&["certify", "--family", "F1_a2c2", "--triple", "6,8,10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_stream_covers_all_ppts() {
    let out = run(&["certify", "--family", "F1_a2c2", "--all-ppt-up-to", "30"]);
    assert!(out.status.success());
    let lines: Vec<&str> = std::str::from_utf8(&out.stdout)
        .unwrap()
        .lines()
        .collect();
    assert_eq!(lines.len(), 5);
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["verdict"], "infinite");
    }
}

#[test]
fn torsion_subgroup_listing() {
    let out = run(&["torsion", "--a4", "-1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["order"], 4);
    assert_eq!(v["points"][0], "infinity");
}

#[test]
fn torsion_point_order() {
    let out = run(&["torsion", "--a6", "1", "--x", "2", "--y", "3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "finite");
    assert_eq!(v["order"], 6);
}

#[test]
fn torsion_infinite_point() {
    let out = run(&[
        "torsion", "--a4", "-9", "--a6", "25", "--x", "25/9", "--y", "125/27",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "infinite");
}

#[test]
fn height_value() {
    let out = run(&[
        "height", "--a4", "-225", "--a6", "64", "--x", "0", "--y", "8",
        "--precision", "30",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(v["height"]
        .as_str()
        .unwrap()
        .starts_with("2.716336289885071777"));
}

#[test]
fn height_off_curve_exits_2() {
    let out = run(&[
        "height", "--a4", "-225", "--a6", "64", "--x", "1", "--y", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regulator_two_points() {
    let out = run(&[
        "regulator", "--a4", "-225", "--a6", "64", "--points", "0,8;15,8",
        "--precision", "30",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["independent"], true);
    assert_eq!(v["rank_lower_bound"], 2);
    assert!(v["det"].as_str().unwrap().starts_with("5.51652821732804"));
    assert_eq!(v["gram"].as_array().unwrap().len(), 2);
}

#[test]
fn reproduce_csv_is_stable_and_green() {
    let out = run(&["reproduce", "--precision", "30", "--format", "csv"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::str::from_utf8(&out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "section,instance,points,claimed,computed,rel_err,match");
    assert!(lines[2].ends_with("reference-inconsistent"));
    let yes = lines.iter().filter(|l| l.ends_with(",yes")).count();
    assert_eq!(yes, 8);

    let again = run(&["reproduce", "--precision", "30", "--format", "csv"]);
    assert_eq!(out.stdout, again.stdout, "reproduce output must be byte-stable");
}

#[test]
fn reproduce_json_all_ok() {
    let out = run(&["reproduce", "--precision", "30"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["all_ok"], true);
    assert_eq!(v["calibration"], "1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn sweep_alpha_range() {
    let out = run(&[
        "sweep", "--family", "F1_a2c2", "--alpha", "2..12", "--step", "1",
        "--precision", "30",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["count"], 11);
    assert_eq!(v["records"].as_array().unwrap().len(), 11);
    assert_eq!(v["records"][0]["rank_lower_bound"], 3);
    assert_eq!(v["records"][0]["param"], "alpha=2");
}

#[test]
fn sweep_skips_degenerate_values() {
    let out = run(&[
        "sweep", "--family", "F1_a2c2", "--alpha", "0..2", "--step", "1",
        "--precision", "30",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // alpha = 0 and alpha = 1 are degenerate; only alpha = 2 is computed.
    assert_eq!(v["count"], 1);
    assert_eq!(v["skipped"], 2);
}

#[test]
fn sweep_empty_effective_range_exits_2() {
    let out = run(&[
        "sweep", "--family", "F1_a2c2", "--alpha", "1..1", "--step", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_output_independent_of_worker_count() {
    let one = run(&[
        "sweep", "--family", "F5_b2c2", "--t", "2..6", "--step", "1",
        "--precision", "30", "--jobs", "1",
    ]);
    let four = run(&[
        "sweep", "--family", "F5_b2c2", "--t", "2..6", "--step", "1",
        "--precision", "30", "--jobs", "4",
    ]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["height", "--nonsense", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
