use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holofield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn group_info_s3() {
    let out = run(&["--group", "S3", "group-info"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
    let dims: Vec<u64> = v["characters"]["dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 1, 2]);
    assert_eq!(v["eta"][0], "1/2");
    assert_eq!(v["kappa"][0], "2/3");
}

#[test]
fn group_info_z2_and_table_file() {
    let v = json(&run(&["--group", "Z2", "group-info"]));
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    let v = json(&run(&["--group", &data("z3_table.json"), "group-info"]));
    assert_eq!(v["order"], 3);
    assert_eq!(v["characters"]["indicators"], serde_json::json!([1, 0, 0]));
}

#[test]
fn malformed_table_is_rejected() {
    let out = run(&["--group", &data("bad_table.json"), "group-info"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid group"));
    assert_eq!(code(&run(&["--group", "S5", "group-info"])), 2);
}

#[test]
fn faces_of_map_files() {
    let v = json(&run(&["--map", &data("torus_map.json"), "faces"]));
    assert_eq!((v["face_count"].as_u64(), v["euler_characteristic"].as_i64()), (Some(1), Some(0)));
    assert_eq!(v["faces"][0]["darts"], serde_json::json!([1, 2, -1, -2]));
    assert_eq!((v["orientable"].as_bool(), v["genus"].as_u64()), (Some(true), Some(2)));
    let v = json(&run(&["--map", &data("theta_map.json"), "faces"]));
    assert_eq!(v["face_count"], 3);
    assert_eq!(v["euler_characteristic"], 2);
    let out = run(&["--map", &data("bad_alpha_map.json"), "faces"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn partition_routes_agree() {
    for surface in ["disk_transposition.json", "torus.json", "klein.json"] {
        for via in ["formula", "graph"] {
            let out = run(&["--group", "S3", "--surface", &data(surface), "--via", via, "partition"]);
            assert_eq!(code(&out), 0, "{surface} {via}");
            let v = json(&out);
            assert_eq!(v["pass"], true);
            assert_eq!(v["route"], via);
        }
    }
    let graph = json(&run(&["--group", "S3", "--surface", &data("torus.json"), "--map", &data("torus_map.json"), "--via", "graph", "partition"]));
    assert_eq!(graph["pass"], true);
    assert_eq!(graph["edges"], 2);
}

#[test]
fn partition_rejects_chiral_nonorientable() {
    let out = run(&["--group", "Z3", "--levy", &data("z3_chiral.json"), "--surface", &data("klein.json"), "partition"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("inversion-invariant"));
    let out = run(&["--group", "Z3", "--levy", &data("z3_chiral.json"), "--surface", &data("torus.json"), "partition"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn full_suite_passes_on_s3() {
    let out = run(&["--group", "S3", "--time", "1", "verify", "all"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["max_abs_diff"].as_f64().unwrap() < 1e-9);
    let cases = v["cases"].as_array().unwrap();
    for suite in ["surgery", "semigroup", "kappa-eta", "subdivision", "tame", "holo-mono", "counting"] {
        assert!(cases.iter().any(|c| c["name"].as_str().unwrap().starts_with(suite)), "{suite}");
    }
    assert_eq!(v["tolerances"]["tail_tol"], 1e-12);
}

#[test]
fn perturbed_kernel_fails() {
    let out = run(&["--group", "S3", "--time", "1", "verify", "semigroup", "--perturb", "0.01"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["max_abs_diff"].as_f64().unwrap() > 1e-4);
    assert!(v["cases"].as_array().unwrap().iter().all(|c| c["pass"] == false));
    let out = run(&["--group", "S3", "verify", "holo-mono", "--perturb", "0.01"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn chiral_suite_skips_nonorientable_cases() {
    let out = run(&["--group", "Z3", "--levy", &data("z3_chiral.json"), "verify", "all"]);
    assert_eq!(code(&out), 0);
    assert!(!json(&out)["skipped"].as_array().unwrap().is_empty());
}

#[test]
fn cap_exceeded_exit_code() {
    let out = run(&["--group", "S3", "--surface", &data("torus.json"), "--cap", "10", "--via", "graph", "partition"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_config_exit_code() {
    assert_eq!(code(&run(&["--group", "S3", "--tol", "0", "group-info"])), 2);
    assert_eq!(code(&run(&["--group", "S3", "--cap", "0.5", "group-info"])), 2);
    assert_eq!(code(&run(&["--group", "S3", "partition"])), 2);
}

#[test]
fn identical_config_gives_identical_output() {
    let args = ["--group", "S3", "--surface", &data("disk_transposition.json"), "--seed", "11", "cover", "sample", "--samples", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--group", "S3", "--surface", &data("disk_transposition.json"), "--seed", "12", "cover", "sample", "--samples", "5"]);
    assert_ne!(a.stdout, c.stdout);
    let args = ["--group", "S3", "verify", "all"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn cover_commands() {
    let disk = data("disk_transposition.json");
    let out = run(&["--group", "S3", "--surface", &disk, "cover", "enumerate", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    // c·d = 1 with c a transposition: d = c⁻¹ = c
    assert_eq!(lines.len(), 3);
    for l in &lines {
        assert_eq!(l["c"], l["d"]);
        assert_eq!(l["aut"], 2);
    }
    let v = json(&run(&["--group", "S3", "--surface", &disk, "cover", "mass"]));
    assert_eq!(v["pass"], true);
    let v = json(&run(&["--group", "S3", "--surface", &disk, "--levy", &data("s3_transpositions.json"), "cover", "verify-holo-mono"]));
    assert_eq!(v["pass"], true);
    let out = run(&["--group", "S3", "--map", &data("torus_map.json"), "--time", "1", "cover", "sample", "--mode", "quenched", "--samples", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn csv_output() {
    let out = run(&["--group", "S3", "--time", "1", "verify", "semigroup", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let mut r = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(r.headers().unwrap(), vec!["command", "case", "max_abs_diff", "pass", "lhs", "rhs"]);
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|row| &row[3] == "true"));
}
