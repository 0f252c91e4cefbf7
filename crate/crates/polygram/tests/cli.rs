//! Integration tests of the command-line surface and its exit-code
//! contract, driven through the library entry point.

use std::fs;
use std::path::Path;

use polygram::cli;
use polygram::polymat::PolyMatrix;

fn run(args: &[&str]) -> i32 {
    cli::run(args.iter().map(|s| s.to_string()))
}

fn e1_factor_json() -> String {
    serde_json::json!({
        "rows": 1,
        "cols": 2,
        "degree": 1,
        "coeffs_re": [[1.0, 0.0], [1.0, 0.0]],
        "coeffs_im": [[0.0, 0.0], [2.0, 0.0]],
    })
    .to_string()
}

#[test]
fn generate_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run(&["generate", "--d", "1", "--N", "2", "--P", "1", "--seed", "7", "--out", out]);
    assert_eq!(code, 0);
    for name in ["hrep.json", "factor.json", "gram.json", "manifest.json"] {
        assert!(dir.path().join(name).exists(), "missing {}", name);
    }
}

#[test]
fn generate_scale_zero_is_real() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run(&[
        "generate", "--d", "2", "--N", "3", "--P", "2", "--seed", "1", "--scale", "0", "--out", out,
    ]);
    assert_eq!(code, 0);
    let x: PolyMatrix =
        serde_json::from_str(&fs::read_to_string(dir.path().join("factor.json")).unwrap()).unwrap();
    assert_eq!(x.max_imag(), 0.0);
}

#[test]
fn generate_rejects_bad_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run(&["generate", "--d", "3", "--N", "2", "--P", "1", "--out", out]);
    assert_eq!(code, 1);
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    ["hrep.json", "factor.json", "gram.json"]
        .iter()
        .map(|n| (n.to_string(), fs::read(dir.join(n)).unwrap()))
        .collect()
}

#[test]
fn generate_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for dir in [&d1, &d2] {
        let code = run(&[
            "generate", "--d", "2", "--N", "4", "--P", "2", "--seed", "99", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(read_outputs(d1.path()), read_outputs(d2.path()));
}

#[test]
fn classify_e1_exits_complex_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("factor.json");
    fs::write(&input, e1_factor_json()).unwrap();
    let out = dir.path().join("classification.json");
    let code = run(&[
        "classify", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 10);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "ComplexOnly");
}

#[test]
fn classify_real_factor_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("factor.json");
    let json = serde_json::json!({
        "rows": 1,
        "cols": 2,
        "degree": 1,
        "coeffs_re": [[1.0, 0.0], [1.0, 1.0]],
        "coeffs_im": [[0.0, 0.0], [0.0, 0.0]],
    });
    fs::write(&input, json.to_string()).unwrap();
    let out = dir.path().join("classification.json");
    let code = run(&[
        "classify", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "RealFactorable");
    assert!(v["real_factor"].is_object());
}

#[test]
fn classify_non_real_gramian_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("factor.json");
    let json = serde_json::json!({
        "rows": 1,
        "cols": 2,
        "degree": 1,
        "coeffs_re": [[1.0, 1.0], [0.0, 0.0]],
        "coeffs_im": [[0.0, 0.0], [1.0, 0.0]],
    });
    fs::write(&input, json.to_string()).unwrap();
    let out = dir.path().join("classification.json");
    let code = run(&[
        "classify", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 4);
}

#[test]
fn recover_corrupted_json_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("factor.json");
    fs::write(&input, "{not json").unwrap();
    let code = run(&["recover", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn recover_from_generated_factor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["generate", "--d", "1", "--N", "3", "--P", "1", "--seed", "5", "--out", out]),
        0
    );
    let hrep_out = dir.path().join("recovered.json");
    let code = run(&[
        "recover",
        "--input",
        dir.path().join("factor.json").to_str().unwrap(),
        "--out",
        hrep_out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(hrep_out).unwrap()).unwrap();
    assert_eq!(v["canonical"], true);
}

#[test]
fn recover_real_input_gives_zero_w() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&[
            "generate", "--d", "1", "--N", "3", "--P", "2", "--seed", "5", "--scale", "0", "--out", out,
        ]),
        0
    );
    let hrep_out = dir.path().join("recovered.json");
    assert_eq!(
        run(&[
            "recover",
            "--input",
            dir.path().join("factor.json").to_str().unwrap(),
            "--out",
            hrep_out.to_str().unwrap(),
        ]),
        0
    );
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(hrep_out).unwrap()).unwrap();
    for block in v["W"].as_array().unwrap() {
        for entry in block.as_array().unwrap() {
            assert!(entry.as_f64().unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn roundtrip_command() {
    assert_eq!(
        run(&["roundtrip", "--d", "2", "--N", "4", "--P", "1", "--seed", "3"]),
        0
    );
}

#[test]
fn scan_empty_grid_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let code = run(&["scan", "--grid", "", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let code = run(&[
            "scan", "--grid", "1,1,2;1,1,3", "--trials", "2", "--seed", "4", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(out1).unwrap(), fs::read(out2).unwrap());
}

#[test]
fn solve_skew_zero_rhs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let c = dir.path().join("c.json");
    fs::write(&a, r#"{"rows":1,"cols":2,"data":[1.0,0.0]}"#).unwrap();
    fs::write(&c, r#"{"rows":2,"cols":2,"data":[0.0,0.0,0.0,0.0]}"#).unwrap();
    let out = dir.path().join("solution.json");
    let code = run(&[
        "solve-skew", "--a", a.to_str().unwrap(), "--c", c.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    for entry in v["data"].as_array().unwrap() {
        assert!(entry.as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn solve_skew_non_skew_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let c = dir.path().join("c.json");
    fs::write(&a, r#"{"rows":1,"cols":2,"data":[1.0,0.0]}"#).unwrap();
    fs::write(&c, r#"{"rows":2,"cols":2,"data":[1.0,0.0,0.0,0.0]}"#).unwrap();
    let code = run(&["solve-skew", "--a", a.to_str().unwrap(), "--c", c.to_str().unwrap()]);
    assert_eq!(code, 5);
}

#[test]
fn tol_env_variable_is_honored() {
    // a hugely loosened tolerance still classifies E1 as complex-only
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("factor.json");
    fs::write(&input, e1_factor_json()).unwrap();
    let out = dir.path().join("classification.json");
    let code = run(&[
        "--tol", "10",
        "classify", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 10);
}
