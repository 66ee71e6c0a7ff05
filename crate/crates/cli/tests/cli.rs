use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use certqi::errorlab::{l2_error, smooth};
use certqi::mesh::{build_crisscross, Domain};
use certqi::quasinterp::{nodal_interpolant, quasi_interpolate, ConformingSpace};

fn certqi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_certqi")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect()).collect()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn run_writes_tables_deterministically() {
    let (a, b) = (scratch("run_a"), scratch("run_b"));
    for dir in [&a, &b] {
        let out = certqi(&["run", "--case", "smooth", "--levels", "4", "--seed", "9", "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["errors_H1.txt", "errors_L2.txt", "ratios.txt", "summary.json"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert_eq!(x, std::fs::read(b.join(file)).unwrap(), "{file} differs between runs");
    }
    let h1 = std::fs::read_to_string(a.join("errors_H1.txt")).unwrap();
    assert!(h1.starts_with("nrdofs LB GB QI LI\n"));
    assert_eq!(rows(&h1).len(), 4);
    assert_eq!(rows(&std::fs::read_to_string(a.join("errors_L2.txt")).unwrap()).len(), 4);

    let ratios = std::fs::read_to_string(a.join("ratios.txt")).unwrap();
    assert!(ratios.starts_with("nrdofs eH1 EH1 eL2 EL2\n"));
    let r = rows(&ratios);
    assert_eq!(r.len(), 4);
    for row in &r {
        assert!(row[2] >= row[1] && row[4] >= row[3], "{row:?}");
    }

    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["audits"]["global_bounds"], true);
    assert_eq!(summary["slopes"]["window"], 3);
    let qi = summary["slopes"]["h1"]["qi"].as_f64().unwrap();
    assert!((qi + 0.5).abs() <= 0.05);
    assert!(summary["projection_audit"]["max_relative_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(summary["quadrature_consistency"]["h1_diff"].as_array().unwrap().len(), 4);
}

#[test]
fn run_on_medit_mesh() {
    let dir = scratch("run_medit");
    let mesh = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/unstructured.mesh");
    let out = certqi(&[
        "run", "--case", "smooth", "--levels", "2", "--degree", "2", "--mesh", mesh.to_str().unwrap(), "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&std::fs::read_to_string(dir.join("ratios.txt")).unwrap()).len(), 2);
}

#[test]
fn invalid_input_fails_with_message() {
    let dir = scratch("run_bad");
    let out = certqi(&["run", "--case", "nope", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown case"));
    let out = certqi(&["constants", "--mesh", "/no/such/file.mesh"]);
    assert!(!out.status.success());
    let out = certqi(&["run", "--case", "smooth", "--levels", "1", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constants_csv() {
    let out = certqi(&["constants", "--mesh", "crisscross:1:unit_square"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("vertex,boundary,rho,lambda,rho_lambda\n"));
    let r = csv_rows(&text);
    assert_eq!(r.len(), 5);
    for row in &r {
        assert!(row[2] >= 1.0 + 1.0 / std::f64::consts::PI);
    }

    let out = certqi(&["constants", "--mesh", "crisscross:4:square2"]);
    let r = csv_rows(&String::from_utf8(out.stdout).unwrap());
    // interior vertices split into grid points and cell centers, each class congruent
    let mesh = build_crisscross(4, Domain::Square2).unwrap();
    let mut classes: [Vec<f64>; 2] = Default::default();
    for row in r.iter().filter(|row| row[1] == 0.0) {
        let x = mesh.vertex(row[0] as usize);
        classes[usize::from((x[0] * 2.0).fract() != 0.0)].push(row[3]);
    }
    for class in classes {
        assert!(!class.is_empty());
        for l in &class {
            assert!((l - class[0]).abs() <= 1e-8 * class[0]);
        }
    }
}

#[test]
fn interpolate_zero_and_boundary() {
    for degree in ["1", "2", "3"] {
        let out = certqi(&["interpolate", "--mesh", "crisscross:2:lshape", "--function", "zero", "--degree", degree]);
        assert!(out.status.success());
        for row in csv_rows(&String::from_utf8(out.stdout).unwrap()) {
            assert_eq!(row[4], 0.0);
        }
        let out = certqi(&["interpolate", "--mesh", "crisscross:2:lshape", "--function", "lshape", "--degree", degree]);
        for row in csv_rows(&String::from_utf8(out.stdout).unwrap()).iter().filter(|r| r[3] == 1.0) {
            assert_eq!(row[4], 0.0);
        }
    }
}

#[test]
fn interpolate_smooth_nodal_error_below_inverse_estimate() {
    let out = certqi(&["interpolate", "--mesh", "crisscross:8:square2", "--function", "smooth"]);
    assert!(out.status.success());
    let u = smooth();
    let max_nodal = csv_rows(&String::from_utf8(out.stdout).unwrap())
        .iter()
        .filter(|r| r[3] == 0.0)
        .map(|r| (r[4] - u.value([r[1], r[2]])).abs())
        .fold(0.0, f64::max);

    // On P1, ‖v‖²_K ≥ (|K|/12) max_i v_i², so the nodal values of Ju − Iu are
    // at most sqrt(12/|K|_min) ‖Ju − Iu‖ ≤ sqrt(12/|K|_min)(‖u − Ju‖ + ‖u − Iu‖).
    let mesh = build_crisscross(8, Domain::Square2).unwrap();
    let space = ConformingSpace::new(&mesh, 1).unwrap();
    let ju = space.to_broken(&quasi_interpolate(&u, &mesh, &space, 12).unwrap()).unwrap();
    let iu = space.to_broken(&nodal_interpolant(&u, &space)).unwrap();
    let e = l2_error(&u, &mesh, &ju, 16).unwrap().total() + l2_error(&u, &mesh, &iu, 16).unwrap().total();
    let a_min = (0..mesh.n_triangles()).map(|t| mesh.area(t)).fold(f64::INFINITY, f64::min);
    let tol = (12.0 / a_min).sqrt() * e;
    assert!(max_nodal > 0.0 && max_nodal <= tol, "{max_nodal} vs {tol}");
}
