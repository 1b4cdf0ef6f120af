//! Runs the `frobcat` binary against the shipped data files.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use frobcat::io::{AlgebraFile, CategoryFile};
use frobcat::report::ReportDocument;

use common::data_dir;

fn frobcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobcat"))
        .args(args)
        .env_remove("FROBCAT_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn data(file: &str) -> String {
    data_dir().join(file).to_string_lossy().into_owned()
}

/// Runs with `--format machine` and parses the report from stdout.
fn machine(args: &[&str]) -> (i32, ReportDocument) {
    let mut all = args.to_vec();
    all.extend(["--format", "machine"]);
    let out = frobcat(&all);
    let doc = ReportDocument::from_json(&String::from_utf8_lossy(&out.stdout))
        .unwrap_or_else(|e| panic!("{args:?}: {e}\nstderr: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), doc)
}

fn table<'d>(doc: &'d ReportDocument, name: &str) -> &'d Vec<Vec<usize>> {
    &doc.tables.iter().find(|t| t.name == name).unwrap_or_else(|| panic!("no table {name}")).entries
}

#[test]
fn every_shipped_category_checks_out() {
    for name in frobcat::library::BUNDLED {
        let out = frobcat(&["check-category", &data(&format!("{name}.toml"))]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        let out = frobcat(&["check-category", &format!("bundled:{name}")]);
        assert_eq!(out.status.code(), Some(0), "bundled:{name}");
    }
}

#[test]
fn corrupted_f_entry_exits_1_and_names_the_pentagon() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = CategoryFile::from_toml(&fs::read_to_string(data("fibonacci.toml")).unwrap()).unwrap();
    let tau = file.labels.iter().position(|l| l == "tau").unwrap();
    let rec = file.f.iter_mut().find(|r| r.abcd == [tau; 4]).unwrap();
    rec.value[0] += 0.1;
    let path = dir.path().join("broken.toml");
    fs::write(&path, file.to_toml().unwrap()).unwrap();

    let (code, doc) = machine(&["check-category", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(!doc.passed);
    let pent = doc.residuals.iter().find(|r| r.name == "pentagon").unwrap();
    assert!(!pent.passed && pent.value >= 1e-3);
    assert!(pent.details.iter().any(|d| d.contains("tau")), "{:?}", pent.details);
}

#[test]
fn unreadable_or_malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.toml");
    fs::write(&junk, "labels = [\"1\"\nnot toml").unwrap();
    for args in [
        vec!["check-category", junk.to_str().unwrap()],
        vec!["check-category", "/nonexistent/cat.toml"],
        vec!["check-category", "bundled:nope"],
        vec!["torus", "/nonexistent/alg.toml"],
        vec!["check-algebra", junk.to_str().unwrap()],
        vec!["no-such-command"],
    ] {
        assert_eq!(frobcat(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn algebra_files_pass_and_the_negative_example_fails() {
    for file in common::ALGEBRA_FILES {
        let out = frobcat(&["check-algebra", &data(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let (code, doc) = machine(&["check-algebra", &data("semion_candidate.toml")]);
    assert_eq!(code, 1);
    let assoc = doc.residuals.iter().find(|r| r.name == "associativity").unwrap();
    assert!(!assoc.passed && assoc.value >= 0.1);
}

#[test]
fn torus_tables() {
    let (code, doc) = machine(&["torus", &data("toric_code_1e.toml")]);
    assert_eq!(code, 0);
    assert_eq!(table(&doc, "Z"), &vec![vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0; 4], vec![0; 4]]);

    let (code, doc) = machine(&["torus", &data("ising_cardy.toml")]);
    assert_eq!(code, 0);
    assert_eq!(table(&doc, "Z"), &vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);

    let (code, doc) = machine(&["torus", &data("su2_4_d.toml")]);
    assert_eq!(code, 0);
    let z = table(&doc, "Z");
    assert_eq!(z[2][2], 2);
    assert_eq!([z[0][0], z[0][4], z[4][0], z[4][4]], [1; 4]);
    assert_eq!(z.iter().flatten().sum::<usize>(), 6);

    // the human rendering carries the same numbers
    let out = frobcat(&["torus", &data("toric_code_1e.toml")]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS") && text.contains('Z'), "{text}");
}

#[test]
fn modules_and_annulus() {
    let (code, doc) = machine(&["modules", &data("toric_code_1e.toml")]);
    assert_eq!(code, 0);
    assert_eq!(table(&doc, "simple modules (underlying multiplicities)").len(), 2);

    // for the unit algebra over Fibonacci the annulus matrices are the fusion matrices
    let (code, doc) = machine(&["annulus", &data("fibonacci_cardy.toml")]);
    assert_eq!(code, 0);
    let ring = frobcat::library::fibonacci().unwrap();
    for i in 0..2 {
        let a = table(&doc, &format!("A_{}", ring.ring().name(i)));
        for m in 0..2 {
            for n in 0..2 {
                assert_eq!(a[m][n], ring.n(m, i, n), "A_{i}[{m}][{n}]");
            }
        }
    }
}

#[test]
fn defects_over_the_unit_count_fusion_trees() {
    let (code, doc) = machine(&["defects", &data("fibonacci_cardy.toml"), "--left", "1", "--right", "1"]);
    assert_eq!(code, 0, "{doc:?}");
    let cat = frobcat::library::fibonacci().unwrap();
    let z = table(&doc, "Z[X1|X1]");
    for i in 0..2 {
        for j in 0..2 {
            // dim Hom(U_i ⊗ τ ⊗ U_j, τ)
            let want: usize = (0..2).map(|k| cat.n(i, 1, k) * cat.n(k, j, 1)).sum();
            assert_eq!(z[i][j], want, "({i},{j})");
        }
    }
}

#[test]
fn output_file_matches_stdout_and_tolerance_flag_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = frobcat(&["torus", &data("z3_cardy.toml"), "--format", "machine", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = ReportDocument::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, ReportDocument::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap());
    assert_eq!(table(&written, "Z"), &vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);

    assert_eq!(frobcat(&["check-category", "bundled:ising", "--tolerance=-1"]).status.code(), Some(2));
    assert_eq!(frobcat(&["check-category", "bundled:ising", "--tolerance", "1e-30"]).status.code(), Some(1));
}

fn assert_same_tree(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = fs::read_dir(b).unwrap().map(|e| e.unwrap().file_name()).collect();
    other.sort();
    assert_eq!(names, other);
    for n in names {
        assert_eq!(fs::read_to_string(a.join(&n)).unwrap(), fs::read_to_string(b.join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn export_reproduces_the_shipped_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = frobcat(&["export", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_same_tree(dir.path(), &data_dir());
}

#[test]
fn shipped_files_round_trip() {
    for entry in fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if let Ok(f) = CategoryFile::from_toml(&text) {
            assert_eq!(CategoryFile::from_toml(&f.to_toml().unwrap()).unwrap(), f);
            let cat = f.to_category(1e-9).unwrap();
            assert_eq!(CategoryFile::from_category(&cat), f, "{path:?}");
        } else {
            let a = AlgebraFile::from_toml(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
            assert_eq!(AlgebraFile::from_toml(&a.to_toml().unwrap()).unwrap(), a, "{path:?}");
        }
    }
}
