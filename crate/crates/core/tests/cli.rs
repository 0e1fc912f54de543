use std::path::Path;
use std::process::{Command, Output};

use csslr::data::save_dataset;
use csslr::simulation::{generate_dataset, StudySpec};

fn csslr(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csslr"))
        .args(args)
        .env("CSSLR_OUT_DIR", out_dir)
        .output()
        .unwrap()
}

fn noise_csv(dir: &Path) -> String {
    let mut spec = StudySpec::builtin("table6").unwrap();
    spec.n_nuisance = 5;
    let path = dir.join("noise.csv");
    save_dataset(&generate_dataset(&spec, 0), &path).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn select_on_noise_keeps_the_constant_model() {
    let dir = tempfile::tempdir().unwrap();
    let data = noise_csv(dir.path());
    let out = dir.path().join("run");
    let res = csslr(
        &[
            "select",
            "--data",
            &data,
            "--response",
            "I",
            "--config",
            "CSSLR1b",
            "--out",
            out.to_str().unwrap(),
            "--trace-format",
            "structured",
        ],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("1 final model(s)"));
    assert!(stdout.contains("(constant)"));

    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("config hash: "));
    assert!(report.contains("NoImprovement"));
    let trace = std::fs::read_to_string(out.join("trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 5);
    for line in trace.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["step"], 1);
        assert_eq!(rec["verdict"], "Rejected");
    }
}

#[test]
fn select_uses_config_files_and_the_out_dir_variable() {
    let dir = tempfile::tempdir().unwrap();
    let data = noise_csv(dir.path());
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "profile = \"CSSLR2b\"\nmax_steps = 3\n").unwrap();
    let res = csslr(
        &["select", "--data", &data, "--response", "I", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(dir.path().join("report.txt").is_file());
    assert!(dir.path().join("trace.txt").is_file());
}

#[test]
fn select_validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = noise_csv(dir.path());

    let res = csslr(&["select", "--data", &data, "--config", "CSSLR1a"], dir.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("--response"));

    let signs = dir.path().join("signs.csv");
    std::fs::write(&signs, "name,expected_sign\nR1,-\nX9,+\n").unwrap();
    let res = csslr(
        &["select", "--data", &data, "--response", "I", "--config", "CSSLR1a", "--signs", signs.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("X9"));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "profile = \"CSSLR1a\"\np_calib = 1.5\n").unwrap();
    let res = csslr(
        &["select", "--data", &data, "--response", "I", "--config", cfg.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("out of range"));

    let res = csslr(&["select", "--data", &data, "--response", "y", "--config", "CSSLR1a"], dir.path());
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn simulate_prints_table_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t3.csv");
    let res = csslr(
        &[
            "simulate",
            "--study",
            "table3",
            "--replications",
            "1",
            "--k",
            "200",
            "--methods",
            "CSSLR1b,AIC",
            "--out",
            csv.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let header: Vec<&str> = stdout.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["Method", "P_s", "A_s", "P_w", "A_w", "P_nd", "A_nd"]);
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("Method,P_s,A_s,P_w,A_w,P_nd,A_nd,runs,failures\n"));
    for line in body.lines().skip(1) {
        let p_s: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(p_s == 0.0 || p_s == 100.0);
    }
}

#[test]
fn simulate_reads_spec_files_and_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("tiny.toml");
    std::fs::write(
        &spec,
        "n_strong = 0\nn_weak = 1\nn_nuisance = 2\nmu_weak = 0.5\nk = 100\nreplications = 2\nseed = 9\nmethods = [\"Coeff\"]\n",
    )
    .unwrap();
    let res = csslr(&["simulate", "--study", spec.to_str().unwrap()], dir.path());
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(dir.path().join("tiny.csv").is_file());

    let res = csslr(&["simulate", "--study", "table3", "--methods", "Lasso2"], dir.path());
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("Lasso2") && err.contains("CSSLR1a") && err.contains("AIC"));

    std::fs::write(&spec, "n_strong = 1\nbogus = 3\n").unwrap();
    let res = csslr(&["simulate", "--study", spec.to_str().unwrap()], dir.path());
    assert_eq!(res.status.code(), Some(2));
}
