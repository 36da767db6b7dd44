use std::path::Path;
use std::process::{Command, Output};

use thinning::measures::JointMeasure;
use thinning::profile::{build_joint, kink_profile};

fn thinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinlab")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = thinlab(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// Data rows (after the header) split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn meta<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key}: ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap_or_else(|| panic!("no {key}"))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn thin_matches_library_and_identity_reemits() {
    let dir = tempfile::tempdir().unwrap();
    let mu = build_joint(&kink_profile(0.3).unwrap(), 3).unwrap();
    let input = write(dir.path(), "mu3.json", &mu.to_json(false));
    let out = JointMeasure::from_json(&stdout(&["thin", &input, "--k", "2"])).unwrap();
    assert!(out.tv_distance(&mu.thin_to(2).unwrap()).unwrap() < 1e-15);
    let reparsed = JointMeasure::from_json(&std::fs::read_to_string(&input).unwrap()).unwrap();
    assert_eq!(stdout(&["thin", &input, "--k", "3"]), reparsed.to_json(false));
}

#[test]
fn malformed_and_out_of_range_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"alphabet\": [\"-\", \"+\"], \"n\": 2, ");
    assert_eq!(thinlab(&["thin", &bad, "--k", "1"]).status.code(), Some(2));
    assert_eq!(thinlab(&["thin", "/nonexistent/file.json", "--k", "1"]).status.code(), Some(2));

    let mu = build_joint(&kink_profile(0.5).unwrap(), 2).unwrap();
    let ok = write(dir.path(), "mu2.json", &mu.to_json(false));
    let o = thinlab(&["thin", &ok, "--k", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());

    assert_eq!(thinlab(&["asep", "profile", "--q", "0.4", "--rho", "0.5"]).status.code(), Some(3));
    assert_eq!(thinlab(&["spin", "gibbs", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(thinlab(&["spin", "gibbs", "--beta", "-1", "--N", "3"]).status.code(), Some(3));
}

#[test]
fn dense_cap_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_thinlab"))
        .args(["spin", "ground", "--b", "2", "--N", "8"])
        .env(thinlab::MAX_DENSE_ENV, "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_thinlab"))
        .args(["spin", "ground", "--b", "2", "--N", "8"])
        .env(thinlab::MAX_DENSE_ENV, "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_and_check_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let prof = write(
        dir.path(),
        "p.json",
        r#"{"alphabet": ["a", "b", "c"], "breakpoints": [0, 0.25, 1], "weights": [[0.5, 0.5, 0], [0, 0.2, 0.8]]}"#,
    );
    let built = JointMeasure::from_json(&stdout(&["build", "--profile", &prof, "--n", "3"])).unwrap();
    assert_eq!(built.n(), 3);

    let kink = stdout(&["check", "--kink", "0.5", "--K", "5"]);
    assert_eq!(meta(&kink, "result"), "PASS");
    let mixed = stdout(&["check", "--profile", &prof, "--profile", &prof, "--mix", "0.3,0.7", "--K", "4"]);
    assert_eq!(meta(&mixed, "result"), "PASS");

    // a corrupted family: level 2 replaced by an i.i.d. product
    let mu1 = build_joint(&kink_profile(0.5).unwrap(), 1).unwrap();
    let mu2 = JointMeasure::iid(thinning::Alphabet::plus_minus(), &[0.9, 0.1], 2).unwrap();
    let f1 = write(dir.path(), "f1.json", &mu1.to_json(false));
    let f2 = write(dir.path(), "f2.json", &mu2.to_json(true));
    let bad = stdout(&["check", "--family", &f2, &f1]);
    assert_eq!(meta(&bad, "result"), "FAIL");
    assert!(meta(&bad, "worst").starts_with("n = 2, k = 1"));
}

#[test]
fn spin_examples() {
    let phase = stdout(&["spin", "phase", "--b", "2"]);
    assert!(meta(&phase, "phase").contains("unique kink"));
    let r = rows(&phase);
    assert_eq!(r[0][2], "5.0000000000000000e-1");

    let sub = stdout(&["spin", "subadd", "--b", "1", "--beta", "1", "--Nmax", "12"]);
    assert!(rows(&sub).iter().all(|r| r[2].parse::<f64>().unwrap() <= 1e-9));

    let ground = stdout(&["spin", "ground", "--b", "1", "--N", "10"]);
    let configs: Vec<String> = rows(&ground).into_iter().map(|r| r[0].clone()).collect();
    for k in 0..=10 {
        let kink: Vec<&str> = (0..10).map(|i| if i < k { "-1" } else { "+1" }).collect();
        assert!(configs.contains(&kink.join(" ")), "missing kink {k}");
    }

    let g = stdout(&["spin", "gibbs", "--b", "0", "--beta", "1", "--N", "2"]);
    let omega: f64 = meta(&g, "log_partition").parse().unwrap();
    assert!((omega - 1f64.cosh().ln()).abs() < 1e-14);
    let gap: f64 = meta(&g, "energy_identity_gap").parse().unwrap();
    assert!(gap < 1e-15);

    let dir = tempfile::tempdir().unwrap();
    let table = write(
        dir.path(),
        "phi.json",
        r#"{"alphabet": ["-1","+1"], "arity": 2, "table": {"(-1,-1)": -0.5, "(-1,+1)": 0.5, "(+1,-1)": 0.5, "(+1,+1)": -0.5}}"#,
    );
    let p = stdout(&["spin", "pressure", "--interaction", &table, "--beta", "1", "--Nmax", "6"]);
    let direct = stdout(&["spin", "pressure", "--b", "0", "--beta", "1", "--Nmax", "6"]);
    assert_eq!(rows(&p), rows(&direct));
}

#[test]
fn asep_examples() {
    let st = stdout(&["asep", "stationary", "--q", "0.75", "--N", "2", "--n", "1"]);
    let r = rows(&st);
    assert_eq!(r[0], vec!["1 0", "2.5000000000000000e-1"]);
    assert_eq!(r[1], vec!["0 1", "7.5000000000000000e-1"]);

    let prof = stdout(&["asep", "profile", "--q", "0.75", "--rho", "0.5"]);
    let mid = rows(&prof).into_iter().find(|r| r[0] == "5.0000000000000000e-1").unwrap();
    assert!((mid[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-15);

    let flat = stdout(&["asep", "profile", "--q", "0.5", "--rho", "0.3", "--step", "0.25"]);
    assert!(meta(&flat, "assumption").contains("flat"));
    assert!(rows(&flat).iter().all(|r| r[2] == "2.9999999999999999e-1"));

    let cmp = stdout(&["asep", "compare", "--q", "0.75", "--rho", "0.5", "--N", "6,8,10,12", "--summary"]);
    let l1: Vec<f64> = rows(&cmp).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(l1.windows(2).all(|w| w[1] <= w[0]));

    let res = stdout(&["asep", "residual"]);
    let worst: f64 = meta(&res, "max_abs_residual").parse().unwrap();
    assert!(worst <= 1e-8);
    assert_eq!(rows(&res).len(), 3 * 3 * 19);

    let sweep = stdout(&["asep", "figure1", "--q-sweep", "0.6:0.9:0.15", "--step", "0.5"]);
    assert_eq!(sweep.lines().find(|l| l.starts_with('t')).unwrap(), "t,phi_q0.600,phi_q0.750,phi_q0.900");
}

#[test]
fn figure1_shape() {
    let fig = stdout(&["asep", "figure1"]);
    assert!(meta(&fig, "assumption").contains("0.5"));
    let header = fig.lines().find(|l| l.starts_with('t')).unwrap();
    assert_eq!(header.split(',').count(), 20);
    assert!(header.ends_with("phi_q0.975"));
    assert_eq!(rows(&fig).len(), 101);
}

#[test]
fn sampling_is_reproducible_and_seeded() {
    let args = ["sample", "moments", "--n", "5", "--samples", "20000", "--seed", "7"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert_eq!(meta(&a, "seed"), "7");
    assert_ne!(a, stdout(&["sample", "moments", "--n", "5", "--samples", "20000", "--seed", "8"]));

    let second = stdout(&["sample", "moments", "--n", "1", "--samples", "1000", "--second"]);
    let r = &rows(&second)[0];
    assert_eq!(r[6], "1.0000000000000000e0");

    let lln = stdout(&["sample", "lln", "--kink", "0.5", "--samples", "20000", "--seed", "3"]);
    assert_eq!(rows(&lln).len(), 4);

    let joint = stdout(&["sample", "joint", "--kink", "0.5", "--n", "2", "--samples", "100000", "--seed", "1"]);
    let tv: f64 = meta(&joint, "tv").parse().unwrap();
    assert!(tv <= 5.0 * (4.0f64 / 1e5).sqrt());
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pressure.csv");
    let p = path.to_str().unwrap();
    let o = thinlab(&["spin", "pressure", "--b", "1", "--beta", "0.5", "--Nmax", "5", "--out", p]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("N,omega,omega_over_N,difference"));
}
