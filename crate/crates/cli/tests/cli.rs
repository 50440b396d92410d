use std::process::{Command, Output};

fn qdimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdimer")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn domain_file(name: &str) -> String {
    format!("{}/../../domains/{name}.dom", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn partition_of_hexagon_file() {
    let o = qdimer(&["partition", "--domain", &domain_file("hex222")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "Z = 20/1"), "{}", stdout(&o));
}

#[test]
fn report_echoes_configuration() {
    let o = qdimer(&["partition", "--domain", "hex1,1,1", "--qij", "2,3,1/5", "--seed", "7"]);
    let out = stdout(&o);
    assert!(out.contains("# domain: hex1,1,1"));
    assert!(out.contains("q12=2/1 q23=3/1 q31=1/5"));
    assert!(out.contains("# seed: 7"));
    assert!(out.contains("Z = 11/5"), "{out}");
}

#[test]
fn generic_resolution() {
    let o = qdimer(&["resolution", "--domain", "hex2,2,2", "--qij", "2,3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("generators: 2 @ deg 1; relations: 2 @ deg 2"), "{out}");
    assert!(out.contains("R:\n  r0: ["));
}

#[test]
fn nongeneric_resolution_is_a_verification_failure() {
    let o = qdimer(&["resolution", "--domain", "hex3,3,3", "--q", "1", "--marked", "1,1,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("shape: nongeneric"));
}

#[test]
fn bad_domain_exits_with_one() {
    let dir = std::env::temp_dir().join(format!("qdimer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.dom");
    // A cut triangle that reaches outside the big one.
    std::fs::write(&path, "A 0 0 -1\nB -1 0 0\n").unwrap();
    let o = qdimer(&["domain-check", "--domain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(qdimer(&["partition", "--domain", "nowhere"]).status.code(), Some(1));
    assert_eq!(qdimer(&["partition", "--domain", "hex2,2,2", "--qij", "1,2"]).status.code(), Some(1));
    assert_eq!(qdimer(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--domain", "hex3,3,3", "--q", "3/2", "--count", "3", "--seed", "11"];
    let a = qdimer(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, qdimer(&args).stdout);
    let mcmc = ["sample", "--domain", "hex3,3,3", "--method", "mcmc", "--burnin", "20", "--steps", "7", "--seed", "11"];
    assert_eq!(qdimer(&mcmc).stdout, qdimer(&mcmc).stdout);
}

#[test]
fn heatmap_writes_artifacts() {
    let dir = std::env::temp_dir().join(format!("qdimer-heatmap-{}", std::process::id()));
    let o = qdimer(&["heatmap", "--domain", "hex4,4,4", "--samples", "20", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.join("heatmap.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 48);
    assert!(std::fs::read_to_string(dir.join("heatmap.svg")).unwrap().starts_with("<svg"));
    assert!(dir.join("tiling.svg").exists());
}

#[test]
fn boundary_and_move_reports() {
    let o = qdimer(&["boundary", "--domain", "hex3,3,3", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recovered heights [-3, 3]"));
    let o = qdimer(&["move", "--domain", "u11m", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("verdict: pass\n"));
}

#[test]
fn selftest_single_criterion() {
    let o = qdimer(&["selftest", "--criterion", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion 2 PASS"));
}
