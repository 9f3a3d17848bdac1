use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_balayage"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("balayage-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).expect("column");
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn staircase_carleson_is_five() {
    let mu = scratch("mu4.json");
    let g = run(&["gen", "staircase", "--m", "4", "--h", "1", "-o", mu.to_str().unwrap()]);
    assert!(g.status.success());
    let c = run(&["carleson", mu.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    let out = stdout(&c);
    assert!(out.starts_with("Carl = 5 "), "{out}");
    assert!(out.contains("(-1, 0]"), "{out}");

    let j = run(&["--json", "carleson", mu.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["value"], "5");
    assert_eq!(v["value_f64"].as_f64(), Some(5.0));
}

#[test]
fn paraid_passes() {
    let o = run(&["verify", "paraid", "--depth", "5", "--samples", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS paraid"));
}

#[test]
fn bmo_of_constant_is_zero() {
    let flat = scratch("flat.json");
    std::fs::write(&flat, r#"{"breakpoints":[],"values":[]}"#).unwrap();
    let o = run(&["norm", "bmo", "--input", flat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("bmo = 0"), "{}", stdout(&o));
}

#[test]
fn gen_round_trips_and_is_deterministic() {
    let a = run(&["gen", "counterexample", "--n", "4", "--k", "-1"]);
    let b = run(&["gen", "counterexample", "--n", "4", "--k", "-1"]);
    assert_eq!(a.stdout, b.stdout);
    let f = scratch("b4.json");
    std::fs::write(&f, &a.stdout).unwrap();
    let mu = scratch("mu_b4.json");
    let g = run(&["gen", "measure-from-fn", "--input", f.to_str().unwrap(), "-o", mu.to_str().unwrap()]);
    assert!(g.status.success());
    // Carl(μ_b) = ‖b‖²_{BMO^d} = N
    let c = run(&["carleson", mu.to_str().unwrap()]);
    assert!(stdout(&c).starts_with("Carl = 4 "), "{}", stdout(&c));
    let n = run(&["norm", "bmod", "--input", f.to_str().unwrap()]);
    assert!(stdout(&n).starts_with("bmod^2 = 4 "), "{}", stdout(&n));
}

#[test]
fn sweep_columns() {
    let s = run(&["sweep", "staircase", "--from", "1", "--to", "10"]);
    assert!(s.status.success());
    let carl = column(&stdout(&s), "carl");
    let want: Vec<String> = (2..=11).map(|m| m.to_string()).collect();
    assert_eq!(carl, want);

    let d = run(&["sweep", "dyadic-counterexample", "--from", "1", "--to", "10"]);
    assert!(d.status.success());
    let bmod = column(&stdout(&d), "bmod");
    let want: Vec<String> = (1..=10).map(|n| n.to_string()).collect();
    assert_eq!(bmod, want);

    let again = run(&["sweep", "dyadic-counterexample", "--from", "1", "--to", "10"]);
    assert_eq!(d.stdout, again.stdout);
}

#[test]
fn balayage_csv() {
    let mu = scratch("mu2.json");
    run(&["gen", "staircase", "--m", "2", "-o", mu.to_str().unwrap()]);
    let csv = scratch("s.csv");
    let o = run(&[
        "balayage",
        mu.to_str().unwrap(),
        "--kind",
        "dyadic",
        "--csv",
        csv.to_str().unwrap(),
        "--range",
        "-2",
        "2",
        "--step",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("t,value"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn paraproduct_writes_matrix() {
    let b = scratch("b2.json");
    std::fs::write(&b, r#"{"breakpoints":["0","1/4","1/2","3/4","1"],"values":["1","-1","2","-2"]}"#).unwrap();
    let csv = scratch("pi.csv");
    let o = run(&["paraproduct", b.to_str().unwrap(), "--window", "0:0", "--depth", "4", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS identity"));
    assert!(std::fs::metadata(&csv).unwrap().len() > 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sweep", "staircase", "--from", "3", "--to", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "staircase", "--m", "2", "--h", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nosuch"]).status.code(), Some(2));
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["carleson", bad.to_str().unwrap()]).status.code(), Some(3));
    let missing = scratch("missing.json");
    assert_eq!(run(&["carleson", missing.to_str().unwrap()]).status.code(), Some(3));
    // the strict monotonicity claim fails at m = 2
    assert_eq!(run(&["verify", "pcounter"]).status.code(), Some(1));
}
