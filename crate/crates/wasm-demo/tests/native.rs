use balayage_wasm::{counterexample_report, measure_report, staircase_report};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn staircase_carleson() {
    let v = parse(&staircase_report(4, "1").unwrap());
    assert_eq!(v["carl"], "5");
    assert_eq!(v["witness"], "(-1, 0]");
    assert_eq!(v["l1"], "62");
    assert!(v["poisson"].as_array().unwrap().len() > 100);
    assert!(staircase_report(40, "1").is_err());
    assert!(staircase_report(3, "-1").is_err());
}

#[test]
fn counterexample_bmod() {
    for n in 1..=5 {
        let v = parse(&counterexample_report(n).unwrap());
        assert_eq!(v["bmod_sq"], n.to_string());
        assert_eq!(v["carl"], n.to_string());
    }
    assert!(counterexample_report(0).is_err());
}

#[test]
fn single_atom_sandwich() {
    let v = parse(&measure_report(r#"{"atoms":[{"x":"1/2","y":"1/2","mass":"1"}],"segments":[]}"#).unwrap());
    assert_eq!(v["carl_exact"], "2");
    assert_eq!(v["pass"], true);
    assert!(measure_report("{").is_err());
}
