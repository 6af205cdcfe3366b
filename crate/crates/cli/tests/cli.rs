use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_deltajet")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}: {out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn verify_examples_pass() {
    assert_eq!(run(&["verify", "gm-section", "--p", "5", "--stages", "3"]).0, 0);
    assert_eq!(run(&["verify", "elliptic-integrality", "--p", "5", "--a", "1", "--b", "1", "--deg", "150"]).0, 0);
    assert_eq!(run(&["verify", "list"]).0, 0);
}

#[test]
fn compute_outputs() {
    let v = json(&["compute", "gm-psi", "--terms", "6"]);
    assert_eq!(v["schema"], "deltajet/1");
    assert_eq!(v["terms"], 6);

    let v = json(&["compute", "ell-ap", "--p", "5", "--a", "1", "--b", "1"]);
    assert_eq!(v["ap"], -3);
    assert_eq!(v["class"], "ordinary");

    let v = json(&["compute", "ell-psi"]);
    for k in ["ap", "class", "lambda1", "lambda0", "integrality", "profile"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["integrality"]["ok"], true);

    let v = json(&["compute", "ql-cover", "--j", "2"]);
    for k in ["j", "degree", "leading_unit", "derivative_class", "filtration_ok"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["degree"], 5);

    let v = json(&["compute", "mod-eisenstein", "--k", "4", "--q-deg", "10"]);
    for k in ["form", "q_deg", "p_prec", "coefficients"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }

    let v = json(&["compute", "limit-perfection", "--poly", "x^2*x' + 3", "--i", "2"]);
    assert_eq!(v["element"]["stage"], 2);
    assert!(v["element"]["poly"].is_string());
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&["verify", "no-such-suite"]).0, 4);
    assert_eq!(run(&["compute", "gm-psi", "--p", "4"]).0, 4);
    assert_eq!(run(&["frobnicate"]).0, 4);
    // math: psi is only defined on units
    assert_eq!(run(&["compute", "gm-eval", "--u", "10"]).0, 2);
    // budget: y_4 needs jet order 4
    let (code, out) = run(&["verify", "gm-yn", "--jet-order", "2", "--json"]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reports"][0]["status"], "skipped-budget");
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("runtime");
        for r in v["reports"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("runtime");
        }
        v
    };
    let args = ["verify", "delta-axioms", "--json", "--seed", "7"];
    let a = strip(json(&args));
    let b = strip(json(&args));
    assert_eq!(a, b);
    let r = &a["reports"][0];
    for k in ["lemma", "parameters", "status", "defect"] {
        assert!(r.get(k).is_some(), "missing {k}");
    }
    assert_eq!(r["parameters"]["seed"], 7);
}
