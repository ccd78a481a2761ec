use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const WAVE: &str = "[vars]\nindependent = x, t\ndependent = u\n[equations]\nu_tt = u_xx\n[lagrangian]\n1/2*u_t^2 - 1/2*u_x^2\n";

fn problem(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cartan-forge"));
    cmd.args(args).env_remove("CARTAN_FORGE_MAX_ORDER");
    if let Some(v) = env {
        cmd.env("CARTAN_FORGE_MAX_ORDER", v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn euler_of_wave() {
    let f = problem(WAVE);
    let o = run(&["euler", f.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("output E[u]: u_{xx} - u_{tt}"), "{out}");
    assert!(out.contains("PASS  euler-vanishes-on-equation"));
}

#[test]
fn internal_and_roundtrip_pass_on_wave() {
    let f = problem(WAVE);
    let path = f.path().to_str().unwrap();
    for cmd in ["internal", "roundtrip", "presymplectic", "reduce"] {
        let o = run(&[cmd, path], None);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stdout(&o));
        assert!(stdout(&o).contains(", PASS\n"));
    }
    let o = run(&["internal", path], None);
    assert!(stdout(&o).contains("output Omega: dx&th[u]&th[u;t] + dt&th[u]&th[u;x]"));
}

#[test]
fn non_lagrangian_is_a_verdict_failure() {
    let f = problem(&WAVE.replace("1/2*u_t^2 - 1/2*u_x^2", "u"));
    let o = run(&["internal", f.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E[u] = 1"), "{}", stderr(&o));
}

#[test]
fn non_internal_form_names_offending_terms() {
    let f = problem(&format!("{WAVE}[form l]\nu*dx&dt\n"));
    let o = run(&["roundtrip", f.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dx&dt&th[u]"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_with_two() {
    let o = run(&["corpus", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("available: wave2d"));

    let f = problem(&WAVE.replace("u_tt = u_xx", "u_tt = u_q"));
    let o = run(&["euler", f.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":5:10: "), "{}", stderr(&o));

    let o = run(&["euler", "/nonexistent/problem"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bogus"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_parses() {
    let o = run(&["corpus", "wave2d", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["sections"][0]["title"], "wave2d");
    assert!(v.get("timing_ms").is_none());
    let check = &v["sections"][0]["checks"][0];
    for key in ["check", "verdict", "residue_terms", "certificates", "witnesses"] {
        assert!(check.get(key).is_some(), "{key}");
    }

    let o = run(&["corpus", "nope", "--json"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "FAIL");
}

#[test]
fn corpus_all_is_deterministic() {
    let a = run(&["corpus", "all"], None);
    let b = run(&["corpus", "all"], None);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["corpus", "all", "--json"], None);
    let b = run(&["corpus", "all", "--json"], None);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn max_order_flag_beats_environment() {
    // The pkdv pipeline cannot run under an order bound of 1.
    let low = run(&["corpus", "pkdv"], Some("1"));
    assert_ne!(low.status.code(), Some(0));
    let o = run(&["corpus", "pkdv", "--max-order", "12"], Some("1"));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["corpus", "pkdv", "--max-order", "1"], Some("12"));
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["corpus", "pkdv"], Some("12"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn timing_is_opt_in() {
    let o = run(&["corpus", "wave2d", "--timing"], None);
    assert!(stdout(&o).contains("elapsed: "));
    let o = run(&["corpus", "wave2d"], None);
    assert!(!stdout(&o).contains("elapsed"));
}
