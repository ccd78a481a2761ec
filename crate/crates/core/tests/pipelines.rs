use cartan_forge::commands::{cmd_euler, cmd_internal, cmd_presymplectic, cmd_reduce, cmd_roundtrip};
use cartan_forge::problem::Problem;
use cartan_forge::Error;

const WAVE: &str = "[vars]\nindependent = x, t\ndependent = u\n[equations]\nu_tt = u_xx\n";

fn with(extra: &str) -> Problem {
    Problem::parse(&format!("{WAVE}{extra}")).unwrap()
}

fn output(r: &cartan_forge::report::Report, name: &str) -> String {
    r.sections[0]
        .outputs
        .iter()
        .find(|i| i.name == name)
        .map(|i| i.value.join("\n"))
        .unwrap_or_default()
}

#[test]
fn euler_outputs() {
    let r = cmd_euler(&with("[lagrangian]\n1/2*u_t^2 - 1/2*u_x^2\n"), None).unwrap();
    assert_eq!(output(&r, "E[u]"), "u_{xx} - u_{tt}");
    let r = cmd_euler(&with("[lagrangian]\n7/3\n"), None).unwrap();
    assert_eq!(output(&r, "E[u]"), "0");
    assert!(r.passed());
}

#[test]
fn pkdv_internal_passes() {
    let p = Problem::parse(
        "[vars]\nindependent = x, t\ndependent = v\n[equations]\nv_t = 1/2*v_x^2 + v_xxx\n[lagrangian]\n1/2*v_x*v_t - 1/6*v_x^3 + 1/2*v_xx^2\n",
    )
    .unwrap();
    let r = cmd_internal(&p, None).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(output(&r, "Omega-nonzero"), "yes");
}

#[test]
fn precondition_failures() {
    let err = cmd_internal(&with("[lagrangian]\nu\n"), None).unwrap_err();
    assert!(matches!(&err, Error::EulerNonvanishing(m) if m.contains("E[u] = 1")), "{err}");
    let err = cmd_roundtrip(&with("[form l]\nu*dx&dt\n"), None).unwrap_err();
    assert!(matches!(err, Error::NotInternal(_)));
    assert!(cmd_euler(&with(""), None).is_err());
}

#[test]
fn zero_form_round_trips() {
    let r = cmd_roundtrip(&with("[form l]\n0\n"), None).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    let r = cmd_presymplectic(&with("[form l]\n0\n"), None).unwrap();
    assert_eq!(output(&r, "Omega"), "0");
}

#[test]
fn reduce_restricts_forms() {
    let r = cmd_reduce(&with("[form w]\nu_tt*dx + th[u;tt]\n"), None).unwrap();
    assert_eq!(output(&r, "w"), "u_{xx}*dx + th[u;xx]");
}
