//! Command implementations shared by the CLI and the test suites.

use rayon::prelude::*;

use crate::corpus::{self, CorpusEntry};
use crate::equation::EqSystem;
use crate::error::{Error, Result};
use crate::form::DForm;
use crate::jet::JetSpace;
use crate::lagrangian::{
    action_from_internal, internal_of_lagrangian, is_internal_lagrangian, presymplectic_cocycle_residue,
    presymplectic_of, RoundTrip,
};
use crate::problem::Problem;
use crate::report::{Check, Item, Report, Section};
use crate::variational::{euler, is_self_adjoint, linearization, map_residual, noether_form, noether_identity_check};

fn terms(space: &JetSpace, f: &DForm) -> Vec<String> {
    f.term_list(space)
        .into_iter()
        .map(|(b, c)| format!("{b}: {c}"))
        .collect()
}

fn euler_items(space: &JetSpace, comps: &[crate::expr::Expr]) -> Vec<Item> {
    comps
        .iter()
        .zip(space.dep_names())
        .map(|(c, d)| Item::new(format!("E[{d}]"), c.to_text(space)))
        .collect()
}

fn require<'a, T>(v: Option<&'a T>, what: &str) -> Result<&'a T> {
    v.ok_or_else(|| Error::Problem(format!("problem file has no {what}")))
}

/// Euler–Lagrange expressions of the problem's Lagrangian.
pub fn cmd_euler(p: &Problem, max_order: Option<u32>) -> Result<Report> {
    let space = &p.space;
    let l = require(p.lagrangian.as_ref(), "[lagrangian] section")?;
    let e = euler(l, space.num_deps())?;
    let mut sec = Section::new("euler");
    sec.inputs.push(Item::new("lagrangian", l.to_text(space)));
    sec.outputs.extend(euler_items(space, e.components()));
    if p.has_equations() {
        let sys = p.system(max_order)?;
        sec.inputs.push(Item::lines("equations", sys.relation_texts()));
        let mut residue = Vec::new();
        for (c, d) in e.components().iter().zip(space.dep_names()) {
            let r = sys.reduce(c)?;
            if !r.is_zero() {
                residue.push(format!("E[{d}] = {}", r.to_text(space)));
            }
        }
        sec.checks
            .push(Check::new("euler-vanishes-on-equation", residue.is_empty()).residue(residue));
    }
    Ok(Report::new("euler", vec![sec]))
}

fn membership_checks(l: &DForm, sys: &EqSystem, sec: &mut Section) -> Result<()> {
    let space = sys.space();
    let m = is_internal_lagrangian(l, sys)?;
    sec.checks.push(
        Check::new("internal-membership", m.holds()).residue(terms(space, &m.residue)),
    );
    if m.holds() {
        let p = presymplectic_of(l, sys)?;
        sec.outputs.push(Item::new("Omega", p.omega.to_text(space)));
        let res = presymplectic_cocycle_residue(&p.omega, sys)?;
        sec.checks.push(
            Check::new("presymplectic-cocycle", res.is_zero()).residue(terms(space, &res)),
        );
        sec.outputs.push(Item::new(
            "Omega-nonzero",
            if p.is_nonzero() { "yes" } else { "no" },
        ));
    }
    Ok(())
}

/// The internal Lagrangian of an Euler–Lagrange pair, its membership and
/// presymplectic form.
pub fn cmd_internal(p: &Problem, max_order: Option<u32>) -> Result<Report> {
    let space = &p.space;
    let l = require(p.lagrangian.as_ref(), "[lagrangian] section")?;
    if !p.has_equations() {
        return Err(Error::Problem("problem file has no [equations] section".into()));
    }
    let sys = p.system(max_order)?;
    let class = internal_of_lagrangian(l, &sys)?;
    let mut sec = Section::new("internal");
    sec.inputs.push(Item::new("lagrangian", l.to_text(space)));
    sec.inputs.push(Item::lines("equations", sys.relation_texts()));
    if let Some(w) = &class.omega {
        sec.outputs.push(Item::new("omega_L", w.to_text(space)));
    }
    sec.outputs.push(Item::new("l", class.representative.to_text(space)));
    membership_checks(&class.representative, &sys, &mut sec)?;
    Ok(Report::new("internal", vec![sec]))
}

/// The form `l` of a problem: the `[form l]` section, the only form, or
/// the internal Lagrangian of `[lagrangian]`.
fn internal_form(p: &Problem, sys: &EqSystem) -> Result<(String, DForm)> {
    if let Some(f) = p.form("l") {
        return Ok(("form l".into(), f.clone()));
    }
    if let [(name, f)] = p.forms.as_slice() {
        return Ok((format!("form {name}"), f.clone()));
    }
    if !p.forms.is_empty() {
        return Err(Error::Problem("several [form] sections; name one of them `l`".into()));
    }
    let l = require(p.lagrangian.as_ref(), "[form l] or [lagrangian] section")?;
    Ok(("internal Lagrangian".into(), internal_of_lagrangian(l, sys)?.representative))
}

fn roundtrip_checks(rt: &RoundTrip, space: &JetSpace, sys: &EqSystem, sec: &mut Section) {
    sec.outputs.push(Item::new("L", rt.extension.form.to_text(space)));
    sec.outputs.push(Item::new("action", rt.action.to_text(space)));
    sec.outputs.push(Item::lines("A", rt.a.to_text(space)));
    sec.checks.push(
        Check::new("roundtrip-identity", rt.cert_identity && rt.nabla_matches)
            .certificate(format!("E[L'] = A(F) with F = ({})", sys.functions().iter().map(|f| f.to_text(space)).collect::<Vec<_>>().join(", ")))
            .certificate(format!("nabla(F, phi) = [i_E dL]_h: {}", rt.nabla_matches)),
    );
    let residue: Vec<String> = rt
        .euler
        .components()
        .iter()
        .filter_map(|c| sys.reduce(c).ok().filter(|r| !r.is_zero()))
        .map(|r| r.to_text(space))
        .collect();
    sec.checks
        .push(Check::new("roundtrip-vanishing", rt.cert_vanishing).residue(residue));
    sec.checks.push(
        Check::new("roundtrip-gauge", rt.cert_gauge.holds() && rt.omega_checks)
            .residue(terms(space, &rt.cert_gauge.residual))
            .certificate(format!("omega in I*C: {}", rt.omega_checks))
            .witness(format!("c = {}", rt.witness.c.to_text(space)))
            .witness(format!("rho = {}", rt.witness.rho.to_text(space))),
    );
}

/// Reconstructs an action from an internal Lagrangian with certificates.
pub fn cmd_roundtrip(p: &Problem, max_order: Option<u32>) -> Result<Report> {
    let space = &p.space;
    let sys = p.system(max_order)?;
    let (origin, l) = internal_form(p, &sys)?;
    let mut sec = Section::new("roundtrip");
    sec.inputs.push(Item::new(origin, l.to_text(space)));
    sec.inputs.push(Item::lines("equations", sys.relation_texts()));
    let rt = action_from_internal(&l, &sys)?;
    roundtrip_checks(&rt, space, &sys, &mut sec);
    Ok(Report::new("roundtrip", vec![sec]))
}

/// Restricts every form of the problem to the equation.
pub fn cmd_reduce(p: &Problem, max_order: Option<u32>) -> Result<Report> {
    let space = &p.space;
    if !p.has_equations() {
        return Err(Error::Problem("problem file has no [equations] section".into()));
    }
    let sys = p.system(max_order)?;
    let mut sec = Section::new("reduce");
    sec.inputs.push(Item::lines("equations", sys.relation_texts()));
    let failures = sys.confluence_failures()?;
    sec.checks
        .push(Check::new("confluence", failures.is_empty()).residue(failures));
    let mut all: Vec<(String, DForm)> = p.forms.clone();
    if let Some(l) = &p.lagrangian {
        all.insert(0, ("lagrangian".into(), l.clone()));
    }
    for (name, f) in &all {
        sec.inputs.push(Item::new(name.clone(), f.to_text(space)));
        sec.outputs.push(Item::new(name.clone(), sys.reduce_form(f)?.to_text(space)));
    }
    Ok(Report::new("reduce", vec![sec]))
}

/// The presymplectic form of `l` and the strict cocycle check.
pub fn cmd_presymplectic(p: &Problem, max_order: Option<u32>) -> Result<Report> {
    let space = &p.space;
    let sys = p.system(max_order)?;
    let (origin, l) = internal_form(p, &sys)?;
    let mut sec = Section::new("presymplectic");
    sec.inputs.push(Item::new(origin, l.to_text(space)));
    sec.inputs.push(Item::lines("equations", sys.relation_texts()));
    membership_checks(&l, &sys, &mut sec)?;
    Ok(Report::new("presymplectic", vec![sec]))
}

fn entry_section(entry: &CorpusEntry, max_order: u32) -> Section {
    let mut sec = Section::new(entry.name.clone());
    if let Err(e) = run_entry(entry, max_order, &mut sec) {
        sec.checks
            .push(Check::new("pipeline", false).residue(vec![e.to_string()]));
    }
    sec
}

fn run_entry(entry: &CorpusEntry, max_order: u32, sec: &mut Section) -> Result<()> {
    let space = entry.space();
    let sys = entry.system(max_order)?;
    let lag = entry.lagrangian_form()?;
    let m = space.num_deps();
    sec.inputs.push(Item::new("lagrangian", lag.to_text(&space)));
    sec.inputs.push(Item::lines("equations", sys.relation_texts()));

    let failures = sys.confluence_failures()?;
    sec.checks
        .push(Check::new("confluence", failures.is_empty()).residue(failures));

    let e = euler(&lag, m)?;
    sec.outputs.extend(euler_items(&space, e.components()));
    let lin = linearization(space.dim(), e.components(), m);
    sec.checks.push(Check::new("helmholtz-self-adjoint", is_self_adjoint(&lin)?));

    let nf = noether_form(&lag, m)?;
    sec.outputs.push(Item::new("omega_L", nf.omega.to_text(&space)));
    let ni = noether_identity_check(&lag, &nf.omega, m)?;
    sec.checks
        .push(Check::new("noether-identity", ni.holds()).residue(terms(&space, &ni.residual)));
    let mr = map_residual(&lag, &nf.omega, m)?;
    sec.checks
        .push(Check::new("variation-map", mr.is_zero()).residue(terms(&space, &mr)));

    let class = internal_of_lagrangian(&lag, &sys)?;
    sec.checks.push(Check::new("euler-vanishes-on-equation", true));
    sec.outputs.push(Item::new("l", class.representative.to_text(&space)));
    membership_checks(&class.representative, &sys, sec)?;

    let rt = action_from_internal(&class.representative, &sys)?;
    roundtrip_checks(&rt, &space, &sys, sec);
    Ok(())
}

/// Runs the full pipeline on corpus entries, in parallel with ordered output.
pub fn cmd_corpus(name: &str, max_order: Option<u32>) -> Result<Report> {
    let entries = corpus::lookup(name)?;
    let order = max_order.unwrap_or(crate::equation::DEFAULT_MAX_ORDER);
    let sections: Vec<Section> = entries
        .par_iter()
        .map(|e| entry_section(e, order))
        .collect();
    Ok(Report::new(format!("corpus {name}"), sections))
}
