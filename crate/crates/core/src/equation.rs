//! PDE systems in solved form `u^i_β = R^i`, reduction to internal
//! coordinates of the infinite prolongation, and the extension of forms
//! from the equation to the ambient jet space.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::form::{Basis, Covector, DForm};
use crate::jet::{AuxFamily, JetSpace, JetVar};
use crate::multi_index::MultiIndex;
use crate::parse::parse_expr;

/// Default bound on the derivative order reached during reduction.
pub const DEFAULT_MAX_ORDER: u32 = 12;

/// One relation `u^dep_leading = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub dep: usize,
    pub leading: MultiIndex,
    pub rhs: Expr,
}

impl Relation {
    pub fn leading_var(&self) -> JetVar {
        JetVar::fiber(self.dep, self.leading)
    }

    /// `F = u^dep_leading − rhs`.
    pub fn function(&self) -> Expr {
        Expr::var(self.leading_var()) - &self.rhs
    }
}

/// A solved-form system with cached normal forms of its parametric
/// derivatives.
pub struct EqSystem {
    space: JetSpace,
    relations: Vec<Relation>,
    max_order: u32,
    normal: RwLock<HashMap<JetVar, Expr>>,
    witnesses: RwLock<HashMap<JetVar, Expr>>,
}

impl Clone for EqSystem {
    fn clone(&self) -> Self {
        EqSystem::build(self.space.clone(), self.relations.clone(), self.max_order)
    }
}

impl fmt::Debug for EqSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EqSystem")
            .field("relations", &self.relation_texts())
            .field("max_order", &self.max_order)
            .finish()
    }
}

/// `e − normal form = Δ(F)`, stored as an expression linear in the `psi`
/// family where `psi[r]_γ` stands for `D_γ(F^r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub op: Expr,
}

impl IdealWitness {
    /// Expands `Δ(F)` in jet coordinates.
    pub fn evaluate(&self, system: &EqSystem) -> Expr {
        system.substitute_relations(&self.op)
    }

    pub fn is_zero(&self) -> bool {
        self.op.is_zero()
    }
}

impl EqSystem {
    pub fn new(space: JetSpace, relations: Vec<Relation>) -> Result<Self> {
        Self::with_max_order(space, relations, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(space: JetSpace, relations: Vec<Relation>, max_order: u32) -> Result<Self> {
        let n = space.dim();
        for (k, r) in relations.iter().enumerate() {
            if r.dep >= space.num_deps() || r.leading.dim() != n {
                return Err(Error::InvalidSystem(format!("relation {} does not fit the variables", k + 1)));
            }
            if relations[..k]
                .iter()
                .any(|q| q.dep == r.dep && q.leading == r.leading)
            {
                return Err(Error::InvalidSystem(format!(
                    "{} is the leading derivative of two relations",
                    space.var_name(&r.leading_var())
                )));
            }
            if r.rhs.contains_family(AuxFamily::Phi) || r.rhs.contains_family(AuxFamily::Psi) {
                return Err(Error::InvalidSystem("right-hand sides may not contain auxiliary variables".into()));
            }
        }
        let system = Self::build(space, relations, max_order);
        for r in &system.relations {
            for v in r.rhs.vars() {
                if let Some((q, _)) = system.match_relation(&v) {
                    return Err(Error::InvalidSystem(format!(
                        "right-hand side of {} contains {}, a derivative of the leading term {}",
                        system.space.var_name(&r.leading_var()),
                        system.space.var_name(&v),
                        system.space.var_name(&system.relations[q].leading_var()),
                    )));
                }
            }
        }
        Ok(system)
    }

    fn build(space: JetSpace, relations: Vec<Relation>, max_order: u32) -> Self {
        EqSystem {
            space,
            relations,
            max_order,
            normal: RwLock::new(HashMap::new()),
            witnesses: RwLock::new(HashMap::new()),
        }
    }

    /// Parses `u_tt = u_xx` style relations.
    pub fn parse(space: JetSpace, lines: &[&str], max_order: u32) -> Result<Self> {
        let mut relations = Vec::new();
        for line in lines {
            relations.push(parse_relation(&space, line)?);
        }
        Self::with_max_order(space, relations, max_order)
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// `F^r = u^r_β − R^r` for every relation.
    pub fn functions(&self) -> Vec<Expr> {
        self.relations.iter().map(Relation::function).collect()
    }

    pub fn relation_texts(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                format!(
                    "{} = {}",
                    self.space.var_name(&r.leading_var()),
                    r.rhs.to_text(&self.space)
                )
            })
            .collect()
    }

    /// First relation whose leading derivative divides the jet `v`, with the
    /// remaining multi-index.
    fn match_relation(&self, v: &JetVar) -> Option<(usize, MultiIndex)> {
        let JetVar::Fiber { dep, alpha } = v else {
            return None;
        };
        self.relations.iter().enumerate().find_map(|(k, r)| {
            if r.dep == *dep as usize {
                alpha.checked_sub(&r.leading).map(|g| (k, g))
            } else {
                None
            }
        })
    }

    /// Whether `v` is a coordinate on the equation (not a prolonged leading derivative).
    pub fn is_internal(&self, v: &JetVar) -> bool {
        self.match_relation(v).is_none()
    }

    fn check_order(&self, v: &JetVar) -> Result<()> {
        if v.order() > self.max_order {
            return Err(Error::OrderBound {
                order: v.order(),
                max: self.max_order,
            });
        }
        Ok(())
    }

    /// Normal form `N(v)` of a single jet coordinate.
    fn normal_var(&self, v: &JetVar, stack: &mut Vec<JetVar>) -> Result<Option<Expr>> {
        let Some((r, gamma)) = self.match_relation(v) else {
            return Ok(None);
        };
        if let Some(hit) = self.normal.read().unwrap().get(v) {
            return Ok(Some(hit.clone()));
        }
        self.check_order(v)?;
        if stack.contains(v) {
            return Err(Error::NonTerminating(self.space.var_name(v)));
        }
        stack.push(*v);
        let result = if gamma.is_zero() {
            self.reduce_inner(&self.relations[r].rhs, stack)
        } else {
            let k = gamma.first_direction().unwrap();
            let lower = JetVar::Fiber {
                dep: self.relations[r].dep as u8,
                alpha: v.multi_index().unwrap().decremented(k).unwrap(),
            };
            let base = self
                .normal_var(&lower, stack)?
                .expect("lower derivative is still reducible");
            self.reduce_inner(&base.total_derivative(k), stack)
        };
        stack.pop();
        let nf = result?;
        self.normal.write().unwrap().insert(*v, nf.clone());
        Ok(Some(nf))
    }

    fn reduce_inner(&self, e: &Expr, stack: &mut Vec<JetVar>) -> Result<Expr> {
        let mut images = BTreeMap::new();
        for v in e.vars() {
            if let Some(nf) = self.normal_var(&v, stack)? {
                images.insert(v, nf);
            }
        }
        if images.is_empty() {
            return Ok(e.clone());
        }
        Ok(e.substitute(|v| images.get(v).cloned()))
    }

    /// Rewrites every prolonged leading derivative into internal coordinates.
    pub fn reduce(&self, e: &Expr) -> Result<Expr> {
        self.reduce_inner(e, &mut Vec::new())
    }

    /// The restricted total derivative `D̄_i` on functions on the equation.
    pub fn total_derivative(&self, e: &Expr, i: usize) -> Result<Expr> {
        self.reduce(&e.total_derivative(i))
    }

    /// `W_v` with `v − N(v) = W_v(F)`.
    fn witness_var(&self, v: &JetVar) -> Result<Option<Expr>> {
        let Some((r, gamma)) = self.match_relation(v) else {
            return Ok(None);
        };
        if let Some(hit) = self.witnesses.read().unwrap().get(v) {
            return Ok(Some(hit.clone()));
        }
        let w = if gamma.is_zero() {
            // v − N(v) = F^r, since right-hand sides are already internal.
            Expr::var(JetVar::aux(AuxFamily::Psi, r, gamma))
        } else {
            let k = gamma.first_direction().unwrap();
            let lower = JetVar::Fiber {
                dep: self.relations[r].dep as u8,
                alpha: v.multi_index().unwrap().decremented(k).unwrap(),
            };
            let w_lower = self.witness_var(&lower)?.expect("reducible");
            let n_lower = self.normal_var(&lower, &mut Vec::new())?.expect("reducible");
            // v − N(v) = D_k(v' − N(v')) + (D_k N(v') − N(v))
            let (_, inner) = self.reduce_witnessed(&n_lower.total_derivative(k))?;
            w_lower.total_derivative(k) + inner.op
        };
        self.witnesses.write().unwrap().insert(*v, w.clone());
        Ok(Some(w))
    }

    /// Normal form together with a witness of `e − N(e) ∈ I`.
    pub fn reduce_witnessed(&self, e: &Expr) -> Result<(Expr, IdealWitness)> {
        let mut current = e.clone();
        let mut witness = Expr::zero();
        for v in e.vars() {
            let Some(nf) = self.normal_var(&v, &mut Vec::new())? else {
                continue;
            };
            let wv = self.witness_var(&v)?.unwrap();
            // current(v) − current(N) = (v − N)·q with q the divided difference.
            let coeffs = current.coefficients_in(&v);
            let vv = Expr::var(v);
            let mut q = Expr::zero();
            for (k, ck) in coeffs.iter().enumerate().skip(1) {
                for j in 0..k {
                    q += ck * &(vv.pow(j as u32) * nf.pow((k - 1 - j) as u32));
                }
            }
            witness += &q * &wv;
            current = current.substitute(|w| (*w == v).then(|| nf.clone()));
        }
        Ok((current, IdealWitness { op: witness }))
    }

    /// Substitutes `psi[r]_γ ↦ D_γ(F^r)`.
    pub fn substitute_relations(&self, op: &Expr) -> Expr {
        let fs = self.functions();
        op.substitute(|v| match *v {
            JetVar::Aux {
                family: AuxFamily::Psi,
                index,
                alpha,
            } => Some(
                fs.get(index as usize)
                    .map(|f| f.total_derivative_multi(&alpha))
                    .unwrap_or_default(),
            ),
            _ => None,
        })
    }

    /// `θ_v ↦ Σ_w ∂N(v)/∂w θ_w`, or `θ_v` itself for internal `v`.
    fn reduce_covector(&self, c: &Covector) -> Result<DForm> {
        let n = self.dim();
        let v = match c {
            Covector::Theta { .. } => c.jet_var().unwrap(),
            _ => return Ok(DForm::covector(n, *c)),
        };
        match self.normal_var(&v, &mut Vec::new())? {
            None => Ok(DForm::covector(n, *c)),
            Some(nf) => {
                let mut out = DForm::zero(n);
                for w in nf.vars() {
                    if let JetVar::Fiber { dep, alpha } = w {
                        out += DForm::theta(n, dep as usize, alpha).mul_expr(&nf.partial(&w));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Restriction of a form to the equation, written in internal coordinates.
    pub fn reduce_form(&self, w: &DForm) -> Result<DForm> {
        let n = self.dim();
        let mut covectors: HashMap<Covector, DForm> = HashMap::new();
        let mut out = DForm::zero(n);
        for (basis, f) in w.terms() {
            let coeff = self.reduce(f)?;
            if coeff.is_zero() {
                continue;
            }
            let mut acc = DForm::scalar(n, coeff);
            for c in basis {
                if !covectors.contains_key(c) {
                    covectors.insert(*c, self.reduce_covector(c)?);
                }
                acc = acc.wedge(&covectors[c]);
                if acc.is_zero() {
                    break;
                }
            }
            out += acc;
        }
        Ok(out)
    }

    /// Whether every function and covector of `w` is internal.
    pub fn is_reduced_form(&self, w: &DForm) -> bool {
        w.terms().all(|(b, f)| {
            b.iter()
                .all(|c| c.jet_var().is_none_or(|v| self.is_internal(&v)))
                && f.vars().iter().all(|v| self.is_internal(v))
        })
    }

    /// Critical pairs whose two reductions disagree.
    pub fn confluence_failures(&self) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        for (a, ra) in self.relations.iter().enumerate() {
            for rb in &self.relations[a + 1..] {
                if ra.dep != rb.dep {
                    continue;
                }
                let top = ra.leading.join(&rb.leading);
                let via_a = self.reduce(&ra.rhs.total_derivative_multi(&top.checked_sub(&ra.leading).unwrap()))?;
                let via_b = self.reduce(&rb.rhs.total_derivative_multi(&top.checked_sub(&rb.leading).unwrap()))?;
                if via_a != via_b {
                    failures.push(format!(
                        "{}: {} vs {}",
                        self.space.var_name(&JetVar::fiber(ra.dep, top)),
                        via_a.to_text(&self.space),
                        via_b.to_text(&self.space)
                    ));
                }
            }
        }
        Ok(failures)
    }
}

/// Parses one relation `lhs = rhs` with a jet coordinate on the left.
pub fn parse_relation(space: &JetSpace, line: &str) -> Result<Relation> {
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| Error::InvalidSystem(format!("expected `lhs = rhs` in `{}`", line.trim())))?;
    let lead = parse_expr(space, lhs)?;
    let offset = lhs.chars().count() + 1;
    let rhs = parse_expr(space, rhs).map_err(|mut e| {
        if e.line == 1 {
            e.column += offset;
        }
        e
    })?;
    let var = lead
        .vars()
        .into_iter()
        .next()
        .filter(|v| lead == Expr::var(*v))
        .ok_or_else(|| Error::InvalidSystem(format!("left-hand side `{}` is not a single jet", lhs.trim())))?;
    match var {
        JetVar::Fiber { dep, alpha } => Ok(Relation {
            dep: dep as usize,
            leading: alpha,
            rhs,
        }),
        _ => Err(Error::InvalidSystem(format!(
            "left-hand side `{}` is not a dependent variable",
            lhs.trim()
        ))),
    }
}

/// A contact-degree ≤ 1 term of `dL` certified to lie in the ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealTerm {
    pub basis: Basis,
    pub coefficient: Expr,
    pub witness: IdealWitness,
}

/// `L` with `L|_𝓔 = l` and `dL = b + Σ f·(basis)`, `f ∈ I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub form: DForm,
    /// `b`, the contact-degree ≥ 2 part of `dL`.
    pub contact2: DForm,
    pub ideal_terms: Vec<IdealTerm>,
}

impl Extension {
    /// Rebuilds `dL` from the certificate, expanding every witness.
    pub fn certified_differential(&self, system: &EqSystem) -> DForm {
        let mut out = self.contact2.clone();
        for t in &self.ideal_terms {
            out += DForm::term(system.dim(), t.witness.evaluate(system), t.basis.clone());
        }
        out
    }

    /// `∇`-style operator: ideal terms with `F` replaced by the generic `psi`.
    pub fn witness_form(&self, dim: usize) -> DForm {
        let mut out = DForm::zero(dim);
        for t in &self.ideal_terms {
            out += DForm::term(dim, t.witness.op.clone(), t.basis.clone());
        }
        out
    }
}

/// Contact-degree < 2 terms of `reduce_form(dl)`, empty for internal Lagrangians.
pub fn internal_residue(l: &DForm, system: &EqSystem) -> Result<DForm> {
    Ok(system.reduce_form(&l.d())?.below_cp(2))
}

/// Extends a form `l` on the equation to `L` on the jet space with
/// `L|_𝓔 = l` and `dL ∈ C²Λ + I·Λ`, certified term by term.
pub fn extend_form(l: &DForm, system: &EqSystem) -> Result<Extension> {
    let n = system.dim();
    l.expect_degree(n)?;
    if !system.is_reduced_form(l) {
        return Err(Error::InvalidSystem(
            "form is not written in internal coordinates of the equation".into(),
        ));
    }
    let residue = internal_residue(l, system)?;
    if !residue.is_zero() {
        return Err(Error::NotInternal(residue.to_text(system.space())));
    }
    let da = l.d().contact_part(1);
    // da₁ = Σ_v θ_v ∧ ω^v over prolonged leading derivatives v.
    let mut omegas: BTreeMap<JetVar, DForm> = BTreeMap::new();
    for (basis, c) in da.terms() {
        let (pos, cov) = basis
            .iter()
            .enumerate()
            .find(|(_, b)| b.is_contact())
            .expect("contact degree one");
        let Some(v) = cov.jet_var() else { continue };
        if system.is_internal(&v) || !matches!(cov, Covector::Theta { .. }) {
            continue;
        }
        let mut rest = basis.clone();
        rest.remove(pos);
        let term = DForm::term(n, c.scale(&crate::expr::sign(pos as u32)), rest);
        *omegas.entry(v).or_insert_with(|| DForm::zero(n)) += term;
    }
    let mut form = l.clone();
    for (v, omega) in &omegas {
        let nf = system.reduce(&Expr::var(*v))?;
        let f = Expr::var(*v) - nf;
        form -= omega.mul_expr(&f);
    }
    let dform = form.d();
    let contact2 = dform.contact_at_least(2);
    let mut ideal_terms = Vec::new();
    for (basis, c) in dform.below_cp(2).terms() {
        let (nf, witness) = system.reduce_witnessed(c)?;
        if !nf.is_zero() {
            return Err(Error::NotInternal(format!(
                "extension leaves a non-ideal coefficient on {}",
                crate::form::basis_text(system.space(), basis)
            )));
        }
        ideal_terms.push(IdealTerm {
            basis: basis.clone(),
            coefficient: c.clone(),
            witness,
        });
    }
    Ok(Extension {
        form,
        contact2,
        ideal_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_form;

    fn wave() -> EqSystem {
        let s = JetSpace::new(&["x", "t"], &["u"]).unwrap();
        EqSystem::parse(s, &["u_tt = u_xx"], DEFAULT_MAX_ORDER).unwrap()
    }

    fn e(sys: &EqSystem, t: &str) -> Expr {
        parse_expr(sys.space(), t).unwrap()
    }

    fn f(sys: &EqSystem, t: &str) -> DForm {
        parse_form(sys.space(), t).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let w = wave();
        assert_eq!(w.reduce(&e(&w, "u_ttx")).unwrap(), e(&w, "u_xxx"));
        assert_eq!(w.reduce(&e(&w, "u_x")).unwrap(), e(&w, "u_x"));
        assert_eq!(w.reduce(&e(&w, "u_tttt")).unwrap(), e(&w, "u_xxxx"));
        assert_eq!(w.reduce(&e(&w, "u_ttt*u")).unwrap(), e(&w, "u_xxt*u"));
    }

    #[test]
    fn witnesses_expand_to_the_discrepancy() {
        let w = wave();
        for t in ["u_tttt", "u_tt^2*u_ttx + x*u_t", "u_ttt^3 - u_tt*u_xtt"] {
            let ex = e(&w, t);
            let (nf, wit) = w.reduce_witnessed(&ex).unwrap();
            assert_eq!(nf, w.reduce(&ex).unwrap());
            assert_eq!(wit.evaluate(&w), ex - nf);
        }
    }

    #[test]
    fn reduce_form_examples() {
        let w = wave();
        assert_eq!(w.reduce_form(&f(&w, "th[u;tt]")).unwrap(), f(&w, "th[u;xx]"));
        assert_eq!(w.reduce_form(&f(&w, "dx&dt")).unwrap(), f(&w, "dx&dt"));
        assert_eq!(
            w.reduce_form(&f(&w, "u_tt*th[u]&dx")).unwrap(),
            f(&w, "u_xx*th[u]&dx")
        );
    }

    #[test]
    fn validation() {
        let s = JetSpace::new(&["x", "t"], &["u"]).unwrap();
        assert!(EqSystem::parse(s.clone(), &["u_tt = u_ttx"], 12).is_err());
        assert!(EqSystem::parse(s.clone(), &["u_t = u_xx", "u_t = u"], 12).is_err());
        assert!(EqSystem::parse(s.clone(), &["u_x + u = 0"], 12).is_err());
        assert!(EqSystem::parse(s.clone(), &["u_t = phi[u]"], 12).is_err());
        assert!(EqSystem::parse(s, &["u_t = u_xxx"], 12).is_ok());
    }

    #[test]
    fn order_bound_is_enforced() {
        let s = JetSpace::new(&["x", "t"], &["u"]).unwrap();
        let kdv = EqSystem::parse(s, &["u_t = u_xxx"], 6).unwrap();
        assert_eq!(kdv.reduce(&e(&kdv, "u_tt")).unwrap(), e(&kdv, "u_xxxxxx"));
        assert!(matches!(
            kdv.reduce(&e(&kdv, "u_ttt")),
            Err(Error::OrderBound { .. })
        ));
    }

    #[test]
    fn cyclic_system_is_rejected_during_reduction() {
        let s = JetSpace::new(&["x", "t"], &["u", "v"]).unwrap();
        let sys = EqSystem::parse(s, &["u_t = v_x", "v_x = u_t"], 12);
        assert!(sys.is_err());
        let s = JetSpace::new(&["x", "t"], &["u", "v"]).unwrap();
        let sys = EqSystem::parse(s, &["u_xx = v_xt", "v_tt = u_xt"], 12).unwrap();
        let e = parse_expr(sys.space(), "u_xxt").unwrap();
        assert!(matches!(sys.reduce(&e), Err(Error::NonTerminating(_))));
    }

    #[test]
    fn confluence_of_compatible_pair() {
        let s = JetSpace::new(&["x", "t"], &["u"]).unwrap();
        let good = EqSystem::parse(s.clone(), &["u_x = u", "u_t = u"], 12).unwrap();
        assert!(good.confluence_failures().unwrap().is_empty());
        let bad = EqSystem::parse(s, &["u_x = u", "u_t = x*u"], 12).unwrap();
        assert_eq!(bad.confluence_failures().unwrap().len(), 1);
    }

    #[test]
    fn restricted_total_derivative_commutes_with_reduction() {
        let w = wave();
        let ex = e(&w, "u_t^2*u_tt + u_xt");
        let lhs = w.reduce(&ex.total_derivative(1)).unwrap();
        let rhs = w.total_derivative(&w.reduce(&ex).unwrap(), 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn extension_of_wave_internal_lagrangian() {
        let w = wave();
        let l = f(&w, "1/2*(u_t^2 - u_x^2)*dx&dt - u_t*th[u]&dx - u_x*th[u]&dt");
        let ext = extend_form(&l, &w).unwrap();
        assert_eq!(w.reduce_form(&ext.form).unwrap(), l);
        assert_eq!(ext.certified_differential(&w), ext.form.d());
        assert!(extend_form(&DForm::zero(2), &w).unwrap().form.is_zero());
        assert!(matches!(
            extend_form(&f(&w, "u*dx&dt"), &w),
            Err(Error::NotInternal(_))
        ));
    }
}
