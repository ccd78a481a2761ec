//! Euler operator, integration by parts, adjoints and the Noether
//! correction form.
//!
//! Operators acting on a generic argument are stored as expressions (or
//! forms) linear in an auxiliary jet family: `Δ(φ) = Σ Δ^α_i D_α(φ^i)` is the
//! expression `Σ Δ^α_i φ^i_α`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{sign, Expr};
use crate::form::{Covector, DForm, EvolutionaryField};
use crate::jet::{AuxFamily, JetSpace, JetVar};
use crate::multi_index::MultiIndex;

/// The other auxiliary family.
pub fn dual_family(f: AuxFamily) -> AuxFamily {
    match f {
        AuxFamily::Phi => AuxFamily::Psi,
        AuxFamily::Psi => AuxFamily::Phi,
    }
}

fn aux(family: AuxFamily, index: usize, alpha: MultiIndex) -> Expr {
    Expr::var(JetVar::aux(family, index, alpha))
}

/// A matrix C-differential operator; row `r` is `Σ Δ^α_{rc} arg^c_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CDiffOp {
    dim: usize,
    family: AuxFamily,
    args: usize,
    rows: Vec<Expr>,
}

impl CDiffOp {
    /// Builds an operator from rows linear in `family` with argument indices below `args`.
    pub fn new(dim: usize, family: AuxFamily, args: usize, rows: Vec<Expr>) -> Result<Self> {
        for row in &rows {
            for (index, _) in row.linear_coefficients(family)?.keys() {
                if *index >= args {
                    return Err(Error::InvalidSystem(format!(
                        "operator argument {index} out of range (arity {args})"
                    )));
                }
            }
        }
        Ok(CDiffOp {
            dim,
            family,
            args,
            rows,
        })
    }

    /// `Σ_α c_α D_α` acting on a single argument.
    pub fn scalar(dim: usize, family: AuxFamily, coeffs: &[(MultiIndex, Expr)]) -> Self {
        let row = coeffs
            .iter()
            .fold(Expr::zero(), |acc, (a, c)| acc + c * &aux(family, 0, *a));
        CDiffOp {
            dim,
            family,
            args: 1,
            rows: vec![row],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> AuxFamily {
        self.family
    }

    pub fn args(&self) -> usize {
        self.args
    }

    pub fn rows(&self) -> &[Expr] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Expr::is_zero)
    }

    /// `Δ^α_{rc}` keyed by `(c, α)` for row `r`.
    pub fn coefficients(&self, r: usize) -> BTreeMap<(usize, MultiIndex), Expr> {
        self.rows[r]
            .linear_coefficients(self.family)
            .expect("rows are linear by construction")
    }

    /// `Δ(G)`, substituting `arg^c_α ↦ D_α(G^c)`.
    pub fn apply(&self, g: &[Expr]) -> Vec<Expr> {
        let family = self.family;
        self.rows
            .iter()
            .map(|row| {
                row.substitute(|v| match *v {
                    JetVar::Aux {
                        family: f,
                        index,
                        alpha,
                    } if f == family => Some(
                        g.get(index as usize)
                            .map(|e| e.total_derivative_multi(&alpha))
                            .unwrap_or_default(),
                    ),
                    _ => None,
                })
            })
            .collect()
    }

    /// The same operator written in the other auxiliary family.
    pub fn in_family(&self, family: AuxFamily) -> CDiffOp {
        if family == self.family {
            return self.clone();
        }
        let from = self.family;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.map_vars(|v| match *v {
                    JetVar::Aux {
                        family: f,
                        index,
                        alpha,
                    } if f == from => JetVar::Aux {
                        family,
                        index,
                        alpha,
                    },
                    _ => *v,
                })
            })
            .collect();
        CDiffOp {
            dim: self.dim,
            family,
            args: self.args,
            rows,
        }
    }

    pub fn to_text(&self, space: &JetSpace) -> Vec<String> {
        self.rows.iter().map(|r| r.to_text(space)).collect()
    }
}

/// Components `μ_i` of `μ = μ_i θ^i_0 ∧ dx¹∧…∧dxⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceForm {
    dim: usize,
    components: Vec<Expr>,
}

impl SourceForm {
    pub fn new(dim: usize, components: Vec<Expr>) -> Self {
        SourceForm { dim, components }
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    /// `⟨μ, φ⟩ = μ_i φ^i` as the coefficient of the volume form.
    pub fn pair(&self, family: AuxFamily) -> Expr {
        self.components
            .iter()
            .enumerate()
            .fold(Expr::zero(), |acc, (i, mu)| {
                acc + mu * &aux(family, i, MultiIndex::zero(self.dim))
            })
    }

    /// `⟨μ, φ⟩ dx¹∧…∧dxⁿ`.
    pub fn pair_form(&self, family: AuxFamily) -> DForm {
        DForm::volume(self.dim).mul_expr(&self.pair(family))
    }

    /// `Σ μ_i θ^i_0 ∧ dx¹∧…∧dxⁿ`.
    pub fn to_form(&self) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (i, mu) in self.components.iter().enumerate() {
            out += DForm::theta(self.dim, i, MultiIndex::zero(self.dim))
                .wedge(&DForm::volume(self.dim))
                .mul_expr(mu);
        }
        out
    }

    pub fn map<F: FnMut(&Expr) -> Expr>(&self, f: F) -> SourceForm {
        SourceForm {
            dim: self.dim,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn to_text(&self, space: &JetSpace) -> Vec<String> {
        self.components.iter().map(|c| c.to_text(space)).collect()
    }
}

/// Which derivative direction integration by parts strips first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IbpOrder {
    #[default]
    FirstDirection,
    LastDirection,
}

/// Result of `Δ = d_h∘Δ₁ + μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// `Δ₁`, a horizontal (n−1)-form linear in the argument family.
    pub boundary: DForm,
    /// `μ`, one component per argument index.
    pub source: SourceForm,
}

/// `dx¹∧…∧\widehat{dx^k}∧…∧dxⁿ`.
pub fn volume_without(dim: usize, k: usize) -> DForm {
    DForm::term(
        dim,
        Expr::one(),
        (0..dim).filter(|&j| j != k).map(Covector::dx).collect(),
    )
}

/// Integration by parts of a top-degree density linear in `family`.
pub fn integrate_by_parts(
    dim: usize,
    density: &Expr,
    family: AuxFamily,
    args: usize,
    order: IbpOrder,
) -> Result<Decomposition> {
    let mut pending = density.linear_coefficients(family)?;
    let mut boundary: Vec<Expr> = vec![Expr::zero(); dim];
    let mut source = vec![Expr::zero(); args];
    loop {
        let key = pending
            .iter()
            .filter(|((_, a), _)| !a.is_zero())
            .map(|((i, a), _)| (*a, *i))
            .max();
        let Some((alpha, i)) = key else { break };
        let c = pending.remove(&(i, alpha)).unwrap();
        let k = match order {
            IbpOrder::FirstDirection => alpha.first_direction(),
            IbpOrder::LastDirection => alpha.last_direction(),
        }
        .unwrap();
        let beta = alpha.decremented(k).unwrap();
        // c·D_k(F_β) = D_k(c·F_β) − D_k(c)·F_β
        boundary[k] += (&c * &aux(family, i, beta)).scale(&sign(k as u32));
        let entry = pending.entry((i, beta)).or_default();
        *entry -= c.total_derivative(k);
        if entry.is_zero() {
            pending.remove(&(i, beta));
        }
    }
    for ((i, _), c) in pending {
        if i >= args {
            return Err(Error::InvalidSystem(format!(
                "operator argument {i} out of range (arity {args})"
            )));
        }
        source[i] += c;
    }
    let mut form = DForm::zero(dim);
    for (k, b) in boundary.iter().enumerate() {
        form += volume_without(dim, k).mul_expr(b);
    }
    Ok(Decomposition {
        boundary: form,
        source: SourceForm::new(dim, source),
    })
}

fn top_density(op: &DForm) -> Result<Expr> {
    let n = op.dim();
    op.expect_degree(n)?;
    if !op.is_horizontal() {
        return Err(Error::NotHorizontal(op.contact_part(1).len()));
    }
    Ok(op.volume_coefficient())
}

/// `Δ = d_h∘Δ₁ + μ` for `Δ` a horizontal n-form linear in `φ`.
pub fn ibp_scalar(op: &DForm, args: usize, order: IbpOrder) -> Result<Decomposition> {
    integrate_by_parts(op.dim(), &top_density(op)?, AuxFamily::Phi, args, order)
}

/// Operator-valued decomposition `∇(G) = d_h∘∇₁(G) + A(G)`.
///
/// `∇` is a horizontal n-form bilinear in `G` (family `Psi`, `g_args`
/// components) and `φ` (family `Phi`). Returns `∇₁` and `A` as an operator
/// from `G` into source components.
pub fn ibp_operator(
    op: &DForm,
    args: usize,
    g_args: usize,
    order: IbpOrder,
) -> Result<(DForm, CDiffOp)> {
    let density = top_density(op)?;
    for c in density.linear_coefficients(AuxFamily::Phi)?.values() {
        c.linear_coefficients(AuxFamily::Psi)?;
    }
    let dec = integrate_by_parts(op.dim(), &density, AuxFamily::Phi, args, order)?;
    let a = CDiffOp::new(op.dim(), AuxFamily::Psi, g_args, dec.source.components)?;
    Ok((dec.boundary, a))
}

/// `E_i[L] = Σ_α (−1)^{|α|} D_α(∂L/∂u^i_α)` for a horizontal n-form `L`.
pub fn euler(lagrangian: &DForm, deps: usize) -> Result<SourceForm> {
    let f = top_density(lagrangian)?;
    Ok(euler_density(lagrangian.dim(), &f, deps))
}

pub(crate) fn euler_density(dim: usize, f: &Expr, deps: usize) -> SourceForm {
    let mut comps = vec![Expr::zero(); deps];
    for v in f.vars() {
        if let JetVar::Fiber { dep, alpha } = v {
            let dep = dep as usize;
            if dep < deps {
                comps[dep] += f
                    .partial(&v)
                    .total_derivative_multi(&alpha)
                    .scale(&sign(alpha.order()));
            }
        }
    }
    SourceForm::new(dim, comps)
}

/// Linearization `ℓ_f(φ)_r = Σ ∂f_r/∂u^j_α φ^j_α`.
pub fn linearization(dim: usize, rows: &[Expr], deps: usize) -> CDiffOp {
    let rows = rows
        .iter()
        .map(|f| {
            let mut acc = Expr::zero();
            for v in f.vars() {
                if let JetVar::Fiber { dep, alpha } = v {
                    acc += f.partial(&v) * aux(AuxFamily::Phi, dep as usize, alpha);
                }
            }
            acc
        })
        .collect();
    CDiffOp {
        dim,
        family: AuxFamily::Phi,
        args: deps,
        rows,
    }
}

/// Formal adjoint with a witness of `⟨Δ*(ψ), φ⟩ − ⟨ψ, Δ(φ)⟩ = d_h W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjoint {
    /// `Δ*`, written in the family dual to that of `Δ`.
    pub op: CDiffOp,
    /// `W`, a horizontal (n−1)-form bilinear in `ψ` and `φ`.
    pub witness: DForm,
}

/// `Δ*(ψ)_c = Σ_r Σ_α (−1)^{|α|} D_α(Δ^α_{rc} ψ^r)`.
pub fn adjoint(op: &CDiffOp) -> Result<Adjoint> {
    let test = dual_family(op.family);
    let n = op.dim;
    let zero = MultiIndex::zero(n);
    let mut rows = vec![Expr::zero(); op.args];
    for r in 0..op.rows.len() {
        let psi = aux(test, r, zero);
        for ((c, alpha), coeff) in op.coefficients(r) {
            rows[c] += (&coeff * &psi)
                .total_derivative_multi(&alpha)
                .scale(&sign(alpha.order()));
        }
    }
    // The pairing ⟨ψ, Δφ⟩ as a density in the operator family.
    let pairing = op
        .rows
        .iter()
        .enumerate()
        .fold(Expr::zero(), |acc, (r, row)| acc + row * &aux(test, r, zero));
    let dec = integrate_by_parts(n, &pairing, op.family, op.args, IbpOrder::FirstDirection)?;
    let adj = CDiffOp {
        dim: n,
        family: test,
        args: op.rows.len(),
        rows,
    };
    Ok(Adjoint {
        op: adj,
        witness: -dec.boundary,
    })
}

/// Checks `⟨Δ*(ψ), φ⟩ − ⟨ψ, Δ(φ)⟩ = d_h W` exactly.
pub fn check_adjoint_witness(op: &CDiffOp, adj: &Adjoint) -> Result<bool> {
    let n = op.dim;
    let zero = MultiIndex::zero(n);
    let test = adj.op.family;
    let lhs = adj
        .op
        .rows
        .iter()
        .enumerate()
        .fold(Expr::zero(), |acc, (c, row)| acc + row * &aux(op.family, c, zero));
    let rhs = op
        .rows
        .iter()
        .enumerate()
        .fold(Expr::zero(), |acc, (r, row)| acc + row * &aux(test, r, zero));
    let diff = DForm::volume(n).mul_expr(&(lhs - rhs));
    Ok(diff.same_as(&adj.witness.horizontal_diff()?))
}

/// Whether the linearization of `rows` equals its own adjoint.
pub fn is_self_adjoint(op: &CDiffOp) -> Result<bool> {
    if op.args != op.rows.len() {
        return Ok(false);
    }
    Ok(adjoint(op)?.op.in_family(op.family) == *op)
}

/// Replaces `c·φ^i_α·dx^J` by `c·θ^i_α∧dx^J`, the inverse of contraction
/// with the generic field on contact-degree-one forms.
pub fn theta_ident(form: &DForm) -> Result<DForm> {
    let mut out = DForm::zero(form.dim());
    for (basis, coeff) in form.terms() {
        if basis.iter().any(Covector::is_contact) {
            return Err(Error::NotHorizontal(1));
        }
        for ((i, alpha), c) in coeff.linear_coefficients(AuxFamily::Phi)? {
            let mut cov = vec![Covector::theta(i, alpha)];
            cov.extend_from_slice(basis);
            out += DForm::term(form.dim(), c, cov);
        }
    }
    Ok(out)
}

/// The contact correction of a Lagrangian with its Euler–Lagrange source form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherForm {
    /// `ω_L ∈ CΛⁿ`.
    pub omega: DForm,
    /// `E[L]`.
    pub euler: SourceForm,
    /// `Δ₁` of the decomposition of `φ ↦ [𝓛_{E_φ}L̃]_h`.
    pub boundary: DForm,
}

/// `ω_L = L̃ − L + ω̃_L` where `ω̃_L` is read off from the decomposition of
/// `φ ↦ [𝓛_{E_φ} L̃]_h`.
pub fn noether_form(lagrangian: &DForm, deps: usize) -> Result<NoetherForm> {
    noether_form_with(lagrangian, deps, IbpOrder::FirstDirection)
}

pub fn noether_form_with(lagrangian: &DForm, deps: usize, order: IbpOrder) -> Result<NoetherForm> {
    let n = lagrangian.dim();
    lagrangian.expect_degree(n)?;
    let horizontal = lagrangian.horizontal_part();
    let variation = horizontal.lie(&EvolutionaryField::generic()).horizontal_part();
    let dec = ibp_scalar(&variation, deps, order)?;
    let tilde = theta_ident(&dec.boundary)?;
    let omega = &horizontal - lagrangian + tilde;
    Ok(NoetherForm {
        omega,
        euler: dec.source,
        boundary: dec.boundary,
    })
}

/// Residual of `⟨E[L], φ⟩ − [i_{E_φ} d(L + ω_L)]_h`.
pub fn map_residual(lagrangian: &DForm, omega: &DForm, deps: usize) -> Result<DForm> {
    let e = euler(&lagrangian.horizontal_part(), deps)?;
    let rhs = (lagrangian + omega)
        .d()
        .interior(&EvolutionaryField::generic())
        .horizontal_part();
    Ok(e.pair_form(AuxFamily::Phi) - rhs)
}

/// Both sides and residual of `𝓛_{E_φ}[L]_h = ⟨E[L], φ⟩ + d_h[i_{E_φ} ω_L]_h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherIdentity {
    pub lie_side: DForm,
    pub euler_side: DForm,
    pub boundary_side: DForm,
    pub residual: DForm,
}

impl NoetherIdentity {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

pub fn noether_identity_check(lagrangian: &DForm, omega: &DForm, deps: usize) -> Result<NoetherIdentity> {
    let field = EvolutionaryField::generic();
    let h = lagrangian.horizontal_part();
    let lie_side = h.lie(&field).horizontal_part();
    let euler_side = euler(&h, deps)?.pair_form(AuxFamily::Phi);
    let boundary_side = omega.interior(&field).horizontal_part().horizontal_diff()?;
    let residual = &lie_side - &euler_side - &boundary_side;
    Ok(NoetherIdentity {
        lie_side,
        euler_side,
        boundary_side,
        residual,
    })
}

/// A horizontal primitive of a `d_h`-closed (n−1)-form linear in `φ`.
///
/// Returns `s` with `d_h s = w`. Terms `c·φ^i_α·ω̂_k` (`ω̂_k` the volume form
/// without `dx^k`) are pushed, highest order first, into the normal form
/// where `α` involves no direction above `k`; a closed form in normal form
/// vanishes, and a nonzero remainder is reported as [`Error::NotClosed`].
pub fn horizontal_primitive(w: &DForm) -> Result<DForm> {
    let n = w.dim();
    w.expect_degree(n.saturating_sub(1))?;
    if !w.is_horizontal() {
        return Err(Error::NotHorizontal(w.contact_part(1).len()));
    }
    let mut rest = w.clone();
    let mut primitive = DForm::zero(n);
    if n == 1 {
        return if rest.is_zero() {
            Ok(primitive)
        } else {
            Err(Error::NotClosed(rest.len()))
        };
    }
    loop {
        let mut best: Option<(u32, Vec<Covector>, usize, MultiIndex, Expr)> = None;
        for (basis, coeff) in rest.terms() {
            let k = (0..n)
                .find(|&j| !basis.contains(&Covector::dx(j)))
                .expect("degree n−1");
            for ((i, alpha), c) in coeff.linear_coefficients(AuxFamily::Phi)? {
                let violates = (k + 1..n).any(|l| alpha.get(l) > 0);
                if violates && best.as_ref().is_none_or(|b| alpha.order() > b.0) {
                    best = Some((alpha.order(), basis.clone(), i, alpha, c));
                }
            }
        }
        let Some((_, basis, i, alpha, c)) = best else {
            break;
        };
        let l = alpha.last_direction().unwrap();
        let pos = basis.iter().position(|b| *b == Covector::dx(l)).unwrap();
        let mut sub = basis.clone();
        sub.remove(pos);
        let s = DForm::term(
            n,
            (&c * &aux(AuxFamily::Phi, i, alpha.decremented(l).unwrap())).scale(&sign(pos as u32)),
            sub,
        );
        rest -= s.horizontal_diff()?;
        primitive += s;
    }
    if rest.is_zero() {
        Ok(primitive)
    } else {
        Err(Error::NotClosed(rest.len()))
    }
}
