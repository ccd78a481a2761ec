//! Differential forms on the infinite jet space in the adapted basis
//! `{dx^i, θ^i_α}`, with the contact grading, the de Rham differential and
//! contractions with evolutionary vector fields.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{sign, Expr, Rational};
use crate::jet::{AuxFamily, JetSpace, JetVar};
use crate::multi_index::MultiIndex;

/// A basis covector. The derived order `dx¹ < … < dxⁿ < θ < θ_aux` fixes the
/// sign convention of every wedge product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Covector {
    Dx(u8),
    Theta { dep: u8, alpha: MultiIndex },
    ThetaAux { family: AuxFamily, index: u8, alpha: MultiIndex },
}

impl Covector {
    pub fn dx(i: usize) -> Self {
        Covector::Dx(i as u8)
    }

    pub fn theta(dep: usize, alpha: MultiIndex) -> Self {
        Covector::Theta {
            dep: dep as u8,
            alpha,
        }
    }

    pub fn is_contact(&self) -> bool {
        !matches!(self, Covector::Dx(_))
    }

    /// The contact covector `θ_v` attached to a jet coordinate `v`.
    pub fn contact_of(v: &JetVar) -> Option<Covector> {
        match *v {
            JetVar::Base(_) => None,
            JetVar::Fiber { dep, alpha } => Some(Covector::Theta { dep, alpha }),
            JetVar::Aux {
                family,
                index,
                alpha,
            } => Some(Covector::ThetaAux {
                family,
                index,
                alpha,
            }),
        }
    }

    /// The jet coordinate whose contact form this is.
    pub fn jet_var(&self) -> Option<JetVar> {
        match *self {
            Covector::Dx(_) => None,
            Covector::Theta { dep, alpha } => Some(JetVar::Fiber { dep, alpha }),
            Covector::ThetaAux {
                family,
                index,
                alpha,
            } => Some(JetVar::Aux {
                family,
                index,
                alpha,
            }),
        }
    }

    pub fn to_text(&self, space: &JetSpace) -> String {
        let sub = |alpha: &MultiIndex| {
            let s = space.subscript(alpha);
            if s.is_empty() {
                String::new()
            } else {
                format!(";{s}")
            }
        };
        match self {
            Covector::Dx(i) => format!("d{}", space.base_names()[*i as usize]),
            Covector::Theta { dep, alpha } => {
                format!("th[{}{}]", space.dep_names()[*dep as usize], sub(alpha))
            }
            Covector::ThetaAux {
                family: AuxFamily::Phi,
                index,
                alpha,
            } => format!("thphi[{}{}]", space.dep_names()[*index as usize], sub(alpha)),
            Covector::ThetaAux {
                family: AuxFamily::Psi,
                index,
                alpha,
            } => format!("thpsi[{}{}]", *index as usize + 1, sub(alpha)),
        }
    }
}

/// A strictly increasing list of covectors.
pub type Basis = Vec<Covector>;

/// Sorts covectors, returning the permutation sign or `None` on a repeat.
pub fn normalize_basis(mut covectors: Vec<Covector>) -> Option<(Basis, Rational)> {
    let mut swaps = 0u32;
    for i in 1..covectors.len() {
        let mut j = i;
        while j > 0 && covectors[j - 1] > covectors[j] {
            covectors.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if covectors.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((covectors, sign(swaps)))
}

fn contact_degree(basis: &Basis) -> usize {
    basis.iter().filter(|c| c.is_contact()).count()
}

/// An evolutionary vector field `E_φ = D_α(φ^i) ∂_{u^i_α}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvolutionaryField {
    /// Components are the auxiliary jets `φ^i` of a family.
    Generic(AuxFamily),
    /// Explicit components, one per dependent variable.
    Components(Vec<Expr>),
}

impl EvolutionaryField {
    pub fn generic() -> Self {
        EvolutionaryField::Generic(AuxFamily::Phi)
    }

    /// `i_{E_φ} θ^dep_α = D_α(φ^dep)`.
    pub fn contract_theta(&self, dep: usize, alpha: &MultiIndex) -> Expr {
        match self {
            EvolutionaryField::Generic(family) => Expr::var(JetVar::aux(*family, dep, *alpha)),
            EvolutionaryField::Components(c) => c
                .get(dep)
                .map(|e| e.total_derivative_multi(alpha))
                .unwrap_or_default(),
        }
    }
}

/// A differential form: `Σ coefficient · b₁∧…∧b_k` over normalized bases.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DForm {
    dim: usize,
    terms: BTreeMap<Basis, Expr>,
}

impl DForm {
    pub fn zero(dim: usize) -> Self {
        DForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, f: Expr) -> Self {
        DForm::term(dim, f, vec![])
    }

    pub fn covector(dim: usize, c: Covector) -> Self {
        DForm::term(dim, Expr::one(), vec![c])
    }

    pub fn dx(dim: usize, i: usize) -> Self {
        DForm::covector(dim, Covector::dx(i))
    }

    pub fn theta(dim: usize, dep: usize, alpha: MultiIndex) -> Self {
        DForm::covector(dim, Covector::theta(dep, alpha))
    }

    /// `dx¹∧…∧dxⁿ`.
    pub fn volume(dim: usize) -> Self {
        DForm::term(dim, Expr::one(), (0..dim).map(Covector::dx).collect())
    }

    /// `f · c₁∧…∧c_k` for covectors in any order.
    pub fn term(dim: usize, f: Expr, covectors: Vec<Covector>) -> Self {
        let mut form = DForm::zero(dim);
        if let Some((basis, s)) = normalize_basis(covectors) {
            form.add_term(basis, f.scale(&s));
        }
        form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, basis: &[Covector]) -> Expr {
        self.terms.get(basis).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, basis: Basis, f: Expr) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(basis) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += f;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Degrees of the terms present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|b| b.len()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Checks that every term has degree `k` (the zero form passes).
    pub fn expect_degree(&self, k: usize) -> Result<()> {
        match self.degrees().into_iter().find(|&d| d != k) {
            Some(found) => Err(Error::DegreeMismatch { expected: k, found }),
            None => Ok(()),
        }
    }

    /// Sum of the terms with contact degree exactly `p`.
    pub fn contact_part(&self, p: usize) -> DForm {
        self.filter(|b| contact_degree(b) == p)
    }

    /// Whether the form lies in `C^pΛ`: every term has contact degree ≥ p.
    pub fn in_cp(&self, p: usize) -> bool {
        self.terms.keys().all(|b| contact_degree(b) >= p)
    }

    /// Terms whose contact degree is at least `p`.
    pub fn contact_at_least(&self, p: usize) -> DForm {
        self.filter(|b| contact_degree(b) >= p)
    }

    /// Terms whose contact degree is below `p`.
    pub fn below_cp(&self, p: usize) -> DForm {
        self.filter(|b| contact_degree(b) < p)
    }

    /// The horizontal part `[ω]_h`, i.e. contact degree 0.
    pub fn horizontal_part(&self) -> DForm {
        self.contact_part(0)
    }

    pub fn is_horizontal(&self) -> bool {
        self.terms.keys().all(|b| contact_degree(b) == 0)
    }

    pub fn max_contact_degree(&self) -> usize {
        self.terms.keys().map(contact_degree).max().unwrap_or(0)
    }

    fn filter<F: Fn(&Basis) -> bool>(&self, keep: F) -> DForm {
        DForm {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| keep(b))
                .map(|(b, f)| (b.clone(), f.clone()))
                .collect(),
        }
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_expr(&self, f: &Expr) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (b, g) in &self.terms {
            out.add_term(b.clone(), g * f);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DForm {
        self.map_coefficients(|f| f.scale(c))
    }

    pub fn map_coefficients<F: FnMut(&Expr) -> Expr>(&self, mut f: F) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (b, g) in &self.terms {
            out.add_term(b.clone(), f(g));
        }
        out
    }

    /// Fallible variant of [`DForm::map_coefficients`].
    pub fn try_map_coefficients<F: FnMut(&Expr) -> Result<Expr>>(&self, mut f: F) -> Result<DForm> {
        let mut out = DForm::zero(self.dim);
        for (b, g) in &self.terms {
            out.add_term(b.clone(), f(g)?);
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &DForm) -> DForm {
        assert_eq!(self.dim, other.dim, "forms over different base dimensions");
        let mut out = DForm::zero(self.dim);
        for (b1, f1) in &self.terms {
            for (b2, f2) in &other.terms {
                let mut cov = b1.clone();
                cov.extend_from_slice(b2);
                if let Some((basis, s)) = normalize_basis(cov) {
                    out.add_term(basis, (f1 * f2).scale(&s));
                }
            }
        }
        out
    }

    /// `d f = Σ D_{x^k}(f) dx^k + Σ ∂f/∂u^i_α θ^i_α` (auxiliary jets included).
    pub fn differential_of(dim: usize, f: &Expr) -> DForm {
        let mut out = DForm::zero(dim);
        for k in 0..dim {
            out.add_term(vec![Covector::dx(k)], f.total_derivative(k));
        }
        for v in f.vars() {
            if let Some(c) = Covector::contact_of(&v) {
                out.add_term(vec![c], f.partial(&v));
            }
        }
        out
    }

    /// `d` of a single basis covector: `d(dx) = 0`, `d θ_α = Σ_k dx^k ∧ θ_{α+1_k}`.
    fn differential_of_covector(dim: usize, c: &Covector) -> Vec<(Covector, Covector)> {
        match c.jet_var() {
            None => vec![],
            Some(v) => (0..dim)
                .map(|k| {
                    let shifted = v.shifted(k).expect("jet coordinate");
                    (Covector::dx(k), Covector::contact_of(&shifted).unwrap())
                })
                .collect(),
        }
    }

    /// The de Rham differential, extended as a graded derivation.
    pub fn d(&self) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (basis, f) in &self.terms {
            let rest = DForm::term(self.dim, Expr::one(), basis.clone());
            out += DForm::differential_of(self.dim, f).wedge(&rest);
            for (j, c) in basis.iter().enumerate() {
                for (a, b) in DForm::differential_of_covector(self.dim, c) {
                    let mut cov: Vec<Covector> = basis[..j].to_vec();
                    cov.push(a);
                    cov.push(b);
                    cov.extend_from_slice(&basis[j + 1..]);
                    out += DForm::term(self.dim, f.scale(&sign(j as u32)), cov);
                }
            }
        }
        out
    }

    /// Horizontal differential `d_h[ω]_h = [dω]_h` of a horizontal form.
    pub fn horizontal_diff(&self) -> Result<DForm> {
        let bad = self.terms.keys().filter(|b| contact_degree(b) > 0).count();
        if bad > 0 {
            return Err(Error::NotHorizontal(bad));
        }
        Ok(self.d_h())
    }

    /// `Σ_k dx^k ∧ D_{x^k}(coefficients)`, the horizontal part of `d` on
    /// horizontal forms.
    pub(crate) fn d_h(&self) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (basis, f) in self.terms.iter().filter(|(b, _)| contact_degree(b) == 0) {
            for k in 0..self.dim {
                let mut cov = vec![Covector::dx(k)];
                cov.extend_from_slice(basis);
                out += DForm::term(self.dim, f.total_derivative(k), cov);
            }
        }
        out
    }

    /// Interior product with an evolutionary field, a derivation of degree −1.
    pub fn interior(&self, field: &EvolutionaryField) -> DForm {
        let mut out = DForm::zero(self.dim);
        for (basis, f) in &self.terms {
            for (j, c) in basis.iter().enumerate() {
                let value = match c {
                    Covector::Theta { dep, alpha } => field.contract_theta(*dep as usize, alpha),
                    _ => continue,
                };
                if value.is_zero() {
                    continue;
                }
                let mut rest = basis.clone();
                rest.remove(j);
                out.add_term(rest, (f * &value).scale(&sign(j as u32)));
            }
        }
        out
    }

    /// Lie derivative by Cartan's formula `𝓛 = i∘d + d∘i`.
    pub fn lie(&self, field: &EvolutionaryField) -> DForm {
        self.d().interior(field) + self.interior(field).d()
    }

    pub fn substitute<F>(&self, mut f: F) -> DForm
    where
        F: FnMut(&JetVar) -> Option<Expr>,
    {
        self.map_coefficients(|g| g.substitute(&mut f))
    }

    /// Coefficient of `dx¹∧…∧dxⁿ`.
    pub fn volume_coefficient(&self) -> Expr {
        let vol: Basis = (0..self.dim).map(Covector::dx).collect();
        self.coefficient(&vol)
    }

    pub fn to_text(&self, space: &JetSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (basis, f)) in self.terms.iter().enumerate() {
            let body = render_term(space, basis, f);
            if k == 0 {
                s.push_str(&body);
            } else if let Some(rest) = body.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(&body);
            }
        }
        s
    }

    /// `(basis, coefficient)` text pairs, for machine-readable reports.
    pub fn term_list(&self, space: &JetSpace) -> Vec<(String, String)> {
        self.terms
            .iter()
            .map(|(b, f)| (basis_text(space, b), f.to_text(space)))
            .collect()
    }
}

pub fn basis_text(space: &JetSpace, basis: &[Covector]) -> String {
    if basis.is_empty() {
        return "1".into();
    }
    basis
        .iter()
        .map(|c| c.to_text(space))
        .collect::<Vec<_>>()
        .join("&")
}

fn render_term(space: &JetSpace, basis: &Basis, f: &Expr) -> String {
    let coeff = f.to_text(space);
    if basis.is_empty() {
        return coeff;
    }
    let b = basis_text(space, basis);
    if f.is_compound() {
        format!("({coeff})*{b}")
    } else if f.as_constant().is_some_and(|c| c.is_one()) {
        b
    } else if f.as_constant().is_some_and(|c| (-c).is_one()) {
        format!("-{b}")
    } else {
        format!("{coeff}*{b}")
    }
}

impl fmt::Debug for DForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (b, c) in &self.terms {
            m.entry(b, c);
        }
        m.finish()
    }
}

impl AddAssign<&DForm> for DForm {
    fn add_assign(&mut self, rhs: &DForm) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (b, f) in &rhs.terms {
            self.add_term(b.clone(), f.clone());
        }
    }
}

impl AddAssign<DForm> for DForm {
    fn add_assign(&mut self, rhs: DForm) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (b, f) in rhs.terms {
            self.add_term(b, f);
        }
    }
}

impl SubAssign<&DForm> for DForm {
    fn sub_assign(&mut self, rhs: &DForm) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (b, f) in &rhs.terms {
            self.add_term(b.clone(), -f);
        }
    }
}

impl SubAssign<DForm> for DForm {
    fn sub_assign(&mut self, rhs: DForm) {
        *self -= &rhs;
    }
}

impl Neg for &DForm {
    type Output = DForm;
    fn neg(self) -> DForm {
        self.map_coefficients(|f| -f)
    }
}

impl Neg for DForm {
    type Output = DForm;
    fn neg(self) -> DForm {
        -&self
    }
}

macro_rules! forward_form_binop {
    ($tr:ident, $method:ident, $assign:ident) => {
        impl $tr<&DForm> for &DForm {
            type Output = DForm;
            fn $method(self, rhs: &DForm) -> DForm {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $tr<DForm> for DForm {
            type Output = DForm;
            fn $method(mut self, rhs: DForm) -> DForm {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<&DForm> for DForm {
            type Output = DForm;
            fn $method(mut self, rhs: &DForm) -> DForm {
                self.$assign(rhs);
                self
            }
        }
    };
}

forward_form_binop!(Add, add, add_assign);
forward_form_binop!(Sub, sub, sub_assign);

impl DForm {
    /// True when the two forms agree term by term.
    pub fn same_as(&self, other: &DForm) -> bool {
        (self - other).is_zero()
    }

    /// Sum of the coefficient term counts.
    pub fn size(&self) -> usize {
        self.terms.values().map(|f| f.len()).sum()
    }

    pub fn zero_like(&self) -> DForm {
        DForm::zero(self.dim)
    }

    /// Whether any coefficient is nonzero for a basis element satisfying `pred`.
    pub fn any_basis<F: Fn(&Basis) -> bool>(&self, pred: F) -> bool {
        self.terms.keys().any(pred)
    }

    /// Coefficients are constant-free test: returns the constant if `self` is
    /// a constant 0-form.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (b, f) = self.terms.iter().next()?;
                if b.is_empty() {
                    f.as_constant()
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}
