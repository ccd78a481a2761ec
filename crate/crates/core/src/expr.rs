//! Differential polynomials with exact rational coefficients.
//!
//! An [`Expr`] is kept in canonical form at all times: a map from monomials to
//! nonzero rational coefficients, with monomials ordered by the canonical
//! variable order of [`JetVar`]. Two expressions are equal as functions iff
//! their canonical forms are identical.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{AuxFamily, JetSpace, JetVar};
use crate::multi_index::MultiIndex;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A product of variable powers, sorted by variable with positive exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(JetVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: JetVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(mut powers: Vec<(JetVar, u32)>) -> Self {
        powers.retain(|(_, p)| *p > 0);
        powers.sort_by_key(|p| p.0);
        let mut merged: Vec<(JetVar, u32)> = Vec::with_capacity(powers.len());
        for (v, p) in powers {
            match merged.last_mut() {
                Some((w, q)) if *w == v => *q += p,
                _ => merged.push((v, p)),
            }
        }
        Monomial(merged)
    }

    pub fn powers(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    pub fn power_of(&self, v: &JetVar) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map_or(0, |k| self.0[k].1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes one power of the `k`-th factor.
    fn lowered(&self, k: usize) -> Monomial {
        let mut m = self.0.clone();
        if m[k].1 == 1 {
            m.remove(k);
        } else {
            m[k].1 -= 1;
        }
        Monomial(m)
    }

    /// Removes the variable entirely.
    fn without(&self, v: &JetVar) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).copied().collect())
    }
}

/// A differential polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: JetVar) -> Self {
        Expr::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut e = Expr::zero();
        for (m, c) in iter {
            e.add_term(m, c);
        }
        e
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The value if the expression is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, p: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut p = p;
        while p > 0 {
            if p & 1 == 1 {
                acc = &acc * &base;
            }
            p >>= 1;
            if p > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// All variables occurring in the expression.
    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|(v, _)| *v))
            .collect()
    }

    /// Highest jet order among the variables present.
    pub fn max_order(&self) -> u32 {
        self.vars().iter().map(|v| v.order()).max().unwrap_or(0)
    }

    pub fn contains_family(&self, family: AuxFamily) -> bool {
        self.vars().iter().any(|v| v.is_aux(family))
    }

    /// Total derivative `D_{x^i}`; auxiliary jets are shifted like fiber jets.
    pub fn total_derivative(&self, i: usize) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (k, (v, p)) in m.powers().iter().enumerate() {
                let rest = m.lowered(k);
                let coeff = c * Rational::from_integer(BigInt::from(*p));
                match v {
                    JetVar::Base(j) => {
                        if *j as usize == i {
                            out.add_term(rest, coeff);
                        }
                    }
                    _ => {
                        let w = v.shifted(i).expect("jet coordinate");
                        out.add_term(rest.mul(&Monomial::var(w)), coeff);
                    }
                }
            }
        }
        out
    }

    /// `D_α = D_{x¹}^{α₁} ∘ … ∘ D_{xⁿ}^{αⁿ}`.
    pub fn total_derivative_multi(&self, alpha: &MultiIndex) -> Expr {
        let mut e = self.clone();
        for i in (0..alpha.dim()).rev() {
            for _ in 0..alpha.get(i) {
                e = e.total_derivative(i);
            }
        }
        e
    }

    /// Formal partial derivative treating all jet variables as independent.
    pub fn partial(&self, v: &JetVar) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let p = m.power_of(v);
            if p == 0 {
                continue;
            }
            let k = m.powers().iter().position(|(w, _)| w == v).unwrap();
            out.add_term(m.lowered(k), c * Rational::from_integer(BigInt::from(p)));
        }
        out
    }

    /// Coefficients `[e₀, e₁, …]` with `self = Σ e_k v^k`.
    pub fn coefficients_in(&self, v: &JetVar) -> Vec<Expr> {
        let mut out: Vec<Expr> = Vec::new();
        for (m, c) in &self.terms {
            let p = m.power_of(v) as usize;
            if out.len() <= p {
                out.resize(p + 1, Expr::zero());
            }
            out[p].add_term(m.without(v), c.clone());
        }
        out
    }

    /// Replaces variables by expressions; `None` keeps the variable.
    pub fn substitute<F>(&self, mut f: F) -> Expr
    where
        F: FnMut(&JetVar) -> Option<Expr>,
    {
        let mut images: HashMap<JetVar, Option<Expr>> = HashMap::new();
        let mut powers: HashMap<(JetVar, u32), Expr> = HashMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Expr::constant(c.clone());
            for (v, p) in m.powers() {
                let image = images.entry(*v).or_insert_with(|| f(v));
                match image {
                    None => kept.push((*v, *p)),
                    Some(e) => {
                        let pw = powers.entry((*v, *p)).or_insert_with(|| e.pow(*p));
                        factor = &factor * pw;
                    }
                }
            }
            let kept = Expr::term(Rational::one(), Monomial(kept));
            out += &factor * &kept;
        }
        out
    }

    /// Renames variables; the map must be injective on the variables present.
    pub fn map_vars<F: Fn(&JetVar) -> JetVar>(&self, f: F) -> Expr {
        Expr::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_powers(m.powers().iter().map(|(v, p)| (f(v), *p)).collect()),
                c.clone(),
            )
        }))
    }

    /// Splits an expression linear and homogeneous in an auxiliary family into
    /// `(index, α) ↦ coefficient`, so that `self = Σ coefficient · aux^index_α`.
    pub fn linear_coefficients(
        &self,
        family: AuxFamily,
    ) -> Result<BTreeMap<(usize, MultiIndex), Expr>> {
        let mut out: BTreeMap<(usize, MultiIndex), Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut hit = None;
            for (k, (v, p)) in m.powers().iter().enumerate() {
                if let JetVar::Aux {
                    family: f,
                    index,
                    alpha,
                } = v
                {
                    if *f == family {
                        if *p != 1 || hit.is_some() {
                            return Err(Error::NotLinear(family.name()));
                        }
                        hit = Some((k, *index as usize, *alpha));
                    }
                }
            }
            let (k, index, alpha) = hit.ok_or(Error::NotLinear(family.name()))?;
            out.entry((index, alpha))
                .or_default()
                .add_term(m.lowered(k), c.clone());
        }
        out.retain(|_, e| !e.is_zero());
        Ok(out)
    }

    /// Evaluates at a point given by `f`.
    pub fn eval<F: Fn(&JetVar) -> Rational>(&self, f: F) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, p) in m.powers() {
                let x = f(v);
                for _ in 0..*p {
                    t *= &x;
                }
            }
            total += t;
        }
        total
    }

    pub fn to_text(&self, space: &JetSpace) -> String {
        self.render(&|v| space.var_name(v))
    }

    /// True when printing needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }

    fn render(&self, name: &dyn Fn(&JetVar) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let body = render_term(c, m, name);
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
}

pub(crate) fn render_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render_term(c: &Rational, m: &Monomial, name: &dyn Fn(&JetVar) -> String) -> String {
    let mono: Vec<String> = m
        .powers()
        .iter()
        .map(|(v, p)| {
            if *p == 1 {
                name(v)
            } else {
                format!("{}^{}", name(v), p)
            }
        })
        .collect();
    let mono = mono.join("*");
    if m.is_one() {
        render_rational(c)
    } else if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{mono}")
    } else {
        format!("{}*{}", render_rational(c), mono)
    }
}

fn debug_name(v: &JetVar) -> String {
    match v {
        JetVar::Base(i) => format!("x{i}"),
        JetVar::Fiber { dep, alpha } => format!("u{dep}{alpha:?}"),
        JetVar::Aux {
            family,
            index,
            alpha,
        } => format!("{}{index}{alpha:?}", family.name()),
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&debug_name))
    }
}

impl From<JetVar> for Expr {
    fn from(v: JetVar) -> Self {
        Expr::var(v)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        if self.terms.len() < rhs.terms.len() {
            let mut rhs = rhs;
            std::mem::swap(self, &mut rhs);
            *self += &rhs;
        } else {
            for (m, c) in rhs.terms {
                self.add_term(m, c);
            }
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(mut self) -> Expr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(mut self, rhs: Expr) -> Expr {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(mut self, rhs: &Expr) -> Expr {
                self.$assign(rhs);
                self
            }
        }
    };
}

forward_binop!(Add, add, add_assign);
forward_binop!(Sub, sub, sub_assign);

impl Mul<Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Mul<&Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        &self * rhs
    }
}

/// Sign `(−1)^k` as a rational.
pub fn sign(k: u32) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> JetSpace {
        JetSpace::new(&["x", "t"], &["u"]).unwrap()
    }

    #[test]
    fn cancellation_gives_canonical_zero() {
        let s = space();
        let u = Expr::var(s.u(0, &[0, 0]));
        assert!((&u - &u).is_zero());
        assert_eq!((&u - &u).to_text(&s), "0");
    }

    #[test]
    fn total_derivative_examples() {
        let s = space();
        let u = Expr::var(s.u(0, &[0, 0]));
        let x = Expr::var(s.x(0));
        assert_eq!(u.total_derivative(0), Expr::var(s.u(0, &[1, 0])));
        // D_x(x u) = u + x u_x
        let lhs = (&x * &u).total_derivative(0);
        let rhs = &u + &(&x * &Expr::var(s.u(0, &[1, 0])));
        assert_eq!(lhs, rhs);
        assert!(Expr::int(5).total_derivative(1).is_zero());
    }

    #[test]
    fn multi_derivative_of_empty_index_is_identity() {
        let s = space();
        let e = Expr::var(s.u(0, &[1, 0])).pow(3);
        assert_eq!(e.total_derivative_multi(&MultiIndex::zero(2)), e);
        let u = Expr::var(s.u(0, &[0, 0]));
        assert_eq!(
            u.total_derivative_multi(&MultiIndex::from_slice(&[1, 1])),
            Expr::var(s.u(0, &[1, 1]))
        );
    }

    #[test]
    fn partial_examples() {
        let s = space();
        let ux = s.u(0, &[1, 0]);
        let uxx = s.u(0, &[2, 0]);
        let u = Expr::var(s.u(0, &[0, 0]));
        assert_eq!(Expr::var(ux).pow(2).partial(&ux), Expr::var(ux).scale(&rat(2, 1)));
        assert!((&Expr::var(s.x(0)) * &u).partial(&ux).is_zero());
        assert_eq!((&Expr::var(uxx) * &u).partial(&uxx), u);
    }

    #[test]
    fn substitute_and_coefficients() {
        let s = space();
        let u = s.u(0, &[0, 0]);
        let e = Expr::var(u).pow(2) + Expr::var(s.x(0));
        let sub = e.substitute(|v| (*v == u).then(|| Expr::var(s.x(1)) + Expr::one()));
        let t = Expr::var(s.x(1));
        assert_eq!(sub, t.pow(2) + t.scale(&rat(2, 1)) + Expr::one() + Expr::var(s.x(0)));
        let cs = e.coefficients_in(&u);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], Expr::var(s.x(0)));
        assert!(cs[1].is_zero());
    }

    #[test]
    fn linear_extraction_rejects_nonlinear() {
        let phi = Expr::var(JetVar::aux(AuxFamily::Phi, 0, MultiIndex::zero(1)));
        assert!(phi.pow(2).linear_coefficients(AuxFamily::Phi).is_err());
        assert!(Expr::one().linear_coefficients(AuxFamily::Phi).is_err());
        let ok = phi.scale(&rat(3, 1)).linear_coefficients(AuxFamily::Phi).unwrap();
        assert_eq!(ok.len(), 1);
    }
}
