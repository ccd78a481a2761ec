//! Jet coordinates and the naming context used to print and parse them.

use crate::error::Error;
use crate::multi_index::{MultiIndex, MAX_DIM};

/// Families of auxiliary jet variables.
///
/// `Phi` holds the components `φ^i_α` of a generic evolutionary parameter
/// (indexed by dependent variable). `Psi` holds a second generic argument,
/// used for operator arguments `G ∈ P(π)` and adjoint test functions
/// (indexed by a 0-based slot number).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuxFamily {
    Phi,
    Psi,
}

impl AuxFamily {
    pub fn name(self) -> &'static str {
        match self {
            AuxFamily::Phi => "phi",
            AuxFamily::Psi => "psi",
        }
    }
}

/// A coordinate on the (extended) infinite jet space.
///
/// The derived order is the canonical variable order: base variables by
/// index, then fiber coordinates by `(dependent index, α)`, then auxiliaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetVar {
    Base(u8),
    Fiber { dep: u8, alpha: MultiIndex },
    Aux { family: AuxFamily, index: u8, alpha: MultiIndex },
}

impl JetVar {
    pub fn base(i: usize) -> Self {
        JetVar::Base(i as u8)
    }

    pub fn fiber(dep: usize, alpha: MultiIndex) -> Self {
        JetVar::Fiber { dep: dep as u8, alpha }
    }

    pub fn aux(family: AuxFamily, index: usize, alpha: MultiIndex) -> Self {
        JetVar::Aux {
            family,
            index: index as u8,
            alpha,
        }
    }

    pub fn multi_index(&self) -> Option<MultiIndex> {
        match self {
            JetVar::Base(_) => None,
            JetVar::Fiber { alpha, .. } | JetVar::Aux { alpha, .. } => Some(*alpha),
        }
    }

    pub fn order(&self) -> u32 {
        self.multi_index().map_or(0, |a| a.order())
    }

    /// Image of the variable under `D_{x^i}` when it is a jet coordinate.
    pub fn shifted(&self, i: usize) -> Option<JetVar> {
        match *self {
            JetVar::Base(_) => None,
            JetVar::Fiber { dep, alpha } => Some(JetVar::Fiber {
                dep,
                alpha: alpha.incremented(i),
            }),
            JetVar::Aux {
                family,
                index,
                alpha,
            } => Some(JetVar::Aux {
                family,
                index,
                alpha: alpha.incremented(i),
            }),
        }
    }

    pub fn is_aux(&self, fam: AuxFamily) -> bool {
        matches!(self, JetVar::Aux { family, .. } if *family == fam)
    }
}

const RESERVED: &[&str] = &["d", "th", "thphi", "thpsi", "phi", "psi"];

/// Names of the independent and dependent variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpace {
    base: Vec<String>,
    deps: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl JetSpace {
    pub fn new<S: AsRef<str>>(base: &[S], deps: &[S]) -> Result<Self, Error> {
        let base: Vec<String> = base.iter().map(|s| s.as_ref().to_string()).collect();
        let deps: Vec<String> = deps.iter().map(|s| s.as_ref().to_string()).collect();
        if base.is_empty() || base.len() > MAX_DIM {
            return Err(Error::InvalidSpace(format!(
                "need between 1 and {MAX_DIM} independent variables, got {}",
                base.len()
            )));
        }
        if deps.is_empty() {
            return Err(Error::InvalidSpace("need at least one dependent variable".into()));
        }
        let all: Vec<&String> = base.iter().chain(deps.iter()).collect();
        for (k, name) in all.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::InvalidSpace(format!("`{name}` is not an identifier")));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(Error::InvalidSpace(format!("`{name}` is a reserved name")));
            }
            if all[..k].contains(name) {
                return Err(Error::InvalidSpace(format!("duplicate name `{name}`")));
            }
            if base.iter().any(|b| **name == format!("d{b}")) {
                return Err(Error::InvalidSpace(format!(
                    "`{name}` collides with a differential token"
                )));
            }
        }
        // Subscripts are split greedily, so no base name may prefix another.
        for a in &base {
            for b in &base {
                if a != b && b.starts_with(a.as_str()) {
                    return Err(Error::InvalidSpace(format!(
                        "base name `{a}` is a prefix of `{b}`; subscripts would be ambiguous"
                    )));
                }
            }
        }
        Ok(JetSpace { base, deps })
    }

    /// `x1..xn` and `u1..um` (or `x`, `u` when single).
    pub fn standard(n: usize, m: usize) -> Self {
        let base: Vec<String> = match n {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "t".into()],
            3 => vec!["x".into(), "y".into(), "t".into()],
            _ => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let deps: Vec<String> = if m == 1 {
            vec!["u".into()]
        } else {
            (1..=m).map(|i| format!("u{i}")).collect()
        };
        JetSpace::new(&base, &deps).expect("standard names are valid")
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn num_deps(&self) -> usize {
        self.deps.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn dep_names(&self) -> &[String] {
        &self.deps
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }

    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.deps.iter().position(|d| d == name)
    }

    /// Fiber coordinate `u^dep_α`.
    pub fn u(&self, dep: usize, alpha: &[u8]) -> JetVar {
        assert_eq!(alpha.len(), self.dim());
        JetVar::fiber(dep, MultiIndex::from_slice(alpha))
    }

    pub fn x(&self, i: usize) -> JetVar {
        JetVar::base(i)
    }

    /// Subscript text for a multi-index: base names repeated by count.
    pub fn subscript(&self, alpha: &MultiIndex) -> String {
        alpha
            .directions()
            .into_iter()
            .map(|i| self.base[i].as_str())
            .collect()
    }

    /// Split a subscript such as `xxt` into a multi-index.
    pub fn parse_subscript(&self, s: &str) -> Option<MultiIndex> {
        if s.is_empty() {
            return None;
        }
        let mut alpha = MultiIndex::zero(self.dim());
        let mut rest = s;
        while !rest.is_empty() {
            let (i, name) = self
                .base
                .iter()
                .enumerate()
                .filter(|(_, b)| rest.starts_with(b.as_str()))
                .max_by_key(|(_, b)| b.len())?;
            alpha = alpha.incremented(i);
            rest = &rest[name.len()..];
        }
        Some(alpha)
    }

    pub fn var_name(&self, v: &JetVar) -> String {
        match v {
            JetVar::Base(i) => self.base[*i as usize].clone(),
            JetVar::Fiber { dep, alpha } => {
                with_subscript(self.deps[*dep as usize].clone(), &self.subscript(alpha))
            }
            JetVar::Aux {
                family,
                index,
                alpha,
            } => {
                let head = match family {
                    AuxFamily::Phi => format!("phi[{}]", self.deps[*index as usize]),
                    AuxFamily::Psi => format!("psi[{}]", *index as usize + 1),
                };
                with_subscript(head, &self.subscript(alpha))
            }
        }
    }
}

fn with_subscript(head: String, sub: &str) -> String {
    if sub.is_empty() {
        head
    } else {
        format!("{head}_{{{sub}}}")
    }
}
