//! Text syntax for expressions and forms.
//!
//! ```text
//! sum     := ["+"|"-"] product (("+"|"-") product)*
//! product := factor (("*"|"&"|"/") factor)*
//! factor  := "-" factor | power
//! power   := atom ["^" integer]
//! atom    := integer | "(" sum ")" | variable | covector
//! ```
//!
//! Variables are base names (`x`), jets (`u`, `u_x`, `u_{xxt}`) and
//! auxiliaries (`phi[u]_{x}`, `psi[1]`). Covectors are `dx` for each base
//! name `x`, `th[u;xx]`, `thphi[u;x]` and `thpsi[1;x]`. `*` and `&` both
//! denote the wedge product, which on functions is ordinary multiplication.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::ParseError;
use crate::expr::{Expr, Rational};
use crate::form::{Covector, DForm};
use crate::jet::{AuxFamily, JetSpace, JetVar};
use crate::multi_index::MultiIndex;

/// Parses a function (a 0-form).
pub fn parse_expr(space: &JetSpace, text: &str) -> Result<Expr, ParseError> {
    let form = parse_form(space, text)?;
    if form.is_zero() {
        return Ok(Expr::zero());
    }
    if form.degrees() != [0] {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "expected a function, found a differential form".into(),
        });
    }
    Ok(form.coefficient(&[]))
}

/// Parses a differential form.
pub fn parse_form(space: &JetSpace, text: &str) -> Result<DForm, ParseError> {
    let mut p = Parser {
        space,
        chars: text.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error_here("empty input"));
    }
    let value = p.sum()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error_here(&format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(value)
}

struct Parser<'a> {
    space: &'a JetSpace,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error_at(&self, pos: usize, message: &str) -> ParseError {
        let (line, column) = self.location(pos);
        ParseError {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn error_here(&self, message: &str) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<DForm, ParseError> {
        self.skip_ws();
        let mut acc = if self.eat('-') {
            -self.product()?
        } else {
            self.eat('+');
            self.product()?
        };
        loop {
            if self.eat('+') {
                acc += self.product()?;
            } else if self.eat('-') {
                acc -= self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<DForm, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') || self.eat('&') {
                let rhs = self.factor()?;
                acc = acc.wedge(&rhs);
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.factor()?;
                match rhs.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    Some(_) => return Err(self.error_at(at, "division by zero")),
                    None => return Err(self.error_at(at, "division only by nonzero constants")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<DForm, ParseError> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<DForm, ParseError> {
        let base_pos = {
            self.skip_ws();
            self.pos
        };
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exp = self
            .integer()
            .ok_or_else(|| self.error_at(at, "expected a non-negative integer exponent"))?
            .to_u32()
            .ok_or_else(|| self.error_at(at, "exponent too large"))?;
        if !base.is_zero() && base.degrees() != [0] {
            return Err(self.error_at(base_pos, "only functions can be raised to a power"));
        }
        let f = base.coefficient(&[]);
        Ok(DForm::scalar(self.dim(), f.pow(exp)))
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn identifier(&mut self) -> Option<String> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<DForm, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error_here("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error_here("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer().expect("digit present");
                Ok(DForm::scalar(
                    self.dim(),
                    Expr::constant(Rational::from_integer(n)),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier().expect("letter present");
                self.named(&name, start)
            }
            Some(c) => Err(self.error_here(&format!("unexpected `{c}`"))),
        }
    }

    fn named(&mut self, name: &str, start: usize) -> Result<DForm, ParseError> {
        let n = self.dim();
        if let Some(rest) = name.strip_prefix('d') {
            if let Some(i) = self.space.base_index(rest) {
                return Ok(DForm::dx(n, i));
            }
        }
        match name {
            "th" | "thphi" | "thpsi" => {
                let (index, alpha) = self.bracket(name, start, true)?;
                let c = match name {
                    "th" => Covector::theta(index, alpha),
                    "thphi" => Covector::ThetaAux {
                        family: AuxFamily::Phi,
                        index: index as u8,
                        alpha,
                    },
                    _ => Covector::ThetaAux {
                        family: AuxFamily::Psi,
                        index: index as u8,
                        alpha,
                    },
                };
                return Ok(DForm::covector(n, c));
            }
            "phi" | "psi" => {
                let (index, _) = self.bracket(name, start, false)?;
                let alpha = self.subscript()?;
                let family = if name == "phi" {
                    AuxFamily::Phi
                } else {
                    AuxFamily::Psi
                };
                return Ok(var_form(n, JetVar::aux(family, index, alpha)));
            }
            _ => {}
        }
        if let Some(i) = self.space.base_index(name) {
            if self.peek() == Some('_') {
                return Err(self.error_here("independent variables take no subscript"));
            }
            return Ok(var_form(n, JetVar::base(i)));
        }
        if let Some(dep) = self.space.dep_index(name) {
            let alpha = self.subscript()?;
            return Ok(var_form(n, JetVar::fiber(dep, alpha)));
        }
        Err(self.error_at(start, &format!("unknown variable `{name}`")))
    }

    /// Optional `_x`, `_xxt` or `_{xxt}`.
    fn subscript(&mut self) -> Result<MultiIndex, ParseError> {
        if self.peek() != Some('_') {
            return Ok(MultiIndex::zero(self.dim()));
        }
        self.pos += 1;
        let start = self.pos;
        let text: String = if self.peek() == Some('{') {
            self.pos += 1;
            let inner = self.pos;
            while self.peek().is_some_and(|c| c != '}') {
                self.pos += 1;
            }
            if self.peek() != Some('}') {
                return Err(self.error_at(start, "unterminated `{` in jet index"));
            }
            self.pos += 1;
            self.chars[inner..self.pos - 1].iter().collect()
        } else {
            self.identifier().unwrap_or_default()
        };
        self.jet_index(&text, start)
    }

    fn jet_index(&self, text: &str, at: usize) -> Result<MultiIndex, ParseError> {
        self.space
            .parse_subscript(text.trim())
            .ok_or_else(|| self.error_at(at, &format!("malformed jet index `{text}`")))
    }

    /// `[name]` or `[name;sub]` after a covector or auxiliary head.
    fn bracket(
        &mut self,
        head: &str,
        start: usize,
        allow_sub: bool,
    ) -> Result<(usize, MultiIndex), ParseError> {
        if self.peek() != Some('[') {
            return Err(self.error_at(start, &format!("`{head}` must be followed by `[`")));
        }
        self.pos += 1;
        let inner = self.pos;
        while self.peek().is_some_and(|c| c != ']') {
            self.pos += 1;
        }
        if self.peek() != Some(']') {
            return Err(self.error_at(inner, "unterminated `[`"));
        }
        let body: String = self.chars[inner..self.pos].iter().collect();
        self.pos += 1;
        let (label, sub) = match body.split_once(';') {
            Some((l, s)) if allow_sub => (l.trim(), Some(s)),
            Some(_) => return Err(self.error_at(inner, "unexpected `;`")),
            None => (body.trim(), None),
        };
        let by_slot = head.ends_with("psi");
        let index = if by_slot {
            label
                .parse::<usize>()
                .ok()
                .filter(|&k| (1..=255).contains(&k))
                .map(|k| k - 1)
                .ok_or_else(|| self.error_at(inner, &format!("bad slot number `{label}`")))?
        } else {
            self.space
                .dep_index(label)
                .ok_or_else(|| self.error_at(inner, &format!("unknown dependent variable `{label}`")))?
        };
        let alpha = match sub {
            Some(s) => self.jet_index(s, inner)?,
            None => MultiIndex::zero(self.dim()),
        };
        Ok((index, alpha))
    }
}

fn var_form(n: usize, v: JetVar) -> DForm {
    DForm::scalar(n, Expr::var(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn space() -> JetSpace {
        JetSpace::new(&["x", "t"], &["u"]).unwrap()
    }

    #[test]
    fn spec_examples() {
        let s = space();
        let e = parse_expr(&s, "u_{xx} + 3*x*u").unwrap();
        let expected = Expr::var(s.u(0, &[2, 0]))
            + (&Expr::var(s.x(0)) * &Expr::var(s.u(0, &[0, 0]))).scale(&rat(3, 1));
        assert_eq!(e, expected);
        assert!(parse_expr(&s, "u - u").unwrap().is_zero());
        let half = parse_expr(&s, "(u_x)^2/2").unwrap();
        assert_eq!(half, Expr::var(s.u(0, &[1, 0])).pow(2).scale(&rat(1, 2)));
    }

    #[test]
    fn subscripts_and_auxiliaries() {
        let s = space();
        assert_eq!(parse_expr(&s, "u_xxt").unwrap(), parse_expr(&s, "u_{txx}").unwrap());
        let p = parse_expr(&s, "phi[u]_{x}").unwrap();
        assert_eq!(p, Expr::var(JetVar::aux(AuxFamily::Phi, 0, MultiIndex::from_slice(&[1, 0]))));
        let q = parse_expr(&s, "psi[2]").unwrap();
        assert_eq!(q, Expr::var(JetVar::aux(AuxFamily::Psi, 1, MultiIndex::zero(2))));
    }

    #[test]
    fn forms() {
        let s = space();
        let w = parse_form(&s, "u*dx&th[u;t] - 2*dt&dx").unwrap();
        let th = DForm::theta(2, 0, MultiIndex::from_slice(&[0, 1]));
        let expected = DForm::dx(2, 0).wedge(&th).mul_expr(&Expr::var(s.u(0, &[0, 0])))
            + DForm::volume(2).scale(&rat(2, 1));
        assert_eq!(w, expected);
        assert!(parse_form(&s, "dx&dx").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_location() {
        let s = space();
        let e = parse_expr(&s, "u +\n  v").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse_expr(&s, "u_{q}").unwrap_err().message.contains("jet index"));
        assert!(parse_expr(&s, "u / u").is_err());
        assert!(parse_expr(&s, "dx^2").is_err());
        assert!(parse_expr(&s, "dx").is_err());
        assert!(parse_expr(&s, "(u").is_err());
        assert!(parse_expr(&s, "").is_err());
        assert!(parse_expr(&s, "u 2").is_err());
    }

    #[test]
    fn printed_text_reparses() {
        let s = space();
        for text in [
            "1/2*u_{x}^2 - x*u + 7",
            "-u_{t}*dx&th[u] + (u + x)*dt&thphi[u;x]",
            "-3/4*phi[u]_{xt}*psi[1]",
        ] {
            let f = parse_form(&s, text).unwrap();
            let printed = f.to_text(&s);
            assert_eq!(parse_form(&s, &printed).unwrap(), f, "{printed}");
        }
    }
}
