//! The sectioned problem-file format.
//!
//! ```text
//! [vars]
//! independent = x, t
//! dependent = u
//! [equations]
//! u_tt = u_xx
//! [lagrangian]
//! 1/2*u_t^2 - 1/2*u_x^2
//! [form l]
//! u*dx&dt
//! [options]
//! max_order = 12
//! ```
//!
//! Lines starting with `#` are comments. A Lagrangian may be given as a
//! density (multiplied by the volume form) or as a top-degree form.

use crate::equation::{parse_relation, EqSystem, DEFAULT_MAX_ORDER};
use crate::error::{Error, ParseError, Result};
use crate::form::DForm;
use crate::jet::JetSpace;
use crate::parse::parse_form;

#[derive(Clone, Debug)]
pub struct Problem {
    pub space: JetSpace,
    /// Relation lines with their 1-based line numbers.
    pub equations: Vec<(usize, String)>,
    pub lagrangian: Option<DForm>,
    pub forms: Vec<(String, DForm)>,
    pub max_order: Option<u32>,
}

struct Block {
    header: String,
    line: usize,
    body: Vec<(usize, String)>,
}

fn problem_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        line,
        column: 1,
        message: msg.into(),
    })
}

fn shift(e: Error, first_line: usize) -> Error {
    match e {
        Error::Parse(p) => Error::Parse(ParseError {
            line: p.line + first_line - 1,
            ..p
        }),
        other => other,
    }
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem> {
        let mut blocks: Vec<Block> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some(h) = t.strip_prefix('[') {
                let h = h
                    .strip_suffix(']')
                    .ok_or_else(|| problem_err(line, "unterminated section header"))?;
                blocks.push(Block {
                    header: h.trim().to_string(),
                    line,
                    body: vec![],
                });
                continue;
            }
            let b = blocks
                .last_mut()
                .ok_or_else(|| problem_err(line, "content before the first section"))?;
            b.body.push((line, raw.to_string()));
        }

        let mut independent = None;
        let mut dependent = None;
        let mut max_order = None;
        for b in &blocks {
            match b.header.as_str() {
                "vars" | "options" => {
                    for (line, l) in &b.body {
                        let (key, value) = l
                            .split_once('=')
                            .ok_or_else(|| problem_err(*line, "expected `key = value`"))?;
                        let names = || -> Vec<String> {
                            value
                                .split(',')
                                .map(|s| s.trim().to_string())
                                .filter(|s| !s.is_empty())
                                .collect()
                        };
                        match (b.header.as_str(), key.trim()) {
                            ("vars", "independent") => independent = Some(names()),
                            ("vars", "dependent") => dependent = Some(names()),
                            ("options", "max_order") => {
                                max_order = Some(value.trim().parse::<u32>().map_err(|_| {
                                    problem_err(*line, "max_order must be a non-negative integer")
                                })?)
                            }
                            (_, k) => {
                                return Err(problem_err(*line, format!("unknown key `{k}`")))
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        let independent =
            independent.ok_or_else(|| Error::Problem("missing `independent = …` in [vars]".into()))?;
        let dependent =
            dependent.ok_or_else(|| Error::Problem("missing `dependent = …` in [vars]".into()))?;
        let space = JetSpace::new(&independent, &dependent)?;

        let mut equations = Vec::new();
        let mut lagrangian = None;
        let mut forms: Vec<(String, DForm)> = Vec::new();
        for b in &blocks {
            let first = b.body.first().map_or(b.line + 1, |(l, _)| *l);
            let joined = b
                .body
                .iter()
                .map(|(_, s)| s.as_str())
                .collect::<Vec<_>>()
                .join("\n");
            match b.header.as_str() {
                "vars" | "options" => {}
                "equations" => {
                    for (line, l) in &b.body {
                        parse_relation(&space, l).map_err(|e| match e {
                            Error::Parse(_) => shift(e, *line),
                            other => problem_err(*line, other.to_string()),
                        })?;
                        equations.push((*line, l.trim().to_string()));
                    }
                }
                "lagrangian" => {
                    if lagrangian.is_some() {
                        return Err(problem_err(b.line, "duplicate [lagrangian] section"));
                    }
                    let f = parse_form(&space, &joined).map_err(|e| shift(e.into(), first))?;
                    let f = if f.degrees().iter().all(|&d| d == 0) {
                        f.wedge(&DForm::volume(space.dim()))
                    } else {
                        f
                    };
                    lagrangian = Some(f);
                }
                h => {
                    let Some(name) = h.strip_prefix("form") else {
                        return Err(problem_err(b.line, format!("unknown section [{h}]")));
                    };
                    let name = name.trim();
                    if name.is_empty() {
                        return Err(problem_err(b.line, "a [form NAME] section needs a name"));
                    }
                    if forms.iter().any(|(n, _)| n == name) {
                        return Err(problem_err(b.line, format!("duplicate form `{name}`")));
                    }
                    let f = parse_form(&space, &joined).map_err(|e| shift(e.into(), first))?;
                    forms.push((name.to_string(), f));
                }
            }
        }
        Ok(Problem {
            space,
            equations,
            lagrangian,
            forms,
            max_order,
        })
    }

    /// The system, using `override_order`, then the file option, then the default.
    pub fn system(&self, override_order: Option<u32>) -> Result<EqSystem> {
        let order = override_order.or(self.max_order).unwrap_or(DEFAULT_MAX_ORDER);
        let lines: Vec<&str> = self.equations.iter().map(|(_, s)| s.as_str()).collect();
        EqSystem::parse(self.space.clone(), &lines, order)
    }

    pub fn has_equations(&self) -> bool {
        !self.equations.is_empty()
    }

    pub fn form(&self, name: &str) -> Option<&DForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}
