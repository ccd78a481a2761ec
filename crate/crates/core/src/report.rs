//! Deterministic text and JSON reports.

use serde::Serialize;

/// A named value echoed in a report, one entry per line of text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Item {
    pub name: String,
    pub value: Vec<String>,
}

impl Item {
    pub fn new(name: impl Into<String>, value: impl Into<String>) -> Self {
        Item {
            name: name.into(),
            value: vec![value.into()],
        }
    }

    pub fn lines(name: impl Into<String>, value: Vec<String>) -> Self {
        Item {
            name: name.into(),
            value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

/// One verified property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub verdict: Verdict,
    pub residue_terms: Vec<String>,
    pub certificates: Vec<String>,
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check {
            check: name.into(),
            verdict: Verdict::from_bool(ok),
            residue_terms: vec![],
            certificates: vec![],
            witnesses: vec![],
        }
    }

    pub fn residue(mut self, terms: Vec<String>) -> Self {
        self.residue_terms = terms;
        self
    }

    pub fn certificate(mut self, c: impl Into<String>) -> Self {
        self.certificates.push(c.into());
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A titled group of inputs, outputs and checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub inputs: Vec<Item>,
    pub outputs: Vec<Item>,
    pub checks: Vec<Check>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Section::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn new(command: impl Into<String>, sections: Vec<Section>) -> Self {
        let verdict = Verdict::from_bool(sections.iter().all(Section::passed));
        Report {
            command: command.into(),
            sections,
            verdict,
            timing_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("command: {}\n", self.command);
        for sec in &self.sections {
            s += &format!("\n== {} ==\n", sec.title);
            for (tag, items) in [("input", &sec.inputs), ("output", &sec.outputs)] {
                for it in items {
                    match it.value.as_slice() {
                        [one] => s += &format!("{tag} {}: {one}\n", it.name),
                        many => {
                            s += &format!("{tag} {}:\n", it.name);
                            for v in many {
                                s += &format!("    {v}\n");
                            }
                        }
                    }
                }
            }
            for c in &sec.checks {
                s += &format!("{}  {}\n", c.verdict.as_str(), c.check);
                for r in &c.residue_terms {
                    s += &format!("    residue: {r}\n");
                }
                for r in &c.certificates {
                    s += &format!("    certificate: {r}\n");
                }
                for r in &c.witnesses {
                    s += &format!("    witness: {r}\n");
                }
            }
        }
        let total: usize = self.sections.iter().map(|x| x.checks.len()).sum();
        let passed: usize = self
            .sections
            .iter()
            .map(|x| x.checks.iter().filter(|c| c.passed()).count())
            .sum();
        s += &format!("\nsummary: {passed}/{total} checks passed, {}\n", self.verdict.as_str());
        if let Some(ms) = self.timing_ms {
            s += &format!("elapsed: {ms} ms\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_aggregates() {
        let mut sec = Section::new("demo");
        sec.checks.push(Check::new("a", true));
        assert!(Report::new("x", vec![sec.clone()]).passed());
        sec.checks.push(Check::new("b", false).residue(vec!["u".into()]));
        let r = Report::new("x", vec![sec]);
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL  b\n    residue: u\n"));
        assert!(r.to_json().contains("\"verdict\": \"FAIL\""));
    }
}
