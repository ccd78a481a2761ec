//! Built-in example systems with their standard Lagrangians.

use crate::equation::EqSystem;
use crate::error::{Error, Result};
use crate::form::DForm;
use crate::jet::JetSpace;
use crate::parse::parse_form;

/// A named solved-form system together with a Lagrangian density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub independent: Vec<String>,
    pub dependent: Vec<String>,
    pub equations: Vec<String>,
    /// Density multiplying `dx¹∧…∧dxⁿ`.
    pub lagrangian: String,
}

impl CorpusEntry {
    pub fn space(&self) -> JetSpace {
        JetSpace::new(&self.independent, &self.dependent).expect("corpus names are valid")
    }

    pub fn system(&self, max_order: u32) -> Result<EqSystem> {
        let lines: Vec<&str> = self.equations.iter().map(String::as_str).collect();
        EqSystem::parse(self.space(), &lines, max_order)
    }

    pub fn lagrangian_form(&self) -> Result<DForm> {
        let space = self.space();
        let density = parse_form(&space, &self.lagrangian)?;
        Ok(density.wedge(&DForm::volume(space.dim())))
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn wave2d() -> CorpusEntry {
    CorpusEntry {
        name: "wave2d".into(),
        independent: strings(&["x", "t"]),
        dependent: strings(&["u"]),
        equations: strings(&["u_tt = u_xx"]),
        lagrangian: "1/2*u_t^2 - 1/2*u_x^2".into(),
    }
}

/// Potential KdV `v_t = ½v_x² + v_xxx`.
pub fn pkdv() -> CorpusEntry {
    CorpusEntry {
        name: "pkdv".into(),
        independent: strings(&["x", "t"]),
        dependent: strings(&["v"]),
        equations: strings(&["v_t = 1/2*v_x^2 + v_xxx"]),
        lagrangian: "1/2*v_x*v_t - 1/6*v_x^3 + 1/2*v_xx^2".into(),
    }
}

/// Nonlinear scalar field `u_tt = Δu − u³` in `n` dimensions (`2 ≤ n ≤ 4`).
pub fn scalar_field(n: usize) -> CorpusEntry {
    assert!((2..=4).contains(&n));
    let names = ["t", "x", "y", "z"];
    let space: Vec<&str> = names[1..n].to_vec();
    let laplacian: Vec<String> = space.iter().map(|x| format!("u_{x}{x}")).collect();
    let gradient: Vec<String> = space.iter().map(|x| format!(" - 1/2*u_{x}^2")).collect();
    CorpusEntry {
        name: format!("scalar_field_{n}d"),
        independent: strings(&names[..n]),
        dependent: strings(&["u"]),
        equations: vec![format!("u_tt = {} - u^3", laplacian.join(" + "))],
        lagrangian: format!("1/2*u_t^2{} - 1/4*u^4", gradient.concat()),
    }
}

/// Maxwell's equations `d∗dA = 0` for a 1-form potential in `n = 3, 4`.
///
/// Every spatial component is solved for `∂²_t A_k`; the Gauss constraint
/// is solved for `∂_t∂_x A_1`, and `A_0` stays free.
pub fn maxwell(n: usize) -> CorpusEntry {
    assert!((3..=4).contains(&n));
    let base = ["t", "x", "y", "z"];
    let a = |i: usize| format!("A{i}");
    let jet = |i: usize, sub: String| format!("A{i}_{{{sub}}}");
    let mut equations = Vec::new();
    for k in 1..n {
        let mut rhs = vec![jet(0, format!("t{}", base[k]))];
        for j in (1..n).filter(|&j| j != k) {
            rhs.push(jet(k, format!("{}{}", base[j], base[j])));
            rhs.push(format!("-{}", jet(j, format!("{}{}", base[j], base[k]))));
        }
        equations.push(format!("{} = {}", jet(k, "tt".into()), rhs.join(" + ").replace("+ -", "- ")));
    }
    let mut gauss = Vec::new();
    for b in &base[1..n] {
        gauss.push(jet(0, format!("{b}{b}")));
    }
    for (j, b) in base.iter().enumerate().take(n).skip(2) {
        gauss.push(format!("-{}", jet(j, format!("t{b}"))));
    }
    equations.push(format!("{} = {}", jet(1, "tx".into()), gauss.join(" + ").replace("+ -", "- ")));
    let mut lag = String::new();
    for (i, b) in base.iter().enumerate().take(n).skip(1) {
        let sep = if i == 1 { "" } else { " + " };
        lag += &format!("{sep}1/2*({} - {})^2", jet(i, "t".into()), jet(0, b.to_string()));
    }
    for i in 1..n {
        for j in i + 1..n {
            lag += &format!(" - 1/2*({} - {})^2", jet(j, base[i].into()), jet(i, base[j].into()));
        }
    }
    CorpusEntry {
        name: format!("maxwell{n}d"),
        independent: strings(&base[..n]),
        dependent: (0..n).map(a).collect(),
        equations,
        lagrangian: lag,
    }
}

/// Every entry, in report order.
pub fn all() -> Vec<CorpusEntry> {
    vec![
        wave2d(),
        pkdv(),
        scalar_field(2),
        scalar_field(3),
        scalar_field(4),
        maxwell(3),
        maxwell(4),
    ]
}

pub fn names() -> Vec<String> {
    let mut v: Vec<String> = all().into_iter().map(|e| e.name).collect();
    v.push("scalar_field_nd".into());
    v
}

/// Looks up an entry; `scalar_field_nd` selects every dimension.
pub fn lookup(name: &str) -> Result<Vec<CorpusEntry>> {
    if name == "all" {
        return Ok(all());
    }
    if name == "scalar_field_nd" {
        return Ok((2..=4).map(scalar_field).collect());
    }
    all()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| vec![e])
        .ok_or_else(|| {
            Error::Problem(format!(
                "unknown corpus entry `{name}`; available: {}, all",
                names().join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::DEFAULT_MAX_ORDER;
    use crate::parse::parse_expr;
    use crate::variational::euler;

    #[test]
    fn entries_parse() {
        for e in all() {
            let sys = e.system(DEFAULT_MAX_ORDER).unwrap();
            assert!(sys.confluence_failures().unwrap().is_empty(), "{}", e.name);
            e.lagrangian_form().unwrap();
        }
    }

    #[test]
    fn maxwell3d_text() {
        let m = maxwell(3);
        assert_eq!(
            m.equations,
            vec![
                "A1_{tt} = A0_{tx} + A1_{yy} - A2_{yx}",
                "A2_{tt} = A0_{ty} + A2_{xx} - A1_{xy}",
                "A1_{tx} = A0_{xx} + A0_{yy} - A2_{ty}",
            ]
        );
        assert_eq!(
            m.lagrangian,
            "1/2*(A1_{t} - A0_{x})^2 + 1/2*(A2_{t} - A0_{y})^2 - 1/2*(A2_{x} - A1_{y})^2"
        );
    }

    #[test]
    fn maxwell4d_euler_is_d_star_d() {
        // E[A_0] = ∂_i(A_i,t − A_0,i) and E[A_k] = −∂_t(A_k,t − A_0,k) + Σ_j ∂_j F_{jk}.
        let m = maxwell(4);
        let s = m.space();
        let e = euler(&m.lagrangian_form().unwrap(), 4).unwrap();
        let p = |t: &str| parse_expr(&s, t).unwrap();
        assert_eq!(
            e.components()[0],
            p("A1_tx + A2_ty + A3_tz - A0_xx - A0_yy - A0_zz")
        );
        assert_eq!(
            e.components()[1],
            p("-A1_tt + A0_tx + A1_yy + A1_zz - A2_xy - A3_xz")
        );
    }

    #[test]
    fn unknown_name_lists_entries() {
        let err = lookup("nope").unwrap_err().to_string();
        assert!(err.contains("wave2d") && err.contains("maxwell4d"));
        assert_eq!(lookup("scalar_field_nd").unwrap().len(), 3);
    }
}
