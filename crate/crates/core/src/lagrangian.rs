//! Internal Lagrangians of a solved-form system: membership, the map from
//! Euler–Lagrange Lagrangians, reconstruction of a stationary action and
//! the presymplectic form.

use crate::equation::{extend_form, internal_residue, EqSystem, Extension};
use crate::error::{Error, Result};
use crate::form::{DForm, EvolutionaryField};
use crate::variational::{
    euler, horizontal_primitive, ibp_operator, map_residual, noether_form, theta_ident, CDiffOp,
    IbpOrder, SourceForm,
};

/// Verdict of the membership test with the offending contact-degree < 2 terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub residue: DForm,
}

impl Membership {
    pub fn holds(&self) -> bool {
        self.residue.is_zero()
    }
}

/// Whether `reduce_form(dl)` lies in `C²Λⁿ⁺¹`.
pub fn is_internal_lagrangian(l: &DForm, system: &EqSystem) -> Result<Membership> {
    l.expect_degree(system.dim())?;
    Ok(Membership {
        residue: internal_residue(l, system)?,
    })
}

/// Witnesses `(c, ρ, σ)` of `l₁ − l₂ = c + dρ + dσ` on the equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeWitness {
    /// `c ∈ C²Λⁿ`.
    pub c: DForm,
    /// `ρ ∈ CΛⁿ⁻¹`.
    pub rho: DForm,
    /// `σ ∈ Λⁿ⁻¹`.
    pub sigma: DForm,
}

impl GaugeWitness {
    pub fn zero(dim: usize) -> Self {
        GaugeWitness {
            c: DForm::zero(dim),
            rho: DForm::zero(dim),
            sigma: DForm::zero(dim),
        }
    }
}

/// An internal Lagrangian with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianClass {
    /// `l`, in internal coordinates.
    pub representative: DForm,
    /// `ω_L` used to build `l`, when it came from a Lagrangian.
    pub omega: Option<DForm>,
    /// Known equivalence with another representative.
    pub witness: Option<GaugeWitness>,
}

/// `l = reduce_form(L + ω_L)` for a Lagrangian whose Euler–Lagrange
/// expressions vanish on the equation.
pub fn internal_of_lagrangian(lagrangian: &DForm, system: &EqSystem) -> Result<LagrangianClass> {
    let m = system.space().num_deps();
    let e = euler(lagrangian, m)?;
    let mut offending = Vec::new();
    for (i, c) in e.components().iter().enumerate() {
        let r = system.reduce(c)?;
        if !r.is_zero() {
            offending.push(format!(
                "E[{}] = {}",
                system.space().dep_names()[i],
                r.to_text(system.space())
            ));
        }
    }
    if !offending.is_empty() {
        return Err(Error::EulerNonvanishing(offending.join("; ")));
    }
    let nf = noether_form(lagrangian, m)?;
    let representative = system.reduce_form(&(lagrangian + &nf.omega))?;
    Ok(LagrangianClass {
        representative,
        omega: Some(nf.omega),
        witness: None,
    })
}

/// Splits `X ∈ CΛⁿ` with `[i_{E_φ} dX]_h = 0` as `X = c + dρ`, `c ∈ C²Λⁿ`,
/// `ρ ∈ CΛⁿ⁻¹`, on the jet space.
pub fn split_contact_form(x: &DForm) -> Result<(DForm, DForm)> {
    let n = x.dim();
    if !x.in_cp(1) {
        return Err(Error::NotHorizontal(x.horizontal_part().len()));
    }
    let field = EvolutionaryField::generic();
    let delta = x.interior(&field).horizontal_part();
    let primitive = horizontal_primitive(&delta)?;
    let rho = -theta_ident(&primitive)?;
    let c = x - &rho.d();
    if !c.in_cp(2) {
        return Err(Error::NotInternal(format!(
            "{} contact-degree-one term(s) survive the splitting",
            c.contact_part(1).len()
        )));
    }
    debug_assert_eq!(c.dim(), n);
    Ok((c, rho))
}

/// Witness that `reduce_form(d_h η + ω)` is equivalent to zero, with `σ = η`.
pub fn exact_shift_witness(eta: &DForm, system: &EqSystem) -> Result<(LagrangianClass, GaugeWitness)> {
    let lagrangian = eta.horizontal_diff()?;
    let mut class = internal_of_lagrangian(&lagrangian, system)?;
    let omega = class.omega.clone().unwrap_or_else(|| DForm::zero(system.dim()));
    let x = &lagrangian + &omega - eta.d();
    let (c, rho) = split_contact_form(&x)?;
    let witness = GaugeWitness {
        c: system.reduce_form(&c)?,
        rho: system.reduce_form(&rho)?,
        sigma: system.reduce_form(eta)?,
    };
    class.witness = Some(witness.clone());
    Ok((class, witness))
}

/// Outcome of a witnessed comparison of two representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeComparison {
    pub residual: DForm,
    pub c_in_c2: bool,
    pub rho_in_c1: bool,
}

impl GaugeComparison {
    pub fn holds(&self) -> bool {
        self.residual.is_zero() && self.c_in_c2 && self.rho_in_c1
    }
}

/// Checks `l₁ − l₂ = c + dρ (+ dσ)` after reduction. With `use_sigma`
/// false the exact term is dropped, testing the finer quotient.
pub fn gauge_compare(
    l1: &DForm,
    l2: &DForm,
    w: &GaugeWitness,
    use_sigma: bool,
    system: &EqSystem,
) -> Result<GaugeComparison> {
    let mut rhs = &w.c + &w.rho.d();
    if use_sigma {
        rhs += w.sigma.d();
    }
    let residual = system.reduce_form(&(l1 - l2 - rhs))?;
    Ok(GaugeComparison {
        residual,
        c_in_c2: system.reduce_form(&w.c)?.in_cp(2),
        rho_in_c1: system.reduce_form(&w.rho)?.in_cp(1),
    })
}

/// Every certificate produced by [`action_from_internal`].
#[derive(Clone, Debug)]
pub struct RoundTrip {
    /// The extension `L` of `l`.
    pub extension: Extension,
    /// `L′ = [L]_h`.
    pub action: DForm,
    /// `∇(G, φ)`, bilinear in `psi` and `phi`.
    pub nabla: DForm,
    /// `∇(F, φ) = [i_{E_φ} dL]_h`.
    pub nabla_matches: bool,
    /// `∇₁(G, φ)`.
    pub nabla1: DForm,
    /// `A`, with `E[L′] = A(F)`.
    pub a: CDiffOp,
    pub euler: SourceForm,
    /// (a) `E[L′] = A(F)` exactly.
    pub cert_identity: bool,
    /// (b) `E[L′]` vanishes on the equation.
    pub cert_vanishing: bool,
    /// `ω ∈ I·CΛⁿ` built from `∇₁(F, ·)`.
    pub omega_ideal: DForm,
    /// `ω` satisfies the variation-map identity for `L`, vanishes on the
    /// equation, and `L + ω` restricts to `l`.
    pub omega_checks: bool,
    /// `reduce_form(L′ + ω_{L′})`.
    pub reconstructed: DForm,
    pub witness: GaugeWitness,
    /// (c) `l` and the reconstruction agree modulo `C² + dCΛ`.
    pub cert_gauge: GaugeComparison,
}

impl RoundTrip {
    pub fn all_pass(&self) -> bool {
        self.nabla_matches
            && self.cert_identity
            && self.cert_vanishing
            && self.omega_checks
            && self.cert_gauge.holds()
    }
}

/// Reconstructs a Lagrangian with vanishing Euler–Lagrange expressions on
/// the equation from an internal Lagrangian, with certificates.
pub fn action_from_internal(l: &DForm, system: &EqSystem) -> Result<RoundTrip> {
    let n = system.dim();
    let m = system.space().num_deps();
    let membership = is_internal_lagrangian(l, system)?;
    if !membership.holds() {
        return Err(Error::NotInternal(membership.residue.to_text(system.space())));
    }
    let extension = extend_form(l, system)?;
    let big_l = &extension.form;
    let action = big_l.horizontal_part();
    let field = EvolutionaryField::generic();

    let nabla = extension.witness_form(n).interior(&field).horizontal_part();
    let expected = big_l.d().interior(&field).horizontal_part();
    let nabla_f = nabla.map_coefficients(|c| system.substitute_relations(c));
    let nabla_matches = nabla_f == expected;

    let (nabla1, a) = ibp_operator(&nabla, m, system.relations().len(), IbpOrder::FirstDirection)?;
    let e = euler(&action, m)?;
    let a_f = a.apply(&system.functions());
    let cert_identity = a_f.as_slice() == e.components();
    let mut cert_vanishing = true;
    for c in e.components() {
        cert_vanishing &= system.reduce(c)?.is_zero();
    }

    let omega_ideal = theta_ident(&nabla1.map_coefficients(|c| system.substitute_relations(c)))?;
    let omega_checks = map_residual(big_l, &omega_ideal, m)?.is_zero()
        && system.reduce_form(&omega_ideal)?.is_zero()
        && system.reduce_form(&(big_l + &omega_ideal))? == *l;

    let nf = noether_form(&action, m)?;
    let reconstructed = system.reduce_form(&(&action + &nf.omega))?;
    let x = big_l + &omega_ideal - &action - &nf.omega;
    let (c, rho) = split_contact_form(&x)?;
    let witness = GaugeWitness {
        c: system.reduce_form(&c)?,
        rho: system.reduce_form(&rho)?,
        sigma: DForm::zero(n),
    };
    let cert_gauge = gauge_compare(l, &reconstructed, &witness, false, system)?;
    Ok(RoundTrip {
        extension,
        action,
        nabla,
        nabla_matches,
        nabla1,
        a,
        euler: e,
        cert_identity,
        cert_vanishing,
        omega_ideal,
        omega_checks,
        reconstructed,
        witness,
        cert_gauge,
    })
}

/// `Ω = reduce_form(dl)` for an internal Lagrangian `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presymplectic {
    pub omega: DForm,
    pub source: DForm,
}

impl Presymplectic {
    /// Representative-level evidence that `l` is not hidden.
    pub fn is_nonzero(&self) -> bool {
        !self.omega.is_zero()
    }
}

pub fn presymplectic_of(l: &DForm, system: &EqSystem) -> Result<Presymplectic> {
    let omega = system.reduce_form(&l.d())?;
    if !omega.in_cp(2) {
        return Err(Error::NotInternal(omega.below_cp(2).to_text(system.space())));
    }
    Ok(Presymplectic {
        omega,
        source: l.clone(),
    })
}

/// Strict cocycle condition: terms of `reduce_form(dΩ)` below contact degree three.
pub fn presymplectic_cocycle_residue(omega: &DForm, system: &EqSystem) -> Result<DForm> {
    Ok(system.reduce_form(&omega.d())?.below_cp(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::DEFAULT_MAX_ORDER;
    use crate::jet::JetSpace;
    use crate::parse::parse_form;

    fn wave() -> EqSystem {
        let s = JetSpace::new(&["x", "t"], &["u"]).unwrap();
        EqSystem::parse(s, &["u_tt = u_xx"], DEFAULT_MAX_ORDER).unwrap()
    }

    fn f(sys: &EqSystem, t: &str) -> DForm {
        parse_form(sys.space(), t).unwrap()
    }

    const WAVE_L: &str = "1/2*(u_t^2 - u_x^2)*dx&dt";
    const WAVE_INTERNAL: &str = "1/2*(u_t^2 - u_x^2)*dx&dt - u_t*th[u]&dx - u_x*th[u]&dt";

    #[test]
    fn membership_examples() {
        let w = wave();
        assert!(is_internal_lagrangian(&f(&w, WAVE_INTERNAL), &w).unwrap().holds());
        let bad = is_internal_lagrangian(&f(&w, "u*dx&dt"), &w).unwrap();
        assert!(!bad.holds());
        assert_eq!(bad.residue, f(&w, "th[u]&dx&dt"));
        assert!(is_internal_lagrangian(&DForm::zero(2), &w).unwrap().holds());
    }

    #[test]
    fn internal_of_wave_lagrangian() {
        let w = wave();
        let class = internal_of_lagrangian(&f(&w, WAVE_L), &w).unwrap();
        assert_eq!(class.representative, f(&w, WAVE_INTERNAL));
        assert!(internal_of_lagrangian(&DForm::zero(2), &w).unwrap().representative.is_zero());
        assert!(matches!(
            internal_of_lagrangian(&f(&w, "u*dx&dt"), &w),
            Err(Error::EulerNonvanishing(_))
        ));
    }

    #[test]
    fn exact_lagrangian_is_equivalent_to_zero() {
        let w = wave();
        let eta = f(&w, "u^2*u_t*dt + x*u_x*dx");
        let (class, witness) = exact_shift_witness(&eta, &w).unwrap();
        let cmp = gauge_compare(&class.representative, &DForm::zero(2), &witness, true, &w).unwrap();
        assert!(cmp.holds(), "{:?}", cmp.residual);
    }

    #[test]
    fn gauge_compare_examples() {
        let w = wave();
        let l = f(&w, WAVE_INTERNAL);
        let rho = f(&w, "u_x*u*th[u]");
        let shifted = &l + &w.reduce_form(&rho.d()).unwrap();
        let wit = GaugeWitness {
            rho: rho.clone(),
            ..GaugeWitness::zero(2)
        };
        assert!(gauge_compare(&shifted, &l, &wit, false, &w).unwrap().holds());
        let sigma = f(&w, "u*x*dt");
        let shifted = &l + &w.reduce_form(&sigma.d()).unwrap();
        let wit = GaugeWitness {
            sigma,
            ..GaugeWitness::zero(2)
        };
        assert!(gauge_compare(&shifted, &l, &wit, true, &w).unwrap().holds());
        assert!(!gauge_compare(&shifted, &l, &wit, false, &w).unwrap().holds());
    }

    #[test]
    fn wave_round_trip() {
        let w = wave();
        let rt = action_from_internal(&f(&w, WAVE_INTERNAL), &w).unwrap();
        assert!(rt.nabla_matches && rt.cert_identity && rt.cert_vanishing && rt.omega_checks);
        assert!(rt.cert_gauge.holds(), "{:?}", rt.cert_gauge.residual);
        let zero = action_from_internal(&DForm::zero(2), &w).unwrap();
        assert!(zero.action.is_zero() && zero.a.is_zero() && zero.all_pass());
        assert!(matches!(
            action_from_internal(&f(&w, "u*dx&dt"), &w),
            Err(Error::NotInternal(_))
        ));
    }

    #[test]
    fn wave_presymplectic_form() {
        let w = wave();
        let p = presymplectic_of(&f(&w, WAVE_INTERNAL), &w).unwrap();
        assert_eq!(p.omega, f(&w, "-th[u;t]&th[u]&dx - th[u;x]&th[u]&dt"));
        assert!(presymplectic_cocycle_residue(&p.omega, &w).unwrap().is_zero());
        let rho = f(&w, "u*u_t*th[u;x]");
        let shifted = f(&w, WAVE_INTERNAL) + w.reduce_form(&rho.d()).unwrap();
        assert_eq!(presymplectic_of(&shifted, &w).unwrap().omega, p.omega);
        assert!(presymplectic_of(&DForm::zero(2), &w).unwrap().omega.is_zero());
    }

    #[test]
    fn presymplectic_ansatz_verdict() {
        let w = wave();
        let ansatz = f(&w, "th[u]&th[u;x]&dx");
        let residue = presymplectic_cocycle_residue(&ansatz, &w).unwrap();
        // d(θ∧θ_x∧dx) = −θ∧dt∧θ_xt∧dx has contact degree two.
        assert!(!residue.is_zero());
    }
}
