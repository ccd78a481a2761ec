//! Seeded random expressions and forms for property checks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{rat, Expr, Monomial, Rational};
use crate::form::{Covector, DForm};
use crate::jet::{JetSpace, JetVar};
use crate::multi_index::MultiIndex;

/// Draws differential polynomials and forms on a fixed jet space.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    space: JetSpace,
    /// Largest jet order of a coordinate or contact form.
    pub max_order: u32,
    /// Largest number of factors in a monomial.
    pub max_degree: u32,
    /// Largest number of terms in a coefficient or a form.
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64, space: JetSpace) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            space,
            max_order: 2,
            max_degree: 3,
            max_terms: 3,
        }
    }

    pub fn with_max_order(mut self, k: u32) -> Self {
        self.max_order = k;
        self
    }

    pub fn with_max_degree(mut self, k: u32) -> Self {
        self.max_degree = k;
        self
    }

    pub fn with_max_terms(mut self, k: usize) -> Self {
        self.max_terms = k.max(1);
        self
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A nonzero rational `p/q` with `|p| ≤ 3`, `1 ≤ q ≤ 3`.
    pub fn coefficient(&mut self) -> Rational {
        let p = self.rng.gen_range(1..=3) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let q = self.rng.gen_range(1..=3);
        rat(p, q)
    }

    pub fn multi_index(&mut self) -> MultiIndex {
        let n = self.dim();
        let order = self.rng.gen_range(0..=self.max_order);
        let mut a = MultiIndex::zero(n);
        for _ in 0..order {
            a = a.incremented(self.rng.gen_range(0..n));
        }
        a
    }

    /// A base coordinate (one time in four) or a fiber coordinate.
    pub fn var(&mut self) -> JetVar {
        if self.rng.gen_range(0..4) == 0 {
            return JetVar::base(self.rng.gen_range(0..self.dim()));
        }
        let dep = self.rng.gen_range(0..self.space.num_deps());
        JetVar::fiber(dep, self.multi_index())
    }

    pub fn monomial(&mut self) -> Monomial {
        let k = self.rng.gen_range(0..=self.max_degree);
        Monomial::from_powers((0..k).map(|_| (self.var(), 1)).collect())
    }

    pub fn expr(&mut self) -> Expr {
        let k = self.rng.gen_range(1..=self.max_terms);
        let mut e = Expr::zero();
        for _ in 0..k {
            let m = self.monomial();
            let c = self.coefficient();
            e.add_term(m, c);
        }
        e
    }

    pub fn theta(&mut self) -> Covector {
        let dep = self.rng.gen_range(0..self.space.num_deps());
        Covector::theta(dep, self.multi_index())
    }

    /// `f·dx^I∧θ_J` with `|J| = contact` and `|I| = degree − contact`.
    pub fn monomial_form(&mut self, degree: usize, contact: usize) -> DForm {
        let n = self.dim();
        assert!(contact <= degree && degree - contact <= n);
        let mut covs: Vec<Covector> = sample(&mut self.rng, n, degree - contact)
            .into_iter()
            .map(Covector::dx)
            .collect();
        for _ in 0..contact {
            covs.push(self.theta());
        }
        let f = self.expr();
        DForm::term(n, f, covs)
    }

    /// A `degree`-form whose terms all have contact degree at least `min_contact`.
    pub fn contact_form(&mut self, degree: usize, min_contact: usize) -> DForm {
        let n = self.dim();
        let lo = min_contact.max(degree.saturating_sub(n));
        assert!(lo <= degree, "no {degree}-form of contact degree ≥ {min_contact}");
        let mut w = DForm::zero(n);
        for _ in 0..self.rng.gen_range(1..=self.max_terms) {
            let c = self.rng.gen_range(lo..=degree);
            w += self.monomial_form(degree, c);
        }
        w
    }

    pub fn form(&mut self, degree: usize) -> DForm {
        self.contact_form(degree, 0)
    }

    pub fn horizontal(&mut self, degree: usize) -> DForm {
        assert!(degree <= self.dim());
        let mut w = DForm::zero(self.dim());
        for _ in 0..self.rng.gen_range(1..=self.max_terms) {
            w += self.monomial_form(degree, 0);
        }
        w
    }

    /// A horizontal top-degree form.
    pub fn lagrangian(&mut self) -> DForm {
        self.horizontal(self.dim())
    }
}
