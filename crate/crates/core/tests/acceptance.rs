//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cartan_forge::commands::cmd_corpus;
use cartan_forge::corpus::{self, CorpusEntry};
use cartan_forge::equation::{EqSystem, DEFAULT_MAX_ORDER};
use cartan_forge::lagrangian::{
    action_from_internal, internal_of_lagrangian, is_internal_lagrangian, presymplectic_cocycle_residue,
    presymplectic_of,
};
use cartan_forge::sample::Sampler;
use cartan_forge::variational::{
    euler, ibp_scalar, map_residual, noether_form, noether_identity_check, IbpOrder,
};
use cartan_forge::{AuxFamily, Covector, DForm, Expr, JetSpace, JetVar, MultiIndex};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spaces() -> Vec<JetSpace> {
    let mut v = Vec::new();
    for n in 1..=3 {
        for m in 1..=2 {
            v.push(JetSpace::standard(n, m));
        }
    }
    v
}

/// `D_i` from its defining formula `∂_{x^i} + Σ v_{+1_i} ∂_v`.
fn oracle_d(f: &Expr, i: usize) -> Expr {
    let mut out = f.partial(&JetVar::base(i));
    for v in f.vars() {
        let next = match v {
            JetVar::Base(_) => continue,
            JetVar::Fiber { dep, alpha } => JetVar::fiber(dep as usize, alpha.incremented(i)),
            JetVar::Aux {
                family,
                index,
                alpha,
            } => JetVar::aux(family, index as usize, alpha.incremented(i)),
        };
        out += f.partial(&v) * Expr::var(next);
    }
    out
}

fn oracle_d_multi(f: &Expr, alpha: &MultiIndex) -> Expr {
    alpha.directions().into_iter().fold(f.clone(), |g, i| oracle_d(&g, i))
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for (s, space) in spaces().into_iter().enumerate() {
        let n = space.dim();
        let mut smp = Sampler::new(100 + s as u64, space)
            .with_max_order(4)
            .with_max_degree(2);
        for _ in 0..200 {
            let degree = smp.rng_range(0, n + 1);
            let p = smp.rng_range(0, degree).max(degree.saturating_sub(n));
            let w = smp.contact_form(degree, p);
            let dw = w.d();
            ensure(dw.d().is_zero(), || format!("d∘d ≠ 0 on {w:?}"))?;
            ensure(dw.in_cp(p), || format!("d leaves C^{p} on {w:?}"))?;
            checked += 1;
        }
        for _ in 0..20 {
            let f = smp.expr();
            let mut oracle = DForm::zero(n);
            for k in 0..n {
                oracle += DForm::dx(n, k).mul_expr(&oracle_d(&f, k));
            }
            for v in f.vars() {
                if let JetVar::Fiber { dep, alpha } = v {
                    oracle += DForm::theta(n, dep as usize, alpha).mul_expr(&f.partial(&v));
                }
            }
            ensure(DForm::scalar(n, f.clone()).d() == oracle, || format!("d f mismatch for {f:?}"))?;
        }
    }
    ensure(checked >= 1000, || format!("only {checked} forms checked"))?;
    Ok(format!("{checked} random forms, d∘d = 0 and d(C^p) ⊆ C^p exactly"))
}

fn criterion_2() -> Outcome {
    let mut exact = 0;
    let mut ibp = 0;
    for (s, space) in spaces().into_iter().enumerate() {
        let (n, m) = (space.dim(), space.num_deps());
        let mut smp = Sampler::new(200 + s as u64, space).with_max_order(3);
        for _ in 0..90 {
            let eta = smp.horizontal(n - 1);
            let l = eta.horizontal_diff().map_err(|e| e.to_string())?;
            let e = euler(&l, m).map_err(|e| e.to_string())?;
            ensure(e.is_zero(), || format!("euler(d_h η) ≠ 0 for η = {eta:?}"))?;
            exact += 1;
        }
        smp.max_order = 2;
        smp.max_terms = 2;
        for _ in 0..30 {
            let mut density = Expr::zero();
            let mut oracle = vec![Expr::zero(); m];
            for _ in 0..3 {
                let i = smp.rng_range(0, m - 1);
                let alpha = smp.multi_index();
                let c = smp.expr();
                density += &c * &Expr::var(JetVar::aux(AuxFamily::Phi, i, alpha));
                let term = oracle_d_multi(&c, &alpha);
                if alpha.order().is_multiple_of(2) {
                    oracle[i] += term;
                } else {
                    oracle[i] -= term;
                }
            }
            let op = DForm::volume(n).mul_expr(&density);
            let first = ibp_scalar(&op, m, IbpOrder::FirstDirection).map_err(|e| e.to_string())?;
            let last = ibp_scalar(&op, m, IbpOrder::LastDirection).map_err(|e| e.to_string())?;
            ensure(first.source.components() == oracle.as_slice(), || {
                format!("μ differs from the adjoint-formula oracle for {density:?}")
            })?;
            ensure(first.source == last.source, || "μ depends on the elimination order".into())?;
            for dec in [&first, &last] {
                let back = dec.boundary.horizontal_diff().map_err(|e| e.to_string())?
                    + dec.source.pair_form(AuxFamily::Phi);
                ensure(back == op, || format!("d_h Δ₁ + μ does not reassemble {density:?}"))?;
            }
            ibp += 1;
        }
    }
    ensure(exact >= 500, || format!("only {exact} exact Lagrangians"))?;
    Ok(format!(
        "euler(d_h η) = 0 on {exact} forms; μ matches the oracle on {ibp} operators under both orders"
    ))
}

struct Population {
    items: Vec<(String, DForm, usize)>,
}

fn population() -> Result<Population, String> {
    let mut items = Vec::new();
    for e in corpus::all() {
        let l = e.lagrangian_form().map_err(|x| x.to_string())?;
        items.push((e.name.clone(), l, e.dependent.len()));
    }
    let mut k = 0;
    for (s, space) in spaces().into_iter().enumerate() {
        let m = space.num_deps();
        let mut smp = Sampler::new(300 + s as u64, space)
            .with_max_order(2)
            .with_max_degree(3);
        for _ in 0..20 {
            items.push((format!("random-{k}"), smp.lagrangian(), m));
            k += 1;
        }
    }
    Ok(Population { items })
}

fn criterion_3() -> Outcome {
    let pop = population()?;
    for (name, l, m) in &pop.items {
        let nf = noether_form(l, *m).map_err(|e| format!("{name}: {e}"))?;
        let check = noether_identity_check(l, &nf.omega, *m).map_err(|e| format!("{name}: {e}"))?;
        ensure(check.holds(), || format!("{name}: residual {:?}", check.residual))?;
    }
    Ok(format!(
        "zero residual on {} corpus and {} random Lagrangians",
        corpus::all().len(),
        pop.items.len() - corpus::all().len()
    ))
}

fn criterion_4() -> Outcome {
    let pop = population()?;
    for (name, l, m) in &pop.items {
        let nf = noether_form(l, *m).map_err(|e| format!("{name}: {e}"))?;
        let r = map_residual(l, &nf.omega, *m).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.is_zero(), || format!("{name}: residual {r:?}"))?;
    }
    Ok(format!("⟨E[L], φ⟩ = [i_E d(L + ω_L)]_h on {} Lagrangians", pop.items.len()))
}

fn system_of(e: &CorpusEntry) -> Result<EqSystem, String> {
    e.system(DEFAULT_MAX_ORDER).map_err(|x| format!("{}: {x}", e.name))
}

fn internal_of(e: &CorpusEntry) -> Result<(EqSystem, DForm), String> {
    let sys = system_of(e)?;
    let l = e.lagrangian_form().map_err(|x| x.to_string())?;
    let class = internal_of_lagrangian(&l, &sys).map_err(|x| format!("{}: {x}", e.name))?;
    Ok((sys, class.representative))
}

fn criterion_5() -> Outcome {
    let mut names = Vec::new();
    for e in corpus::all() {
        let (sys, l) = internal_of(&e)?;
        let m = is_internal_lagrangian(&l, &sys).map_err(|x| x.to_string())?;
        ensure(m.holds(), || format!("{}: {} offending terms", e.name, m.residue.len()))?;
        ensure(sys.reduce_form(&l.d()).map_err(|x| x.to_string())?.in_cp(2), || {
            format!("{}: reduce_form(dl) not in C²", e.name)
        })?;
        names.push(e.name);
    }
    Ok(format!("reduce_form(dl) ∈ C² for {}", names.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut n = 0;
    for e in corpus::all() {
        let (sys, l) = internal_of(&e)?;
        let rt = action_from_internal(&l, &sys).map_err(|x| format!("{}: {x}", e.name))?;
        ensure(rt.cert_identity, || format!("{}: euler(L') ≠ A(F)", e.name))?;
        ensure(rt.cert_vanishing, || format!("{}: euler(L') does not vanish on 𝓔", e.name))?;
        ensure(rt.cert_gauge.holds(), || {
            format!("{}: gauge residual {:?}", e.name, rt.cert_gauge.residual)
        })?;
        ensure(rt.all_pass(), || format!("{}: auxiliary certificate failed", e.name))?;
        n += 1;
    }
    Ok(format!("certificates (a), (b), (c) hold on {n} corpus entries"))
}

fn criterion_7() -> Outcome {
    let mut n = 0;
    for e in corpus::all() {
        let (sys, l) = internal_of(&e)?;
        let p = presymplectic_of(&l, &sys).map_err(|x| format!("{}: {x}", e.name))?;
        let res = presymplectic_cocycle_residue(&p.omega, &sys).map_err(|x| x.to_string())?;
        ensure(res.is_zero(), || format!("{}: cocycle residue {res:?}", e.name))?;
        n += 1;
    }
    let (sys, l) = internal_of(&corpus::wave2d())?;
    let omega = presymplectic_of(&l, &sys).map_err(|x| x.to_string())?.omega;
    // θ_t∧θ∧dx + θ_x∧θ∧dt, with the global sign of our ω_L convention.
    let th = |a: &[u8]| Covector::theta(0, MultiIndex::from_slice(a));
    let hand = DForm::term(2, Expr::one(), vec![th(&[0, 1]), th(&[0, 0]), Covector::dx(0)])
        + DForm::term(2, Expr::one(), vec![th(&[1, 0]), th(&[0, 0]), Covector::dx(1)]);
    ensure(omega == -hand, || format!("wave2d Ω = {}", omega.to_text(sys.space())))?;
    Ok(format!("strict cocycle on {n} entries; wave2d Ω = {}", omega.to_text(sys.space())))
}

fn criterion_8() -> Outcome {
    let e = corpus::maxwell(4);
    let (sys, l) = internal_of(&e)?;
    let p = presymplectic_of(&l, &sys).map_err(|x| x.to_string())?;
    ensure(p.is_nonzero(), || "maxwell4d Ω = 0".into())?;
    let report = cmd_corpus("maxwell4d", None).map_err(|x| x.to_string())?;
    ensure(report.passed(), || report.to_text())?;
    Ok(format!("maxwell4d pipeline passes; Ω has {} terms", p.omega.len()))
}

fn criterion_9() -> Outcome {
    let a = cmd_corpus("all", None).map_err(|x| x.to_string())?;
    let b = cmd_corpus("all", None).map_err(|x| x.to_string())?;
    ensure(a.to_text() == b.to_text(), || "text reports differ".into())?;
    ensure(a.to_json() == b.to_json(), || "JSON reports differ".into())?;
    Ok(format!("`corpus all` byte-identical over two runs ({} bytes)", a.to_text().len()))
}

trait RangeExt {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize;
}

impl RangeExt for Sampler {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize {
        use rand::Rng;
        self.rng().gen_range(lo..=hi)
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exterior calculus", criterion_1),
        ("euler and integration by parts", criterion_2),
        ("noether identity", criterion_3),
        ("variation map", criterion_4),
        ("internal membership", criterion_5),
        ("round trip", criterion_6),
        ("presymplectic", criterion_7),
        ("maxwell4d consistency", criterion_8),
        ("determinism", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(panic_message(p)));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{ms} ms]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} [{ms} ms]", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
