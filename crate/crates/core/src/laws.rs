//! Seeded property suites over the order, functor and engine layers.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coalgebra::CoalgebraSpec;
use crate::engine::{
    check_limit_colimit, coinductive_extension, count_coalgebra_morphisms, final_coalgebra, is_coalgebra_morphism,
    terminal_sequence, SeqStatus,
};
use crate::error::Result;
use crate::functor::{act_ep, parse, Backend, Constants, FunctorInstance};
use crate::order::{
    all_pointed_posets, all_posets, boolean_lattice, chain, fun_space_with, iso_brute_force, iso_check, lift,
    monotone_tables, one, random_pointed_poset, random_poset, upsets_with, EpPair, FinPoset,
};
use crate::relation::Relation;

/// Samples per combinator for the sampled suites.
pub const SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawSuite {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawsReport {
    pub seed: u64,
    pub suites: Vec<LawSuite>,
}

impl LawsReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    pub fn failures(&self) -> usize {
        self.suites.iter().map(|s| s.failures).sum()
    }

    pub fn first_counterexample(&self) -> Option<(&str, &str)> {
        self.suites.iter().find_map(|s| s.counterexample.as_deref().map(|c| (s.name.as_str(), c)))
    }

    /// One line per suite followed by a total.
    pub fn transcript(&self) -> String {
        let mut out = format!("check-laws seed={}\n", self.seed);
        for s in &self.suites {
            let _ = writeln!(out, "{}: {} samples, {} failures", s.name, s.samples, s.failures);
        }
        let samples: usize = self.suites.iter().map(|s| s.samples).sum();
        let _ = writeln!(out, "total: {} samples, {} failures", samples, self.failures());
        out
    }
}

struct Tally {
    suites: Vec<LawSuite>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, what: impl FnOnce() -> String) {
        let i = match self.suites.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                self.suites.push(LawSuite { name: name.to_string(), samples: 0, failures: 0, counterexample: None });
                self.suites.len() - 1
            }
        };
        let s = &mut self.suites[i];
        s.samples += 1;
        if !ok {
            s.failures += 1;
            if s.counterexample.is_none() {
                s.counterexample = Some(what());
            }
        }
    }
}

/// Runs every suite with a ChaCha stream seeded by `seed`.
pub fn check_laws(seed: u64) -> Result<LawsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally { suites: Vec::new() };
    functor_laws(&mut rng, &mut t)?;
    rel_lift_laws(&mut rng, &mut t)?;
    construction_counts(&mut t)?;
    extension_uniqueness(&mut t)?;
    limit_colimit(&mut t)?;
    iso_agreement(&mut rng, &mut t)?;
    Ok(LawsReport { seed, suites: t.suites })
}

fn describe(p: &FinPoset) -> String {
    serde_json::to_string(&p.to_json()).unwrap_or_default()
}

/// An ep-pair from a random induced subposet of `y` containing bottom, or
/// from the bottom alone when no sampled subset admits a projection.
pub fn random_sub_ep<R: Rng>(rng: &mut R, y: &Arc<FinPoset>) -> EpPair {
    let bot = y.bottom().expect("pointed");
    for _ in 0..64 {
        let members: Vec<usize> = (0..y.len()).filter(|&i| i == bot || rng.gen_bool(0.5)).collect();
        if let Some(ep) = sub_ep(y, &members) {
            return ep;
        }
    }
    sub_ep(y, &[bot]).expect("bottom alone always projects")
}

fn sub_ep(y: &Arc<FinPoset>, members: &[usize]) -> Option<EpPair> {
    let mut proj = Vec::with_capacity(y.len());
    for b in 0..y.len() {
        let below: Vec<usize> = (0..members.len()).filter(|&k| y.leq(members[k], b)).collect();
        let top = below.iter().copied().find(|&c| below.iter().all(|&d| y.leq(members[d], members[c])))?;
        proj.push(top);
    }
    let ids = members.iter().map(|&i| y.id(i).to_string()).collect();
    let bottom = members.iter().position(|&i| Some(i) == y.bottom());
    let x = Arc::new(FinPoset::from_leq_fn(ids, bottom, |a, b| y.leq(members[a], members[b])));
    EpPair::from_tables(&x, y, members.to_vec(), proj).ok()
}

fn ep_tables(ep: &EpPair) -> (Vec<usize>, Vec<usize>) {
    (ep.embedding().table().to_vec(), ep.projection().table().to_vec())
}

const COMBINATORS: &[(&str, &str)] = &[
    ("const", "Bool"),
    ("id", "Id"),
    ("param", "W"),
    ("sum", "Id + W"),
    ("prod", "Id * Id"),
    ("lift", "Lift(Id)"),
    ("fun", "(V -> Id)"),
    ("strict-fun", "(V -!> Id)"),
    ("upset", "U(Id)"),
    ("strict-upset", "Us(Id)"),
];

fn pointed_instance(text: &str, v: FinPoset, w: FinPoset) -> Result<FunctorInstance> {
    let c = Constants::new();
    FunctorInstance::new(parse(text, &c)?, Backend::PointedStrict, Arc::new(v), Arc::new(w), c)
}

fn functor_laws<R: Rng>(rng: &mut R, t: &mut Tally) -> Result<()> {
    for &(name, text) in COMBINATORS {
        let inst = pointed_instance(text, boolean_lattice(), boolean_lattice())?;
        let suite = format!("functor-laws[{name}]");
        for _ in 0..SAMPLES {
            let n = rng.gen_range(2..=5);
            let z = Arc::new(random_pointed_poset(rng, n, 0.4));
            let e2 = random_sub_ep(rng, &z);
            let e1 = random_sub_ep(rng, e2.source());
            t.record("ep-laws", e1.verify().is_ok() && e2.verify().is_ok(), || describe(&z));
            let id = inst.on_ep(&EpPair::identity(&z))?;
            let f1 = inst.on_ep(&e1)?;
            let f2 = inst.on_ep(&e2)?;
            let f21 = inst.on_ep(&e1.then(&e2)?)?;
            let composed = f1.then(&f2)?;
            for f in [&id, &f1, &f2, &f21] {
                t.record("ep-laws", f.verify().is_ok(), || format!("{text} at {}", describe(&z)));
            }
            let ok = id.embedding().is_identity()
                && id.projection().is_identity()
                && ep_tables(&f21) == ep_tables(&composed);
            t.record(&suite, ok, || format!("{text} at {}", describe(&z)));
        }
    }
    // Both arguments at once: F(e, e) for the deterministic family.
    let text = "(V -!> Id) + W";
    let c = Constants::new();
    let expr = parse(text, &c)?;
    for _ in 0..SAMPLES {
        let n = rng.gen_range(2..=4);
        let z = Arc::new(random_pointed_poset(rng, n, 0.4));
        let e2 = random_sub_ep(rng, &z);
        let e1 = random_sub_ep(rng, e2.source());
        let at = |p: &Arc<FinPoset>| {
            FunctorInstance::new(expr.clone(), Backend::PointedStrict, p.clone(), p.clone(), c.clone())
        };
        let (ix, iy, iz) = (at(e1.source())?, at(e1.target())?, at(&z)?);
        let f1 = act_ep(&ix, &iy, &e1, Some(&e1))?;
        let f2 = act_ep(&iy, &iz, &e2, Some(&e2))?;
        let e21 = e1.then(&e2)?;
        let f21 = act_ep(&ix, &iz, &e21, Some(&e21))?;
        let idz = act_ep(&iz, &iz, &EpPair::identity(&z), Some(&EpPair::identity(&z)))?;
        for f in [&f1, &f2, &f21, &idz] {
            t.record("ep-laws", f.verify().is_ok(), || format!("{text} mixed at {}", describe(&z)));
        }
        let ok = ep_tables(&f21) == ep_tables(&f1.then(&f2)?) && idz.embedding().is_identity();
        t.record("functor-laws[mixed]", ok, || format!("{text} at {}", describe(&z)));
    }
    Ok(())
}

fn random_relation<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n, m);
    for a in 0..n {
        for b in 0..m {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
        }
    }
    r
}

fn rel_lift_laws<R: Rng>(rng: &mut R, t: &mut Tally) -> Result<()> {
    let plain: Vec<&(&str, &str)> = COMBINATORS.iter().filter(|(n, _)| !n.starts_with("strict")).collect();
    let mut catalogue: Vec<(&str, &str)> = plain.into_iter().copied().collect();
    catalogue.push(("mixed", "(V -> Id) + W"));
    for (name, text) in catalogue {
        let c = Constants::new();
        let expr = parse(text, &c)?;
        let suite = format!("rel-lift-monotone[{name}]");
        for _ in 0..SAMPLES {
            let nv = rng.gen_range(1..=2);
            let nx = rng.gen_range(1..=3);
            let ny = rng.gen_range(1..=3);
            let v = Arc::new(random_poset(rng, nv, 0.5));
            let x = Arc::new(random_poset(rng, nx, 0.5));
            let y = Arc::new(random_poset(rng, ny, 0.5));
            let inst = FunctorInstance::new(expr.clone(), Backend::Plain, v.clone(), v.clone(), c.clone())?;
            let r = random_relation(rng, nx, ny, 0.4);
            let bigger = r.union(&random_relation(rng, nx, ny, 0.3));
            let vr = random_relation(rng, nv, nv, 0.4);
            let vr_big = vr.union(&random_relation(rng, nv, nv, 0.3));
            let wr = random_relation(rng, nv, nv, 0.4);
            let wr_big = wr.union(&random_relation(rng, nv, nv, 0.3));
            let base = inst.rel_lift(&x, &y, &r, Some(&vr_big), Some(&wr))?;
            // Monotone in the state and covariant parameter relations,
            // antitone in the contravariant one.
            let up = inst.rel_lift(&x, &y, &bigger, Some(&vr), Some(&wr_big))?;
            t.record(&suite, base.is_subset(&up), || format!("{text}: {r:?} below {bigger:?}"));
            let id = inst.rel_lift(&x, &x, &Relation::identity(nx), None, None)?;
            let fx = inst.apply(&x)?;
            t.record("rel-lift-identity", id == Relation::identity(fx.len()), || format!("{text} at {}", describe(&x)));
        }
    }
    Ok(())
}

/// Least element, if any.
fn least(p: &FinPoset) -> Option<usize> {
    (0..p.len()).find(|&b| (0..p.len()).all(|x| p.leq(b, x)))
}

fn brute_monotone_count(p: &FinPoset, q: &FinPoset, strict: Option<(usize, usize)>) -> usize {
    let n = p.len();
    let m = q.len();
    if n == 0 {
        return 1;
    }
    if m == 0 {
        return 0;
    }
    let mut count = 0;
    let mut f = vec![0; n];
    loop {
        let mono = (0..n).all(|a| (0..n).all(|b| !p.leq(a, b) || q.leq(f[a], f[b])));
        let st = strict.is_none_or(|(bp, bq)| f[bp] == bq);
        count += (mono && st) as usize;
        let mut i = 0;
        while i < n && f[i] == m - 1 {
            f[i] = 0;
            i += 1;
        }
        if i == n {
            return count;
        }
        f[i] += 1;
    }
}

fn brute_upset_count(p: &FinPoset, without: Option<usize>) -> usize {
    let n = p.len();
    (0u32..1 << n)
        .filter(|&s| {
            let has = |i: usize| s >> i & 1 == 1;
            without.is_none_or(|b| !has(b)) && (0..n).all(|a| !has(a) || (0..n).all(|b| !p.leq(a, b) || has(b)))
        })
        .count()
}

fn construction_counts(t: &mut Tally) -> Result<()> {
    let posets: Vec<FinPoset> = (0..=5).flat_map(all_posets).collect();
    for p in &posets {
        let pb = least(p);
        let pp = pb.map(|b| p.with_bottom(Some(b))).transpose()?;
        for q in &posets {
            let space = fun_space_with(p, q, false, usize::MAX)?;
            let ok = space.poset.len() == brute_monotone_count(p, q, None);
            t.record("fun-space-count", ok, || format!("{} -> {}", describe(p), describe(q)));
            if let (Some(pp), Some(qb)) = (&pp, least(q)) {
                let qp = q.with_bottom(Some(qb))?;
                let strict = fun_space_with(pp, &qp, true, usize::MAX)?;
                let ok = strict.poset.len() == brute_monotone_count(p, q, Some((pb.unwrap(), qb)));
                t.record("strict-fun-space-count", ok, || format!("{} -!> {}", describe(p), describe(q)));
            }
        }
        let ups = upsets_with(p, false, usize::MAX)?;
        t.record("upset-count", ups.poset.len() == brute_upset_count(p, None), || describe(p));
        let ordered = (0..ups.sets.len()).all(|i| {
            (0..ups.sets.len()).all(|j| ups.poset.leq(i, j) == ups.sets[i].iter().all(|x| ups.sets[j].contains(x)))
        });
        t.record("upset-order", ordered, || describe(p));
        if let Some(pp) = &pp {
            let s = upsets_with(pp, true, usize::MAX)?;
            t.record("strict-upset-count", s.poset.len() == brute_upset_count(p, pb), || describe(p));
        }
    }
    Ok(())
}

fn extension_cases() -> Result<Vec<(String, FunctorInstance)>> {
    let cases = [
        ("(V -!> Id) + W", one(), boolean_lattice()),
        ("(V -!> Id) + W", one(), chain(3)),
        ("Us(Id)", one(), one()),
        ("Bool", one(), one()),
        ("Lift(W)", one(), boolean_lattice()),
        ("Bool * Lift(W)", one(), boolean_lattice()),
    ];
    cases
        .into_iter()
        .map(|(text, v, w)| Ok((format!("{text} at W={}", w.len()), pointed_instance(text, v, w)?)))
        .collect()
}

fn extension_uniqueness(t: &mut Tally) -> Result<()> {
    let carriers: Vec<Arc<FinPoset>> = (1..=4).flat_map(all_pointed_posets).map(Arc::new).collect();
    for (label, inst) in extension_cases()? {
        let inst = Arc::new(inst);
        let seq = terminal_sequence(&inst, 8)?;
        let fin = final_coalgebra(&seq, &inst)?.exact()?;
        t.record("lambek", fin.lambek_check(), || label.clone());
        for x in &carriers {
            let fx = inst.apply(x)?;
            for table in monotone_tables(x, &fx, true, 100_000)? {
                let coalg = CoalgebraSpec::new(inst.clone(), x.clone(), table)?;
                let h = coinductive_extension(&coalg, &fin)?;
                let ok = is_coalgebra_morphism(&coalg, &fin, &h)?
                    && count_coalgebra_morphisms(&coalg, &fin, 10_000)? == Some(1);
                t.record("extension-unique", ok, || format!("{label} on {}", describe(x)));
            }
        }
    }
    Ok(())
}

fn limit_colimit(t: &mut Tally) -> Result<()> {
    let texts = ["Id", "Us(Id)", "Bool", "Lift(W)", "(V -!> Id) + W", "Bool * Lift(W)", "Lift(Id)", "U(Id)", "W + Id"];
    let params = [one(), boolean_lattice(), chain(3), lift(&boolean_lattice())];
    for text in texts {
        for v in &params {
            for w in &params {
                let inst = pointed_instance(text, v.clone(), w.clone())?;
                let seq = terminal_sequence(&inst, 8)?;
                if !matches!(seq.status, SeqStatus::Stabilized(_)) {
                    continue;
                }
                let rep = check_limit_colimit(&seq, 64)?;
                t.record("limit-colimit", rep.holds, || format!("{text} at V={}, W={}", describe(v), describe(w)));
            }
        }
    }
    Ok(())
}

fn relabel<R: Rng>(rng: &mut R, p: &FinPoset) -> FinPoset {
    let mut perm: Vec<usize> = (0..p.len()).collect();
    perm.shuffle(rng);
    let ids = perm.iter().map(|&i| format!("y{i}")).collect();
    FinPoset::from_leq_fn(ids, None, |a, b| p.leq(perm[a], perm[b]))
}

fn iso_agreement<R: Rng>(rng: &mut R, t: &mut Tally) -> Result<()> {
    for _ in 0..2 * SAMPLES {
        let n = rng.gen_range(1..=6);
        let p = random_poset(rng, n, 0.4);
        let q = if rng.gen_bool(0.5) { relabel(rng, &p) } else { random_poset(rng, n, 0.4) };
        let fast = iso_check(&p, &q)?.is_some();
        t.record("iso-check", fast == iso_brute_force(&p, &q), || format!("{} vs {}", describe(&p), describe(&q)));
    }
    Ok(())
}
