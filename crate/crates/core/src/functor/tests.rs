use std::sync::Arc;

use super::*;
use crate::error::Error;
use crate::order::{boolean_lattice, chain, discrete, iso_check, lift, one, EpPair, FinPoset, MonoMap};
use crate::relation::Relation;

fn inst(text: &str, backend: Backend, v: FinPoset, w: FinPoset) -> FunctorInstance {
    let c = Constants::new().with("C", lift(&discrete(&["c"]).unwrap())).unwrap();
    let e = parse(text, &c).unwrap();
    FunctorInstance::new(e, backend, Arc::new(v), Arc::new(w), c).unwrap()
}

fn bottom_ep(y: &Arc<FinPoset>) -> EpPair {
    EpPair::from_terminal(&Arc::new(one()), y).unwrap()
}

#[test]
fn deterministic_family_fixes_one() {
    let f = inst("(V -!> Id) + W", Backend::PointedStrict, one(), one());
    let x = f.apply(&Arc::new(one())).unwrap();
    assert_eq!(x.len(), 1);
    assert!(x.is_pointed());
}

#[test]
fn upsets_of_one() {
    let f = inst("U(Id)", Backend::PointedStrict, one(), one());
    let x = f.apply(&Arc::new(one())).unwrap();
    assert!(iso_check(&x, &chain(2)).unwrap().is_some());
    let g = inst("Us(Id)", Backend::PointedStrict, one(), one());
    assert_eq!(g.apply(&Arc::new(one())).unwrap().len(), 1);
}

#[test]
fn identity_functor() {
    let f = inst("Id", Backend::Plain, one(), one());
    let p = Arc::new(discrete(&["a", "b"]).unwrap());
    assert_eq!(*f.apply(&p).unwrap(), *p);
    let b = Arc::new(boolean_lattice());
    let ep = bottom_ep(&b);
    let g = inst("Id", Backend::PointedStrict, one(), one());
    assert_eq!(g.on_ep(&ep).unwrap(), ep);
}

#[test]
fn strict_upsets_on_bottom_ep() {
    let f = inst("Us(Id)", Backend::PointedStrict, one(), one());
    let b = Arc::new(boolean_lattice());
    let out = f.on_ep(&bottom_ep(&b)).unwrap();
    out.verify().unwrap();
    assert_eq!(out.source().len(), 1);
    assert_eq!(out.target().len(), 2);
    // ∅ goes to ∅.
    assert_eq!(out.embedding().table(), &[0]);
}

#[test]
fn on_ep_preserves_identity() {
    for text in ["Id + W", "Id * Id", "Lift(Id)", "(V -> Id)", "(V -!> Id)", "U(Id)", "Us(Id)", "(Bool -> Id)"] {
        let f = inst(text, Backend::PointedStrict, boolean_lattice(), boolean_lattice());
        let x = Arc::new(boolean_lattice());
        let id = EpPair::identity(&x);
        let out = f.on_ep(&id).unwrap();
        assert!(out.embedding().table().iter().enumerate().all(|(i, &j)| i == j), "{text}");
        assert!(out.is_iso());
    }
}

#[test]
fn reindex_deterministic_family() {
    let z = Arc::new(one());
    let z2 = Arc::new(boolean_lattice());
    let f = inst("(V -!> Id) + W", Backend::PointedStrict, one(), one());
    let g = f.reinstantiate(z2.clone(), z2.clone()).unwrap();
    let param = bottom_ep(&z2);
    for p in [one(), boolean_lattice(), chain(3)] {
        let p = Arc::new(p);
        let comp = reindex_ep(&f, &g, &param, &p).unwrap();
        comp.verify().unwrap();
        assert_eq!(comp.source().len(), f.apply(&p).unwrap().len());
    }
    // Along the identity the components are identities.
    let same = reindex_ep(&f, &f, &EpPair::identity(&z), &Arc::new(chain(3))).unwrap();
    assert!(same.is_iso() && same.embedding().table().iter().enumerate().all(|(i, &j)| i == j));
}

#[test]
fn on_map_lift_adds_bottom() {
    let f = inst("Lift(Id)", Backend::Plain, one(), one());
    let p = Arc::new(discrete(&["a", "b"]).unwrap());
    let q = Arc::new(one());
    let m = MonoMap::infer(p.clone(), q.clone(), vec![0, 0]).unwrap();
    let fm = f.on_map(&m).unwrap();
    assert_eq!(fm.table(), &[0, 1, 1]);
}

#[test]
fn on_map_constant_is_identity() {
    let f = inst("Bool", Backend::Plain, one(), one());
    let p = Arc::new(chain(3));
    let m = MonoMap::infer(p.clone(), p.clone(), vec![0, 0, 2]).unwrap();
    assert!(f.on_map(&m).unwrap().table() == [0, 1]);
}

#[test]
fn on_map_rejects_upsets() {
    let f = inst("U(Id)", Backend::PointedStrict, one(), one());
    let p = Arc::new(chain(2));
    assert!(matches!(f.on_map(&MonoMap::identity(&p)), Err(Error::NotCovariant(_))));
}

#[test]
fn on_map_agrees_with_on_ep() {
    for text in ["Id + W", "Id * Id", "Lift(Id + Id)", "(Bool -> Id)", "(V -> Id) + W"] {
        let f = inst(text, Backend::PointedStrict, boolean_lattice(), boolean_lattice());
        let b = Arc::new(chain(3));
        let ep = bottom_ep(&b);
        let out = f.on_ep(&ep).unwrap();
        assert_eq!(f.on_map(ep.embedding()).unwrap(), *out.embedding(), "{text}");
        assert_eq!(f.on_map(ep.projection()).unwrap(), *out.projection(), "{text}");
    }
}

#[test]
fn lazy_shape_sizes() {
    for backend in [Backend::PointedStrict, Backend::Plain] {
        let f = inst("Lift((V -> Id) + W)", backend, one(), one());
        let mut x = Arc::new(one());
        let mut sizes = vec![1];
        for _ in 0..3 {
            x = f.apply(&x).unwrap();
            sizes.push(x.len());
        }
        assert_eq!(sizes, vec![1, 3, 5, 7]);
    }
}

#[test]
fn backend_mismatch_detected() {
    let c = Constants::new();
    let e = parse("(V -!> Id)", &c).unwrap();
    let r = FunctorInstance::new(e, Backend::Plain, Arc::new(one()), Arc::new(one()), c.clone());
    assert!(matches!(r, Err(Error::BackendMismatch(_))));
    let e = parse("Us(Id)", &c).unwrap();
    let r = FunctorInstance::new(e, Backend::Plain, Arc::new(one()), Arc::new(one()), c);
    assert!(matches!(r, Err(Error::BackendMismatch(_))));
}

#[test]
fn element_cap_surfaces() {
    let c = Constants::new();
    let e = parse("U(Id)", &c).unwrap();
    let f = FunctorInstance::with_cap(e, Backend::PointedStrict, Arc::new(one()), Arc::new(one()), c, 4).unwrap();
    let d = Arc::new(lift(&discrete(&["a", "b", "c"]).unwrap()));
    assert_eq!(f.apply(&d).unwrap_err(), Error::ElementCapExceeded(4));
}

#[test]
fn rel_lift_examples() {
    let f = inst("Id", Backend::Plain, one(), one());
    let x = Arc::new(discrete(&["a", "b"]).unwrap());
    let r = Relation::from_pairs(2, 2, [(0, 1)]);
    assert_eq!(f.rel_lift(&x, &x, &r, None, None).unwrap(), r);

    let g = inst("Id + Id", Backend::Plain, one(), one());
    let full = Relation::full(2, 2);
    let lifted = g.rel_lift(&x, &x, &full, None, None).unwrap();
    // inl(a) and inr(b) are never related.
    assert!(!lifted.contains(0, 3));
    assert!(lifted.contains(0, 1));

    let u = inst("U(Id)", Backend::Plain, one(), one());
    let y = Arc::new(discrete(&["a", "b"]).unwrap());
    let lid = u.rel_lift(&y, &y, &Relation::identity(2), None, None).unwrap();
    assert_eq!(lid, Relation::identity(4));
}

#[test]
fn values_round_trip() {
    let f = inst("Us(C * W * Id + C * (V -> Id) + Id)", Backend::PointedStrict, one(), one());
    let x = Arc::new(chain(2));
    let obj = f.on_object(&x).unwrap();
    for i in 0..obj.len() {
        let v = decode(&obj, i);
        assert_eq!(encode(&obj, &v).unwrap(), i);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<ElemValue>(&text).unwrap(), v);
    }
}

#[test]
fn coalesced_bottom_has_two_spellings() {
    let f = inst("Id + W", Backend::PointedStrict, one(), one());
    let x = Arc::new(chain(2));
    let obj = f.on_object(&x).unwrap();
    let l = ElemValue::Inl(Box::new(ElemValue::State("0".into())));
    let r = ElemValue::Inr(Box::new(ElemValue::W("*".into())));
    assert_eq!(encode(&obj, &l).unwrap(), 0);
    assert_eq!(encode(&obj, &r).unwrap(), 0);
}
