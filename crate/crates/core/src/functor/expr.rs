use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{boolean_lattice, FinPoset, PosetJson};

/// Domain of a function-space node: the contravariant parameter or a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Dom {
    V,
    Const(String),
}

/// A behaviour family `F(V, W)`, contravariant in `V` and covariant in `W`
/// and in the state argument `Id`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Const(String),
    Id,
    W,
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Prod(Box<FunctorExpr>, Box<FunctorExpr>),
    Lift(Box<FunctorExpr>),
    /// `(dom -> cod)`, or `(dom -!> cod)` when `strict`.
    Fun {
        dom: Dom,
        cod: Box<FunctorExpr>,
        strict: bool,
    },
    /// `U(inner)`, or `Us(inner)` when `strict`.
    Upset {
        inner: Box<FunctorExpr>,
        strict: bool,
    },
}

impl FunctorExpr {
    pub fn sum(l: FunctorExpr, r: FunctorExpr) -> Self {
        FunctorExpr::Sum(Box::new(l), Box::new(r))
    }

    pub fn prod(l: FunctorExpr, r: FunctorExpr) -> Self {
        FunctorExpr::Prod(Box::new(l), Box::new(r))
    }

    pub fn lift(e: FunctorExpr) -> Self {
        FunctorExpr::Lift(Box::new(e))
    }

    pub fn fun(dom: Dom, cod: FunctorExpr, strict: bool) -> Self {
        FunctorExpr::Fun { dom, cod: Box::new(cod), strict }
    }

    pub fn upset(inner: FunctorExpr, strict: bool) -> Self {
        FunctorExpr::Upset { inner: Box::new(inner), strict }
    }

    /// True if any node satisfies `pred`.
    pub fn any(&self, pred: &dyn Fn(&FunctorExpr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            FunctorExpr::Sum(l, r) | FunctorExpr::Prod(l, r) => l.any(pred) || r.any(pred),
            FunctorExpr::Lift(e) => e.any(pred),
            FunctorExpr::Fun { cod, .. } => cod.any(pred),
            FunctorExpr::Upset { inner, .. } => inner.any(pred),
            _ => false,
        }
    }

    pub fn mentions_v(&self) -> bool {
        self.any(&|e| matches!(e, FunctorExpr::Fun { dom: Dom::V, .. }))
    }

    pub fn has_upset(&self) -> bool {
        self.any(&|e| matches!(e, FunctorExpr::Upset { .. }))
    }

    /// Names of all constants, including those in function domains.
    pub fn constant_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(e: &FunctorExpr, out: &mut Vec<String>) {
            match e {
                FunctorExpr::Const(n) => out.push(n.clone()),
                FunctorExpr::Sum(l, r) | FunctorExpr::Prod(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                FunctorExpr::Lift(e) => walk(e, out),
                FunctorExpr::Fun { dom, cod, .. } => {
                    if let Dom::Const(n) = dom {
                        out.push(n.clone());
                    }
                    walk(cod, out);
                }
                FunctorExpr::Upset { inner, .. } => walk(inner, out),
                FunctorExpr::Id | FunctorExpr::W => {}
            }
        }
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

const RESERVED: &[&str] = &["Id", "V", "W", "U", "Us", "Lift"];

/// Named constant posets. `Bool` is always present.
#[derive(Clone, Debug)]
pub struct Constants {
    table: BTreeMap<String, Arc<FinPoset>>,
}

impl Default for Constants {
    fn default() -> Self {
        let mut table = BTreeMap::new();
        table.insert("Bool".to_string(), Arc::new(boolean_lattice()));
        Constants { table }
    }
}

impl Constants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, p: FinPoset) -> Result<()> {
        if RESERVED.contains(&name) || name == "Bool" || !is_ident(name) {
            return Err(Error::Invalid(format!("`{name}` cannot name a constant")));
        }
        self.table.insert(name.to_string(), Arc::new(p));
        Ok(())
    }

    pub fn with(mut self, name: &str, p: FinPoset) -> Result<Self> {
        self.insert(name, p)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<&Arc<FinPoset>> {
        self.table.get(name).ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.table.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(|s| s.as_str())
    }

    /// Reads a JSON object mapping names to posets.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, PosetJson> = serde_json::from_str(text)?;
        let mut c = Constants::new();
        for (name, pj) in raw {
            c.insert(&name, FinPoset::from_json(&pj)?)?;
        }
        Ok(c)
    }

    pub fn to_json(&self) -> BTreeMap<String, PosetJson> {
        self.table.iter().filter(|(k, _)| k.as_str() != "Bool").map(|(k, v)| (k.clone(), v.to_json())).collect()
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Plus,
    Star,
    Open,
    Close,
    Arrow,
    StrictArrow,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            '-' if text[i..].starts_with("->") => {
                out.push((i, Tok::Arrow));
                i += 2;
            }
            '-' if text[i..].starts_with("-!>") => {
                out.push((i, Tok::StrictArrow));
                i += 3;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{other}`") }),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    constants: &'a Constants,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<FunctorExpr> {
        let mut e = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            e = FunctorExpr::sum(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<FunctorExpr> {
        let mut e = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            e = FunctorExpr::prod(e, self.atom()?);
        }
        Ok(e)
    }

    fn constant(&self, name: &str) -> Result<()> {
        if self.constants.contains(name) {
            Ok(())
        } else {
            Err(Error::UnknownConstant(name.to_string()))
        }
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                let wrapper = matches!(name.as_str(), "U" | "Us" | "Lift");
                if wrapper {
                    self.at += 1;
                    self.expect(Tok::Open, "`(`")?;
                    let inner = self.expr()?;
                    self.expect(Tok::Close, "`)`")?;
                    return Ok(match name.as_str() {
                        "U" => FunctorExpr::upset(inner, false),
                        "Us" => FunctorExpr::upset(inner, true),
                        _ => FunctorExpr::lift(inner),
                    });
                }
                self.at += 1;
                match name.as_str() {
                    "Id" => Ok(FunctorExpr::Id),
                    "W" => Ok(FunctorExpr::W),
                    "V" => Err(Error::Variance("V may only appear as the domain of a function space".into())),
                    _ => {
                        self.constant(&name)?;
                        Ok(FunctorExpr::Const(name))
                    }
                }
            }
            Some(Tok::Open) => {
                self.at += 1;
                let is_arrow = matches!(self.peek(), Some(Tok::Ident(_)))
                    && matches!(self.peek2(), Some(Tok::Arrow | Tok::StrictArrow));
                if is_arrow {
                    let Some(Tok::Ident(d)) = self.peek().cloned() else { unreachable!() };
                    let dom = match d.as_str() {
                        "V" => Dom::V,
                        "Id" | "W" => {
                            return Err(Error::Variance(format!(
                                "{d} may not appear as the domain of a function space"
                            )))
                        }
                        "U" | "Us" | "Lift" => return self.fail("function domain must be V or a constant"),
                        _ => {
                            self.constant(&d)?;
                            Dom::Const(d)
                        }
                    };
                    self.at += 1;
                    let strict = self.peek() == Some(&Tok::StrictArrow);
                    self.at += 1;
                    let cod = self.expr()?;
                    self.expect(Tok::Close, "`)` closing the function space")?;
                    return Ok(FunctorExpr::fun(dom, cod, strict));
                }
                let inner = self.expr()?;
                if matches!(self.peek(), Some(Tok::Arrow | Tok::StrictArrow)) {
                    if inner.any(&|e| matches!(e, FunctorExpr::Id | FunctorExpr::W)) {
                        return Err(Error::Variance("Id and W may not appear in a function domain".into()));
                    }
                    return self.fail("function domain must be V or a constant");
                }
                self.expect(Tok::Close, "`)`")?;
                Ok(inner)
            }
            Some(_) => self.fail("expected an atom"),
            None => self.fail("unexpected end of input"),
        }
    }
}

/// Parses the concrete syntax, checking constants against `constants`.
pub fn parse(text: &str, constants: &Constants) -> Result<FunctorExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), constants };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}

fn write_prec(e: &FunctorExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // prec 0: sum position, 1: product operand, 2: atom.
    match e {
        FunctorExpr::Const(n) => write!(f, "{n}"),
        FunctorExpr::Id => write!(f, "Id"),
        FunctorExpr::W => write!(f, "W"),
        FunctorExpr::Sum(l, r) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write_prec(l, 0, f)?;
            write!(f, " + ")?;
            write_prec(r, 1, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        FunctorExpr::Prod(l, r) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            write_prec(l, 1, f)?;
            write!(f, " * ")?;
            write_prec(r, 2, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        FunctorExpr::Lift(e) => {
            write!(f, "Lift(")?;
            write_prec(e, 0, f)?;
            write!(f, ")")
        }
        FunctorExpr::Fun { dom, cod, strict } => {
            let d = match dom {
                Dom::V => "V",
                Dom::Const(n) => n,
            };
            write!(f, "({d} {} ", if *strict { "-!>" } else { "->" })?;
            write_prec(cod, 0, f)?;
            write!(f, ")")
        }
        FunctorExpr::Upset { inner, strict } => {
            write!(f, "{}(", if *strict { "Us" } else { "U" })?;
            write_prec(inner, 0, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, f)
    }
}

/// Serialized as its concrete syntax.
impl Serialize for FunctorExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Deserialization accepts any constant name; resolution happens at
/// instantiation.
impl<'de> Deserialize<'de> for FunctorExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_open(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses without a constants table, accepting every non-reserved name.
pub fn parse_open(text: &str) -> Result<FunctorExpr> {
    let toks = lex(text)?;
    let mut names = Constants::new();
    for (_, t) in &toks {
        if let Tok::Ident(n) = t {
            if !RESERVED.contains(&n.as_str()) && n != "Bool" {
                names.table.insert(n.clone(), Arc::new(FinPoset::new::<&str>(&[], &[], None)?));
            }
        }
    }
    parse(text, &names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{discrete, lift};
    use proptest::prelude::*;

    fn consts() -> Constants {
        Constants::new()
            .with("C", lift(&discrete(&["c"]).unwrap()))
            .unwrap()
            .with("A", discrete(&["a"]).unwrap())
            .unwrap()
    }

    #[test]
    fn deterministic_family() {
        let e = parse("(V -!> Id) + W", &consts()).unwrap();
        assert_eq!(e, FunctorExpr::sum(FunctorExpr::fun(Dom::V, FunctorExpr::Id, true), FunctorExpr::W));
    }

    #[test]
    fn ho_ccs_family() {
        let e = parse("Us(C * W * Id + C * (V -> Id) + Id)", &consts()).unwrap();
        let c = || FunctorExpr::Const("C".into());
        let body = FunctorExpr::sum(
            FunctorExpr::sum(
                FunctorExpr::prod(FunctorExpr::prod(c(), FunctorExpr::W), FunctorExpr::Id),
                FunctorExpr::prod(c(), FunctorExpr::fun(Dom::V, FunctorExpr::Id, false)),
            ),
            FunctorExpr::Id,
        );
        assert_eq!(e, FunctorExpr::upset(body, true));
    }

    #[test]
    fn variance_errors() {
        assert!(matches!(parse("(Id -> W)", &consts()), Err(Error::Variance(_))));
        assert!(matches!(parse("(W -> Id)", &consts()), Err(Error::Variance(_))));
        assert!(matches!(parse("V + Id", &consts()), Err(Error::Variance(_))));
        assert!(matches!(parse("((Id + C) -> Id)", &consts()), Err(Error::Variance(_))));
    }

    #[test]
    fn syntax_and_constant_errors() {
        assert!(matches!(parse("Id +", &consts()), Err(Error::Syntax { .. })));
        assert!(matches!(parse("Id Id", &consts()), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(Id", &consts()), Err(Error::Syntax { .. })));
        assert!(matches!(parse("Id & W", &consts()), Err(Error::Syntax { .. })));
        assert_eq!(parse("Zed", &consts()), Err(Error::UnknownConstant("Zed".into())));
        assert!(parse("(Bool -> Id)", &consts()).is_ok());
    }

    #[test]
    fn precedence() {
        let e = parse("Id + W * Id", &consts()).unwrap();
        assert_eq!(e, FunctorExpr::sum(FunctorExpr::Id, FunctorExpr::prod(FunctorExpr::W, FunctorExpr::Id)));
        let g = parse("(Id + W) * Id", &consts()).unwrap();
        assert_eq!(g.to_string(), "(Id + W) * Id");
        assert_eq!(parse("Id + (W + Id)", &consts()).unwrap().to_string(), "Id + (W + Id)");
    }

    fn arb_expr() -> impl Strategy<Value = FunctorExpr> {
        let leaf = prop_oneof![
            Just(FunctorExpr::Id),
            Just(FunctorExpr::W),
            Just(FunctorExpr::Const("Bool".into())),
            Just(FunctorExpr::Const("C".into())),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| FunctorExpr::sum(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| FunctorExpr::prod(a, b)),
                inner.clone().prop_map(FunctorExpr::lift),
                (inner.clone(), any::<bool>(), any::<bool>())
                    .prop_map(|(c, v, s)| { FunctorExpr::fun(if v { Dom::V } else { Dom::Const("A".into()) }, c, s) }),
                (inner, any::<bool>()).prop_map(|(c, s)| FunctorExpr::upset(c, s)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_pretty(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse(&text, &consts()).unwrap(), e);
        }
    }
}
