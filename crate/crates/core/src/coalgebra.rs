use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functor::{decode, encode, parse, Backend, Constants, ElemValue, FunctorInstance};
use crate::order::{FinPoset, MonoMap, PosetJson};

/// A finite coalgebra `h: X → F(X)` for a fixed functor instance.
#[derive(Clone, Debug)]
pub struct CoalgebraSpec {
    pub instance: Arc<FunctorInstance>,
    pub carrier: Arc<FinPoset>,
    /// `carrier → F(carrier)`.
    pub structure: MonoMap,
}

impl CoalgebraSpec {
    /// Validates the structure table: monotone, and strict in the pointed
    /// backend.
    pub fn new(instance: Arc<FunctorInstance>, carrier: Arc<FinPoset>, table: Vec<usize>) -> Result<Self> {
        let fx = instance.apply(&carrier)?;
        let strict = instance.backend() == Backend::PointedStrict;
        let structure = MonoMap::new(carrier.clone(), fx, table, strict)?;
        Ok(CoalgebraSpec { instance, carrier, structure })
    }

    /// Structure given elementwise as structured values.
    pub fn from_values(
        instance: Arc<FunctorInstance>,
        carrier: Arc<FinPoset>,
        values: &BTreeMap<String, ElemValue>,
    ) -> Result<Self> {
        let obj = instance.on_object(&carrier)?;
        let mut table = vec![usize::MAX; carrier.len()];
        for (x, v) in values {
            let i = carrier.index_of(x).ok_or_else(|| Error::UnknownElement(x.clone()))?;
            table[i] = encode(&obj, v)?;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Invalid(format!("no behaviour given for state {}", carrier.id(i))));
        }
        CoalgebraSpec::new(instance, carrier, table)
    }

    pub fn values(&self) -> Result<BTreeMap<String, ElemValue>> {
        let obj = self.instance.on_object(&self.carrier)?;
        Ok((0..self.carrier.len())
            .map(|i| (self.carrier.id(i).to_string(), decode(&obj, self.structure.apply(i))))
            .collect())
    }

    pub fn to_json(&self) -> Result<CoalgebraJson> {
        Ok(CoalgebraJson {
            functor: self.instance.expr().to_string(),
            backend: self.instance.backend(),
            constants: self.instance.constants().to_json(),
            v: Some(self.instance.v().to_json()),
            w: Some(self.instance.w().to_json()),
            carrier: self.carrier.to_json(),
            structure: self.values()?,
        })
    }

    pub fn from_json(j: &CoalgebraJson, cap: usize) -> Result<Self> {
        let mut constants = Constants::new();
        for (name, p) in &j.constants {
            constants.insert(name, FinPoset::from_json(p)?)?;
        }
        let expr = parse(&j.functor, &constants)?;
        let one = || crate::order::one().to_json();
        let v = FinPoset::from_json(j.v.as_ref().unwrap_or(&one()))?;
        let w = FinPoset::from_json(j.w.as_ref().unwrap_or(&one()))?;
        let inst = FunctorInstance::with_cap(expr, j.backend, Arc::new(v), Arc::new(w), constants, cap)?;
        let carrier = Arc::new(FinPoset::from_json(&j.carrier)?);
        CoalgebraSpec::from_values(Arc::new(inst), carrier, &j.structure)
    }
}

/// Wire format for coalgebras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalgebraJson {
    pub functor: String,
    pub backend: Backend,
    #[serde(default)]
    pub constants: BTreeMap<String, PosetJson>,
    #[serde(default)]
    pub v: Option<PosetJson>,
    #[serde(default)]
    pub w: Option<PosetJson>,
    pub carrier: PosetJson,
    pub structure: BTreeMap<String, ElemValue>,
}
