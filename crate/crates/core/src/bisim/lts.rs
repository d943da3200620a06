use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{discrete, FinPoset};

/// One-step behaviour of a value-passing state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Behaviour {
    /// Continuation for every value, indexed by value.
    Input(Vec<usize>),
    /// Emits a value and stops.
    Output(usize),
}

/// A coalgebra for `Id^P + P` over finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtsSpec {
    pub values: Vec<String>,
    pub states: Vec<String>,
    pub behaviour: Vec<Behaviour>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviourJson {
    Input(BTreeMap<String, String>),
    Output(String),
}

/// Wire format: `{"values":[..], "states":[..], "behaviour":{"x":{"input":{"p":"y"}} | {"output":"p"}}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtsJson {
    pub values: Vec<String>,
    pub states: Vec<String>,
    pub behaviour: BTreeMap<String, BehaviourJson>,
}

fn index_of(list: &[String], name: &str) -> Result<usize> {
    list.iter().position(|s| s == name).ok_or_else(|| Error::UnknownElement(name.to_string()))
}

fn check_distinct(list: &[String]) -> Result<()> {
    for (i, a) in list.iter().enumerate() {
        if list[..i].contains(a) {
            return Err(Error::DuplicateElement(a.clone()));
        }
    }
    Ok(())
}

impl LtsSpec {
    pub fn new(values: Vec<String>, states: Vec<String>, behaviour: Vec<Behaviour>) -> Result<Self> {
        check_distinct(&values)?;
        check_distinct(&states)?;
        if behaviour.len() != states.len() {
            return Err(Error::Invalid("one behaviour per state is required".into()));
        }
        for b in &behaviour {
            match b {
                Behaviour::Input(t) => {
                    if t.len() != values.len() || t.iter().any(|&x| x >= states.len()) {
                        return Err(Error::Invalid("input table must be total over the values".into()));
                    }
                }
                Behaviour::Output(p) => {
                    if *p >= values.len() {
                        return Err(Error::Invalid("output outside the value set".into()));
                    }
                }
            }
        }
        Ok(LtsSpec { values, states, behaviour })
    }

    pub fn from_json(j: &LtsJson) -> Result<Self> {
        let mut behaviour = Vec::with_capacity(j.states.len());
        for s in &j.states {
            let b = j.behaviour.get(s).ok_or_else(|| Error::Invalid(format!("no behaviour for state {s}")))?;
            behaviour.push(match b {
                BehaviourJson::Output(p) => Behaviour::Output(index_of(&j.values, p)?),
                BehaviourJson::Input(t) => {
                    let mut table = vec![usize::MAX; j.values.len()];
                    for (p, x) in t {
                        table[index_of(&j.values, p)?] = index_of(&j.states, x)?;
                    }
                    if table.contains(&usize::MAX) {
                        return Err(Error::Invalid(format!("input table of {s} is not total")));
                    }
                    Behaviour::Input(table)
                }
            });
        }
        if let Some(extra) = j.behaviour.keys().find(|k| !j.states.contains(k)) {
            return Err(Error::UnknownElement(extra.clone()));
        }
        LtsSpec::new(j.values.clone(), j.states.clone(), behaviour)
    }

    pub fn to_json(&self) -> LtsJson {
        let behaviour = self
            .states
            .iter()
            .zip(&self.behaviour)
            .map(|(s, b)| {
                let bj = match b {
                    Behaviour::Output(p) => BehaviourJson::Output(self.values[*p].clone()),
                    Behaviour::Input(t) => BehaviourJson::Input(
                        t.iter().enumerate().map(|(p, &x)| (self.values[p].clone(), self.states[x].clone())).collect(),
                    ),
                };
                (s.clone(), bj)
            })
            .collect();
        LtsJson { values: self.values.clone(), states: self.states.clone(), behaviour }
    }

    pub fn value_set(&self) -> FinPoset {
        discrete(&self.values).expect("distinct values")
    }

    pub fn state_set(&self) -> FinPoset {
        discrete(&self.states).expect("distinct states")
    }

    /// Every system over `n_states` states and `n_values` values, in a
    /// fixed order. States are `x0..`, values `p0..`.
    pub fn enumerate_all(n_states: usize, n_values: usize) -> Vec<LtsSpec> {
        let values: Vec<String> = (0..n_values).map(|i| format!("p{i}")).collect();
        let states: Vec<String> = (0..n_states).map(|i| format!("x{i}")).collect();
        let mut options = Vec::new();
        let tables = n_states.pow(n_values as u32);
        for code in 0..tables {
            let mut c = code;
            let t = (0..n_values)
                .map(|_| {
                    let x = c % n_states;
                    c /= n_states;
                    x
                })
                .collect();
            options.push(Behaviour::Input(t));
        }
        options.extend((0..n_values).map(Behaviour::Output));
        let mut out = Vec::new();
        let total = options.len().pow(n_states as u32);
        for code in 0..total {
            let mut c = code;
            let behaviour = (0..n_states)
                .map(|_| {
                    let b = options[c % options.len()].clone();
                    c /= options.len();
                    b
                })
                .collect();
            out.push(LtsSpec { values: values.clone(), states: states.clone(), behaviour });
        }
        out
    }
}

/// All set partitions of `0..n`, each as sorted blocks.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    go(0, n, &mut blocks, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"values":["a","b"],"states":["x","y"],
            "behaviour":{"x":{"input":{"a":"y","b":"x"}},"y":{"output":"b"}}}"#;
        let j: LtsJson = serde_json::from_str(text).unwrap();
        let l = LtsSpec::from_json(&j).unwrap();
        assert_eq!(l.behaviour, vec![Behaviour::Input(vec![1, 0]), Behaviour::Output(1)]);
        assert_eq!(l.to_json(), j);
    }

    #[test]
    fn partial_input_rejected() {
        let text = r#"{"values":["a","b"],"states":["x"],"behaviour":{"x":{"input":{"a":"x"}}}}"#;
        let j: LtsJson = serde_json::from_str(text).unwrap();
        assert!(LtsSpec::from_json(&j).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // Two states, two values: 4 input tables + 2 outputs per state.
        assert_eq!(LtsSpec::enumerate_all(2, 2).len(), 36);
        let bell: Vec<usize> = (0..=5).map(|n| all_partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }
}
