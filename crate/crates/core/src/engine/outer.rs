use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::finals::{final_coalgebra, FinalCoalgebra};
use crate::engine::sequence::{ep_is_iso, terminal_sequence, SeqStatus, TerminalSequence};
use crate::error::{Error, Result};
use crate::functor::{act_ep, Backend, Constants, FunctorExpr, FunctorInstance, DEFAULT_ELEMENT_CAP};
use crate::order::{find_iso, one, EpPair, FinPoset, Iso, MonoMap, PosetJson};

/// Budgets and caps for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub inner_budget: usize,
    pub outer_budget: usize,
    pub element_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { inner_budget: 8, outer_budget: 6, element_cap: DEFAULT_ELEMENT_CAP }
    }
}

/// One row of the bi-chain: the terminal sequence of `F(Z, Z)`.
#[derive(Clone, Debug)]
pub struct OuterRow {
    pub instance: Arc<FunctorInstance>,
    pub seq: TerminalSequence,
    /// Column eps from the previous row's stages into this row's stages.
    pub columns: Vec<EpPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterStatus {
    /// `Z_{n-1} → Z_n` is an isomorphism and row `n - 1` is exact.
    Solved(usize),
    Truncated(OuterStop),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterStop {
    Budget,
    /// The next row stopped before the column that carries the previous
    /// row's object.
    DepthMismatch {
        source_depth: usize,
        target_depth: usize,
    },
}

/// The bi-chain state: parameters `Z₀ = 1, Z₁, …`, one row per parameter,
/// and the vertical eps `Zₙ → Zₙ₊₁`.
#[derive(Clone, Debug)]
pub struct OuterChain {
    pub params: Vec<Arc<FinPoset>>,
    /// `rows[n]` runs `F(Zₙ, Zₙ)`; its carrier is `params[n + 1]`.
    pub rows: Vec<OuterRow>,
    pub vertical: Vec<EpPair>,
    pub status: OuterStatus,
}

/// Result of `solve_hob`.
#[derive(Clone, Debug)]
pub struct SolutionReport {
    pub expr: FunctorExpr,
    pub constants: Constants,
    pub config: EngineConfig,
    pub chain: OuterChain,
    /// The solution when solved, else the last approximant.
    pub z: Arc<FinPoset>,
    /// Final coalgebra of `F(Z, Z)` when solved.
    pub final_coalgebra: Option<FinalCoalgebra>,
    /// `Z ≅ |ν F(Z, Z)|`.
    pub witness: Option<Iso>,
}

impl SolutionReport {
    pub fn is_solved(&self) -> bool {
        matches!(self.chain.status, OuterStatus::Solved(_))
    }

    pub fn param_sizes(&self) -> Vec<usize> {
        self.chain.params.iter().map(|z| z.len()).collect()
    }
}

/// Column eps `ε_k` from `src_seq` into `dst_seq` along the parameter ep,
/// then the induced ep between the two carriers. A stabilized `dst_seq`
/// is unfolded further when the source carrier sits deeper.
pub fn nu_on_transformation(
    src: &FunctorInstance,
    src_seq: &TerminalSequence,
    dst: &FunctorInstance,
    dst_seq: &mut TerminalSequence,
    param: &EpPair,
) -> Result<(EpPair, Vec<EpPair>)> {
    let a = src_seq.carrier_stage();
    while dst_seq.stages.len() <= a {
        let grown = dst_seq.is_stabilized() && dst_seq.extend(dst)?;
        if !grown {
            return Err(Error::DepthMismatch { source_depth: a, target_depth: dst_seq.stages.len() - 1 });
        }
    }
    let mut columns = vec![EpPair::identity(&src_seq.stages[0])];
    if *src_seq.stages[0] != *dst_seq.stages[0] {
        return Err(Error::InstanceMismatch);
    }
    for k in 0..a {
        let next = act_ep(src, dst, &columns[k], Some(param))?;
        if **next.source() != *src_seq.stages[k + 1] || **next.target() != *dst_seq.stages[k + 1] {
            return Err(Error::InstanceMismatch);
        }
        columns.push(next);
    }
    let b = dst_seq.carrier_stage();
    let mut ep = columns[a].clone();
    if a <= b {
        for e in &dst_seq.eps[a..b] {
            ep = ep.then(e)?;
        }
    } else {
        for e in dst_seq.eps[b..a].iter().rev() {
            ep = ep.then(&EpPair::new(e.projection().clone(), e.embedding().clone())?)?;
        }
    }
    Ok((ep, columns))
}

fn run_row(expr: &FunctorExpr, constants: &Constants, z: &Arc<FinPoset>, config: &EngineConfig) -> Result<OuterRow> {
    let inst = Arc::new(FunctorInstance::with_cap(
        expr.clone(),
        Backend::PointedStrict,
        z.clone(),
        z.clone(),
        constants.clone(),
        config.element_cap,
    )?);
    let seq = terminal_sequence(&inst, config.inner_budget)?;
    Ok(OuterRow { instance: inst, seq, columns: Vec::new() })
}

/// Solves `B ≅ F(|νB|, |νB|)` by the bi-chain iteration, in the pointed
/// backend.
pub fn solve_hob(expr: &FunctorExpr, constants: &Constants, config: EngineConfig) -> Result<SolutionReport> {
    if config.inner_budget == 0 || config.outer_budget == 0 || config.element_cap == 0 {
        return Err(Error::Invalid("budgets and cap must be at least 1".into()));
    }
    let z0 = Arc::new(one());
    let first = run_row(expr, constants, &z0, &config)?;
    let z1 = first.seq.carrier().clone();
    let mut chain = OuterChain {
        vertical: vec![EpPair::from_terminal(&z0, &z1)?],
        params: vec![z0, z1],
        rows: vec![first],
        status: OuterStatus::Truncated(OuterStop::Budget),
    };
    let mut witness = None;
    let mut final_coalg = None;
    loop {
        let n = chain.rows.len();
        let settled = ep_is_iso(&chain.vertical[n - 1]) && chain.rows[n - 1].seq.is_stabilized();
        if !settled && n >= config.outer_budget {
            chain.status = OuterStatus::Truncated(OuterStop::Budget);
            break;
        }
        let zn = chain.params[n].clone();
        let mut row = run_row(expr, constants, &zn, &config)?;
        let prev = &chain.rows[n - 1];
        let step = nu_on_transformation(&prev.instance, &prev.seq, &row.instance, &mut row.seq, &chain.vertical[n - 1]);
        let next_z = row.seq.carrier().clone();
        match step {
            Ok((v, columns)) => {
                row.columns = columns;
                chain.rows.push(row);
                chain.params.push(next_z);
                let iso = ep_is_iso(&v);
                chain.vertical.push(v);
                if settled {
                    let last = chain.rows.last().expect("row just pushed");
                    if iso && last.seq.is_stabilized() {
                        let v = chain.vertical.last().expect("vertical just pushed");
                        debug_assert!(find_iso(v.source(), v.target(), usize::MAX)?.is_some());
                        witness = v.to_iso();
                        final_coalg = Some(final_coalgebra(&last.seq, &last.instance)?.exact()?);
                        chain.status = OuterStatus::Solved(n);
                        break;
                    }
                }
            }
            Err(Error::DepthMismatch { source_depth, target_depth }) => {
                chain.rows.push(row);
                chain.params.push(next_z);
                chain.status = OuterStatus::Truncated(OuterStop::DepthMismatch { source_depth, target_depth });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let z = match chain.status {
        OuterStatus::Solved(n) => chain.params[n].clone(),
        OuterStatus::Truncated(_) => chain.params.last().expect("nonempty").clone(),
    };
    Ok(SolutionReport {
        expr: expr.clone(),
        constants: constants.clone(),
        config,
        chain,
        z,
        final_coalgebra: final_coalg,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpJson {
    pub e: Vec<usize>,
    pub p: Vec<usize>,
}

impl EpJson {
    pub fn of(ep: &EpPair) -> Self {
        EpJson { e: ep.embedding().table().to_vec(), p: ep.projection().table().to_vec() }
    }

    fn load(&self, x: &Arc<FinPoset>, y: &Arc<FinPoset>) -> Result<EpPair> {
        EpPair::from_tables(x, y, self.e.clone(), self.p.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowJson {
    pub status: SeqStatus,
    pub sizes: Vec<usize>,
    pub stages: Vec<PosetJson>,
    pub eps: Vec<EpJson>,
    pub columns: Vec<EpJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub params: Vec<PosetJson>,
    pub param_sizes: Vec<usize>,
    pub vertical_eps: Vec<EpJson>,
    pub rows: Vec<RowJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalJson {
    pub carrier: PosetJson,
    pub codomain: PosetJson,
    pub structure: Vec<usize>,
    pub inverse: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoJson {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

/// Serialized form of a [`SolutionReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub expr: String,
    pub config: EngineConfig,
    pub status: OuterStatus,
    pub exact: bool,
    pub z: PosetJson,
    pub z_size: usize,
    #[serde(rename = "final")]
    pub final_coalgebra: Option<FinalJson>,
    pub witness: Option<IsoJson>,
    pub chain: ChainJson,
}

impl SolutionReport {
    pub fn to_json(&self) -> ReportJson {
        let chain = &self.chain;
        ReportJson {
            expr: self.expr.to_string(),
            config: self.config,
            status: chain.status.clone(),
            exact: self.is_solved(),
            z: self.z.to_json(),
            z_size: self.z.len(),
            final_coalgebra: self.final_coalgebra.as_ref().map(|f| FinalJson {
                carrier: f.carrier.to_json(),
                codomain: f.structure.cod().to_json(),
                structure: f.structure.table().to_vec(),
                inverse: f.inverse.table().to_vec(),
            }),
            witness: self
                .witness
                .as_ref()
                .map(|w| IsoJson { forward: w.forward.table().to_vec(), backward: w.backward.table().to_vec() }),
            chain: ChainJson {
                params: chain.params.iter().map(|z| z.to_json()).collect(),
                param_sizes: chain.params.iter().map(|z| z.len()).collect(),
                vertical_eps: chain.vertical.iter().map(EpJson::of).collect(),
                rows: chain
                    .rows
                    .iter()
                    .map(|r| RowJson {
                        status: r.seq.status,
                        sizes: r.seq.sizes(),
                        stages: r.seq.stages.iter().map(|s| s.to_json()).collect(),
                        eps: r.seq.eps.iter().map(EpJson::of).collect(),
                        columns: r.columns.iter().map(EpJson::of).collect(),
                    })
                    .collect(),
            },
        }
    }
}

/// Reloads a serialized report and re-checks every ep, the witness and the
/// Lambek identities it records.
pub fn verify_report_json(j: &ReportJson) -> Result<()> {
    let load = |p: &PosetJson| FinPoset::from_json(p).map(Arc::new);
    let params = j.chain.params.iter().map(load).collect::<Result<Vec<_>>>()?;
    if j.chain.vertical_eps.len() + 1 > params.len() {
        return Err(Error::Invalid("more vertical eps than parameters".into()));
    }
    for (i, v) in j.chain.vertical_eps.iter().enumerate() {
        v.load(&params[i], &params[i + 1])?;
    }
    let mut prev_stages: Option<Vec<Arc<FinPoset>>> = None;
    for (n, row) in j.chain.rows.iter().enumerate() {
        let stages = row.stages.iter().map(load).collect::<Result<Vec<_>>>()?;
        if row.sizes != stages.iter().map(|s| s.len()).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("row {n} sizes disagree with its stages")));
        }
        for (k, ep) in row.eps.iter().enumerate() {
            let (x, y) = (stages.get(k), stages.get(k + 1));
            match (x, y) {
                (Some(x), Some(y)) => {
                    ep.load(x, y)?;
                }
                _ => return Err(Error::Invalid(format!("row {n} has an ep without stages"))),
            }
        }
        if let Some(prev) = &prev_stages {
            for (k, c) in row.columns.iter().enumerate() {
                match (prev.get(k), stages.get(k)) {
                    (Some(x), Some(y)) => {
                        c.load(x, y)?;
                    }
                    _ => return Err(Error::Invalid(format!("row {n} has a column without stages"))),
                }
            }
        }
        let carrier = match row.status {
            SeqStatus::Stabilized(b) => b,
            SeqStatus::Truncated(_) => stages.len() - 1,
        };
        if let Some(z) = params.get(n + 1) {
            if **z != *stages[carrier] {
                return Err(Error::Invalid(format!("parameter {} differs from row {n}'s carrier", n + 1)));
            }
        }
        prev_stages = Some(stages);
    }
    let z = load(&j.z)?;
    if let Some(f) = &j.final_coalgebra {
        let carrier = load(&f.carrier)?;
        let cod = load(&f.codomain)?;
        let s = MonoMap::infer(carrier.clone(), cod.clone(), f.structure.clone())?;
        let i = MonoMap::infer(cod, carrier.clone(), f.inverse.clone())?;
        let fin_ok = crate::order::compose(&i, &s)?.is_identity() && crate::order::compose(&s, &i)?.is_identity();
        if !fin_ok {
            return Err(Error::Invalid("final structure fails a Lambek identity".into()));
        }
        if let Some(w) = &j.witness {
            let fwd = MonoMap::infer(z.clone(), carrier.clone(), w.forward.clone())?;
            let bwd = MonoMap::infer(carrier, z.clone(), w.backward.clone())?;
            Iso::new(fwd, bwd)?;
        }
    }
    if j.exact != matches!(j.status, OuterStatus::Solved(_)) {
        return Err(Error::Invalid("exact flag disagrees with status".into()));
    }
    if j.exact && (j.witness.is_none() || j.final_coalgebra.is_none()) {
        return Err(Error::Invalid("solved report lacks its witness".into()));
    }
    Ok(())
}
