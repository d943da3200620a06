//! Command-line front end shared by the `hofix` binary and its tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bisim::{
    dimmed_bisim, lemma1_check, lemma1_sweep, quotient, value_bisim, LtsJson, LtsSpec, EXHAUSTIVE_MAX_STATES,
};
use crate::engine::{
    final_coalgebra, solve_hob, terminal_sequence, verify_report_json, EngineConfig, EpJson, FinalJson, FinalOutcome,
    SeqStatus, SolutionReport,
};
use crate::error::{Error, Result};
use crate::functor::{parse, Backend, Constants, FunctorExpr, FunctorInstance};
use crate::laws::check_laws;
use crate::mediator::{adjunction_sweep, solve_lifted, verify_mediator_json};
use crate::order::{one, FinPoset, PosetJson};
use crate::relation::{EquivalenceJson, Relation, RelationJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hofix", version, about = "Higher-order behaviours as fixed points of functor families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve B ≅ F(|νB|, |νB|) by the outer bi-chain.
    Solve(RunConfig),
    /// Terminal sequence of one instance F(V, W).
    Terminal(RunConfig),
    /// Greatest value-passing bisimulation.
    Bisim(RunConfig),
    /// Greatest bisimulation up to an equivalence on values.
    Dimmed(RunConfig),
    /// Quotient coalgebra over F(P/≈, P/≈).
    Quotient(RunConfig),
    /// Compare ≈-bisimulations with bisimulations of the quotient instance.
    Lemma1(RunConfig),
    /// Compare a pointed functor with its plain counterpart stage by stage.
    Mediator(RunConfig),
    /// Run the seeded property suites.
    CheckLaws(RunConfig),
    /// Write one DOT file per stage of a solve.
    Render(RunConfig),
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// File holding a functor expression.
    #[arg(short = 'f', long = "functor")]
    pub functor: Option<PathBuf>,
    /// JSON map from constant names to posets.
    #[arg(long)]
    pub constants: Option<PathBuf>,
    /// Poset for V (terminal, mediator). Defaults to the one-point poset.
    #[arg(long = "v")]
    pub v: Option<PathBuf>,
    /// Poset for W (terminal, mediator). Defaults to the one-point poset.
    #[arg(long = "w")]
    pub w: Option<PathBuf>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub inner_budget: u32,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    pub outer_budget: u32,
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u32).range(1..))]
    pub element_cap: u32,
    /// Report path; standard output when absent. For `render`, the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write stage_<row>_<col>.dot files.
    #[arg(long)]
    pub render: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub exhaustive: bool,
    /// Value-passing system (repeatable).
    #[arg(long)]
    pub lts: Vec<PathBuf>,
    /// Equivalence on values, as blocks.
    #[arg(long)]
    pub approx: Option<PathBuf>,
    /// Equivalence on states, as blocks.
    #[arg(long)]
    pub relation: Option<PathBuf>,
}

impl RunConfig {
    fn engine(&self) -> EngineConfig {
        EngineConfig {
            inner_budget: self.inner_budget as usize,
            outer_budget: self.outer_budget as usize,
            element_cap: self.element_cap as usize,
        }
    }
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn constants(cfg: &RunConfig) -> Result<Constants> {
    match &cfg.constants {
        Some(p) => Constants::from_json(&read(p)?),
        None => Ok(Constants::new()),
    }
}

fn functor(cfg: &RunConfig, c: &Constants) -> Result<FunctorExpr> {
    let path = cfg.functor.as_ref().ok_or_else(|| Error::Invalid("--functor is required".into()))?;
    parse(read(path)?.trim(), c)
}

fn poset_arg(path: &Option<PathBuf>) -> Result<FinPoset> {
    match path {
        Some(p) => FinPoset::from_json(&read_json::<PosetJson>(p)?),
        None => Ok(one()),
    }
}

fn lts_args(cfg: &RunConfig) -> Result<Vec<LtsSpec>> {
    cfg.lts.iter().map(|p| LtsSpec::from_json(&read_json::<LtsJson>(p)?)).collect()
}

fn approx_arg(cfg: &RunConfig, lts: &LtsSpec) -> Result<Relation> {
    match &cfg.approx {
        Some(p) => read_json::<EquivalenceJson>(p)?.resolve(&lts.value_set()),
        None => Ok(Relation::identity(lts.values.len())),
    }
}

fn emit<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &cfg.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render_dir(cfg: &RunConfig) -> PathBuf {
    match cfg.out.as_ref().and_then(|p| p.parent()) {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn write_dots(dir: &Path, rows: &[Vec<Arc<FinPoset>>]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (r, stages) in rows.iter().enumerate() {
        for (c, s) in stages.iter().enumerate() {
            let name = format!("stage_{r}_{c}");
            fs::write(dir.join(format!("{name}.dot")), s.to_dot(&name))?;
        }
    }
    Ok(())
}

fn solution_rows(report: &SolutionReport) -> Vec<Vec<Arc<FinPoset>>> {
    report.chain.rows.iter().map(|r| r.seq.stages.clone()).collect()
}

fn solve(cfg: &RunConfig) -> Result<(SolutionReport, crate::engine::ReportJson)> {
    let c = constants(cfg)?;
    let expr = functor(cfg, &c)?;
    let report = solve_hob(&expr, &c, cfg.engine())?;
    let j = report.to_json();
    verify_report_json(&j)?;
    Ok((report, j))
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<i32> {
    let (report, j) = solve(cfg)?;
    emit(cfg, &j)?;
    if cfg.render {
        write_dots(&render_dir(cfg), &solution_rows(&report))?;
    }
    Ok(if report.is_solved() { EXIT_OK } else { EXIT_TRUNCATED })
}

pub fn cmd_render(cfg: &RunConfig) -> Result<i32> {
    let (report, _) = solve(cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_dots(&dir, &solution_rows(&report))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TerminalJson {
    expr: String,
    status: SeqStatus,
    sizes: Vec<usize>,
    stages: Vec<PosetJson>,
    eps: Vec<EpJson>,
    #[serde(rename = "final")]
    final_coalgebra: Option<FinalJson>,
    lambek: Option<bool>,
}

pub fn cmd_terminal(cfg: &RunConfig) -> Result<i32> {
    let c = constants(cfg)?;
    let expr = functor(cfg, &c)?;
    let inst = Arc::new(FunctorInstance::with_cap(
        expr.clone(),
        Backend::PointedStrict,
        Arc::new(poset_arg(&cfg.v)?),
        Arc::new(poset_arg(&cfg.w)?),
        c,
        cfg.element_cap as usize,
    )?);
    let seq = terminal_sequence(&inst, cfg.inner_budget as usize)?;
    let fin = match final_coalgebra(&seq, &inst)? {
        FinalOutcome::Exact(f) => Some(f),
        FinalOutcome::Approximant { .. } => None,
    };
    let j = TerminalJson {
        expr: expr.to_string(),
        status: seq.status,
        sizes: seq.sizes(),
        stages: seq.stages.iter().map(|s| s.to_json()).collect(),
        eps: seq.eps.iter().map(EpJson::of).collect(),
        lambek: fin.as_ref().map(|f| f.lambek_check()),
        final_coalgebra: fin.as_ref().map(|f| FinalJson {
            carrier: f.carrier.to_json(),
            codomain: f.structure.cod().to_json(),
            structure: f.structure.table().to_vec(),
            inverse: f.inverse.table().to_vec(),
        }),
    };
    emit(cfg, &j)?;
    if cfg.render {
        write_dots(&render_dir(cfg), std::slice::from_ref(&seq.stages))?;
    }
    Ok(if seq.is_stabilized() { EXIT_OK } else { EXIT_TRUNCATED })
}

#[derive(Serialize)]
struct RelationReport {
    left: Vec<String>,
    right: Vec<String>,
    relation: RelationJson,
    size: usize,
}

fn pair_args(cfg: &RunConfig) -> Result<(LtsSpec, LtsSpec)> {
    let mut ls = lts_args(cfg)?;
    match ls.len() {
        1 => {
            let l = ls.remove(0);
            Ok((l.clone(), l))
        }
        2 => {
            let b = ls.remove(1);
            Ok((ls.remove(0), b))
        }
        _ => Err(Error::Invalid("pass --lts once or twice".into())),
    }
}

fn relation_report(a: &LtsSpec, b: &LtsSpec, r: &Relation) -> RelationReport {
    RelationReport {
        left: a.states.clone(),
        right: b.states.clone(),
        relation: r.to_json(&a.state_set(), &b.state_set()),
        size: r.len(),
    }
}

pub fn cmd_bisim(cfg: &RunConfig) -> Result<i32> {
    let (a, b) = pair_args(cfg)?;
    let r = value_bisim(&a, &b)?;
    emit(cfg, &relation_report(&a, &b, &r))?;
    Ok(EXIT_OK)
}

pub fn cmd_dimmed(cfg: &RunConfig) -> Result<i32> {
    let (a, b) = pair_args(cfg)?;
    let approx = approx_arg(cfg, &a)?;
    let r = dimmed_bisim(&a, &b, &approx)?;
    emit(cfg, &relation_report(&a, &b, &r))?;
    Ok(EXIT_OK)
}

pub fn cmd_quotient(cfg: &RunConfig) -> Result<i32> {
    let (l, _) = pair_args(cfg)?;
    let approx = approx_arg(cfg, &l)?;
    let r = match &cfg.relation {
        Some(p) => read_json::<EquivalenceJson>(p)?.resolve(&l.state_set())?,
        None => dimmed_bisim(&l, &l, &approx)?,
    };
    let q = quotient(&l, &r, &approx)?;
    emit(cfg, &q.to_json()?)?;
    Ok(EXIT_OK)
}

pub fn cmd_lemma1(cfg: &RunConfig) -> Result<i32> {
    if cfg.lts.is_empty() {
        if !cfg.exhaustive {
            return Err(Error::Invalid("pass --lts, or --exhaustive alone for the full sweep".into()));
        }
        // Every system with two states over two values.
        let sweep = lemma1_sweep(2, 2)?;
        emit(cfg, &sweep)?;
        return Ok(if sweep.failures == 0 { EXIT_OK } else { EXIT_CHECK_FAILED });
    }
    let (l, _) = pair_args(cfg)?;
    let approx = approx_arg(cfg, &l)?;
    if cfg.exhaustive && l.states.len() > EXHAUSTIVE_MAX_STATES {
        return Err(Error::SizeCapExceeded { size: l.states.len(), cap: EXHAUSTIVE_MAX_STATES });
    }
    let rep = lemma1_check(&l, &approx, cfg.exhaustive)?;
    emit(cfg, &rep)?;
    Ok(if rep.holds { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_mediator(cfg: &RunConfig) -> Result<i32> {
    let c = constants(cfg)?;
    let expr = functor(cfg, &c)?;
    let mut rep = solve_lifted(
        &expr,
        &c,
        &poset_arg(&cfg.v)?,
        &poset_arg(&cfg.w)?,
        cfg.inner_budget as usize,
        cfg.element_cap as usize,
    )?;
    if cfg.exhaustive {
        rep.adjunction = Some(adjunction_sweep(4, 4)?);
    }
    let j = rep.to_json();
    verify_mediator_json(&j)?;
    emit(cfg, &j)?;
    let adj_ok = rep.adjunction.as_ref().is_none_or(|s| s.failures == 0);
    Ok(if rep.agrees() && adj_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_check_laws(cfg: &RunConfig) -> Result<i32> {
    let rep = check_laws(cfg.seed)?;
    print!("{}", rep.transcript());
    if let Some(p) = &cfg.out {
        let text = serde_json::to_string_pretty(&rep)? + "\n";
        fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    if let Some((suite, example)) = rep.first_counterexample() {
        eprintln!("counterexample in {suite}: {example}");
    }
    Ok(if rep.ok() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Solve(c) => cmd_solve(c),
        Command::Terminal(c) => cmd_terminal(c),
        Command::Bisim(c) => cmd_bisim(c),
        Command::Dimmed(c) => cmd_dimmed(c),
        Command::Quotient(c) => cmd_quotient(c),
        Command::Lemma1(c) => cmd_lemma1(c),
        Command::Mediator(c) => cmd_mediator(c),
        Command::CheckLaws(c) => cmd_check_laws(c),
        Command::Render(c) => cmd_render(c),
    }
}

fn report_error(code: &str, message: String) {
    let j = ErrorJson { error: code, message };
    eprintln!("{}", serde_json::to_string(&j).unwrap_or_default());
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to standard error as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            report_error("UsageError", e.to_string().trim().to_string());
            return EXIT_ERROR;
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            report_error(e.code(), e.to_string());
            EXIT_ERROR
        }
    }
}
