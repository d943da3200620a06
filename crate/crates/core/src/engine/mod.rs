//! Terminal sequences, final coalgebras and the outer bi-chain.

mod finals;
mod outer;
mod sequence;

pub use finals::{
    check_limit_colimit, coinductive_extension, count_coalgebra_morphisms, final_coalgebra, is_coalgebra_morphism,
    FinalCoalgebra, FinalOutcome, LimitColimitReport,
};
pub use outer::{
    nu_on_transformation, solve_hob, verify_report_json, ChainJson, EngineConfig, EpJson, FinalJson, IsoJson,
    OuterChain, OuterRow, OuterStatus, OuterStop, ReportJson, RowJson, SolutionReport,
};
pub use sequence::{plain_sequence, terminal_sequence, PlainSequence, SeqStatus, TerminalSequence, Truncation};
