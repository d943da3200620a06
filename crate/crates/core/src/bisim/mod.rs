mod coalg;
mod games;
mod lts;
mod quotient;

pub use coalg::{
    behavioural_equiv, check_coalg_bisim, coalg_bisim, coalg_bisim_with, lts_instance, lts_to_coalgebra,
    lts_to_coalgebra_over, LTS_FUNCTOR,
};
pub use games::{
    check_dimmed_bisim, check_value_bisim, dimmed_bisim, value_bisim, Violation, INPUT_MATCH, OUTPUT_MATCH,
};
pub use lts::{all_partitions, Behaviour, BehaviourJson, LtsJson, LtsSpec};
pub use quotient::{
    class_name, lemma1_check, lemma1_sweep, quotient, Lemma1Counterexample, Lemma1Report, Lemma1Sweep,
    EXHAUSTIVE_MAX_STATES, EXHAUSTIVE_MAX_VALUES,
};

#[cfg(test)]
mod tests;
