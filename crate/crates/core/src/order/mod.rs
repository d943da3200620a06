//! Finite posets, monotone maps, and the constructions on them.

mod construct;
mod enumerate;
mod iso;
mod maps;
mod poset;

pub use construct::{
    boolean_lattice, chain, coalesced_sum, coalesced_sum_space, discrete, fun_space, fun_space_with, lift,
    monotone_tables, monotone_tables_upto, one, product, separated_sum, separated_sum_space, strict_fun_space,
    strict_upsets, upset_members, upsets, upsets_with, FunSpace, SumSpace, SumTag, UpsetSpace,
};
pub use enumerate::{all_pointed_posets, all_posets, random_pointed_poset, random_poset};
pub use iso::{find_iso, iso_brute_force, iso_check, iso_check_with, DEFAULT_ISO_CAP};
pub use maps::{compose, ep_check, identity, EpPair, Iso, MonoMap};
pub use poset::{Bits, FinPoset, PosetJson};
