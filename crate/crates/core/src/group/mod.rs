//! Finite groups, their actions on complexes and on vector spaces, and the
//! averaging idempotents attached to subgroups.

mod action;
pub(crate) mod finite;
mod level;
mod rep;

pub use action::{
    rooted_tree_automorphism_generators, rooted_tree_automorphism_group, CellAction, LocalAction,
};
pub use finite::{
    all_subgroups, format_cycles, parse_cycles, FiniteGroup, Subgroup, DEFAULT_ORDER_CAP,
};
pub use level::{
    averaging_idempotent, build_level_system, cell_subgroup_realization, inverse_order, LevelFamily,
};
pub use rep::{intertwines, LinearRep};
