//! Windows of long exact sequences with partial knowledge, and a solver that
//! narrows them by exactness.

mod exact;
pub(crate) mod format;
mod maps;
mod sequence;
mod solve;
mod table;

pub use exact::{check_exact, ExactnessReport, PositionVerdict, Verdict};
pub use maps::{
    automorphism_generators, enumerate_maps, enumeration_is_complete, hom_count, map_classes,
    orbit_partition, EnumerateOptions, DEFAULT_WINDOW,
};
pub use sequence::{
    Edge, EdgeFlags, EdgeState, ExactSequence, Node, NodeSource, NodeState, OrderSet,
    SideConstraint,
};
pub use solve::{solve, solve_with, window, EdgeAmbiguity, NodeAmbiguity, SolveOptions, SolveReport};
pub use format::{parse_constraints, parse_sequence, print_sequence, sequence_json, SequenceFile};
pub use table::Table;
