//! Stiefel–Whitney algebra over F2, lifting obstructions and Smith-family
//! periods, and degreewise graded coefficient rings.

mod bundle;
mod f2poly;
mod ring;
mod structure;

pub use bundle::{total_sw, Base, BundleExpr, GeneratorBundle};
pub use f2poly::F2Poly;
pub use ring::{
    graded_degree, ko, ko_bsp1, ko_euler_rank3, ko_s4, GradedElement, GradedRing, IntPoly, KoEuler,
    Monomial, DEFAULT_EXPONENT_BOUND,
};
pub use structure::{
    adams_phi, cap_p1h, james_period, lift_obstruction_vanishes, obstructions, smith_period,
    smith_period_traced, CapResult, Obstruction, ObstructionCheck, PeriodTrace, SmithPeriod,
    TangentialStructure,
};
