//! Exact machinery for mass transport over finite preordered ground sets
//! with the zero-one cost that charges only unrelated pairs.
//!
//! The crate solves both sides of that problem with exact rational
//! arithmetic: the least mass any coupling of two marginals must leave off
//! the relation, and the largest marginal difference over upper sets. The
//! two optima coincide on every preorder, and [`transport::certify_duality`]
//! checks the equality instance by instance, against an independent
//! enumeration oracle when the ground is small. Around that core sit
//! cost-side tools (transforms of potentials, feasibility checks, superlevel
//! extraction) and a lab of two-block grid instances whose optimal value 1/n
//! shrinks to zero without ever vanishing.
//!
//! Everything is immutable after construction and every operation is a pure
//! function, so values can be shared freely across threads.

pub mod counterexample;
pub mod error;
pub mod ground;
pub mod measure;
pub mod potential;
pub mod relation;
pub mod transport;

/// Exact arithmetic everywhere; no floats enter any computation.
pub type Rational = num_rational::BigRational;

pub use counterexample::{
    build_grid_instance, closed_approximant, mean_gap_certificate, resolution_sweep,
    resolution_sweep_with_shift, shift_coupling, GridInstance, MeanGapCertificate, ShiftCoupling,
    SweepReport, SweepRow,
};
pub use error::{Error, Result};
pub use ground::{GroundSet, IndexSet, MAX_POINTS};
pub use measure::Measure;
pub use potential::{
    c_transform, check_one_var_feasible, check_two_var_feasible, dual_objective,
    layer_cake_extract, rescale_to_unit, Direction, LayerCake, Potential,
};
pub use relation::{CostMatrix, CostReport, FamilyReport, Relation, RelationFamily};
pub use transport::{
    brute_force_dual, certify_duality, solve_ot_two_var, solve_primal_mass, solve_dual_mincut,
    solve_transshipment_one_var, Coupling, DualSolution, DualityReport, OneVarSolution,
    PrimalSolution, TwoVarSolution, ORACLE_LIMIT,
};
