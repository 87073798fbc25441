//! Exact symbolic machinery for transmit directions: monomials over channel
//! gains, the direction sets of each signaling scheme, alignment analysis at
//! the receivers and the closed-form DOF counts.

mod dof;
mod kuser;
mod monomial;
mod packed;
mod plan;

pub use dof::{
    alignment_efficiency, alignment_efficiency_capped, dof_formula_kuser, dof_formula_three_user,
    AlignmentEfficiency,
};
pub use kuser::{
    generate_kuser_directions, interference_hull, interference_hull_count, kuser_direction_count,
    DEFAULT_ENUMERATION_CAP,
};
pub use monomial::{
    monomial_mul, received_directions, DirectionSet, GainSymbol, Generator, Monomial,
};
pub use packed::{
    kuser_layout, packed_interference_hull, packed_kuser_directions, shifted_disjoint,
    shifted_subset, PackedLayout, DEFAULT_PACKED_CAP,
};
pub use plan::{
    analyze_plan, analyze_receiver, kuser_plan, mac_plan, three_user_plan, x_channel_plan,
    PlanAnalysis, ReceivedProfile, Scheme, SignalingPlan, StreamLabel, Transmitter,
};
