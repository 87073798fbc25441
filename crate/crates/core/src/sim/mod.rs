//! Uncoded PAM over the interference channel: encoding, nearest-point
//! decoding, symbol-error Monte Carlo and DOF sweeps.

mod constellation;
mod sweep;
mod trials;

pub use constellation::{
    build_from_streams, build_received_constellation, decode, decode_position,
    decode_position_linear, received_streams, stream_ranges, ReceivedConstellation, ReceivedStream,
    StreamKind, DEFAULT_CONSTELLATION_CAP,
};
pub use sweep::{dof_sweep, log_grid, ls_slope, scheduled_slope, SweepResult};
pub use trials::{
    encode, encode_values, plan_for, rate_of, run_link, run_trials, Link, SimConfig, SimResult,
    StreamResult, DEFAULT_EPSILON, DEFAULT_GAMMA, DEFAULT_SER_TARGET,
};
