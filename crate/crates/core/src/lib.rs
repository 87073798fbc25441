//! Real interference alignment on the real line.
//!
//! * [`direction`]: monomial transmit directions, alignment analysis and DOF
//!   counting.
//! * [`channel`]: channel realizations and extended-precision evaluation of
//!   directions.
//! * [`lattice`]: exact Diophantine minimum searches, received-constellation
//!   minimum distance and constellation sizing.
//! * [`sim`]: uncoded PAM Monte Carlo over the interference channel.
//! * [`report`]: CSV and manifest formats shared by the CLI.

pub mod channel;
pub mod direction;
pub mod error;
pub mod lattice;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
