//! Numerical toolkit for finite-dimensional quantum channels.
//!
//! The crate is organised around a handful of constructive procedures:
//!
//! * [`nullspace`] computes channel nullspaces and synthesizes
//!   entanglement-breaking channels that annihilate a prescribed
//!   self-adjoint subspace of trace-zero matrices.
//! * [`mixed_unitary`] tests and searches for mixed-unitary structure through
//!   the canonical complementary channel, and builds the privatizing channel
//!   associated with a decomposition.
//! * [`privacy`] finds private algebras of entanglement-breaking channels from
//!   projections in the multiplicative domain of the dual map.
//!
//! Everything is built on dense complex matrices ([`CMatrix`]) and the
//! subspace arithmetic in [`operator`]. All routines are pure functions of
//! their inputs; randomized procedures take explicit seeds.

pub mod channel;
pub mod error;
mod frame;
pub mod io;
pub mod mixed_unitary;
pub mod nullspace;
pub mod operator;
pub mod privacy;
pub mod random;

pub use channel::{Channel, ChannelReport, EbVerdict, HolevoForm, KrausMap, RankOneTerm};
pub use error::{Error, Result};
pub use mixed_unitary::{MixedUnitaryDecomposition, MuVerdict, ObstructionReport};
pub use operator::{CMatrix, CVector, OperatorSubspace, Tolerance};
pub use privacy::{KrausPartition, PrivatizationCertificate};

pub use num_complex::Complex64 as C64;
