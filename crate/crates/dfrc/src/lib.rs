//! Link-level simulator for a dual-function radar-communication array that
//! time-shares its elements between a slotted chirp radar and generalized
//! spatial modulation, with per-slot antenna allocation.
//!
//! The crate covers the whole analysis chain:
//!
//! - [`config`]: validated system parameters and derived quantities.
//! - [`alloc`]: antenna allocation schemes and the bit-to-subset map.
//! - [`waveform`]: chirp slots, PSK/GSM encoding, joint waveform assembly.
//! - [`beampattern`]: delay-direction patterns, closed forms, and Monte
//!   Carlo statistics of the random allocation ensembles.
//! - [`radar`]: echo synthesis, the on-grid dictionary, and greedy sparse
//!   recovery of delay/angle scenes.
//! - [`comm`]: Rayleigh MIMO link, ML detection, BER and mutual
//!   information estimation.
//! - [`harness`]: seeded experiment campaigns with CSV/SVG output.
//!
//! Every stochastic operation takes an explicit seed or RNG and is
//! deterministic for a fixed seed, including under parallel execution.

pub mod alloc;
pub mod beampattern;
pub mod comm;
pub mod config;
pub mod error;
pub mod harness;
pub mod radar;
pub mod waveform;

pub use config::SystemConfig;
pub use error::{Error, Result};
