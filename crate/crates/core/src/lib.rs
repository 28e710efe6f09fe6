//! Frame synchronization over discrete and continuous memoryless channels.
//!
//! - [`channel`]: alphabets, DMCs, composition and on-off fading.
//! - [`continuous`]: AWGN and Rayleigh-faded AWGN densities, quantization.
//! - [`thresholds`]: synchronization thresholds and the on-off bound.
//! - [`sequences`]: LFSR sequences and sync-word construction.
//! - [`decoder`]: sequential joint-typicality decoder.
//! - [`sim`]: trials, Monte Carlo and scaling experiments.

pub mod channel;
pub mod cli;
pub mod continuous;
pub mod decoder;
pub mod error;
pub mod format;
pub mod quadrature;
pub mod sequences;
pub mod sim;
pub mod thresholds;

pub use channel::{Alphabet, Dmc};
pub use error::{Error, Result};
pub use thresholds::{sync_threshold, Divergence, ThresholdReport};
