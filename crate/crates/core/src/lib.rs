//! One-bit quantized linear precoding for the multiuser MIMO downlink.
//!
//! The crate covers channel generation, one-bit quantization with its
//! Bussgang statistics, ZF/MRT/adapted precoders, exhaustive ML encoding,
//! closed-form SQINR and SER predictions, and a reproducible Monte Carlo
//! engine for checking them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod mlenc;
pub mod montecarlo;
pub mod precode;
pub mod quantize;
pub mod rng;
pub mod stats;
pub mod symbols;

pub use analysis::{AsymptoticPrediction, SqinrReport, UserSqinr};
pub use channel::{generate_channel, ChannelMatrix, GainProfile};
pub use error::{Error, Result};
pub use mlenc::{ml_encode, MlResult};
pub use montecarlo::{estimate_ser, Encoder, ExperimentConfig, SerCurve, SerPoint, SnrPoint};
pub use precode::{Precoder, PrecoderFamily};
pub use quantize::{BussgangStats, QuantizedVector};
pub use symbols::{SymbolVector, QPSK, SIGMA_S2};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
