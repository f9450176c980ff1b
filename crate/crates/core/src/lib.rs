//! Link-level simulator for caption-based semantic image transmission.
//!
//! The transmitter turns an image into a short caption (or, for the
//! conventional baseline, into raw RGB bytes), frames it, protects it with a
//! rate-1/2 LDPC code and sends it as 4-QAM over a 128-subcarrier OFDM grid
//! through an AWGN or Doppler-fading tapped-delay-line channel received on two
//! antennas. The receiver estimates the channel from pilot symbols, combines,
//! soft-demaps, decodes and hands the recovered caption to a semantic decoder
//! that regenerates an image.
//!
//! Module map:
//! - [`semantic_theory`]: logical probability, semantic entropy and the
//!   semantic capacity objective on finite world models.
//! - [`codec`]: semantic encoder/decoder boundary, fixture-backed mock and
//!   HTTP gateway client.
//! - [`framing`]: bit frames for text and image payloads.
//! - [`fec`]: regular (3,6) LDPC code and belief-propagation decoder.
//! - [`phy`]: 4-QAM, resource grid, OFDM, channel estimation, combining.
//! - [`channel`]: AWGN and TDL fading channel.
//! - [`metrics`]: BER, BLEU, SSIM, effective data rate, compression ratio.
//! - [`harness`]: trials, SNR sweeps and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codec;
pub mod error;
pub mod fec;
pub mod framing;
pub mod harness;
pub mod metrics;
pub mod phy;
pub mod semantic_theory;

pub use error::{Error, Result};

/// Hard bits are carried as `u8` values that are either 0 or 1.
pub type Bit = u8;
