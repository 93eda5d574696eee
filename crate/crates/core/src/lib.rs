//! Simulator for a diffusion-to-neural hybrid molecular communication link.
//!
//! A transmitter on-off keys bits into molecule bursts. The molecules diffuse
//! to a cluster of connection nano-devices (CNDs), each of which converts the
//! number of molecules it received in a slot into a sine stimulation current.
//! The summed current drives a neuron whose spike train is relayed through a
//! chain of probabilistic synapses and finally decoded by a matched-filter
//! receiver. [`receiver::monte_carlo_ber`] estimates the end-to-end bit error
//! rate, and [`cli`] holds the trace, sweep and BER experiment drivers.
//!
//! Internal units are molecules, μm, ms, mV and μA/cm². Everything random
//! draws from a [`rng::RandomStream`] derived from `(seed, labels)`, so any
//! run is bit-for-bit reproducible.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod diffusion;
pub mod error;
pub mod export;
pub mod link;
pub mod neuro;
pub mod receiver;
pub mod relay;
pub mod rng;
pub mod types;

pub use config::{SystemConfig, ValidatedConfig};
pub use error::{ConfigError, Error, Result};
pub use rng::{derive_stream, RandomStream, StreamLabel};
pub use types::{Bits, SampledSignal, SpikeTrain, TimeGrid, Units};
