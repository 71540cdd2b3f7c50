//! Binary addition with spiking threshold-gate circuits.
//!
//! This crate simulates networks of fully-decaying integrate-and-fire
//! neurons, which behave as threshold gates: a neuron fires in a step iff
//! the weighted sum of the spikes arriving in that step, plus its bias,
//! reaches its threshold. On top of that simulator it provides
//!
//! * generators for three binary adder circuits — a sequential
//!   (ripple-carry style) adder and the depth-2/depth-3 parallel "double
//!   carry threshold adders" (DCTA2, DCTA3) — all reading and writing
//!   LSB-first binary spike encodings with a dedicated overflow output;
//! * a hardware constraint model of a Loihi 2-like target (delay caps,
//!   weight mantissa/exponent precision, bias precision, per-core neuron
//!   capacity) with validation and supported-width search;
//! * a profiler that wraps an adder in I/O relay groups and counts steps,
//!   spikes and synaptic events for one addition;
//! * verification drivers comparing every circuit against plain
//!   big-integer arithmetic, exhaustively at small widths and with seeded
//!   random operands at large ones.
//!
//! ```
//! use num_bigint::BigUint;
//! use spikeadd::adders::build_dcta2;
//! use spikeadd::hw::HardwareModel;
//!
//! let hw = HardwareModel::default();
//! let adder = build_dcta2(8, &hw).unwrap();
//! let (sum, overflow) = adder
//!     .add(&BigUint::from(127u32), &BigUint::from(127u32))
//!     .unwrap();
//! assert_eq!(sum, BigUint::from(254u32));
//! assert!(!overflow);
//! ```
//!
//! The `spikeadd` binary exposes the same functionality as `add`, `sweep`,
//! `verify`, `info` and `export-circuit` subcommands, and the crate's
//! `examples/` directory has one runnable example per capability.

pub mod adders;
pub mod circuit;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod hw;
pub mod profile;
pub mod sim;
pub mod verify;

pub use adders::{AdderConfig, AdderDescriptor, AdderKind};
pub use circuit::{Circuit, CircuitBuilder, Neuron, NeuronId, Source, Synapse};
pub use encoding::{decode_output, encode_uint, BitVector};
pub use error::{Error, Result};
pub use hw::HardwareModel;
pub use profile::{profile, worst_case_operand, ProfileReport};
pub use sim::{InputSchedule, Simulator, SpikeRecord};
pub use verify::{reference_add, verify_exhaustive, verify_random, VerificationReport};
