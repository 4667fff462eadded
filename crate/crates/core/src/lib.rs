//! Codes for the unsourced A-channel with erasures (UACE).
//!
//! Every active user encodes a payload into `L` section symbols of `J` bits
//! with a shared codebook. The channel erases each symbol independently and
//! hands the receiver, per section, the set of surviving symbols. The
//! receiver must produce the list of transmitted payloads.
//!
//! * [`llc`] builds the linked-loop code, whose parities tie each section to
//!   the previous `M` sections cyclically, and [`decoder`] decodes it in two
//!   phases: erasure-free stitching, then single-erasure recovery.
//! * [`tree`] is the tree-code baseline.
//! * [`channel`] simulates the channel, [`metrics`] estimates the payload
//!   dropping and hallucination probabilities, and [`oracle`] is an
//!   exhaustive reference decoder for tiny codes.
//!
//! See the crate's `examples/` directory for runnable walkthroughs.

pub mod channel;
pub mod cli;
pub mod code;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod llc;
pub mod metrics;
pub mod oracle;
pub mod tree;

pub use channel::{sample_payloads, transmit, ChannelOutput, ChannelParams, ErasureMask};
pub use code::{Code, Codeword, DecodeResult, Payload, SectionSymbol};
pub use decoder::{decode, decode_phase1, decode_phase2, Decoder};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitRow};
pub use llc::{LlcSpec, Path, Slot, Verdict};
pub use metrics::{estimate, score_trial, Estimate, MetricsRow, TrialOutcome};
pub use oracle::{oracle_decode, OracleLimits};
pub use tree::TreeSpec;
