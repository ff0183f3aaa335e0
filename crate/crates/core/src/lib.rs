//! Degenerate and non-degenerate Viterbi decoding of circuit-defined
//! quantum convolutional codes under i.i.d. Pauli noise.

pub mod agreement;
pub mod bitvec;
pub mod code;
pub mod codefile;
pub mod error;
pub mod invariants;
pub mod montecarlo;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod symplectic;
pub mod trellis;
pub mod viterbi;

pub use code::{CodeParams, ConvolutionalCode, Decomposition, Syndrome};
pub use codefile::CodeFile;
pub use error::{Error, Result};
pub use noise::IidPauliNoise;
pub use pauli::{Pauli, PauliOperator};
pub use symplectic::{Gate, SymplecticMap};
pub use trellis::{DecoderMode, SyndromeTrellis, TrellisBuilder};
pub use viterbi::{decode_degenerate, decode_nondegenerate, DecodeOutcome, Decoder};
