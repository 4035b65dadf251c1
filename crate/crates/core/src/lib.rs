//! Cooperative regenerating codes over prime fields: the storage/bandwidth
//! tradeoff, explicit MBCR and MSCR constructions, and a repair simulator.

pub mod cli;
pub mod field;
pub mod mbcr;
pub mod mscr;
pub mod simulator;
pub mod tradeoff;
pub mod transcript;

pub use field::{FieldElement, FieldError, FieldMatrix, PrimeField};
pub use transcript::{Phase, RepairTranscript, TranscriptEntry};
