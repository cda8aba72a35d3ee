//! Generalized Zeckendorf decompositions for positive linear recurrences and
//! the distribution of gaps between their summands.

pub mod bulkgaps;
pub mod cli;
pub mod error;
pub mod longestgap;
pub mod montecarlo;
pub mod numeric;
pub mod poly;
pub mod recurrence;
pub mod spectral;
pub mod verify;
pub mod zeck;

pub use error::{Error, Result};
pub use recurrence::{Recurrence, SequenceTable, SequenceWindow};
pub use spectral::SpectralData;
pub use zeck::{decompose, gap_list, longest_gap, reconstruct, Decomposition};
