pub mod cooccurrence;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod factorization;
pub mod neural;
pub mod pipeline;
pub mod random_indexing;
pub mod synthetic;
pub mod weighting;

pub use error::{Error, Result};
