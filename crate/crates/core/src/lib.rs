//! Supervised manifold learning toolkit: supervised Laplacian eigenmaps and
//! related embeddings of labeled data, Gaussian RBF out-of-sample extension,
//! margin-based classification in the embedded space, and numerical
//! evaluation of the separability and generalization bounds that govern
//! them.

// dense matrix code reads more naturally with explicit index loops
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod classify;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod interpolate;
pub mod numerics;
pub mod rng;

pub use error::{Error, Result};
pub use numerics::{DenseMatrix, EigenPairs};
