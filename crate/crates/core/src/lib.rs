//! Finite homological algebra over GF(2) for Morse, sphere-bundle and
//! Rabinowitz-Floer style chain complexes, together with numerical checks of
//! the action and maximum-principle inequalities that accompany them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

extern crate alloc;

pub mod complex;
pub mod cone;
pub mod error;
pub mod exact;
pub mod f2;
pub mod gysin;
pub mod homology;
pub mod map;
pub mod numeric;
pub mod rf;

pub use complex::{ComplexBuilder, Generator, GradedF2Complex, Label};
pub use error::{ComplexError, DimensionError, MapError, Mismatch};
pub use f2::{F2SparseMatrix, F2Vec};
pub use homology::{homology, HomologySummary};
pub use map::{ChainHomotopy, ChainMap, LinearMap};
