//! The Rabinowitz-Floer complex of a fiberwise star-shaped hypersurface in
//! the form of finite algebraic data: generators `Z^±(γ)` for every critical
//! point `γ` of the energy functional, their gradings and action levels, the
//! boundary operator, the comparison maps with the Morse complexes of the
//! energy functional, and the split short exact sequence built from them.
//!
//! Boundary operators and the coefficients of `Φ` and `Ψ` are inputs. The
//! module checks the structural constraints they must satisfy, derives the
//! splitting maps, the homotopy `P`, the corrected maps `Θ`, `Θ̂` and the
//! connecting map `Δ`, and verifies the identities relating them.

mod data;
mod hrf;
mod maps;
mod model;
pub mod synth;
mod theorem;

pub use data::{ClosedOrbit, CritPoint, EnergyCritData, CONTRACTIBLE};
pub use hrf::{
    compare_hrf_table, compute_hrf, compute_hrf_by_class, filter_by_action, filter_map, positive_negative_isomorphisms,
    ActionInterval, HrfReport, HrfRow, SplitIsomorphisms,
};
pub use maps::{
    assemble_p, assemble_phi, assemble_psi, derive_p, derive_phi_hat, derive_psi_hat, phi_coefficients, phi_report,
    psi_coefficients, psi_report, PResult, PhiReport, PsiReport,
};
pub use model::{build_rf_model, minus_id, plus_id, rf_generators, OrderKey, RFModel, RfInput, Sign};
pub use theorem::{build_theta, verify_theorem_main, IdentityResult, RfMapSet, TheoremReport};

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{ComplexError, MapError, Mismatch};
use crate::gysin::GysinError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RfError {
    #[error("constant stratum: {0}")]
    Morse(#[from] GysinError),
    #[error("duplicate critical point id {0:?}")]
    DuplicateId(String),
    #[error("closed orbit {id:?}: {reason}")]
    Orbit { id: String, reason: &'static str },
    #[error("class {class:?}: {reason}")]
    ClassNegation { class: String, reason: &'static str },
    #[error("{complex} boundary {from:?} -> {to:?}: {reason}")]
    MorseBoundary { complex: &'static str, from: String, to: String, reason: &'static str },
    #[error("{complex} complex is invalid: {source}")]
    Complex { complex: &'static str, source: ComplexError },
    #[error("grading census: generator {generator:?} expected in degree {expected:?}, found {found:?}")]
    Census { generator: String, expected: Option<i64>, found: Option<i64> },
    #[error("filtration: boundary of {generator:?} contains {target:?}, which is not strictly lower")]
    Filtration { generator: String, target: String },
    #[error("boundary of {generator:?} hits {target:?} in a different free homotopy class")]
    Class { generator: String, target: String },
    #[error("zero-action part of the boundary of {generator:?} is {found:?}, expected {expected:?}")]
    PartialProp { generator: String, expected: Vec<String>, found: Vec<String> },
    #[error("boundary squared is nonzero on {generator:?}: {image:?}")]
    BoundarySquare { generator: String, image: Vec<String> },
    #[error("label of {generator:?}: {reason}")]
    Label { generator: String, reason: &'static str },
    #[error("{map} coefficient {source_id:?} -> {target:?}: {reason}")]
    Coefficient { map: &'static str, source_id: String, target: String, reason: &'static str },
    #[error("{map} is not a chain map, {witness}")]
    NotChainMap { map: &'static str, witness: Mismatch },
    #[error("{map} fails {identity}, {witness}")]
    Splitting { map: &'static str, identity: &'static str, witness: Mismatch },
    #[error("no chain homotopy P with ΨΦ = P∂ + δP exists")]
    NoHomotopy,
    #[error(transparent)]
    Map(#[from] MapError),
}
