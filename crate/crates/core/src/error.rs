use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimensionError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    EntryOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Mismatch { expected: usize, found: usize },
}

/// A generator at which two sides of an identity disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub generator: String,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {:?} != {:?}", self.generator, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ComplexError {
    #[error("duplicate generator id {0:?}")]
    DuplicateId(String),
    #[error("boundary of {from:?} references unknown generator {id:?}")]
    UnknownGenerator { from: String, id: String },
    #[error("boundary of {from:?} (degree {from_degree}) hits {to:?} in degree {to_degree}")]
    DegreeMismatch { from: String, from_degree: i64, to: String, to_degree: i64 },
    #[error("boundary squared is nonzero on {generator:?}: {image:?}")]
    BoundarySquare { generator: String, image: Vec<String> },
    #[error("boundary given twice for {0:?}")]
    DuplicateBoundary(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("maps do not compose: {0}")]
    Incompatible(&'static str),
    #[error("image of {source_id:?} references unknown target generator {id:?}")]
    UnknownGenerator { source_id: String, id: String },
    #[error("unknown source generator {0:?}")]
    UnknownSource(String),
    #[error(
        "image of {source_id:?} (degree {source_degree}) hits {target:?} in degree {target_degree}, shift {shift}"
    )]
    DegreeMismatch { source_id: String, source_degree: i64, target: String, target_degree: i64, shift: i64 },
    #[error("not a chain map, {0}")]
    NotChainMap(Mismatch),
}
