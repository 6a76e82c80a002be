//! Mapping cones of degree-preserving chain maps.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::{ComplexBuilder, Generator, GradedF2Complex};
use crate::error::{ComplexError, MapError, Mismatch};
use crate::map::{verify_chain_map, ChainMap, LinearMap};

/// The cone `C(ψ) = Z ⊕ Y⁺` of `ψ: Y → Z`, with
/// `∂(z, y) = (∂z + ψy, ∂y)` (the sign on `∂y` is invisible mod 2).
#[derive(Clone, Debug)]
pub struct MappingCone {
    pub complex: Arc<GradedF2Complex>,
    /// `ι z = (z, 0)`.
    pub inclusion: LinearMap,
    /// `π (z, y) = y`, onto `Y⁺`.
    pub projection: LinearMap,
    pub suspended_source: Arc<GradedF2Complex>,
    z_pos: Vec<usize>,
    y_pos: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConeError {
    #[error("cone needs a map of shift 0, got {0}")]
    Shift(i64),
    #[error("cone of a map that is not a chain map, {0}")]
    NotChainMap(Mismatch),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
}

pub fn z_id(id: &str) -> String {
    format!("z:{id}")
}

pub fn y_id(id: &str) -> String {
    format!("y+:{id}")
}

pub fn mapping_cone(psi: &ChainMap) -> Result<MappingCone, ConeError> {
    if psi.shift() != 0 {
        return Err(ConeError::Shift(psi.shift()));
    }
    verify_chain_map(psi).map_err(ConeError::NotChainMap)?;
    let (y, z) = (psi.source(), psi.target());
    let mut b = ComplexBuilder::new();
    for g in z.generators() {
        b.push(Generator { id: z_id(&g.id), degree: g.degree, label: g.label.clone() });
    }
    for g in y.generators() {
        b.push(Generator { id: y_id(&g.id), degree: g.degree + 1, label: g.label.clone() });
    }
    for i in 0..z.len() {
        b.boundary(&z_id(z.id(i)), z.boundary_of(i).iter().map(|&j| z_id(z.id(j))));
    }
    for i in 0..y.len() {
        let mut t: Vec<String> = psi.image_of(i).iter().map(|&j| z_id(z.id(j))).collect();
        t.extend(y.boundary_of(i).iter().map(|&j| y_id(y.id(j))));
        b.boundary(&y_id(y.id(i)), t);
    }
    let c = Arc::new(b.build()?);
    let z_pos: Vec<usize> = (0..z.len()).map(|i| c.index_of(&z_id(z.id(i))).unwrap()).collect();
    let y_pos: Vec<usize> = (0..y.len()).map(|i| c.index_of(&y_id(y.id(i))).unwrap()).collect();
    let suspended = Arc::new(y.suspension());
    let inclusion = LinearMap::from_indices(z.clone(), c.clone(), 0, z_pos.iter().map(|&p| alloc::vec![p]).collect())?;
    let mut proj = alloc::vec![Vec::new(); c.len()];
    for (i, &p) in y_pos.iter().enumerate() {
        proj[p].push(i);
    }
    let projection = LinearMap::from_indices(c.clone(), suspended.clone(), 0, proj)?;
    Ok(MappingCone { complex: c, inclusion, projection, suspended_source: suspended, z_pos, y_pos })
}

impl MappingCone {
    /// Cone index of the `Z` summand generator `i`.
    pub fn z_index(&self, i: usize) -> usize {
        self.z_pos[i]
    }

    /// Cone index of the `Y⁺` summand generator `i`.
    pub fn y_index(&self, i: usize) -> usize {
        self.y_pos[i]
    }

    /// `ι̂(z, y) = z`, a linear map `C → Z`.
    pub fn z_projection(&self, z: Arc<GradedF2Complex>) -> Result<LinearMap, MapError> {
        let mut t = alloc::vec![Vec::new(); self.complex.len()];
        for (i, &p) in self.z_pos.iter().enumerate() {
            t[p].push(i);
        }
        LinearMap::from_indices(self.complex.clone(), z, 0, t)
    }

    /// `π̂ y = (0, y)`, a linear map `Y⁺ → C`.
    pub fn y_inclusion(&self) -> Result<LinearMap, MapError> {
        LinearMap::from_indices(
            self.suspended_source.clone(),
            self.complex.clone(),
            0,
            self.y_pos.iter().map(|&p| alloc::vec![p]).collect(),
        )
    }
}
