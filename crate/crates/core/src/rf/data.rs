use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::complex::{ComplexBuilder, GradedF2Complex, Label};
use crate::gysin::MorseData;

use super::RfError;

/// Class tag of contractible loops, which contain the constant loops.
pub const CONTRACTIBLE: &str = "0";

/// A critical point of the energy functional on the auxiliary Morse
/// function of a Morse-Bott family of nonconstant closed geodesics.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedOrbit {
    pub id: String,
    pub energy: f64,
    pub aux: f64,
    /// Index for `(E, e)`.
    pub ind_plus: u32,
    /// Index for `(E, −e)`.
    pub ind_minus: u32,
    pub class: String,
}

/// Critical points of the energy functional together with the two Morse
/// complexes built from them.
///
/// The constant stratum is the Morse data of `e` on the base. Boundaries
/// among constants come from that data; `energy_boundary` lists the
/// boundary of `M_*(E, e)` on closed orbits and `coenergy_boundary` the
/// components of the coboundary of `M^*(E, −e)` that hit closed orbits.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyCritData {
    pub constant: MorseData,
    pub orbits: Vec<ClosedOrbit>,
    pub energy_boundary: BTreeMap<String, Vec<String>>,
    pub coenergy_boundary: BTreeMap<String, Vec<String>>,
    /// Free homotopy class of the reversed loops. Absent classes are
    /// their own inverse.
    pub class_negation: BTreeMap<String, String>,
}

/// Constants and closed orbits on one footing.
#[derive(Clone, Debug, PartialEq)]
pub struct CritPoint {
    pub id: String,
    pub energy: f64,
    pub aux: f64,
    pub ind_plus: i64,
    pub ind_minus: i64,
    pub class: String,
    pub constant: bool,
}

impl CritPoint {
    pub fn action(&self) -> f64 {
        libm::sqrt(self.energy)
    }

    /// Compare by `(E, e)`, the order along which `M_*(E, e)` lowers.
    pub fn cmp_energy(&self, other: &CritPoint) -> Ordering {
        self.energy.total_cmp(&other.energy).then(self.aux.total_cmp(&other.aux))
    }

    /// Compare by `(E, −e)`.
    pub fn cmp_coenergy(&self, other: &CritPoint) -> Ordering {
        self.energy.total_cmp(&other.energy).then(other.aux.total_cmp(&self.aux))
    }
}

pub(crate) struct Validated {
    pub points: Vec<CritPoint>,
    pub x: Arc<GradedF2Complex>,
    pub z: Arc<GradedF2Complex>,
}

impl EnergyCritData {
    pub fn n(&self) -> u32 {
        self.constant.n
    }

    pub fn euler(&self) -> bool {
        self.constant.euler
    }

    pub fn negate(&self, class: &str) -> String {
        self.class_negation.get(class).cloned().unwrap_or_else(|| class.to_string())
    }

    /// Constants in the listed order, then closed orbits.
    pub fn critical_points(&self) -> Vec<CritPoint> {
        let n = self.constant.n as i64;
        let mut out: Vec<CritPoint> = self
            .constant
            .critical_points
            .iter()
            .map(|c| CritPoint {
                id: c.id.clone(),
                energy: 0.0,
                aux: c.value,
                ind_plus: c.index as i64,
                ind_minus: n - c.index as i64,
                class: CONTRACTIBLE.to_string(),
                constant: true,
            })
            .collect();
        out.extend(self.orbits.iter().map(|o| CritPoint {
            id: o.id.clone(),
            energy: o.energy,
            aux: o.aux,
            ind_plus: o.ind_plus as i64,
            ind_minus: o.ind_minus as i64,
            class: o.class.clone(),
            constant: false,
        }));
        out
    }

    /// `Λ^c` for every class tag that occurs, sorted.
    pub fn classes(&self) -> Vec<String> {
        let mut s: BTreeSet<String> = self.orbits.iter().map(|o| o.class.clone()).collect();
        s.insert(CONTRACTIBLE.to_string());
        s.into_iter().collect()
    }

    /// Full coboundary `δγ` in `M^*(E, −e)` as ids.
    pub fn coboundary_ids(&self, id: &str, constant: bool) -> Vec<String> {
        let mut t = if constant { self.constant.boundary_ids(id) } else { Vec::new() };
        if let Some(extra) = self.coenergy_boundary.get(id) {
            t.extend(extra.iter().cloned());
        }
        t
    }

    /// Full boundary `∂γ` in `M_*(E, e)` as ids.
    pub fn boundary_ids(&self, id: &str, constant: bool) -> Vec<String> {
        if constant {
            self.constant.boundary_ids(id)
        } else {
            self.energy_boundary.get(id).cloned().unwrap_or_default()
        }
    }

    pub(crate) fn validate(&self) -> Result<Validated, RfError> {
        self.constant.validate()?;
        let points = self.critical_points();
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id.as_str(), i).is_some() {
                return Err(RfError::DuplicateId(p.id.clone()));
            }
        }
        for o in &self.orbits {
            let bad = |reason| RfError::Orbit { id: o.id.clone(), reason };
            if !(o.energy.is_finite() && o.energy > 0.0) {
                return Err(bad("energy must be positive and finite"));
            }
            if !o.aux.is_finite() {
                return Err(bad("auxiliary value must be finite"));
            }
            if o.class.is_empty() {
                return Err(bad("class tag is empty"));
            }
        }
        for (c, d) in &self.class_negation {
            if self.negate(d) != *c {
                return Err(RfError::ClassNegation { class: c.clone(), reason: "class negation is not an involution" });
            }
        }
        if self.negate(CONTRACTIBLE) != CONTRACTIBLE {
            return Err(RfError::ClassNegation {
                class: CONTRACTIBLE.into(),
                reason: "contractible class must be its own inverse",
            });
        }
        let lookup = |complex: &'static str, from: &str, to: &str| -> Result<(usize, usize), RfError> {
            let bad = |reason| RfError::MorseBoundary { complex, from: from.into(), to: to.into(), reason };
            let &a = index.get(from).ok_or_else(|| bad("unknown source"))?;
            let &b = index.get(to).ok_or_else(|| bad("unknown target"))?;
            Ok((a, b))
        };
        for (from, targets) in &self.energy_boundary {
            for to in targets {
                let (a, b) = lookup("energy", from, to)?;
                let bad =
                    |reason| RfError::MorseBoundary { complex: "energy", from: from.clone(), to: to.clone(), reason };
                let (p, q) = (&points[a], &points[b]);
                if p.constant {
                    return Err(bad("boundary of a constant comes from the Morse data"));
                }
                if q.ind_plus != p.ind_plus - 1 {
                    return Err(bad("index must drop by one"));
                }
                if q.cmp_energy(p) != Ordering::Less {
                    return Err(bad("(E, e) must decrease strictly"));
                }
                if q.class != p.class {
                    return Err(bad("classes differ"));
                }
            }
        }
        for (from, targets) in &self.coenergy_boundary {
            for to in targets {
                let (a, b) = lookup("coenergy", from, to)?;
                let bad =
                    |reason| RfError::MorseBoundary { complex: "coenergy", from: from.clone(), to: to.clone(), reason };
                let (p, q) = (&points[a], &points[b]);
                if q.constant {
                    return Err(bad("coboundary between constants comes from the Morse data"));
                }
                if q.ind_minus != p.ind_minus + 1 {
                    return Err(bad("index must rise by one"));
                }
                if q.cmp_coenergy(p) != Ordering::Greater {
                    return Err(bad("(E, -e) must increase strictly"));
                }
                if q.class != p.class {
                    return Err(bad("classes differ"));
                }
            }
        }
        let label = |p: &CritPoint, a: f64| Label { action: Some(a), class: Some(p.class.clone()) };
        let mut bx = ComplexBuilder::new();
        let mut bz = ComplexBuilder::new();
        for p in &points {
            bx.labelled(p.id.clone(), p.ind_plus, label(p, p.action()));
            bz.labelled(p.id.clone(), 1 - p.ind_minus, label(p, -p.action()));
        }
        for p in &points {
            bx.boundary(&p.id, self.boundary_ids(&p.id, p.constant));
            bz.boundary(&p.id, self.coboundary_ids(&p.id, p.constant));
        }
        let x = bx.build().map_err(|source| RfError::Complex { complex: "energy", source })?;
        let z = bz.build().map_err(|source| RfError::Complex { complex: "coenergy", source })?;
        Ok(Validated { points, x: Arc::new(x), z: Arc::new(z) })
    }
}
