//! JSON formats for complexes, chain maps, Morse data and Rabinowitz-Floer
//! models, with conversions to and from the core types.

use std::collections::BTreeMap;
use std::sync::Arc;

use rfh_core::gysin::{CriticalPoint, MorseData};
use rfh_core::rf::{ClosedOrbit, EnergyCritData, RfInput};
use rfh_core::{ComplexBuilder, ComplexError, Generator, GradedF2Complex, Label, LinearMap, MapError};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("label of {id:?}: {reason}")]
    Label { id: String, reason: &'static str },
    #[error("boundary count key {0:?} is not of the form \"q|q'\"")]
    CountKey(String),
    #[error("critical point id {0:?} contains '|'")]
    PipeInId(String),
    #[error("{field} = {value} is not 0 or 1")]
    Bit { field: String, value: u8 },
    #[error("{what} {value} is not finite")]
    NotFinite { what: String, value: f64 },
    #[error("model has no {0}")]
    Missing(&'static str),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub degrees: BTreeMap<i64, Vec<String>>,
    #[serde(default)]
    pub boundary: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, LabelJson>,
}

impl ComplexJson {
    pub fn from_complex(c: &GradedF2Complex) -> Self {
        let mut out = ComplexJson::default();
        for (i, g) in c.generators().iter().enumerate() {
            out.degrees.entry(g.degree).or_default().push(g.id.clone());
            let b = c.boundary_of(i);
            if !b.is_empty() {
                out.boundary.insert(g.id.clone(), c.ids(b));
            }
            if !g.label.is_empty() {
                out.labels.insert(g.id.clone(), LabelJson { action: g.label.action, class: g.label.class.clone() });
            }
        }
        out
    }

    /// Generators in degree order with their labels.
    pub fn generators(&self) -> Result<Vec<Generator>, FormatError> {
        let mut out = Vec::new();
        for (&degree, ids) in &self.degrees {
            for id in ids {
                let label = self.labels.get(id).cloned().unwrap_or_default();
                if let Some(a) = label.action {
                    if !a.is_finite() {
                        return Err(FormatError::NotFinite { what: format!("action of {id:?}"), value: a });
                    }
                }
                out.push(Generator {
                    id: id.clone(),
                    degree,
                    label: Label { action: label.action, class: label.class },
                });
            }
        }
        for id in self.labels.keys() {
            if !out.iter().any(|g| &g.id == id) {
                return Err(FormatError::Label { id: id.clone(), reason: "unknown generator" });
            }
        }
        Ok(out)
    }

    /// Build without checking `∂² = 0`.
    pub fn build_unchecked(&self) -> Result<GradedF2Complex, FormatError> {
        let mut b = ComplexBuilder::new();
        for g in self.generators()? {
            b.push(g);
        }
        for (id, targets) in &self.boundary {
            b.boundary(id, targets.iter().cloned());
        }
        Ok(b.build()?)
    }

    pub fn to_complex(&self) -> Result<GradedF2Complex, FormatError> {
        let c = self.build_unchecked()?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_rf_input(&self) -> Result<RfInput, FormatError> {
        Ok(RfInput { generators: self.generators()?, boundary: self.boundary.clone() })
    }

    pub fn from_rf_input(input: &RfInput) -> Self {
        let mut out = ComplexJson::default();
        let mut gens = input.generators.clone();
        gens.sort_by_key(|g| g.degree);
        for g in gens {
            out.degrees.entry(g.degree).or_default().push(g.id.clone());
            if !g.label.is_empty() {
                out.labels.insert(g.id.clone(), LabelJson { action: g.label.action, class: g.label.class.clone() });
            }
        }
        out.boundary =
            input.boundary.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| (k.clone(), v.clone())).collect();
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMapJson {
    pub shift: i64,
    #[serde(default)]
    pub images: BTreeMap<String, Vec<String>>,
}

impl ChainMapJson {
    pub fn from_map(f: &LinearMap) -> Self {
        let images = (0..f.source().len())
            .filter(|&i| !f.image_of(i).is_empty())
            .map(|i| (f.source().id(i).to_string(), f.image_ids(i)))
            .collect();
        ChainMapJson { shift: f.shift(), images }
    }

    pub fn to_map(&self, source: Arc<GradedF2Complex>, target: Arc<GradedF2Complex>) -> Result<LinearMap, FormatError> {
        let images = self.images.iter().map(|(s, t)| (s.as_str(), t.iter().map(String::as_str).collect()));
        Ok(LinearMap::from_ids(source, target, self.shift, images)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPointJson {
    pub id: String,
    pub index: u32,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseJson {
    pub n: u32,
    pub critical_points: Vec<CriticalPointJson>,
    #[serde(default)]
    pub boundary_counts: BTreeMap<String, u8>,
    pub euler: u8,
}

fn bit(field: &str, value: u8) -> Result<bool, FormatError> {
    match value {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(FormatError::Bit { field: field.into(), value }),
    }
}

impl MorseJson {
    pub fn from_data(d: &MorseData) -> Self {
        MorseJson {
            n: d.n,
            critical_points: d
                .critical_points
                .iter()
                .map(|c| CriticalPointJson { id: c.id.clone(), index: c.index, value: c.value })
                .collect(),
            boundary_counts: d.boundary_counts.iter().map(|((a, b), &v)| (format!("{a}|{b}"), v)).collect(),
            euler: d.euler as u8,
        }
    }

    /// Convert without the Morse-theoretic validation, which the consumers
    /// perform themselves.
    pub fn to_data(&self) -> Result<MorseData, FormatError> {
        let mut critical_points = Vec::with_capacity(self.critical_points.len());
        for c in &self.critical_points {
            if c.id.contains('|') {
                return Err(FormatError::PipeInId(c.id.clone()));
            }
            if !c.value.is_finite() {
                return Err(FormatError::NotFinite { what: format!("value of {:?}", c.id), value: c.value });
            }
            critical_points.push(CriticalPoint { id: c.id.clone(), index: c.index, value: c.value });
        }
        let mut boundary_counts = BTreeMap::new();
        for (key, &v) in &self.boundary_counts {
            let Some((a, b)) = key.split_once('|') else {
                return Err(FormatError::CountKey(key.clone()));
            };
            if b.contains('|') {
                return Err(FormatError::CountKey(key.clone()));
            }
            bit(&format!("boundary_counts[{key:?}]"), v)?;
            boundary_counts.insert((a.to_string(), b.to_string()), v);
        }
        Ok(MorseData { n: self.n, critical_points, boundary_counts, euler: bit("euler", self.euler)? })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitJson {
    pub id: String,
    pub energy: f64,
    pub aux: f64,
    pub ind_plus: u32,
    pub ind_minus: u32,
    pub class: String,
}

/// A Rabinowitz-Floer model: the complex format of `RF` extended by the
/// critical point strata, the class involution, the coefficients of `Φ`,
/// `Ψ` and optionally `P`, and the loop space Betti numbers per class.
///
/// The complex part and the coefficients may be absent, in which case the
/// file only describes energy data, as accepted by `rf synth`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub constant: MorseJson,
    #[serde(default)]
    pub orbits: Vec<OrbitJson>,
    #[serde(default)]
    pub energy_boundary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub coenergy_boundary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub class_negation: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub loop_betti: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<BTreeMap<i64, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, LabelJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<BTreeMap<String, Vec<String>>>,
}

impl ModelJson {
    pub fn from_data(d: &EnergyCritData) -> Self {
        ModelJson {
            constant: MorseJson::from_data(&d.constant),
            orbits: d
                .orbits
                .iter()
                .map(|o| OrbitJson {
                    id: o.id.clone(),
                    energy: o.energy,
                    aux: o.aux,
                    ind_plus: o.ind_plus,
                    ind_minus: o.ind_minus,
                    class: o.class.clone(),
                })
                .collect(),
            energy_boundary: d.energy_boundary.clone(),
            coenergy_boundary: d.coenergy_boundary.clone(),
            class_negation: d.class_negation.clone(),
            loop_betti: BTreeMap::new(),
            degrees: None,
            boundary: None,
            labels: None,
            phi: None,
            psi: None,
            p: None,
        }
    }

    pub fn data(&self) -> Result<EnergyCritData, FormatError> {
        let mut orbits = Vec::with_capacity(self.orbits.len());
        for o in &self.orbits {
            for (what, v) in [("energy", o.energy), ("aux", o.aux)] {
                if !v.is_finite() {
                    return Err(FormatError::NotFinite { what: format!("{what} of {:?}", o.id), value: v });
                }
            }
            orbits.push(ClosedOrbit {
                id: o.id.clone(),
                energy: o.energy,
                aux: o.aux,
                ind_plus: o.ind_plus,
                ind_minus: o.ind_minus,
                class: o.class.clone(),
            });
        }
        Ok(EnergyCritData {
            constant: self.constant.to_data()?,
            orbits,
            energy_boundary: self.energy_boundary.clone(),
            coenergy_boundary: self.coenergy_boundary.clone(),
            class_negation: self.class_negation.clone(),
        })
    }

    pub fn complex(&self) -> Result<ComplexJson, FormatError> {
        Ok(ComplexJson {
            degrees: self.degrees.clone().ok_or(FormatError::Missing("\"degrees\""))?,
            boundary: self.boundary.clone().unwrap_or_default(),
            labels: self.labels.clone().unwrap_or_default(),
        })
    }

    pub fn set_complex(&mut self, c: ComplexJson) {
        self.degrees = Some(c.degrees);
        self.boundary = Some(c.boundary);
        self.labels = Some(c.labels);
    }
}

/// Coefficients of `Φ`, `Ψ` and `P` supplied apart from the model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsJson {
    pub phi: BTreeMap<String, Vec<String>>,
    pub psi: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<BTreeMap<String, Vec<String>>>,
}

impl ModelJson {
    pub fn with_maps(mut self, m: MapsJson) -> Self {
        self.phi = Some(m.phi);
        self.psi = Some(m.psi);
        self.p = m.p;
        self
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn complex_round_trip_is_exact() {
        let text = r#"{
  "degrees": {"-1": ["w"], "0": ["a", "b"], "1": ["c"]},
  "boundary": {"c": ["a", "b"]},
  "labels": {"a": {"action": 0.1, "class": "0"}, "c": {"action": 2.718281828459045}}
}"#;
        let c = parse::<ComplexJson>(text).unwrap().to_complex().unwrap();
        let once = to_string(&ComplexJson::from_complex(&c));
        let again = parse::<ComplexJson>(&once).unwrap().to_complex().unwrap();
        assert_eq!(c, again);
        assert_eq!(once, to_string(&ComplexJson::from_complex(&again)));
        assert_eq!(again.generator(again.index_of("c").unwrap()).label.action, Some(std::f64::consts::E));
    }

    #[test]
    fn boundary_square_is_rejected() {
        let text = r#"{"degrees": {"0": ["a"], "1": ["b"], "2": ["c"]}, "boundary": {"c": ["b"], "b": ["a"]}}"#;
        let e = parse::<ComplexJson>(text).unwrap().to_complex().unwrap_err();
        assert!(matches!(e, FormatError::Complex(ComplexError::BoundarySquare { .. })), "{e}");
    }

    #[test]
    fn morse_counts_use_pipe_keys() {
        let text = r#"{"n": 2, "critical_points": [{"id": "m", "index": 0, "value": 0.0},
            {"id": "a", "index": 1, "value": 1.0}, {"id": "x", "index": 2, "value": 2.0}],
            "boundary_counts": {"x|a": 0}, "euler": 1}"#;
        let j: MorseJson = parse(text).unwrap();
        let d = j.to_data().unwrap();
        assert_eq!(d.boundary_counts.get(&("x".to_string(), "a".to_string())), Some(&0));
        assert_eq!(MorseJson::from_data(&d), j);
        let mut bad = j.clone();
        bad.euler = 2;
        assert!(matches!(bad.to_data(), Err(FormatError::Bit { .. })));
        let mut bad = j;
        bad.boundary_counts.insert("xa".into(), 1);
        assert!(matches!(bad.to_data(), Err(FormatError::CountKey(_))));
    }

    #[test]
    fn chain_map_round_trip() {
        let c = Arc::new(
            parse::<ComplexJson>(r#"{"degrees": {"0": ["a", "b"], "1": ["c"]}, "boundary": {"c": ["a", "b"]}}"#)
                .unwrap()
                .to_complex()
                .unwrap(),
        );
        let j: ChainMapJson = parse(r#"{"shift": 0, "images": {"a": ["b"], "b": ["a"], "c": ["c"]}}"#).unwrap();
        let f = j.to_map(c.clone(), c.clone()).unwrap();
        assert_eq!(ChainMapJson::from_map(&f), j);
        let bad: ChainMapJson = parse(r#"{"shift": 0, "images": {"a": ["c"]}}"#).unwrap();
        assert!(matches!(bad.to_map(c.clone(), c), Err(FormatError::Map(MapError::DegreeMismatch { .. }))));
    }
}
