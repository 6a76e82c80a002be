use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::complex::{ComplexBuilder, Generator, GradedF2Complex, Label};
use crate::error::ComplexError;

use super::data::{CritPoint, EnergyCritData};
use super::RfError;

pub fn plus_id(id: &str) -> String {
    format!("Z+({id})")
}

pub fn minus_id(id: &str) -> String {
    format!("Z-({id})")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// Action and auxiliary value of a generator; the filtration order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderKey {
    pub action: f64,
    pub aux: f64,
}

impl OrderKey {
    pub fn cmp(&self, other: &OrderKey) -> Ordering {
        self.action.total_cmp(&other.action).then(self.aux.total_cmp(&other.aux))
    }
}

/// Generators and boundary of a Rabinowitz-Floer complex as supplied.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RfInput {
    pub generators: Vec<Generator>,
    pub boundary: BTreeMap<String, Vec<String>>,
}

/// A validated model: the critical point data, the Morse complexes
/// `X = M_*(E, e)` and `Z = M^{1−*}(E, −e)`, and the Rabinowitz-Floer
/// complex with its filtration.
#[derive(Clone, Debug)]
pub struct RFModel {
    pub data: EnergyCritData,
    pub points: Vec<CritPoint>,
    pub x: Arc<GradedF2Complex>,
    pub z: Arc<GradedF2Complex>,
    pub rf: Arc<GradedF2Complex>,
    rf_plus: Vec<usize>,
    rf_minus: Vec<usize>,
    x_of: Vec<usize>,
    z_of: Vec<usize>,
    point_of_rf: Vec<(usize, Sign)>,
    point_of_x: Vec<usize>,
    point_of_z: Vec<usize>,
    keys: Vec<OrderKey>,
    rank: Vec<usize>,
}

pub(crate) fn key_of(p: &CritPoint, s: Sign) -> OrderKey {
    match (s, p.constant) {
        (Sign::Plus, true) => OrderKey { action: 0.0, aux: p.aux + 0.5 },
        (Sign::Minus, true) => OrderKey { action: 0.0, aux: p.aux },
        (Sign::Plus, false) => OrderKey { action: p.action(), aux: p.aux },
        (Sign::Minus, false) => OrderKey { action: -p.action(), aux: p.aux },
    }
}

fn grading(p: &CritPoint, s: Sign) -> i64 {
    match s {
        Sign::Plus => p.ind_plus,
        Sign::Minus => 1 - p.ind_minus,
    }
}

/// The generators `Z^±(γ)` with their gradings, actions and classes.
pub fn rf_generators(data: &EnergyCritData) -> Vec<Generator> {
    let mut out = Vec::new();
    for p in data.critical_points() {
        for s in [Sign::Plus, Sign::Minus] {
            let (id, class) = match s {
                Sign::Plus => (plus_id(&p.id), p.class.clone()),
                Sign::Minus => (minus_id(&p.id), data.negate(&p.class)),
            };
            out.push(Generator {
                id,
                degree: grading(&p, s),
                label: Label { action: Some(key_of(&p, s).action), class: Some(class) },
            });
        }
    }
    out
}

/// Sort and cancel repeated ids in pairs.
fn xor_sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    let mut out: Vec<String> = Vec::new();
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= 1e-9 * libm::fmax(1.0, libm::fabs(a))
}

/// Validate the data and the supplied complex: census of gradings, labels,
/// classes, strict decrease of the filtration along the boundary, the
/// prescribed zero-action part of the boundary and `∂² = 0`.
pub fn build_rf_model(data: &EnergyCritData, input: &RfInput) -> Result<RFModel, RfError> {
    let v = data.validate()?;
    let expected = rf_generators(data);
    let expected_by_id: BTreeMap<&str, &Generator> = expected.iter().map(|g| (g.id.as_str(), g)).collect();
    let mut supplied: BTreeMap<&str, &Generator> = BTreeMap::new();
    for g in &input.generators {
        let Some(e) = expected_by_id.get(g.id.as_str()) else {
            return Err(RfError::Census { generator: g.id.clone(), expected: None, found: Some(g.degree) });
        };
        if supplied.insert(g.id.as_str(), g).is_some() {
            return Err(RfError::Complex { complex: "rf", source: ComplexError::DuplicateId(g.id.clone()) });
        }
        if g.degree != e.degree {
            return Err(RfError::Census { generator: g.id.clone(), expected: Some(e.degree), found: Some(g.degree) });
        }
        if let Some(a) = g.label.action {
            if !close(a, e.label.action.unwrap()) {
                return Err(RfError::Label { generator: g.id.clone(), reason: "action differs from ±sqrt(E)" });
            }
        }
        if let Some(c) = &g.label.class {
            if Some(c) != e.label.class.as_ref() {
                return Err(RfError::Label { generator: g.id.clone(), reason: "class differs from the data" });
            }
        }
    }
    if let Some(e) = expected.iter().find(|e| !supplied.contains_key(e.id.as_str())) {
        return Err(RfError::Census { generator: e.id.clone(), expected: Some(e.degree), found: None });
    }

    let mut sign_of: BTreeMap<&str, (usize, Sign)> = BTreeMap::new();
    for i in 0..v.points.len() {
        sign_of.insert(expected[2 * i].id.as_str(), (i, Sign::Plus));
        sign_of.insert(expected[2 * i + 1].id.as_str(), (i, Sign::Minus));
    }
    let info = |id: &str| sign_of.get(id).map(|&(i, s)| (&v.points[i], s));
    let class_of = |id: &str| expected_by_id[id].label.class.clone();
    for (from, targets) in &input.boundary {
        let Some((p, s)) = info(from) else {
            return Err(RfError::Complex {
                complex: "rf",
                source: ComplexError::UnknownGenerator { from: from.clone(), id: from.clone() },
            });
        };
        let kp = key_of(p, s);
        for to in targets {
            let Some((q, t)) = info(to) else {
                return Err(RfError::Complex {
                    complex: "rf",
                    source: ComplexError::UnknownGenerator { from: from.clone(), id: to.clone() },
                });
            };
            if key_of(q, t).cmp(&kp) != Ordering::Less {
                return Err(RfError::Filtration { generator: from.clone(), target: to.clone() });
            }
            if class_of(to) != class_of(from) {
                return Err(RfError::Class { generator: from.clone(), target: to.clone() });
            }
        }
    }
    let empty = Vec::new();
    for (i, p) in v.points.iter().enumerate() {
        if !p.constant {
            continue;
        }
        let bd = data.constant.boundary_ids(&p.id);
        for (k, s) in [(2 * i, Sign::Plus), (2 * i + 1, Sign::Minus)] {
            let id = &expected[k].id;
            let targets = input.boundary.get(id).unwrap_or(&empty);
            let found =
                xor_sorted(targets.iter().filter(|t| info(t).is_some_and(|(q, _)| q.constant)).cloned().collect());
            let mut expect: Vec<String> = match s {
                Sign::Plus => bd.iter().map(|q| plus_id(q)).collect(),
                Sign::Minus => bd.iter().map(|q| minus_id(q)).collect(),
            };
            if s == Sign::Minus && p.id == data.constant.q_max() && data.euler() {
                expect.push(plus_id(data.constant.q_min()));
            }
            let expect = xor_sorted(expect);
            if found != expect {
                return Err(RfError::PartialProp { generator: id.clone(), expected: expect, found });
            }
        }
    }

    let mut b = ComplexBuilder::new();
    for g in &expected {
        b.push(g.clone());
    }
    for (from, targets) in &input.boundary {
        b.boundary(from, targets.iter().cloned());
    }
    let rf = b.build().map_err(|e| match e {
        ComplexError::BoundarySquare { generator, image } => RfError::BoundarySquare { generator, image },
        source => RfError::Complex { complex: "rf", source },
    })?;
    Ok(RFModel::assemble(data.clone(), v.points, v.x, v.z, Arc::new(rf)))
}

impl RFModel {
    fn assemble(
        data: EnergyCritData,
        points: Vec<CritPoint>,
        x: Arc<GradedF2Complex>,
        z: Arc<GradedF2Complex>,
        rf: Arc<GradedF2Complex>,
    ) -> RFModel {
        let np = points.len();
        let mut rf_plus = alloc::vec![0; np];
        let mut rf_minus = alloc::vec![0; np];
        let mut x_of = alloc::vec![0; np];
        let mut z_of = alloc::vec![0; np];
        let mut point_of_rf = alloc::vec![(0, Sign::Plus); rf.len()];
        let mut point_of_x = alloc::vec![0; np];
        let mut point_of_z = alloc::vec![0; np];
        let mut keys = alloc::vec![OrderKey { action: 0.0, aux: 0.0 }; rf.len()];
        for (i, p) in points.iter().enumerate() {
            let (a, b) = (rf.index_of(&plus_id(&p.id)).unwrap(), rf.index_of(&minus_id(&p.id)).unwrap());
            rf_plus[i] = a;
            rf_minus[i] = b;
            point_of_rf[a] = (i, Sign::Plus);
            point_of_rf[b] = (i, Sign::Minus);
            keys[a] = key_of(p, Sign::Plus);
            keys[b] = key_of(p, Sign::Minus);
            x_of[i] = x.index_of(&p.id).unwrap();
            z_of[i] = z.index_of(&p.id).unwrap();
            point_of_x[x_of[i]] = i;
            point_of_z[z_of[i]] = i;
        }
        let mut order: Vec<usize> = (0..rf.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then_with(|| rf.id(a).cmp(rf.id(b))));
        let mut rank = alloc::vec![0; rf.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        RFModel {
            data,
            points,
            x,
            z,
            rf,
            rf_plus,
            rf_minus,
            x_of,
            z_of,
            point_of_rf,
            point_of_x,
            point_of_z,
            keys,
            rank,
        }
    }

    pub fn n(&self) -> u32 {
        self.data.n()
    }

    pub fn chi(&self) -> bool {
        self.data.euler()
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn q_min(&self) -> usize {
        self.point_index(self.data.constant.q_min()).unwrap()
    }

    pub fn q_max(&self) -> usize {
        self.point_index(self.data.constant.q_max()).unwrap()
    }

    pub fn rf_plus(&self, point: usize) -> usize {
        self.rf_plus[point]
    }

    pub fn rf_minus(&self, point: usize) -> usize {
        self.rf_minus[point]
    }

    pub fn x_index(&self, point: usize) -> usize {
        self.x_of[point]
    }

    pub fn z_index(&self, point: usize) -> usize {
        self.z_of[point]
    }

    pub fn point_of_rf(&self, i: usize) -> (usize, Sign) {
        self.point_of_rf[i]
    }

    pub fn point_of_x(&self, i: usize) -> usize {
        self.point_of_x[i]
    }

    pub fn point_of_z(&self, i: usize) -> usize {
        self.point_of_z[i]
    }

    pub fn key(&self, i: usize) -> OrderKey {
        self.keys[i]
    }

    pub fn action(&self, i: usize) -> f64 {
        self.keys[i].action
    }

    /// `a ≺ b` in the total order: filtration, then id.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    /// `a` lies strictly below `b` in the filtration.
    pub fn strictly_below(&self, a: usize, b: usize) -> bool {
        self.keys[a].cmp(&self.keys[b]) == Ordering::Less
    }

    /// RF generators in increasing total order.
    pub fn order(&self) -> Vec<usize> {
        let mut o: Vec<usize> = (0..self.rf.len()).collect();
        o.sort_by_key(|&i| self.rank[i]);
        o
    }

    pub fn is_negative(&self, i: usize) -> bool {
        self.point_of_rf[i].1 == Sign::Minus
    }

    pub fn rf_class(&self, i: usize) -> &str {
        self.rf.generator(i).label.class.as_deref().unwrap_or(super::CONTRACTIBLE)
    }

    pub fn point_class(&self, point: usize) -> &str {
        &self.points[point].class
    }
}
