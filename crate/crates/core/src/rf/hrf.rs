use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::complex::GradedF2Complex;
use crate::homology::{homology, HomologySummary};
use crate::map::{verify_chain_map, ChainMap, LinearMap};

use super::maps::iso_in_degrees;
use super::model::RFModel;
use super::theorem::RfMapSet;
use super::{RfError, CONTRACTIBLE};

pub fn compute_hrf(model: &RFModel) -> HomologySummary {
    homology(&model.rf)
}

fn classes(model: &RFModel) -> Vec<String> {
    let s: BTreeSet<String> = (0..model.rf.len()).map(|i| String::from(model.rf_class(i))).collect();
    s.into_iter().collect()
}

fn restrict(c: &GradedF2Complex, class: &str) -> Result<GradedF2Complex, RfError> {
    c.subquotient(|g| g.label.class.as_deref().unwrap_or(CONTRACTIBLE) == class)
        .map_err(|source| RfError::Complex { complex: "class summand", source })
}

/// `HRF` split by free homotopy class.
pub fn compute_hrf_by_class(model: &RFModel) -> Result<BTreeMap<String, HomologySummary>, RfError> {
    let mut out = BTreeMap::new();
    for c in classes(model) {
        out.insert(c.clone(), homology(&restrict(&model.rf, &c)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HrfRow {
    pub class: String,
    pub degree: i64,
    pub expected: i64,
    pub computed: i64,
}

impl HrfRow {
    pub fn ok(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HrfReport {
    pub rows: Vec<HrfRow>,
    /// Classes whose Morse homology of `M_*(E, e)` and `M^*(E, −e)`
    /// disagrees with the supplied loop space Betti numbers.
    pub inconsistent_classes: Vec<String>,
}

impl HrfReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(HrfRow::ok) && self.inconsistent_classes.is_empty()
    }
}

fn get(b: &[usize], k: i64) -> i64 {
    if k < 0 {
        0
    } else {
        b.get(k as usize).copied().unwrap_or(0) as i64
    }
}

/// Compare `HRF^c_k` with `b_k(Λ^c) + b_{1−k}(Λ^{−c})`, lowered by one in
/// degrees 0 and 1 on the contractible class when `χ ≠ 0`.
pub fn compare_hrf_table(model: &RFModel, loop_betti: &BTreeMap<String, Vec<usize>>) -> Result<HrfReport, RfError> {
    let by_class = compute_hrf_by_class(model)?;
    let mut all: BTreeSet<String> = by_class.keys().cloned().collect();
    all.extend(loop_betti.keys().cloned());
    let empty = Vec::new();
    let mut rows = Vec::new();
    let mut inconsistent = Vec::new();
    for c in &all {
        let neg = model.data.negate(c);
        let b = loop_betti.get(c).unwrap_or(&empty);
        let bn = loop_betti.get(&neg).unwrap_or(&empty);
        let (wlo, whi) = model.rf.window().unwrap_or((0, 0));
        let lo = wlo.min(1 - bn.len() as i64);
        let hi = whi.max(b.len() as i64 - 1).max(1);
        let h = by_class.get(c);
        for k in lo..=hi {
            let mut expected = get(b, k) + get(bn, 1 - k);
            if c == CONTRACTIBLE && model.chi() && (k == 0 || k == 1) {
                expected -= 1;
            }
            let computed = h.map_or(0, |h| h.betti(k) as i64);
            rows.push(HrfRow { class: c.clone(), degree: k, expected, computed });
        }
        let hx = homology(&restrict(&model.x, c)?);
        let hz = homology(&restrict(&model.z, c)?);
        let top = b.len() as i64 + model.x.window().map_or(0, |w| w.1) + 1;
        let consistent = (0..top).all(|k| hx.betti(k) as i64 == get(b, k) && hz.betti(1 - k) as i64 == get(b, k))
            && hx.betti_table().keys().all(|&k| k >= 0)
            && hz.betti_table().keys().all(|&k| k <= 1);
        if !consistent {
            inconsistent.push(c.clone());
        }
    }
    Ok(HrfReport { rows, inconsistent_classes: inconsistent })
}

/// An interval of action values with open or closed ends; infinite ends
/// are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ActionInterval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        ActionInterval { lo, hi, lo_closed: lo.is_finite(), hi_closed: hi.is_finite() }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        ActionInterval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn all() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, a: f64) -> bool {
        let above = if self.lo_closed { a >= self.lo } else { a > self.lo };
        let below = if self.hi_closed { a <= self.hi } else { a < self.hi };
        above && below
    }
}

/// `RF^I`: generators with action in `I`, with the induced boundary.
pub fn filter_by_action(model: &RFModel, interval: ActionInterval) -> Result<GradedF2Complex, RfError> {
    model
        .rf
        .subquotient(|g| interval.contains(g.label.action.unwrap_or(0.0)))
        .map_err(|source| RfError::Complex { complex: "action window", source })
}

/// The natural map `RF^I → RF^J` sending each generator to itself when it
/// lies in `J` and to zero otherwise. It is a chain map when `J` lies
/// above `I`.
pub fn filter_map(model: &RFModel, from: ActionInterval, to: ActionInterval) -> Result<ChainMap, RfError> {
    let s = alloc::sync::Arc::new(filter_by_action(model, from)?);
    let t = alloc::sync::Arc::new(filter_by_action(model, to)?);
    let images: Vec<Vec<usize>> = (0..s.len()).map(|i| t.index_of(s.id(i)).into_iter().collect()).collect();
    let f = LinearMap::from_indices(s, t, 0, images)?;
    verify_chain_map(&f).map_err(|witness| RfError::NotChainMap { map: "action window map", witness })?;
    Ok(f)
}

/// The positive part of `Φ` and the negative part of `Ψ` are chain
/// isomorphisms `M^{(0,∞)}_*(E, e) → RF^{(0,∞)}` and
/// `RF^{(−∞,0)} → M_{(0,∞)}^{1−*}(E, −e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitIsomorphisms {
    pub positive: bool,
    pub negative: bool,
}

pub fn positive_negative_isomorphisms(model: &RFModel, maps: &RfMapSet) -> Result<SplitIsomorphisms, RfError> {
    use alloc::sync::Arc;
    let wrap = |source| RfError::Complex { complex: "energy window", source };
    let xp = Arc::new(model.x.subquotient(|g| g.label.action.unwrap_or(0.0) > 0.0).map_err(wrap)?);
    let zp = Arc::new(model.z.subquotient(|g| g.label.action.unwrap_or(0.0) < 0.0).map_err(wrap)?);
    let rp = Arc::new(filter_by_action(model, ActionInterval::open(0.0, f64::INFINITY))?);
    let rn = Arc::new(filter_by_action(model, ActionInterval::open(f64::NEG_INFINITY, 0.0))?);
    let project = |f: &LinearMap, i: usize, t: &GradedF2Complex| -> Vec<usize> {
        f.image_ids(i).iter().filter_map(|id| t.index_of(id)).collect()
    };
    let pos: Vec<Vec<usize>> =
        (0..xp.len()).map(|i| project(&maps.phi, model.x.index_of(xp.id(i)).unwrap(), &rp)).collect();
    let pos = LinearMap::from_indices(xp, rp, 0, pos)?;
    let neg: Vec<Vec<usize>> =
        (0..rn.len()).map(|i| project(&maps.psi, model.rf.index_of(rn.id(i)).unwrap(), &zp)).collect();
    let neg = LinearMap::from_indices(rn, zp, 0, neg)?;
    Ok(SplitIsomorphisms {
        positive: verify_chain_map(&pos).is_ok() && iso_in_degrees(&pos, |_| true),
        negative: verify_chain_map(&neg).is_ok() && iso_in_degrees(&neg, |_| true),
    })
}
