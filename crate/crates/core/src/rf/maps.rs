use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Mismatch;
use crate::f2::{same_span, F2Vec};
use crate::map::{solve_chain_homotopy, verify_chain_map, ChainHomotopy, ChainMap, LinearMap};

use super::model::{plus_id, RFModel, Sign};
use super::RfError;

fn coefficient(map: &'static str, source_id: &str, target: &str, reason: &'static str) -> RfError {
    RfError::Coefficient { map, source_id: source_id.into(), target: target.into(), reason }
}

/// `Φγ = Z^+(γ) + Σ n_Φ(γ, w) w`, from the correction terms per `γ`.
pub fn assemble_phi(model: &RFModel, coeffs: &BTreeMap<String, Vec<String>>) -> Result<ChainMap, RfError> {
    let mut images: Vec<Vec<usize>> =
        (0..model.x.len()).map(|i| alloc::vec![model.rf_plus(model.point_of_x(i))]).collect();
    for (src, targets) in coeffs {
        let Some(point) = model.point_index(src) else {
            return Err(coefficient("Φ", src, "", "unknown source"));
        };
        let lead = model.rf_plus(point);
        let p = &model.points[point];
        for t in targets {
            let Some(w) = model.rf.index_of(t) else {
                return Err(coefficient("Φ", src, t, "unknown target"));
            };
            if w == lead {
                return Err(coefficient("Φ", src, t, "leading term Z^+ is implicit"));
            }
            if !model.precedes(w, lead) {
                return Err(coefficient("Φ", src, t, "target must lie below Z^+ in the filtration"));
            }
            if p.constant && model.action(w) >= 0.0 {
                return Err(coefficient("Φ", src, t, "correction of a constant must have negative action"));
            }
            if model.rf.degree(w) != p.ind_plus {
                return Err(coefficient("Φ", src, t, "degree differs"));
            }
            if model.rf_class(w) != p.class {
                return Err(coefficient("Φ", src, t, "class differs"));
            }
            images[model.x_index(point)].push(w);
        }
    }
    let phi = LinearMap::from_indices(model.x.clone(), model.rf.clone(), 0, images)?;
    verify_chain_map(&phi).map_err(|witness| RfError::NotChainMap { map: "Φ", witness })?;
    Ok(phi)
}

/// `Φ̂` vanishes on `RF⁻` and `Φ̂ Z^+(γ) = γ + Σ n_Φ(γ, w) Φ̂w`, solved in
/// increasing filtration order.
pub fn derive_phi_hat(model: &RFModel, phi: &ChainMap) -> Result<LinearMap, RfError> {
    let mut table: Vec<Option<Vec<usize>>> = alloc::vec![None; model.rf.len()];
    for i in model.order() {
        let (point, sign) = model.point_of_rf(i);
        if sign == Sign::Minus {
            table[i] = Some(Vec::new());
            continue;
        }
        let xi = model.x_index(point);
        let mut v = F2Vec::unit(model.x.len(), xi);
        for &w in phi.image_of(xi) {
            if w == i {
                continue;
            }
            let Some(img) = &table[w] else {
                return Err(coefficient(
                    "Φ",
                    &model.points[point].id,
                    model.rf.id(w),
                    "target must lie below Z^+ in the filtration",
                ));
            };
            v.add_assign(&F2Vec::from_indices(model.x.len(), img.iter().copied()));
        }
        table[i] = Some(v.support().to_vec());
    }
    Ok(LinearMap::from_indices(model.rf.clone(), model.x.clone(), 0, table.into_iter().map(Option::unwrap).collect())?)
}

/// `ΨZ^-(γ) = γ + Σ n_Ψ(γ, β) β` with `β ≻ γ`, and `ΨZ^+(γ)` as given.
pub fn assemble_psi(model: &RFModel, coeffs: &BTreeMap<String, Vec<String>>) -> Result<ChainMap, RfError> {
    let mut images: Vec<Vec<usize>> = alloc::vec![Vec::new(); model.rf.len()];
    for (point, _) in model.points.iter().enumerate() {
        images[model.rf_minus(point)].push(model.z_index(point));
    }
    for (src, targets) in coeffs {
        let Some(i) = model.rf.index_of(src) else {
            return Err(coefficient("Ψ", src, "", "unknown source"));
        };
        let (point, sign) = model.point_of_rf(i);
        let p = &model.points[point];
        for t in targets {
            let Some(b) = model.point_index(t) else {
                return Err(coefficient("Ψ", src, t, "unknown target"));
            };
            let q = &model.points[b];
            if sign == Sign::Minus {
                if b == point {
                    return Err(coefficient("Ψ", src, t, "leading term is implicit"));
                }
                if cmp_psi(q, p) != Ordering::Greater {
                    return Err(coefficient("Ψ", src, t, "target must lie above the source in (E, -e)"));
                }
            }
            if 1 - q.ind_minus != model.rf.degree(i) {
                return Err(coefficient("Ψ", src, t, "degree differs"));
            }
            if q.class != model.data.negate(model.rf_class(i)) {
                return Err(coefficient("Ψ", src, t, "class differs"));
            }
            images[i].push(model.z_index(b));
        }
    }
    let psi = LinearMap::from_indices(model.rf.clone(), model.z.clone(), 0, images)?;
    verify_chain_map(&psi).map_err(|witness| RfError::NotChainMap { map: "Ψ", witness })?;
    Ok(psi)
}

fn cmp_psi(a: &super::CritPoint, b: &super::CritPoint) -> Ordering {
    a.cmp_coenergy(b).then_with(|| a.id.cmp(&b.id))
}

/// `Ψ̂γ = Z^-(γ) + Σ n_Ψ̂(γ, β) Z^-(β)` with
/// `n_Ψ̂(γ, β) = n_Ψ(γ, β) + Σ_{γ≺α≺β} n_Ψ̂(γ, α) n_Ψ(α, β)`.
pub fn derive_psi_hat(model: &RFModel, psi: &ChainMap) -> Result<LinearMap, RfError> {
    let np = model.points.len();
    let mut order: Vec<usize> = (0..np).collect();
    order.sort_by(|&a, &b| cmp_psi(&model.points[a], &model.points[b]));
    let mut pos = alloc::vec![0; np];
    for (r, &i) in order.iter().enumerate() {
        pos[i] = r;
    }
    let mut n = alloc::vec![alloc::vec![false; np]; np];
    for (a, &pa) in order.iter().enumerate() {
        for &zi in psi.image_of(model.rf_minus(pa)) {
            let b = pos[model.point_of_z(zi)];
            if b == a {
                continue;
            }
            if b < a {
                let (s, t) = (&model.points[pa].id, &model.points[order[b]].id);
                return Err(coefficient("Ψ", s, t, "target must lie above the source in (E, -e)"));
            }
            n[a][b] = true;
        }
    }
    let mut images = alloc::vec![Vec::new(); model.z.len()];
    for (a, &pa) in order.iter().enumerate() {
        let mut nh = alloc::vec![false; np];
        for b in a + 1..np {
            let mut v = n[a][b];
            for c in a + 1..b {
                v ^= nh[c] & n[c][b];
            }
            nh[b] = v;
        }
        let mut img = alloc::vec![model.rf_minus(pa)];
        img.extend((a + 1..np).filter(|&b| nh[b]).map(|b| model.rf_minus(order[b])));
        images[model.z_index(pa)] = img;
    }
    Ok(LinearMap::from_indices(model.z.clone(), model.rf.clone(), 0, images)?)
}

fn negative_span(model: &RFModel) -> Vec<F2Vec> {
    (0..model.rf.len()).filter(|&i| model.is_negative(i)).map(|i| F2Vec::unit(model.rf.len(), i)).collect()
}

/// Isomorphism in every degree of the window selected by `keep`.
pub(crate) fn iso_in_degrees(f: &LinearMap, keep: impl Fn(i64) -> bool) -> bool {
    let mut degrees: Vec<i64> = f.source().degrees().chain(f.target().degrees().map(|k| k - f.shift())).collect();
    degrees.sort();
    degrees.dedup();
    degrees.into_iter().filter(|&k| keep(k)).all(|k| {
        let m = f.matrix(k);
        m.rows() == m.cols() && m.rank() == m.cols()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiReport {
    /// `Φ̂Φ = Id`, or the first generator where it fails.
    pub left_inverse: Option<Mismatch>,
    pub kernel_is_negative: bool,
    /// `Φ: M_k → RF_k` is bijective for `k ≥ 2`.
    pub iso_high: bool,
}

impl PhiReport {
    pub fn all_pass(&self) -> bool {
        self.left_inverse.is_none() && self.kernel_is_negative && self.iso_high
    }
}

pub fn phi_report(model: &RFModel, phi: &ChainMap, phi_hat: &LinearMap) -> Result<PhiReport, RfError> {
    let left_inverse = phi_hat.compose(phi)?.first_difference(&LinearMap::identity(model.x.clone()))?;
    let kernel = phi_hat.global_matrix().kernel_basis();
    let kernel_is_negative = same_span(model.rf.len(), &kernel, &negative_span(model));
    Ok(PhiReport { left_inverse, kernel_is_negative, iso_high: iso_in_degrees(phi, |k| k >= 2) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiReport {
    /// `ΨΨ̂ = Id`, or the first generator where it fails.
    pub right_inverse: Option<Mismatch>,
    pub image_is_negative: bool,
    /// `Ψ: RF_k → M^{1−k}` is bijective for `k ≤ −1`.
    pub iso_low: bool,
    /// Whether `Ψ̂` happens to be a chain map, which is the case exactly
    /// when `RF⁻` is a subcomplex.
    pub psi_hat_chain_map: bool,
}

impl PsiReport {
    pub fn all_pass(&self) -> bool {
        self.right_inverse.is_none() && self.image_is_negative && self.iso_low
    }
}

pub fn psi_report(model: &RFModel, psi: &ChainMap, psi_hat: &LinearMap) -> Result<PsiReport, RfError> {
    let right_inverse = psi.compose(psi_hat)?.first_difference(&LinearMap::identity(model.z.clone()))?;
    let image = psi_hat.global_matrix().image_basis();
    let image_is_negative = same_span(model.rf.len(), &image, &negative_span(model));
    Ok(PsiReport {
        right_inverse,
        image_is_negative,
        iso_low: iso_in_degrees(psi, |k| k <= -1),
        psi_hat_chain_map: verify_chain_map(psi_hat).is_ok(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PResult {
    /// `P: M_0 → M^0`, with `ΨΦ = P∂ + δP`.
    pub p: ChainHomotopy,
    /// Whether `P q_min` could be kept inside positive energy.
    pub qmin_positive: bool,
}

/// Solve `ΨΦ = P∂ + δP` for `P` between matching classes, first with
/// `P q_min` restricted to closed orbits and then without that restriction.
pub fn derive_p(model: &RFModel, phi: &ChainMap, psi: &ChainMap) -> Result<PResult, RfError> {
    let f = psi.compose(phi)?;
    let g = LinearMap::zero(model.x.clone(), model.z.clone(), 0);
    let qmin = model.q_min();
    let class_ok = |i: usize, t: usize| {
        let (s, d) = (model.point_of_x(i), model.point_of_z(t));
        model.points[d].class == model.data.negate(&model.points[s].class)
    };
    let strict = |i: usize, t: usize| {
        class_ok(i, t) && (model.point_of_x(i) != qmin || !model.points[model.point_of_z(t)].constant)
    };
    if let Some(p) = solve_chain_homotopy(&f, &g, &strict)? {
        return Ok(PResult { p, qmin_positive: true });
    }
    match solve_chain_homotopy(&f, &g, &class_ok)? {
        Some(p) => Ok(PResult { p, qmin_positive: false }),
        None => Err(RfError::NoHomotopy),
    }
}

/// `P` from explicit coefficients `γ ↦ [β]`.
pub fn assemble_p(model: &RFModel, coeffs: &BTreeMap<String, Vec<String>>) -> Result<ChainHomotopy, RfError> {
    let mut images = alloc::vec![Vec::new(); model.x.len()];
    for (src, targets) in coeffs {
        let Some(i) = model.x.index_of(src) else {
            return Err(coefficient("P", src, "", "unknown source"));
        };
        for t in targets {
            let Some(j) = model.z.index_of(t) else {
                return Err(coefficient("P", src, t, "unknown target"));
            };
            images[i].push(j);
        }
    }
    Ok(LinearMap::from_indices(model.x.clone(), model.z.clone(), 1, images)?)
}

/// Correction terms of `Φ`, the inverse of [`assemble_phi`].
pub fn phi_coefficients(model: &RFModel, phi: &ChainMap) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for (point, p) in model.points.iter().enumerate() {
        let lead = plus_id(&p.id);
        let t: Vec<String> = phi.image_ids(model.x_index(point)).into_iter().filter(|w| *w != lead).collect();
        if !t.is_empty() {
            out.insert(p.id.clone(), t);
        }
    }
    out
}

/// Coefficients of `Ψ` without the leading terms, the inverse of
/// [`assemble_psi`].
pub fn psi_coefficients(model: &RFModel, psi: &ChainMap) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for i in 0..model.rf.len() {
        let (point, sign) = model.point_of_rf(i);
        let lead = &model.points[point].id;
        let t: Vec<String> = psi.image_ids(i).into_iter().filter(|b| sign == Sign::Plus || b != lead).collect();
        if !t.is_empty() {
            out.insert(model.rf.id(i).into(), t);
        }
    }
    out
}

pub(crate) fn degree_mismatch(k: i64, lhs: String, rhs: String) -> Mismatch {
    Mismatch { generator: format!("degree {k}"), lhs: alloc::vec![lhs], rhs: alloc::vec![rhs] }
}
