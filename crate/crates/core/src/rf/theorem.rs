use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::Mismatch;
use crate::exact::{verify_splitting, SplitShortExactSequence};
use crate::f2::same_span;
use crate::map::{verify_chain_homotopy, verify_chain_map, ChainHomotopy, ChainMap, HomotopyError, LinearMap};

use super::maps::degree_mismatch;
use super::model::RFModel;
use super::RfError;

/// Every map of the comparison between `RF` and the Morse complexes.
#[derive(Clone, Debug)]
pub struct RfMapSet {
    pub phi: ChainMap,
    pub phi_hat: LinearMap,
    pub psi: ChainMap,
    pub psi_hat: LinearMap,
    pub p: ChainHomotopy,
    /// `Ψ̂P`, the homotopy from `Φ` to `Θ`.
    pub k: ChainHomotopy,
    pub theta: ChainMap,
    pub theta_hat: LinearMap,
    /// `Θ̂∂Ψ̂`, of shift −1.
    pub delta: LinearMap,
}

impl RfMapSet {
    /// `0 → M_*(E, e) → RF_* → M^{1−*}(E, −e) → 0` with its splitting.
    pub fn sequence(&self, model: &RFModel) -> SplitShortExactSequence {
        SplitShortExactSequence {
            x: model.x.clone(),
            y: model.rf.clone(),
            z: model.z.clone(),
            theta: self.theta.clone(),
            psi: self.psi.clone(),
            theta_hat: self.theta_hat.clone(),
            psi_hat: self.psi_hat.clone(),
        }
    }

    /// `Δ` as a degree-preserving map `Z → X⁺`.
    pub fn delta_suspended(&self, model: &RFModel) -> Result<ChainMap, RfError> {
        Ok(self.delta.regrade(model.z.clone(), Arc::new(model.x.suspension()), 0)?)
    }
}

/// `Θ = Φ + Ψ̂P∂ + ∂Ψ̂P`, `Θ̂ = Φ̂ + Φ̂∂Ψ̂PΦ̂` and `Δ = Θ̂∂Ψ̂`.
pub fn build_theta(
    model: &RFModel,
    phi: ChainMap,
    phi_hat: LinearMap,
    psi: ChainMap,
    psi_hat: LinearMap,
    p: ChainHomotopy,
) -> Result<RfMapSet, RfError> {
    let bd_rf = LinearMap::boundary(model.rf.clone());
    let bd_x = LinearMap::boundary(model.x.clone());
    let k = psi_hat.compose(&p)?;
    let theta = phi.add(&k.compose(&bd_x)?)?.add(&bd_rf.compose(&k)?)?;
    let correction = phi_hat.compose(&bd_rf)?.compose(&k)?.compose(&phi_hat)?;
    let theta_hat = phi_hat.add(&correction)?;
    let delta = theta_hat.compose(&bd_rf)?.compose(&psi_hat)?;
    Ok(RfMapSet { phi, phi_hat, psi, psi_hat, p, k, theta, theta_hat, delta })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResult {
    pub label: &'static str,
    pub statement: &'static str,
    pub witness: Option<Mismatch>,
}

impl IdentityResult {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub identities: Vec<IdentityResult>,
    pub chi: bool,
    /// `Δ q_max` as ids.
    pub delta_q_max: Vec<String>,
    /// `Θ`, `Ψ`, `Θ̂`, `Ψ̂` form a split short exact sequence.
    pub splitting: Option<String>,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(IdentityResult::ok) && self.splitting.is_none()
    }

    pub fn failures(&self) -> Vec<&IdentityResult> {
        self.identities.iter().filter(|r| !r.ok()).collect()
    }
}

fn homotopy_witness(r: Result<(), HomotopyError>) -> Option<Mismatch> {
    match r {
        Ok(()) => None,
        Err(HomotopyError::Fails(m)) => Some(m),
        Err(HomotopyError::Incompatible) => {
            Some(Mismatch { generator: "shape".into(), lhs: alloc::vec!["incompatible maps".into()], rhs: Vec::new() })
        }
    }
}

/// Check identities (i) through (viii) relating the maps.
pub fn verify_theorem_main(model: &RFModel, m: &RfMapSet) -> Result<TheoremReport, RfError> {
    let bd_rf = LinearMap::boundary(model.rf.clone());
    let id_x = LinearMap::identity(model.x.clone());
    let id_rf = LinearMap::identity(model.rf.clone());
    let mut out = Vec::new();

    let psi_phi = m.psi.compose(&m.phi)?;
    let zero_xz = LinearMap::zero(model.x.clone(), model.z.clone(), 0);
    let w1 = homotopy_witness(verify_chain_homotopy(&psi_phi, &zero_xz, &m.p))
        .or_else(|| verify_chain_map(&m.theta).err())
        .or_else(|| homotopy_witness(verify_chain_homotopy(&m.theta, &m.phi, &m.k)));
    out.push(IdentityResult { label: "i", statement: "Θ is a chain map chain homotopic to Φ", witness: w1 });

    let a = m.phi_hat.compose(&bd_rf)?.compose(&m.psi_hat)?;
    let w2 = a.compose(&m.p)?.compose(&a)?.first_nonzero();
    out.push(IdentityResult { label: "ii", statement: "Φ̂∂Ψ̂PΦ̂∂Ψ̂ = 0", witness: w2 });

    let w3 = m.theta_hat.compose(&m.theta)?.first_difference(&id_x)?;
    out.push(IdentityResult { label: "iii", statement: "Θ̂Θ = Id", witness: w3 });

    let w4 = m.psi.compose(&m.theta)?.first_nonzero();
    out.push(IdentityResult { label: "iv", statement: "ΨΘ = 0", witness: w4 });

    let mut w5 = None;
    let mut degrees: Vec<i64> = model.rf.degrees().collect();
    degrees.dedup();
    for k in degrees {
        let im = m.theta.matrix(k).image_basis();
        let ker = m.psi.matrix(k).kernel_basis();
        if !same_span(model.rf.dim(k), &im, &ker) {
            w5 = Some(degree_mismatch(k, format!("rank im Θ = {}", im.len()), format!("dim ker Ψ = {}", ker.len())));
            break;
        }
    }
    out.push(IdentityResult { label: "v", statement: "im Θ = ker Ψ", witness: w5 });

    let w6 = m.theta.compose(&m.theta_hat)?.add(&m.psi_hat.compose(&m.psi)?)?.first_difference(&id_rf)?;
    out.push(IdentityResult { label: "vi", statement: "ΘΘ̂ + Ψ̂Ψ = Id", witness: w6 });

    let w7 = m.delta.first_difference(&a)?;
    out.push(IdentityResult { label: "vii", statement: "Θ̂∂Ψ̂ = Φ̂∂Ψ̂", witness: w7 });

    let (qmin, qmax) = (model.q_min(), model.q_max());
    let mut expected = alloc::vec![Vec::new(); model.z.len()];
    if model.chi() {
        expected[model.z_index(qmax)].push(model.x_index(qmin));
    }
    let expected = LinearMap::from_indices(model.z.clone(), model.x.clone(), -1, expected)?;
    let w8 = m.delta.first_difference(&expected)?;
    out.push(IdentityResult { label: "viii", statement: "Δq_max = χ q_min and Δ vanishes elsewhere", witness: w8 });

    let splitting = verify_splitting(&m.sequence(model)).err().map(|e| format!("{e}"));
    Ok(TheoremReport {
        identities: out,
        chi: model.chi(),
        delta_q_max: m.delta.image_ids(model.z_index(qmax)),
        splitting,
    })
}
