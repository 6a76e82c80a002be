//! End-to-end runs from parsed inputs to the core reports.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfh_core::gysin::{gysin_sequence, GysinError, GysinReport};
use rfh_core::rf::synth::{synthesize, SynthOptions};
use rfh_core::rf::{
    assemble_p, assemble_phi, assemble_psi, build_rf_model, build_theta, compare_hrf_table, derive_p, derive_phi_hat,
    derive_psi_hat, phi_coefficients, phi_report, positive_negative_isomorphisms, psi_coefficients, psi_report,
    verify_theorem_main, HrfReport, PhiReport, PsiReport, RFModel, RfError, RfMapSet, SplitIsomorphisms, TheoremReport,
};

use crate::io::{ComplexJson, FormatError, ModelJson, MorseJson};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Gysin(#[from] GysinError),
    #[error(transparent)]
    Rf(#[from] RfError),
}

pub fn gysin(j: &MorseJson) -> Result<GysinReport, InputError> {
    Ok(gysin_sequence(&j.to_data()?)?)
}

/// A validated model with every map of the comparison.
#[derive(Clone, Debug)]
pub struct RfRun {
    pub model: RFModel,
    pub maps: RfMapSet,
    /// Whether `P` was solved for rather than read from the model.
    pub p_derived: bool,
    pub phi: PhiReport,
    pub psi: PsiReport,
}

pub fn rf_run(j: &ModelJson) -> Result<RfRun, InputError> {
    let data = j.data()?;
    let input = j.complex()?.to_rf_input()?;
    let model = build_rf_model(&data, &input)?;
    let phi = assemble_phi(&model, j.phi.as_ref().ok_or(FormatError::Missing("\"phi\""))?)?;
    let psi = assemble_psi(&model, j.psi.as_ref().ok_or(FormatError::Missing("\"psi\""))?)?;
    let phi_hat = derive_phi_hat(&model, &phi)?;
    let psi_hat = derive_psi_hat(&model, &psi)?;
    let (p, p_derived) = match &j.p {
        Some(c) => (assemble_p(&model, c)?, false),
        None => (derive_p(&model, &phi, &psi)?.p, true),
    };
    let phi_rep = phi_report(&model, &phi, &phi_hat)?;
    let psi_rep = psi_report(&model, &psi, &psi_hat)?;
    let maps = build_theta(&model, phi, phi_hat, psi, psi_hat, p)?;
    Ok(RfRun { model, maps, p_derived, phi: phi_rep, psi: psi_rep })
}

#[derive(Clone, Debug)]
pub struct MainRun {
    pub run: RfRun,
    pub theorem: TheoremReport,
    pub isomorphisms: SplitIsomorphisms,
}

pub fn verify_main(j: &ModelJson) -> Result<MainRun, InputError> {
    let run = rf_run(j)?;
    let theorem = verify_theorem_main(&run.model, &run.maps)?;
    let isomorphisms = positive_negative_isomorphisms(&run.model, &run.maps)?;
    Ok(MainRun { run, theorem, isomorphisms })
}

pub fn hrf_table(run: &RfRun, j: &ModelJson) -> Result<HrfReport, InputError> {
    Ok(compare_hrf_table(&run.model, &j.loop_betti)?)
}

/// Complete energy data with a random admissible boundary and coefficients
/// of `Φ` and `Ψ`; `P` is solved for and stored.
pub fn synth(j: &ModelJson, seed: u64, opts: SynthOptions) -> Result<ModelJson, InputError> {
    let data = j.data()?;
    let s = synthesize(&data, &mut ChaCha8Rng::seed_from_u64(seed), opts)?;
    let mut out = ModelJson::from_data(&data);
    out.loop_betti = j.loop_betti.clone();
    out.set_complex(ComplexJson::from_rf_input(&s.input));
    let model = build_rf_model(&data, &s.input)?;
    let phi = assemble_phi(&model, &s.phi)?;
    let psi = assemble_psi(&model, &s.psi)?;
    let p = derive_p(&model, &phi, &psi)?.p;
    out.phi = Some(phi_coefficients(&model, &phi));
    out.psi = Some(psi_coefficients(&model, &psi));
    out.p = Some(
        (0..model.x.len())
            .filter(|&i| !p.image_of(i).is_empty())
            .map(|i| (model.x.id(i).to_string(), p.image_ids(i)))
            .collect(),
    );
    Ok(out)
}
