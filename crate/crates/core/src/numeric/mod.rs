//! Numerical checks of the action inequalities for loops in the cotangent
//! bundle of a flat torus and of the Aleksandrov maximum principle with a
//! Neumann condition on part of the boundary.
//!
//! Every battery is deterministic given its seed: trial `i` draws from the
//! ChaCha stream `i` of that seed.

mod conformal;
mod elliptic;
mod fenchel;
mod gradient;
mod levrel;
mod linalg;
mod loops;
mod trig;

pub use conformal::{
    check_transport, cylinder_annulus_transport, transport_battery, CylinderField, TransportBattery, TransportReport,
};
pub use elliptic::{
    aleksandrov_battery, check_aleksandrov, random_sample, AleksandrovCheck, AleksandrovConfig, AleksandrovReport,
    AnnulusSector, EllipticSample, ALEKSANDROV_MARGIN_TOL,
};
pub use fenchel::{check_levrel2, levrel2_battery, Levrel2Report, Levrel2Trial, TonelliLagrangian};
pub use gradient::{action_gradient_check, gradient_battery, GradientCheck, GradientReport, Perturbation};
pub use levrel::{check_levrel, levrel_battery, Convergence, LevrelCheck, LevrelReport};
pub use linalg::SymMatrix;
pub use loops::{rabinowitz_action, DiscreteLoop, FlatMetric, TrigPath};
pub use trig::{Jet, TrigPoly2, TrigVec2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("invalid loop: {0}")]
    InvalidLoop(&'static str),
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("perturbation has zero norm")]
    DegeneratePerturbation,
    #[error("finite difference step {0} outside [1e-7, 1e-3]")]
    StepOutOfRange(f64),
    #[error("period T = {0} must be positive")]
    NonPositivePeriod(f64),
    #[error("invalid domain: {0}")]
    Domain(&'static str),
    #[error("radial derivative on the inner arc cannot be made nonnegative")]
    NeumannUnsatisfiable,
}

/// Generator for trial `trial` of a battery seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
