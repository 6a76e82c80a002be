use alloc::vec::Vec;

use rand::Rng;

use super::linalg::dot;
use super::loops::{rabinowitz_action, DiscreteLoop, FlatMetric, TrigPath};
use super::{trial_rng, NumericError};

pub const GRADIENT_REL_TOL: f64 = 1e-5;
pub const ETA_COMPONENT_TOL: f64 = 1e-12;
pub const HALVING_RATIO: f64 = 2.0;
const HALVING_EPS: f64 = 1e-3;
/// `A` is affine in `η`, so the largest admissible step only reduces roundoff.
const ETA_STEP: f64 = 1e-3;

/// A tangent vector `(ξ_q, ξ_p, ξ_η)` at a loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub deta: f64,
}

impl Perturbation {
    pub fn eta(len: usize) -> Self {
        Perturbation { dq: alloc::vec![0.0; len], dp: alloc::vec![0.0; len], deta: 1.0 }
    }

    /// Smooth periodic `ξ_q`, `ξ_p` of the given degree and `ξ_η = 1`.
    pub fn random_smooth<R: Rng + ?Sized>(rng: &mut R, n: usize, samples: usize, degree: u32) -> Self {
        let dq = TrigPath::random_periodic(rng, n, degree, 1.0).sample(samples);
        let dp = TrigPath::random_periodic(rng, n, degree, 1.0).sample(samples);
        Perturbation { dq, dp, deta: 1.0 }
    }

    fn norm2(&self, h: f64) -> f64 {
        h * (dot(&self.dq, &self.dq) + dot(&self.dp, &self.dp)) + self.deta * self.deta
    }
}

/// `∇A = (−Dp, Dq − η g*p, −∫H)` for the `L²` pairing `h Σ` on loops.
#[derive(Clone, Debug, PartialEq)]
struct Gradient {
    q: Vec<f64>,
    p: Vec<f64>,
    eta: f64,
    /// `Dq − g*p`, the form without `η`.
    p_printed: Vec<f64>,
}

fn gradient(x: &DiscreteLoop, eta: f64) -> Gradient {
    let n = x.dim();
    let m = x.samples();
    let mut q = alloc::vec![0.0; n * m];
    let mut p = alloc::vec![0.0; n * m];
    let mut p_printed = alloc::vec![0.0; n * m];
    let mut v = alloc::vec![0.0; n];
    for i in 0..m {
        let r = i * n..(i + 1) * n;
        x.momentum_rate(i, &mut q[r.clone()]);
        for e in &mut q[r.clone()] {
            *e = -*e;
        }
        x.velocity(i, &mut v);
        let s = x.metric().sharp(x.p(i));
        for c in 0..n {
            p[i * n + c] = v[c] - eta * s[c];
            p_printed[i * n + c] = v[c] - s[c];
        }
    }
    Gradient { q, p, eta: -x.mean_hamiltonian(), p_printed }
}

fn shifted(x: &DiscreteLoop, xi: &Perturbation, t: f64) -> Result<DiscreteLoop, NumericError> {
    let q = x.positions().iter().zip(&xi.dq).map(|(a, b)| a + t * b).collect();
    let p = x.momenta().iter().zip(&xi.dp).map(|(a, b)| a + t * b).collect();
    let wind = x.winding().iter().map(|&w| w as i64).collect();
    DiscreteLoop::new(q, p, wind, x.metric().clone())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientCheck {
    pub eps: f64,
    pub finite_difference: f64,
    /// `⟨∇A, ξ⟩` with `∇_p A = Dq − η g*p`.
    pub pairing: f64,
    /// `⟨∇A, ξ⟩` with `∇_p A = Dq − g*p`.
    pub printed_pairing: f64,
    /// `|FD − pairing| / (‖∇A‖ ‖ξ‖)`.
    pub relative_error: f64,
    pub printed_relative_error: f64,
    pub eta_finite_difference: f64,
    pub eta_exact: f64,
    pub eta_error: f64,
}

/// Central difference of `A` along `ξ` against the gradient pairing, and the
/// `η` derivative (step `1e-3`) against `−∫H`.
pub fn action_gradient_check(
    x: &DiscreteLoop,
    eta: f64,
    xi: &Perturbation,
    eps: f64,
) -> Result<GradientCheck, NumericError> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(NumericError::StepOutOfRange(eps));
    }
    let len = x.positions().len();
    if xi.dq.len() != len || xi.dp.len() != len {
        return Err(NumericError::InvalidLoop("perturbation does not match the loop"));
    }
    let h = x.step();
    let xi_norm = libm::sqrt(xi.norm2(h));
    if !(xi_norm > 0.0) {
        return Err(NumericError::DegeneratePerturbation);
    }
    let g = gradient(x, eta);
    let pair_q = h * dot(&g.q, &xi.dq);
    let pairing = pair_q + h * dot(&g.p, &xi.dp) + g.eta * xi.deta;
    let printed_pairing = pair_q + h * dot(&g.p_printed, &xi.dp) + g.eta * xi.deta;
    let grad_norm = libm::sqrt(h * (dot(&g.q, &g.q) + dot(&g.p, &g.p)) + g.eta * g.eta);
    let scale = (grad_norm * xi_norm).max(f64::MIN_POSITIVE);
    let plus = rabinowitz_action(&shifted(x, xi, eps)?, eta + eps * xi.deta);
    let minus = rabinowitz_action(&shifted(x, xi, -eps)?, eta - eps * xi.deta);
    let finite_difference = (plus - minus) / (2.0 * eps);
    let e = ETA_STEP;
    let eta_finite_difference = (rabinowitz_action(x, eta + e) - rabinowitz_action(x, eta - e)) / (2.0 * e);
    let eta_exact = g.eta;
    let eta_scale = eta_exact.abs().max(rabinowitz_action(x, eta).abs()).max(1.0);
    Ok(GradientCheck {
        eps,
        finite_difference,
        pairing,
        printed_pairing,
        relative_error: libm::fabs(finite_difference - pairing) / scale,
        printed_relative_error: libm::fabs(finite_difference - printed_pairing) / scale,
        eta_finite_difference,
        eta_exact,
        eta_error: libm::fabs(eta_finite_difference - eta_exact) / eta_scale,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientReport {
    pub seed: u64,
    pub trials: usize,
    pub samples: usize,
    pub eps: f64,
    pub max_relative_error: f64,
    pub max_eta_error: f64,
    /// Smallest `err(ε)/err(ε/2)` over trials at `ε = 1e-3`.
    pub min_halving_ratio: f64,
    pub min_printed_relative_error: f64,
    pub pass: bool,
}

fn random_case<R: Rng + ?Sized>(
    rng: &mut R,
    samples: usize,
) -> Result<(DiscreteLoop, f64, Perturbation), NumericError> {
    let n = rng.gen_range(2..=3);
    let metric = FlatMetric::random(rng, n);
    let path = TrigPath::random(rng, n, 3, 0.3);
    let pm = TrigPath::random_periodic(rng, n, 3, 1.0);
    let x = path.to_loop(samples, pm.sample(samples), metric)?;
    let eta = if rng.gen_bool(0.5) { rng.gen_range(-2.0..-0.5) } else { rng.gen_range(1.5..3.0) };
    let xi = Perturbation::random_smooth(rng, n, samples, 3);
    Ok((x, eta, xi))
}

/// Gradient checks on random smooth loops and perturbations: the relative
/// error at `eps`, the `η` component, and the error ratio when `ε = 1e-3` is
/// halved.
pub fn gradient_battery(seed: u64, trials: usize, samples: usize, eps: f64) -> Result<GradientReport, NumericError> {
    let mut max_rel = 0.0f64;
    let mut max_eta = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    let mut min_printed = f64::INFINITY;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let (x, eta, xi) = random_case(&mut rng, samples)?;
        let c = action_gradient_check(&x, eta, &xi, eps)?;
        max_rel = max_rel.max(c.relative_error);
        max_eta = max_eta.max(c.eta_error);
        min_printed = min_printed.min(c.printed_relative_error);
        let a = action_gradient_check(&x, eta, &xi, HALVING_EPS)?;
        let b = action_gradient_check(&x, eta, &xi, HALVING_EPS / 2.0)?;
        max_eta = max_eta.max(a.eta_error).max(b.eta_error);
        min_ratio = min_ratio.min(a.relative_error / b.relative_error);
    }
    let pass = trials > 0 && max_rel <= GRADIENT_REL_TOL && max_eta <= ETA_COMPONENT_TOL && min_ratio >= HALVING_RATIO;
    Ok(GradientReport {
        seed,
        trials,
        samples,
        eps,
        max_relative_error: max_rel,
        max_eta_error: max_eta,
        min_halving_ratio: min_ratio,
        min_printed_relative_error: min_printed,
        pass,
    })
}
