use alloc::vec::Vec;

use rand::Rng;

use super::loops::{rabinowitz_action, DiscreteLoop, FlatMetric, TrigPath};
use super::{trial_rng, NumericError};

pub const LEVREL_MARGIN_TOL: f64 = -1e-9;
pub const LEVREL_WITNESS_TOL: f64 = 1e-6;
pub const CONVERGENCE_RATIO: f64 = 3.0;

/// Both sides of the action bounds at `η = ±√E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevrelCheck {
    pub energy: f64,
    pub action_plus: f64,
    pub action_minus: f64,
    /// `√E − A(x, √E)`.
    pub margin_plus: f64,
    /// `A(x, −√E) + √E`.
    pub margin_minus: f64,
    /// `|A((q,p), −√E) + A((q,−p), √E)|`.
    pub sign_flip: f64,
}

impl LevrelCheck {
    pub fn margin(&self) -> f64 {
        self.margin_plus.min(self.margin_minus)
    }
}

pub fn check_levrel(x: &DiscreteLoop) -> LevrelCheck {
    let energy = x.energy();
    let s = libm::sqrt(energy);
    let action_plus = rabinowitz_action(x, s);
    let action_minus = rabinowitz_action(x, -s);
    let flipped = rabinowitz_action(&x.negated(), s);
    LevrelCheck {
        energy,
        action_plus,
        action_minus,
        margin_plus: s - action_plus,
        margin_minus: action_minus + s,
        sign_flip: libm::fabs(action_minus + flipped),
    }
}

/// Residual of a smooth equality witness at two resolutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convergence {
    pub coarse_samples: usize,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevrelReport {
    pub seed: u64,
    pub trials: usize,
    pub samples: usize,
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub worst_trial: usize,
    pub max_witness_residual: f64,
    pub straight_residual: f64,
    pub max_zero_momentum_residual: f64,
    pub max_sign_flip: f64,
    pub convergence: Convergence,
    pub pass: bool,
}

fn random_momenta<R: Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-scale..=scale)).collect()
}

/// A random loop with winding in `{-1,0,1}ⁿ`; the kind cycles through rough
/// samples, smooth paths with random momenta and near-equality momenta.
fn random_loop<R: Rng + ?Sized>(rng: &mut R, kind: usize, samples: usize) -> Result<DiscreteLoop, NumericError> {
    let n = rng.gen_range(2..=3);
    let metric = FlatMetric::random(rng, n);
    let (degree, amp) = (rng.gen_range(1..=4), rng.gen_range(0.0..0.3));
    let path = TrigPath::random(rng, n, degree, amp);
    let mut q = path.sample(samples);
    if kind == 0 {
        for v in q.iter_mut() {
            *v += rng.gen_range(-0.05..0.05);
        }
    }
    let x = DiscreteLoop::new(q, alloc::vec![0.0; samples * n], path.winding().to_vec(), metric)?;
    let p = match kind {
        0 | 1 => random_momenta(rng, samples * n, 3.0),
        _ => {
            let s = libm::sqrt(x.energy()).max(1e-3);
            let v = x.velocities();
            let mut p: Vec<f64> = v.chunks(n).flat_map(|v| x.metric().flat(v)).map(|p| p / s).collect();
            for e in p.iter_mut() {
                *e += rng.gen_range(-1e-4..1e-4);
            }
            p
        }
    };
    x.with_momenta(p)
}

/// Smooth path with `p = g q′/√E` from the exact derivative.
fn witness(path: &TrigPath, metric: &FlatMetric, samples: usize) -> Result<DiscreteLoop, NumericError> {
    let s = libm::sqrt(path.energy(metric));
    let n = path.dim();
    let v = path.sample_derivative(samples);
    let p = v.chunks(n).flat_map(|v| metric.flat(v)).map(|p| p / s).collect();
    path.to_loop(samples, p, metric.clone())
}

fn witness_residual(x: &DiscreteLoop) -> f64 {
    libm::fabs(check_levrel(x).margin_plus)
}

fn smooth_path<R: Rng + ?Sized>(rng: &mut R) -> (TrigPath, FlatMetric) {
    let n = rng.gen_range(2..=3);
    let metric = FlatMetric::random(rng, n);
    let mut path = TrigPath::random(rng, n, 2, 0.1);
    while path.energy(&metric) < 1e-2 {
        path = TrigPath::random(rng, n, 2, 0.1);
    }
    (path, metric)
}

/// Randomized check of `A(x, √E) ≤ √E` and `A(x, −√E) ≥ −√E`, together with
/// equality on `p = g q′/√E`, the closed form at `p = 0` and the sign flip.
pub fn levrel_battery(seed: u64, trials: usize, samples: usize) -> Result<LevrelReport, NumericError> {
    let mut margins = Vec::with_capacity(trials);
    let (mut min_margin, mut worst_trial) = (f64::INFINITY, 0);
    let (mut max_witness, mut max_zero, mut max_flip) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let x = random_loop(&mut rng, t % 3, samples)?;
        let c = check_levrel(&x);
        margins.push(c.margin());
        if c.margin() < min_margin {
            min_margin = c.margin();
            worst_trial = t;
        }
        max_flip = max_flip.max(c.sign_flip);
        let zero = x.with_momenta(alloc::vec![0.0; x.momenta().len()])?;
        let s = libm::sqrt(zero.energy());
        max_zero = max_zero.max(libm::fabs(rabinowitz_action(&zero, s) - s / 2.0));
        let (path, metric) = smooth_path(&mut rng);
        max_witness = max_witness.max(witness_residual(&witness(&path, &metric, samples)?));
    }
    let line = TrigPath::straight(alloc::vec![0.0, 0.0], alloc::vec![1, 0]);
    let straight = witness_residual(&witness(&line, &FlatMetric::euclidean(2), samples)?);
    let mut rng = trial_rng(seed, u64::MAX);
    let (path, metric) = smooth_path(&mut rng);
    let convergence = convergence(|m| Ok(witness_residual(&witness(&path, &metric, m)?)), 64)?;
    let pass = trials > 0
        && min_margin >= LEVREL_MARGIN_TOL
        && max_witness <= LEVREL_WITNESS_TOL
        && straight <= LEVREL_WITNESS_TOL
        && max_zero <= 1e-12
        && max_flip == 0.0
        && convergence.ratio >= CONVERGENCE_RATIO;
    Ok(LevrelReport {
        seed,
        trials,
        samples,
        margins,
        min_margin,
        worst_trial,
        max_witness_residual: max_witness,
        straight_residual: straight,
        max_zero_momentum_residual: max_zero,
        max_sign_flip: max_flip,
        convergence,
        pass,
    })
}

pub(crate) fn convergence(
    mut residual: impl FnMut(usize) -> Result<f64, NumericError>,
    coarse_samples: usize,
) -> Result<Convergence, NumericError> {
    let coarse = residual(coarse_samples)?;
    let fine = residual(2 * coarse_samples)?;
    Ok(Convergence { coarse_samples, coarse, fine, ratio: coarse / fine })
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn zero_momentum_gives_half_root_energy() {
        let path = TrigPath::straight(alloc::vec![0.0, 0.5], alloc::vec![1, 1]);
        let x = path.to_loop(32, alloc::vec![0.0; 64], FlatMetric::euclidean(2)).unwrap();
        let c = check_levrel(&x);
        assert!((c.energy - 2.0).abs() < 1e-14);
        assert!((c.action_plus - 2f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(c.margin() > 0.0);
    }

    #[test]
    fn straight_loop_is_an_equality() {
        let line = TrigPath::straight(alloc::vec![0.0, 0.0], alloc::vec![1, 0]);
        let x = witness(&line, &FlatMetric::euclidean(2), 256).unwrap();
        let c = check_levrel(&x);
        assert!((c.action_plus - 1.0).abs() < 1e-9);
        assert!(c.margin_plus.abs() < 1e-9);
    }

    #[test]
    fn small_battery_passes() {
        let r = levrel_battery(17, 60, 128).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.convergence.ratio > 8.0, "{:?}", r.convergence);
        assert_eq!(r, levrel_battery(17, 60, 128).unwrap());
    }
}
