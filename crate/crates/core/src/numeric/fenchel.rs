use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use super::levrel::{convergence, Convergence, CONVERGENCE_RATIO};
use super::linalg::{dot, SymMatrix};
use super::loops::{DiscreteLoop, FlatMetric, TrigPath};
use super::{trial_rng, NumericError};

pub const LEVREL2_MARGIN_TOL: f64 = -1e-9;
pub const LEVREL2_WITNESS_TOL: f64 = 1e-6;

/// `Σ a cos 2π⟨k, q⟩ + b sin 2π⟨k, q⟩` on `Rⁿ/Zⁿ`.
#[derive(Clone, Debug, PartialEq)]
struct TorusFourier {
    terms: Vec<(Vec<i32>, f64, f64)>,
}

impl TorusFourier {
    fn zero() -> Self {
        TorusFourier { terms: Vec::new() }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize, amp: f64) -> Self {
        let terms = (0..count)
            .map(|_| {
                let k = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                (k, rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp))
            })
            .collect();
        TorusFourier { terms }
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, b)| {
                let th: f64 = 2.0 * PI * k.iter().zip(q).map(|(&k, q)| k as f64 * q).sum::<f64>();
                let (s, c) = libm::sincos(th);
                a * c + b * s
            })
            .sum()
    }
}

/// `L(q, v) = ½⟨Av, v⟩ + ⟨w(q), v⟩ + U(q)` with constant positive definite
/// `A` and periodic `w`, `U`; its Legendre dual is
/// `H(q, p) = ½⟨A⁻¹(p − w), p − w⟩ − U`.
#[derive(Clone, Debug, PartialEq)]
pub struct TonelliLagrangian {
    a: SymMatrix,
    w: Vec<TorusFourier>,
    u: TorusFourier,
}

impl TonelliLagrangian {
    /// `L = ½⟨Av, v⟩`, rejecting indefinite `A`.
    pub fn quadratic(n: usize, a: Vec<f64>) -> Result<Self, NumericError> {
        let a = SymMatrix::new(n, a)?;
        Ok(TonelliLagrangian { a, w: (0..n).map(|_| TorusFourier::zero()).collect(), u: TorusFourier::zero() })
    }

    /// Random `A`, and `w`, `U` with a few Fourier modes of degree at most 2.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let a = SymMatrix::random(rng, n, 0.3);
        let w = (0..n).map(|_| TorusFourier::random(rng, n, 3, 0.5)).collect();
        let u = TorusFourier::random(rng, n, 3, 1.0);
        TonelliLagrangian { a, w, u }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    fn w_at(&self, q: &[f64]) -> Vec<f64> {
        self.w.iter().map(|w| w.value(q)).collect()
    }

    pub fn lagrangian(&self, q: &[f64], v: &[f64]) -> f64 {
        0.5 * self.a.quad(v) + dot(&self.w_at(q), v) + self.u.value(q)
    }

    pub fn hamiltonian(&self, q: &[f64], p: &[f64]) -> f64 {
        let d: Vec<f64> = p.iter().zip(self.w_at(q)).map(|(p, w)| p - w).collect();
        0.5 * self.a.quad_inv(&d) - self.u.value(q)
    }

    /// `d_vL(q, v) = Av + w(q)`.
    pub fn legendre(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        let mut p = alloc::vec![0.0; v.len()];
        self.a.apply(v, &mut p);
        for (p, w) in p.iter_mut().zip(self.w_at(q)) {
            *p += w;
        }
        p
    }
}

/// Free-period actions of a loop `x` on `[0, 1]` with period `T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Levrel2Trial {
    pub period: f64,
    /// `A_H(x, T) = ∫⟨p, q′⟩ − T ∫ H(q, p)`.
    pub action: f64,
    /// `S_L(q, T) = T ∫ L(q, q′/T)`.
    pub lagrangian_action: f64,
    /// `S_L(q, T) − A_H(x, T)`.
    pub margin: f64,
    /// `A_H(x(−·), −T)`.
    pub reversed_action: f64,
    /// `A_H(x(−·), −T) + S_L(q, T)`.
    pub reversed_margin: f64,
    /// `|A_H(x, T) + A_H(x(−·), −T)|`.
    pub reversal_residual: f64,
}

fn hamiltonian_action(x: &DiscreteLoop, t: f64, l: &TonelliLagrangian) -> f64 {
    let mean_h = (0..x.samples()).map(|i| l.hamiltonian(x.q(i), x.p(i))).sum::<f64>() * x.step();
    x.liouville() - t * mean_h
}

pub fn check_levrel2(x: &DiscreteLoop, t: f64, l: &TonelliLagrangian) -> Result<Levrel2Trial, NumericError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(NumericError::NonPositivePeriod(t));
    }
    if x.dim() != l.dim() {
        return Err(NumericError::InvalidLoop("loop and Lagrangian dimensions differ"));
    }
    let n = x.dim();
    let v = x.velocities();
    let mut scaled = alloc::vec![0.0; n];
    let mut s = 0.0;
    for i in 0..x.samples() {
        for c in 0..n {
            scaled[c] = v[i * n + c] / t;
        }
        s += l.lagrangian(x.q(i), &scaled);
    }
    let lagrangian_action = t * s * x.step();
    let action = hamiltonian_action(x, t, l);
    let reversed_action = hamiltonian_action(&x.reversed(), -t, l);
    Ok(Levrel2Trial {
        period: t,
        action,
        lagrangian_action,
        margin: lagrangian_action - action,
        reversed_action,
        reversed_margin: reversed_action + lagrangian_action,
        reversal_residual: libm::fabs(action + reversed_action),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Levrel2Report {
    pub seed: u64,
    pub trials: usize,
    pub samples: usize,
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub worst_trial: usize,
    pub min_reversed_margin: f64,
    pub max_reversal_residual: f64,
    pub max_witness_residual: f64,
    pub straight_residual: f64,
    pub convergence: Convergence,
    pub pass: bool,
}

/// The loop `q` with `p = d_vL(q, q′/T)` from the exact derivative of `q`.
fn witness(path: &TrigPath, t: f64, l: &TonelliLagrangian, samples: usize) -> Result<DiscreteLoop, NumericError> {
    let n = path.dim();
    let q = path.sample(samples);
    let v = path.sample_derivative(samples);
    let mut p = Vec::with_capacity(q.len());
    for i in 0..samples {
        let vi: Vec<f64> = v[i * n..(i + 1) * n].iter().map(|x| x / t).collect();
        p.extend(l.legendre(&q[i * n..(i + 1) * n], &vi));
    }
    path.to_loop(samples, p, FlatMetric::euclidean(n))
}

fn witness_residual(path: &TrigPath, t: f64, l: &TonelliLagrangian, samples: usize) -> Result<f64, NumericError> {
    Ok(libm::fabs(check_levrel2(&witness(path, t, l, samples)?, t, l)?.margin))
}

fn random_trial<R: Rng + ?Sized>(
    rng: &mut R,
    kind: usize,
    samples: usize,
) -> Result<(DiscreteLoop, f64, TonelliLagrangian), NumericError> {
    let n = rng.gen_range(2..=3);
    let l = TonelliLagrangian::random(rng, n);
    let t = libm::exp(rng.gen_range(-1.5..1.5));
    let (degree, amp) = (rng.gen_range(1..=4), rng.gen_range(0.0..0.3));
    let path = TrigPath::random(rng, n, degree, amp);
    let x = match kind {
        0 => {
            let mut q = path.sample(samples);
            for e in q.iter_mut() {
                *e += rng.gen_range(-0.05..0.05);
            }
            let p = (0..q.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            DiscreteLoop::new(q, p, path.winding().to_vec(), FlatMetric::euclidean(n))?
        }
        1 => {
            let p = TrigPath::random_periodic(rng, n, 3, 2.0).sample(samples);
            path.to_loop(samples, p, FlatMetric::euclidean(n))?
        }
        _ => {
            let x = witness(&path, t, &l, samples)?;
            let p = x.momenta().iter().map(|p| p + rng.gen_range(-1e-3..1e-3)).collect();
            x.with_momenta(p)?
        }
    };
    Ok((x, t, l))
}

fn smooth_case<R: Rng + ?Sized>(rng: &mut R) -> (TrigPath, f64, TonelliLagrangian) {
    let n = rng.gen_range(2..=3);
    let l = TonelliLagrangian::random(rng, n);
    let t = libm::exp(rng.gen_range(-0.5..0.5));
    (TrigPath::random(rng, n, 2, 0.1), t, l)
}

/// Randomized check of `A_H(x, T) ≤ S_L(q, T)` with equality on Legendre
/// loops, and of the time-reversal identity.
pub fn levrel2_battery(seed: u64, trials: usize, samples: usize) -> Result<Levrel2Report, NumericError> {
    let mut margins = Vec::with_capacity(trials);
    let (mut min_margin, mut worst_trial) = (f64::INFINITY, 0);
    let mut min_reversed = f64::INFINITY;
    let (mut max_reversal, mut max_witness) = (0.0f64, 0.0f64);
    for k in 0..trials {
        let mut rng = trial_rng(seed, k as u64);
        let (x, t, l) = random_trial(&mut rng, k % 3, samples)?;
        let c = check_levrel2(&x, t, &l)?;
        margins.push(c.margin);
        if c.margin < min_margin {
            min_margin = c.margin;
            worst_trial = k;
        }
        min_reversed = min_reversed.min(c.reversed_margin);
        max_reversal = max_reversal.max(c.reversal_residual / (1.0 + c.action.abs()));
        let (path, t, l) = smooth_case(&mut rng);
        max_witness = max_witness.max(witness_residual(&path, t, &l, samples)?);
    }
    let line = TrigPath::straight(alloc::vec![0.0, 0.0], alloc::vec![1, 0]);
    let free = TonelliLagrangian::quadratic(2, alloc::vec![1.0, 0.0, 0.0, 1.0])?;
    let straight = witness_residual(&line, 1.0, &free, samples)?;
    let mut rng = trial_rng(seed, u64::MAX);
    let (path, t, l) = smooth_case(&mut rng);
    let convergence = convergence(|m| witness_residual(&path, t, &l, m), 64)?;
    let pass = trials > 0
        && min_margin >= LEVREL2_MARGIN_TOL
        && min_reversed >= LEVREL2_MARGIN_TOL
        && max_reversal <= 1e-12
        && max_witness <= LEVREL2_WITNESS_TOL
        && straight <= LEVREL2_WITNESS_TOL
        && convergence.ratio >= CONVERGENCE_RATIO;
    Ok(Levrel2Report {
        seed,
        trials,
        samples,
        margins,
        min_margin,
        worst_trial,
        min_reversed_margin: min_reversed,
        max_reversal_residual: max_reversal,
        max_witness_residual: max_witness,
        straight_residual: straight,
        convergence,
        pass,
    })
}

#[cfg(test)]
mod test {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn constant_loop_at_rest() {
        let l = TonelliLagrangian::quadratic(2, alloc::vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let x = TrigPath::straight(alloc::vec![0.2, 0.4], alloc::vec![0, 0])
            .to_loop(16, alloc::vec![0.0; 32], FlatMetric::euclidean(2))
            .unwrap();
        let c = check_levrel2(&x, 2.5, &l).unwrap();
        assert_eq!((c.action, c.lagrangian_action, c.margin), (0.0, 0.0, 0.0));
        assert_eq!(check_levrel2(&x, 0.0, &l), Err(NumericError::NonPositivePeriod(0.0)));
        assert!(TonelliLagrangian::quadratic(2, alloc::vec![1.0, 0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn straight_loop_is_an_equality() {
        let l = TonelliLagrangian::quadratic(2, alloc::vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let line = TrigPath::straight(alloc::vec![0.0, 0.0], alloc::vec![1, 0]);
        let x = witness(&line, 1.0, &l, 256).unwrap();
        let c = check_levrel2(&x, 1.0, &l).unwrap();
        assert!((c.action - 0.5).abs() < 1e-12 && c.margin.abs() < 1e-12);
    }

    #[test]
    fn legendre_is_the_maximizer() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let l = TonelliLagrangian::random(&mut rng, 3);
        let q = [0.1, 0.7, 0.3];
        let v = [0.4, -1.0, 2.0];
        let p = l.legendre(&q, &v);
        let gap = l.lagrangian(&q, &v) + l.hamiltonian(&q, &p) - dot(&p, &v);
        assert!(gap.abs() < 1e-12);
        for _ in 0..20 {
            let r: Vec<f64> = p.iter().map(|p| p + rng.gen_range(-1.0..1.0)).collect();
            assert!(dot(&r, &v) - l.hamiltonian(&q, &r) <= l.lagrangian(&q, &v) + 1e-12);
        }
    }

    #[test]
    fn small_battery_passes() {
        let r = levrel2_battery(23, 60, 256).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
