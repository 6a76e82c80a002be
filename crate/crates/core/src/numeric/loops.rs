use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use super::linalg::{dot, SymMatrix};
use super::NumericError;

/// A constant metric on `Rⁿ/Zⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatMetric {
    g: SymMatrix,
}

impl FlatMetric {
    pub fn new(g: SymMatrix) -> Self {
        FlatMetric { g }
    }

    pub fn euclidean(n: usize) -> Self {
        FlatMetric { g: SymMatrix::identity(n) }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        FlatMetric { g: SymMatrix::random(rng, n, 0.5) }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.g
    }

    /// `g(v, v)`.
    pub fn norm2(&self, v: &[f64]) -> f64 {
        self.g.quad(v)
    }

    /// `g*(p, p)`.
    pub fn dual_norm2(&self, p: &[f64]) -> f64 {
        self.g.quad_inv(p)
    }

    /// `½(g*(p, p) − 1)`.
    pub fn hamiltonian(&self, p: &[f64]) -> f64 {
        0.5 * (self.dual_norm2(p) - 1.0)
    }

    /// The covector `g(v, ·)`.
    pub fn flat(&self, v: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; v.len()];
        self.g.apply(v, &mut out);
        out
    }

    /// The vector `g*(p, ·)`.
    pub fn sharp(&self, p: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; p.len()];
        self.g.apply_inv(p, &mut out);
        out
    }
}

/// A loop `(q, p)` in `T*Tⁿ` sampled at `t = i/N`. `q` is stored lifted to
/// `Rⁿ` with `q(t + 1) = q(t) + wind`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLoop {
    n: usize,
    q: Vec<f64>,
    p: Vec<f64>,
    wind: Vec<f64>,
    metric: FlatMetric,
}

impl DiscreteLoop {
    pub fn new(q: Vec<f64>, p: Vec<f64>, wind: Vec<i64>, metric: FlatMetric) -> Result<Self, NumericError> {
        let n = metric.dim();
        if n < 2 {
            return Err(NumericError::InvalidLoop("dimension must be at least 2"));
        }
        if wind.len() != n || !q.len().is_multiple_of(n) || p.len() != q.len() {
            return Err(NumericError::InvalidLoop("sample arrays do not match the dimension"));
        }
        if q.len() / n < 8 {
            return Err(NumericError::InvalidLoop("at least 8 samples are required"));
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(NumericError::InvalidLoop("samples must be finite"));
        }
        Ok(DiscreteLoop { n, q, p, wind: wind.into_iter().map(|w| w as f64).collect(), metric })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> usize {
        self.q.len() / self.n
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples() as f64
    }

    pub fn metric(&self) -> &FlatMetric {
        &self.metric
    }

    pub fn q(&self, i: usize) -> &[f64] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    pub fn p(&self, i: usize) -> &[f64] {
        &self.p[i * self.n..(i + 1) * self.n]
    }

    pub fn positions(&self) -> &[f64] {
        &self.q
    }

    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    pub fn winding(&self) -> &[f64] {
        &self.wind
    }

    /// Same positions with momenta replaced.
    pub fn with_momenta(&self, p: Vec<f64>) -> Result<Self, NumericError> {
        if p.len() != self.q.len() || p.iter().any(|x| !x.is_finite()) {
            return Err(NumericError::InvalidLoop("momenta do not match the loop"));
        }
        Ok(DiscreteLoop { p, ..self.clone() })
    }

    /// `(q, −p)`.
    pub fn negated(&self) -> Self {
        DiscreteLoop { p: self.p.iter().map(|x| -x).collect(), ..self.clone() }
    }

    /// `t ↦ x(−t)`.
    pub fn reversed(&self) -> Self {
        let m = self.samples();
        let mut q = Vec::with_capacity(self.q.len());
        let mut p = Vec::with_capacity(self.p.len());
        for i in 0..m {
            let j = (m - i) % m;
            if i == 0 {
                q.extend_from_slice(self.q(0));
            } else {
                q.extend(self.q(j).iter().zip(&self.wind).map(|(q, w)| q - w));
            }
            p.extend_from_slice(self.p(j));
        }
        DiscreteLoop { n: self.n, q, p, wind: self.wind.iter().map(|w| -w).collect(), metric: self.metric.clone() }
    }

    /// Centered periodic difference of `q` at sample `i`.
    pub fn velocity(&self, i: usize, out: &mut [f64]) {
        let m = self.samples();
        let (next, prev) = ((i + 1) % m, (i + m - 1) % m);
        let inv = m as f64 / 2.0;
        for c in 0..self.n {
            let mut d = self.q[next * self.n + c] - self.q[prev * self.n + c];
            if i + 1 == m {
                d += self.wind[c];
            }
            if i == 0 {
                d += self.wind[c];
            }
            out[c] = d * inv;
        }
    }

    pub fn velocities(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.q.len()];
        for i in 0..self.samples() {
            self.velocity(i, &mut v[i * self.n..(i + 1) * self.n]);
        }
        v
    }

    /// Centered periodic difference of `p` at sample `i`.
    pub fn momentum_rate(&self, i: usize, out: &mut [f64]) {
        let m = self.samples();
        let (next, prev) = ((i + 1) % m, (i + m - 1) % m);
        let inv = m as f64 / 2.0;
        for c in 0..self.n {
            out[c] = (self.p[next * self.n + c] - self.p[prev * self.n + c]) * inv;
        }
    }

    /// `∫ g(q′, q′) dt`.
    pub fn energy(&self) -> f64 {
        let v = self.velocities();
        v.chunks(self.n).map(|x| self.metric.norm2(x)).sum::<f64>() * self.step()
    }

    /// `∫ ⟨p, q′⟩ dt`.
    pub fn liouville(&self) -> f64 {
        let v = self.velocities();
        v.chunks(self.n).zip(self.p.chunks(self.n)).map(|(v, p)| dot(p, v)).sum::<f64>() * self.step()
    }

    /// `∫ H(x) dt`.
    pub fn mean_hamiltonian(&self) -> f64 {
        self.p.chunks(self.n).map(|p| self.metric.hamiltonian(p)).sum::<f64>() * self.step()
    }
}

/// `A(x, η) = ∫⟨p, q′⟩ dt − η ∫ ½(g*(p, p) − 1) dt` by the trapezoid rule.
pub fn rabinowitz_action(x: &DiscreteLoop, eta: f64) -> f64 {
    x.liouville() - eta * x.mean_hamiltonian()
}

#[derive(Clone, Debug, PartialEq)]
struct Mode {
    k: u32,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// A smooth loop `q(t) = q₀ + t·wind + Σ a_k cos 2πkt + b_k sin 2πkt` in `Rⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPath {
    base: Vec<f64>,
    wind: Vec<i64>,
    modes: Vec<Mode>,
}

impl TrigPath {
    pub fn straight(base: Vec<f64>, wind: Vec<i64>) -> Self {
        TrigPath { base, wind, modes: Vec::new() }
    }

    /// Winding in `{-1, 0, 1}ⁿ`, modes `1..=degree` with amplitude `amp/k`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, amp: f64) -> Self {
        let base = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let wind = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
        let modes = (1..=degree)
            .map(|k| {
                let w = amp / k as f64;
                Mode {
                    k,
                    a: (0..n).map(|_| rng.gen_range(-w..=w)).collect(),
                    b: (0..n).map(|_| rng.gen_range(-w..=w)).collect(),
                }
            })
            .collect();
        TrigPath { base, wind, modes }
    }

    /// Zero base point and winding.
    pub fn random_periodic<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, amp: f64) -> Self {
        let mut path = Self::random(rng, n, degree, amp);
        path.base = alloc::vec![0.0; n];
        path.wind = alloc::vec![0; n];
        path
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn winding(&self) -> &[i64] {
        &self.wind
    }

    pub fn position(&self, t: f64, out: &mut [f64]) {
        for c in 0..self.dim() {
            out[c] = self.base[c] + t * self.wind[c] as f64;
        }
        for m in &self.modes {
            let (s, co) = libm::sincos(2.0 * PI * m.k as f64 * t);
            for c in 0..self.dim() {
                out[c] += m.a[c] * co + m.b[c] * s;
            }
        }
    }

    pub fn derivative(&self, t: f64, out: &mut [f64]) {
        for c in 0..self.dim() {
            out[c] = self.wind[c] as f64;
        }
        for m in &self.modes {
            let w = 2.0 * PI * m.k as f64;
            let (s, co) = libm::sincos(w * t);
            for c in 0..self.dim() {
                out[c] += w * (m.b[c] * co - m.a[c] * s);
            }
        }
    }

    /// Positions at `t = i/samples`.
    pub fn sample(&self, samples: usize) -> Vec<f64> {
        self.sample_with(samples, Self::position)
    }

    /// Exact velocities at `t = i/samples`.
    pub fn sample_derivative(&self, samples: usize) -> Vec<f64> {
        self.sample_with(samples, Self::derivative)
    }

    fn sample_with(&self, samples: usize, f: fn(&Self, f64, &mut [f64])) -> Vec<f64> {
        let n = self.dim();
        let mut out = alloc::vec![0.0; samples * n];
        for i in 0..samples {
            f(self, i as f64 / samples as f64, &mut out[i * n..(i + 1) * n]);
        }
        out
    }

    /// `∫ g(q′, q′) dt` in closed form.
    pub fn energy(&self, metric: &FlatMetric) -> f64 {
        let w: Vec<f64> = self.wind.iter().map(|&x| x as f64).collect();
        let mut e = metric.norm2(&w);
        for m in &self.modes {
            let f = 2.0 * PI * m.k as f64;
            e += 0.5 * f * f * (metric.norm2(&m.a) + metric.norm2(&m.b));
        }
        e
    }

    pub fn to_loop(&self, samples: usize, p: Vec<f64>, metric: FlatMetric) -> Result<DiscreteLoop, NumericError> {
        DiscreteLoop::new(self.sample(samples), p, self.wind.clone(), metric)
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use rand::SeedableRng;

    fn flat_loop(p: [f64; 2]) -> DiscreteLoop {
        let path = TrigPath::straight(alloc::vec![0.0, 0.0], alloc::vec![1, 0]);
        let p = (0..64).flat_map(|_| p).collect();
        path.to_loop(64, p, FlatMetric::euclidean(2)).unwrap()
    }

    #[test]
    fn action_examples() {
        let still = TrigPath::straight(alloc::vec![0.3, 0.7], alloc::vec![0, 0]);
        let x = still.to_loop(16, (0..16).flat_map(|_| [0.4, -2.0]).collect(), FlatMetric::euclidean(2)).unwrap();
        assert_eq!(rabinowitz_action(&x, 0.0), 0.0);
        let x = x.with_momenta((0..16).flat_map(|_| [0.6, 0.8]).collect()).unwrap();
        assert!(rabinowitz_action(&x, 3.7).abs() < 1e-15);
        assert!((rabinowitz_action(&flat_loop([1.0, 0.0]), 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_loops() {
        let m = FlatMetric::euclidean(2);
        assert!(DiscreteLoop::new(alloc::vec![0.0; 8], alloc::vec![0.0; 8], alloc::vec![0, 0], m.clone()).is_err());
        let mut q = alloc::vec![0.0; 16];
        q[3] = f64::NAN;
        assert!(DiscreteLoop::new(q, alloc::vec![0.0; 16], alloc::vec![0, 0], m.clone()).is_err());
        assert!(DiscreteLoop::new(alloc::vec![0.0; 16], alloc::vec![0.0; 16], alloc::vec![0, 0], m).is_ok());
        assert!(DiscreteLoop::new(
            alloc::vec![0.0; 16],
            alloc::vec![0.0; 16],
            alloc::vec![0],
            FlatMetric::euclidean(1)
        )
        .is_err());
    }

    #[test]
    fn closed_form_energy_and_velocity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = FlatMetric::random(&mut rng, 3);
        let path = TrigPath::random(&mut rng, 3, 3, 0.2);
        let x = path.to_loop(512, alloc::vec![0.0; 512 * 3], g.clone()).unwrap();
        assert!((x.energy() - path.energy(&g)).abs() < 1e-3 * path.energy(&g).max(1.0));
        let exact = path.sample_derivative(512);
        let v = x.velocities();
        let err = v.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-2);
        let r = x.reversed().reversed();
        assert_eq!(r, x);
    }
}
