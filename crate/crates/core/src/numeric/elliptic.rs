use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::Rng;

use super::trig::{Jet, Phase, TrigPoly2, TrigVec2};
use super::{trial_rng, NumericError};

pub const ALEKSANDROV_MARGIN_TOL: f64 = 1e-6;
const BOUNDARY_SAMPLES: usize = 1024;
const DIAMETER_SAMPLES: usize = 256;
const RAMP_MARGIN: f64 = 0.05;

/// `{1 < r < R, θ₀ < θ < θ₀ + span}`; `span = 2π` is the full annulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSector {
    outer: f64,
    theta0: f64,
    span: f64,
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Arc { r: f64, a: f64, b: f64 },
    Ray { theta: f64, r0: f64, r1: f64 },
}

impl Piece {
    fn point(&self, t: f64) -> (f64, f64) {
        match *self {
            Piece::Arc { r, a, b } => {
                let (s, c) = libm::sincos(a + t * (b - a));
                (r * c, r * s)
            }
            Piece::Ray { theta, r0, r1 } => {
                let (s, c) = libm::sincos(theta);
                let r = r0 + t * (r1 - r0);
                (r * c, r * s)
            }
        }
    }
}

impl AnnulusSector {
    pub fn new(outer: f64, theta0: f64, span: f64) -> Result<Self, NumericError> {
        if !(outer > 1.0) || !outer.is_finite() {
            return Err(NumericError::Domain("outer radius must exceed 1"));
        }
        if !(span > 0.0 && span <= TAU) || !theta0.is_finite() {
            return Err(NumericError::Domain("angular span must lie in (0, 2π]"));
        }
        Ok(AnnulusSector { outer, theta0, span })
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let r2 = x * x + y * y;
        if !(r2 > 1.0 && r2 < self.outer * self.outer) {
            return false;
        }
        self.is_full() || {
            let d = libm::atan2(y, x) - self.theta0;
            let d = d - TAU * libm::floor(d / TAU);
            d > 0.0 && d < self.span
        }
    }

    /// The part of the boundary off the unit circle.
    fn sigma(&self) -> Vec<Piece> {
        let (a, b) = (self.theta0, self.theta0 + self.span);
        let mut v = alloc::vec![Piece::Arc { r: self.outer, a, b }];
        if !self.is_full() {
            v.push(Piece::Ray { theta: a, r0: 1.0, r1: self.outer });
            v.push(Piece::Ray { theta: b, r0: 1.0, r1: self.outer });
        }
        v
    }

    /// The inner arc on the unit circle.
    fn sigma_prime(&self) -> Piece {
        Piece::Arc { r: 1.0, a: self.theta0, b: self.theta0 + self.span }
    }

    /// Largest distance between boundary samples.
    pub fn diameter(&self) -> f64 {
        let mut pts = Vec::new();
        for piece in self.sigma().into_iter().chain([self.sigma_prime()]) {
            pts.extend((0..=DIAMETER_SAMPLES).map(|i| piece.point(i as f64 / DIAMETER_SAMPLES as f64)));
        }
        let mut d2 = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d2 = d2.max((a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1));
            }
        }
        libm::sqrt(d2)
    }

    fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for piece in self.sigma().into_iter().chain([self.sigma_prime()]) {
            for i in 0..=BOUNDARY_SAMPLES {
                let (x, y) = piece.point(i as f64 / BOUNDARY_SAMPLES as f64);
                b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
            }
        }
        b
    }
}

/// Analytic test data on an annulus sector: `u = u₀ + κr` with a
/// trigonometric polynomial `u₀` and a radial ramp `κ ≥ 0`, and a drift `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticSample {
    pub domain: AnnulusSector,
    pub u: TrigPoly2,
    pub ramp: f64,
    pub b: TrigVec2,
}

impl EllipticSample {
    fn jet_parts(&self, x: f64, y: f64, u: Jet) -> Jet {
        let r = libm::sqrt(x * x + y * y);
        let k = self.ramp;
        Jet { v: u.v + k * r, dx: u.dx + k * x / r, dy: u.dy + k * y / r, lap: u.lap + k / r }
    }

    pub fn u_jet(&self, x: f64, y: f64) -> Jet {
        self.jet_parts(x, y, self.u.jet(x, y))
    }

    pub fn u_value(&self, x: f64, y: f64) -> f64 {
        self.u_jet(x, y).v
    }

    /// `f = Δu + b·∇u`.
    pub fn f(&self, x: f64, y: f64) -> f64 {
        let j = self.u_jet(x, y);
        let (b1, b2) = self.b.value(x, y);
        j.lap + b1 * j.dx + b2 * j.dy
    }

    /// `∂u/∂r` on the unit circle at angle `θ`.
    pub fn radial_derivative(&self, theta: f64) -> f64 {
        let (s, c) = libm::sincos(theta);
        let j = self.u_jet(c, s);
        c * j.dx + s * j.dy
    }

    /// Smallest `∂u/∂r` over samples of the inner arc.
    pub fn min_radial_derivative(&self) -> f64 {
        inner_min(self.domain, |th| self.radial_derivative(th))
    }
}

fn inner_min(d: AnnulusSector, f: impl Fn(f64) -> f64) -> f64 {
    (0..=BOUNDARY_SAMPLES)
        .map(|i| f(d.theta0 + d.span * i as f64 / BOUNDARY_SAMPLES as f64))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AleksandrovConfig {
    pub grid: usize,
    pub trials: usize,
    pub degree: i32,
    /// `c` in `tol = 1e-6 + c·h²`.
    pub c_grid: f64,
    /// Add a radial ramp to meet the inner-arc condition instead of
    /// redrawing the sample.
    pub ramp: bool,
    pub max_attempts: usize,
}

impl Default for AleksandrovConfig {
    fn default() -> Self {
        AleksandrovConfig { grid: 128, trials: 100, degree: 2, c_grid: 0.01, ramp: true, max_attempts: 50 }
    }
}

impl AleksandrovConfig {
    pub fn step(&self) -> f64 {
        1.0 / self.grid as f64
    }

    pub fn tolerance(&self) -> f64 {
        ALEKSANDROV_MARGIN_TOL + self.c_grid * self.step() * self.step()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AleksandrovCheck {
    pub sup_omega: f64,
    pub sup_sigma: f64,
    pub sup_sigma_prime: f64,
    pub f_minus_norm: f64,
    pub b_norm: f64,
    pub diameter: f64,
    pub constant: f64,
    /// `sup_Ω u − sup_Σ u − C‖f⁻‖`.
    pub margin: f64,
    pub min_radial_derivative: f64,
    pub cells: usize,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Supremum of `u` along a boundary piece from dense samples refined by
/// golden-section search.
fn piece_sup(s: &EllipticSample, piece: Piece) -> f64 {
    let m = BOUNDARY_SAMPLES;
    let vals: Vec<f64> = (0..=m)
        .map(|i| {
            let (x, y) = piece.point(i as f64 / m as f64);
            s.u_value(x, y)
        })
        .collect();
    let (best, &v) =
        vals.iter().enumerate().fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let lo = best.saturating_sub(1) as f64 / m as f64;
    let hi = (best + 1).min(m) as f64 / m as f64;
    let (_, r) = golden_max(
        |t| {
            let (x, y) = piece.point(t);
            s.u_value(x, y)
        },
        lo,
        hi,
    );
    v.max(r)
}

/// Checks `sup_Ω u ≤ sup_Σ u + C‖f⁻‖_{L²(Ω)}` with
/// `C = d·exp((‖b‖² + 1)/(4π))`, norms by midpoint quadrature over the grid
/// cells whose centers lie in `Ω`.
pub fn check_aleksandrov(s: &EllipticSample, grid: usize) -> Result<AleksandrovCheck, NumericError> {
    if grid < 8 {
        return Err(NumericError::Domain("grid must have at least 8 cells per unit"));
    }
    let min_radial = s.min_radial_derivative();
    if min_radial < 0.0 {
        return Err(NumericError::NeumannUnsatisfiable);
    }
    let d = s.domain;
    let h = 1.0 / grid as f64;
    let (x0, x1, y0, y1) = d.bounding_box();
    let nx = libm::ceil((x1 - x0) / h) as usize + 1;
    let ny = libm::ceil((y1 - y0) / h) as usize + 1;
    let xs: Vec<f64> = (0..nx).map(|i| x0 + (i as f64 + 0.5) * h).collect();
    let ys: Vec<f64> = (0..ny).map(|j| y0 + (j as f64 + 0.5) * h).collect();
    let phase =
        |p: &TrigPoly2, v: &[f64]| -> Vec<Phase> { v.iter().map(|&t| Phase::new(t, p.omega(), p.degree())).collect() };
    let (ux, uy) = (phase(&s.u, &xs), phase(&s.u, &ys));
    let (b1x, b1y) = (phase(&s.b.x, &xs), phase(&s.b.x, &ys));
    let (b2x, b2y) = (phase(&s.b.y, &xs), phase(&s.b.y, &ys));
    let (mut fm2, mut b2, mut cells) = (0.0, 0.0, 0usize);
    let (mut best, mut arg) = (f64::NEG_INFINITY, (0.0, 0.0));
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            if !d.contains(x, y) {
                continue;
            }
            cells += 1;
            let u = s.jet_parts(x, y, s.u.jet_with(&ux[i], &uy[j]));
            let bx = s.b.x.jet_with(&b1x[i], &b1y[j]).v;
            let by = s.b.y.jet_with(&b2x[i], &b2y[j]).v;
            let f = u.lap + bx * u.dx + by * u.dy;
            if f < 0.0 {
                fm2 += f * f;
            }
            b2 += bx * bx + by * by;
            if u.v > best {
                best = u.v;
                arg = (x, y);
            }
        }
    }
    let f_minus_norm = libm::sqrt(fm2 * h * h);
    let b_sq = b2 * h * h;
    let interior = refine_interior(s, arg, h, best);
    let sup_sigma = d.sigma().into_iter().map(|p| piece_sup(s, p)).fold(f64::NEG_INFINITY, f64::max);
    let sup_sigma_prime = piece_sup(s, d.sigma_prime());
    let sup_omega = interior.max(sup_sigma).max(sup_sigma_prime);
    let diameter = d.diameter();
    let constant = diameter * libm::exp((b_sq + 1.0) / (4.0 * PI));
    Ok(AleksandrovCheck {
        sup_omega,
        sup_sigma,
        sup_sigma_prime,
        f_minus_norm,
        b_norm: libm::sqrt(b_sq),
        diameter,
        constant,
        margin: sup_omega - sup_sigma - constant * f_minus_norm,
        min_radial_derivative: min_radial,
        cells,
    })
}

/// Coordinate golden-section ascent in a cell-sized box around the best grid
/// point, staying inside `Ω`.
fn refine_interior(s: &EllipticSample, start: (f64, f64), h: f64, value: f64) -> f64 {
    if !value.is_finite() {
        return value;
    }
    let d = s.domain;
    let at = |x: f64, y: f64| if d.contains(x, y) { s.u_value(x, y) } else { f64::NEG_INFINITY };
    let (mut x, mut y) = start;
    let mut best = value;
    for _ in 0..4 {
        let (tx, vx) = golden_max(|t| at(t, y), x - h, x + h);
        if vx > best {
            best = vx;
            x = tx;
        }
        let (ty, vy) = golden_max(|t| at(x, t), y - h, y + h);
        if vy > best {
            best = vy;
            y = ty;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct AleksandrovReport {
    pub seed: u64,
    pub config: AleksandrovConfig,
    pub tolerance: f64,
    pub margins: Vec<f64>,
    pub max_margin: f64,
    pub worst_trial: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// A random sector, `u₀` of the configured degree, `b` of degree one, and the
/// ramp (or redraws) needed for `∂u/∂r ≥ 0` on the inner arc.
pub fn random_sample<R: Rng + ?Sized>(rng: &mut R, config: &AleksandrovConfig) -> Result<EllipticSample, NumericError> {
    let outer = rng.gen_range(1.5..2.5);
    let span = if rng.gen_bool(0.2) { TAU } else { rng.gen_range(PI / 3.0..PI) };
    let domain = AnnulusSector::new(outer, rng.gen_range(0.0..TAU), span)?;
    for _ in 0..config.max_attempts.max(1) {
        let omega = rng.gen_range(0.5..2.0);
        let u = TrigPoly2::random(rng, config.degree, omega, 1.0);
        let amp = rng.gen_range(0.0..2.0);
        let b = TrigVec2::random(rng, 1, omega, amp);
        let mut s = EllipticSample { domain, u, ramp: 0.0, b };
        let m = s.min_radial_derivative();
        if m >= 0.0 {
            return Ok(s);
        }
        if config.ramp {
            s.ramp = -m + RAMP_MARGIN;
            return Ok(s);
        }
    }
    Err(NumericError::NeumannUnsatisfiable)
}

pub fn aleksandrov_battery(seed: u64, config: AleksandrovConfig) -> Result<AleksandrovReport, NumericError> {
    let tolerance = config.tolerance();
    let mut margins = Vec::with_capacity(config.trials);
    let (mut max_margin, mut worst_trial, mut skipped) = (f64::NEG_INFINITY, 0, 0);
    for t in 0..config.trials {
        let mut rng = trial_rng(seed, t as u64);
        let sample = match random_sample(&mut rng, &config) {
            Ok(s) => s,
            Err(NumericError::NeumannUnsatisfiable) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let c = check_aleksandrov(&sample, config.grid)?;
        margins.push(c.margin);
        if c.margin > max_margin {
            max_margin = c.margin;
            worst_trial = t;
        }
    }
    let pass = !margins.is_empty() && max_margin <= tolerance;
    Ok(AleksandrovReport { seed, config, tolerance, margins, max_margin, worst_trial, skipped, pass })
}

#[cfg(test)]
mod test {
    use super::*;

    fn sector() -> AnnulusSector {
        AnnulusSector::new(2.0, 0.3, 2.0).unwrap()
    }

    #[test]
    fn domain_validation() {
        assert!(AnnulusSector::new(1.0, 0.0, 1.0).is_err());
        assert!(AnnulusSector::new(2.0, 0.0, 7.0).is_err());
        let d = sector();
        assert!(d.contains(1.5 * 1f64.cos(), 1.5 * 1f64.sin()));
        assert!(!d.contains(0.9, 0.1) && !d.contains(1.5, -0.1));
        assert!((AnnulusSector::new(2.0, 0.0, TAU).unwrap().diameter() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn constant_function_has_zero_margin() {
        let s = EllipticSample { domain: sector(), u: TrigPoly2::constant(3.0), ramp: 0.0, b: TrigVec2::zero() };
        let c = check_aleksandrov(&s, 64).unwrap();
        assert_eq!((c.sup_omega, c.sup_sigma, c.f_minus_norm, c.margin), (3.0, 3.0, 0.0, 0.0));
    }

    #[test]
    fn radius_is_subharmonic_with_boundary_maximum() {
        let s = EllipticSample { domain: sector(), u: TrigPoly2::zero(), ramp: 1.0, b: TrigVec2::zero() };
        let c = check_aleksandrov(&s, 64).unwrap();
        assert_eq!(c.f_minus_norm, 0.0);
        assert!((c.sup_sigma - 2.0).abs() < 1e-12);
        assert!(c.margin <= 0.0);
        assert!((s.f(1.5, 0.0) - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn neumann_violation_is_rejected() {
        let s = EllipticSample { domain: sector(), u: TrigPoly2::zero(), ramp: -1.0, b: TrigVec2::zero() };
        assert_eq!(check_aleksandrov(&s, 64), Err(NumericError::NeumannUnsatisfiable));
    }

    #[test]
    fn quadrature_of_constant_drift() {
        let mut b = TrigVec2::zero();
        b.x = TrigPoly2::constant(1.0);
        let d = AnnulusSector::new(2.0, 0.0, TAU).unwrap();
        let s = EllipticSample { domain: d, u: TrigPoly2::zero(), ramp: 1.0, b };
        let c = check_aleksandrov(&s, 128).unwrap();
        assert!((c.b_norm * c.b_norm - 3.0 * PI).abs() < 0.05);
    }

    #[test]
    fn small_battery_passes() {
        let cfg = AleksandrovConfig { grid: 32, trials: 12, ..Default::default() };
        let r = aleksandrov_battery(5, cfg).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r, aleksandrov_battery(5, cfg).unwrap());
    }
}
