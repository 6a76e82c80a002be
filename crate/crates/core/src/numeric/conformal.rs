use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use super::trig::{Jet, TrigPoly2, TrigVec2};
use super::{trial_rng, NumericError};

pub const GRADIENT_TRANSPORT_TOL: f64 = 1e-4;
pub const LAPLACIAN_TRANSPORT_TOL: f64 = 1e-4;

/// Fields on the half-cylinder `[0, S] × R/Z`: `u(s, t) = P(s, t) + αs` with
/// `P` 1-periodic in both variables, a drift `b`, and `f = Δu + b·∇u`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderField {
    pub length: f64,
    pub u: TrigPoly2,
    pub slope: f64,
    pub b: TrigVec2,
}

/// `φ⁻¹(z) = (log|z|, arg z)/2π`.
fn cylinder_coords(x: f64, y: f64) -> (f64, f64) {
    (libm::log(libm::hypot(x, y)) / TAU, libm::atan2(y, x) / TAU)
}

impl CylinderField {
    pub fn new(length: f64, u: TrigPoly2, slope: f64, b: TrigVec2) -> Result<Self, NumericError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(NumericError::Domain("cylinder length must be positive"));
        }
        Ok(CylinderField { length, u, slope, b })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        CylinderField {
            length: rng.gen_range(0.1..0.2),
            u: TrigPoly2::random(rng, 2, TAU, 1.0),
            slope: rng.gen_range(-1.0..1.0),
            b: TrigVec2::random(rng, 1, TAU, 1.0),
        }
    }

    pub fn u_jet(&self, s: f64, t: f64) -> Jet {
        let mut j = self.u.jet(s, t);
        j.v += self.slope * s;
        j.dx += self.slope;
        j
    }

    pub fn f(&self, s: f64, t: f64) -> f64 {
        let j = self.u_jet(s, t);
        let (b1, b2) = self.b.value(s, t);
        j.lap + b1 * j.dx + b2 * j.dy
    }

    /// Outer radius `e^{2πS}` of the image annulus.
    pub fn outer_radius(&self) -> f64 {
        libm::exp(TAU * self.length)
    }

    /// `c = 2π e^{2πS}`, so that `‖b̃‖` and `‖f̃⁻‖` lie within a factor `c`
    /// of `‖b‖` and `‖f⁻‖`.
    pub fn norm_constant(&self) -> f64 {
        TAU * self.outer_radius()
    }

    /// `ũ = u∘φ⁻¹`.
    pub fn u_tilde(&self, x: f64, y: f64) -> f64 {
        let (s, t) = cylinder_coords(x, y);
        self.u_jet(s, t).v
    }

    /// `b̃(z) = z b(φ⁻¹z) / (2π|z|²)`.
    pub fn b_tilde(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, t) = cylinder_coords(x, y);
        let (b1, b2) = self.b.value(s, t);
        let k = TAU * (x * x + y * y);
        ((x * b1 - y * b2) / k, (x * b2 + y * b1) / k)
    }

    /// `f̃(z) = f(φ⁻¹z) / (4π²|z|²)`.
    pub fn f_tilde(&self, x: f64, y: f64) -> f64 {
        let (s, t) = cylinder_coords(x, y);
        self.f(s, t) / (TAU * TAU * (x * x + y * y))
    }
}

/// `ũ` at the grid points `(i h, j h)` of the annulus `1 < |z| < e^{2πS}`.
pub fn cylinder_annulus_transport(field: &CylinderField, grid: usize) -> Vec<[f64; 3]> {
    let h = 1.0 / grid as f64;
    let r = field.outer_radius();
    let m = libm::ceil(r / h) as i64;
    let mut out = Vec::new();
    for j in -m..=m {
        for i in -m..=m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let r2 = x * x + y * y;
            if r2 > 1.0 && r2 < r * r {
                out.push([x, y, field.u_tilde(x, y)]);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportReport {
    pub points: usize,
    /// Largest `|2π z̄ ∇ũ − ∇u| / max(|∇u|, 1)` with `∇ũ` by fourth-order
    /// central differences.
    pub max_gradient_error: f64,
    /// Largest `|4π²|z|² Δũ − Δu| / max(|Δu|, 1)` with the fourth-order Laplacian.
    pub max_laplacian_error: f64,
    /// Largest `|Δũ + b̃·∇ũ − f̃| · 4π²|z|² / max(|f|, 1)`.
    pub max_equation_residual: f64,
    pub b_norm: f64,
    pub b_tilde_norm: f64,
    pub f_minus_norm: f64,
    pub f_tilde_minus_norm: f64,
    pub constant: f64,
    pub norms_within_constant: bool,
    pub pass: bool,
}

/// Checks the transformation rules at `points` random points of the annulus
/// with difference step `h` and compares the `L²` norms of `b`, `f⁻` with
/// those of `b̃`, `f̃⁻` by midpoint quadrature on grids of step `1/grid`.
pub fn check_transport<R: Rng + ?Sized>(
    field: &CylinderField,
    rng: &mut R,
    points: usize,
    h: f64,
    grid: usize,
) -> TransportReport {
    let outer = field.outer_radius();
    let (mut grad, mut lap, mut eq) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..points {
        let r = rng.gen_range(1.0..outer);
        let (sn, cs) = libm::sincos(rng.gen_range(0.0..TAU));
        let (x, y) = (r * cs, r * sn);
        let (s, t) = cylinder_coords(x, y);
        let j = field.u_jet(s, t);
        let c = field.u_tilde(x, y);
        let ax_line = [-2.0, -1.0, 1.0, 2.0].map(|k| field.u_tilde(x + k * h, y));
        let ay_line = [-2.0, -1.0, 1.0, 2.0].map(|k| field.u_tilde(x, y + k * h));
        let (gx, gy) = (first_difference(ax_line, h), first_difference(ay_line, h));
        let lt = second_difference(ax_line, c, h) + second_difference(ay_line, c, h);
        // 2π z̄ (gx + i gy)
        let (ax, ay) = (TAU * (x * gx + y * gy), TAU * (x * gy - y * gx));
        let gn = libm::hypot(j.dx, j.dy).max(1.0);
        grad = grad.max(libm::hypot(ax - j.dx, ay - j.dy) / gn);
        let z2 = x * x + y * y;
        lap = lap.max(libm::fabs(TAU * TAU * z2 * lt - j.lap) / j.lap.abs().max(1.0));
        let (bx, by) = field.b_tilde(x, y);
        let res = lt + bx * gx + by * gy - field.f_tilde(x, y);
        eq = eq.max(libm::fabs(res) * TAU * TAU * z2 / field.f(s, t).abs().max(1.0));
    }
    let (b_norm, f_minus_norm) = cylinder_norms(field, grid);
    let (b_tilde_norm, f_tilde_minus_norm) = annulus_norms(field, grid);
    let constant = field.norm_constant();
    let within = |a: f64, b: f64| a <= constant * b && b <= constant * a;
    let norms_within_constant = within(b_norm, b_tilde_norm) && within(f_minus_norm, f_tilde_minus_norm);
    TransportReport {
        points,
        max_gradient_error: grad,
        max_laplacian_error: lap,
        max_equation_residual: eq,
        b_norm,
        b_tilde_norm,
        f_minus_norm,
        f_tilde_minus_norm,
        constant,
        norms_within_constant,
        pass: grad <= GRADIENT_TRANSPORT_TOL
            && lap <= LAPLACIAN_TRANSPORT_TOL
            && eq <= LAPLACIAN_TRANSPORT_TOL
            && norms_within_constant,
    }
}

/// Fourth-order central difference from values at `x − 2h, x − h, x + h, x + 2h`.
fn first_difference(v: [f64; 4], h: f64) -> f64 {
    (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h)
}

fn second_difference(v: [f64; 4], c: f64, h: f64) -> f64 {
    (-v[0] + 16.0 * v[1] - 30.0 * c + 16.0 * v[2] - v[3]) / (12.0 * h * h)
}

fn cylinder_norms(field: &CylinderField, grid: usize) -> (f64, f64) {
    let h = 1.0 / grid as f64;
    let ns = (libm::ceil(field.length / h) as usize).max(1);
    let hs = field.length / ns as f64;
    let (mut b2, mut f2) = (0.0, 0.0);
    for i in 0..ns {
        for j in 0..grid {
            let (s, t) = ((i as f64 + 0.5) * hs, (j as f64 + 0.5) * h);
            let (b1, bb) = field.b.value(s, t);
            b2 += b1 * b1 + bb * bb;
            let f = field.f(s, t);
            if f < 0.0 {
                f2 += f * f;
            }
        }
    }
    (libm::sqrt(b2 * hs * h), libm::sqrt(f2 * hs * h))
}

fn annulus_norms(field: &CylinderField, grid: usize) -> (f64, f64) {
    let h = 1.0 / grid as f64;
    let r = field.outer_radius();
    let m = libm::ceil(r / h) as i64;
    let (mut b2, mut f2) = (0.0, 0.0);
    for j in -m..m {
        for i in -m..m {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let r2 = x * x + y * y;
            if !(r2 > 1.0 && r2 < r * r) {
                continue;
            }
            let (b1, bb) = field.b_tilde(x, y);
            b2 += b1 * b1 + bb * bb;
            let f = field.f_tilde(x, y);
            if f < 0.0 {
                f2 += f * f;
            }
        }
    }
    (libm::sqrt(b2 * h * h), libm::sqrt(f2 * h * h))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportBattery {
    pub seed: u64,
    pub trials: usize,
    pub reports: Vec<TransportReport>,
    pub max_gradient_error: f64,
    pub pass: bool,
}

/// Random cylinder fields, each checked at `points` points with step `1/256`.
pub fn transport_battery(seed: u64, trials: usize, points: usize) -> TransportBattery {
    let mut reports = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let field = CylinderField::random(&mut rng);
        reports.push(check_transport(&field, &mut rng, points, 1.0 / 256.0, 64));
    }
    let max_gradient_error = reports.iter().map(|r| r.max_gradient_error).fold(0.0, f64::max);
    let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
    TransportBattery { seed, trials, reports, max_gradient_error, pass }
}
