use alloc::vec::Vec;

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Term {
    k: i32,
    l: i32,
    a: f64,
    b: f64,
}

/// `Σ a cos(ω(kx + ly)) + b sin(ω(kx + ly))` with `k ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly2 {
    omega: f64,
    degree: i32,
    terms: Vec<Term>,
}

/// Value, gradient and Laplacian at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub lap: f64,
}

/// `cos(ω j x)` and `sin(ω j x)` for `j = 0..=degree`.
#[derive(Clone, Debug)]
pub(crate) struct Phase {
    c: Vec<f64>,
    s: Vec<f64>,
}

impl Phase {
    pub(crate) fn new(x: f64, omega: f64, degree: i32) -> Self {
        let (s1, c1) = libm::sincos(omega * x);
        let mut c = alloc::vec![1.0];
        let mut s = alloc::vec![0.0];
        for j in 1..=degree as usize {
            c.push(c[j - 1] * c1 - s[j - 1] * s1);
            s.push(s[j - 1] * c1 + c[j - 1] * s1);
        }
        Phase { c, s }
    }

    fn get(&self, j: i32) -> (f64, f64) {
        let i = j.unsigned_abs() as usize;
        (self.c[i], if j < 0 { -self.s[i] } else { self.s[i] })
    }
}

impl TrigPoly2 {
    pub fn constant(c: f64) -> Self {
        TrigPoly2 { omega: 1.0, degree: 0, terms: alloc::vec![Term { k: 0, l: 0, a: c, b: 0.0 }] }
    }

    pub fn zero() -> Self {
        TrigPoly2 { omega: 1.0, degree: 0, terms: Vec::new() }
    }

    /// Random coefficients in `[-amp, amp] / (1 + k² + l²)` for every
    /// frequency with `|k|, |l| ≤ degree`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: i32, omega: f64, amp: f64) -> Self {
        let mut terms = Vec::new();
        for k in 0..=degree {
            for l in -degree..=degree {
                if k == 0 && l < 0 {
                    continue;
                }
                let w = amp / (1 + k * k + l * l) as f64;
                terms.push(Term {
                    k,
                    l,
                    a: rng.gen_range(-w..=w),
                    b: if k == 0 && l == 0 { 0.0 } else { rng.gen_range(-w..=w) },
                });
            }
        }
        TrigPoly2 { omega, degree, terms }
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub(crate) fn jet_with(&self, px: &Phase, py: &Phase) -> Jet {
        let mut j = Jet::default();
        let w = self.omega;
        for t in &self.terms {
            let (ck, sk) = px.get(t.k);
            let (cl, sl) = py.get(t.l);
            let c = ck * cl - sk * sl;
            let s = sk * cl + ck * sl;
            let val = t.a * c + t.b * s;
            let der = -t.a * s + t.b * c;
            j.v += val;
            j.dx += w * t.k as f64 * der;
            j.dy += w * t.l as f64 * der;
            j.lap -= w * w * (t.k * t.k + t.l * t.l) as f64 * val;
        }
        j
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet {
        self.jet_with(&Phase::new(x, self.omega, self.degree), &Phase::new(y, self.omega, self.degree))
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.jet(x, y).v
    }
}

/// A vector field with trigonometric polynomial components.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigVec2 {
    pub x: TrigPoly2,
    pub y: TrigPoly2,
}

impl TrigVec2 {
    pub fn zero() -> Self {
        TrigVec2 { x: TrigPoly2::zero(), y: TrigPoly2::zero() }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: i32, omega: f64, amp: f64) -> Self {
        TrigVec2 { x: TrigPoly2::random(rng, degree, omega, amp), y: TrigPoly2::random(rng, degree, omega, amp) }
    }

    pub fn value(&self, x: f64, y: f64) -> (f64, f64) {
        (self.x.value(x, y), self.y.value(x, y))
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn jet_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = TrigPoly2::random(&mut rng, 2, 1.3, 1.0);
        let (x, y, h) = (0.37, -1.2, 1e-4);
        let j = p.jet(x, y);
        let dx = (p.value(x + h, y) - p.value(x - h, y)) / (2.0 * h);
        let dy = (p.value(x, y + h) - p.value(x, y - h)) / (2.0 * h);
        let lap = (p.value(x + h, y) + p.value(x - h, y) + p.value(x, y + h) + p.value(x, y - h) - 4.0 * j.v) / (h * h);
        assert!((j.dx - dx).abs() < 1e-7);
        assert!((j.dy - dy).abs() < 1e-7);
        assert!((j.lap - lap).abs() < 1e-4);
        let direct: f64 = p
            .terms
            .iter()
            .map(|t| {
                let th = p.omega * (t.k as f64 * x + t.l as f64 * y);
                t.a * th.cos() + t.b * th.sin()
            })
            .sum();
        assert!((direct - j.v).abs() < 1e-12);
    }
}
