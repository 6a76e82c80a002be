use alloc::vec::Vec;

use rand::Rng;

use super::NumericError;

/// A symmetric positive definite matrix with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
    inv: Vec<f64>,
}

fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

impl SymMatrix {
    /// Row-major entries; rejects asymmetric or indefinite input.
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self, NumericError> {
        if n == 0 || a.len() != n * n || a.iter().any(|x| !x.is_finite()) {
            return Err(NumericError::NotPositiveDefinite);
        }
        for i in 0..n {
            for j in 0..i {
                let (x, y) = (a[i * n + j], a[j * n + i]);
                if libm::fabs(x - y) > 1e-12 * (1.0 + libm::fabs(x)) {
                    return Err(NumericError::NotPositiveDefinite);
                }
            }
        }
        let l = cholesky(n, &a).ok_or(NumericError::NotPositiveDefinite)?;
        let mut inv = alloc::vec![0.0; n * n];
        for c in 0..n {
            let mut y = alloc::vec![0.0; n];
            for i in 0..n {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= l[i * n + k] * y[k];
                }
                y[i] = s / l[i * n + i];
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= l[k * n + i] * inv[k * n + c];
                }
                inv[i * n + c] = s / l[i * n + i];
            }
        }
        Ok(SymMatrix { n, a, inv })
    }

    pub fn identity(n: usize) -> Self {
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        SymMatrix { n, a: a.clone(), inv: a }
    }

    /// `BBᵀ + shift·I` with entries of `B` uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, shift: f64) -> Self {
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += shift;
        }
        for i in 0..n {
            for j in 0..i {
                a[j * n + i] = a[i * n + j];
            }
        }
        Self::new(n, a).expect("shifted Gram matrix is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.a
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        mat_vec(self.n, &self.a, v, out);
    }

    pub fn apply_inv(&self, v: &[f64], out: &mut [f64]) {
        mat_vec(self.n, &self.inv, v, out);
    }

    /// `vᵀ A v`.
    pub fn quad(&self, v: &[f64]) -> f64 {
        quad(self.n, &self.a, v)
    }

    /// `vᵀ A⁻¹ v`.
    pub fn quad_inv(&self, v: &[f64]) -> f64 {
        quad(self.n, &self.inv, v)
    }
}

fn mat_vec(n: usize, m: &[f64], v: &[f64], out: &mut [f64]) {
    for i in 0..n {
        out[i] = (0..n).map(|j| m[i * n + j] * v[j]).sum();
    }
}

fn quad(n: usize, m: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += v[i] * m[i * n + j] * v[j];
        }
    }
    s
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod test {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn inverse_of_random_spd() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 1..5 {
            let m = SymMatrix::random(&mut rng, n, 0.5);
            for c in 0..n {
                let e: Vec<f64> = (0..n).map(|i| if i == c { 1.0 } else { 0.0 }).collect();
                let (mut y, mut z) = (alloc::vec![0.0; n], alloc::vec![0.0; n]);
                m.apply_inv(&e, &mut y);
                m.apply(&y, &mut z);
                for i in 0..n {
                    assert!((z[i] - e[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(SymMatrix::new(2, alloc::vec![1.0, 2.0, 2.0, 1.0]).is_err());
        assert!(SymMatrix::new(2, alloc::vec![1.0, 0.5, 0.0, 1.0]).is_err());
    }
}
