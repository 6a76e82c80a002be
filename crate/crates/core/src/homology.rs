//! Homology with representatives and induced maps.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::complex::GradedF2Complex;
use crate::error::{MapError, Mismatch};
use crate::f2::{F2SparseMatrix, F2Vec, Reduction};
use crate::map::LinearMap;

#[derive(Clone, Debug)]
pub struct DegreeHomology {
    pub betti: usize,
    /// Cycles in local coordinates of the degree, independent modulo
    /// boundaries.
    pub representatives: Vec<F2Vec>,
    boundary_rank: usize,
    basis: Reduction,
}

#[derive(Clone, Debug, Default)]
pub struct HomologySummary {
    pub degrees: BTreeMap<i64, DegreeHomology>,
}

impl HomologySummary {
    pub fn betti(&self, k: i64) -> usize {
        self.degrees.get(&k).map_or(0, |d| d.betti)
    }

    pub fn betti_range(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|k| self.betti(k)).collect()
    }

    /// Nonzero Betti numbers keyed by degree.
    pub fn betti_table(&self) -> BTreeMap<i64, usize> {
        self.degrees.iter().filter(|(_, d)| d.betti > 0).map(|(&k, d)| (k, d.betti)).collect()
    }

    pub fn total(&self) -> usize {
        self.degrees.values().map(|d| d.betti).sum()
    }

    pub fn representatives(&self, k: i64) -> &[F2Vec] {
        self.degrees.get(&k).map_or(&[], |d| &d.representatives)
    }

    /// Coordinates of a local cycle of degree `k` in the representative
    /// basis, or `None` if the vector is not a cycle.
    pub fn coordinates(&self, k: i64, cycle: &F2Vec) -> Option<F2Vec> {
        let Some(d) = self.degrees.get(&k) else {
            return if cycle.is_zero() { Some(F2Vec::zeros(0)) } else { None };
        };
        let x = d.basis.solve(cycle).ok()??;
        Some(F2Vec::from_indices(
            d.betti,
            x.support().iter().filter(|&&j| j >= d.boundary_rank).map(|&j| j - d.boundary_rank),
        ))
    }
}

pub fn homology(c: &GradedF2Complex) -> HomologySummary {
    let mut degrees = BTreeMap::new();
    for k in c.degrees() {
        let n = c.dim(k);
        let cycles = c.boundary_matrix(k).kernel_basis();
        let boundaries = c.boundary_matrix(k + 1).image_basis();
        let boundary_rank = boundaries.len();
        let mut columns = boundaries;
        columns.extend(cycles.iter().cloned());
        let reduction = F2SparseMatrix::from_columns(n, columns).reduce();
        let kept: Vec<bool> = {
            let image_positions = independent_columns(&reduction, boundary_rank + cycles.len());
            (0..cycles.len()).map(|j| image_positions[boundary_rank + j]).collect()
        };
        let representatives: Vec<F2Vec> = cycles.into_iter().zip(&kept).filter(|(_, &k)| k).map(|(v, _)| v).collect();
        let mut basis_cols = c.boundary_matrix(k + 1).image_basis();
        basis_cols.extend(representatives.iter().cloned());
        let basis = F2SparseMatrix::from_columns(n, basis_cols).reduce();
        degrees.insert(k, DegreeHomology { betti: representatives.len(), representatives, boundary_rank, basis });
    }
    HomologySummary { degrees }
}

fn independent_columns(r: &Reduction, cols: usize) -> Vec<bool> {
    // a column survives reduction exactly when it is independent of the
    // columns to its left
    let zero_cols: Vec<F2Vec> = r.kernel_basis();
    let mut out = alloc::vec![true; cols];
    for v in zero_cols {
        if let Some(&last) = v.support().last() {
            out[last] = false;
        }
    }
    out
}

/// Matrices of `f_*` in the representative bases, keyed by source degree.
pub fn induced_map_on_homology(
    f: &LinearMap,
    hs: &HomologySummary,
    ht: &HomologySummary,
) -> Result<BTreeMap<i64, F2SparseMatrix>, MapError> {
    let (src, tgt) = (f.source(), f.target());
    let mut out = BTreeMap::new();
    for k in src.degrees() {
        let reps = hs.representatives(k);
        let rows = ht.betti(k + f.shift());
        let mut cols = Vec::with_capacity(reps.len());
        for r in reps {
            let img = f.apply(&src.globalize(k, r));
            let local = tgt.localize(k + f.shift(), &img);
            let coords = ht.coordinates(k + f.shift(), &local).ok_or_else(|| {
                MapError::NotChainMap(Mismatch {
                    generator: alloc::format!("homology class in degree {k}"),
                    lhs: tgt.ids(img.support()),
                    rhs: Vec::new(),
                })
            })?;
            cols.push(coords);
        }
        out.insert(k, F2SparseMatrix::from_columns(rows, cols));
    }
    Ok(out)
}

/// Convenience wrapper computing both homologies.
pub fn induced_map(f: &LinearMap) -> Result<BTreeMap<i64, F2SparseMatrix>, MapError> {
    induced_map_on_homology(f, &homology(f.source()), &homology(f.target()))
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::complex::ComplexBuilder;
    use crate::map::verify_chain_map;
    use alloc::string::String;
    use alloc::sync::Arc;
    use alloc::vec;
    use proptest::prelude::*;

    fn circle() -> GradedF2Complex {
        let mut b = ComplexBuilder::new();
        b.generator("v", 0).generator("w", 0).generator("e", 1).generator("f", 1);
        b.boundary("e", ["v", "w"]).boundary("f", ["v", "w"]);
        b.build().unwrap()
    }

    // brute force: count cycles and boundaries by enumerating all vectors
    fn brute_betti(c: &GradedF2Complex, k: i64) -> usize {
        let n = c.dim(k);
        let d = c.boundary_matrix(k);
        let up = c.boundary_matrix(k + 1);
        let vecs = |len: usize| {
            (0u32..(1 << len)).map(move |m| F2Vec::from_indices(len, (0..len).filter(|i| m >> i & 1 == 1)))
        };
        let cycles = vecs(n).filter(|v| d.mul_vec(v).unwrap().is_zero()).count();
        let bounds: alloc::collections::BTreeSet<Vec<bool>> =
            vecs(c.dim(k + 1)).map(|v| up.mul_vec(&v).unwrap().to_bools()).collect();
        (cycles.trailing_zeros() - bounds.len().trailing_zeros()) as usize
    }

    #[test]
    fn examples() {
        let mut b = ComplexBuilder::new();
        b.generator("a", 1).generator("b", 0).boundary("a", ["b"]);
        assert_eq!(homology(&b.build().unwrap()).total(), 0);

        let c = circle();
        let h = homology(&c);
        assert_eq!(h.betti_range(0, 1), vec![1, 1]);
        assert_eq!(brute_betti(&c, 0), 1);
        assert_eq!(brute_betti(&c, 1), 1);

        let mut b = ComplexBuilder::new();
        b.generator("min", 0).generator("max", 2);
        assert_eq!(homology(&b.build().unwrap()).betti_range(0, 2), vec![1, 0, 1]);

        assert_eq!(homology(&c.suspension()).betti_range(0, 2), vec![0, 1, 1]);
    }

    #[test]
    fn induced_identity_and_zero() {
        let c = Arc::new(circle());
        let id = induced_map(&LinearMap::identity(c.clone())).unwrap();
        for (k, m) in &id {
            assert_eq!(*m, F2SparseMatrix::identity(homology(&c).betti(*k)));
        }
        let z = induced_map(&LinearMap::zero(c.clone(), c.clone(), 0)).unwrap();
        assert!(z.values().all(F2SparseMatrix::is_zero));
    }

    #[test]
    fn coordinates_of_boundary_are_zero() {
        let c = circle();
        let h = homology(&c);
        let v = F2Vec::from_bools(&[true, true]);
        assert!(h.coordinates(0, &v).unwrap().is_zero());
        assert_eq!(h.coordinates(0, &F2Vec::unit(2, 0)).unwrap().weight(), 1);
        assert!(h.coordinates(1, &F2Vec::unit(2, 0)).is_none());
    }

    /// Cancelling pairs plus free generators, conjugated by a random
    /// unitriangular change of basis in each degree.
    pub(crate) fn random_complex(seed: u64, max_gens: usize) -> GradedF2Complex {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut dims = [0usize; 4];
        let total = rng.gen_range(1..=max_gens);
        for _ in 0..total {
            dims[rng.gen_range(0..4)] += 1;
        }
        // standard form: pair generators with ∂x = y, then conjugate per degree
        let mut ids: Vec<Vec<String>> = Vec::new();
        for (k, &d) in dims.iter().enumerate() {
            ids.push((0..d).map(|i| alloc::format!("g{k}_{i}")).collect());
        }
        let mut std_bd: Vec<Vec<Vec<usize>>> = dims.iter().map(|&d| vec![Vec::new(); d]).collect();
        let mut used_below = [0usize; 4];
        for k in 1..4 {
            let free_below = dims[k - 1] - used_below[k - 1];
            let pairs = rng.gen_range(0..=dims[k].min(free_below));
            for p in 0..pairs {
                std_bd[k][p] = vec![used_below[k - 1] + p];
            }
            used_below[k - 1] += pairs;
            // sources of pairs cannot also be targets
            used_below[k] = pairs;
        }
        // invertible upper-triangular change of basis per degree
        let mut g: Vec<Vec<Vec<usize>>> = Vec::new();
        for &d in &dims {
            let mut cols = Vec::new();
            for j in 0..d {
                let mut col = vec![j];
                for i in 0..j {
                    if rng.gen_bool(0.4) {
                        col.push(i);
                    }
                }
                col.sort();
                cols.push(col);
            }
            g.push(cols);
        }
        // ∂ = g ∂0 g⁻¹
        let inv = |cols: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
            let d = cols.len();
            let m = F2SparseMatrix::from_columns(d, cols.iter().map(|c| F2Vec::from_indices(d, c.clone())).collect());
            (0..d).map(|j| m.solve(&F2Vec::unit(d, j)).unwrap().unwrap().support().to_vec()).collect()
        };
        let mut b = ComplexBuilder::new();
        for (k, names) in ids.iter().enumerate() {
            for n in names {
                b.generator(n.clone(), k as i64);
            }
        }
        for k in 1..4 {
            let ginv = inv(&g[k]);
            for j in 0..dims[k] {
                let mut acc = F2Vec::zeros(dims[k - 1]);
                for &s in &ginv[j] {
                    for &t in &std_bd[k][s] {
                        acc.add_assign(&F2Vec::from_indices(dims[k - 1], g[k - 1][t].clone()));
                    }
                }
                let targets: Vec<String> = acc.support().iter().map(|&i| ids[k - 1][i].clone()).collect();
                b.boundary(&ids[k][j], targets);
            }
        }
        b.build().expect("conjugated complex squares to zero")
    }

    fn permuted(c: &GradedF2Complex, seed: u64) -> GradedF2Complex {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.shuffle(&mut rng);
        let mut b = ComplexBuilder::new();
        for &i in &order {
            b.push(c.generator(i).clone());
            b.boundary(c.id(i), c.ids(c.boundary_of(i)));
        }
        b.build().unwrap()
    }

    proptest! {
        #[test]
        fn permutation_invariance(seed in any::<u64>(), pseed in any::<u64>()) {
            let c = random_complex(seed, 12);
            let p = permuted(&c, pseed);
            prop_assert_eq!(homology(&c).betti_table(), homology(&p).betti_table());
        }

        #[test]
        fn euler_characteristic(seed in any::<u64>()) {
            let c = random_complex(seed, 14);
            let h = homology(&c);
            let chi_h: i64 = h.degrees.iter().map(|(&k, d)| if k % 2 == 0 { d.betti as i64 } else { -(d.betti as i64) }).sum();
            prop_assert_eq!(chi_h, c.euler_characteristic());
        }

        #[test]
        fn matches_brute_force(seed in any::<u64>()) {
            let c = random_complex(seed, 9);
            let h = homology(&c);
            for k in c.degrees() {
                prop_assert_eq!(h.betti(k), brute_betti(&c, k));
                for r in h.representatives(k) {
                    prop_assert!(c.boundary_matrix(k).mul_vec(r).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn suspension_shifts_betti(seed in any::<u64>()) {
            let c = random_complex(seed, 12);
            let h = homology(&c);
            let hs = homology(&c.suspension());
            for k in -1..6 {
                prop_assert_eq!(hs.betti(k), h.betti(k - 1));
            }
        }

        #[test]
        fn induced_is_functorial(seed in any::<u64>()) {
            // f = boundary-compatible projections: use identity and the
            // homotopically trivial map ∂h + h∂ for a random h
            use rand::{Rng, SeedableRng};
            let c = Arc::new(random_complex(seed, 10));
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x55);
            let mut table = vec![Vec::new(); c.len()];
            for i in 0..c.len() {
                for t in c.block(c.degree(i) + 1) {
                    if rng.gen_bool(0.3) {
                        table[i].push(t);
                    }
                }
            }
            let h = LinearMap::from_indices(c.clone(), c.clone(), 1, table).unwrap();
            let d = LinearMap::boundary(c.clone());
            let null = d.compose(&h).unwrap().add(&h.compose(&d).unwrap()).unwrap();
            let f = LinearMap::identity(c.clone()).add(&null).unwrap();
            prop_assert!(verify_chain_map(&f).is_ok());
            let ff = f.compose(&f).unwrap();
            let (mf, mff) = (induced_map(&f).unwrap(), induced_map(&ff).unwrap());
            for (k, m) in &mf {
                prop_assert_eq!(&m.mul(m).unwrap(), &mff[k]);
                prop_assert_eq!(m, &F2SparseMatrix::identity(m.rows()));
            }
        }
    }
}
