//! Sparse linear algebra over the two-element field.
//!
//! Vectors store the sorted indices of their nonzero coordinates. Matrices
//! store one such list per column, so adding columns is a symmetric
//! difference of sorted lists.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::DimensionError;

/// A vector over GF(2) of fixed length, stored by its support.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Vec {
    len: usize,
    ones: Vec<usize>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec { len, ones: Vec::new() }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len, "index {i} out of range for length {len}");
        F2Vec { len, ones: vec![i] }
    }

    /// Builds a vector from indices; repeated indices cancel in pairs.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut ones: Vec<usize> = indices.into_iter().collect();
        for &i in &ones {
            assert!(i < len, "index {i} out of range for length {len}");
        }
        ones.sort_unstable();
        F2Vec { len, ones: cancel_pairs(ones) }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let ones = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        F2Vec { len: bits.len(), ones }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.ones.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.ones.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.ones
    }

    pub fn get(&self, i: usize) -> bool {
        self.ones.binary_search(&i).is_ok()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        let mut out = vec![false; self.len];
        for &i in &self.ones {
            out[i] = true;
        }
        out
    }

    pub fn add_assign(&mut self, other: &F2Vec) {
        assert_eq!(self.len, other.len, "length mismatch in F2Vec addition");
        self.ones = sym_diff(&self.ones, &other.ones);
    }

    pub fn add(&self, other: &F2Vec) -> F2Vec {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn dot(&self, other: &F2Vec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in F2Vec dot product");
        let (mut i, mut j, mut acc) = (0, 0, false);
        while i < self.ones.len() && j < other.ones.len() {
            match self.ones[i].cmp(&other.ones[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc ^= true;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vec[{}]{:?}", self.len, self.ones)
    }
}

fn cancel_pairs(sorted: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(sorted.len());
    for i in sorted {
        if out.last() == Some(&i) {
            out.pop();
        } else {
            out.push(i);
        }
    }
    out
}

pub(crate) fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A sparse matrix over GF(2) stored column by column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<usize>>,
}

impl F2SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        F2SparseMatrix { rows: n, cols: n, columns: (0..n).map(|i| vec![i]).collect() }
    }

    /// Builds a matrix from `(row, col)` positions. A position listed twice
    /// cancels, as it would when summing entries mod 2.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DimensionError> {
        let mut columns = vec![Vec::new(); cols];
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(DimensionError::EntryOutOfRange { row: r, col: c, rows, cols });
            }
            columns[c].push(r);
        }
        for col in &mut columns {
            col.sort_unstable();
            *col = cancel_pairs(core::mem::take(col));
        }
        Ok(F2SparseMatrix { rows, cols, columns })
    }

    pub fn from_columns(rows: usize, columns: Vec<F2Vec>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|v| {
                assert_eq!(v.len, rows, "column length mismatch");
                v.ones
            })
            .collect();
        F2SparseMatrix { rows, cols, columns }
    }

    pub fn from_dense(rows: &[Vec<bool>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &b) in row.iter().enumerate() {
                if b {
                    columns[j].push(i);
                }
            }
        }
        F2SparseMatrix { rows: nrows, cols: ncols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].binary_search(&row).is_ok()
    }

    pub fn column(&self, col: usize) -> F2Vec {
        F2Vec { len: self.rows, ones: self.columns[col].clone() }
    }

    pub fn column_support(&self, col: usize) -> &[usize] {
        &self.columns[col]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.columns.iter().enumerate().flat_map(|(c, rs)| rs.iter().map(move |&r| (r, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (c, rs) in self.columns.iter().enumerate() {
            for &r in rs {
                columns[r].push(c);
            }
        }
        F2SparseMatrix { rows: self.cols, cols: self.rows, columns }
    }

    pub fn mul_vec(&self, v: &F2Vec) -> Result<F2Vec, DimensionError> {
        if v.len != self.cols {
            return Err(DimensionError::Mismatch { expected: self.cols, found: v.len });
        }
        let mut out = Vec::new();
        for &c in &v.ones {
            out = sym_diff(&out, &self.columns[c]);
        }
        Ok(F2Vec { len: self.rows, ones: out })
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &F2SparseMatrix) -> Result<F2SparseMatrix, DimensionError> {
        if rhs.rows != self.cols {
            return Err(DimensionError::Mismatch { expected: self.cols, found: rhs.rows });
        }
        let columns = rhs
            .columns
            .iter()
            .map(|rc| {
                let mut out = Vec::new();
                for &k in rc {
                    out = sym_diff(&out, &self.columns[k]);
                }
                out
            })
            .collect();
        Ok(F2SparseMatrix { rows: self.rows, cols: rhs.cols, columns })
    }

    pub fn add(&self, rhs: &F2SparseMatrix) -> Result<F2SparseMatrix, DimensionError> {
        if rhs.rows != self.rows || rhs.cols != self.cols {
            return Err(DimensionError::Mismatch { expected: self.rows * self.cols, found: rhs.rows * rhs.cols });
        }
        let columns = self.columns.iter().zip(&rhs.columns).map(|(a, b)| sym_diff(a, b)).collect();
        Ok(F2SparseMatrix { rows: self.rows, cols: self.cols, columns })
    }

    /// Column reduction `R = M V` with pivots at the lowest nonzero row.
    pub fn reduce(&self) -> Reduction {
        let mut r = self.columns.clone();
        let mut v: Vec<Vec<usize>> = (0..self.cols).map(|j| vec![j]).collect();
        let mut pivot_col: Vec<Option<usize>> = vec![None; self.rows];
        for j in 0..self.cols {
            while let Some(&low) = r[j].last() {
                match pivot_col[low] {
                    Some(i) => {
                        r[j] = sym_diff(&r[j], &r[i]);
                        v[j] = sym_diff(&v[j], &v[i]);
                    }
                    None => {
                        pivot_col[low] = Some(j);
                        break;
                    }
                }
            }
        }
        Reduction { rows: self.rows, cols: self.cols, r, v, pivot_col }
    }

    pub fn rank(&self) -> usize {
        self.reduce().rank()
    }

    pub fn kernel_basis(&self) -> Vec<F2Vec> {
        self.reduce().kernel_basis()
    }

    /// Basis of the column space.
    pub fn image_basis(&self) -> Vec<F2Vec> {
        self.reduce().image_basis()
    }

    pub fn solve(&self, b: &F2Vec) -> Result<Option<F2Vec>, DimensionError> {
        self.reduce().solve(b)
    }
}

impl fmt::Debug for F2SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2SparseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of [`F2SparseMatrix::reduce`]: reduced columns `r` and the
/// column operations `v` with `M v_j = r_j`.
#[derive(Clone, Debug)]
pub struct Reduction {
    rows: usize,
    cols: usize,
    r: Vec<Vec<usize>>,
    v: Vec<Vec<usize>>,
    pivot_col: Vec<Option<usize>>,
}

impl Reduction {
    pub fn rank(&self) -> usize {
        self.r.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn kernel_basis(&self) -> Vec<F2Vec> {
        self.r
            .iter()
            .zip(&self.v)
            .filter(|(r, _)| r.is_empty())
            .map(|(_, v)| F2Vec { len: self.cols, ones: v.clone() })
            .collect()
    }

    pub fn image_basis(&self) -> Vec<F2Vec> {
        self.r.iter().filter(|r| !r.is_empty()).map(|r| F2Vec { len: self.rows, ones: r.clone() }).collect()
    }

    /// Whether `b` lies in the column space.
    pub fn contains(&self, b: &F2Vec) -> bool {
        matches!(self.solve(b), Ok(Some(_)))
    }

    pub fn solve(&self, b: &F2Vec) -> Result<Option<F2Vec>, DimensionError> {
        if b.len != self.rows {
            return Err(DimensionError::Mismatch { expected: self.rows, found: b.len });
        }
        let mut rem = b.ones.clone();
        let mut x: Vec<usize> = Vec::new();
        while let Some(&low) = rem.last() {
            match self.pivot_col[low] {
                Some(j) => {
                    rem = sym_diff(&rem, &self.r[j]);
                    x = sym_diff(&x, &self.v[j]);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(F2Vec { len: self.cols, ones: x }))
    }
}

/// Dimension of the span of a list of vectors of equal length.
pub fn span_rank(len: usize, vectors: &[F2Vec]) -> usize {
    F2SparseMatrix::from_columns(len, vectors.to_vec()).rank()
}

/// Whether two lists of vectors span the same subspace.
pub fn same_span(len: usize, a: &[F2Vec], b: &[F2Vec]) -> bool {
    let ra = span_rank(len, a);
    let rb = span_rank(len, b);
    if ra != rb {
        return false;
    }
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    span_rank(len, &both) == ra
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;

    fn brute_rank(m: &F2SparseMatrix) -> usize {
        let mut seen = alloc::collections::BTreeSet::new();
        for mask in 0u32..(1 << m.cols()) {
            let v = F2Vec::from_indices(m.cols(), (0..m.cols()).filter(|i| mask >> i & 1 == 1));
            seen.insert(m.mul_vec(&v).unwrap().to_bools());
        }
        (seen.len() as f64).log2().round() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2SparseMatrix::zeros(0, 0).rank(), 0);
        assert_eq!(F2SparseMatrix::identity(3).rank(), 3);
        let m = F2SparseMatrix::from_dense(&[vec![true, true], vec![true, true]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(brute_rank(&m), 1);
    }

    #[test]
    fn duplicate_entries_cancel() {
        let m = F2SparseMatrix::from_entries(2, 2, [(0, 0), (0, 0), (1, 1)]).unwrap();
        assert!(!m.get(0, 0));
        assert!(m.get(1, 1));
        assert!(F2SparseMatrix::from_entries(2, 2, [(2, 0)]).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!(F2SparseMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(F2SparseMatrix::zeros(2, 3).kernel_basis().len(), 3);
        let m = F2SparseMatrix::from_dense(&[vec![true, true, false], vec![false, true, true]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_bools(), vec![true, true, true]);
        let nonzero_kernel: Vec<u32> = (1u32..8)
            .filter(|mask| {
                let v = F2Vec::from_indices(3, (0..3).filter(|i| mask >> i & 1 == 1));
                m.mul_vec(&v).unwrap().is_zero()
            })
            .collect();
        assert_eq!(nonzero_kernel, vec![7]);
    }

    #[test]
    fn solve_examples() {
        let id = F2SparseMatrix::identity(2);
        let x = id.solve(&F2Vec::from_bools(&[true, false])).unwrap().unwrap();
        assert_eq!(x.to_bools(), vec![true, false]);
        let z = F2SparseMatrix::zeros(1, 1);
        assert_eq!(z.solve(&F2Vec::unit(1, 0)).unwrap(), None);
        let m = F2SparseMatrix::from_dense(&[vec![true, true], vec![false, true]]);
        let b = F2Vec::from_bools(&[false, true]);
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(x.to_bools(), vec![true, true]);
        let candidates: Vec<u32> = (0u32..4)
            .filter(|mask| {
                let v = F2Vec::from_indices(2, (0..2).filter(|i| mask >> i & 1 == 1));
                m.mul_vec(&v).unwrap() == b
            })
            .collect();
        assert_eq!(candidates, vec![3]);
        assert!(m.solve(&F2Vec::zeros(3)).is_err());
    }

    #[test]
    fn span_helpers() {
        let a = [F2Vec::from_bools(&[true, true, false]), F2Vec::from_bools(&[false, true, true])];
        let b = [F2Vec::from_bools(&[true, false, true]), F2Vec::from_bools(&[true, true, false])];
        assert!(same_span(3, &a, &b));
        assert!(!same_span(3, &a, &[F2Vec::unit(3, 0)]));
    }

    fn matrix_strategy() -> impl Strategy<Value = F2SparseMatrix> {
        (0usize..9, 0usize..9).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::bool::weighted(0.3), r * c).prop_map(move |bits| {
                let rows: Vec<Vec<bool>> = (0..r).map(|i| bits[i * c..(i + 1) * c].to_vec()).collect();
                if r == 0 {
                    F2SparseMatrix::zeros(0, c)
                } else {
                    F2SparseMatrix::from_dense(&rows)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in matrix_strategy()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            prop_assert_eq!(span_rank(m.cols(), &k), k.len());
        }

        #[test]
        fn rank_matches_transpose_and_brute_force(m in matrix_strategy()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert_eq!(m.rank(), brute_rank(&m));
        }

        #[test]
        fn solve_is_exact(m in matrix_strategy(), seed in any::<u64>()) {
            let x0 = F2Vec::from_indices(m.cols(), (0..m.cols()).filter(|i| seed >> (i % 64) & 1 == 1));
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap();
            prop_assert!(x.is_some());
            prop_assert_eq!(m.mul_vec(&x.unwrap()).unwrap(), b);
        }
    }
}
