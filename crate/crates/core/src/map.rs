//! Degree-shifting linear maps between graded complexes.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::GradedF2Complex;
use crate::error::{MapError, Mismatch};
use crate::f2::{sym_diff, F2SparseMatrix, F2Vec};

/// A GF(2)-linear map `source_k → target_{k+shift}`, given by the image of
/// every source generator. Chain maps and chain homotopies share this type;
/// their defining identities are checked by [`verify_chain_map`] and
/// [`verify_chain_homotopy`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    source: Arc<GradedF2Complex>,
    target: Arc<GradedF2Complex>,
    shift: i64,
    images: Vec<Vec<usize>>,
}

pub type ChainMap = LinearMap;
pub type ChainHomotopy = LinearMap;

fn same_complex(a: &Arc<GradedF2Complex>, b: &Arc<GradedF2Complex>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl LinearMap {
    pub fn zero(source: Arc<GradedF2Complex>, target: Arc<GradedF2Complex>, shift: i64) -> Self {
        let images = alloc::vec![Vec::new(); source.len()];
        LinearMap { source, target, shift, images }
    }

    pub fn identity(c: Arc<GradedF2Complex>) -> Self {
        let images = (0..c.len()).map(|i| alloc::vec![i]).collect();
        LinearMap { source: c.clone(), target: c, shift: 0, images }
    }

    /// The boundary operator as a map of shift −1.
    pub fn boundary(c: Arc<GradedF2Complex>) -> Self {
        let images = (0..c.len()).map(|i| c.boundary_of(i).to_vec()).collect();
        LinearMap { source: c.clone(), target: c, shift: -1, images }
    }

    /// Build from global target indices per source generator; repeated
    /// indices cancel.
    pub fn from_indices(
        source: Arc<GradedF2Complex>,
        target: Arc<GradedF2Complex>,
        shift: i64,
        images: Vec<Vec<usize>>,
    ) -> Result<Self, MapError> {
        if images.len() != source.len() {
            return Err(MapError::Incompatible("image table length differs from source size"));
        }
        let mut clean = Vec::with_capacity(images.len());
        for (i, img) in images.into_iter().enumerate() {
            for &j in &img {
                if j >= target.len() {
                    return Err(MapError::UnknownGenerator {
                        source_id: source.id(i).into(),
                        id: alloc::format!("#{j}"),
                    });
                }
                if target.degree(j) != source.degree(i) + shift {
                    return Err(MapError::DegreeMismatch {
                        source_id: source.id(i).into(),
                        source_degree: source.degree(i),
                        target: target.id(j).into(),
                        target_degree: target.degree(j),
                        shift,
                    });
                }
            }
            clean.push(F2Vec::from_indices(target.len(), img).support().to_vec());
        }
        Ok(LinearMap { source, target, shift, images: clean })
    }

    /// Build from ids. Generators absent from `images` map to zero.
    pub fn from_ids<'a>(
        source: Arc<GradedF2Complex>,
        target: Arc<GradedF2Complex>,
        shift: i64,
        images: impl IntoIterator<Item = (&'a str, Vec<&'a str>)>,
    ) -> Result<Self, MapError> {
        let mut table = alloc::vec![Vec::new(); source.len()];
        let mut seen = alloc::vec![false; source.len()];
        for (s, ts) in images {
            let i = source.index_of(s).ok_or_else(|| MapError::UnknownSource(s.into()))?;
            if seen[i] {
                return Err(MapError::Incompatible("image given twice for one generator"));
            }
            seen[i] = true;
            for t in ts {
                let j = target
                    .index_of(t)
                    .ok_or_else(|| MapError::UnknownGenerator { source_id: s.into(), id: t.into() })?;
                table[i].push(j);
            }
        }
        Self::from_indices(source, target, shift, table)
    }

    pub fn source(&self) -> &Arc<GradedF2Complex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedF2Complex> {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn image_of(&self, i: usize) -> &[usize] {
        &self.images[i]
    }

    pub fn image_ids(&self, i: usize) -> Vec<String> {
        self.target.ids(&self.images[i])
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Vec::is_empty)
    }

    pub fn apply(&self, v: &F2Vec) -> F2Vec {
        assert_eq!(v.len(), self.source.len());
        let mut out = Vec::new();
        for &i in v.support() {
            out = sym_diff(&out, &self.images[i]);
        }
        F2Vec::from_indices(self.target.len(), out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap, MapError> {
        if !same_complex(&inner.target, &self.source) {
            return Err(MapError::Incompatible("target of inner map is not the source of outer map"));
        }
        let images = inner
            .images
            .iter()
            .map(|img| {
                let mut out = Vec::new();
                for &j in img {
                    out = sym_diff(&out, &self.images[j]);
                }
                out
            })
            .collect();
        Ok(LinearMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            shift: self.shift + inner.shift,
            images,
        })
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap, MapError> {
        if !same_complex(&self.source, &other.source) || !same_complex(&self.target, &other.target) {
            return Err(MapError::Incompatible("sum of maps between different complexes"));
        }
        if self.shift != other.shift {
            return Err(MapError::Incompatible("sum of maps with different shifts"));
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| sym_diff(a, b)).collect();
        Ok(LinearMap { source: self.source.clone(), target: self.target.clone(), shift: self.shift, images })
    }

    /// Same images, reinterpreted between complexes with identical
    /// generator lists but shifted degrees.
    pub fn regrade(
        &self,
        source: Arc<GradedF2Complex>,
        target: Arc<GradedF2Complex>,
        shift: i64,
    ) -> Result<LinearMap, MapError> {
        if source.len() != self.source.len() || target.len() != self.target.len() {
            return Err(MapError::Incompatible("regrade needs complexes of the same size"));
        }
        Self::from_indices(source, target, shift, self.images.clone())
    }

    /// Matrix of the map from degree `k` of the source to degree
    /// `k + shift` of the target, in local coordinates.
    pub fn matrix(&self, k: i64) -> F2SparseMatrix {
        let src = self.source.block(k);
        let tgt = self.target.block(k + self.shift);
        let entries: Vec<(usize, usize)> =
            src.clone().flat_map(|i| self.images[i].iter().map(move |&j| (j - tgt.start, i - src.start))).collect();
        F2SparseMatrix::from_entries(tgt.len(), src.len(), entries).expect("images respect the shift")
    }

    /// Full matrix in global coordinates.
    pub fn global_matrix(&self) -> F2SparseMatrix {
        let entries: Vec<(usize, usize)> =
            self.images.iter().enumerate().flat_map(|(i, img)| img.iter().map(move |&j| (j, i))).collect();
        F2SparseMatrix::from_entries(self.target.len(), self.source.len(), entries).expect("indices in range")
    }

    fn mismatch(&self, i: usize, lhs: &[usize], rhs: &[usize]) -> Mismatch {
        Mismatch { generator: self.source.id(i).into(), lhs: self.target.ids(lhs), rhs: self.target.ids(rhs) }
    }

    /// First generator where two maps with the same source and target differ.
    pub fn first_difference(&self, other: &LinearMap) -> Result<Option<Mismatch>, MapError> {
        if !same_complex(&self.source, &other.source) || !same_complex(&self.target, &other.target) {
            return Err(MapError::Incompatible("comparison of maps between different complexes"));
        }
        Ok((0..self.images.len())
            .find(|&i| self.images[i] != other.images[i])
            .map(|i| self.mismatch(i, &self.images[i], &other.images[i])))
    }

    /// First generator with a nonzero image.
    pub fn first_nonzero(&self) -> Option<Mismatch> {
        (0..self.images.len()).find(|&i| !self.images[i].is_empty()).map(|i| self.mismatch(i, &self.images[i], &[]))
    }
}

/// Check `f∂ = ∂f` on every generator.
pub fn verify_chain_map(f: &LinearMap) -> Result<(), Mismatch> {
    for i in 0..f.source.len() {
        let mut lhs = Vec::new();
        for &j in f.source.boundary_of(i) {
            lhs = sym_diff(&lhs, &f.images[j]);
        }
        let mut rhs = Vec::new();
        for &j in &f.images[i] {
            rhs = sym_diff(&rhs, f.target.boundary_of(j));
        }
        if lhs != rhs {
            return Err(f.mismatch(i, &lhs, &rhs));
        }
    }
    Ok(())
}

/// Check `f + g = ∂h + h∂` on every generator.
pub fn verify_chain_homotopy(f: &LinearMap, g: &LinearMap, h: &LinearMap) -> Result<(), HomotopyError> {
    if !same_complex(&f.source, &g.source) || !same_complex(&f.target, &g.target) || f.shift != g.shift {
        return Err(HomotopyError::Incompatible);
    }
    if !same_complex(&h.source, &f.source) || !same_complex(&h.target, &f.target) || h.shift != f.shift + 1 {
        return Err(HomotopyError::Incompatible);
    }
    for i in 0..f.source.len() {
        let lhs = sym_diff(&f.images[i], &g.images[i]);
        let mut rhs = Vec::new();
        for &j in &h.images[i] {
            rhs = sym_diff(&rhs, f.target.boundary_of(j));
        }
        for &j in f.source.boundary_of(i) {
            rhs = sym_diff(&rhs, &h.images[j]);
        }
        if lhs != rhs {
            return Err(HomotopyError::Fails(f.mismatch(i, &lhs, &rhs)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomotopyError {
    #[error("maps and homotopy have incompatible complexes or shifts")]
    Incompatible,
    #[error("homotopy identity fails {0}")]
    Fails(Mismatch),
}

/// Solve `f + g = ∂h + h∂` for `h`, restricted to the coefficients
/// `(source, target)` accepted by `allowed`. Returns `None` when no such
/// homotopy exists.
pub fn solve_chain_homotopy(
    f: &LinearMap,
    g: &LinearMap,
    allowed: &dyn Fn(usize, usize) -> bool,
) -> Result<Option<ChainHomotopy>, MapError> {
    if !same_complex(&f.source, &g.source) || !same_complex(&f.target, &g.target) || f.shift != g.shift {
        return Err(MapError::Incompatible("homotopy between maps of different type"));
    }
    let (src, tgt, shift) = (&f.source, &f.target, f.shift);
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for i in 0..src.len() {
        for t in tgt.block(src.degree(i) + shift + 1) {
            if allowed(i, t) {
                vars.push((i, t));
            }
        }
    }
    let mut coboundary = alloc::vec![Vec::new(); src.len()];
    for s in 0..src.len() {
        for &i in src.boundary_of(s) {
            coboundary[i].push(s);
        }
    }
    let mut eq_of = alloc::collections::BTreeMap::new();
    for i in 0..src.len() {
        for u in tgt.block(src.degree(i) + shift) {
            let n = eq_of.len();
            eq_of.insert((i, u), n);
        }
    }
    let mut entries = Vec::new();
    for (v, &(i, t)) in vars.iter().enumerate() {
        for &u in tgt.boundary_of(t) {
            entries.push((eq_of[&(i, u)], v));
        }
        for &s in &coboundary[i] {
            entries.push((eq_of[&(s, t)], v));
        }
    }
    let m = F2SparseMatrix::from_entries(eq_of.len(), vars.len(), entries).expect("equation indices in range");
    let mut rhs = Vec::new();
    for i in 0..src.len() {
        for u in sym_diff(&f.images[i], &g.images[i]) {
            rhs.push(eq_of[&(i, u)]);
        }
    }
    let b = F2Vec::from_indices(eq_of.len(), rhs);
    let Some(x) = m.solve(&b).expect("dimensions agree") else {
        return Ok(None);
    };
    let mut images = alloc::vec![Vec::new(); src.len()];
    for &v in x.support() {
        let (i, t) = vars[v];
        images[i].push(t);
    }
    LinearMap::from_indices(src.clone(), tgt.clone(), shift + 1, images).map(Some)
}
