//! Finitely supported Z-graded chain complexes over GF(2).
//!
//! Generators are kept grouped by ascending degree, in insertion order within
//! a degree, and are addressed by a global index. Over GF(2) every sign in
//! the usual conventions (suspension, cones) disappears, so boundaries are
//! stored as plain sets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::ComplexError;
use crate::f2::{sym_diff, F2SparseMatrix, F2Vec};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Label {
    pub action: Option<f64>,
    pub class: Option<String>,
}

impl Label {
    pub fn action(a: f64) -> Self {
        Label { action: Some(a), class: None }
    }

    pub fn is_empty(&self) -> bool {
        self.action.is_none() && self.class.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedF2Complex {
    gens: Vec<Generator>,
    index: BTreeMap<String, usize>,
    blocks: BTreeMap<i64, Range<usize>>,
    boundary: Vec<Vec<usize>>,
}

impl GradedF2Complex {
    pub fn empty() -> Self {
        GradedF2Complex { gens: Vec::new(), index: BTreeMap::new(), blocks: BTreeMap::new(), boundary: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn id(&self, i: usize) -> &str {
        &self.gens[i].id
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.gens[i].degree
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Degrees that carry at least one generator, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.blocks.keys().copied()
    }

    /// Smallest and largest occupied degree.
    pub fn window(&self) -> Option<(i64, i64)> {
        let lo = *self.blocks.keys().next()?;
        let hi = *self.blocks.keys().next_back()?;
        Some((lo, hi))
    }

    /// Global index range of the generators in degree `k`.
    pub fn block(&self, k: i64) -> Range<usize> {
        self.blocks.get(&k).cloned().unwrap_or(0..0)
    }

    pub fn dim(&self, k: i64) -> usize {
        self.block(k).len()
    }

    /// Position of generator `i` inside its degree block.
    pub fn local_index(&self, i: usize) -> usize {
        i - self.block(self.degree(i)).start
    }

    pub fn boundary_of(&self, i: usize) -> &[usize] {
        &self.boundary[i]
    }

    /// Boundary of a vector in global coordinates.
    pub fn apply_boundary(&self, v: &F2Vec) -> F2Vec {
        assert_eq!(v.len(), self.len());
        let mut out = Vec::new();
        for &i in v.support() {
            out = sym_diff(&out, &self.boundary[i]);
        }
        F2Vec::from_indices(self.len(), out)
    }

    /// Matrix of `∂: C_k → C_{k-1}` in local coordinates.
    pub fn boundary_matrix(&self, k: i64) -> F2SparseMatrix {
        let src = self.block(k);
        let tgt = self.block(k - 1);
        let entries = src
            .clone()
            .flat_map(|i| self.boundary[i].iter().map(move |&j| (j - tgt.start, i - src.start)))
            .collect::<Vec<_>>();
        F2SparseMatrix::from_entries(tgt.len(), src.len(), entries).expect("boundary stays inside its block")
    }

    pub fn ids(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.gens[i].id.clone()).collect()
    }

    /// Lift a vector in local coordinates of degree `k` to global coordinates.
    pub fn globalize(&self, k: i64, local: &F2Vec) -> F2Vec {
        let b = self.block(k);
        assert_eq!(local.len(), b.len());
        F2Vec::from_indices(self.len(), local.support().iter().map(|&i| i + b.start))
    }

    /// Restrict a global vector to degree `k`, in local coordinates.
    pub fn localize(&self, k: i64, global: &F2Vec) -> F2Vec {
        let b = self.block(k);
        F2Vec::from_indices(b.len(), global.support().iter().filter(|&&i| b.contains(&i)).map(|&i| i - b.start))
    }

    /// Recheck that the boundary squares to zero.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for i in 0..self.len() {
            let mut dd: Vec<usize> = Vec::new();
            for &j in &self.boundary[i] {
                dd = sym_diff(&dd, &self.boundary[j]);
            }
            if !dd.is_empty() {
                return Err(ComplexError::BoundarySquare { generator: self.gens[i].id.clone(), image: self.ids(&dd) });
            }
        }
        Ok(())
    }

    /// Alternating count of generators.
    pub fn euler_characteristic(&self) -> i64 {
        self.blocks.iter().map(|(&k, r)| if k.rem_euclid(2) == 0 { r.len() as i64 } else { -(r.len() as i64) }).sum()
    }

    /// Same generators and boundary with every degree raised by `s`.
    pub fn shift_degrees(&self, s: i64) -> GradedF2Complex {
        let mut out = self.clone();
        for g in &mut out.gens {
            g.degree += s;
        }
        out.blocks = self.blocks.iter().map(|(&k, r)| (k + s, r.clone())).collect();
        out
    }

    /// The suspension `X⁺` with `(X⁺)_k = X_{k-1}`. The sign on the
    /// boundary is invisible mod 2.
    pub fn suspension(&self) -> GradedF2Complex {
        self.shift_degrees(1)
    }

    /// Keep the generators selected by `keep` and project the boundary onto
    /// them. This is the induced boundary on a subquotient when the kept set
    /// is convex for the boundary relation; the result is revalidated.
    pub fn subquotient(&self, keep: impl Fn(&Generator) -> bool) -> Result<GradedF2Complex, ComplexError> {
        let kept: Vec<bool> = self.gens.iter().map(&keep).collect();
        let mut b = ComplexBuilder::new();
        for (i, g) in self.gens.iter().enumerate() {
            if kept[i] {
                b.push(g.clone());
                let targets: Vec<String> =
                    self.boundary[i].iter().filter(|&&j| kept[j]).map(|&j| self.gens[j].id.clone()).collect();
                b.boundary(&g.id, targets);
            }
        }
        b.build()
    }
}

/// Incremental construction of a [`GradedF2Complex`].
#[derive(Clone, Debug, Default)]
pub struct ComplexBuilder {
    gens: Vec<Generator>,
    boundary: Vec<(String, Vec<String>)>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generator(&mut self, id: impl Into<String>, degree: i64) -> &mut Self {
        self.gens.push(Generator { id: id.into(), degree, label: Label::default() });
        self
    }

    pub fn labelled(&mut self, id: impl Into<String>, degree: i64, label: Label) -> &mut Self {
        self.gens.push(Generator { id: id.into(), degree, label });
        self
    }

    pub fn push(&mut self, g: Generator) -> &mut Self {
        self.gens.push(g);
        self
    }

    /// Set the boundary of `id`. Repeated targets cancel mod 2.
    pub fn boundary<S: Into<String>>(&mut self, id: &str, targets: impl IntoIterator<Item = S>) -> &mut Self {
        self.boundary.push((id.into(), targets.into_iter().map(Into::into).collect()));
        self
    }

    pub fn build(&self) -> Result<GradedF2Complex, ComplexError> {
        let mut gens = self.gens.clone();
        gens.sort_by_key(|g| g.degree);
        let mut index = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(ComplexError::DuplicateId(g.id.clone()));
            }
        }
        let mut blocks: BTreeMap<i64, Range<usize>> = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            blocks.entry(g.degree).and_modify(|r| r.end = i + 1).or_insert(i..i + 1);
        }
        let mut boundary: Vec<Option<Vec<usize>>> = alloc::vec![None; gens.len()];
        for (from, targets) in &self.boundary {
            let i = *index
                .get(from)
                .ok_or_else(|| ComplexError::UnknownGenerator { from: from.clone(), id: from.clone() })?;
            if boundary[i].is_some() {
                return Err(ComplexError::DuplicateBoundary(from.clone()));
            }
            let mut idx = Vec::with_capacity(targets.len());
            for t in targets {
                let j = *index
                    .get(t)
                    .ok_or_else(|| ComplexError::UnknownGenerator { from: from.clone(), id: t.clone() })?;
                if gens[j].degree != gens[i].degree - 1 {
                    return Err(ComplexError::DegreeMismatch {
                        from: from.clone(),
                        from_degree: gens[i].degree,
                        to: t.clone(),
                        to_degree: gens[j].degree,
                    });
                }
                idx.push(j);
            }
            boundary[i] = Some(F2Vec::from_indices(gens.len(), idx).support().to_vec());
        }
        let c = GradedF2Complex {
            gens,
            index,
            blocks,
            boundary: boundary.into_iter().map(Option::unwrap_or_default).collect(),
        };
        c.validate()?;
        Ok(c)
    }
}
