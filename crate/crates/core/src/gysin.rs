//! Morse complexes on a closed manifold, the Morse complex of the induced
//! function on the unit sphere bundle, and the Gysin sequence relating them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::complex::{ComplexBuilder, GradedF2Complex, Label};
use crate::error::{ComplexError, MapError};
use crate::exact::{connecting_map, long_exact_sequence, ExactError, LongExactSequence, SplitShortExactSequence};
use crate::homology::homology;
use crate::map::{verify_chain_map, ChainMap, LinearMap};

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub id: String,
    pub index: u32,
    pub value: f64,
}

/// Morse data of a self-indexing function on a closed connected manifold,
/// with mod 2 counts of flow lines between critical points of adjacent index.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseData {
    pub n: u32,
    pub critical_points: Vec<CriticalPoint>,
    /// `(q, q')` with `ind q = ind q' + 1`, mapped to the count mod 2.
    pub boundary_counts: BTreeMap<(String, String), u8>,
    /// Euler number of the tangent bundle mod 2.
    pub euler: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GysinError {
    #[error("manifold dimension {0} is below 2")]
    DimensionTooSmall(u32),
    #[error("duplicate critical point {0:?}")]
    DuplicateId(String),
    #[error("critical point {id:?} has index {index} outside [0, {n}]")]
    IndexOutOfRange { id: String, index: u32, n: u32 },
    #[error("critical point {id:?} has value {value} but index {index}")]
    NotSelfIndexing { id: String, index: u32, value: f64 },
    #[error("expected a unique minimum, found {0}")]
    Minimum(usize),
    #[error("expected a unique maximum, found {0}")]
    Maximum(usize),
    #[error("boundary count {from:?}|{to:?}: {reason}")]
    BadCount { from: String, to: String, reason: &'static str },
    #[error("Euler number {supplied} disagrees with the alternating count of critical points mod 2 ({computed})")]
    EulerParity { supplied: u8, computed: u8 },
    #[error("Morse complex is invalid: {0}")]
    Complex(#[from] ComplexError),
    #[error("Morse homology has betti_{degree} = {betti}, expected 1")]
    NotClosedConnected { degree: u32, betti: usize },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl MorseData {
    pub fn point(&self, id: &str) -> Option<&CriticalPoint> {
        self.critical_points.iter().find(|c| c.id == id)
    }

    pub fn q_min(&self) -> &str {
        &self.critical_points.iter().find(|c| c.index == 0).expect("validated data has a minimum").id
    }

    pub fn q_max(&self) -> &str {
        &self.critical_points.iter().find(|c| c.index == self.n).expect("validated data has a maximum").id
    }

    /// Alternating count of critical points mod 2.
    pub fn euler_parity(&self) -> bool {
        self.critical_points.len() % 2 == 1
    }

    pub fn validate(&self) -> Result<GradedF2Complex, GysinError> {
        if self.n < 2 {
            return Err(GysinError::DimensionTooSmall(self.n));
        }
        let mut index = BTreeMap::new();
        for c in &self.critical_points {
            if index.insert(c.id.as_str(), c.index).is_some() {
                return Err(GysinError::DuplicateId(c.id.clone()));
            }
            if c.index > self.n {
                return Err(GysinError::IndexOutOfRange { id: c.id.clone(), index: c.index, n: self.n });
            }
            if c.value != c.index as f64 {
                return Err(GysinError::NotSelfIndexing { id: c.id.clone(), index: c.index, value: c.value });
            }
        }
        let mins = self.critical_points.iter().filter(|c| c.index == 0).count();
        if mins != 1 {
            return Err(GysinError::Minimum(mins));
        }
        let maxs = self.critical_points.iter().filter(|c| c.index == self.n).count();
        if maxs != 1 {
            return Err(GysinError::Maximum(maxs));
        }
        for ((from, to), &count) in &self.boundary_counts {
            let bad = |reason| GysinError::BadCount { from: from.clone(), to: to.clone(), reason };
            let (Some(&a), Some(&b)) = (index.get(from.as_str()), index.get(to.as_str())) else {
                return Err(bad("unknown critical point"));
            };
            if a != b + 1 {
                return Err(bad("indices must differ by one"));
            }
            if count > 1 {
                return Err(bad("count must be 0 or 1"));
            }
        }
        if self.euler_parity() != self.euler {
            return Err(GysinError::EulerParity { supplied: self.euler as u8, computed: self.euler_parity() as u8 });
        }
        let c = self.complex_unchecked()?;
        let h = homology(&c);
        for degree in [0, self.n] {
            let betti = h.betti(degree as i64);
            if betti != 1 {
                return Err(GysinError::NotClosedConnected { degree, betti });
            }
        }
        Ok(c)
    }

    fn complex_unchecked(&self) -> Result<GradedF2Complex, ComplexError> {
        let mut b = ComplexBuilder::new();
        for c in &self.critical_points {
            b.labelled(c.id.clone(), c.index as i64, Label::action(c.value));
        }
        for c in &self.critical_points {
            b.boundary(&c.id, self.boundary_ids(&c.id));
        }
        b.build()
    }

    /// `∂q` as a list of ids.
    pub fn boundary_ids(&self, q: &str) -> Vec<String> {
        self.boundary_counts
            .iter()
            .filter(|((from, _), &n)| from == q && n == 1)
            .map(|((_, to), _)| to.clone())
            .collect()
    }
}

pub fn build_morse_complex(d: &MorseData) -> Result<GradedF2Complex, GysinError> {
    d.validate()
}

pub fn minus_id(q: &str) -> String {
    format!("{q}^-")
}

pub fn plus_id(q: &str) -> String {
    format!("{q}^+")
}

/// Morse complex of the function `h` on the unit sphere bundle: two
/// generators `x_q^-`, `x_q^+` per critical point `q` of `f`.
pub fn build_sphere_bundle_complex(d: &MorseData) -> Result<GradedF2Complex, GysinError> {
    d.validate()?;
    let n = d.n as i64;
    let mut b = ComplexBuilder::new();
    for c in &d.critical_points {
        b.labelled(minus_id(&c.id), c.index as i64, Label::action(c.value));
        b.labelled(plus_id(&c.id), c.index as i64 + n - 1, Label::action(c.value + 0.5));
    }
    let (qmin, qmax) = (d.q_min(), d.q_max());
    for c in &d.critical_points {
        let bd = d.boundary_ids(&c.id);
        b.boundary(&plus_id(&c.id), bd.iter().map(|q| plus_id(q)));
        if c.id == qmax {
            let t: Vec<String> = if d.euler { alloc::vec![plus_id(qmin)] } else { Vec::new() };
            b.boundary(&minus_id(&c.id), t);
        } else {
            b.boundary(&minus_id(&c.id), bd.iter().map(|q| minus_id(q)));
        }
    }
    Ok(b.build()?)
}

/// `φ(q) = x_q^+`, shift `n − 1`.
pub fn build_phi(d: &MorseData, m: &Arc<GradedF2Complex>, h: &Arc<GradedF2Complex>) -> Result<ChainMap, GysinError> {
    let table: Vec<(String, Vec<String>)> =
        d.critical_points.iter().map(|c| (c.id.clone(), alloc::vec![plus_id(&c.id)])).collect();
    let f = LinearMap::from_ids(
        m.clone(),
        h.clone(),
        d.n as i64 - 1,
        table.iter().map(|(s, t)| (s.as_str(), t.iter().map(String::as_str).collect())),
    )?;
    verify_chain_map(&f).map_err(MapError::NotChainMap)?;
    Ok(f)
}

/// `ψ(x_q^+) = 0`, `ψ(x_q^-) = q`, shift 0.
pub fn build_psi(d: &MorseData, h: &Arc<GradedF2Complex>, m: &Arc<GradedF2Complex>) -> Result<ChainMap, GysinError> {
    let table: Vec<(String, Vec<String>)> =
        d.critical_points.iter().map(|c| (minus_id(&c.id), alloc::vec![c.id.clone()])).collect();
    let f = LinearMap::from_ids(
        h.clone(),
        m.clone(),
        0,
        table.iter().map(|(s, t)| (s.as_str(), t.iter().map(String::as_str).collect())),
    )?;
    verify_chain_map(&f).map_err(MapError::NotChainMap)?;
    Ok(f)
}

/// The short exact sequence `0 → M_*(f) → M_{*+n-1}(h) → M_{*+n-1}(f) → 0`,
/// regraded so every map has shift 0, with its splitting
/// `θ̂(x_q^+) = q`, `θ̂(x_q^-) = 0`, `ψ̂(q) = x_q^-`.
pub fn gysin_short_sequence(d: &MorseData) -> Result<SplitShortExactSequence, GysinError> {
    let m = Arc::new(build_morse_complex(d)?);
    let h = Arc::new(build_sphere_bundle_complex(d)?);
    let phi = build_phi(d, &m, &h)?;
    let psi = build_psi(d, &h, &m)?;
    let s = -(d.n as i64 - 1);
    let y = Arc::new(h.shift_degrees(s));
    let z = Arc::new(m.shift_degrees(s));
    let theta = phi.regrade(m.clone(), y.clone(), 0)?;
    let psi = psi.regrade(y.clone(), z.clone(), 0)?;
    let ids = |f: &dyn Fn(&CriticalPoint) -> Option<(String, String)>| -> Vec<(String, String)> {
        d.critical_points.iter().filter_map(f).collect()
    };
    let th = ids(&|c| Some((plus_id(&c.id), c.id.clone())));
    let ph = ids(&|c| Some((c.id.clone(), minus_id(&c.id))));
    let theta_hat =
        LinearMap::from_ids(y.clone(), m.clone(), 0, th.iter().map(|(a, b)| (a.as_str(), alloc::vec![b.as_str()])))?;
    let psi_hat =
        LinearMap::from_ids(z.clone(), y.clone(), 0, ph.iter().map(|(a, b)| (a.as_str(), alloc::vec![b.as_str()])))?;
    Ok(SplitShortExactSequence { x: m, y, z, theta, psi, theta_hat, psi_hat })
}

/// Homology of the sphere bundle from that of the base, degrees `0..2n`.
pub fn sphere_bundle_homology_table(betti_m: &[usize], n: u32, chi: bool) -> Result<Vec<usize>, GysinError> {
    if n < 2 {
        return Err(GysinError::DimensionTooSmall(n));
    }
    let n = n as usize;
    let b = |k: usize| betti_m.get(k).copied().unwrap_or(0);
    let extra = usize::from(!chi);
    Ok((0..2 * n)
        .map(|k| {
            if k + 2 <= n {
                b(k)
            } else if k == n - 1 {
                b(n - 1) + extra
            } else if k == n {
                b(1) + extra
            } else {
                b(k - n + 1)
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct GysinReport {
    pub n: u32,
    pub euler: bool,
    pub sphere_bundle: Arc<GradedF2Complex>,
    pub sequence: SplitShortExactSequence,
    pub les: LongExactSequence,
    pub delta: ChainMap,
    pub betti_m: Vec<usize>,
    pub betti_bundle: Vec<usize>,
    pub table: Vec<usize>,
    /// Rank of the connecting map `H_n(M) → H_0(M)`.
    pub top_connecting_rank: usize,
    /// Whether every other connecting map vanishes.
    pub other_connecting_zero: bool,
    pub poincare_duality: bool,
    /// Rank of `φ_*: H_0(M) → H_{n-1}(S*M)`.
    pub phi_star_rank_0: usize,
}

impl GysinReport {
    pub fn all_pass(&self) -> bool {
        self.les.is_exact()
            && self.les.delta_matches_zigzag
            && self.betti_bundle == self.table
            && self.top_connecting_rank == usize::from(self.euler)
            && self.other_connecting_zero
            && self.poincare_duality
    }
}

pub fn gysin_sequence(d: &MorseData) -> Result<GysinReport, GysinError> {
    let seq = gysin_short_sequence(d)?;
    let delta = connecting_map(&seq)?;
    let les = long_exact_sequence(&seq)?;
    let n = d.n as i64;
    let hm = homology(&seq.x);
    let bundle = Arc::new(build_sphere_bundle_complex(d)?);
    let hb = homology(&bundle);
    let betti_m = hm.betti_range(0, n);
    let betti_bundle = hb.betti_range(0, 2 * n - 1);
    let table = sphere_bundle_homology_table(&betti_m, d.n, d.euler)?;
    // regraded Z' has H_k Z' = H_{k+n-1}(M); H_n(M) sits at k = 1
    let connecting = les.connecting();
    let top_connecting_rank = connecting.get(&1).map_or(0, |m| m.rank());
    let other_connecting_zero = connecting.iter().filter(|(&k, _)| k != 1).all(|(_, m)| m.is_zero());
    let len = betti_bundle.len();
    let poincare_duality = (0..len).all(|k| betti_bundle[k] == betti_bundle[len - 1 - k]);
    let phi_star_rank_0 = les.map_from(0, crate::exact::Term::X).map_or(0, |m| m.rank());
    Ok(GysinReport {
        n: d.n,
        euler: d.euler,
        sphere_bundle: bundle,
        sequence: seq,
        les,
        delta,
        betti_m,
        betti_bundle,
        table,
        top_connecting_rank,
        other_connecting_zero,
        poincare_duality,
        phi_star_rank_0,
    })
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::homology::induced_map;
    use alloc::vec;
    use proptest::prelude::*;

    fn data(n: u32, points: &[(&str, u32)], ones: &[(&str, &str)], zeros: &[(&str, &str)], euler: bool) -> MorseData {
        let mut boundary_counts = BTreeMap::new();
        for (a, b) in ones {
            boundary_counts.insert((a.to_string(), b.to_string()), 1);
        }
        for (a, b) in zeros {
            boundary_counts.insert((a.to_string(), b.to_string()), 0);
        }
        MorseData {
            n,
            critical_points: points
                .iter()
                .map(|(id, i)| CriticalPoint { id: id.to_string(), index: *i, value: *i as f64 })
                .collect(),
            boundary_counts,
            euler,
        }
    }

    fn s2() -> MorseData {
        data(2, &[("min", 0), ("max", 2)], &[], &[], false)
    }

    fn t2() -> MorseData {
        data(
            2,
            &[("min", 0), ("a", 1), ("b", 1), ("max", 2)],
            &[],
            &[("a", "min"), ("b", "min"), ("max", "a"), ("max", "b")],
            false,
        )
    }

    fn rp2() -> MorseData {
        data(2, &[("min", 0), ("a", 1), ("max", 2)], &[], &[("a", "min"), ("max", "a")], true)
    }

    #[test]
    fn morse_complexes() {
        assert_eq!(homology(&build_morse_complex(&s2()).unwrap()).betti_range(0, 2), vec![1, 0, 1]);
        assert_eq!(homology(&build_morse_complex(&t2()).unwrap()).betti_range(0, 2), vec![1, 2, 1]);
        assert_eq!(homology(&build_morse_complex(&rp2()).unwrap()).betti_range(0, 2), vec![1, 1, 1]);
    }

    #[test]
    fn sphere_bundles() {
        for (d, expected) in [(s2(), vec![1, 1, 1, 1]), (t2(), vec![1, 3, 3, 1]), (rp2(), vec![1, 1, 1, 1])] {
            let h = build_sphere_bundle_complex(&d).unwrap();
            assert_eq!(homology(&h).betti_range(0, 3), expected);
            let r = gysin_sequence(&d).unwrap();
            assert!(r.all_pass());
            assert_eq!(r.table, expected);
        }
        let h = build_sphere_bundle_complex(&rp2()).unwrap();
        let i = h.index_of("max^-").unwrap();
        assert_eq!(h.ids(h.boundary_of(i)), vec!["min^+".to_string()]);
    }

    #[test]
    fn maps_and_connecting() {
        let d = s2();
        let m = Arc::new(build_morse_complex(&d).unwrap());
        let h = Arc::new(build_sphere_bundle_complex(&d).unwrap());
        let phi = build_phi(&d, &m, &h).unwrap();
        let psi = build_psi(&d, &h, &m).unwrap();
        assert!(psi.compose(&phi).unwrap().is_zero());
        let phi_star = induced_map(&phi).unwrap();
        assert_eq!(phi_star[&0].rank(), 1);
        let psi_star = induced_map(&psi).unwrap();
        assert_eq!(psi_star[&0].rank(), 1);
        assert!(gysin_sequence(&d).unwrap().delta.is_zero());
        let r = gysin_sequence(&rp2()).unwrap();
        assert_eq!(r.top_connecting_rank, 1);
        assert_eq!(r.les.nodes.len(), 12);
        assert!(r.les.is_exact());
    }

    #[test]
    fn table_examples_and_errors() {
        assert_eq!(sphere_bundle_homology_table(&[1, 0, 1], 2, false).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(sphere_bundle_homology_table(&[1, 2, 1], 2, false).unwrap(), vec![1, 3, 3, 1]);
        assert_eq!(sphere_bundle_homology_table(&[1, 1, 1], 2, true).unwrap(), vec![1, 1, 1, 1]);
        assert!(matches!(sphere_bundle_homology_table(&[1, 1], 1, false), Err(GysinError::DimensionTooSmall(1))));
    }

    #[test]
    fn rejections() {
        let mut d = rp2();
        d.euler = false;
        assert!(matches!(d.validate(), Err(GysinError::EulerParity { .. })));
        let d = data(2, &[("min", 0), ("m2", 0), ("a", 1), ("max", 2)], &[], &[], false);
        assert!(matches!(d.validate(), Err(GysinError::Minimum(2))));
        let mut d = s2();
        d.critical_points[1].value = 1.5;
        assert!(matches!(d.validate(), Err(GysinError::NotSelfIndexing { .. })));
        let d = data(2, &[("min", 0), ("a", 1), ("max", 2)], &[("max", "min")], &[], true);
        assert!(matches!(d.validate(), Err(GysinError::BadCount { .. })));
        let d = data(2, &[("min", 0), ("a", 1), ("max", 2)], &[("a", "min")], &[], true);
        assert!(matches!(d.validate(), Err(GysinError::NotClosedConnected { degree: 0, .. })));
        let mut d = s2();
        d.n = 1;
        assert!(matches!(d.validate(), Err(GysinError::DimensionTooSmall(1))));
    }

    /// Valid Morse data with Poincaré-symmetric homology: free generators in
    /// dual degrees plus mixed cancelling pairs in degrees `1..n-1`.
    fn random_morse(seed: u64) -> MorseData {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n: u32 = rng.gen_range(2..=4);
        let mut pts: Vec<(String, u32)> = vec![("min".into(), 0), ("max".into(), n)];
        let mut ones: Vec<(String, String)> = Vec::new();
        let mut counter = 0;
        let mut fresh = |k: u32, pts: &mut Vec<(String, u32)>| {
            counter += 1;
            let id = format!("c{k}_{counter}");
            pts.push((id.clone(), k));
            id
        };
        for k in 1..n {
            if rng.gen_bool(0.6) {
                fresh(k, &mut pts);
                fresh(n - k, &mut pts);
            }
        }
        let mut pairs: Vec<(u32, String, String)> = Vec::new();
        if n >= 3 {
            for _ in 0..rng.gen_range(0..4) {
                let k = rng.gen_range(2..n);
                let a = fresh(k, &mut pts);
                let b = fresh(k - 1, &mut pts);
                pairs.push((k, a, b));
            }
        }
        // unitriangular mixing keeps the pairing matrix invertible
        for i in 0..pairs.len() {
            ones.push((pairs[i].1.clone(), pairs[i].2.clone()));
            for j in 0..i {
                if pairs[i].0 == pairs[j].0 && rng.gen_bool(0.5) {
                    ones.push((pairs[i].1.clone(), pairs[j].2.clone()));
                }
            }
        }
        let mut boundary_counts = BTreeMap::new();
        for (a, b) in ones {
            let e = boundary_counts.entry((a, b)).or_insert(0u8);
            *e ^= 1;
        }
        let euler = pts.len() % 2 == 1;
        MorseData {
            n,
            critical_points: pts.into_iter().map(|(id, i)| CriticalPoint { id, index: i, value: i as f64 }).collect(),
            boundary_counts,
            euler,
        }
    }

    proptest! {
        #[test]
        fn gysin_invariants(seed in any::<u64>()) {
            let d = random_morse(seed);
            let r = gysin_sequence(&d).unwrap();
            prop_assert!(r.les.is_exact());
            prop_assert_eq!(&r.betti_bundle, &r.table);
            prop_assert_eq!(r.top_connecting_rank, usize::from(d.euler));
            prop_assert!(r.other_connecting_zero);
            prop_assert!(r.poincare_duality);
        }
    }
}
