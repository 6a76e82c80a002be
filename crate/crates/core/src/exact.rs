//! Split short exact sequences `0 → X → Y → Z → 0`, their connecting maps,
//! long exact sequences in homology, and the comparison with the mapping cone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::complex::{ComplexBuilder, GradedF2Complex};
use crate::cone::{mapping_cone, ConeError, MappingCone};
use crate::error::{MapError, Mismatch};
use crate::f2::{same_span, F2SparseMatrix, F2Vec};
use crate::homology::{homology, induced_map_on_homology, HomologySummary};
use crate::map::{verify_chain_homotopy, verify_chain_map, ChainMap, HomotopyError, LinearMap};

#[derive(Clone, Debug)]
pub struct SplitShortExactSequence {
    pub x: Arc<GradedF2Complex>,
    pub y: Arc<GradedF2Complex>,
    pub z: Arc<GradedF2Complex>,
    pub theta: ChainMap,
    pub psi: ChainMap,
    pub theta_hat: LinearMap,
    pub psi_hat: LinearMap,
}

/// A failed identity and where it fails.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{identity} fails {witness}")]
pub struct IdentityFailure {
    pub identity: String,
    pub witness: Mismatch,
}

impl IdentityFailure {
    pub fn new(identity: &str, witness: Mismatch) -> Self {
        IdentityFailure { identity: identity.into(), witness }
    }

    fn degree(identity: &str, k: i64, detail: &str) -> Self {
        IdentityFailure {
            identity: identity.into(),
            witness: Mismatch { generator: format!("degree {k}"), lhs: alloc::vec![detail.into()], rhs: Vec::new() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error(transparent)]
    Identity(#[from] IdentityFailure),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

fn check_equal(identity: &str, a: &LinearMap, b: &LinearMap) -> Result<(), ExactError> {
    match a.first_difference(b)? {
        None => Ok(()),
        Some(w) => Err(IdentityFailure::new(identity, w).into()),
    }
}

fn check_chain(identity: &str, f: &LinearMap) -> Result<(), ExactError> {
    verify_chain_map(f).map_err(|w| IdentityFailure::new(identity, w).into())
}

impl SplitShortExactSequence {
    /// Shape checks on shifts and complexes.
    fn check_shapes(&self) -> Result<(), ExactError> {
        let ok = |m: &LinearMap, s: &Arc<GradedF2Complex>, t: &Arc<GradedF2Complex>| {
            (Arc::ptr_eq(m.source(), s) || **m.source() == **s)
                && (Arc::ptr_eq(m.target(), t) || **m.target() == **t)
                && m.shift() == 0
        };
        if !ok(&self.theta, &self.x, &self.y)
            || !ok(&self.psi, &self.y, &self.z)
            || !ok(&self.theta_hat, &self.y, &self.x)
            || !ok(&self.psi_hat, &self.z, &self.y)
        {
            return Err(MapError::Incompatible("maps do not fit X → Y → Z with shift 0").into());
        }
        Ok(())
    }
}

/// Checks the chain-map conditions, the three splitting identities and
/// degreewise exactness.
pub fn verify_splitting(s: &SplitShortExactSequence) -> Result<(), ExactError> {
    s.check_shapes()?;
    check_chain("θ is a chain map", &s.theta)?;
    check_chain("ψ is a chain map", &s.psi)?;
    check_equal("θ̂θ = Id_X", &s.theta_hat.compose(&s.theta)?, &LinearMap::identity(s.x.clone()))?;
    check_equal("ψψ̂ = Id_Z", &s.psi.compose(&s.psi_hat)?, &LinearMap::identity(s.z.clone()))?;
    let decomposition = s.theta.compose(&s.theta_hat)?.add(&s.psi_hat.compose(&s.psi)?)?;
    check_equal("θθ̂ + ψ̂ψ = Id_Y", &decomposition, &LinearMap::identity(s.y.clone()))?;
    check_exact_degreewise(&s.theta, &s.psi)
}

/// `f` injective, `g` surjective and `im f = ker g` in every degree.
pub fn check_exact_degreewise(f: &LinearMap, g: &LinearMap) -> Result<(), ExactError> {
    let mut degrees: Vec<i64> = f.source().degrees().chain(f.target().degrees()).chain(g.target().degrees()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for k in degrees {
        let mf = f.matrix(k);
        let mg = g.matrix(k);
        if mf.rank() != f.source().dim(k) {
            return Err(IdentityFailure::degree("injectivity", k, "first map has a kernel").into());
        }
        if mg.rank() != g.target().dim(k) {
            return Err(IdentityFailure::degree("surjectivity", k, "second map misses part of the target").into());
        }
        let image: Vec<F2Vec> = (0..mf.cols()).map(|j| mf.column(j)).collect();
        if !same_span(f.target().dim(k), &image, &mg.kernel_basis()) {
            return Err(IdentityFailure::degree(
                "im = ker",
                k,
                "image of the first map differs from kernel of the second",
            )
            .into());
        }
    }
    Ok(())
}

/// `Δ = θ̂ ∂_Y ψ̂`, returned as a chain map `Z → X⁺` of shift 0.
pub fn connecting_map(s: &SplitShortExactSequence) -> Result<ChainMap, ExactError> {
    verify_splitting(s)?;
    let d = LinearMap::boundary(s.y.clone());
    let raw = s.theta_hat.compose(&d.compose(&s.psi_hat)?)?;
    let delta = raw.regrade(s.z.clone(), Arc::new(s.x.suspension()), 0)?;
    check_chain("Δ is a chain map Z → X⁺", &delta)?;
    Ok(delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug)]
pub struct LesNode {
    pub degree: i64,
    pub term: Term,
    pub dim: usize,
    /// Whether image of the incoming map equals kernel of the outgoing one.
    pub exact: bool,
}

/// `… → H_k X → H_k Y → H_k Z → H_{k-1} X → …`, over the union of the
/// degree windows. `maps[i]` goes from `nodes[i]` to `nodes[i+1]`.
#[derive(Clone, Debug)]
pub struct LongExactSequence {
    pub nodes: Vec<LesNode>,
    pub maps: Vec<F2SparseMatrix>,
    /// Whether `Δ_*` agrees with the zig-zag connecting homomorphism.
    pub delta_matches_zigzag: bool,
}

impl LongExactSequence {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }

    /// `Δ_*: H_k Z → H_{k-1} X` keyed by `k`.
    pub fn connecting(&self) -> BTreeMap<i64, &F2SparseMatrix> {
        self.nodes.iter().zip(&self.maps).filter(|(n, _)| n.term == Term::Z).map(|(n, m)| (n.degree, m)).collect()
    }

    pub fn map_from(&self, degree: i64, term: Term) -> Option<&F2SparseMatrix> {
        self.nodes.iter().position(|n| n.degree == degree && n.term == term).and_then(|i| self.maps.get(i))
    }
}

pub fn long_exact_sequence(s: &SplitShortExactSequence) -> Result<LongExactSequence, ExactError> {
    let delta = connecting_map(s)?;
    let (hx, hy, hz) = (homology(&s.x), homology(&s.y), homology(&s.z));
    let hxp = homology(delta.target());
    let theta_star = induced_map_on_homology(&s.theta, &hx, &hy)?;
    let psi_star = induced_map_on_homology(&s.psi, &hy, &hz)?;
    let delta_star = induced_map_on_homology(&delta, &hz, &hxp)?;

    let windows = [s.x.window(), s.y.window(), s.z.window()];
    let lo = windows.iter().flatten().map(|w| w.0).min();
    let hi = windows.iter().flatten().map(|w| w.1).max();
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    if let (Some(lo), Some(hi)) = (lo, hi) {
        for k in (lo..=hi).rev() {
            let (dx, dy, dz) = (hx.betti(k), hy.betti(k), hz.betti(k));
            nodes.push(LesNode { degree: k, term: Term::X, dim: dx, exact: false });
            maps.push(theta_star.get(&k).cloned().unwrap_or_else(|| F2SparseMatrix::zeros(dy, dx)));
            nodes.push(LesNode { degree: k, term: Term::Y, dim: dy, exact: false });
            maps.push(psi_star.get(&k).cloned().unwrap_or_else(|| F2SparseMatrix::zeros(dz, dy)));
            nodes.push(LesNode { degree: k, term: Term::Z, dim: dz, exact: false });
            let below = hx.betti(k - 1);
            maps.push(delta_star.get(&k).cloned().unwrap_or_else(|| F2SparseMatrix::zeros(below, dz)));
        }
        // the last map leaves the window into H_{lo-1} X, which is zero
        maps.pop();
    }
    for i in 0..nodes.len() {
        let dim = nodes[i].dim;
        let incoming = if i == 0 { F2SparseMatrix::zeros(dim, 0) } else { maps[i - 1].clone() };
        let outgoing = maps.get(i).cloned().unwrap_or_else(|| F2SparseMatrix::zeros(0, dim));
        let composite_zero = outgoing.mul(&incoming).map(|m| m.is_zero()).unwrap_or(false);
        nodes[i].exact = composite_zero && incoming.rank() + outgoing.rank() == dim;
    }
    let delta_matches_zigzag = zigzag_agrees(s, &hx, &hz, &delta_star)?;
    Ok(LongExactSequence { nodes, maps, delta_matches_zigzag })
}

/// Classical connecting homomorphism: lift a cycle through ψ, take the
/// boundary, pull back through θ.
fn zigzag_agrees(
    s: &SplitShortExactSequence,
    hx: &HomologySummary,
    hz: &HomologySummary,
    delta_star: &BTreeMap<i64, F2SparseMatrix>,
) -> Result<bool, ExactError> {
    let theta = s.theta.global_matrix().reduce();
    let psi = s.psi.global_matrix().reduce();
    for k in s.z.degrees() {
        for (j, rep) in hz.representatives(k).iter().enumerate() {
            let c = s.z.globalize(k, rep);
            let Some(lift) = psi.solve(&c).expect("sizes agree") else { return Ok(false) };
            let dy = s.y.apply_boundary(&lift);
            let Some(x) = theta.solve(&dy).expect("sizes agree") else { return Ok(false) };
            let Some(coords) = hx.coordinates(k - 1, &s.x.localize(k - 1, &x)) else { return Ok(false) };
            let col = delta_star.get(&k).map(|m| m.column(j)).unwrap_or_else(|| F2Vec::zeros(coords.len()));
            if col != coords {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct ConeEquivalence {
    pub cone: MappingCone,
    pub suspended_x: Arc<GradedF2Complex>,
    /// `σx = (0, θx)`.
    pub sigma: ChainMap,
    /// `ρ(z, y) = Δz + θ̂y`.
    pub rho: ChainMap,
    /// `τ(z, y) = (0, ψ̂z)`, shift +1.
    pub tau: LinearMap,
    pub delta: ChainMap,
}

/// Results of the individual checks, each `Ok` or the first failure.
#[derive(Clone, Debug)]
pub struct ConeReport {
    pub sigma_chain_map: Result<(), IdentityFailure>,
    pub rho_chain_map: Result<(), IdentityFailure>,
    pub rho_sigma_identity: Result<(), IdentityFailure>,
    pub homotopy: Result<(), IdentityFailure>,
    pub rho_iota_is_delta: Result<(), IdentityFailure>,
    pub pi_sigma_is_theta: Result<(), IdentityFailure>,
    pub cone_connecting_is_psi: Result<(), IdentityFailure>,
}

impl ConeReport {
    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<&IdentityFailure> {
        [
            &self.sigma_chain_map,
            &self.rho_chain_map,
            &self.rho_sigma_identity,
            &self.homotopy,
            &self.rho_iota_is_delta,
            &self.pi_sigma_is_theta,
            &self.cone_connecting_is_psi,
        ]
        .into_iter()
        .filter_map(|r| r.as_ref().err())
        .collect()
    }
}

fn flatten(r: Result<(), ExactError>) -> Result<(), IdentityFailure> {
    match r {
        Ok(()) => Ok(()),
        Err(ExactError::Identity(f)) => Err(f),
        Err(e) => Err(IdentityFailure::new(
            "composability",
            Mismatch { generator: String::new(), lhs: alloc::vec![format!("{e}")], rhs: Vec::new() },
        )),
    }
}

pub fn cone_equivalence(s: &SplitShortExactSequence) -> Result<(ConeEquivalence, ConeReport), ExactError> {
    let delta = connecting_map(s)?;
    let cone = mapping_cone(&s.psi)?;
    let c = cone.complex.clone();
    let xp = delta.target().clone();

    let sigma_t: Vec<Vec<usize>> =
        (0..s.x.len()).map(|i| s.theta.image_of(i).iter().map(|&j| cone.y_index(j)).collect()).collect();
    let sigma = LinearMap::from_indices(xp.clone(), c.clone(), 0, sigma_t)?;

    let mut rho_t = alloc::vec![Vec::new(); c.len()];
    for i in 0..s.z.len() {
        rho_t[cone.z_index(i)] = delta.image_of(i).to_vec();
    }
    for i in 0..s.y.len() {
        rho_t[cone.y_index(i)] = s.theta_hat.image_of(i).to_vec();
    }
    let rho = LinearMap::from_indices(c.clone(), xp.clone(), 0, rho_t)?;

    let mut tau_t = alloc::vec![Vec::new(); c.len()];
    for i in 0..s.z.len() {
        tau_t[cone.z_index(i)] = s.psi_hat.image_of(i).iter().map(|&j| cone.y_index(j)).collect();
    }
    let tau = LinearMap::from_indices(c.clone(), c.clone(), 1, tau_t)?;

    let id_c = LinearMap::identity(c.clone());
    let sigma_rho = sigma.compose(&rho)?;
    let homotopy = match verify_chain_homotopy(&id_c, &sigma_rho, &tau) {
        Ok(()) => Ok(()),
        Err(HomotopyError::Fails(w)) => Err(IdentityFailure::new("Id + σρ = τ∂ + ∂τ", w)),
        Err(HomotopyError::Incompatible) => Err(IdentityFailure::new(
            "Id + σρ = τ∂ + ∂τ",
            Mismatch { generator: String::new(), lhs: alloc::vec!["incompatible maps".into()], rhs: Vec::new() },
        )),
    };

    let theta_plus = s.theta.regrade(xp.clone(), cone.suspended_source.clone(), 0)?;
    let psi_from_suspension = s.psi.regrade(cone.suspended_source.clone(), s.z.clone(), -1)?;
    let cone_connecting =
        cone.z_projection(s.z.clone())?.compose(&LinearMap::boundary(c.clone()).compose(&cone.y_inclusion()?)?)?;

    let report = ConeReport {
        sigma_chain_map: flatten(check_chain("σ is a chain map", &sigma)),
        rho_chain_map: flatten(check_chain("ρ is a chain map", &rho)),
        rho_sigma_identity: flatten(
            rho.compose(&sigma)
                .map_err(ExactError::from)
                .and_then(|m| check_equal("ρσ = Id", &m, &LinearMap::identity(xp.clone()))),
        ),
        homotopy,
        rho_iota_is_delta: flatten(
            rho.compose(&cone.inclusion).map_err(ExactError::from).and_then(|m| check_equal("ρι = Δ", &m, &delta)),
        ),
        pi_sigma_is_theta: flatten(
            cone.projection
                .compose(&sigma)
                .map_err(ExactError::from)
                .and_then(|m| check_equal("πσ = θ", &m, &theta_plus)),
        ),
        cone_connecting_is_psi: flatten(check_equal("ι̂∂π̂ = ψ", &cone_connecting, &psi_from_suspension)),
    };
    Ok((ConeEquivalence { cone, suspended_x: xp, sigma, rho, tau, delta }, report))
}

/// The direct-sum sequence `0 → X → X ⊕ Z → Z → 0` with canonical maps.
pub fn direct_sum_sequence(
    x: Arc<GradedF2Complex>,
    z: Arc<GradedF2Complex>,
) -> Result<SplitShortExactSequence, ExactError> {
    let mut b = ComplexBuilder::new();
    for g in x.generators() {
        b.labelled(format!("x:{}", g.id), g.degree, g.label.clone());
    }
    for g in z.generators() {
        b.labelled(format!("z:{}", g.id), g.degree, g.label.clone());
    }
    for i in 0..x.len() {
        b.boundary(&format!("x:{}", x.id(i)), x.boundary_of(i).iter().map(|&j| format!("x:{}", x.id(j))));
    }
    for i in 0..z.len() {
        b.boundary(&format!("z:{}", z.id(i)), z.boundary_of(i).iter().map(|&j| format!("z:{}", z.id(j))));
    }
    let y = Arc::new(b.build().map_err(|e| MapError::Incompatible(leak_free(&e)))?);
    let xi: Vec<usize> = (0..x.len()).map(|i| y.index_of(&format!("x:{}", x.id(i))).unwrap()).collect();
    let zi: Vec<usize> = (0..z.len()).map(|i| y.index_of(&format!("z:{}", z.id(i))).unwrap()).collect();
    let mut th = alloc::vec![Vec::new(); y.len()];
    let mut ps = alloc::vec![Vec::new(); y.len()];
    for (i, &p) in xi.iter().enumerate() {
        th[p].push(i);
    }
    for (i, &p) in zi.iter().enumerate() {
        ps[p].push(i);
    }
    Ok(SplitShortExactSequence {
        theta: LinearMap::from_indices(x.clone(), y.clone(), 0, xi.iter().map(|&p| alloc::vec![p]).collect())?,
        psi: LinearMap::from_indices(y.clone(), z.clone(), 0, ps)?,
        theta_hat: LinearMap::from_indices(y.clone(), x.clone(), 0, th)?,
        psi_hat: LinearMap::from_indices(z.clone(), y.clone(), 0, zi.iter().map(|&p| alloc::vec![p]).collect())?,
        x,
        y,
        z,
    })
}

fn leak_free(_: &crate::error::ComplexError) -> &'static str {
    "direct sum of invalid complexes"
}

/// A random split short exact sequence with at most `max_gens` generators
/// in the middle term, spread over degrees `0..=3`.
///
/// The middle term is a sum of cancelling pairs and free generators; a
/// random selection of whole pairs, pair targets and free generators spans
/// the subcomplex `X`, the rest projects onto `Z`. Everything is then
/// conjugated by a random unitriangular change of basis of `Y`, so the
/// splitting maps are not the coordinate ones.
pub fn random_split_sequence<R: Rng + ?Sized>(rng: &mut R, max_gens: usize) -> SplitShortExactSequence {
    const DEGREES: usize = 4;
    let total = rng.gen_range(1..=max_gens.max(1));
    let mut dims = [0usize; DEGREES];
    for _ in 0..total {
        dims[rng.gen_range(0..DEGREES)] += 1;
    }
    // standard basis of Y: per degree, generator p may be the source of a
    // pair (∂0 e_p = e_q in degree k-1)
    let mut bd0: Vec<Vec<Option<usize>>> = dims.iter().map(|&d| alloc::vec![None; d]).collect();
    let mut is_target: Vec<Vec<bool>> = dims.iter().map(|&d| alloc::vec![false; d]).collect();
    for k in 1..DEGREES {
        let mut free_below: Vec<usize> =
            (0..dims[k - 1]).filter(|&q| !is_target[k - 1][q] && bd0[k - 1][q].is_none()).collect();
        for p in 0..dims[k] {
            if !free_below.is_empty() && rng.gen_bool(0.5) {
                let q = free_below.remove(rng.gen_range(0..free_below.len()));
                bd0[k][p] = Some(q);
                is_target[k - 1][q] = true;
            }
        }
    }
    // choose X: a pair is either fully in X, only its target in X, or
    // fully in Z; free generators go either way
    let mut in_x: Vec<Vec<bool>> = dims.iter().map(|&d| alloc::vec![false; d]).collect();
    for k in (1..DEGREES).rev() {
        for p in 0..dims[k] {
            if let Some(q) = bd0[k][p] {
                match rng.gen_range(0..3) {
                    0 => {
                        in_x[k][p] = true;
                        in_x[k - 1][q] = true;
                    }
                    1 => in_x[k - 1][q] = true,
                    _ => {}
                }
            }
        }
    }
    for k in 0..DEGREES {
        for p in 0..dims[k] {
            if bd0[k][p].is_none() && !is_target[k][p] {
                in_x[k][p] = rng.gen_bool(0.5);
            }
        }
    }
    // change of basis g: unitriangular per degree
    let g: Vec<Vec<Vec<usize>>> = dims
        .iter()
        .map(|&d| {
            (0..d)
                .map(|j| {
                    let mut col: Vec<usize> = (0..j).filter(|_| rng.gen_bool(0.35)).collect();
                    col.push(j);
                    col
                })
                .collect()
        })
        .collect();
    let ginv: Vec<Vec<Vec<usize>>> = g
        .iter()
        .zip(&dims)
        .map(|(cols, &d)| {
            let m = F2SparseMatrix::from_columns(d, cols.iter().map(|c| F2Vec::from_indices(d, c.clone())).collect());
            let r = m.reduce();
            (0..d).map(|j| r.solve(&F2Vec::unit(d, j)).unwrap().unwrap().support().to_vec()).collect()
        })
        .collect();

    let yname = |k: usize, p: usize| format!("y{k}_{p}");
    let xname = |k: usize, p: usize| format!("x{k}_{p}");
    let zname = |k: usize, p: usize| format!("z{k}_{p}");
    let apply = |m: &Vec<Vec<usize>>, v: &[usize], d: usize| -> Vec<usize> {
        let mut acc = F2Vec::zeros(d);
        for &i in v {
            acc.add_assign(&F2Vec::from_indices(d, m[i].clone()));
        }
        acc.support().to_vec()
    };

    // Y with ∂ = g ∂0 g⁻¹
    let mut yb = ComplexBuilder::new();
    let mut xb = ComplexBuilder::new();
    let mut zb = ComplexBuilder::new();
    for k in 0..DEGREES {
        for p in 0..dims[k] {
            yb.generator(yname(k, p), k as i64);
            if in_x[k][p] {
                xb.generator(xname(k, p), k as i64);
            } else {
                zb.generator(zname(k, p), k as i64);
            }
        }
    }
    for k in 1..DEGREES {
        for j in 0..dims[k] {
            let pre = &ginv[k][j];
            let d0: Vec<usize> = pre.iter().filter_map(|&s| bd0[k][s]).collect();
            let img = apply(&g[k - 1], F2Vec::from_indices(dims[k - 1], d0).support(), dims[k - 1]);
            yb.boundary(&yname(k, j), img.iter().map(|&q| yname(k - 1, q)));
        }
        for p in 0..dims[k] {
            if let Some(q) = bd0[k][p] {
                if in_x[k][p] {
                    xb.boundary(&xname(k, p), [xname(k - 1, q)]);
                } else if !in_x[k - 1][q] {
                    zb.boundary(&zname(k, p), [zname(k - 1, q)]);
                }
            }
        }
    }
    let y = Arc::new(yb.build().expect("conjugated complex"));
    let x = Arc::new(xb.build().expect("subcomplex"));
    let z = Arc::new(zb.build().expect("quotient complex"));
    let yi = |k: usize, p: usize| y.index_of(&yname(k, p)).unwrap();

    // θ = g ∘ incl_X, ψ = proj_Z ∘ g⁻¹, θ̂ = proj_X ∘ g⁻¹, ψ̂ = g ∘ incl_Z
    let mut theta = alloc::vec![Vec::new(); x.len()];
    let mut psi_hat = alloc::vec![Vec::new(); z.len()];
    let mut psi = alloc::vec![Vec::new(); y.len()];
    let mut theta_hat = alloc::vec![Vec::new(); y.len()];
    for k in 0..DEGREES {
        for p in 0..dims[k] {
            let img: Vec<usize> = g[k][p].iter().map(|&q| yi(k, q)).collect();
            if in_x[k][p] {
                theta[x.index_of(&xname(k, p)).unwrap()] = img;
            } else {
                psi_hat[z.index_of(&zname(k, p)).unwrap()] = img;
            }
        }
        for j in 0..dims[k] {
            for &q in &ginv[k][j] {
                if in_x[k][q] {
                    theta_hat[yi(k, j)].push(x.index_of(&xname(k, q)).unwrap());
                } else {
                    psi[yi(k, j)].push(z.index_of(&zname(k, q)).unwrap());
                }
            }
        }
    }
    SplitShortExactSequence {
        theta: LinearMap::from_indices(x.clone(), y.clone(), 0, theta).unwrap(),
        psi: LinearMap::from_indices(y.clone(), z.clone(), 0, psi).unwrap(),
        theta_hat: LinearMap::from_indices(y.clone(), x.clone(), 0, theta_hat).unwrap(),
        psi_hat: LinearMap::from_indices(z.clone(), y.clone(), 0, psi_hat).unwrap(),
        x,
        y,
        z,
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn circle() -> Arc<GradedF2Complex> {
        let mut b = ComplexBuilder::new();
        b.generator("v", 0).generator("w", 0).generator("e", 1).generator("f", 1);
        b.boundary("e", ["v", "w"]).boundary("f", ["v", "w"]);
        Arc::new(b.build().unwrap())
    }

    fn interval() -> Arc<GradedF2Complex> {
        let mut b = ComplexBuilder::new();
        b.generator("a", 1).generator("b", 0).boundary("a", ["b"]);
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn x_zero_sequence() {
        let z = circle();
        let x = Arc::new(GradedF2Complex::empty());
        let s = SplitShortExactSequence {
            theta: LinearMap::zero(x.clone(), z.clone(), 0),
            psi: LinearMap::identity(z.clone()),
            theta_hat: LinearMap::zero(z.clone(), x.clone(), 0),
            psi_hat: LinearMap::identity(z.clone()),
            x,
            y: z.clone(),
            z,
        };
        assert!(verify_splitting(&s).is_ok());
        let (_, report) = cone_equivalence(&s).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn direct_sum_has_zero_delta() {
        let s = direct_sum_sequence(circle(), interval()).unwrap();
        assert!(verify_splitting(&s).is_ok());
        assert!(connecting_map(&s).unwrap().is_zero());
        let les = long_exact_sequence(&s).unwrap();
        assert!(les.is_exact());
        assert!(les.delta_matches_zigzag);
        let (eq, report) = cone_equivalence(&s).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures());
        // σρ projects onto the θ-part of Y⁺ and kills Z
        let sr = eq.sigma.compose(&eq.rho).unwrap();
        for i in 0..s.z.len() {
            assert!(sr.image_of(eq.cone.z_index(i)).is_empty());
        }
    }

    #[test]
    fn acyclic_sequence() {
        let i = interval();
        let s = direct_sum_sequence(i.clone(), i).unwrap();
        let les = long_exact_sequence(&s).unwrap();
        assert!(les.nodes.iter().all(|n| n.dim == 0 && n.exact));
    }

    #[test]
    fn broken_splitting_is_reported() {
        let mut s = direct_sum_sequence(circle(), interval()).unwrap();
        s.theta_hat = LinearMap::zero(s.y.clone(), s.x.clone(), 0);
        match verify_splitting(&s) {
            Err(ExactError::Identity(f)) => assert_eq!(f.identity, "θ̂θ = Id_X"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pair_split_across_has_nonzero_delta() {
        // Y = interval, X = span{b}, Z = span{a}: Δ a = b
        let y = interval();
        let mut xb = ComplexBuilder::new();
        xb.generator("b", 0);
        let x = Arc::new(xb.build().unwrap());
        let mut zb = ComplexBuilder::new();
        zb.generator("a", 1);
        let z = Arc::new(zb.build().unwrap());
        let s = SplitShortExactSequence {
            theta: LinearMap::from_ids(x.clone(), y.clone(), 0, [("b", alloc::vec!["b"])]).unwrap(),
            psi: LinearMap::from_ids(y.clone(), z.clone(), 0, [("a", alloc::vec!["a"])]).unwrap(),
            theta_hat: LinearMap::from_ids(y.clone(), x.clone(), 0, [("b", alloc::vec!["b"])]).unwrap(),
            psi_hat: LinearMap::from_ids(z.clone(), y.clone(), 0, [("a", alloc::vec!["a"])]).unwrap(),
            x,
            y,
            z,
        };
        let delta = connecting_map(&s).unwrap();
        assert_eq!(delta.image_ids(0), alloc::vec!["b".to_string()]);
        let les = long_exact_sequence(&s).unwrap();
        assert!(les.is_exact());
        assert_eq!(les.connecting()[&1].rank(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_sequences_satisfy_everything(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = random_split_sequence(&mut rng, 20);
            prop_assert!(verify_splitting(&s).is_ok());
            let les = long_exact_sequence(&s).unwrap();
            prop_assert!(les.is_exact());
            prop_assert!(les.delta_matches_zigzag);
            let (_, report) = cone_equivalence(&s).unwrap();
            prop_assert!(report.all_pass(), "{:?}", report.failures());
        }

        #[test]
        fn cone_is_degreewise_exact(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = random_split_sequence(&mut rng, 16);
            let cone = mapping_cone(&s.psi).unwrap();
            prop_assert!(check_exact_degreewise(&cone.inclusion, &cone.projection).is_ok());
        }
    }
}
