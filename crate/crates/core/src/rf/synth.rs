//! Random models satisfying every structural constraint.
//!
//! The boundary is `g∂₀g⁻¹`, where `∂₀` is the standard boundary built from
//! the two Morse complexes and `g = I + N` with `N` strictly lowering the
//! filtration, preserving degree and class, and sending zero-action
//! generators into negative action. Then `Φ = gΦ₀ + ∂K + K∂` and
//! `Ψ = Ψ₀g⁻¹` with `Φ₀γ = Z^+(γ)`, `Ψ₀Z^-(γ) = γ`, `Ψ₀Z^+ = 0`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::f2::F2Vec;
use crate::gysin::{CriticalPoint, MorseData};

use super::data::{ClosedOrbit, EnergyCritData};
use super::model::{key_of, rf_generators, RfInput, Sign};
use super::RfError;

/// A synthesized boundary with coefficients of `Φ` and `Ψ` in the input
/// format of [`super::assemble_phi`] and [`super::assemble_psi`].
#[derive(Clone, Debug, PartialEq)]
pub struct SynthModel {
    pub input: RfInput,
    pub phi: BTreeMap<String, Vec<String>>,
    pub psi: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthOptions {
    /// Probability of each admissible entry of `N`.
    pub conjugation: f64,
    /// Probability of each admissible entry of `K`.
    pub homotopy: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { conjugation: 0.3, homotopy: 0.3 }
    }
}

fn xor_into(v: &mut F2Vec, w: &F2Vec) {
    v.add_assign(w);
}

pub fn synthesize<R: Rng + ?Sized>(
    data: &EnergyCritData,
    rng: &mut R,
    opts: SynthOptions,
) -> Result<SynthModel, RfError> {
    let v = data.validate()?;
    let gens = rf_generators(data);
    let m = gens.len();
    let np = v.points.len();
    let keys: Vec<_> =
        (0..m).map(|i| key_of(&v.points[i / 2], if i % 2 == 0 { Sign::Plus } else { Sign::Minus })).collect();
    let plus = |p: usize| 2 * p;
    let minus = |p: usize| 2 * p + 1;
    let class = |i: usize| gens[i].label.class.clone();
    let below = |a: usize, b: usize| keys[a].cmp(&keys[b]) == Ordering::Less;

    let x_point = |i: usize| v.points.iter().position(|p| p.id == v.x.id(i)).unwrap();
    let z_point = |i: usize| v.points.iter().position(|p| p.id == v.z.id(i)).unwrap();
    let mut x_bd = alloc::vec![Vec::new(); np];
    let mut z_bd = alloc::vec![Vec::new(); np];
    for i in 0..v.x.len() {
        x_bd[x_point(i)] = v.x.boundary_of(i).iter().map(|&j| x_point(j)).collect();
    }
    for i in 0..v.z.len() {
        z_bd[z_point(i)] = v.z.boundary_of(i).iter().map(|&j| z_point(j)).collect();
    }

    let qmin = v.points.iter().position(|p| p.id == data.constant.q_min()).unwrap();
    let qmax = v.points.iter().position(|p| p.id == data.constant.q_max()).unwrap();
    let mut d0 = alloc::vec![F2Vec::zeros(m); m];
    for p in 0..np {
        d0[plus(p)] = F2Vec::from_indices(m, x_bd[p].iter().map(|&q| plus(q)));
        d0[minus(p)] = F2Vec::from_indices(m, z_bd[p].iter().map(|&q| minus(q)));
        if p == qmax && data.euler() {
            xor_into(&mut d0[minus(p)], &F2Vec::unit(m, plus(qmin)));
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then_with(|| gens[a].id.cmp(&gens[b].id)));
    let mut n = alloc::vec![F2Vec::zeros(m); m];
    for a in 0..m {
        let cand: Vec<usize> = (0..m)
            .filter(|&b| {
                below(b, a)
                    && gens[b].degree == gens[a].degree
                    && class(b) == class(a)
                    && (keys[a].action != 0.0 || keys[b].action < 0.0)
            })
            .collect();
        n[a] = F2Vec::from_indices(m, cand.into_iter().filter(|_| rng.gen_bool(opts.conjugation)));
    }
    let g = |w: &F2Vec| -> F2Vec {
        let mut out = w.clone();
        for &i in w.support() {
            xor_into(&mut out, &n[i]);
        }
        out
    };
    let mut h = alloc::vec![F2Vec::zeros(m); m];
    for &a in &order {
        let mut v = F2Vec::unit(m, a);
        for &b in n[a].support() {
            xor_into(&mut v, &h[b]);
        }
        h[a] = v;
    }
    let apply = |table: &[F2Vec], w: &F2Vec| -> F2Vec {
        let mut out = F2Vec::zeros(m);
        for &i in w.support() {
            xor_into(&mut out, &table[i]);
        }
        out
    };
    let bd: Vec<F2Vec> = (0..m).map(|a| g(&apply(&d0, &h[a]))).collect();

    let mut kk = alloc::vec![F2Vec::zeros(m); np];
    for p in 0..np {
        let lead = plus(p);
        let cand: Vec<usize> = (0..m)
            .filter(|&w| {
                below(w, lead)
                    && gens[w].degree == v.points[p].ind_plus + 1
                    && class(w) == class(lead)
                    && (!v.points[p].constant || keys[w].action < 0.0)
            })
            .collect();
        kk[p] = F2Vec::from_indices(m, cand.into_iter().filter(|_| rng.gen_bool(opts.homotopy)));
    }
    let mut phi = BTreeMap::new();
    for p in 0..np {
        let mut img = g(&F2Vec::unit(m, plus(p)));
        xor_into(&mut img, &apply(&bd, &kk[p]));
        for &q in &x_bd[p] {
            xor_into(&mut img, &kk[q]);
        }
        debug_assert!(img.get(plus(p)));
        let t: Vec<String> = img.support().iter().filter(|&&w| w != plus(p)).map(|&w| gens[w].id.clone()).collect();
        if !t.is_empty() {
            phi.insert(v.points[p].id.clone(), t);
        }
    }
    let mut psi = BTreeMap::new();
    for a in 0..m {
        let lead = if a % 2 == 1 { Some(a / 2) } else { None };
        let t: Vec<String> = h[a]
            .support()
            .iter()
            .filter(|&&w| w % 2 == 1 && Some(w / 2) != lead)
            .map(|&w| v.points[w / 2].id.clone())
            .collect();
        if !t.is_empty() {
            psi.insert(gens[a].id.clone(), t);
        }
    }
    let boundary = (0..m)
        .filter(|&a| !bd[a].is_zero())
        .map(|a| (gens[a].id.clone(), bd[a].support().iter().map(|&w| gens[w].id.clone()).collect()))
        .collect();
    Ok(SynthModel { input: RfInput { generators: gens.clone(), boundary }, phi, psi })
}

/// `g∂₀g⁻¹` with `∂₀ = base`, on a list sorted so that `N` may only send a
/// point to earlier ones.
fn conjugate<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    base: &[Vec<usize>],
    allowed: impl Fn(usize, usize) -> bool,
    density: f64,
) -> Vec<F2Vec> {
    let mut n = alloc::vec![F2Vec::zeros(len); len];
    for (a, na) in n.iter_mut().enumerate() {
        *na = F2Vec::from_indices(len, (0..len).filter(|&b| allowed(a, b) && rng.gen_bool(density)));
    }
    let mut h = alloc::vec![F2Vec::zeros(len); len];
    for a in 0..len {
        let mut v = F2Vec::unit(len, a);
        for &b in n[a].support() {
            debug_assert!(b < a);
            v.add_assign(&h[b]);
        }
        h[a] = v;
    }
    (0..len)
        .map(|a| {
            let mut d = F2Vec::zeros(len);
            for &i in h[a].support() {
                d.add_assign(&F2Vec::from_indices(len, base[i].iter().copied()));
            }
            let mut out = d.clone();
            for &i in d.support() {
                out.add_assign(&n[i]);
            }
            out
        })
        .collect()
}

/// Random Morse data for a closed manifold of dimension 2 or 3.
pub fn random_morse_data<R: Rng + ?Sized>(rng: &mut R) -> MorseData {
    let n = rng.gen_range(2..=3u32);
    let mut pts = alloc::vec![CriticalPoint { id: "qmin".into(), index: 0, value: 0.0 }];
    let mut counts = BTreeMap::new();
    let push = |pts: &mut Vec<CriticalPoint>, id: String, index: u32| {
        pts.push(CriticalPoint { id, index, value: index as f64 });
    };
    for k in 1..n {
        for j in 0..rng.gen_range(0..=2) {
            push(&mut pts, format!("c{k}_{j}"), k);
        }
    }
    if n == 3 {
        for j in 0..rng.gen_range(0..=1) {
            push(&mut pts, format!("a{j}"), 1);
            push(&mut pts, format!("b{j}"), 2);
            counts.insert((format!("b{j}"), format!("a{j}")), 1);
        }
    }
    push(&mut pts, "qmax".into(), n);
    let euler = pts.len() % 2 == 1;
    MorseData { n, critical_points: pts, boundary_counts: counts, euler }
}

/// Random energy data: constants from [`random_morse_data`] and up to
/// `max_orbits` closed orbits on two energy levels in the classes `0`,
/// `1` (its own inverse) and `2 ↔ 3`, with boundaries obtained by
/// conjugating random cancelling pairs.
pub fn random_energy_data<R: Rng + ?Sized>(rng: &mut R, max_orbits: usize) -> EnergyCritData {
    let constant = random_morse_data(rng);
    let classes = ["0", "1", "2", "3"];
    let mut orbits = Vec::new();
    for j in 0..rng.gen_range(0..=max_orbits) {
        let ind_e = rng.gen_range(0..=1u32);
        let aux = rng.gen_range(0..=3u32);
        orbits.push(ClosedOrbit {
            id: format!("g{j}"),
            energy: [1.0, 4.0][rng.gen_range(0..2)],
            aux: aux as f64,
            ind_plus: ind_e + aux,
            ind_minus: ind_e + 3 - aux,
            class: classes[rng.gen_range(0..classes.len())].to_string(),
        });
    }
    let mut class_negation = BTreeMap::new();
    class_negation.insert("2".to_string(), "3".to_string());
    class_negation.insert("3".to_string(), "2".to_string());
    let mut data = EnergyCritData {
        constant,
        orbits,
        energy_boundary: BTreeMap::new(),
        coenergy_boundary: BTreeMap::new(),
        class_negation,
    };
    let pts = data.critical_points();
    let nc: Vec<usize> = (0..pts.len()).filter(|&i| !pts[i].constant).collect();

    // Sort so that N only points to earlier entries: ascending (E, e) for
    // the boundary, descending (E, -e) for the coboundary.
    for forward in [true, false] {
        let mut ord: Vec<usize> = (0..pts.len()).collect();
        if forward {
            ord.sort_by(|&a, &b| pts[a].cmp_energy(&pts[b]).then_with(|| pts[a].id.cmp(&pts[b].id)));
        } else {
            ord.sort_by(|&a, &b| pts[b].cmp_coenergy(&pts[a]).then_with(|| pts[b].id.cmp(&pts[a].id)));
        }
        let pos_of = |p: usize| ord.iter().position(|&q| q == p).unwrap();
        let deg = |p: usize| if forward { pts[p].ind_plus } else { -pts[p].ind_minus };
        let strictly = |a: usize, b: usize| {
            if forward {
                pts[b].cmp_energy(&pts[a]) == Ordering::Less
            } else {
                pts[b].cmp_coenergy(&pts[a]) == Ordering::Greater
            }
        };
        let mut base = alloc::vec![Vec::new(); pts.len()];
        for (i, p) in pts.iter().enumerate() {
            if p.constant {
                let bd = data.constant.boundary_ids(&p.id);
                base[pos_of(i)] = bd.iter().map(|q| pos_of(pts.iter().position(|r| r.id == *q).unwrap())).collect();
            }
        }
        let mut used = alloc::vec![false; pts.len()];
        for &a in &nc {
            if used[a] || rng.gen_bool(0.5) {
                continue;
            }
            if let Some(&b) = nc.iter().find(|&&b| {
                !used[b] && b != a && deg(b) == deg(a) - 1 && strictly(a, b) && pts[b].class == pts[a].class
            }) {
                used[a] = true;
                used[b] = true;
                base[pos_of(a)].push(pos_of(b));
            }
        }
        let allowed = |a: usize, b: usize| {
            let (pa, pb) = (ord[a], ord[b]);
            !pts[pa].constant && b < a && strictly(pa, pb) && deg(pa) == deg(pb) && pts[pa].class == pts[pb].class
        };
        let d = conjugate(rng, pts.len(), &base, allowed, 0.4);
        for (a, img) in d.iter().enumerate() {
            let p = &pts[ord[a]];
            let ids: Vec<String> = img.support().iter().map(|&b| pts[ord[b]].id.clone()).collect();
            if forward {
                if !p.constant && !ids.is_empty() {
                    data.energy_boundary.insert(p.id.clone(), ids);
                }
            } else {
                let extra: Vec<String> =
                    img.support().iter().filter(|&&b| !pts[ord[b]].constant).map(|&b| pts[ord[b]].id.clone()).collect();
                if !extra.is_empty() {
                    data.coenergy_boundary.insert(p.id.clone(), extra);
                }
            }
        }
    }
    data
}
