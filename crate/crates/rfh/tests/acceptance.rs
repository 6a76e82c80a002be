//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfh::fixtures::Example;
use rfh::pipeline;
use rfh_core::exact::{cone_equivalence, random_split_sequence, verify_splitting};
use rfh_core::gysin::sphere_bundle_homology_table;
use rfh_core::numeric::{aleksandrov_battery, gradient_battery, levrel2_battery, levrel_battery, AleksandrovConfig};
use rfh_core::rf::{compare_hrf_table, compute_hrf_by_class};

/// Dense GF(2) matrix rows as bitsets.
struct Dense {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl Dense {
    fn new(cols: usize) -> Self {
        Dense { cols, rows: Vec::new() }
    }

    fn push(&mut self, ones: &[usize]) {
        let mut r = vec![0u64; self.cols.div_ceil(64)];
        for &c in ones {
            r[c / 64] ^= 1 << (c % 64);
        }
        self.rows.push(r);
    }

    fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, b) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows.len()).find(|&i| self.rows[i][w] & b != 0) else { continue };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for i in 0..self.rows.len() {
                if i != rank && self.rows[i][w] & b != 0 {
                    for (x, y) in self.rows[i].iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Betti numbers of a cell complex given by cells per dimension and the
/// mod 2 boundary of each cell as indices one dimension down.
fn cellular_betti(cells: &[usize], boundary: &[Vec<Vec<usize>>]) -> Vec<usize> {
    let ranks: Vec<usize> = (0..cells.len())
        .map(|d| {
            if d == 0 {
                return 0;
            }
            let mut m = Dense::new(cells[d - 1]);
            for b in &boundary[d] {
                m.push(b);
            }
            m.rank()
        })
        .collect();
    (0..cells.len()).map(|d| cells[d] - ranks[d] - ranks.get(d + 1).copied().unwrap_or(0)).collect()
}

/// Faces of `∂[-1,1]^4` modulo the antipodal map: a CW model of `RP³`.
/// A face is a word over {-1, 0, +1} with at least one fixed coordinate,
/// 0 marking a free one.
fn rp3_betti() -> Vec<usize> {
    let all: Vec<[i8; 4]> = (0..81)
        .map(|mut i| {
            let mut f = [0i8; 4];
            for c in &mut f {
                *c = (i % 3) as i8 - 1;
                i /= 3;
            }
            f
        })
        .filter(|f| f.iter().any(|&c| c != 0))
        .collect();
    let canon = |f: [i8; 4]| -> [i8; 4] {
        let g = f.map(|c| -c);
        f.max(g)
    };
    let mut by_dim: Vec<Vec<[i8; 4]>> = vec![Vec::new(); 4];
    let reps: BTreeSet<[i8; 4]> = all.iter().map(|&f| canon(f)).collect();
    for f in reps {
        let d = f.iter().filter(|&&c| c == 0).count();
        by_dim[d].push(f);
    }
    let index: Vec<BTreeMap<[i8; 4], usize>> =
        by_dim.iter().map(|v| v.iter().enumerate().map(|(i, &f)| (f, i)).collect()).collect();
    let boundary: Vec<Vec<Vec<usize>>> = (0..4)
        .map(|d| {
            by_dim[d]
                .iter()
                .map(|f| {
                    let mut out = Vec::new();
                    for c in 0..4 {
                        if f[c] == 0 {
                            for s in [-1, 1] {
                                let mut g = *f;
                                g[c] = s;
                                out.push(index[d - 1][&canon(g)]);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let cells: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    cellular_betti(&cells, &xor_lists(boundary))
}

fn xor_lists(b: Vec<Vec<Vec<usize>>>) -> Vec<Vec<Vec<usize>>> {
    b.into_iter()
        .map(|cells| {
            cells
                .into_iter()
                .map(|mut v| {
                    v.sort();
                    let mut out: Vec<usize> = Vec::new();
                    for x in v {
                        if out.last() == Some(&x) {
                            out.pop();
                        } else {
                            out.push(x);
                        }
                    }
                    out
                })
                .collect()
        })
        .collect()
}

/// Cubical `T³` as the product of three `m`-cycles.
fn t3_betti(m: usize) -> Vec<usize> {
    // a cell: per axis (position, is_edge)
    type Cell = [(usize, bool); 3];
    let mut by_dim: Vec<Vec<Cell>> = vec![Vec::new(); 4];
    for code in 0..(2 * m).pow(3) {
        let mut c = code;
        let mut cell = [(0, false); 3];
        for a in &mut cell {
            *a = ((c % (2 * m)) / 2, c % 2 == 1);
            c /= 2 * m;
        }
        by_dim[cell.iter().filter(|a| a.1).count()].push(cell);
    }
    let index: Vec<BTreeMap<Cell, usize>> =
        by_dim.iter().map(|v| v.iter().enumerate().map(|(i, &f)| (f, i)).collect()).collect();
    let boundary: Vec<Vec<Vec<usize>>> = (0..4)
        .map(|d| {
            by_dim[d]
                .iter()
                .map(|cell| {
                    let mut out = Vec::new();
                    for a in 0..3 {
                        if cell[a].1 {
                            for p in [cell[a].0, (cell[a].0 + 1) % m] {
                                let mut g = *cell;
                                g[a] = (p, false);
                                out.push(index[d - 1][&g]);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let cells: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    cellular_betti(&cells, &xor_lists(boundary))
}

struct Line {
    failures: usize,
}

impl Line {
    fn report(&mut self, n: u32, ok: bool, what: &str, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("criterion {n:>2} [{}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn gysin_betti(e: Example) -> (rfh_core::gysin::GysinReport, Duration) {
    let j = e.morse().unwrap();
    let (r, t) = timed(|| pipeline::gysin(&j).unwrap());
    (r, t)
}

fn main() -> ExitCode {
    let mut out = Line { failures: 0 };

    let (r, t) = gysin_betti(Example::S2);
    let oracle = rp3_betti();
    let formula = sphere_bundle_homology_table(&r.betti_m, 2, false).unwrap();
    let ok = r.betti_bundle == [1, 1, 1, 1]
        && r.betti_bundle == formula
        && r.betti_bundle == oracle
        && r.all_pass()
        && t < Duration::from_secs(1);
    out.report(
        1,
        ok,
        "Gysin S^2",
        format!("H(S*S^2) = {:?}, formula {formula:?}, RP^3 CW oracle {oracle:?}, {t:?}", r.betti_bundle),
    );

    let (r, t) = gysin_betti(Example::T2);
    let oracle = t3_betti(3);
    let ok = r.betti_bundle == [1, 3, 3, 1] && r.betti_bundle == oracle && r.all_pass();
    out.report(2, ok, "Gysin T^2", format!("H(S*T^2) = {:?}, T^3 cubical oracle {oracle:?}, {t:?}", r.betti_bundle));

    let (r, _) = gysin_betti(Example::Rp2);
    let exact = r.les.nodes.iter().filter(|n| n.exact).count();
    let ok = r.top_connecting_rank == 1 && r.les.nodes.len() == 12 && exact == 12 && r.all_pass();
    out.report(
        3,
        ok,
        "Gysin RP^2",
        format!("rank H_2(M) -> H_0(M) = {}, exact at {exact}/{} nodes", r.top_connecting_rank, r.les.nodes.len()),
    );

    let mut ok = true;
    let mut detail = Vec::new();
    for e in [Example::S2Rf, Example::Rp2Rf] {
        let (m, t) = timed(|| pipeline::verify_main(&e.model().unwrap()).unwrap());
        let passed = m.theorem.identities.iter().filter(|i| i.ok()).count();
        let q_min = &m.run.model.points[m.run.model.q_min()].id;
        let delta_ok =
            if m.run.model.chi() { m.theorem.delta_q_max == [q_min.clone()] } else { m.theorem.delta_q_max.is_empty() };
        ok &= m.theorem.identities.len() == 8
            && passed == 8
            && m.theorem.all_pass()
            && delta_ok
            && t < Duration::from_secs(1);
        detail.push(format!(
            "{} (chi {}) {passed}/{} identities, Delta q_max = {:?}, {t:?}",
            e.name(),
            u8::from(m.run.model.chi()),
            m.theorem.identities.len(),
            m.theorem.delta_q_max
        ));
    }
    out.report(4, ok, "identity suite", detail.join("; "));

    let mut ok = true;
    let mut detail = Vec::new();
    for e in [Example::S2Rf, Example::Rp2Rf] {
        let j = e.model().unwrap();
        let run = pipeline::rf_run(&j).unwrap();
        let table = compare_hrf_table(&run.model, &j.loop_betti).unwrap();
        let by_class = compute_hrf_by_class(&run.model).unwrap();
        let mut mismatches = 0;
        for (c, h) in &by_class {
            let b = &j.loop_betti[c];
            let bn = &j.loop_betti[&run.model.data.negate(c)];
            let get = |v: &Vec<usize>, k: i64| if k < 0 { 0 } else { v.get(k as usize).copied().unwrap_or(0) };
            for k in -6..=6i64 {
                let expected = match k {
                    k if k >= 2 => get(b, k),
                    k if k <= -1 => get(bn, 1 - k),
                    _ => get(b, k) + get(bn, 1 - k) - usize::from(c == "0" && run.model.chi()),
                };
                if h.betti(k) != expected {
                    mismatches += 1;
                }
            }
        }
        ok &= table.all_pass() && mismatches == 0;
        detail.push(format!("{}: {} rows, {mismatches} mismatches", e.name(), table.rows.len()));
    }
    out.report(5, ok, "HRF table", detail.join("; "));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut pass, mut total, mut max_gens) = (0, 0, 0);
    for _ in 0..64 {
        let s = random_split_sequence(&mut rng, 20);
        max_gens = max_gens.max(s.y.len());
        total += 1;
        let good = verify_splitting(&s).is_ok()
            && cone_equivalence(&s)
                .map(|(_, r)| r.rho_sigma_identity.is_ok() && r.homotopy.is_ok() && r.all_pass())
                .unwrap_or(false);
        pass += usize::from(good);
    }
    out.report(
        6,
        pass == total && total >= 50 && max_gens <= 20,
        "cone equivalence",
        format!("{pass}/{total} random split sequences, at most {max_gens} generators"),
    );

    let (r, t) = timed(|| levrel_battery(7, 1000, 256).unwrap());
    let ok = r.min_margin >= -1e-9 && r.max_witness_residual <= 1e-6 && r.pass && t < Duration::from_secs(5);
    out.report(
        7,
        ok,
        "levrel battery",
        format!(
            "1000 loops N=256, min margin {:e}, witness residual {:e}, {t:?}",
            r.min_margin, r.max_witness_residual
        ),
    );

    let (r, t) = timed(|| levrel2_battery(7, 1000, 256).unwrap());
    let ok = r.min_margin >= -1e-9 && r.max_witness_residual <= 1e-6 && r.pass;
    out.report(
        8,
        ok,
        "levrel2 battery",
        format!("1000 trials, min margin {:e}, Legendre residual {:e}, {t:?}", r.min_margin, r.max_witness_residual),
    );

    let config = AleksandrovConfig { grid: 128, trials: 100, ..AleksandrovConfig::default() };
    let (r, t) = timed(|| aleksandrov_battery(7, config).unwrap());
    let ok = r.max_margin <= 1e-6 && r.margins.len() == 100 && r.skipped == 0 && t < Duration::from_secs(30);
    out.report(9, ok, "Aleksandrov battery", format!("100 trials h=1/128, max margin {:e}, {t:?}", r.max_margin));

    let r = gradient_battery(7, 20, 256, 1e-5).unwrap();
    let ok = r.min_halving_ratio >= 2.0 && r.max_eta_error <= 1e-12 && r.pass;
    out.report(
        10,
        ok,
        "gradient check",
        format!(
            "halving ratio {:.3}, eta error {:e}, relative error {:e}",
            r.min_halving_ratio, r.max_eta_error, r.max_relative_error
        ),
    );

    println!("acceptance: {} of 10 criteria failed", out.failures);
    if out.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
