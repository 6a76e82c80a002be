//! JSON and text renderings of the reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rfh_core::exact::{verify_splitting, LongExactSequence, Term};
use rfh_core::gysin::GysinReport;
use rfh_core::homology::HomologySummary;
use rfh_core::numeric::{AleksandrovReport, GradientReport, Levrel2Report, LevrelReport, TransportBattery};
use rfh_core::rf::{compute_hrf_by_class, HrfReport, RfError};
use rfh_core::{GradedF2Complex, Mismatch};
use serde_json::{json, Value};

use crate::io::{ChainMapJson, ComplexJson};
use crate::pipeline::{MainRun, RfRun};

/// A rendered report and whether every check in it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub pass: bool,
}

fn mismatch(m: &Mismatch) -> Value {
    json!({ "generator": m.generator, "lhs": m.lhs, "rhs": m.rhs })
}

fn witness(m: Option<&Mismatch>) -> Value {
    m.map_or(Value::Null, mismatch)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn betti_json(h: &HomologySummary) -> Value {
    let t: BTreeMap<String, usize> = h.betti_table().into_iter().map(|(k, b)| (k.to_string(), b)).collect();
    json!(t)
}

fn degree_table(text: &mut String, title: &str, rows: &[(i64, Vec<String>)], header: &[&str]) {
    let _ = writeln!(text, "{title}");
    let _ = write!(text, "  {:>6}", "k");
    for h in header {
        let _ = write!(text, " {h:>10}");
    }
    text.push('\n');
    for (k, cells) in rows {
        let _ = write!(text, "  {k:>6}");
        for c in cells {
            let _ = write!(text, " {c:>10}");
        }
        text.push('\n');
    }
}

pub fn homology(c: &GradedF2Complex, h: &HomologySummary) -> Outcome {
    let mut reps = BTreeMap::new();
    let mut rows = Vec::new();
    if let Some((lo, hi)) = c.window() {
        for k in lo..=hi {
            let r: Vec<Vec<String>> = h.representatives(k).iter().map(|v| c.ids(c.globalize(k, v).support())).collect();
            if !r.is_empty() {
                reps.insert(k.to_string(), r);
            }
            rows.push((k, vec![c.dim(k).to_string(), h.betti(k).to_string()]));
        }
    }
    let mut text = String::new();
    degree_table(&mut text, "homology over GF(2)", &rows, &["dim C_k", "b_k"]);
    let _ = writeln!(text, "total {}", h.total());
    Outcome {
        json: json!({
            "generators": c.len(),
            "euler_characteristic": c.euler_characteristic(),
            "betti": betti_json(h),
            "total": h.total(),
            "representatives": reps,
        }),
        text,
        pass: true,
    }
}

fn term(t: Term) -> &'static str {
    match t {
        Term::X => "X",
        Term::Y => "Y",
        Term::Z => "Z",
    }
}

fn les_json(les: &LongExactSequence) -> Value {
    let nodes: Vec<Value> = les
        .nodes
        .iter()
        .zip(&les.maps)
        .map(|(n, m)| json!({ "degree": n.degree, "term": term(n.term), "dim": n.dim, "exact": n.exact, "rank_out": m.rank() }))
        .collect();
    json!({ "nodes": nodes, "exact": les.is_exact(), "delta_matches_zigzag": les.delta_matches_zigzag })
}

pub fn gysin(r: &GysinReport) -> Outcome {
    let splitting = verify_splitting(&r.sequence);
    let split_err = splitting.as_ref().err().map(|e| e.to_string());
    let pass = r.all_pass() && splitting.is_ok();
    let seq = &r.sequence;
    let json = json!({
        "n": r.n,
        "euler": u8::from(r.euler),
        "betti_m": r.betti_m,
        "betti_bundle": r.betti_bundle,
        "table": r.table,
        "table_matches": r.betti_bundle == r.table,
        "top_connecting_rank": r.top_connecting_rank,
        "other_connecting_zero": r.other_connecting_zero,
        "poincare_duality": r.poincare_duality,
        "phi_star_rank_0": r.phi_star_rank_0,
        "splitting": split_err,
        "long_exact_sequence": les_json(&r.les),
        "sphere_bundle": ComplexJson::from_complex(&r.sphere_bundle),
        "sequence": {
            "phi": ChainMapJson::from_map(&seq.theta),
            "psi": ChainMapJson::from_map(&seq.psi),
            "phi_hat": ChainMapJson::from_map(&seq.theta_hat),
            "psi_hat": ChainMapJson::from_map(&seq.psi_hat),
        },
        "delta": ChainMapJson::from_map(&r.delta),
        "pass": pass,
    });
    let mut text = String::new();
    let top = 2 * r.n as usize - 1;
    let rows: Vec<(i64, Vec<String>)> = (0..=top)
        .map(|k| {
            let m = r.betti_m.get(k).map_or(0, |&b| b);
            (k as i64, vec![m.to_string(), r.betti_bundle[k].to_string(), r.table[k].to_string()])
        })
        .collect();
    degree_table(
        &mut text,
        &format!("Gysin sequence, n = {}, euler = {}", r.n, u8::from(r.euler)),
        &rows,
        &["b_k(M)", "b_k(S*M)", "formula"],
    );
    let _ = writeln!(text, "table matches formula     {}", mark(r.betti_bundle == r.table));
    let _ = writeln!(text, "splitting identities      {}", mark(splitting.is_ok()));
    let exact_nodes = r.les.nodes.iter().filter(|n| n.exact).count();
    let _ =
        writeln!(text, "exact nodes               {}/{} {}", exact_nodes, r.les.nodes.len(), mark(r.les.is_exact()));
    let _ = writeln!(text, "delta agrees with zig-zag {}", mark(r.les.delta_matches_zigzag));
    let _ = writeln!(text, "rank H_n(M) -> H_0(M)     {}", r.top_connecting_rank);
    let _ = writeln!(text, "other connecting maps 0   {}", mark(r.other_connecting_zero));
    let _ = writeln!(text, "Poincare duality          {}", mark(r.poincare_duality));
    let _ = writeln!(text, "result                    {}", mark(pass));
    Outcome { json, text, pass }
}

fn census(run: &RfRun) -> Value {
    let dims =
        |c: &GradedF2Complex| -> BTreeMap<String, usize> { c.degrees().map(|k| (k.to_string(), c.dim(k))).collect() };
    json!({
        "n": run.model.n(),
        "chi": u8::from(run.model.chi()),
        "critical_points": run.model.points.len(),
        "classes": run.model.data.classes(),
        "rf_dims": dims(&run.model.rf),
        "x_dims": dims(&run.model.x),
        "z_dims": dims(&run.model.z),
        "p_derived": run.p_derived,
    })
}

pub fn rf_validate(run: &RfRun) -> Outcome {
    let pass = run.phi.all_pass() && run.psi.all_pass();
    let json = json!({
        "model": census(run),
        "phi": {
            "left_inverse": witness(run.phi.left_inverse.as_ref()),
            "kernel_is_negative": run.phi.kernel_is_negative,
            "iso_high": run.phi.iso_high,
        },
        "psi": {
            "right_inverse": witness(run.psi.right_inverse.as_ref()),
            "image_is_negative": run.psi.image_is_negative,
            "iso_low": run.psi.iso_low,
            "psi_hat_chain_map": run.psi.psi_hat_chain_map,
        },
        "pass": pass,
    });
    let mut text = String::new();
    let m = &run.model;
    let rows: Vec<(i64, Vec<String>)> = {
        let mut ks: Vec<i64> = m.rf.degrees().chain(m.x.degrees()).chain(m.z.degrees()).collect();
        ks.sort();
        ks.dedup();
        ks.into_iter()
            .map(|k| (k, vec![m.x.dim(k).to_string(), m.rf.dim(k).to_string(), m.z.dim(k).to_string()]))
            .collect()
    };
    degree_table(
        &mut text,
        &format!("model, n = {}, chi = {}", m.n(), u8::from(m.chi())),
        &rows,
        &["X_k", "RF_k", "Z_k"],
    );
    let _ = writeln!(text, "Phi_hat Phi = Id          {}", mark(run.phi.left_inverse.is_none()));
    let _ = writeln!(text, "ker Phi_hat = RF^-        {}", mark(run.phi.kernel_is_negative));
    let _ = writeln!(text, "Phi iso for k >= 2        {}", mark(run.phi.iso_high));
    let _ = writeln!(text, "Psi Psi_hat = Id          {}", mark(run.psi.right_inverse.is_none()));
    let _ = writeln!(text, "im Psi_hat = RF^-         {}", mark(run.psi.image_is_negative));
    let _ = writeln!(text, "Psi iso for k <= -1       {}", mark(run.psi.iso_low));
    let _ = writeln!(text, "Psi_hat chain map         {}", run.psi.psi_hat_chain_map);
    let _ = writeln!(text, "result                    {}", mark(pass));
    Outcome { json, text, pass }
}

pub fn rf_main(r: &MainRun) -> Outcome {
    let t = &r.theorem;
    let pass = t.all_pass() && r.isomorphisms.positive && r.isomorphisms.negative;
    let ids: Vec<Value> = t
        .identities
        .iter()
        .map(|i| json!({ "label": i.label, "statement": i.statement, "pass": i.ok(), "witness": witness(i.witness.as_ref()) }))
        .collect();
    let q_min = r.run.model.points[r.run.model.q_min()].id.clone();
    let json = json!({
        "model": census(&r.run),
        "identities": ids,
        "splitting": t.splitting,
        "delta_q_max": t.delta_q_max,
        "delta_q_max_is_q_min": t.delta_q_max == [q_min.clone()],
        "positive_isomorphism": r.isomorphisms.positive,
        "negative_isomorphism": r.isomorphisms.negative,
        "pass": pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "identities, chi = {}", u8::from(t.chi));
    for i in &t.identities {
        let _ = writeln!(text, "  {:<6} {:<40} {}", i.label, i.statement, mark(i.ok()));
        if let Some(w) = &i.witness {
            let _ = writeln!(text, "         witness {w}");
        }
    }
    let _ = writeln!(text, "split short exact sequence {}", t.splitting.as_deref().unwrap_or("pass"));
    let _ = writeln!(text, "Delta q_max = {:?} (q_min = {q_min:?})", t.delta_q_max);
    let _ = writeln!(text, "positive part iso          {}", mark(r.isomorphisms.positive));
    let _ = writeln!(text, "negative part iso          {}", mark(r.isomorphisms.negative));
    let _ = writeln!(text, "result                     {}", mark(pass));
    Outcome { json, text, pass }
}

pub fn rf_hrf(
    run: &RfRun,
    table: Option<&HrfReport>,
    window: Option<(f64, f64, &GradedF2Complex, &HomologySummary)>,
) -> Result<Outcome, RfError> {
    let by_class = compute_hrf_by_class(&run.model)?;
    let classes: BTreeMap<&str, Value> = by_class.iter().map(|(c, h)| (c.as_str(), betti_json(h))).collect();
    let mut text = String::new();
    let mut json = json!({ "model": census(run), "hrf_by_class": classes });
    let mut pass = true;
    if let Some(t) = table {
        pass &= t.all_pass();
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|r| json!({ "class": r.class, "degree": r.degree, "expected": r.expected, "computed": r.computed, "pass": r.ok() }))
            .collect();
        json["table"] = json!({ "rows": rows, "inconsistent_classes": t.inconsistent_classes, "pass": t.all_pass() });
        let mut classes: Vec<&str> = t.rows.iter().map(|r| r.class.as_str()).collect();
        classes.dedup();
        for c in classes {
            let rows: Vec<(i64, Vec<String>)> = t
                .rows
                .iter()
                .filter(|r| r.class == c)
                .map(|r| (r.degree, vec![r.expected.to_string(), r.computed.to_string(), mark(r.ok()).to_string()]))
                .collect();
            degree_table(&mut text, &format!("HRF, class {c}"), &rows, &["expected", "computed", ""]);
        }
        if !t.inconsistent_classes.is_empty() {
            let _ = writeln!(text, "classes inconsistent with loop Betti numbers: {:?}", t.inconsistent_classes);
        }
    } else {
        for (c, h) in &by_class {
            let rows: Vec<(i64, Vec<String>)> =
                h.betti_table().into_iter().map(|(k, b)| (k, vec![b.to_string()])).collect();
            degree_table(&mut text, &format!("HRF, class {c}"), &rows, &["b_k"]);
        }
    }
    if let Some((lo, hi, c, h)) = window {
        let end = |a: f64| if a.is_finite() { json!(a) } else { json!(if a > 0.0 { "inf" } else { "-inf" }) };
        json["window"] = json!({ "lo": end(lo), "hi": end(hi), "generators": c.len(), "betti": betti_json(h) });
        let rows: Vec<(i64, Vec<String>)> =
            h.betti_table().into_iter().map(|(k, b)| (k, vec![b.to_string()])).collect();
        degree_table(&mut text, &format!("truncated HRF on [{lo}, {hi}]"), &rows, &["b_k"]);
    }
    json["pass"] = json!(pass);
    let _ = writeln!(text, "result {}", mark(pass));
    Ok(Outcome { json, text, pass })
}

pub fn levrel(r: &LevrelReport) -> Outcome {
    let c = &r.convergence;
    let json = json!({
        "check": "levrel",
        "seed": r.seed,
        "trials": r.trials,
        "samples": r.samples,
        "min_margin": r.min_margin,
        "worst_trial": r.worst_trial,
        "max_witness_residual": r.max_witness_residual,
        "straight_residual": r.straight_residual,
        "max_zero_momentum_residual": r.max_zero_momentum_residual,
        "max_sign_flip": r.max_sign_flip,
        "convergence": { "coarse_samples": c.coarse_samples, "coarse": c.coarse, "fine": c.fine, "ratio": c.ratio },
        "margins": r.margins,
        "pass": r.pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "levrel: {} loops, N = {}, seed {}", r.trials, r.samples, r.seed);
    let _ = writeln!(text, "  min margin          {:e} (trial {})", r.min_margin, r.worst_trial);
    let _ = writeln!(text, "  witness residual    {:e}", r.max_witness_residual);
    let _ = writeln!(text, "  straight loop       {:e}", r.straight_residual);
    let _ = writeln!(text, "  p = 0 closed form   {:e}", r.max_zero_momentum_residual);
    let _ = writeln!(text, "  sign flip           {:e}", r.max_sign_flip);
    let _ =
        writeln!(text, "  convergence ratio   {:.3} (N = {} vs {})", c.ratio, c.coarse_samples, 2 * c.coarse_samples);
    let _ = writeln!(text, "result {}", mark(r.pass));
    Outcome { json, text, pass: r.pass }
}

pub fn fenchel(r: &Levrel2Report) -> Outcome {
    let c = &r.convergence;
    let json = json!({
        "check": "fenchel",
        "seed": r.seed,
        "trials": r.trials,
        "samples": r.samples,
        "min_margin": r.min_margin,
        "worst_trial": r.worst_trial,
        "min_reversed_margin": r.min_reversed_margin,
        "max_reversal_residual": r.max_reversal_residual,
        "max_witness_residual": r.max_witness_residual,
        "straight_residual": r.straight_residual,
        "convergence": { "coarse_samples": c.coarse_samples, "coarse": c.coarse, "fine": c.fine, "ratio": c.ratio },
        "margins": r.margins,
        "pass": r.pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "fenchel: {} trials, N = {}, seed {}", r.trials, r.samples, r.seed);
    let _ = writeln!(text, "  min margin          {:e} (trial {})", r.min_margin, r.worst_trial);
    let _ = writeln!(text, "  reversed margin     {:e}", r.min_reversed_margin);
    let _ = writeln!(text, "  reversal residual   {:e}", r.max_reversal_residual);
    let _ = writeln!(text, "  witness residual    {:e}", r.max_witness_residual);
    let _ = writeln!(text, "  straight loop       {:e}", r.straight_residual);
    let _ = writeln!(text, "  convergence ratio   {:.3}", c.ratio);
    let _ = writeln!(text, "result {}", mark(r.pass));
    Outcome { json, text, pass: r.pass }
}

pub fn gradient(r: &GradientReport) -> Outcome {
    let json = json!({
        "check": "gradient",
        "seed": r.seed,
        "trials": r.trials,
        "samples": r.samples,
        "eps": r.eps,
        "max_relative_error": r.max_relative_error,
        "max_eta_error": r.max_eta_error,
        "min_halving_ratio": r.min_halving_ratio,
        "min_printed_relative_error": r.min_printed_relative_error,
        "pass": r.pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "gradient: {} trials, N = {}, eps = {:e}, seed {}", r.trials, r.samples, r.eps, r.seed);
    let _ = writeln!(text, "  relative error (eta form)      {:e}", r.max_relative_error);
    let _ = writeln!(text, "  relative error (printed form)  {:e}", r.min_printed_relative_error);
    let _ = writeln!(text, "  eta component error            {:e}", r.max_eta_error);
    let _ = writeln!(text, "  halving ratio                  {:.3}", r.min_halving_ratio);
    let _ = writeln!(text, "result {}", mark(r.pass));
    Outcome { json, text, pass: r.pass }
}

pub fn aleksandrov(r: &AleksandrovReport) -> Outcome {
    let json = json!({
        "check": "aleksandrov",
        "seed": r.seed,
        "grid": r.config.grid,
        "trials": r.config.trials,
        "degree": r.config.degree,
        "c_grid": r.config.c_grid,
        "ramp": r.config.ramp,
        "tolerance": r.tolerance,
        "max_margin": r.max_margin,
        "worst_trial": r.worst_trial,
        "skipped": r.skipped,
        "margins": r.margins,
        "pass": r.pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "aleksandrov: {} trials, h = 1/{}, seed {}", r.config.trials, r.config.grid, r.seed);
    let _ = writeln!(text, "  max margin  {:e} (trial {})", r.max_margin, r.worst_trial);
    let _ = writeln!(text, "  tolerance   {:e}", r.tolerance);
    let _ = writeln!(text, "  skipped     {}", r.skipped);
    let _ = writeln!(text, "result {}", mark(r.pass));
    Outcome { json, text, pass: r.pass }
}

pub fn transport(r: &TransportBattery) -> Outcome {
    let trials: Vec<Value> = r
        .reports
        .iter()
        .map(|t| {
            json!({
                "points": t.points,
                "max_gradient_error": t.max_gradient_error,
                "max_laplacian_error": t.max_laplacian_error,
                "max_equation_residual": t.max_equation_residual,
                "b_norm": t.b_norm,
                "b_tilde_norm": t.b_tilde_norm,
                "f_minus_norm": t.f_minus_norm,
                "f_tilde_minus_norm": t.f_tilde_minus_norm,
                "constant": t.constant,
                "norms_within_constant": t.norms_within_constant,
                "pass": t.pass,
            })
        })
        .collect();
    let json = json!({
        "check": "transport",
        "seed": r.seed,
        "trials": r.trials,
        "max_gradient_error": r.max_gradient_error,
        "reports": trials,
        "pass": r.pass,
    });
    let mut text = String::new();
    let _ = writeln!(text, "transport: {} fields, seed {}", r.trials, r.seed);
    for (i, t) in r.reports.iter().enumerate() {
        let _ = writeln!(
            text,
            "  {i:>3} grad {:.2e} lap {:.2e} eq {:.2e} norms {}",
            t.max_gradient_error,
            t.max_laplacian_error,
            t.max_equation_residual,
            mark(t.norms_within_constant)
        );
    }
    let _ = writeln!(text, "result {}", mark(r.pass));
    Outcome { json, text, pass: r.pass }
}
