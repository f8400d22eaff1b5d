//! Subcommand dispatch.

use std::fs;
use std::path::Path;

use amalg::algebra::{AlgebraContext, Target};
use amalg::cumulants::{CumulantEngine, CumulantQuery};
use amalg::fock::{canonical_moment, moment_by_expansion, CumulantSeries, Strategy};
use amalg::freeness::{self, FreenessReport, ProbeConfig};
use amalg::io::{self, CoefficientsFile, ContextFile, LoadedModel, Model, ModelFile, SeriesFile};
use amalg::liberation::{self, ConjugateCandidate, ResidualReport};
use amalg::linalg::{self, Mat};
use amalg::nc::{count_nc, enumerate_nc};
use amalg::randmat::{self, HaarConfig, VarianceProfile};
use amalg::rng::{stream, TAG_ALGEBRA};
use amalg::space::NcSpace;
use serde_json::{json, Value};

use crate::output::{emit, fmt, Table};
use crate::{AlgebraOp, BandOp, Cli, Command, FockOp, FreenessOp, LiberationOp, ModelArgs, NcOp};

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    io::parse_json(&read(path)?, &path.display().to_string()).map_err(|e| e.to_string())
}

fn context(path: &Path) -> Res<AlgebraContext> {
    json_file::<ContextFile>(path)?.build().map_err(|e| format!("{}: {e}", path.display()))
}

fn load(files: &ModelArgs) -> Res<LoadedModel> {
    let ctx = files.context.as_deref().map(context).transpose()?;
    let model: ModelFile = json_file(&files.model)?;
    model.load(ctx.as_ref()).map_err(|e| format!("{}: {e}", files.model.display()))
}

fn target(s: &str) -> Res<Target> {
    s.parse().map_err(|e: amalg::Error| e.to_string())
}

fn to_value<T: serde::Serialize>(x: &T) -> Res<Value> {
    serde_json::to_value(x).map_err(|e| e.to_string())
}

/// Read a variance profile: a `g × g` CSV grid without header.
pub fn read_profile(path: &Path) -> Res<VarianceProfile> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|e| format!("{}:{line}: column {}: {e}", path.display(), c + 1)))
            .collect::<Res<Vec<f64>>>()?;
        rows.push(row);
    }
    VarianceProfile::from_rows(rows).map_err(|e| format!("{}: {e}", path.display()))
}

macro_rules! on_model {
    ($loaded:expr, |$sp:ident, $m:ident| $body:expr) => {
        match $loaded {
            LoadedModel::Matrix($sp, $m) => $body,
            LoadedModel::Fock($sp, $m) => $body,
        }
    };
}

fn probe(cli: &Cli, default_order: usize, draws: usize) -> ProbeConfig {
    ProbeConfig { max_order: cli.order.unwrap_or(default_order), tol: cli.tol.unwrap_or(1e-8), draws, seed: cli.seed }
}

fn freeness_out(cli: &Cli, name: &str, rep: FreenessReport) -> Res<bool> {
    let table = Table::families(&rep.families);
    emit(cli, name, Some(rep.pass), to_value(&rep)?, table)
}

pub fn run(cli: &Cli) -> Res<bool> {
    match &cli.command {
        Command::Nc { op } => nc(cli, op),
        Command::Algebra { op: AlgebraOp::Check { context: path, trials } } => {
            let ctx = context(path)?;
            let mut rng = stream(cli.seed, TAG_ALGEBRA, 0);
            let mut rep = ctx.check(*trials, &mut rng);
            if let Some(t) = cli.tol {
                rep.pass = rep.checks.iter().all(|c| c.worst <= t) && rep.trace_form_min_eigenvalue > 0.0;
                rep.tol = t;
            }
            let mut table = Table::new(vec!["map", "property", "worst"]);
            for c in &rep.checks {
                table.push(vec![c.map.clone(), c.property.clone(), fmt(c.worst)]);
            }
            emit(cli, "algebra check", Some(rep.pass), to_value(&rep)?, table)
        }
        Command::Cumulant { context: ctx, model, indices, target: t, coeffs } => {
            let loaded = load(&ModelArgs { context: ctx.clone(), model: model.clone() })?;
            let t = target(t)?;
            on_model!(loaded, |sp, m| cumulant(cli, &sp, &m, indices, t, coeffs.as_deref()))
        }
        Command::Freeness { op } => freeness_cmd(cli, op),
        Command::Fock { op: FockOp::Moment { model, indices, coeffs } } => fock_moment(cli, model, indices, coeffs.as_deref()),
        Command::Liberation { op } => liberation_cmd(cli, op),
        Command::Bandmatrix { op } => band(cli, op),
        Command::Haar { d, ks, trials, cumulant_trials } => {
            let cfg = HaarConfig {
                d: *d,
                ks: ks.clone(),
                trials: *trials,
                powers: vec![1, 2],
                cumulant_trials: *cumulant_trials,
                cumulant_order: cli.order.unwrap_or(3),
                seed: cli.seed,
            };
            let b = Mat::from_fn(*d, *d, |i, j| linalg::c(if i == j { 1.0 - 2.0 * (i % 2) as f64 } else { 0.5 }, 0.0));
            let rep = randmat::haar_conjugation_experiment(&cfg, &b).map_err(|e| e.to_string())?;
            let mut table = Table::new(vec!["k", "m", "mean_norm_E_D_u_m", "cyclic_moment_defect", "mixed_cumulant_before", "mixed_cumulant_after"]);
            for l in &rep.levels {
                for (m, v) in &l.power_norms {
                    table.push(vec![l.k.to_string(), m.to_string(), fmt(*v), fmt(l.cyclic_moment_defect), fmt(l.mixed_cumulant_before), fmt(l.mixed_cumulant_after)]);
                }
            }
            let pass = rep.pass_invariance && rep.powers_decreasing && rep.cumulants_decreasing;
            emit(cli, "haar", Some(pass), to_value(&rep)?, table)
        }
    }
}

fn nc(cli: &Cli, op: &NcOp) -> Res<bool> {
    match op {
        NcOp::Count { n, json } => {
            let count = count_nc(*n).map_err(|e| e.to_string())?;
            if !json && cli.format == crate::Format::Json && cli.out.is_none() {
                println!("{count}");
                return Ok(true);
            }
            let mut table = Table::new(vec!["n", "count"]);
            table.push(vec![n.to_string(), count.to_string()]);
            emit(cli, "nc count", None, json!({ "n": n, "count": count }), table)
        }
        NcOp::List { n, json } => {
            let parts = enumerate_nc(*n).map_err(|e| e.to_string())?;
            let shown = |p: &amalg::NCPartition| {
                p.blocks()
                    .iter()
                    .map(|b| format!("{{{}}}", b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            if !json && cli.format == crate::Format::Json && cli.out.is_none() {
                for p in &parts {
                    println!("{}", shown(p));
                }
                return Ok(true);
            }
            let mut table = Table::new(vec!["index", "blocks"]);
            for (i, p) in parts.iter().enumerate() {
                table.push(vec![i.to_string(), shown(p)]);
            }
            let blocks: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| p.blocks().to_vec()).collect();
            emit(cli, "nc list", None, json!({ "n": n, "count": parts.len(), "partitions": blocks }), table)
        }
    }
}

fn matrix_table(m: &Mat) -> Table {
    let mut t = Table::new(vec!["row", "col", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            t.push(vec![i.to_string(), j.to_string(), fmt(m[(i, j)].re), fmt(m[(i, j)].im)]);
        }
    }
    t
}

fn coefficients(path: Option<&Path>, d: usize, count: usize, default: Mat) -> Res<Vec<Mat>> {
    match path {
        Some(p) => {
            let cs = json_file::<CoefficientsFile>(p)?.build(d).map_err(|e| format!("{}: {e}", p.display()))?;
            if cs.len() != count {
                return Err(format!("{}: expected {count} coefficients, got {}", p.display(), cs.len()));
            }
            Ok(cs)
        }
        None => Ok(vec![default; count]),
    }
}

fn cumulant<S: NcSpace>(cli: &Cli, sp: &S, m: &Model<S::Elem>, indices: &[usize], t: Target, coeffs: Option<&Path>) -> Res<bool> {
    if indices.is_empty() || indices.iter().any(|&i| i >= m.variables.len()) {
        return Err(format!("indices must refer to the {} model variables", m.variables.len()));
    }
    let coefficients = coefficients(coeffs, sp.d(), indices.len() - 1, linalg::identity(sp.d()))?;
    let engine = CumulantEngine::new(sp, t).with_max_order(cli.order.unwrap_or(amalg::cumulants::DEFAULT_MAX_ORDER).max(indices.len()));
    let q = CumulantQuery { variables: indices.iter().map(|&i| m.variables[i].clone()).collect(), coefficients, target: t };
    let k = engine.query(&q).map_err(|e| e.to_string())?;
    emit(cli, "cumulant", None, json!({ "indices": indices, "target": t, "value": io::from_matrix(&k) }), matrix_table(&k))
}

fn freeness_cmd(cli: &Cli, op: &FreenessOp) -> Res<bool> {
    match op {
        FreenessOp::Mixed { files, target: t, draws } => {
            let t = target(t)?;
            let cfg = probe(cli, 4, *draws);
            on_model!(load(files)?, |sp, m| {
                let groups = m.groups.clone().ok_or("mixed cumulants need \"groups\" in the model file")?;
                if groups.len() < 2 {
                    return Err("mixed cumulants need two variable groups".into());
                }
                let pick = |g: &Vec<usize>| g.iter().map(|&i| m.variables[i].clone()).collect::<Vec<_>>();
                let rep = freeness::test_mixed_cumulants(&sp, &pick(&groups[0]), &pick(&groups[1]), t, &cfg).map_err(|e| e.to_string())?;
                freeness_out(cli, "freeness mixed", rep)
            })
        }
        FreenessOp::Factorization { files, draws } => {
            let cfg = probe(cli, 4, *draws);
            on_model!(load(files)?, |sp, m| {
                let rep = freeness::test_factorization(&sp, &m.variables, &cfg).map_err(|e| e.to_string())?;
                freeness_out(cli, "freeness factorization", rep)
            })
        }
        FreenessOp::Restriction { files, draws } => {
            let cfg = probe(cli, 4, *draws);
            on_model!(load(files)?, |sp, m| {
                let rep = freeness::test_restriction(&sp, &m.variables, &cfg).map_err(|e| e.to_string())?;
                freeness_out(cli, "freeness restriction", rep)
            })
        }
        FreenessOp::Rcyclic { files } => {
            let cfg = probe(cli, 4, 1);
            on_model!(load(files)?, |sp, m| {
                let n = m.variables.len();
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n || n == 0 {
                    return Err(format!("r-cyclicity needs a square number of entry variables, got {n}"));
                }
                let entries: Vec<Vec<_>> = m.variables.chunks(side).map(|r| r.to_vec()).collect();
                let rep = freeness::test_r_cyclic(&sp, &entries, &cfg).map_err(|e| e.to_string())?;
                freeness_out(cli, "freeness rcyclic", rep)
            })
        }
    }
}

fn fock_moment(cli: &Cli, path: &Path, indices: &[usize], coeffs: Option<&Path>) -> Res<bool> {
    let text = read(path)?;
    let origin = path.display().to_string();
    let value: Value = io::parse_json(&text, &origin).map_err(|e| e.to_string())?;
    let series_file: SeriesFile = if value.get("type").is_some() {
        match io::parse_json::<ModelFile>(&text, &origin).map_err(|e| e.to_string())? {
            ModelFile::Fock { series, .. } => series,
            ModelFile::Matrix { .. } => return Err(format!("{origin}: fock moment needs a series or a fock model")),
        }
    } else {
        io::parse_json(&text, &origin).map_err(|e| e.to_string())?
    };
    let series = series_file.build().map_err(|e| format!("{origin}: {e}"))?;
    let d = series.d();
    let cs = coefficients(coeffs, d, indices.len() + 1, linalg::identity(d))?;
    let m = canonical_moment(&series, indices, &cs).map_err(|e| e.to_string())?;
    let check = moment_by_expansion(&series, indices, &cs, Strategy::LeftmostInnermost).map_err(|e| e.to_string())?;
    let agreement = linalg::max_abs(&(&m - &check));
    let tol = cli.tol.unwrap_or(1e-10) * (1.0 + linalg::frobenius(&m));
    let pass = agreement <= tol;
    emit(
        cli,
        "fock moment",
        Some(pass),
        json!({ "indices": indices, "value": io::from_matrix(&m), "expansion_disagreement": agreement }),
        matrix_table(&m),
    )
}

fn liberation_out(cli: &Cli, name: &str, reports: &[&ResidualReport], extra: Value) -> Res<bool> {
    let pass = reports.iter().all(|r| r.pass);
    let families: Vec<_> = reports.iter().flat_map(|r| r.families.iter().cloned()).collect();
    let mut result = json!({ "reports": reports });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    emit(cli, name, Some(pass), result, Table::families(&families))
}

fn conjugates<S: NcSpace>(sp: &S, m: &Model<S::Elem>, degree: usize, tol: f64) -> Res<(ConjugateCandidate<S::Elem>, bool)> {
    let (js, solved) = match &m.conjugates {
        Some(js) => (js.clone(), false),
        None => (liberation::solve_conjugate(sp, &m.variables, m.scope, degree).map_err(|e| e.to_string())?, true),
    };
    if js.len() != m.variables.len() {
        return Err(format!("{} conjugates for {} variables", js.len(), m.variables.len()));
    }
    let js = if solved {
        // Least-squares output is self-adjoint only up to round-off.
        js.iter().map(|j| sp.scale(&sp.add(j, &sp.adjoint(j)), linalg::c(0.5, 0.0))).collect()
    } else {
        js
    };
    let cand = ConjugateCandidate::new(sp, js, m.scope, tol.max(1e-12)).map_err(|e| e.to_string())?;
    Ok((cand, solved))
}

fn liberation_cmd(cli: &Cli, op: &LiberationOp) -> Res<bool> {
    match op {
        LiberationOp::Conjugate { files, degree, draws } => {
            let cfg = probe(cli, 3, *draws);
            on_model!(load(files)?, |sp, m| {
                let (cand, solved) = conjugates(&sp, &m, *degree, cfg.tol)?;
                let direct = liberation::verify_conjugate(&sp, &m.variables, &cand, &cfg).map_err(|e| e.to_string())?;
                let form_target = if cand.scope == Target::Scalar { Target::Scalar } else { Target::D };
                let form = liberation::verify_conjugate_cumulant_form(&sp, &m.variables, &cand, form_target, &cfg)
                    .map_err(|e| e.to_string())?;
                let fisher = liberation::fisher_info(&sp, &cand).map_err(|e| e.to_string())?;
                liberation_out(cli, "liberation conjugate", &[&direct, &form], json!({ "fisher_info": fisher, "solved": solved, "scope": cand.scope }))
            })
        }
        LiberationOp::Gradient { files, target: t, degree, draws } => {
            let t = target(t)?;
            let cfg = probe(cli, 2, *draws);
            on_model!(load(files)?, |sp, m| {
                let a1: Vec<_> = m.a1.iter().map(|&i| m.variables[i].clone()).collect();
                let (j, solved) = match &m.gradient {
                    Some(j) => (j.clone(), false),
                    None => (liberation::solve_liberation_gradient(&sp, &a1, t, *degree).map_err(|e| e.to_string())?, true),
                };
                let a2: Vec<_> = liberation::coefficient_basis(sp.spec(), Target::B).iter().map(|b| sp.from_b(b)).collect();
                let rep = liberation::verify_liberation_gradient(&sp, &j, &a1, &a2, t, &cfg).map_err(|e| e.to_string())?;
                let norm = liberation::l2_norm(&sp, &j).map_err(|e| e.to_string())?;
                liberation_out(cli, "liberation gradient", &[&rep], json!({ "gradient_l2_norm": norm, "liberation_fisher_info": norm * norm, "solved": solved, "target": t }))
            })
        }
        LiberationOp::Commutator { files, degree } => {
            let tol = cli.tol.unwrap_or(1e-8);
            on_model!(load(files)?, |sp, m| {
                let (cand, solved) = conjugates(&sp, &m, *degree, tol)?;
                if cand.scope != Target::B {
                    return Err("the commutator projection needs conjugate variables with respect to B".into());
                }
                let p = liberation::commutator_projection(&sp, &m.variables, &cand).map_err(|e| e.to_string())?;
                let norm = liberation::l2_norm(&sp, &p).map_err(|e| e.to_string())?;
                let mut table = Table::new(vec!["l2_norm", "tol", "vanishes"]);
                table.push(vec![fmt(norm), fmt(tol), (norm <= tol).to_string()]);
                emit(cli, "liberation commutator", Some(norm <= tol), json!({ "l2_norm": norm, "tol": tol, "solved": solved }), table)
            })
        }
    }
}

fn band(cli: &Cli, op: &BandOp) -> Res<bool> {
    match op {
        BandOp::Simulate { profile, n, trials, bins } => {
            let sigma = read_profile(profile)?;
            let sim = randmat::simulate_band(*n, &sigma, *trials, *bins, cli.seed).map_err(|e| e.to_string())?;
            let h = &sim.histogram;
            let mut table = Table::new(vec!["bin_left", "bin_right", "mass"]);
            for (b, m) in h.masses.iter().enumerate() {
                table.push(vec![fmt(h.bin_edges[b]), fmt(h.bin_edges[b + 1]), fmt(*m)]);
            }
            emit(cli, "bandmatrix simulate", None, to_value(&sim)?, table)
        }
        BandOp::Limit { profile } => {
            let sigma = read_profile(profile)?;
            let order = cli.order.unwrap_or(8);
            let moments = randmat::limit_moments_band(&sigma, order).map_err(|e| e.to_string())?;
            let verdict = randmat::band_semicircle_verdict(&sigma, order, cli.tol.unwrap_or(1e-9)).map_err(|e| e.to_string())?;
            let mut table = Table::new(vec!["order", "moment"]);
            for (p, m) in moments.iter().enumerate() {
                table.push(vec![p.to_string(), fmt(*m)]);
            }
            emit(
                cli,
                "bandmatrix limit",
                None,
                json!({ "g": sigma.g(), "order": order, "moments": moments, "verdict": verdict }),
                table,
            )
        }
    }
}
