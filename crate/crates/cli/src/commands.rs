use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use abelsob::checks::{run_checks, CheckConfig, Suite};
use abelsob::io::{read_signal, read_spectrum, read_weight_table_file, write_signal, write_spectrum, write_values_csv, write_values_json};
use abelsob::nonlinear::{low_frequency_forcing, solve_nonlinear_op, SolveReport, SolverConfig};
use abelsob::sobolev::{LAlphaEmbedding, SubadditivityReport};
use abelsob::spectral::{dft_fast, dft_naive, idft, idft_naive, relative_l2_error};
use abelsob::stringop::LinearSolveReport;
use abelsob::{Error, FiniteAbelianGroup, GroupRef, Nonlinearity, OperatorParams, SobolevParams, StringOperator, Weight};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{resolve, CheckArgs, ConstantsArgs, InfoArgs, ProblemArgs, SolveLinearArgs, SolveNonlinearArgs, TransformArgs, WeightArgs};
use crate::error::CliError;

pub type CliResult<T> = Result<T, CliError>;

const ORACLE_TOL: f64 = 1e-10;

pub fn parse_group(desc: Option<&str>) -> CliResult<GroupRef> {
    let desc = desc.ok_or_else(|| CliError::Usage("--group is required".into()))?;
    Ok(Arc::new(FiniteAbelianGroup::parse(desc)?))
}

pub fn build_weight(w: &WeightArgs) -> CliResult<Weight> {
    let weight = match (&w.weight, &w.weight_table) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--weight and --weight-table are exclusive".into())),
        (_, Some(path)) => {
            let c = w
                .c_gamma
                .ok_or_else(|| CliError::Usage("--weight-table needs an explicit --c-gamma".into()))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
            return Ok(Weight::table(format!("table:{name}"), read_weight_table_file(path)?, c)?);
        }
        (name, None) => Weight::from_name(name.as_deref().unwrap_or("sym-euclid"))?,
    };
    Ok(match w.c_gamma {
        Some(c) => weight.with_c_gamma(c)?,
        None => weight,
    })
}

fn params(s: f64) -> CliResult<SobolevParams> {
    Ok(SobolevParams::new(s)?)
}

fn print_json<T: Serialize>(v: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_json_file<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct ConstantsAtS {
    s: f64,
    sup_constant: f64,
    algebra_constant: f64,
}

#[derive(Serialize)]
struct InfoReport {
    version: &'static str,
    group: String,
    order: usize,
    factors: Vec<usize>,
    exponent: usize,
    weight: String,
    c_gamma: f64,
    gamma_min: f64,
    gamma_max: f64,
    subadditivity: SubadditivityReport,
    constants: Vec<ConstantsAtS>,
}

pub fn info(a: &InfoArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let g = parse_group(a.group.as_deref())?;
    let profile = build_weight(&a.weight)?.profile(&g)?;
    let s_list = if a.s.is_empty() { vec![1.0] } else { a.s.clone() };
    let constants = s_list
        .iter()
        .map(|&s| {
            let p = params(s)?;
            Ok(ConstantsAtS {
                s,
                sup_constant: profile.embedding_constant_sup(p),
                algebra_constant: profile.algebra_constant(p),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let report = InfoReport {
        version: abelsob::VERSION,
        group: g.descriptor(),
        order: g.order(),
        factors: g.factors().to_vec(),
        exponent: g.exponent(),
        weight: profile.name().to_string(),
        c_gamma: profile.c_gamma(),
        gamma_min: profile.min_gamma(),
        gamma_max: profile.max_gamma(),
        subadditivity: profile.check_subadditivity(),
        constants,
    };
    if a.json {
        return print_json(&report);
    }
    println!("group      {}", report.group);
    println!("order      {}", report.order);
    println!("factors    {:?}", report.factors);
    println!("exponent   {}", report.exponent);
    println!("weight     {} (c_gamma {})", report.weight, report.c_gamma);
    println!("gamma      [{}, {}]", report.gamma_min, report.gamma_max);
    let sub = &report.subadditivity;
    println!(
        "subadditive {} (worst ratio {}, {} pairs, {})",
        if sub.ok { "yes" } else { "NO" },
        sub.worst_ratio,
        sub.pairs_checked,
        if sub.exhaustive { "exhaustive" } else { "sampled" }
    );
    for c in &report.constants {
        println!("s = {}: C = {}  D = {}", c.s, c.sup_constant, c.algebra_constant);
    }
    Ok(())
}

pub fn transform(a: &TransformArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let input = a.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let group = a.group.as_deref().map(|d| parse_group(Some(d))).transpose()?;
    let (g, out, other): (GroupRef, Vec<Complex64>, Option<Vec<Complex64>>) = if a.inverse {
        let spec = read_spectrum(input, group.as_ref())?;
        let fast = || idft(&spec).sampled().into_values();
        let naive = || idft_naive(&spec).into_values();
        let (main, other) = match (a.naive, a.oracle) {
            (true, o) => (naive(), o.then(fast)),
            (false, o) => (fast(), o.then(naive)),
        };
        (spec.group_ref().clone(), main, other)
    } else {
        let f = read_signal(input, group.as_ref())?;
        let fast = || dft_fast(&f).into_values();
        let naive = || dft_naive(&f).into_values();
        let (main, other) = match (a.naive, a.oracle) {
            (true, o) => (naive(), o.then(fast)),
            (false, o) => (fast(), o.then(naive)),
        };
        (f.group_ref().clone(), main, other)
    };
    let oracle_err = other.map(|o| relative_l2_error(&out, &o));

    match &a.output {
        Some(path) => {
            if a.inverse {
                write_signal(path, &abelsob::Signal::new(g.clone(), out)?)?;
            } else {
                write_spectrum(path, &abelsob::Spectrum::new(g.clone(), out)?)?;
            }
            let summary = json!({
                "group": g.descriptor(),
                "direction": if a.inverse { "inverse" } else { "forward" },
                "path": if a.naive { "naive" } else { "fast" },
                "oracle_relative_error": oracle_err,
                "output": path,
            });
            if a.json {
                print_json(&summary)?;
            } else if let Some(e) = oracle_err {
                println!("oracle relative l2 error {e:e}");
            }
        }
        None => {
            let stdout = std::io::stdout().lock();
            if a.json {
                write_values_json(stdout, &g, &out)?;
            } else {
                write_values_csv(stdout, &out)?;
            }
            if let Some(e) = oracle_err {
                eprintln!("oracle relative l2 error {e:e}");
            }
        }
    }
    match oracle_err {
        Some(e) if !(e <= ORACLE_TOL) => Err(CliError::Failure(format!(
            "fast and naive transforms differ by {e:e} (tolerance {ORACLE_TOL:e})"
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ConstantsRow {
    s: f64,
    sup_constant: f64,
    algebra_constant: f64,
    /// `||.||_{H^s} <= K ||.||_{H^{c,inf}}`
    hcinf_to_sobolev: f64,
    lalpha: Vec<LAlphaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compactness: Option<Vec<abelsob::sobolev::CompactnessRow>>,
}

#[derive(Serialize)]
struct LAlphaRow {
    alpha: f64,
    #[serde(flatten)]
    embedding: LAlphaEmbedding,
}

pub fn constants(a: &ConstantsArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let g = parse_group(a.group.as_deref())?;
    let profile = build_weight(&a.weight)?.profile(&g)?;
    let c = a.c.unwrap_or(1.0);
    let lc = StringOperator::new(profile.clone(), OperatorParams::new(c)?);
    let s_grid = if a.s.is_empty() { vec![0.0, 0.5, 1.0, 2.0] } else { a.s.clone() };
    let mut rows = Vec::new();
    for &s in &s_grid {
        let p = params(s)?;
        let alphas = if a.alpha.is_empty() {
            vec![s + 0.5, 2.0 * s + 1.0, 4.0]
        } else {
            a.alpha.clone()
        };
        let lalpha = alphas
            .iter()
            .filter(|&&al| al > s)
            .map(|&alpha| Ok(LAlphaRow { alpha, embedding: profile.embedding_constant_lalpha(p, alpha)? }))
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(ConstantsRow {
            s,
            sup_constant: profile.embedding_constant_sup(p),
            algebra_constant: profile.algebra_constant(p),
            hcinf_to_sobolev: lc.sobolev_embedding_constant(p),
            lalpha,
            compactness: a.compactness.then(|| profile.compactness_profile(p)),
        });
    }
    let m = lc.multiplier();
    let report = json!({
        "version": abelsob::VERSION,
        "group": g.descriptor(),
        "weight": profile.name(),
        "c_gamma": profile.c_gamma(),
        "c": c,
        "multiplier_overflow_count": m.overflow_count(),
        "multiplier_underflow_count": m.underflow_count(),
        "rows": rows,
    });
    if a.json {
        return print_json(&report);
    }
    println!("{} with {} (c_gamma {}), c = {c}", g.descriptor(), profile.name(), profile.c_gamma());
    println!("multiplier overflow {} underflow {}", m.overflow_count(), m.underflow_count());
    println!("{:>6} {:>24} {:>24} {:>24}", "s", "C(gamma,s)", "D(gamma,s)", "K(H^{c,inf}->H^s)");
    for r in &rows {
        println!("{:>6} {:>24} {:>24} {:>24}", r.s, r.sup_constant, r.algebra_constant, r.hcinf_to_sobolev);
        for l in &r.lalpha {
            println!(
                "{:>6}   alpha {:<6} alpha* {:<24} constant {}",
                "", l.alpha, l.embedding.alpha_star, l.embedding.constant
            );
        }
        if let Some(rows) = &r.compactness {
            for c in rows {
                let bound = c.torus_bound.map(|b| format!(" torus bound {b}")).unwrap_or_default();
                println!("{:>6}   factor {} m {:<4} sup {}{bound}", "", c.factor, c.multiple, c.sup);
            }
        }
    }
    Ok(())
}

pub fn check(a: &CheckArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let mut cfg = CheckConfig::default();
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.samples {
        cfg.samples = v;
    }
    if let Some(v) = a.translation_samples {
        cfg.translation_samples = v;
    }
    if !a.groups.is_empty() {
        cfg.groups = a.groups.clone();
    }
    if !a.weights.is_empty() {
        cfg.weights = a.weights.clone();
    }
    if !a.s.is_empty() {
        cfg.s_grid = a.s.clone();
    }
    if let Some(v) = a.c {
        cfg.c = v;
    }
    if let Some(v) = &a.suite {
        cfg.suite = v.parse::<Suite>()?;
    }
    cfg.inject_bug = a.inject_bug;
    let result = run_checks(&cfg)?;
    let text = result.to_json()?;
    if let Some(path) = &a.output {
        std::fs::write(path, format!("{text}\n"))?;
    }
    if a.json {
        println!("{text}");
    } else {
        for p in &result.properties {
            println!(
                "{:<4} {:<34} cases {:>8}  worst slack {:e}",
                if p.passed { "ok" } else { "FAIL" },
                p.name,
                p.cases,
                p.worst_slack
            );
            if !p.passed {
                if let Some(w) = &p.witness {
                    println!("     witness {}", serde_json::to_string(w)?);
                }
            }
        }
    }
    if result.passed {
        Ok(())
    } else {
        let names: Vec<&str> = result.failures().map(|p| p.name.as_str()).collect();
        Err(CliError::Failure(format!("properties failed: {}", names.join(", "))))
    }
}

fn with_header<T: Serialize, C: Serialize>(report: &T, config: &C) -> CliResult<Value> {
    let mut v = serde_json::to_value(report)?;
    if let Value::Object(m) = &mut v {
        m.insert("version".into(), json!(abelsob::VERSION));
        m.insert("config".into(), serde_json::to_value(config)?);
    }
    Ok(v)
}

pub fn solve_linear(a: &SolveLinearArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let input = a.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let group = a.group.as_deref().map(|d| parse_group(Some(d))).transpose()?;
    let g = read_signal(input, group.as_ref())?;
    let w = build_weight(&a.weight)?;
    let lc = StringOperator::from_weight(g.group_ref(), &w, OperatorParams::new(a.c.unwrap_or(1.0))?)?;
    let (u, rep): (_, LinearSolveReport) = lc.solve_with_report(&g, params(a.s.unwrap_or(1.0))?)?;
    if let Some(path) = &a.output {
        write_signal(path, &u)?;
    }
    let full = with_header(&rep, &a)?;
    if let Some(path) = &a.report {
        write_json_file(path, &full)?;
    }
    if a.json {
        print_json(&full)?;
    } else {
        println!("||g||_L2          {}", rep.l2_g);
        println!("||u||_H^(c,inf)   {}", rep.hcinf_u);
        println!("isometry error    {:e} ({})", rep.isometry_rel_err, if rep.isometry_ok { "ok" } else { "FAIL" });
        println!(
            "sup |u| = {} <= C ||g|| = {} ({})",
            rep.sup_u,
            rep.sup_bound,
            if rep.sup_ok { "ok" } else { "FAIL" }
        );
        println!("multiplier overflow {}", rep.overflow_count);
    }
    if rep.isometry_ok && rep.sup_ok {
        Ok(())
    } else {
        Err(CliError::Failure("linear solve failed its isometry or sup-norm check".into()))
    }
}

pub struct Problem {
    pub nonlinearity: Nonlinearity,
    pub operator: StringOperator,
    pub config: SolverConfig,
}

pub fn build_problem(p: &ProblemArgs) -> CliResult<Problem> {
    let initial_group = p.group.as_deref().map(|d| parse_group(Some(d))).transpose()?;
    let forcing = match &p.forcing {
        Some(path) => Some(read_signal(path, initial_group.as_ref())?),
        None => None,
    };
    let g = match (&initial_group, &forcing) {
        (Some(g), _) => g.clone(),
        (None, Some(f)) => f.group_ref().clone(),
        (None, None) => return Err(CliError::Usage("--group is required".into())),
    };
    let forcing = match forcing {
        Some(f) => f,
        None => low_frequency_forcing(&g, p.forcing_norm.unwrap_or(0.01))?,
    };
    let spec = p.nonlinearity.as_deref().unwrap_or("forced-power:2,0.1");
    let nonlinearity = Nonlinearity::from_spec(spec, &g, Some(&forcing))?;
    let operator = StringOperator::from_weight(&g, &build_weight(&p.weight)?, OperatorParams::new(p.c.unwrap_or(1.0))?)?;
    let defaults = SolverConfig::default();
    let initial = match &p.initial {
        Some(path) => Some(read_signal(path, Some(&g))?),
        None => None,
    };
    let config = SolverConfig {
        theta: p.theta.unwrap_or(defaults.theta),
        tol: p.tol.unwrap_or(defaults.tol),
        max_iter: p.max_iter.unwrap_or(defaults.max_iter),
        epsilon_ball: p.epsilon_ball,
        initial,
        s: p.s.unwrap_or(defaults.s),
        max_retries: defaults.max_retries,
    };
    config.validate()?;
    Ok(Problem {
        nonlinearity,
        operator,
        config,
    })
}

/// The report travels inside the error when the iteration fails.
pub fn run_problem(pr: &Problem) -> CliResult<(Option<abelsob::Signal>, SolveReport)> {
    match solve_nonlinear_op(&pr.nonlinearity, &pr.operator, &pr.config) {
        Ok((phi, rep)) => Ok((Some(phi), rep)),
        Err(Error::Diverged(rep)) | Err(Error::MaxIterations(rep)) => Ok((None, *rep)),
        Err(e) => Err(e.into()),
    }
}

pub fn solve_nonlinear(a: &SolveNonlinearArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let problem = build_problem(&a.problem)?;
    let (phi, rep) = run_problem(&problem)?;
    if let (Some(path), Some(phi)) = (&a.output, &phi) {
        write_signal(path, phi)?;
    }
    let full = with_header(&rep, &a)?;
    if let Some(path) = &a.report {
        write_json_file(path, &full)?;
    }
    if a.json {
        print_json(&full)?;
    } else {
        let mut out = std::io::stdout().lock();
        writeln!(out, "status            {:?} after {} iterations (theta {}, {} attempt(s))", rep.status, rep.iterations, rep.theta, rep.attempts)?;
        writeln!(out, "last step         {:e}", rep.residual_history.last().copied().unwrap_or(0.0))?;
        writeln!(out, "equation residual {:e}", rep.final_residual_eq)?;
        writeln!(
            out,
            "norms             L2 {}  L2alpha {}  H^(c,inf) {}  sup {}",
            rep.norms.l2,
            rep.norms.l2alpha,
            rep.norms.hcinf.map_or("unrepresentable".to_string(), |v| v.to_string()),
            rep.norms.sup
        )?;
        match rep.epsilon_ball {
            Some(e) => writeln!(out, "ball              eps {e} ({:?}), respected: {}", rep.ball_source, rep.ball_respected)?,
            None => writeln!(out, "ball              small-data condition unsatisfied, unconstrained")?,
        }
        writeln!(
            out,
            "continuity        C(gamma,s) = {} ({})",
            rep.continuity_constant,
            if rep.continuity_ok { "ok" } else { "FAIL" }
        )?;
    }
    if rep.converged {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{:?} after {} iterations", rep.status, rep.iterations)))
    }
}
