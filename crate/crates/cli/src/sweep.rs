//! `sweep`: one solve per grid value, run on a bounded pool of threads.
//!
//! Columns: param, value, converged, status, iterations, final_residual_eq,
//! l2, l2alpha, hcinf, sup, epsilon_ball, theta, error. Rows come out in
//! grid order whatever the worker count.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use abelsob::io::fmt17;

use crate::args::{resolve, ProblemArgs, SweepArgs};
use crate::commands::{build_problem, run_problem, CliResult};
use crate::error::CliError;

pub const WORKERS_ENV: &str = "ABELSOB_WORKERS";

pub const PARAMS: [&str; 8] = [
    "forcing-norm",
    "lambda",
    "c",
    "theta",
    "s",
    "tol",
    "max-iter",
    "epsilon-ball",
];

pub const HEADER: &str =
    "param,value,converged,status,iterations,final_residual_eq,l2,l2alpha,hcinf,sup,epsilon_ball,theta,error";

/// `1,2,3`, `lin:<a>:<b>:<n>` or `log:<a>:<b>:<n>` (geometric).
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::Usage(format!("grid {spec:?}: {why}"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(bad("empty grid"));
    }
    let ranged = |rest: &str, geometric: bool| -> CliResult<Vec<f64>> {
        let parts: Vec<&str> = rest.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad("expected <a>:<b>:<n>"));
        };
        let a: f64 = a.trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = b.trim().parse().map_err(|_| bad("bad end"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("bad count"))?;
        if n == 0 {
            return Err(bad("empty grid"));
        }
        if geometric && !(a > 0.0 && b > 0.0) {
            return Err(bad("log grid needs positive ends"));
        }
        Ok((0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if geometric {
                    (a.ln() + t * (b.ln() - a.ln())).exp()
                } else {
                    a + t * (b - a)
                }
            })
            .collect())
    };
    let values = if let Some(rest) = spec.strip_prefix("lin:") {
        ranged(rest, false)?
    } else if let Some(rest) = spec.strip_prefix("log:") {
        ranged(rest, true)?
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(&format!("{s:?} is not a number"))))
            .collect::<CliResult<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(values)
}

/// The problem with `param` set to `value`.
pub fn apply_param(base: &ProblemArgs, param: &str, value: f64) -> CliResult<ProblemArgs> {
    let mut p = base.clone();
    match param {
        "forcing-norm" => {
            p.forcing = None;
            p.forcing_norm = Some(value);
        }
        "lambda" => {
            let spec = p.nonlinearity.as_deref().unwrap_or("forced-power:2,0.1");
            let (kind, args) = spec
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("cannot sweep lambda of {spec:?}")))?;
            let power = args.split(',').next().unwrap_or("2").trim();
            p.nonlinearity = Some(format!("{kind}:{power},{value}"));
        }
        "c" => p.c = Some(value),
        "theta" => p.theta = Some(value),
        "s" => p.s = Some(value),
        "tol" => p.tol = Some(value),
        "max-iter" => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(CliError::Usage(format!("max-iter must be a positive integer, got {value}")));
            }
            p.max_iter = Some(value as usize);
        }
        "epsilon-ball" => p.epsilon_ball = Some(value),
        other => {
            return Err(CliError::Usage(format!(
                "cannot sweep {other:?}; choose one of {}",
                PARAMS.join(", ")
            )))
        }
    }
    Ok(p)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_one(base: &ProblemArgs, param: &str, value: f64) -> String {
    let head = format!("{param},{}", fmt17(value));
    let outcome = apply_param(base, param, value).and_then(|p| build_problem(&p)).and_then(|pr| run_problem(&pr));
    match outcome {
        Ok((_, r)) => format!(
            "{head},{},{},{},{},{},{},{},{},{},{},",
            r.converged,
            serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            r.iterations,
            fmt17(r.final_residual_eq),
            fmt17(r.norms.l2),
            fmt17(r.norms.l2alpha),
            r.norms.hcinf.map(fmt17).unwrap_or_default(),
            fmt17(r.norms.sup),
            r.epsilon_ball.map(fmt17).unwrap_or_default(),
            fmt17(r.theta),
        ),
        Err(e) => format!("{head},false,error,0,,,,,,,,{}", csv_field(&e.to_string())),
    }
}

pub fn worker_count(flag: Option<usize>) -> CliResult<usize> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(CliError::Usage("--workers must be >= 1".into()))
        } else {
            Ok(n)
        };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run(a: &SweepArgs) -> CliResult<()> {
    let a = resolve(a, a.config.as_deref())?;
    let param = a.param.as_deref().ok_or_else(|| CliError::Usage("--param is required".into()))?;
    if !PARAMS.contains(&param) {
        return Err(CliError::Usage(format!("cannot sweep {param:?}; choose one of {}", PARAMS.join(", "))));
    }
    let grid = parse_grid(a.values.as_deref().ok_or_else(|| CliError::Usage("--values is required".into()))?)?;
    // fail fast on a base problem that cannot even be built
    build_problem(&apply_param(&a.problem, param, grid[0])?)?;
    let workers = worker_count(a.workers)?.min(grid.len());

    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<String>>> = Mutex::new(vec![None; grid.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= grid.len() {
                    break;
                }
                let row = run_one(&a.problem, param, grid[i]);
                rows.lock().expect("no worker panics while holding the lock")[i] = Some(row);
            });
        }
    });
    let rows = rows.into_inner().expect("workers joined");
    let mut text = String::from(HEADER);
    text.push('\n');
    for r in rows.into_iter().flatten() {
        text.push_str(&r);
        text.push('\n');
    }
    match &a.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
