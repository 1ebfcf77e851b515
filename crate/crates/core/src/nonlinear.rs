//! Fixed-point solver for the euclidean bosonic string equation
//! `Delta e^{-c Delta} phi = U(x, phi)`.
//!
//! Writing `V(x, y) = U(x, y) - y`, the equation becomes `L_c phi = V(., phi)`
//! and a solution is a fixed point of `G(u) = L_c^{-1} V(., u)`. The solver
//! runs the damped iteration `phi <- (1 - theta) phi + theta G(phi)` and
//! certifies the result afterwards by recomputing `||L_c phi - V(., phi)||`.
//!
//! The invariant ball `Y_eps = {||u||_{L^{2 alpha}} <= eps}` is sized from the
//! growth data: with `E` the embedding constant of `H^{c,inf}` into
//! `L^{2 alpha}`, `G` maps `Y_eps` into itself whenever
//! `2 C^2 E^2 (||h||^2 + eps^{2 alpha}) <= eps^2`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sobolev::{lp_norm, SobolevParams, Weight};
use crate::spectral::{ensure_same_group, GroupRef, Signal};
use crate::stringop::{OperatorParams, StringOperator};
use crate::sum::pairwise_sum;

/// Largest imaginary part tolerated before a field is declared non-real.
pub const REALNESS_TOL: f64 = 1e-9;

/// Candidate exponents `delta` with `1/(1 + gamma^2)` in `L^delta`.
pub const DELTA_GRID: [f64; 5] = [1.25, 1.5, 2.0, 3.0, 4.0];

/// Consecutive growing steps outside the ball that count as divergence.
const DIVERGENCE_RUN: usize = 10;

/// `(x, y) -> value`, with `x` the enumeration index of a group element.
pub type PointwiseFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// Growth data: `|U - y| <= C (|h| + |y|^alpha)` and
/// `|d/dy (U - y)| <= C (|f| + |y|^beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Growth {
    pub alpha: f64,
    pub beta: f64,
    pub c_growth: f64,
}

#[derive(Clone)]
pub struct Nonlinearity {
    name: String,
    group: GroupRef,
    u: PointwiseFn,
    du_dy: PointwiseFn,
    growth: Growth,
    h: Vec<f64>,
    f_env: Vec<f64>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("group", &self.group.descriptor())
            .field("growth", &self.growth)
            .finish_non_exhaustive()
    }
}

fn real_envelope(s: &Signal, what: &str) -> Result<Vec<f64>> {
    let (index, magnitude) = s.max_imag();
    if magnitude > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{what} must be real-valued (|Im| = {magnitude:e} at {index})"
        )));
    }
    Ok(s.real_values())
}

impl Nonlinearity {
    pub fn new(
        name: impl Into<String>,
        u: PointwiseFn,
        du_dy: PointwiseFn,
        growth: Growth,
        h: &Signal,
        f_env: &Signal,
    ) -> Result<Self> {
        let Growth {
            alpha,
            beta,
            c_growth,
        } = growth;
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {alpha}")));
        }
        if !(beta >= 0.0 && beta <= alpha - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, alpha - 1] = [0, {}], got {beta}",
                alpha - 1.0
            )));
        }
        if !(c_growth.is_finite() && c_growth > 0.0) {
            return Err(Error::InvalidParameter(format!("growth constant must be > 0, got {c_growth}")));
        }
        ensure_same_group(h.group_ref(), f_env.group_ref())?;
        Ok(Self {
            name: name.into(),
            group: h.group_ref().clone(),
            u,
            du_dy,
            growth,
            h: real_envelope(h, "h")?,
            f_env: real_envelope(f_env, "f")?,
        })
    }

    /// `U(x, y) = y`, so `V = 0`.
    pub fn identity(group: &GroupRef) -> Self {
        let zero = Signal::zeros(group.clone());
        Self::new(
            "identity",
            Arc::new(|_, y| y),
            Arc::new(|_, _| 1.0),
            Growth {
                alpha: 2.0,
                beta: 1.0,
                c_growth: 1.0,
            },
            &zero,
            &zero,
        )
        .expect("valid growth data")
    }

    /// `U(x, y) = y + h(x)`.
    pub fn affine(h: &Signal) -> Result<Self> {
        let hv = Arc::new(real_envelope(h, "h")?);
        Self::new(
            "affine",
            Arc::new(move |x, y| y + hv[x]),
            Arc::new(|_, _| 1.0),
            Growth {
                alpha: 2.0,
                beta: 1.0,
                c_growth: 1.0,
            },
            h,
            &Signal::zeros(h.group_ref().clone()),
        )
    }

    /// `U(x, y) = y + lambda y^p` (`p = 2` is the bosonic case).
    pub fn power(group: &GroupRef, p: u32, lambda: f64) -> Result<Self> {
        Self::forced_power_named("power", p, lambda, &Signal::zeros(group.clone()))
    }

    /// `U(x, y) = y + lambda y^p + h(x)`.
    pub fn forced_power(p: u32, lambda: f64, h: &Signal) -> Result<Self> {
        Self::forced_power_named("forced-power", p, lambda, h)
    }

    fn forced_power_named(kind: &str, p: u32, lambda: f64, h: &Signal) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("power must be >= 2, got {p}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be finite, got {lambda}")));
        }
        let hv = Arc::new(real_envelope(h, "h")?);
        let e = p as i32;
        let pf = p as f64;
        Self::new(
            format!("{kind}:{p},{lambda}"),
            Arc::new(move |x, y| y + lambda * y.powi(e) + hv[x]),
            Arc::new(move |_, y| 1.0 + pf * lambda * y.powi(e - 1)),
            Growth {
                alpha: pf,
                beta: pf - 1.0,
                c_growth: (pf * lambda.abs()).max(1.0),
            },
            h,
            &Signal::zeros(h.group_ref().clone()),
        )
    }

    /// Parses `identity`, `affine`, `power:<p>,<lambda>` or
    /// `forced-power:<p>,<lambda>`. Forced variants need `forcing`.
    pub fn from_spec(spec: &str, group: &GroupRef, forcing: Option<&Signal>) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("nonlinearity {spec:?}: {why}"));
        let (kind, args) = match spec.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let need_forcing = || forcing.ok_or_else(|| bad("needs a forcing signal"));
        let power_args = || -> Result<(u32, f64)> {
            let args = args.ok_or_else(|| bad("expected <p>,<lambda>"))?;
            let (p, l) = args.split_once(',').ok_or_else(|| bad("expected <p>,<lambda>"))?;
            let p = p.trim().parse().map_err(|_| bad("p must be an integer >= 2"))?;
            let l = l.trim().parse().map_err(|_| bad("lambda must be a number"))?;
            Ok((p, l))
        };
        match kind {
            "identity" => Ok(Self::identity(group)),
            "affine" => Self::affine(need_forcing()?),
            "power" => {
                let (p, l) = power_args()?;
                Self::power(group, p, l)
            }
            "forced-power" => {
                let (p, l) = power_args()?;
                Self::forced_power(p, l, need_forcing()?)
            }
            _ => Err(bad("unknown kind")),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn f_env(&self) -> &[f64] {
        &self.f_env
    }

    pub fn eval_u(&self, x: usize, y: f64) -> f64 {
        (self.u)(x, y)
    }

    pub fn eval_du_dy(&self, x: usize, y: f64) -> f64 {
        (self.du_dy)(x, y)
    }

    /// `||h||_{L^2}`.
    pub fn h_l2(&self) -> f64 {
        let sq: Vec<f64> = self.h.iter().map(|v| v * v).collect();
        (pairwise_sum(&sq) * self.group.haar_weight()).sqrt()
    }

    /// `V(x, u(x)) = U(x, u(x)) - u(x)`.
    pub fn eval_v(&self, u: &Signal) -> Result<Signal> {
        ensure_same_group(&self.group, u.group_ref())?;
        let (index, magnitude) = u.max_imag();
        if magnitude > REALNESS_TOL {
            return Err(Error::NonReal { index, magnitude });
        }
        let values: Vec<f64> = u
            .values()
            .iter()
            .enumerate()
            .map(|(x, v)| (self.u)(x, v.re) - v.re)
            .collect();
        Signal::from_real(self.group.clone(), &values)
    }

    /// Sweeps both growth inequalities over every `x` and the given `y`.
    pub fn check_growth_conditions(&self, y_samples: &[f64]) -> Result<GrowthReport> {
        if y_samples.is_empty() {
            return Err(Error::InvalidParameter("need at least one y sample".into()));
        }
        let Growth {
            alpha,
            beta,
            c_growth,
        } = self.growth;
        let ratio = |lhs: f64, rhs: f64| {
            if rhs > 0.0 {
                lhs / rhs
            } else if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let mut report = GrowthReport {
            passes: true,
            worst_value_ratio: 0.0,
            worst_derivative_ratio: 0.0,
            value_witness: None,
            derivative_witness: None,
            points_checked: 0,
        };
        for x in 0..self.group.order() {
            for &y in y_samples {
                report.points_checked += 1;
                let v = ratio(
                    ((self.u)(x, y) - y).abs(),
                    c_growth * (self.h[x].abs() + y.abs().powf(alpha)),
                );
                if v > report.worst_value_ratio {
                    report.worst_value_ratio = v;
                    report.value_witness = Some(GrowthWitness { x, y });
                }
                let d = ratio(
                    ((self.du_dy)(x, y) - 1.0).abs(),
                    c_growth * (self.f_env[x].abs() + y.abs().powf(beta)),
                );
                if d > report.worst_derivative_ratio {
                    report.worst_derivative_ratio = d;
                    report.derivative_witness = Some(GrowthWitness { x, y });
                }
            }
        }
        report.passes = report.worst_value_ratio <= 1.0 + 1e-12
            && report.worst_derivative_ratio <= 1.0 + 1e-12;
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthWitness {
    pub x: usize,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub passes: bool,
    /// `max |U - y| / (C (|h| + |y|^alpha))`
    pub worst_value_ratio: f64,
    /// `max |d/dy (U - y)| / (C (|f| + |y|^beta))`
    pub worst_derivative_ratio: f64,
    pub value_witness: Option<GrowthWitness>,
    pub derivative_witness: Option<GrowthWitness>,
    pub points_checked: usize,
}

/// `h(x) = cos(2 pi x_1 / n_1) + sin(4 pi x_1 / n_1) / 2` along the first
/// nontrivial factor, scaled to `||h||_{L^2} = l2`. Sampling the same profile
/// on `Z_N` for growing `N` discretizes one torus forcing.
pub fn low_frequency_forcing(group: &GroupRef, l2: f64) -> Result<Signal> {
    let (j, n) = group
        .factors()
        .iter()
        .copied()
        .enumerate()
        .find(|&(_, n)| n > 1)
        .unwrap_or((0, 1));
    let raw: Vec<f64> = (0..group.order())
        .map(|i| {
            let t = std::f64::consts::TAU * group.coords_of(i)[j] as f64 / n as f64;
            t.cos() + 0.5 * (2.0 * t).sin()
        })
        .collect();
    let base = Signal::from_real(group.clone(), &raw)?;
    let norm = lp_norm(&base, 2.0)?;
    if norm == 0.0 {
        return Ok(base);
    }
    Ok(base.scale(l2 / norm).sampled())
}

/// One application of `G`: solve `L_c u~ = V(., u)` and keep the real part.
/// The imaginary residue is checked relative to `max(1, ||u~||_inf)`.
pub fn picard_step(u: &Signal, nl: &Nonlinearity, lc: &StringOperator) -> Result<Signal> {
    let v = nl.eval_v(u)?;
    let out = lc.solve(&v)?;
    let scale = lp_norm(&out, f64::INFINITY)?.max(1.0);
    out.into_real(REALNESS_TOL * scale)
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// `None` applies the ball-sizing rule.
    pub epsilon_ball: Option<f64>,
    pub initial: Option<Signal>,
    /// Smoothness used for the continuity certificate.
    pub s: f64,
    /// Halvings of `theta` after a detected divergence.
    pub max_retries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            tol: 1e-10,
            max_iter: 500,
            epsilon_ball: None,
            initial: None,
            s: 1.0,
            max_retries: 2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if let Some(e) = self.epsilon_ball {
            if !(e > 0.0) {
                return Err(Error::InvalidParameter(format!("epsilon_ball must be > 0, got {e}")));
            }
        }
        SobolevParams::new(self.s)?;
        Ok(())
    }
}

/// The quantitative side of the existence argument, made executable.
#[derive(Clone, Debug, Serialize)]
pub struct BallSizing {
    /// `sum_xi (1 + gamma^2)^{-delta}` for each grid value.
    pub delta_sums: Vec<(f64, f64)>,
    pub delta: f64,
    /// Open window `(delta - delta/alpha, delta)`.
    pub s_window: (f64, f64),
    pub s: f64,
    /// `||.||_{H^s} <= K ||.||_{H^{c,inf}}`
    pub hcinf_to_sobolev: f64,
    pub alpha_star: f64,
    /// `||.||_{L^{alpha*}} <= K ||.||_{H^s}`
    pub sobolev_to_lebesgue: f64,
    /// Product of the two: `H^{c,inf}` into `L^{2 alpha}`.
    pub embedding_constant: f64,
    /// `2 C^2 E^2`
    pub d_prime: f64,
    pub h_l2: f64,
    /// Smallest admissible radius, `None` when none exists.
    pub epsilon: Option<f64>,
    pub small_data_satisfied: bool,
}

pub fn size_ball(nl: &Nonlinearity, lc: &StringOperator) -> BallSizing {
    let profile = lc.profile();
    let log1p: Vec<f64> = profile.gamma().iter().map(|g| (g * g).ln_1p()).collect();
    let dual_sum = |d: f64| pairwise_sum(&log1p.iter().map(|l| (-d * l).exp()).collect::<Vec<_>>());
    let delta_sums: Vec<(f64, f64)> = DELTA_GRID.iter().map(|&d| (d, dual_sum(d))).collect();
    let tail = delta_sums[delta_sums.len() - 1].1;
    // smallest delta whose dual sum has settled to within a factor 2 of the
    // most convergent grid value
    let (delta, s_delta) = delta_sums
        .iter()
        .copied()
        .find(|&(_, v)| v <= 2.0 * tail)
        .unwrap_or(delta_sums[delta_sums.len() - 1]);

    let Growth { alpha, c_growth, .. } = nl.growth;
    let s_window = (delta - delta / alpha, delta);
    let s = 0.5 * (s_window.0 + s_window.1);
    let hcinf_to_sobolev = lc.sobolev_embedding_constant(SobolevParams::new(s).expect("s >= 0"));
    let alpha_star = 2.0 * delta / (delta - s);
    let sobolev_to_lebesgue = s_delta.powf(s / (2.0 * delta));
    let embedding_constant = hcinf_to_sobolev * sobolev_to_lebesgue;
    let d_prime = 2.0 * c_growth * c_growth * embedding_constant * embedding_constant;
    let h_l2 = nl.h_l2();
    let epsilon = smallest_radius(d_prime, alpha, h_l2);
    BallSizing {
        delta_sums,
        delta,
        s_window,
        s,
        hcinf_to_sobolev,
        alpha_star,
        sobolev_to_lebesgue,
        embedding_constant,
        d_prime,
        h_l2,
        epsilon,
        small_data_satisfied: epsilon.is_some(),
    }
}

/// Smallest `eps > 0` with `d (h^2 + eps^{2 alpha}) <= eps^2`.
pub fn smallest_radius(d: f64, alpha: f64, h: f64) -> Option<f64> {
    let slack = |e: f64| e * e - d * (h * h + e.powf(2.0 * alpha));
    // slack is maximal where 2 eps = 2 alpha d eps^{2 alpha - 1}
    let peak = (1.0 / (alpha * d)).powf(1.0 / (2.0 * alpha - 2.0));
    if !peak.is_finite() || slack(peak) < 0.0 {
        return None;
    }
    if h == 0.0 {
        return Some(peak);
    }
    let (mut lo, mut hi) = (0.0, peak);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slack(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallSource {
    Configured,
    SizingRule,
    Unconstrained,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionNorms {
    pub l2: f64,
    pub l2alpha: f64,
    /// `None` if `phi` is not representable in `H^{c,inf}`.
    pub hcinf: Option<f64>,
    pub sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub status: SolveStatus,
    pub iterations: usize,
    /// `||phi_{k+1} - phi_k||_{L^2}` for the final attempt.
    pub residual_history: Vec<f64>,
    /// `||L_c phi - V(., phi)||_{L^2}`, recomputed from the final iterate.
    pub final_residual_eq: f64,
    pub norms: SolutionNorms,
    pub ball_respected: bool,
    pub epsilon_ball: Option<f64>,
    pub ball_source: BallSource,
    pub sizing: BallSizing,
    pub continuity_constant: f64,
    pub continuity_ok: bool,
    pub theta: f64,
    pub attempts: usize,
    pub group: String,
    pub weight: String,
    pub c: f64,
    pub s: f64,
    pub nonlinearity: String,
}

struct Attempt {
    phi: Signal,
    status: SolveStatus,
    history: Vec<f64>,
    ball_ok: bool,
}

fn iterate(
    nl: &Nonlinearity,
    lc: &StringOperator,
    cfg: &SolverConfig,
    theta: f64,
    epsilon: Option<f64>,
    alpha: f64,
) -> Result<Attempt> {
    let group = lc.group().clone();
    let mut phi = match &cfg.initial {
        Some(init) => {
            ensure_same_group(&group, init.group_ref())?;
            init.clone().into_real(REALNESS_TOL)?
        }
        None => Signal::zeros(group),
    };
    let in_ball = |u: &Signal| -> Result<bool> {
        Ok(match epsilon {
            Some(eps) => lp_norm(u, 2.0 * alpha)? <= eps * (1.0 + 1e-9),
            None => true,
        })
    };
    let mut ball_ok = in_ball(&phi)?;
    let mut history: Vec<f64> = Vec::new();
    let mut growing = 0usize;
    for _ in 0..cfg.max_iter {
        let mapped = match picard_step(&phi, nl, lc) {
            Ok(m) => m,
            Err(Error::NonFinite { .. }) => {
                return Ok(Attempt {
                    phi,
                    status: SolveStatus::Diverged,
                    history,
                    ball_ok: false,
                })
            }
            Err(e) => return Err(e),
        };
        let next = if theta == 1.0 {
            mapped
        } else {
            phi.lincomb(1.0 - theta, &mapped, theta)?
        };
        let step = lp_norm(&next.sub(&phi)?, 2.0)?;
        if !step.is_finite() || next.values().iter().any(|v| !v.re.is_finite()) {
            history.push(f64::INFINITY);
            return Ok(Attempt {
                phi,
                status: SolveStatus::Diverged,
                history,
                ball_ok: false,
            });
        }
        growing = match history.last() {
            Some(&prev) if step > prev => growing + 1,
            _ => 0,
        };
        history.push(step);
        let inside = in_ball(&next)?;
        ball_ok &= inside;
        phi = next;
        if step < cfg.tol {
            return Ok(Attempt {
                phi,
                status: SolveStatus::Converged,
                history,
                ball_ok,
            });
        }
        if !inside && growing >= DIVERGENCE_RUN {
            return Ok(Attempt {
                phi,
                status: SolveStatus::Diverged,
                history,
                ball_ok,
            });
        }
    }
    Ok(Attempt {
        phi,
        status: SolveStatus::MaxIter,
        history,
        ball_ok,
    })
}

/// Runs the damped fixed-point iteration from `cfg.initial` (zero by
/// default). Non-convergence is reported through [`Error::MaxIterations`] or
/// [`Error::Diverged`], both carrying the full report.
pub fn solve_nonlinear_op(
    nl: &Nonlinearity,
    lc: &StringOperator,
    cfg: &SolverConfig,
) -> Result<(Signal, SolveReport)> {
    cfg.validate()?;
    ensure_same_group(nl.group(), lc.group())?;
    let sizing = size_ball(nl, lc);
    let (epsilon, ball_source) = match (cfg.epsilon_ball, sizing.epsilon) {
        (Some(e), _) => (Some(e), BallSource::Configured),
        (None, Some(e)) => (Some(e), BallSource::SizingRule),
        (None, None) => (None, BallSource::Unconstrained),
    };
    let alpha = nl.growth.alpha;
    let mut theta = cfg.theta;
    let mut attempts = 0;
    let attempt = loop {
        attempts += 1;
        let a = iterate(nl, lc, cfg, theta, epsilon, alpha)?;
        if a.status == SolveStatus::Diverged && attempts <= cfg.max_retries {
            theta *= 0.5;
            continue;
        }
        break a;
    };

    let s = SobolevParams::new(cfg.s)?;
    let verification = verify_solution_op(&attempt.phi, nl, lc, s)?;
    let report = SolveReport {
        converged: attempt.status == SolveStatus::Converged,
        status: attempt.status,
        iterations: attempt.history.len(),
        residual_history: attempt.history,
        final_residual_eq: verification.residual_eq,
        norms: SolutionNorms {
            l2: lp_norm(&attempt.phi, 2.0)?,
            l2alpha: lp_norm(&attempt.phi, 2.0 * alpha)?,
            hcinf: verification.hcinf_norm,
            sup: verification.sup_norm,
        },
        ball_respected: attempt.ball_ok,
        epsilon_ball: epsilon,
        ball_source,
        sizing,
        continuity_constant: verification.continuity_constant,
        continuity_ok: verification.continuity_ok,
        theta,
        attempts,
        group: lc.group().descriptor(),
        weight: lc.profile().name().to_string(),
        c: lc.params().c(),
        s: cfg.s,
        nonlinearity: nl.name.clone(),
    };
    match report.status {
        SolveStatus::Converged => Ok((attempt.phi, report)),
        SolveStatus::MaxIter => Err(Error::MaxIterations(Box::new(report))),
        SolveStatus::Diverged => Err(Error::Diverged(Box::new(report))),
    }
}

/// Checks on a candidate solution, all recomputed from `phi` alone.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    /// `||L_c phi - V(., phi)||_{L^2}`; `+inf` if `L_c phi` is not representable.
    pub residual_eq: f64,
    pub residual_ok: bool,
    pub sup_norm: f64,
    pub sobolev_norm: f64,
    /// `C(gamma, s)`
    pub continuity_constant: f64,
    /// `||phi||_inf <= C(gamma, s) ||phi||_{H^s}`
    pub continuity_ok: bool,
    pub hcinf_norm: Option<f64>,
    pub hcinf_finite: bool,
    pub passed: bool,
}

/// Relative tolerance of [`VerificationRecord::residual_ok`], scaled by
/// `1 + ||phi||_{H^{c,inf}}`.
pub const VERIFY_RTOL: f64 = 1e-10;

pub fn verify_solution_op(
    phi: &Signal,
    nl: &Nonlinearity,
    lc: &StringOperator,
    s: SobolevParams,
) -> Result<VerificationRecord> {
    let residual_eq = match (lc.apply(phi), nl.eval_v(phi)) {
        (Ok(l), Ok(v)) => lp_norm(&l.sub(&v)?, 2.0)?,
        (Err(Error::NotInDomain { .. }), _) | (_, Err(Error::NonFinite { .. })) => f64::INFINITY,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let hcinf_norm = lc.hcinf_norm(phi).ok();
    let sup_norm = lp_norm(phi, f64::INFINITY)?;
    let sobolev_norm = lc.profile().sobolev_norm(phi, s)?;
    let continuity_constant = lc.profile().embedding_constant_sup(s);
    let continuity_ok = sup_norm <= continuity_constant * sobolev_norm + 1e-10;
    let residual_ok = residual_eq <= VERIFY_RTOL * (1.0 + hcinf_norm.unwrap_or(f64::INFINITY));
    Ok(VerificationRecord {
        residual_eq,
        residual_ok,
        sup_norm,
        sobolev_norm,
        continuity_constant,
        continuity_ok,
        hcinf_finite: hcinf_norm.is_some(),
        hcinf_norm,
        passed: residual_ok && continuity_ok && hcinf_norm.is_some(),
    })
}

pub fn eval_v(nl: &Nonlinearity, u: &Signal) -> Result<Signal> {
    nl.eval_v(u)
}

pub fn solve_nonlinear(
    nl: &Nonlinearity,
    w: &Weight,
    op: OperatorParams,
    cfg: &SolverConfig,
) -> Result<(Signal, SolveReport)> {
    let lc = StringOperator::from_weight(nl.group(), w, op)?;
    solve_nonlinear_op(nl, &lc, cfg)
}

pub fn verify_solution(
    phi: &Signal,
    nl: &Nonlinearity,
    w: &Weight,
    op: OperatorParams,
    s: SobolevParams,
) -> Result<VerificationRecord> {
    let lc = StringOperator::from_weight(nl.group(), w, op)?;
    verify_solution_op(phi, nl, &lc, s)
}

/// `true` if `Signal` carries only real values (up to [`REALNESS_TOL`]).
pub fn is_real(u: &Signal) -> bool {
    u.max_imag().1 <= REALNESS_TOL
}
