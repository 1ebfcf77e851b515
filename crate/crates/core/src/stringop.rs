//! The operator `L_c = Delta e^{-c Delta} - Id` on `H^{c,inf}(G)`, realized as
//! the Fourier multiplier `-(1 + gamma^2 e^{c gamma^2})`, and its exact
//! inverse.
//!
//! Multipliers live in log space: `e^{c gamma^2}` leaves double range once
//! `c gamma^2 > 709`, while `1/m` simply underflows to zero there.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sobolev::{lp_norm, SobolevParams, Weight, WeightProfile};
use crate::spectral::{ensure_same_group, idft, GroupRef, Signal, Spectrum};
use crate::sum::pairwise_sum;

/// Largest `x` with `exp(x)` finite.
pub const LOG_MAX: f64 = 709.782712893384;

/// Coefficients at or below this magnitude are treated as zero where the
/// multiplier is unrepresentable.
pub const DOMAIN_FLOOR: f64 = 1e-300;

/// Relative tolerance for the isometry `||u_g||_{H^{c,inf}} = ||g||_{L^2}`.
pub const ISOMETRY_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorParams {
    c: f64,
}

impl OperatorParams {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Self { c })
        } else {
            Err(Error::InvalidParameter(format!("c must be finite and > 0, got {c}")))
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// `log(1 + gamma^2 e^{c gamma^2})` without forming `e^{c gamma^2}`.
pub fn log_multiplier(gamma: f64, c: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    // t = log(gamma^2 e^{c gamma^2}); log(1 + e^t) as a stable softplus
    let t = c * gamma * gamma + 2.0 * gamma.ln();
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `m(xi) = 1 + gamma(xi)^2 e^{c gamma(xi)^2}` over the dual.
#[derive(Clone, Debug)]
pub struct MultiplierProfile {
    values: Vec<f64>,
    log_values: Vec<f64>,
}

impl MultiplierProfile {
    pub fn build(profile: &WeightProfile, op: OperatorParams) -> Self {
        let log_values: Vec<f64> = profile
            .gamma()
            .iter()
            .map(|&g| log_multiplier(g, op.c))
            .collect();
        let values = log_values
            .iter()
            .map(|&l| if l <= LOG_MAX { l.exp() } else { f64::INFINITY })
            .collect();
        Self { values, log_values }
    }

    /// `m(xi)`, `+inf` where not representable.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn is_representable(&self, i: usize) -> bool {
        self.values[i].is_finite()
    }

    /// Number of characters whose multiplier overflows a double.
    pub fn overflow_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_infinite()).count()
    }

    /// `1/m(xi)` as `exp(-log m)`.
    pub fn inverse(&self, i: usize) -> f64 {
        (-self.log_values[i]).exp()
    }

    /// Number of characters where `1/m` underflows to exactly zero.
    pub fn underflow_count(&self) -> usize {
        (0..self.log_values.len()).filter(|&i| self.inverse(i) == 0.0).count()
    }
}

pub fn build_multiplier(group: &GroupRef, w: &Weight, op: OperatorParams) -> Result<MultiplierProfile> {
    Ok(MultiplierProfile::build(&w.profile(group)?, op))
}

/// `L_c` bound to a weight on one group.
#[derive(Clone, Debug)]
pub struct StringOperator {
    profile: WeightProfile,
    op: OperatorParams,
    multiplier: MultiplierProfile,
}

impl StringOperator {
    pub fn new(profile: WeightProfile, op: OperatorParams) -> Self {
        let multiplier = MultiplierProfile::build(&profile, op);
        Self {
            profile,
            op,
            multiplier,
        }
    }

    pub fn from_weight(group: &GroupRef, w: &Weight, op: OperatorParams) -> Result<Self> {
        Ok(Self::new(w.profile(group)?, op))
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.profile
    }

    pub fn params(&self) -> OperatorParams {
        self.op
    }

    pub fn multiplier(&self) -> &MultiplierProfile {
        &self.multiplier
    }

    pub fn group(&self) -> &GroupRef {
        self.profile.group()
    }

    /// `log(m(xi) |u^(xi)|)` per character, `None` for zero terms. Errors on
    /// an active coefficient where `m` is unrepresentable or the product
    /// overflows.
    fn log_weighted(&self, spec: &Spectrum) -> Result<Vec<Option<f64>>> {
        spec.values()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = c.norm();
                if a == 0.0 {
                    return Ok(None);
                }
                let l = self.multiplier.log_values[i];
                if !self.multiplier.is_representable(i) {
                    if a <= DOMAIN_FLOOR {
                        return Ok(None);
                    }
                    return Err(Error::NotInDomain {
                        index: i,
                        magnitude: a,
                        log_multiplier: l,
                    });
                }
                let lw = l + a.ln();
                if lw > LOG_MAX {
                    return Err(Error::NotInDomain {
                        index: i,
                        magnitude: a,
                        log_multiplier: l,
                    });
                }
                Ok(Some(lw))
            })
            .collect()
    }

    /// `(sum_xi m(xi)^2 |f^(xi)|^2)^{1/2}`.
    pub fn hcinf_norm(&self, f: &Signal) -> Result<f64> {
        ensure_same_group(self.group(), f.group_ref())?;
        let logs = self.log_weighted(&f.spectrum())?;
        let top = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let terms: Vec<f64> = logs
            .iter()
            .map(|l| l.map_or(0.0, |l| (2.0 * (l - top)).exp()))
            .collect();
        let norm = top.exp() * pairwise_sum(&terms).sqrt();
        if norm.is_finite() {
            Ok(norm)
        } else {
            Err(Error::InvalidParameter(
                "H^(c,inf) norm exceeds double range".into(),
            ))
        }
    }

    /// `L_c u = -F^{-1}(m F(u))`.
    pub fn apply(&self, u: &Signal) -> Result<Signal> {
        ensure_same_group(self.group(), u.group_ref())?;
        let spec = u.spectrum();
        let logs = self.log_weighted(&spec)?;
        let values = spec
            .values()
            .iter()
            .zip(&logs)
            .map(|(c, l)| match l {
                Some(l) => -(c / c.norm()) * l.exp(),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        Ok(idft(&Spectrum::new(self.group().clone(), values)?))
    }

    /// The unique `u` with `L_c u = g`: `u^ = -g^ / m`.
    pub fn solve(&self, g: &Signal) -> Result<Signal> {
        ensure_same_group(self.group(), g.group_ref())?;
        let spec = g.spectrum();
        let values = spec
            .values()
            .iter()
            .enumerate()
            .map(|(i, c)| -c * self.multiplier.inverse(i))
            .collect();
        Ok(idft(&Spectrum::new(self.group().clone(), values)?))
    }

    /// Best constant in `||f||_{H^s} <= K ||f||_{H^{c,inf}}`:
    /// `max_xi (1 + gamma^2)^{s/2} / m(xi)`.
    pub fn sobolev_embedding_constant(&self, p: SobolevParams) -> f64 {
        self.profile
            .gamma()
            .iter()
            .zip(&self.multiplier.log_values)
            .map(|(g, l)| (0.5 * p.s() * (g * g).ln_1p() - l).exp())
            .fold(0.0, f64::max)
    }

    /// Solves `L_c u = g` and checks the isometry and the sup-norm bound
    /// `||u||_inf <= C(gamma, s) ||g||_{L^2}`.
    pub fn solve_with_report(&self, g: &Signal, p: SobolevParams) -> Result<(Signal, LinearSolveReport)> {
        let u = self.solve(g)?;
        let l2_g = lp_norm(g, 2.0)?;
        let hcinf_u = self.hcinf_norm(&u)?;
        let isometry_rel_err = if l2_g == 0.0 {
            hcinf_u
        } else {
            (hcinf_u - l2_g).abs() / l2_g
        };
        let sup_u = lp_norm(&u, f64::INFINITY)?;
        let continuity_constant = self.profile.embedding_constant_sup(p);
        let sup_bound = continuity_constant * l2_g;
        let report = LinearSolveReport {
            group: self.group().descriptor(),
            weight: self.profile.name().to_string(),
            c: self.op.c,
            s: p.s(),
            l2_g,
            hcinf_u,
            isometry_rel_err,
            isometry_ok: isometry_rel_err <= ISOMETRY_RTOL,
            sup_u,
            continuity_constant,
            sup_bound,
            sup_ok: sup_u <= sup_bound + 1e-10,
            overflow_count: self.multiplier.overflow_count(),
            underflow_count: self.multiplier.underflow_count(),
        };
        Ok((u, report))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearSolveReport {
    pub group: String,
    pub weight: String,
    pub c: f64,
    pub s: f64,
    /// `||g||_{L^2}`
    pub l2_g: f64,
    /// `||u_g||_{H^{c,inf}}`
    pub hcinf_u: f64,
    pub isometry_rel_err: f64,
    pub isometry_ok: bool,
    pub sup_u: f64,
    pub continuity_constant: f64,
    pub sup_bound: f64,
    pub sup_ok: bool,
    /// Characters whose multiplier does not fit in a double.
    pub overflow_count: usize,
    pub underflow_count: usize,
}

pub fn hcinf_norm(f: &Signal, w: &Weight, op: OperatorParams) -> Result<f64> {
    StringOperator::from_weight(f.group_ref(), w, op)?.hcinf_norm(f)
}

pub fn apply_lc(u: &Signal, w: &Weight, op: OperatorParams) -> Result<Signal> {
    StringOperator::from_weight(u.group_ref(), w, op)?.apply(u)
}

pub fn solve_linear(g: &Signal, w: &Weight, op: OperatorParams) -> Result<Signal> {
    StringOperator::from_weight(g.group_ref(), w, op)?.solve(g)
}
