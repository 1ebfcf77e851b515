//! Weighted Sobolev spaces `H^s_gamma(G)`, their embedding and algebra
//! constants, and the translation-modulus diagnostics behind the compact
//! embedding.
//!
//! Norms: `||f||_{H^s} = (sum_xi (1 + gamma(xi)^2)^s |f^(xi)|^2)^{1/2}` under
//! counting measure on the dual.

mod weight;

use serde::Serialize;

pub use weight::{
    SubadditivityReport, Weight, WeightFn, WeightKind, WeightProfile,
    SUBADDITIVITY_EXHAUSTIVE_MAX, SUBADDITIVITY_SAMPLES,
};

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::spectral::{GroupRef, Signal};
use crate::sum::{pairwise_sum, pairwise_sum_by};

/// Smoothness exponent `s >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SobolevParams {
    s: f64,
}

impl SobolevParams {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s >= 0.0 {
            Ok(Self { s })
        } else {
            Err(Error::InvalidParameter(format!("smoothness s must be finite and >= 0, got {s}")))
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Constants of the `L^{alpha*}` embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LAlphaEmbedding {
    /// `2 alpha / (alpha - s)`
    pub alpha_star: f64,
    /// `(sum_xi (1 + gamma^2)^{-alpha})^{s / (2 alpha)}`
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessRow {
    pub factor: usize,
    pub multiple: usize,
    pub shift: GroupElement,
    /// `sup_xi |xi(h) - 1| / (1 + gamma(xi)^2)^s`
    pub sup: f64,
    /// Torus angle `2 pi min(m, n - m) / n`, only for `sym-euclid` with `s >= 1/2`.
    pub torus_bound: Option<f64>,
    pub within_bound: Option<bool>,
}

/// `|xi(h) - 1|` from the phase `t / exponent`, i.e. `2 |sin(pi t / exponent)|`.
pub(crate) fn chord(group: &FiniteAbelianGroup, phase: usize) -> f64 {
    let e = group.exponent();
    let t = phase % e;
    let folded = t.min(e - t) as f64;
    2.0 * (std::f64::consts::PI * folded / e as f64).sin()
}

impl WeightProfile {
    fn check_group(&self, f: &Signal) -> Result<()> {
        crate::spectral::ensure_same_group(&self.group, f.group_ref())
    }

    /// `log(1 + gamma^2)` per character.
    fn log_one_plus_gamma_sq(&self) -> impl Iterator<Item = f64> + '_ {
        self.gamma.iter().map(|g| (g * g).ln_1p())
    }

    pub fn sobolev_norm(&self, f: &Signal, p: SobolevParams) -> Result<f64> {
        self.check_group(f)?;
        let spec = f.spectrum();
        let terms: Vec<f64> = self
            .log_one_plus_gamma_sq()
            .zip(spec.values())
            .map(|(l, c)| {
                let a = c.norm_sqr();
                if a == 0.0 {
                    0.0
                } else {
                    (p.s * l).exp() * a
                }
            })
            .collect();
        Ok(pairwise_sum(&terms).sqrt())
    }

    /// `C(gamma, s) = (sum_xi (1 + gamma^2)^{-s})^{1/2}`.
    pub fn embedding_constant_sup(&self, p: SobolevParams) -> f64 {
        let terms: Vec<f64> = self.log_one_plus_gamma_sq().map(|l| (-p.s * l).exp()).collect();
        pairwise_sum(&terms).sqrt()
    }

    /// Requires `alpha > s`.
    pub fn embedding_constant_lalpha(&self, p: SobolevParams, alpha: f64) -> Result<LAlphaEmbedding> {
        if !(alpha.is_finite() && alpha > p.s && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and exceed s = {}, got {alpha}",
                p.s
            )));
        }
        let terms: Vec<f64> = self.log_one_plus_gamma_sq().map(|l| (-alpha * l).exp()).collect();
        let sum = pairwise_sum(&terms);
        Ok(LAlphaEmbedding {
            alpha_star: 2.0 * alpha / (alpha - p.s),
            constant: sum.powf(p.s / (2.0 * alpha)),
        })
    }

    /// `D(gamma, s) = 2^s (1 + c_gamma^2)^{s/2} C(gamma, s)`.
    pub fn algebra_constant(&self, p: SobolevParams) -> f64 {
        2f64.powf(p.s) * (1.0 + self.c_gamma * self.c_gamma).powf(p.s / 2.0)
            * self.embedding_constant_sup(p)
    }

    /// `C(h) = max_xi |xi(h) - 1|^2 / (1 + gamma(xi)^2)^s`.
    pub fn translation_modulus(&self, p: SobolevParams, h: &GroupElement) -> Result<f64> {
        let g = &self.group;
        let h = g.linear_index(h.residues())?;
        Ok(self.modulus_at(p, h, 2))
    }

    fn modulus_at(&self, p: SobolevParams, h: usize, power: i32) -> f64 {
        let g = &self.group;
        self.log_one_plus_gamma_sq()
            .enumerate()
            .map(|(xi, l)| chord(g, g.pairing_phase(xi, h)).powi(power) * (-p.s * l).exp())
            .fold(0.0, f64::max)
    }

    /// One row per multiple `m` of each generator `e_j`, reporting
    /// `sup_xi |xi(m e_j) - 1| / (1 + gamma^2)^s`.
    pub fn compactness_profile(&self, p: SobolevParams) -> Vec<CompactnessRow> {
        let g = &self.group;
        let torus = self.name == "sym-euclid" && p.s >= 0.5;
        let mut rows = Vec::new();
        for (j, &n) in g.factors().iter().enumerate() {
            for m in 0..n {
                let h = m * g.stride(j);
                let sup = self.modulus_at(p, h, 1);
                let torus_bound = torus
                    .then(|| std::f64::consts::TAU * m.min(n - m) as f64 / n as f64);
                rows.push(CompactnessRow {
                    factor: j,
                    multiple: m,
                    shift: g.element_at(h),
                    sup,
                    torus_bound,
                    within_bound: torus_bound.map(|b| sup <= b),
                });
            }
        }
        rows
    }

    /// `||f||_{H^sigma} <= ||f||_{H^s}` for `sigma <= s`.
    pub fn verify_scale(&self, f: &Signal, s: f64, sigma: f64) -> Result<bool> {
        if sigma > s {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} exceeds s = {s}")));
        }
        let hi = self.sobolev_norm(f, SobolevParams::new(s)?)?;
        let lo = self.sobolev_norm(f, SobolevParams::new(sigma)?)?;
        Ok(lo <= hi + 1e-12 * hi.max(1.0))
    }
}

/// `(|G|^{-1} sum_x |f(x)|^p)^{1/p}`, or the max modulus for `p = inf`.
pub fn lp_norm(f: &Signal, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p exponent must be >= 1, got {p}")));
    }
    let max = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    let w = f.group().haar_weight();
    let mean = pairwise_sum_by(f.len(), |i| (f.values()[i].norm() / max).powf(p)) * w;
    Ok(mean.powf(1.0 / p) * max)
}

pub fn check_subadditivity(group: &GroupRef, w: &Weight) -> Result<SubadditivityReport> {
    Ok(w.profile(group)?.check_subadditivity())
}

pub fn sobolev_norm(f: &Signal, w: &Weight, p: SobolevParams) -> Result<f64> {
    w.profile(f.group_ref())?.sobolev_norm(f, p)
}

pub fn embedding_constant_sup(group: &GroupRef, w: &Weight, p: SobolevParams) -> Result<f64> {
    Ok(w.profile(group)?.embedding_constant_sup(p))
}

pub fn embedding_constant_lalpha(
    group: &GroupRef,
    w: &Weight,
    p: SobolevParams,
    alpha: f64,
) -> Result<LAlphaEmbedding> {
    w.profile(group)?.embedding_constant_lalpha(p, alpha)
}

pub fn algebra_constant(group: &GroupRef, w: &Weight, p: SobolevParams) -> Result<f64> {
    Ok(w.profile(group)?.algebra_constant(p))
}

pub fn translation_modulus(
    group: &GroupRef,
    w: &Weight,
    p: SobolevParams,
    h: &GroupElement,
) -> Result<f64> {
    w.profile(group)?.translation_modulus(p, h)
}

pub fn compactness_profile(group: &GroupRef, w: &Weight, p: SobolevParams) -> Result<Vec<CompactnessRow>> {
    Ok(w.profile(group)?.compactness_profile(p))
}

pub fn verify_scale(f: &Signal, w: &Weight, s: f64, sigma: f64) -> Result<bool> {
    w.profile(f.group_ref())?.verify_scale(f, s, sigma)
}
