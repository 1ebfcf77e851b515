use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{DualCharacter, FiniteAbelianGroup};
use crate::spectral::{prime_factors, GroupRef};

pub type WeightFn = Arc<dyn Fn(&FiniteAbelianGroup, &DualCharacter) -> f64 + Send + Sync>;

/// How `gamma` is evaluated on the dual.
#[derive(Clone)]
pub enum WeightKind {
    /// `gamma = 0`; every `H^s` collapses to `L^2`.
    Zero,
    /// `sqrt(sum_j min(k_j, n_j - k_j)^2)`, frequency magnitude of a
    /// discretized torus.
    SymEuclid,
    /// Number of nonzero coordinates. On `(Z_2)^m` this is the Hamming weight
    /// of the Walsh index.
    Hamming,
    /// On `Z_{p^m}`: the denominator of `k / p^m` in lowest terms, `0` at `k = 0`.
    Pruefer { p: usize },
    /// Explicit values in dual enumeration order.
    Table(Vec<f64>),
    Custom(WeightFn),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::SymEuclid => write!(f, "SymEuclid"),
            Self::Hamming => write!(f, "Hamming"),
            Self::Pruefer { p } => write!(f, "Pruefer {{ p: {p} }}"),
            Self::Table(v) => write!(f, "Table({} values)", v.len()),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A weight `gamma` on the dual together with its subadditivity constant,
/// `gamma(a b) <= c_gamma (gamma(a) + gamma(b))`.
#[derive(Clone, Debug)]
pub struct Weight {
    name: String,
    c_gamma: f64,
    kind: WeightKind,
}

impl Weight {
    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            c_gamma: 1.0,
            kind: WeightKind::Zero,
        }
    }

    pub fn sym_euclid() -> Self {
        Self {
            name: "sym-euclid".into(),
            c_gamma: 1.0,
            kind: WeightKind::SymEuclid,
        }
    }

    pub fn hamming() -> Self {
        Self {
            name: "hamming".into(),
            c_gamma: 1.0,
            kind: WeightKind::Hamming,
        }
    }

    pub fn pruefer(p: usize) -> Result<Self> {
        if p < 2 || prime_factors(p).len() != 1 {
            return Err(Error::InvalidParameter(format!("pruefer weight needs a prime, got {p}")));
        }
        Ok(Self {
            name: format!("pruefer:{p}"),
            c_gamma: 1.0,
            kind: WeightKind::Pruefer { p },
        })
    }

    pub fn table(name: impl Into<String>, values: Vec<f64>, c_gamma: f64) -> Result<Self> {
        validate_c_gamma(c_gamma)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight value {} at index {i} is not a finite nonnegative number",
                values[i]
            )));
        }
        Ok(Self {
            name: name.into(),
            c_gamma,
            kind: WeightKind::Table(values),
        })
    }

    pub fn custom(name: impl Into<String>, c_gamma: f64, f: WeightFn) -> Result<Self> {
        validate_c_gamma(c_gamma)?;
        Ok(Self {
            name: name.into(),
            c_gamma,
            kind: WeightKind::Custom(f),
        })
    }

    /// `zero`, `sym-euclid`, `hamming`, `pruefer:<p>` (or `pruefer-<p>`).
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "zero" => Ok(Self::zero()),
            "sym-euclid" => Ok(Self::sym_euclid()),
            "hamming" => Ok(Self::hamming()),
            other => {
                let p = other
                    .strip_prefix("pruefer:")
                    .or_else(|| other.strip_prefix("pruefer-"))
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown weight {other:?}")))?;
                let p = p
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad prime in {other:?}")))?;
                Self::pruefer(p)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Overrides the declared subadditivity constant.
    pub fn with_c_gamma(mut self, c_gamma: f64) -> Result<Self> {
        validate_c_gamma(c_gamma)?;
        self.c_gamma = c_gamma;
        Ok(self)
    }

    fn unsupported(&self, group: &FiniteAbelianGroup, reason: impl Into<String>) -> Error {
        Error::WeightUnsupported {
            weight: self.name.clone(),
            group: group.descriptor(),
            reason: reason.into(),
        }
    }

    /// `gamma(xi)`.
    pub fn gamma(&self, group: &FiniteAbelianGroup, xi: &DualCharacter) -> Result<f64> {
        let index = group.linear_index(xi.indices())?;
        Ok(self.profile(&Arc::new(group.clone()))?.gamma[index])
    }

    /// Evaluates `gamma` on every character of `group`.
    pub fn profile(&self, group: &GroupRef) -> Result<WeightProfile> {
        let n = group.order();
        let gamma: Vec<f64> = match &self.kind {
            WeightKind::Zero => vec![0.0; n],
            WeightKind::SymEuclid => (0..n)
                .map(|i| {
                    group
                        .coords_of(i)
                        .iter()
                        .zip(group.factors())
                        .map(|(&k, &m)| {
                            let d = k.min(m - k) as f64;
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt()
                })
                .collect(),
            WeightKind::Hamming => (0..n)
                .map(|i| group.coords_of(i).iter().filter(|&&k| k != 0).count() as f64)
                .collect(),
            WeightKind::Pruefer { p } => {
                let nontrivial: Vec<usize> = group
                    .factors()
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 1)
                    .map(|(j, _)| j)
                    .collect();
                match nontrivial.as_slice() {
                    [] => vec![0.0; n],
                    [j] => {
                        let modulus = group.factors()[*j];
                        if prime_factors(modulus).iter().any(|q| q != p) {
                            return Err(self.unsupported(group, format!("modulus {modulus} is not a power of {p}")));
                        }
                        (0..n)
                            .map(|i| {
                                let k = group.coords_of(i)[*j];
                                if k == 0 {
                                    0.0
                                } else {
                                    let mut denom = modulus;
                                    let mut k = k;
                                    while k % p == 0 {
                                        k /= p;
                                        denom /= p;
                                    }
                                    denom as f64
                                }
                            })
                            .collect()
                    }
                    _ => return Err(self.unsupported(group, "needs a single cyclic factor Z_{p^m}")),
                }
            }
            WeightKind::Table(values) => {
                if values.len() != n {
                    return Err(self.unsupported(
                        group,
                        format!("table has {} entries, group order is {n}", values.len()),
                    ));
                }
                values.clone()
            }
            WeightKind::Custom(f) => {
                let v: Vec<f64> = (0..n).map(|i| f(group, &group.character_at(i))).collect();
                if let Some(i) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
                    return Err(self.unsupported(group, format!("gamma({i}) = {} is not finite and nonnegative", v[i])));
                }
                v
            }
        };
        Ok(WeightProfile {
            group: group.clone(),
            name: self.name.clone(),
            c_gamma: self.c_gamma,
            gamma,
        })
    }
}

fn validate_c_gamma(c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c_gamma must be finite and nonnegative, got {c}")))
    }
}

/// `gamma` tabulated on a specific group.
#[derive(Clone, Debug)]
pub struct WeightProfile {
    pub(crate) group: GroupRef,
    pub(crate) name: String,
    pub(crate) c_gamma: f64,
    pub(crate) gamma: Vec<f64>,
}

impl WeightProfile {
    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn min_gamma(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gamma(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Scans `gamma(a b) <= c_gamma (gamma(a) + gamma(b))`.
    pub fn check_subadditivity(&self) -> SubadditivityReport {
        let g = &self.group;
        let n = g.order();
        let exhaustive = n <= SUBADDITIVITY_EXHAUSTIVE_MAX;
        let mut report = SubadditivityReport {
            ok: true,
            worst_ratio: 0.0,
            witness: None,
            degenerate_violation: None,
            pairs_checked: 0,
            exhaustive,
        };
        let visit = |a: usize, b: usize, report: &mut SubadditivityReport| {
            report.pairs_checked += 1;
            let lhs = self.gamma[g.add_index(a, b)];
            let denom = self.gamma[a] + self.gamma[b];
            if denom > 0.0 {
                let ratio = lhs / denom;
                if ratio > report.worst_ratio || report.witness.is_none() {
                    report.worst_ratio = ratio;
                    report.witness = Some((g.character_at(a), g.character_at(b)));
                }
            } else if lhs > 0.0 && report.degenerate_violation.is_none() {
                report.degenerate_violation = Some((g.character_at(a), g.character_at(b)));
            }
        };
        if exhaustive {
            for a in 0..n {
                for b in 0..n {
                    visit(a, b, &mut report);
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(SUBADDITIVITY_SEED);
            for _ in 0..SUBADDITIVITY_SAMPLES {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                visit(a, b, &mut report);
            }
        }
        report.ok = report.degenerate_violation.is_none()
            && report.worst_ratio <= self.c_gamma * (1.0 + SUBADDITIVITY_RTOL);
        if let Some(w) = &report.degenerate_violation {
            report.witness = Some(w.clone());
        }
        report
    }
}

pub const SUBADDITIVITY_EXHAUSTIVE_MAX: usize = 4096;
pub const SUBADDITIVITY_SAMPLES: usize = 1_000_000;
const SUBADDITIVITY_SEED: u64 = 0x5eed_0001;
/// Relative slack for equality cases that round differently, e.g.
/// `sqrt(8)` against `2 sqrt(2)`.
const SUBADDITIVITY_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub ok: bool,
    /// `max gamma(ab) / (gamma(a) + gamma(b))` over pairs with a positive denominator.
    pub worst_ratio: f64,
    pub witness: Option<(DualCharacter, DualCharacter)>,
    /// A pair with `gamma(a) = gamma(b) = 0` but `gamma(ab) > 0`.
    pub degenerate_violation: Option<(DualCharacter, DualCharacter)>,
    pub pairs_checked: usize,
    pub exhaustive: bool,
}
