//! Seeded property suites over a zoo of groups.
//!
//! Every property records a slack `rhs - lhs` (or `-error` for identities)
//! per case and passes when the worst slack is at least `-tolerance`.
//! Each (property, configuration) pair draws from its own ChaCha stream
//! keyed on the seed and a label, so results are reproducible bit for bit.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::group::FiniteAbelianGroup;
use crate::sampling::random_signal;
use crate::sobolev::{lp_norm, SobolevParams, Weight, WeightProfile};
use crate::spectral::{
    convolve_dual, dft_fast, dft_naive, idft, l2_norm_counting, pointwise_mul, relative_l2_error,
    GroupRef, Signal, Spectrum,
};
use crate::stringop::{OperatorParams, StringOperator};

pub const DEFAULT_ZOO: [&str; 10] = [
    "Z2", "Z3", "Z4", "Z7", "Z12", "Z2xZ2", "Z2xZ3xZ5", "Z8xZ8", "Z64", "Z2^6",
];
pub const DEFAULT_WEIGHTS: [&str; 2] = ["sym-euclid", "hamming"];
pub const DEFAULT_S_GRID: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const TORUS_SIZES: [usize; 3] = [16, 64, 256];

/// Which properties to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Transform,
    Sobolev,
    Stringop,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "transform" => Ok(Self::Transform),
            "sobolev" => Ok(Self::Sobolev),
            "stringop" => Ok(Self::Stringop),
            _ => Err(crate::Error::InvalidParameter(format!(
                "unknown suite {s:?} (all, transform, sobolev, stringop)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    /// Random signals (or pairs) per configuration.
    pub samples: usize,
    /// Random `f` per shift in the translation suite.
    pub translation_samples: usize,
    pub groups: Vec<String>,
    pub weights: Vec<String>,
    pub s_grid: Vec<f64>,
    /// Operator parameter for the string-operator suites.
    pub c: f64,
    pub suite: Suite,
    /// Halves the sup-norm constant so the harness has something to catch.
    pub inject_bug: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 200,
            translation_samples: 100,
            groups: DEFAULT_ZOO.iter().map(|s| s.to_string()).collect(),
            weights: DEFAULT_WEIGHTS.iter().map(|s| s.to_string()).collect(),
            s_grid: DEFAULT_S_GRID.to_vec(),
            c: 0.5,
            suite: Suite::All,
            inject_bug: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub group: String,
    pub weight: Option<String>,
    pub s: Option<f64>,
    pub case: usize,
    /// Extra parameters such as the shift index or `alpha`.
    pub detail: Option<String>,
    /// Input values `[re, im]`, only kept for failing properties.
    pub values: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub tolerance: f64,
    pub worst_slack: f64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSuiteResult {
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

impl CheckSuiteResult {
    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
    witness: Option<(Witness, Option<Vec<Complex64>>)>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            worst: f64::INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, witness: impl FnOnce() -> (Witness, Option<Vec<Complex64>>)) {
        self.cases += 1;
        // NaN counts as the worst possible slack
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if slack < self.worst {
            self.worst = slack;
            self.witness = Some(witness());
        }
    }

    fn finish(self) -> PropertyResult {
        let passed = self.worst >= -self.tolerance;
        let worst_slack = if self.cases == 0 { 0.0 } else { self.worst };
        let witness = self.witness.map(|(mut w, values)| {
            if !passed {
                w.values = values.map(|v| v.iter().map(|c| [c.re, c.im]).collect());
            }
            w
        });
        PropertyResult {
            name: self.name.to_string(),
            passed,
            cases: self.cases,
            tolerance: self.tolerance,
            worst_slack,
            witness,
        }
    }
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(label))
}

fn witness(group: &FiniteAbelianGroup, weight: Option<&str>, s: Option<f64>, case: usize) -> Witness {
    Witness {
        group: group.descriptor(),
        weight: weight.map(str::to_string),
        s,
        case,
        detail: None,
        values: None,
    }
}

/// Cycles through uniform noise, spectra with random power-law decay,
/// translated Dirac masses and single characters.
pub fn sample_signal(profile: &WeightProfile, case: usize, rng: &mut ChaCha8Rng) -> Signal {
    let g = profile.group();
    let n = g.order();
    match case % 4 {
        0 => random_signal(g, rng),
        1 => {
            let t: f64 = rng.gen_range(0.0..3.0);
            let values = profile
                .gamma()
                .iter()
                .map(|gm| {
                    let amp = (1.0 + gm * gm).powf(-t);
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp
                })
                .collect();
            idft(&Spectrum::new(g.clone(), values).expect("finite")).sampled()
        }
        2 => {
            let mut values = vec![Complex64::new(0.0, 0.0); n];
            values[rng.gen_range(0..n)] = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            Signal::new(g.clone(), values).expect("finite")
        }
        _ => {
            let mut values = vec![Complex64::new(0.0, 0.0); n];
            values[rng.gen_range(0..n)] = Complex64::new(1.0, 0.0);
            idft(&Spectrum::new(g.clone(), values).expect("finite")).sampled()
        }
    }
}

struct Config {
    group: GroupRef,
    weight: String,
    profile: WeightProfile,
}

fn configurations(cfg: &CheckConfig) -> Result<(Vec<GroupRef>, Vec<Config>)> {
    let mut groups = Vec::new();
    let mut confs = Vec::new();
    for desc in &cfg.groups {
        let g: GroupRef = Arc::new(FiniteAbelianGroup::parse(desc)?);
        for wname in &cfg.weights {
            let w = Weight::from_name(wname)?;
            // weights restricted to some groups (pruefer) are skipped elsewhere
            if let Ok(profile) = w.profile(&g) {
                confs.push(Config {
                    group: g.clone(),
                    weight: wname.clone(),
                    profile,
                });
            }
        }
        groups.push(g);
    }
    Ok((groups, confs))
}

pub fn run_checks(cfg: &CheckConfig) -> Result<CheckSuiteResult> {
    if cfg.samples == 0 {
        return Err(crate::Error::InvalidParameter("samples must be >= 1".into()));
    }
    let s_grid: Vec<SobolevParams> = cfg
        .s_grid
        .iter()
        .map(|&s| SobolevParams::new(s))
        .collect::<Result<_>>()?;
    let op = OperatorParams::new(cfg.c)?;
    let (groups, confs) = configurations(cfg)?;
    let mut properties = Vec::new();
    let want = |s: Suite| cfg.suite == Suite::All || cfg.suite == s;
    if want(Suite::Transform) {
        properties.extend(transform_suite(cfg, &groups));
    }
    if want(Suite::Sobolev) {
        properties.extend(sobolev_suite(cfg, &confs, &s_grid)?);
        properties.push(subadditivity(&confs));
    }
    if want(Suite::Stringop) {
        properties.extend(stringop_suite(cfg, &confs, &s_grid, op)?);
        properties.push(torus_condition()?);
    }
    Ok(CheckSuiteResult {
        seed: cfg.seed,
        samples: cfg.samples,
        passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

const TRANSFORM_TOL: f64 = 1e-10;

fn transform_suite(cfg: &CheckConfig, groups: &[GroupRef]) -> Vec<PropertyResult> {
    let mut oracle = Tracker::new("transform.fast-matches-naive", TRANSFORM_TOL);
    let mut inversion = Tracker::new("transform.inversion", TRANSFORM_TOL);
    let mut plancherel = Tracker::new("transform.plancherel", TRANSFORM_TOL);
    let mut convolution = Tracker::new("transform.convolution", TRANSFORM_TOL);
    for g in groups {
        let mut rng = stream(cfg.seed, &format!("transform/{}", g.descriptor()));
        for case in 0..cfg.samples {
            let f = random_signal(g, &mut rng);
            let h = random_signal(g, &mut rng);
            let w = || (witness(g, None, None, case), Some(f.values().to_vec()));
            let fast = dft_fast(&f);
            oracle.record(-relative_l2_error(fast.values(), dft_naive(&f).values()), w);
            let back = idft(&fast).sampled();
            inversion.record(-relative_l2_error(back.values(), f.values()), w);
            let l2 = lp_norm(&f, 2.0).expect("p = 2");
            plancherel.record(-(l2 - l2_norm_counting(fast.values())).abs() / l2, w);
            let lhs = dft_fast(&pointwise_mul(&f, &h).expect("same group"));
            let rhs = convolve_dual(&fast, &dft_fast(&h)).expect("same group");
            convolution.record(-relative_l2_error(lhs.values(), rhs.values()), w);
        }
    }
    vec![oracle.finish(), inversion.finish(), plancherel.finish(), convolution.finish()]
}

const INEQ_TOL: f64 = 1e-10;

fn sobolev_suite(cfg: &CheckConfig, confs: &[Config], s_grid: &[SobolevParams]) -> Result<Vec<PropertyResult>> {
    let mut prop1 = Tracker::new("sobolev.l2-below-hs", 1e-12);
    let mut sup = Tracker::new("sobolev.sup-embedding", INEQ_TOL);
    let mut lalpha = Tracker::new("sobolev.lalpha-embedding", INEQ_TOL);
    let mut algebra = Tracker::new("sobolev.algebra", INEQ_TOL);
    let mut translation = Tracker::new("sobolev.translation-modulus", INEQ_TOL);
    let mut monotone = Tracker::new("sobolev.constants-monotone-in-s", 0.0);

    for conf in confs {
        let (g, wname, profile) = (&conf.group, conf.weight.as_str(), &conf.profile);
        for &p in s_grid {
            let s = p.s();
            let label = format!("sobolev/{}/{wname}/{s}", g.descriptor());
            let mut rng = stream(cfg.seed, &label);
            let c_sup = profile.embedding_constant_sup(p) * if cfg.inject_bug { 0.5 } else { 1.0 };
            let d = profile.algebra_constant(p);
            let alphas = [s + 0.5, 2.0 * s + 1.0, 4.0];
            let embeds: Vec<_> = alphas
                .iter()
                .map(|&a| profile.embedding_constant_lalpha(p, a))
                .collect::<Result<_>>()?;
            for case in 0..cfg.samples {
                let f = sample_signal(profile, case, &mut rng);
                let w = || (witness(g, Some(wname), Some(s), case), Some(f.values().to_vec()));
                let hs = profile.sobolev_norm(&f, p)?;
                prop1.record(hs - lp_norm(&f, 2.0)?, w);
                sup.record(c_sup * hs - lp_norm(&f, f64::INFINITY)?, w);
                for (a, e) in alphas.iter().zip(&embeds) {
                    let slack = e.constant * hs - lp_norm(&f, e.alpha_star)?;
                    lalpha.record(slack, || {
                        let (mut wt, v) = w();
                        wt.detail = Some(format!("alpha={a}"));
                        (wt, v)
                    });
                }
                let other = sample_signal(profile, case + 1, &mut rng);
                let prod = pointwise_mul(&f, &other)?;
                let rhs = d * hs * profile.sobolev_norm(&other, p)?;
                algebra.record(rhs - profile.sobolev_norm(&prod, p)?, || {
                    let (mut wt, _) = w();
                    wt.detail = Some("pair".into());
                    let mut v = f.values().to_vec();
                    v.extend_from_slice(other.values());
                    (wt, Some(v))
                });
            }
            if g.order() <= 64 {
                translation_cases(cfg, conf, p, &mut translation)?;
            }
        }
        monotonicity(conf, &mut monotone)?;
    }
    Ok(vec![
        prop1.finish(),
        sup.finish(),
        lalpha.finish(),
        algebra.finish(),
        translation.finish(),
        monotone.finish(),
    ])
}

/// `int |f(x + h) - f(x)|^2 <= C(h) ||f||_{H^s}^2` for every shift `h`.
fn translation_cases(cfg: &CheckConfig, conf: &Config, p: SobolevParams, t: &mut Tracker) -> Result<()> {
    let g = &conf.group;
    let n = g.order();
    let label = format!("translation/{}/{}/{}", g.descriptor(), conf.weight, p.s());
    let mut rng = stream(cfg.seed, &label);
    let moduli: Vec<f64> = (0..n)
        .map(|h| conf.profile.translation_modulus(p, &g.element_at(h)))
        .collect::<Result<_>>()?;
    for case in 0..cfg.translation_samples {
        let f = sample_signal(&conf.profile, case, &mut rng);
        let hs2 = conf.profile.sobolev_norm(&f, p)?.powi(2);
        let v = f.values();
        for (h, &ch) in moduli.iter().enumerate() {
            let diffs: Vec<f64> = (0..n).map(|x| (v[g.add_index(x, h)] - v[x]).norm_sqr()).collect();
            let lhs = crate::sum::pairwise_sum(&diffs) * g.haar_weight();
            t.record(ch * hs2 - lhs, || {
                let mut wt = witness(g, Some(&conf.weight), Some(p.s()), case);
                wt.detail = Some(format!("h={h}"));
                (wt, Some(v.to_vec()))
            });
        }
    }
    Ok(())
}

/// `C(gamma, s)` and every `C(h)` are nonincreasing along `s = 0, 0.5, 1, 2, 4`.
fn monotonicity(conf: &Config, t: &mut Tracker) -> Result<()> {
    let g = &conf.group;
    let ladder: Vec<SobolevParams> = [0.0, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&s| SobolevParams::new(s))
        .collect::<Result<_>>()?;
    for pair in ladder.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let w = |detail: String| {
            move || {
                let mut wt = witness(g, Some(&conf.weight), Some(hi.s()), 0);
                wt.detail = Some(detail);
                (wt, None)
            }
        };
        t.record(
            conf.profile.embedding_constant_sup(lo) - conf.profile.embedding_constant_sup(hi),
            w("C(gamma,s)".into()),
        );
        if g.order() <= 64 {
            for h in 0..g.order() {
                let e = g.element_at(h);
                let slack = conf.profile.translation_modulus(lo, &e)? - conf.profile.translation_modulus(hi, &e)?;
                t.record(slack, w(format!("C(h), h={h}")));
            }
        }
    }
    Ok(())
}

fn subadditivity(confs: &[Config]) -> PropertyResult {
    let mut t = Tracker::new("weight.subadditivity", 1e-12);
    for conf in confs {
        let r = conf.profile.check_subadditivity();
        let slack = if r.ok {
            0.0
        } else if r.degenerate_violation.is_some() {
            f64::NEG_INFINITY
        } else {
            conf.profile.c_gamma() - r.worst_ratio
        };
        t.record(slack, || {
            let mut wt = witness(&conf.group, Some(&conf.weight), None, 0);
            wt.detail = Some(format!("worst_ratio={}", r.worst_ratio));
            (wt, None)
        });
    }
    t.finish()
}

fn stringop_suite(
    cfg: &CheckConfig,
    confs: &[Config],
    s_grid: &[SobolevParams],
    op: OperatorParams,
) -> Result<Vec<PropertyResult>> {
    let mut isometry = Tracker::new("stringop.isometry", 1e-10);
    let mut round_trip = Tracker::new("stringop.round-trip", 1e-10);
    let mut chain = Tracker::new("stringop.embedding-chain", INEQ_TOL);
    let mut continuity = Tracker::new("stringop.solution-continuity", INEQ_TOL);
    for conf in confs {
        let g = &conf.group;
        let lc = StringOperator::new(conf.profile.clone(), op);
        if lc.multiplier().overflow_count() > 0 {
            // the isometry is not testable in double precision there
            continue;
        }
        let mut rng = stream(cfg.seed, &format!("stringop/{}/{}", g.descriptor(), conf.weight));
        let ks: Vec<(SobolevParams, f64, f64)> = s_grid
            .iter()
            .map(|&p| (p, lc.sobolev_embedding_constant(p), conf.profile.embedding_constant_sup(p)))
            .collect();
        for case in 0..cfg.samples {
            let gsig = sample_signal(&conf.profile, case, &mut rng);
            let w = || (witness(g, Some(&conf.weight), None, case), Some(gsig.values().to_vec()));
            let l2 = lp_norm(&gsig, 2.0)?;
            let u = lc.solve(&gsig)?;
            let hc = lc.hcinf_norm(&u)?;
            isometry.record(-(hc - l2).abs() / l2, w);
            let back = lc.apply(&u)?;
            round_trip.record(-relative_l2_error(back.values(), gsig.values()), w);
            let sup_u = lp_norm(&u, f64::INFINITY)?;
            for &(p, k, c) in &ks {
                let with_s = || {
                    let (mut wt, v) = w();
                    wt.s = Some(p.s());
                    (wt, v)
                };
                chain.record(k * hc - conf.profile.sobolev_norm(&u, p)?, with_s);
                continuity.record(c * k * l2 - sup_u, with_s);
            }
        }
    }
    Ok(vec![isometry.finish(), round_trip.finish(), chain.finish(), continuity.finish()])
}

/// On `Z_N` with `sym-euclid` and `s = 1`, every shift `m` satisfies
/// `sup_xi |xi(m) - 1| / (1 + gamma^2) <= 2 pi min(m, N - m) / N`.
fn torus_condition() -> Result<PropertyResult> {
    let mut t = Tracker::new("stringop.torus-condition", INEQ_TOL);
    let p = SobolevParams::new(1.0)?;
    for n in TORUS_SIZES {
        let g: GroupRef = Arc::new(FiniteAbelianGroup::cyclic(n)?);
        let profile = Weight::sym_euclid().profile(&g)?;
        for row in profile.compactness_profile(p) {
            let bound = row.torus_bound.expect("sym-euclid with s = 1");
            t.record(bound - row.sup, || {
                let mut wt = witness(&g, Some("sym-euclid"), Some(1.0), row.multiple);
                wt.detail = Some(format!("m={}", row.multiple));
                (wt, None)
            });
        }
    }
    Ok(t.finish())
}
