//! Acceptance criteria, one line each. Runs as a plain binary so the
//! verdicts are printed even when everything passes.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use abelsob::checks::{run_checks, CheckConfig};
use abelsob::nonlinear::{low_frequency_forcing, solve_nonlinear_op, verify_solution_op};
use abelsob::sampling::{random_real_signal, random_signal};
use abelsob::sobolev::lp_norm;
use abelsob::spectral::{dft_fast, dft_naive, idft, l2_norm_counting, relative_l2_error};
use abelsob::stringop::solve_linear;
use abelsob::{FiniteAbelianGroup, GroupRef, Nonlinearity, OperatorParams, Signal, SobolevParams, SolverConfig, StringOperator, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ZOO: [&str; 10] = ["Z2", "Z3", "Z4", "Z7", "Z12", "Z2xZ2", "Z2xZ3xZ5", "Z8xZ8", "Z64", "Z2^6"];
const S_GRID: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn group(desc: &str) -> GroupRef {
    Arc::new(FiniteAbelianGroup::parse(desc).unwrap())
}

fn weights() -> [Weight; 2] {
    [Weight::sym_euclid(), Weight::hamming()]
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// 1. fast = naive, inversion and Plancherel on the zoo, under 10 s.
fn transforms() -> Verdict {
    let t = Instant::now();
    let (mut fast, mut inv, mut planch) = (0f64, 0f64, 0f64);
    let mut r = rng(1);
    for desc in ZOO {
        let g = group(desc);
        for _ in 0..100 {
            let f = random_signal(&g, &mut r);
            let spec = dft_fast(&f);
            fast = fast.max(relative_l2_error(spec.values(), dft_naive(&f).values()));
            inv = inv.max(relative_l2_error(idft(&spec).sampled().values(), f.values()));
            let l2 = lp_norm(&f, 2.0).unwrap();
            planch = planch.max((l2 - l2_norm_counting(spec.values())).abs() / l2);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        fast <= 1e-10 && inv <= 1e-10 && planch <= 1e-10 && secs < 10.0,
        format!("fast/naive {fast:.1e}, inversion {inv:.1e}, Plancherel {planch:.1e}, {secs:.2} s"),
    )
}

/// Signals used for the inequality criteria: uniform noise alternating with
/// spectra of random power-law decay, so both rough and smooth inputs occur.
fn fuzz_signal(g: &GroupRef, gamma: &[f64], k: usize, r: &mut ChaCha8Rng) -> Signal {
    use rand::Rng;
    if k % 2 == 0 {
        return random_signal(g, r);
    }
    let t: f64 = r.gen_range(0.0..3.0);
    let values = gamma
        .iter()
        .map(|gm| num_complex::Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * (1.0 + gm * gm).powf(-t))
        .collect();
    idft(&abelsob::Spectrum::new(g.clone(), values).unwrap()).sampled()
}

/// 2. L2 below H^s, the sup embedding and the L^{alpha*} embedding,
/// 1000 signals per configuration, under 60 s.
fn embeddings() -> Verdict {
    let t = Instant::now();
    let mut worst = f64::INFINITY;
    let mut configs = 0;
    let mut r = rng(2);
    for desc in ZOO {
        let g = group(desc);
        for w in weights() {
            let prof = w.profile(&g).unwrap();
            for s in S_GRID {
                configs += 1;
                let p = SobolevParams::new(s).unwrap();
                let c = prof.embedding_constant_sup(p);
                let la: Vec<_> = [s + 0.5, 2.0 * s + 1.0, 4.0]
                    .iter()
                    .map(|&a| prof.embedding_constant_lalpha(p, a).unwrap())
                    .collect();
                for k in 0..1000 {
                    let f = fuzz_signal(&g, prof.gamma(), k, &mut r);
                    let hs = prof.sobolev_norm(&f, p).unwrap();
                    worst = worst.min(hs - lp_norm(&f, 2.0).unwrap());
                    worst = worst.min(c * hs - lp_norm(&f, f64::INFINITY).unwrap());
                    for e in &la {
                        worst = worst.min(e.constant * hs - lp_norm(&f, e.alpha_star).unwrap());
                    }
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        worst >= -1e-10 && secs < 60.0,
        format!("{configs} configurations x 1000 signals, worst slack {worst:.2e}, {secs:.2} s"),
    )
}

/// 3. `||fg||_{H^s} <= D ||f|| ||g||`, 1000 pairs per configuration.
fn algebra() -> Verdict {
    let t = Instant::now();
    let mut violations = 0;
    let mut worst_ratio = 0f64;
    let mut r = rng(3);
    for desc in ZOO {
        let g = group(desc);
        for w in weights() {
            let prof = w.profile(&g).unwrap();
            for s in S_GRID {
                let p = SobolevParams::new(s).unwrap();
                let d = prof.algebra_constant(p);
                for k in 0..1000 {
                    let f = fuzz_signal(&g, prof.gamma(), k, &mut r);
                    let h = fuzz_signal(&g, prof.gamma(), k + 1, &mut r);
                    let lhs = prof.sobolev_norm(&abelsob::spectral::pointwise_mul(&f, &h).unwrap(), p).unwrap();
                    let rhs = d * prof.sobolev_norm(&f, p).unwrap() * prof.sobolev_norm(&h, p).unwrap();
                    if lhs > rhs {
                        violations += 1;
                    }
                    worst_ratio = worst_ratio.max(lhs / rhs);
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations, largest lhs/rhs {worst_ratio:.3}, {:.2} s", t.elapsed().as_secs_f64()),
    )
}

/// 4. Translation bound for every shift in groups of order <= 64.
fn translation() -> Verdict {
    let t = Instant::now();
    let mut violations = 0usize;
    let mut checks = 0usize;
    let mut r = rng(4);
    for desc in ZOO.iter().filter(|d| group(d).order() <= 64) {
        let g = group(desc);
        let n = g.order();
        for w in weights() {
            let prof = w.profile(&g).unwrap();
            for s in S_GRID {
                let p = SobolevParams::new(s).unwrap();
                let fs: Vec<Signal> = (0..100).map(|k| fuzz_signal(&g, prof.gamma(), k, &mut r)).collect();
                let norms: Vec<f64> = fs.iter().map(|f| prof.sobolev_norm(f, p).unwrap().powi(2)).collect();
                for h in 0..n {
                    let ch = prof.translation_modulus(p, &g.element_at(h)).unwrap();
                    for (f, hs2) in fs.iter().zip(&norms) {
                        let shifted = abelsob::spectral::translate(f, &g.element_at(h)).unwrap();
                        let lhs = lp_norm(&shifted.sub(f).unwrap(), 2.0).unwrap().powi(2);
                        checks += 1;
                        if lhs > ch * hs2 + 1e-10 {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(
        violations == 0,
        format!("{checks} (shift, signal) pairs, {violations} violations, {:.2} s", t.elapsed().as_secs_f64()),
    )
}

/// 5. Discrete torus condition on Z_16, Z_64, Z_256.
fn torus() -> Verdict {
    let p = SobolevParams::new(1.0).unwrap();
    let mut violations = 0;
    let mut rows = 0;
    let mut tightest = f64::INFINITY;
    for n in [16, 64, 256] {
        let g: GroupRef = Arc::new(FiniteAbelianGroup::cyclic(n).unwrap());
        for row in Weight::sym_euclid().profile(&g).unwrap().compactness_profile(p) {
            let bound = 2.0 * std::f64::consts::PI * row.multiple.min(n - row.multiple) as f64 / n as f64;
            rows += 1;
            if row.sup > bound || row.within_bound != Some(true) {
                violations += 1;
            }
            if row.multiple != 0 {
                tightest = tightest.min(bound - row.sup);
            }
        }
    }
    verdict(violations == 0, format!("{rows} shifts, {violations} violations, smallest margin {tightest:.3e}"))
}

/// 6. Isometry and round trip of the linear solve, c = 0.5.
fn isometry() -> Verdict {
    let op = OperatorParams::new(0.5).unwrap();
    let (mut iso, mut trip) = (0f64, 0f64);
    let mut r = rng(6);
    for desc in ["Z64", "Z2^6"] {
        let g = group(desc);
        for w in weights() {
            let lc = StringOperator::from_weight(&g, &w, op).unwrap();
            for _ in 0..1000 {
                let rhs = random_signal(&g, &mut r);
                let l2 = lp_norm(&rhs, 2.0).unwrap();
                let u = lc.solve(&rhs).unwrap();
                iso = iso.max((lc.hcinf_norm(&u).unwrap() - l2).abs() / l2);
                trip = trip.max(relative_l2_error(lc.apply(&u).unwrap().values(), rhs.values()));
            }
        }
    }
    verdict(iso <= 1e-10 && trip <= 1e-10, format!("isometry {iso:.1e}, round trip {trip:.1e}"))
}

/// 7. U = y + h is solved by the first step, residual <= 1e-12.
fn affine() -> Verdict {
    let g = group("Z64");
    let w = Weight::sym_euclid();
    let op = OperatorParams::new(0.5).unwrap();
    let lc = StringOperator::from_weight(&g, &w, op).unwrap();
    let (mut res, mut gap, mut landed) = (0f64, 0f64, true);
    let mut r = rng(7);
    for _ in 0..100 {
        let h = random_real_signal(&g, &mut r);
        let nl = Nonlinearity::affine(&h).unwrap();
        let (phi, rep) = solve_nonlinear_op(&nl, &lc, &SolverConfig::default()).unwrap();
        let lin = solve_linear(&h, &w, op).unwrap();
        res = res.max(rep.final_residual_eq);
        gap = gap.max(lp_norm(&phi.sub(&lin).unwrap(), 2.0).unwrap());
        // the step after the first one moves nothing
        landed &= rep.residual_history.len() == 2 && rep.residual_history[1] <= 1e-14;
    }
    verdict(
        res <= 1e-12 && landed,
        format!("max residual {res:.1e}, max distance to the linear solve {gap:.1e}, first step exact: {landed}"),
    )
}

fn quadratic(desc: &str, w: Weight) -> (bool, String) {
    let t = Instant::now();
    let g = group(desc);
    let h = low_frequency_forcing(&g, 0.01).unwrap();
    let nl = Nonlinearity::forced_power(2, 0.1, &h).unwrap();
    let lc = StringOperator::from_weight(&g, &w, OperatorParams::new(1.0).unwrap()).unwrap();
    let (phi, rep) = match solve_nonlinear_op(&nl, &lc, &SolverConfig::default()) {
        Ok(x) => x,
        Err(e) => return (false, format!("{desc}: {e}")),
    };
    let ver = verify_solution_op(&phi, &nl, &lc, SobolevParams::new(1.0).unwrap()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ok = rep.converged && rep.iterations <= 50 && ver.residual_eq < 1e-10 && ver.continuity_ok && secs < 5.0;
    (
        ok,
        format!(
            "{desc}/{}: {} iterations, residual {:.1e}, sup {:.3e} <= {:.3e}, {secs:.2} s",
            w.name(),
            rep.iterations,
            ver.residual_eq,
            ver.sup_norm,
            ver.continuity_constant * ver.sobolev_norm
        ),
    )
}

/// 8. Small-data quadratic on Z_64 / sym-euclid and Z_2^6 / hamming.
fn small_data() -> Verdict {
    let (a, da) = quadratic("Z64", Weight::sym_euclid());
    let (b, db) = quadratic("Z2^6", Weight::hamming());
    verdict(a && b, format!("{da}; {db}"))
}

/// 9. Low-frequency coefficients agree on Z_64, Z_128, Z_256.
fn refinement() -> Verdict {
    const K: i64 = 4;
    let mut coeffs = Vec::new();
    for n in [64usize, 128, 256] {
        let g: GroupRef = Arc::new(FiniteAbelianGroup::cyclic(n).unwrap());
        let h = low_frequency_forcing(&g, 0.01).unwrap();
        let nl = Nonlinearity::forced_power(2, 0.1, &h).unwrap();
        let lc = StringOperator::from_weight(&g, &Weight::sym_euclid(), OperatorParams::new(1.0).unwrap()).unwrap();
        let (phi, _) = match solve_nonlinear_op(&nl, &lc, &SolverConfig::default()) {
            Ok(x) => x,
            Err(e) => return verdict(false, format!("Z{n}: {e}")),
        };
        let spec = dft_fast(&phi.sampled());
        let low: Vec<_> = (-K..=K).map(|k| spec.values()[k.rem_euclid(n as i64) as usize]).collect();
        coeffs.push(low);
    }
    let mut worst = 0f64;
    for pair in coeffs.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            worst = worst.max((a - b).norm());
        }
    }
    verdict(worst <= 1e-6, format!("|k| <= {K}, largest coefficient difference {worst:.1e}"))
}

/// 10. The check suite is byte-identical across runs with one seed.
fn determinism() -> Verdict {
    let cfg = CheckConfig {
        seed: 7,
        ..CheckConfig::default()
    };
    let a = run_checks(&cfg).unwrap();
    let b = run_checks(&cfg).unwrap();
    let (ja, jb) = (a.to_json().unwrap(), b.to_json().unwrap());
    verdict(
        ja == jb && a.passed,
        format!("{} bytes, identical: {}, all properties pass: {}", ja.len(), ja == jb, a.passed),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("transform correctness", transforms),
        ("embedding inequalities", embeddings),
        ("Banach algebra", algebra),
        ("translation bound", translation),
        ("torus condition", torus),
        ("linear isometry", isometry),
        ("affine exactness", affine),
        ("small-data quadratic", small_data),
        ("refinement consistency", refinement),
        ("check determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("{} {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
