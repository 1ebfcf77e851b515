//! Frozen values, each computed by an oracle that shares no code with the
//! library: hand sums, closed forms, or a from-scratch transform.

use std::f64::consts::{E, PI, TAU};
use std::sync::Arc;

use abelsob::nonlinear::{low_frequency_forcing, picard_step, size_ball, solve_nonlinear_op, verify_solution_op};
use abelsob::sampling::{random_band_limited, random_real_signal, random_signal};
use abelsob::sobolev::{
    algebra_constant, check_subadditivity, embedding_constant_lalpha, embedding_constant_sup, lp_norm, sobolev_norm,
};
use abelsob::spectral::{convolve_dual, dft_fast, dft_naive, idft, pointwise_mul, relative_l2_error, translate};
use abelsob::stringop::{build_multiplier, hcinf_norm};
use abelsob::{
    FiniteAbelianGroup, GroupRef, Nonlinearity, OperatorParams, Signal, SobolevParams, SolverConfig, Spectrum,
    StringOperator, Weight,
};
use approx::assert_relative_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grp(f: &[usize]) -> GroupRef {
    Arc::new(FiniteAbelianGroup::new(f.to_vec()).unwrap())
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20261016)
}

fn sp(s: f64) -> SobolevParams {
    SobolevParams::new(s).unwrap()
}

/// Mixed-radix digits, first factor most significant.
fn digits(factors: &[usize], mut i: usize) -> Vec<usize> {
    let mut d = vec![0; factors.len()];
    for j in (0..factors.len()).rev() {
        d[j] = i % factors[j];
        i /= factors[j];
    }
    d
}

/// Textbook transform: `(1/N) sum_x conj(xi(x)) f(x)`.
fn textbook_dft(factors: &[usize], f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|k| {
            let kd = digits(factors, k);
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, fx) in f.iter().enumerate() {
                let xd = digits(factors, x);
                let phase: f64 = factors.iter().enumerate().map(|(j, &m)| (kd[j] * xd[j]) as f64 / m as f64).sum();
                acc += fx * Complex64::from_polar(1.0, -TAU * phase);
            }
            acc / n as f64
        })
        .collect()
}

fn signal_with_spectrum(g: &GroupRef, coeffs: &[Complex64]) -> Signal {
    idft(&Spectrum::new(g.clone(), coeffs.to_vec()).unwrap())
}

#[test]
fn dirac_on_z4_has_flat_spectrum() {
    let g = grp(&[4]);
    let f = Signal::new(g, vec![1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()]).unwrap();
    for v in dft_fast(&f).values() {
        assert_relative_eq!(v.re, 0.25, epsilon = 1e-16);
        assert!(v.im.abs() < 1e-16);
    }
}

#[test]
fn transforms_match_textbook_sum() {
    let mut r = rng();
    for factors in [&[2, 2][..], &[12, 5], &[16], &[2, 3, 5], &[7, 7]] {
        let g = grp(factors);
        let f = random_signal(&g, &mut r);
        let want = textbook_dft(factors, f.values());
        assert!(relative_l2_error(dft_fast(&f).values(), &want) < 1e-12, "{factors:?}");
        assert!(relative_l2_error(dft_naive(&f).values(), &want) < 1e-12, "{factors:?}");
    }
}

#[test]
fn inverse_returns_stored_input_on_z16() {
    let g = grp(&[16]);
    let f = random_signal(&g, &mut rng());
    let back = idft(&dft_naive(&f)).sampled();
    assert!(relative_l2_error(back.values(), f.values()) < 1e-12);
}

#[test]
fn convolution_theorem_on_z8() {
    let g = grp(&[8]);
    let mut r = rng();
    let (f, h) = (random_signal(&g, &mut r), random_signal(&g, &mut r));
    let lhs = convolve_dual(&dft_naive(&f), &dft_naive(&h)).unwrap();
    // dual convolution by hand
    let (a, b) = (textbook_dft(&[8], f.values()), textbook_dft(&[8], h.values()));
    let conv: Vec<Complex64> = (0..8).map(|k| (0..8).map(|j| a[j] * b[(k + 8 - j) % 8]).sum()).collect();
    assert!(relative_l2_error(lhs.values(), &conv) < 1e-12);
    let prod = dft_naive(&pointwise_mul(&f, &h).unwrap());
    assert!(relative_l2_error(prod.values(), &conv) < 1e-12);
}

#[test]
fn translation_modulates_on_z6() {
    let g = grp(&[6]);
    let f = random_signal(&g, &mut rng());
    for h in 0..6 {
        let shifted = translate(&f, &g.element_at(h)).unwrap();
        // (tau_h f)(x) = f(x + h), written out by hand
        let by_hand: Vec<Complex64> = (0..6).map(|x| f.values()[(x + h) % 6]).collect();
        let fhat = textbook_dft(&[6], &by_hand);
        assert!(relative_l2_error(dft_fast(&shifted).values(), &fhat) < 1e-12);
        let orig = textbook_dft(&[6], f.values());
        for k in 0..6 {
            let modulated = orig[k] * Complex64::from_polar(1.0, TAU * (k * h) as f64 / 6.0);
            assert!((fhat[k] - modulated).norm() < 1e-14);
        }
    }
}

#[test]
fn subadditivity_by_scan() {
    let rep = check_subadditivity(&grp(&[8]), &Weight::sym_euclid()).unwrap();
    assert!(rep.ok && rep.exhaustive);
    let rep = check_subadditivity(&grp(&[2, 2, 2]), &Weight::hamming()).unwrap();
    assert!(rep.ok && rep.exhaustive);
    // hamming weight of xor never exceeds the sum of weights
    for a in 0u32..8 {
        for b in 0u32..8 {
            assert!((a ^ b).count_ones() <= a.count_ones() + b.count_ones());
        }
    }
}

#[test]
fn sobolev_norm_on_z4() {
    let g = grp(&[4]);
    let f = signal_with_spectrum(&g, &[0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
    // gamma = (0, 1, 2, 1), so the norm is (1 + 1)^{1/2}
    assert_relative_eq!(sobolev_norm(&f, &Weight::sym_euclid(), sp(1.0)).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn lp_two_is_plancherel() {
    let g = grp(&[5, 3]);
    let f = random_signal(&g, &mut rng());
    let spectral: f64 = textbook_dft(&[5, 3], f.values()).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    assert_relative_eq!(lp_norm(&f, 2.0).unwrap(), spectral, max_relative = 1e-12);
}

#[test]
fn embedding_constants_on_z4() {
    let g = grp(&[4]);
    let w = Weight::sym_euclid();
    let c = embedding_constant_sup(&g, &w, sp(1.0)).unwrap();
    assert_relative_eq!(c, (1.0 + 0.5 + 0.2 + 0.5f64).sqrt(), epsilon = 1e-15);
    assert_relative_eq!(c, 2.2f64.sqrt(), epsilon = 1e-15);
    let la = embedding_constant_lalpha(&g, &w, sp(1.0), 2.0).unwrap();
    assert_relative_eq!(la.constant, (1.0 + 0.25 + 0.04 + 0.25f64).powf(0.25), epsilon = 1e-15);
    assert_relative_eq!(la.alpha_star, 4.0);
}

#[test]
fn algebra_constant_zero_weight_z2() {
    let d = algebra_constant(&grp(&[2]), &Weight::zero(), sp(1.0)).unwrap();
    assert_relative_eq!(d, 4.0, epsilon = 1e-14);
}

#[test]
fn algebra_fuzz_on_z16() {
    let g = grp(&[16]);
    let w = Weight::sym_euclid();
    let p = sp(2.0);
    let d = algebra_constant(&g, &w, p).unwrap();
    let mut r = rng();
    for _ in 0..1000 {
        let (f, h) = (random_signal(&g, &mut r), random_signal(&g, &mut r));
        let lhs = sobolev_norm(&pointwise_mul(&f, &h).unwrap(), &w, p).unwrap();
        assert!(lhs <= d * sobolev_norm(&f, &w, p).unwrap() * sobolev_norm(&h, &w, p).unwrap());
    }
}

#[test]
fn torus_shift_on_z64() {
    let g = grp(&[64]);
    let prof = Weight::sym_euclid().profile(&g).unwrap();
    let row = &prof.compactness_profile(sp(1.0))[1];
    assert_eq!(row.multiple, 1);
    // exhaustive max over the characters, by hand
    let sup = (0..64)
        .map(|k| {
            let kk = k.min(64 - k) as f64;
            (Complex64::from_polar(1.0, TAU * k as f64 / 64.0) - 1.0).norm() / (1.0 + kk * kk)
        })
        .fold(0.0, f64::max);
    assert_relative_eq!(row.sup, sup, max_relative = 1e-12);
    assert!(row.sup <= 2.0 * PI / 64.0);
    assert_eq!(row.within_bound, Some(true));
    // translation modulus at h = 1 stays under the squared torus angle
    let ch = prof.translation_modulus(sp(1.0), &g.element_at(1)).unwrap();
    assert!(ch <= (2.0 * PI / 64.0).powi(2));
}

#[test]
fn scale_monotonicity_on_z32() {
    let g = grp(&[32]);
    let w = Weight::sym_euclid();
    let mut r = rng();
    for _ in 0..100 {
        let f = random_signal(&g, &mut r);
        assert!(sobolev_norm(&f, &w, sp(1.0)).unwrap() <= sobolev_norm(&f, &w, sp(2.0)).unwrap());
        assert!(abelsob::sobolev::verify_scale(&f, &w, 2.0, 1.0).unwrap());
    }
}

#[test]
fn multiplier_in_log_space() {
    let g = grp(&[61]);
    let m = build_multiplier(&g, &Weight::sym_euclid(), OperatorParams::new(1.0).unwrap()).unwrap();
    assert_relative_eq!(m.values()[1], 1.0 + E, epsilon = 1e-14);
    // gamma = 30 at k = 30: log(1 + 900 e^900) = 900 + log 900 to double precision
    let lm = m.log_values()[30];
    assert!(lm.is_finite() && !m.is_representable(30));
    assert_relative_eq!(lm, 900.0 + 2.0 * 30f64.ln(), max_relative = 1e-15);
}

#[test]
fn hcinf_single_terms() {
    let g = grp(&[8]);
    let w = Weight::sym_euclid();
    let op = OperatorParams::new(1.0).unwrap();
    let one = Signal::new(g.clone(), vec![1.0.into(); 8]).unwrap();
    assert_relative_eq!(hcinf_norm(&one, &w, op).unwrap(), 1.0, epsilon = 1e-15);
    let mut c = vec![Complex64::new(0.0, 0.0); 8];
    c[1] = 1.0.into();
    assert_relative_eq!(hcinf_norm(&signal_with_spectrum(&g, &c), &w, op).unwrap(), 1.0 + E, epsilon = 1e-14);
}

#[test]
fn hcinf_dominates_every_sobolev_norm() {
    let g = grp(&[32]);
    let w = Weight::sym_euclid();
    let op = OperatorParams::new(0.5).unwrap();
    let mut r = rng();
    for _ in 0..50 {
        // modes with |k| <= 4
        let f = random_band_limited(&g, |k| k.min(32 - k) <= 4, &mut r);
        let hc = hcinf_norm(&f, &w, op).unwrap();
        for s in [0.0, 0.5, 1.0, 2.0, 4.0] {
            assert!(hc >= sobolev_norm(&f, &w, sp(s)).unwrap());
        }
    }
}

#[test]
fn linear_solve_round_trip_and_isometry() {
    let g = grp(&[64]);
    let w = Weight::sym_euclid();
    let lc = StringOperator::from_weight(&g, &w, OperatorParams::new(0.5).unwrap()).unwrap();
    let mut r = rng();
    for _ in 0..20 {
        let rhs = random_signal(&g, &mut r);
        let u = lc.solve(&rhs).unwrap();
        assert!(relative_l2_error(lc.apply(&u).unwrap().values(), rhs.values()) < 1e-10);
        let l2 = lp_norm(&rhs, 2.0).unwrap();
        assert!((lc.hcinf_norm(&u).unwrap() - l2).abs() <= 1e-10 * l2);
    }
}

/// Substitutes the solver's output into an independently coded `L_c`:
/// `-(1 + gamma^2 e^{c gamma^2}) phi_hat`, with no log-space tricks.
#[test]
fn quadratic_reference_problem() {
    let g = grp(&[64]);
    let w = Weight::sym_euclid();
    let lc = StringOperator::from_weight(&g, &w, OperatorParams::new(1.0).unwrap()).unwrap();
    let h = low_frequency_forcing(&g, 0.01).unwrap();
    let nl = Nonlinearity::forced_power(2, 0.1, &h).unwrap();
    let (phi, rep) = solve_nonlinear_op(&nl, &lc, &SolverConfig::default()).unwrap();
    assert!(rep.converged && rep.iterations < 50 && rep.final_residual_eq < 1e-10);

    let phi_hat = textbook_dft(&[64], phi.values());
    let lhs: Vec<Complex64> = (0..64)
        .map(|k| {
            let gm = k.min(64 - k) as f64;
            let m = 1.0 + gm * gm * (gm * gm).exp();
            if phi_hat[k].norm() == 0.0 { Complex64::new(0.0, 0.0) } else { -m * phi_hat[k] }
        })
        .collect();
    // V(phi) = U(phi) - phi = 0.1 phi^2 + h
    let v: Vec<Complex64> =
        phi.values().iter().zip(h.values()).map(|(p, hx)| Complex64::new(0.1 * p.re * p.re + hx.re, 0.0)).collect();
    let v_hat = textbook_dft(&[64], &v);
    // sampled values carry ~1e-19 noise, which m amplifies past |k| = 2
    let err: f64 = (0..64)
        .filter(|&k| k.min(64 - k) <= 2)
        .map(|k| (lhs[k] - v_hat[k]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-12, "{err}");

    let step = picard_step(&phi, &nl, &lc).unwrap();
    assert!(lp_norm(&step.sub(&phi).unwrap(), 2.0).unwrap() <= 1e-10);
    let ver = verify_solution_op(&phi, &nl, &lc, sp(1.0)).unwrap();
    assert!(ver.passed);
}

#[test]
fn ball_sizing_reference_values() {
    let g = grp(&[64]);
    let lc = StringOperator::from_weight(&g, &Weight::sym_euclid(), OperatorParams::new(1.0).unwrap()).unwrap();
    let nl = Nonlinearity::forced_power(2, 0.1, &low_frequency_forcing(&g, 0.01).unwrap()).unwrap();
    let b = size_ball(&nl, &lc);
    assert_eq!(b.delta, 1.5);
    assert_relative_eq!(b.s, 1.125);
    assert_relative_eq!(b.epsilon.unwrap(), 0.01843, max_relative = 1e-3);
}

#[test]
fn growth_sweep_accepts_quadratic_and_flags_bad_alpha() {
    let g = grp(&[8]);
    let lam = 0.3;
    let nl = Nonlinearity::power(&g, 2, lam).unwrap();
    let grid: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.5).collect();
    assert!(nl.check_growth_conditions(&grid).unwrap().passes);

    // a cubic declared with alpha = 1.5 loses for large |y|
    let zero = Signal::zeros(g.clone());
    let ones = Signal::new(g.clone(), vec![1.0.into(); 8]).unwrap();
    let cubic = Nonlinearity::new(
        "cubic",
        Arc::new(|_, y| y + y * y * y),
        Arc::new(|_, y| 1.0 + 3.0 * y * y),
        abelsob::nonlinear::Growth { alpha: 1.5, beta: 0.5, c_growth: 1.0 },
        &zero,
        &ones,
    )
    .unwrap();
    let rep = cubic.check_growth_conditions(&grid).unwrap();
    assert!(!rep.passes);
    assert!(rep.value_witness.unwrap().y.abs() > 1.0);
}

#[test]
fn affine_nonlinearity_is_the_linear_solve() {
    let g = grp(&[64]);
    let w = Weight::sym_euclid();
    let op = OperatorParams::new(0.5).unwrap();
    let lc = StringOperator::from_weight(&g, &w, op).unwrap();
    let h = random_real_signal(&g, &mut rng());
    let (phi, rep) = solve_nonlinear_op(&Nonlinearity::affine(&h).unwrap(), &lc, &SolverConfig::default()).unwrap();
    assert!(rep.final_residual_eq <= 1e-12);
    let lin = abelsob::stringop::solve_linear(&h, &w, op).unwrap();
    assert!(lp_norm(&phi.sub(&lin).unwrap(), 2.0).unwrap() < 1e-15);
}
