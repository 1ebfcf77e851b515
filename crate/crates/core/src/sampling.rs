//! Seeded random signals for fuzz suites and examples.

use num_complex::Complex64;
use rand::Rng;

use crate::spectral::{idft, GroupRef, Signal, Spectrum};

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_signal<R: Rng + ?Sized>(group: &GroupRef, rng: &mut R) -> Signal {
    let values = (0..group.order())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Signal::new(group.clone(), values).expect("finite by construction")
}

/// Real entries uniform in `[-1, 1)`.
pub fn random_real_signal<R: Rng + ?Sized>(group: &GroupRef, rng: &mut R) -> Signal {
    let values: Vec<f64> = (0..group.order()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Signal::from_real(group.clone(), &values).expect("finite by construction")
}

/// Random spectrum supported on the characters where `keep(index)` holds;
/// the returned signal carries that spectrum.
pub fn random_band_limited<R: Rng + ?Sized>(
    group: &GroupRef,
    keep: impl Fn(usize) -> bool,
    rng: &mut R,
) -> Signal {
    let values = (0..group.order())
        .map(|i| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if keep(i) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    idft(&Spectrum::new(group.clone(), values).expect("finite by construction"))
}

/// `sqrt(|G|)` times the point mass at the identity; unit `L^2` norm and the
/// flattest possible spectrum.
pub fn scaled_dirac(group: &GroupRef) -> Signal {
    let n = group.order();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values[0] = Complex64::new((n as f64).sqrt(), 0.0);
    Signal::new(group.clone(), values).expect("finite by construction")
}
