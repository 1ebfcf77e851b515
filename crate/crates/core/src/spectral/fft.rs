//! Mixed-radix transform along one cyclic factor, and the tensor sweep that
//! applies it along every factor of a product group.
//!
//! Each length is split by its smallest prime factor (decimation in time).
//! A prime length ends the recursion in a dense `O(p^2)` kernel, so smooth
//! moduli run in `O(n log n)` and large primes degrade gracefully.

use num_complex::Complex64;

use crate::group::FiniteAbelianGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    /// kernel `exp(-2 pi i jk/n)`
    Forward,
    /// kernel `exp(+2 pi i jk/n)`
    Inverse,
}

pub(crate) fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) struct CyclicPlan {
    n: usize,
    factors: Vec<usize>,
    twiddles: Vec<Complex64>,
}

impl CyclicPlan {
    pub(crate) fn new(n: usize, direction: Direction) -> Self {
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        };
        let twiddles = (0..n)
            .map(|j| {
                let folded = if 2 * j > n { j as f64 - n as f64 } else { j as f64 };
                Complex64::from_polar(1.0, sign * std::f64::consts::TAU * folded / n as f64)
            })
            .collect();
        Self {
            n,
            factors: prime_factors(n),
            twiddles,
        }
    }

    /// Unnormalized transform of `data` in place.
    pub(crate) fn process(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        if self.n <= 1 {
            return;
        }
        let input = data.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.n];
        self.recurse(&input, 1, data, &mut scratch, 0);
    }

    fn recurse(
        &self,
        input: &[Complex64],
        stride: usize,
        out: &mut [Complex64],
        scratch: &mut [Complex64],
        depth: usize,
    ) {
        let len = out.len();
        if len == 1 {
            out[0] = input[0];
            return;
        }
        let p = self.factors[depth];
        let m = len / p;
        for r in 0..p {
            self.recurse(
                &input[r * stride..],
                stride * p,
                &mut out[r * m..(r + 1) * m],
                &mut scratch[r * m..(r + 1) * m],
                depth + 1,
            );
        }
        let step = self.n / len;
        let tmp = &mut scratch[..len];
        tmp.copy_from_slice(out);
        for (k, slot) in out.iter_mut().enumerate() {
            let km = k % m;
            let mut acc = tmp[km];
            for r in 1..p {
                let t = (r * k) % len;
                acc += self.twiddles[t * step] * tmp[r * m + km];
            }
            *slot = acc;
        }
    }
}

/// Applies the unnormalized cyclic transform along every factor of `group`.
pub(crate) fn transform_in_place(
    group: &FiniteAbelianGroup,
    data: &mut [Complex64],
    direction: Direction,
) {
    let order = group.order();
    debug_assert_eq!(data.len(), order);
    let mut line = Vec::new();
    for (j, &n) in group.factors().iter().enumerate() {
        if n == 1 {
            continue;
        }
        let plan = CyclicPlan::new(n, direction);
        let stride = group.stride(j);
        let block = n * stride;
        line.resize(n, Complex64::new(0.0, 0.0));
        for outer in (0..order).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                plan.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let a = sign * std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64;
                        Complex64::from_polar(1.0, a) * x[j]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn factorization() {
        assert_eq!(prime_factors(1), Vec::<usize>::new());
        assert_eq!(prime_factors(12), vec![2, 2, 3]);
        assert_eq!(prime_factors(97), vec![97]);
        assert_eq!(prime_factors(4096), vec![2; 12]);
    }

    #[test]
    fn cyclic_plan_matches_dense_kernel() {
        for n in [1usize, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 16, 30, 49, 60, 64, 97] {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut y = x.clone();
                CyclicPlan::new(n, dir).process(&mut y);
                let want = dense(&x, sign);
                let err: f64 = y.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
                let scale: f64 = want.iter().map(|b| b.norm_sqr()).sum();
                assert!(err.sqrt() <= 1e-12 * scale.sqrt().max(1.0), "n={n}");
            }
        }
    }
}
