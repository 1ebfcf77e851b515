//! Signals on `G`, spectra on the dual, and the Fourier transform between
//! them.
//!
//! Conventions: `f^(xi) = (1/|G|) sum_x conj(xi(x)) f(x)` (normalized Haar on
//! `G`) and `f(x) = sum_xi f^(xi) xi(x)` (counting measure on the dual), so
//! Plancherel reads `||f||_{L^2(G)} = ||f^||_{l^2}` with no extra constants.
//!
//! A [`Signal`] built from a spectrum (through [`idft`] or the operators in
//! `stringop`) keeps that spectrum alongside its sampled values. Spectral
//! content far below the rounding floor of the values, such as
//! `g^/(1 + gamma^2 e^{c gamma^2})` at high frequencies, survives only there.
//! [`Signal::spectrum`] prefers it; [`dft_fast`] and [`dft_naive`] always
//! work from the sampled values.

mod fft;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::sum::pairwise_sum;

pub(crate) use fft::prime_factors;
use fft::{transform_in_place, Direction};

pub type GroupRef = Arc<FiniteAbelianGroup>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_values(values: &[Complex64], order: usize) -> Result<()> {
    if values.len() != order {
        return Err(Error::LengthMismatch {
            expected: order,
            found: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

pub(crate) fn ensure_same_group(a: &GroupRef, b: &GroupRef) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch {
            left: a.descriptor(),
            right: b.descriptor(),
        })
    }
}

/// A complex function on the group, sampled in enumeration order.
#[derive(Clone, Debug)]
pub struct Signal {
    group: GroupRef,
    values: Vec<Complex64>,
    synthesis: Option<Arc<[Complex64]>>,
}

/// Fourier coefficients indexed by dual characters in enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    group: GroupRef,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(group: impl Into<GroupRef>, values: Vec<Complex64>) -> Result<Self> {
        let group = group.into();
        check_values(&values, group.order())?;
        Ok(Self {
            group,
            values,
            synthesis: None,
        })
    }

    pub fn from_real(group: impl Into<GroupRef>, values: &[f64]) -> Result<Self> {
        Self::new(
            group,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_fn(group: impl Into<GroupRef>, f: impl Fn(&GroupElement) -> Complex64) -> Result<Self> {
        let group = group.into();
        let values = group.enumerate().map(|x| f(&x)).collect();
        Self::new(group, values)
    }

    pub fn zeros(group: impl Into<GroupRef>) -> Self {
        let group = group.into();
        let n = group.order();
        Self {
            group,
            values: vec![ZERO; n],
            synthesis: Some(vec![ZERO; n].into()),
        }
    }

    pub fn constant(group: impl Into<GroupRef>, c: Complex64) -> Result<Self> {
        let group = group.into();
        let n = group.order();
        let mut spec = vec![ZERO; n];
        spec[0] = c;
        let mut s = Self::new(group, vec![c; n])?;
        s.synthesis = Some(spec.into());
        Ok(s)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn group_ref(&self) -> &GroupRef {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// The spectrum this signal was synthesized from, if any.
    pub fn exact_spectrum(&self) -> Option<&[Complex64]> {
        self.synthesis.as_deref()
    }

    /// Drops the attached spectrum, leaving only the sampled values.
    pub fn sampled(mut self) -> Self {
        self.synthesis = None;
        self
    }

    /// The attached spectrum when present, otherwise [`dft_fast`].
    pub fn spectrum(&self) -> Spectrum {
        match &self.synthesis {
            Some(s) => Spectrum {
                group: self.group.clone(),
                values: s.to_vec(),
            },
            None => dft_fast(self),
        }
    }

    /// Largest `|Im f(x)|` and where it occurs.
    pub fn max_imag(&self) -> (usize, f64) {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.im.abs()))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
    }

    /// Projects onto real-valued signals, erroring if the imaginary part
    /// exceeds `tol` anywhere.
    pub fn into_real(self, tol: f64) -> Result<Self> {
        let (index, magnitude) = self.max_imag();
        if magnitude > tol {
            return Err(Error::NonReal { index, magnitude });
        }
        Ok(self.real_part())
    }

    /// `Re f`; the attached spectrum maps to `(F(xi) + conj F(-xi)) / 2`.
    pub fn real_part(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| Complex64::new(v.re, 0.0))
            .collect();
        let synthesis = self.synthesis.as_ref().map(|s| {
            let neg = self.group.negation_table();
            (0..s.len())
                .map(|i| (s[i] + s[neg[i]].conj()) * 0.5)
                .collect::<Vec<_>>()
                .into()
        });
        Self {
            group: self.group.clone(),
            values,
            synthesis,
        }
    }

    /// `a * self + b * other`, carrying attached spectra when both have one.
    pub fn lincomb(&self, a: f64, other: &Signal, b: f64) -> Result<Self> {
        ensure_same_group(&self.group, &other.group)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * a + y * b)
            .collect();
        let synthesis = match (&self.synthesis, &other.synthesis) {
            (Some(s), Some(t)) => Some(
                s.iter()
                    .zip(t.iter())
                    .map(|(x, y)| x * a + y * b)
                    .collect::<Vec<_>>()
                    .into(),
            ),
            _ => None,
        };
        Ok(Self {
            group: self.group.clone(),
            values,
            synthesis,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            synthesis: self
                .synthesis
                .as_ref()
                .map(|s| s.iter().map(|v| v * a).collect::<Vec<_>>().into()),
        }
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }
}

impl Spectrum {
    pub fn new(group: impl Into<GroupRef>, values: Vec<Complex64>) -> Result<Self> {
        let group = group.into();
        check_values(&values, group.order())?;
        Ok(Self { group, values })
    }

    pub fn zeros(group: impl Into<GroupRef>) -> Self {
        let group = group.into();
        let n = group.order();
        Self {
            group,
            values: vec![ZERO; n],
        }
    }

    /// Indicator of the character with linear index `index`.
    pub fn delta(group: impl Into<GroupRef>, index: usize) -> Result<Self> {
        let mut s = Self::zeros(group);
        if index >= s.values.len() {
            return Err(Error::InvalidParameter(format!(
                "character index {index} out of range"
            )));
        }
        s.values[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn group_ref(&self) -> &GroupRef {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// The transform straight from its definition, `O(|G|^2)`. Used as the
/// reference for [`dft_fast`].
pub fn dft_naive(f: &Signal) -> Spectrum {
    let g = f.group();
    let n = g.order();
    let table: Vec<Complex64> = (0..g.exponent()).map(|t| g.root_of_unity(t).conj()).collect();
    let w = g.haar_weight();
    let values = (0..n)
        .map(|xi| {
            let mut re = Vec::with_capacity(n);
            let mut im = Vec::with_capacity(n);
            for (x, fx) in f.values().iter().enumerate() {
                let t = table[g.pairing_phase(xi, x)] * fx;
                re.push(t.re);
                im.push(t.im);
            }
            Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * w
        })
        .collect();
    Spectrum {
        group: f.group.clone(),
        values,
    }
}

/// Inverse transform from its definition, `O(|G|^2)`; returns plain samples.
pub fn idft_naive(spec: &Spectrum) -> Signal {
    let g = spec.group();
    let n = g.order();
    let table: Vec<Complex64> = (0..g.exponent()).map(|t| g.root_of_unity(t)).collect();
    let values = (0..n)
        .map(|x| {
            let mut re = Vec::with_capacity(n);
            let mut im = Vec::with_capacity(n);
            for (xi, c) in spec.values().iter().enumerate() {
                let t = table[g.pairing_phase(xi, x)] * c;
                re.push(t.re);
                im.push(t.im);
            }
            Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
        })
        .collect();
    Signal {
        group: spec.group.clone(),
        values,
        synthesis: None,
    }
}

/// Factor-by-factor fast transform of the sampled values.
pub fn dft_fast(f: &Signal) -> Spectrum {
    let mut data = f.values.clone();
    transform_in_place(f.group(), &mut data, Direction::Forward);
    let w = f.group().haar_weight();
    for v in &mut data {
        *v *= w;
    }
    Spectrum {
        group: f.group.clone(),
        values: data,
    }
}

/// `f(x) = sum_xi F(xi) xi(x)`. The returned signal keeps `F` attached.
pub fn idft(spec: &Spectrum) -> Signal {
    let mut data = spec.values.clone();
    transform_in_place(spec.group(), &mut data, Direction::Inverse);
    Signal {
        group: spec.group.clone(),
        values: data,
        synthesis: Some(spec.values.clone().into()),
    }
}

/// `(u * v)(xi) = sum_eta u(xi eta^-1) v(eta)` under counting measure.
pub fn convolve_dual(u: &Spectrum, v: &Spectrum) -> Result<Spectrum> {
    ensure_same_group(&u.group, &v.group)?;
    let g = u.group();
    let n = g.order();
    let values = (0..n)
        .map(|xi| {
            let mut re = Vec::with_capacity(n);
            let mut im = Vec::with_capacity(n);
            for eta in 0..n {
                let t = u.values[g.sub_index(xi, eta)] * v.values[eta];
                re.push(t.re);
                im.push(t.im);
            }
            Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
        })
        .collect();
    Ok(Spectrum {
        group: u.group.clone(),
        values,
    })
}

pub fn pointwise_mul(f: &Signal, g: &Signal) -> Result<Signal> {
    ensure_same_group(&f.group, &g.group)?;
    Ok(Signal {
        group: f.group.clone(),
        values: f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect(),
        synthesis: None,
    })
}

/// `x -> f(x h)`. Its spectrum is `xi(h) f^(xi)`, which is carried over when
/// `f` has one attached.
pub fn translate(f: &Signal, h: &GroupElement) -> Result<Signal> {
    let g = f.group();
    let h_index = g.linear_index(h.residues())?;
    let values = (0..g.order())
        .map(|x| f.values[g.add_index(x, h_index)])
        .collect();
    let synthesis = f.synthesis.as_ref().map(|s| {
        s.iter()
            .enumerate()
            .map(|(xi, c)| g.root_of_unity(g.pairing_phase(xi, h_index)) * c)
            .collect::<Vec<_>>()
            .into()
    });
    Ok(Signal {
        group: f.group.clone(),
        values,
        synthesis,
    })
}

/// `sqrt(sum |v|^2)` with pairwise summation.
pub fn l2_norm_counting(values: &[Complex64]) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
    pairwise_sum(&sq).sqrt()
}

/// Relative l2 distance `||a - b|| / max(||b||, tiny)`.
pub fn relative_l2_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let denom = l2_norm_counting(b);
    let num = l2_norm_counting(&diff);
    if denom == 0.0 {
        num
    } else {
        num / denom
    }
}
