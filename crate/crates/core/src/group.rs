//! Finite abelian groups as products of cyclic factors `Z_n1 x ... x Z_nd`.
//!
//! Elements and characters are both written as residue vectors. The dual group
//! is identified with the same factor list through
//! `xi_k(x) = exp(2 pi i sum_j k_j x_j / n_j)`.
//!
//! All signals and spectra are laid out in mixed-radix order with the first
//! factor most significant, so `(r_1, ..., r_d)` sits at
//! `sum_j r_j * prod_{k > j} n_k`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
    order: usize,
    strides: Vec<usize>,
    exponent: usize,
}

/// An element of the group, one residue per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<usize>);

/// A character of the group, one frequency index per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualCharacter(Vec<usize>);

impl GroupElement {
    pub fn new(residues: Vec<usize>) -> Self {
        Self(residues)
    }

    pub fn residues(&self) -> &[usize] {
        &self.0
    }
}

impl DualCharacter {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

impl From<Vec<usize>> for GroupElement {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl From<Vec<usize>> for DualCharacter {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if factors.contains(&0) {
            return Err(Error::ZeroModulus);
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidParameter("group order overflows usize".into()))?;
        let mut strides = vec![1usize; factors.len()];
        for j in (0..factors.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * factors[j + 1];
        }
        let exponent = factors.iter().fold(1usize, |l, &n| l / gcd(l, n) * n);
        Ok(Self {
            factors,
            order,
            strides,
            exponent,
        })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `(Z_2)^m`, the dyadic group of Walsh analysis.
    pub fn dyadic(m: usize) -> Result<Self> {
        Self::new(vec![2; m])
    }

    /// Parses descriptors such as `Z64`, `Z2xZ2xZ2` or the shorthand `Z2^6`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let err = |reason: &str| Error::GroupParse {
            descriptor: descriptor.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = descriptor.trim();
        if trimmed.is_empty() {
            return Err(err("empty descriptor"));
        }
        let mut factors = Vec::new();
        for part in trimmed.split(['x', 'X', '×']) {
            let part = part.trim();
            let body = part
                .strip_prefix('Z')
                .ok_or_else(|| err("each factor must look like Z<n>"))?;
            let (modulus, power) = match body.split_once('^') {
                Some((m, p)) => (m, p),
                None => (body, "1"),
            };
            let n: usize = modulus
                .parse()
                .map_err(|_| err("modulus is not a positive integer"))?;
            let p: usize = power
                .parse()
                .map_err(|_| err("power is not a positive integer"))?;
            if n == 0 {
                return Err(err("modulus must be at least 1"));
            }
            if p == 0 {
                return Err(err("power must be at least 1"));
            }
            factors.extend(std::iter::repeat_n(n, p));
        }
        Self::new(factors).map_err(|e| err(&e.to_string()))
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the moduli; every character value is an
    /// `exponent`-th root of unity.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Stride of factor `j` in the linear layout.
    pub fn stride(&self, j: usize) -> usize {
        self.strides[j]
    }

    /// Canonical descriptor, e.g. `Z2xZ3`.
    pub fn descriptor(&self) -> String {
        self.factors
            .iter()
            .map(|n| format!("Z{n}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Mass of a single point under the normalized Haar measure.
    pub fn haar_weight(&self) -> f64 {
        1.0 / self.order as f64
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn trivial_character(&self) -> DualCharacter {
        DualCharacter(vec![0; self.rank()])
    }

    fn validate(&self, coords: &[usize]) -> Result<()> {
        if coords.len() != self.rank() {
            return Err(Error::ShapeMismatch {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        for (index, (&value, &modulus)) in coords.iter().zip(&self.factors).enumerate() {
            if value >= modulus {
                return Err(Error::ResidueOutOfRange {
                    index,
                    value,
                    modulus,
                });
            }
        }
        Ok(())
    }

    pub fn element(&self, residues: Vec<usize>) -> Result<GroupElement> {
        self.validate(&residues)?;
        Ok(GroupElement(residues))
    }

    pub fn character(&self, indices: Vec<usize>) -> Result<DualCharacter> {
        self.validate(&indices)?;
        Ok(DualCharacter(indices))
    }

    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(&a.0)?;
        self.validate(&b.0)?;
        Ok(GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        ))
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(&a.0)?;
        Ok(GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        ))
    }

    /// `xi(x) = exp(2 pi i sum_j k_j r_j / n_j)`.
    pub fn evaluate_character(&self, xi: &DualCharacter, x: &GroupElement) -> Result<Complex64> {
        self.validate(&xi.0)?;
        self.validate(&x.0)?;
        let phase = self.pairing_phase_coords(&xi.0, &x.0);
        Ok(self.root_of_unity(phase))
    }

    /// `exp(2 pi i t / exponent)`, computed from the reduced angle.
    pub fn root_of_unity(&self, t: usize) -> Complex64 {
        let t = t % self.exponent;
        // fold into (-exponent/2, exponent/2] so the angle stays small
        let signed = if 2 * t > self.exponent {
            t as f64 - self.exponent as f64
        } else {
            t as f64
        };
        let angle = std::f64::consts::TAU * signed / self.exponent as f64;
        Complex64::from_polar(1.0, angle)
    }

    fn pairing_phase_coords(&self, k: &[usize], r: &[usize]) -> usize {
        let mut phase = 0usize;
        for ((&kj, &rj), &n) in k.iter().zip(r).zip(&self.factors) {
            let prod = ((kj as u128 * rj as u128) % n as u128) as usize;
            phase = (phase + prod * (self.exponent / n)) % self.exponent;
        }
        phase
    }

    /// Phase of `xi(x)` in units of `1/exponent` turns, given linear indices.
    pub fn pairing_phase(&self, xi: usize, x: usize) -> usize {
        let mut phase = 0usize;
        for j in 0..self.rank() {
            let n = self.factors[j];
            let kj = (xi / self.strides[j]) % n;
            let rj = (x / self.strides[j]) % n;
            let prod = ((kj as u128 * rj as u128) % n as u128) as usize;
            phase = (phase + prod * (self.exponent / n)) % self.exponent;
        }
        phase
    }

    pub fn linear_index(&self, coords: &[usize]) -> Result<usize> {
        self.validate(coords)?;
        Ok(coords.iter().zip(&self.strides).map(|(&r, &s)| r * s).sum())
    }

    pub fn coords_of(&self, index: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| (index / s) % n)
            .collect()
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        GroupElement(self.coords_of(index))
    }

    pub fn character_at(&self, index: usize) -> DualCharacter {
        DualCharacter(self.coords_of(index))
    }

    /// Linear index of `a + b` (group law on either side of the duality).
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for j in 0..self.rank() {
            let n = self.factors[j];
            let s = self.strides[j];
            out += (((a / s) % n + (b / s) % n) % n) * s;
        }
        out
    }

    /// Linear index of `-a`.
    pub fn neg_index(&self, a: usize) -> usize {
        let mut out = 0;
        for j in 0..self.rank() {
            let n = self.factors[j];
            let s = self.strides[j];
            out += ((n - (a / s) % n) % n) * s;
        }
        out
    }

    /// Linear index of `a - b`.
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// All elements in canonical order.
    pub fn enumerate(&self) -> impl ExactSizeIterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    /// Table of `neg_index` for every linear index.
    pub fn negation_table(&self) -> Vec<usize> {
        (0..self.order).map(|i| self.neg_index(i)).collect()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
