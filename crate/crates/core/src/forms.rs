//! Dense t-linear forms `V × … × V → F_p` with every factor of dimension d.
//!
//! A form is its coefficient tensor, stored row-major: the coefficient of
//! `(i_1, …, i_t)` sits at `Σ i_k · d^(t-k)`. Row-major order is also the
//! serialized order, so two forms are equal exactly when their coefficient
//! arrays are.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{self, FieldElement, PrimeField};
use crate::FORMAT_VERSION;

/// An element of one of the d-dimensional spaces V_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    p: u32,
    entries: Vec<u32>,
}

impl Vector {
    pub fn new(p: u32, entries: Vec<u32>) -> Result<Self> {
        PrimeField::new(p)?;
        if entries.is_empty() {
            return Err(Error::Shape("vector of dimension 0".into()));
        }
        if let Some(&bad) = entries.iter().find(|&&v| v >= p) {
            return Err(Error::Format(format!("entry {bad} is not reduced modulo {p}")));
        }
        Ok(Vector { p, entries })
    }

    pub fn zero(p: u32, dim: usize) -> Self {
        Vector { p, entries: vec![0; dim] }
    }

    /// Standard basis vector e_i.
    pub fn basis(p: u32, dim: usize, i: usize) -> Self {
        let mut v = Self::zero(p, dim);
        v.entries[i] = 1;
        v
    }

    pub fn random<R: Rng + ?Sized>(p: u32, dim: usize, rng: &mut R) -> Self {
        Vector { p, entries: (0..dim).map(|_| rng.gen_range(0..p)).collect() }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: u32, other: &Vector, b: u32) -> Result<Vector> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!("dims {} and {}", self.dim(), other.dim())));
        }
        let p = self.p;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&x, &y)| gf::add_mod(gf::mul_mod(a, x, p), gf::mul_mod(b, y, p), p))
            .collect();
        Ok(Vector { p, entries })
    }
}

/// `d^t`, or an overflow error when the tensor could not be materialized.
pub fn tensor_len(dim: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| dim.checked_pow(a))
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::Overflow(format!("{dim}^{arity} coefficients")))
}

/// A t-linear form over F_p on t copies of a d-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct MultilinearForm {
    p: u32,
    arity: usize,
    dim: usize,
    coeffs: Vec<u32>,
}

impl MultilinearForm {
    pub fn new(p: u32, arity: usize, dim: usize, coeffs: Vec<u32>) -> Result<Self> {
        PrimeField::new(p)?;
        if arity == 0 || dim == 0 {
            return Err(Error::Shape(format!("arity {arity} and dim {dim} must be positive")));
        }
        let len = tensor_len(dim, arity)?;
        if coeffs.len() != len {
            return Err(Error::Shape(format!(
                "expected {len} coefficients for arity {arity}, dim {dim}; got {}",
                coeffs.len()
            )));
        }
        if let Some(&bad) = coeffs.iter().find(|&&v| v >= p) {
            return Err(Error::Format(format!("coefficient {bad} is not reduced modulo {p}")));
        }
        Ok(MultilinearForm { p, arity, dim, coeffs })
    }

    pub fn zero(p: u32, arity: usize, dim: usize) -> Result<Self> {
        PrimeField::new(p)?;
        if arity == 0 || dim == 0 {
            return Err(Error::Shape(format!("arity {arity} and dim {dim} must be positive")));
        }
        Ok(MultilinearForm { p, arity, dim, coeffs: vec![0; tensor_len(dim, arity)?] })
    }

    /// Unchecked zero form; callers guarantee a valid shape.
    pub(crate) fn zero_unchecked(p: u32, arity: usize, dim: usize) -> Self {
        MultilinearForm { p, arity, dim, coeffs: vec![0; dim.pow(arity as u32)] }
    }

    pub(crate) fn from_raw(p: u32, arity: usize, dim: usize, coeffs: Vec<u32>) -> Self {
        debug_assert_eq!(coeffs.len(), dim.pow(arity as u32));
        MultilinearForm { p, arity, dim, coeffs }
    }

    /// The linear form `x ↦ Σ u_i x_i`.
    pub fn linear(u: &Vector) -> Self {
        MultilinearForm { p: u.p, arity: 1, dim: u.dim(), coeffs: u.entries.clone() }
    }

    /// The decomposable form `u_1 ⊗ … ⊗ u_t`.
    pub fn decomposable(factors: &[Vector]) -> Result<Self> {
        let (first, rest) =
            factors.split_first().ok_or_else(|| Error::Shape("decomposable form needs at least one factor".into()))?;
        rest.iter().try_fold(Self::linear(first), |acc, u| acc.tensor_concat(&Self::linear(u)))
    }

    pub fn random<R: Rng + ?Sized>(p: u32, arity: usize, dim: usize, rng: &mut R) -> Self {
        let len = dim.pow(arity as u32);
        MultilinearForm { p, arity, dim, coeffs: (0..len).map(|_| rng.gen_range(0..p)).collect() }
    }

    /// The form whose coefficient array, read as a base-p numeral with the
    /// first coefficient most significant, equals `index`.
    pub fn from_index(p: u32, arity: usize, dim: usize, mut index: u64) -> Self {
        let len = dim.pow(arity as u32);
        let mut coeffs = vec![0; len];
        for c in coeffs.iter_mut().rev() {
            *c = (index % p as u64) as u32;
            index /= p as u64;
        }
        MultilinearForm { p, arity, dim, coeffs }
    }

    /// Inverse of [`from_index`](Self::from_index).
    pub fn index(&self) -> u64 {
        self.coeffs.iter().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    /// Number of forms of the given shape, `p^(d^t)`, if it fits in a `u64`.
    pub fn space_size(p: u32, arity: usize, dim: usize) -> Option<u64> {
        let len = u32::try_from(tensor_len(dim, arity).ok()?).ok()?;
        (p as u64).checked_pow(len)
    }

    /// Every form of the given shape, in increasing [`index`](Self::index) order.
    pub fn enumerate_all(p: u32, arity: usize, dim: usize) -> Result<impl Iterator<Item = Self>> {
        let n = Self::space_size(p, arity, dim)
            .ok_or_else(|| Error::Overflow(format!("space of {arity}-linear forms on F_{p}^{dim}")))?;
        Ok((0..n).map(move |i| Self::from_index(p, arity, dim, i)))
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, index: &[usize]) -> Option<u32> {
        if index.len() != self.arity || index.iter().any(|&i| i >= self.dim) {
            return None;
        }
        Some(self.coeffs[index.iter().fold(0, |acc, &i| acc * self.dim + i)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.arity != other.arity || self.dim != other.dim {
            return Err(Error::Shape(format!(
                "forms of shape ({}, {}) and ({}, {})",
                self.arity, self.dim, other.arity, other.dim
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, args: &[Vector]) -> Result<FieldElement> {
        if args.len() != self.arity {
            return Err(Error::Shape(format!("{} arguments for a {}-linear form", args.len(), self.arity)));
        }
        for a in args {
            if a.p != self.p {
                return Err(Error::ModulusMismatch(self.p, a.p));
            }
            if a.dim() != self.dim {
                return Err(Error::Shape(format!("argument of dim {} for a form on dim {}", a.dim(), self.dim)));
            }
        }
        // Contract the last slot first: partial[j] sums over the trailing indices.
        let p = self.p;
        let mut partial = self.coeffs.clone();
        for arg in args.iter().rev() {
            partial = partial
                .chunks(self.dim)
                .map(|chunk| {
                    chunk.iter().zip(&arg.entries).fold(0u32, |acc, (&c, &x)| gf::add_mod(acc, gf::mul_mod(c, x, p), p))
                })
                .collect();
        }
        Ok(PrimeField::new(p)?.element(partial[0] as i64))
    }

    /// The form `(x; y) ↦ self(x) · other(y)` of arity `s + t`.
    pub fn tensor_concat(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.dim != other.dim {
            return Err(Error::Shape(format!("dims {} and {}", self.dim, other.dim)));
        }
        let arity = self.arity + other.arity;
        tensor_len(self.dim, arity)?;
        let mut out = Self::zero_unchecked(self.p, arity, self.dim);
        out.add_concat_assign(self, other);
        Ok(out)
    }

    /// `self += f ⊗ g`, with shapes already known to agree.
    pub(crate) fn add_concat_assign(&mut self, f: &Self, g: &Self) {
        debug_assert_eq!(self.arity, f.arity + g.arity);
        let p = self.p;
        let n = g.coeffs.len();
        for (row, &a) in self.coeffs.chunks_mut(n).zip(&f.coeffs) {
            if a == 0 {
                continue;
            }
            for (c, &b) in row.iter_mut().zip(&g.coeffs) {
                *c = gf::add_mod(*c, gf::mul_mod(a, b, p), p);
            }
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        let p = self.p;
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c = gf::add_mod(*c, o, p);
        }
    }

    pub(crate) fn sub_assign_unchecked(&mut self, other: &Self) {
        let p = self.p;
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c = gf::sub_mod(*c, o, p);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        out.sub_assign_unchecked(other);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale_raw(self.p - 1)
    }

    pub fn scale(&self, c: FieldElement) -> Result<Self> {
        if c.modulus() != self.p {
            return Err(Error::ModulusMismatch(self.p, c.modulus()));
        }
        Ok(self.scale_raw(c.value()))
    }

    pub(crate) fn scale_raw(&self, c: u32) -> Self {
        let p = self.p;
        MultilinearForm { coeffs: self.coeffs.iter().map(|&x| gf::mul_mod(x, c, p)).collect(), ..self.clone() }
    }

    /// The `d × d^(t-1)` matrix obtained by isolating slot `axis` as the row index.
    pub fn unfolding(&self, axis: usize) -> Vec<Vec<u32>> {
        assert!(axis < self.arity, "axis {axis} out of range for arity {}", self.arity);
        let d = self.dim;
        let inner = d.pow((self.arity - axis - 1) as u32);
        let outer = d.pow(axis as u32);
        let mut rows = vec![Vec::with_capacity(outer * inner); d];
        for o in 0..outer {
            for (i, row) in rows.iter_mut().enumerate() {
                let start = (o * d + i) * inner;
                row.extend_from_slice(&self.coeffs[start..start + inner]);
            }
        }
        rows
    }
}

/// Serialized shape of a [`MultilinearForm`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormJson {
    pub version: u32,
    pub p: u32,
    pub arity: usize,
    pub dim: usize,
    pub coeffs: Vec<u32>,
}

impl From<MultilinearForm> for FormJson {
    fn from(f: MultilinearForm) -> Self {
        FormJson { version: FORMAT_VERSION, p: f.p, arity: f.arity, dim: f.dim, coeffs: f.coeffs }
    }
}

impl TryFrom<FormJson> for MultilinearForm {
    type Error = Error;

    fn try_from(j: FormJson) -> Result<Self> {
        if j.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported form version {}", j.version)));
        }
        MultilinearForm::new(j.p, j.arity, j.dim, j.coeffs)
    }
}
