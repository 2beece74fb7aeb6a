//! Arithmetic in prime fields F_p for small p.
//!
//! [`FieldElement`] carries its modulus so that mixing elements of different
//! fields is caught at run time. The free functions at the bottom operate on
//! raw residues and are what the dense kernels in [`crate::forms`] use.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The field F_p. Construction fails unless `p` is prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    pub fn element(&self, value: i64) -> FieldElement {
        FieldElement { value: value.rem_euclid(self.p as i64) as u32, modulus: self.p }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// All elements in increasing order of their canonical residue.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.p).map(move |v| FieldElement { value: v, modulus: self.p })
    }
}

/// An element of F_p stored as its canonical residue in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    /// Checked constructor; verifies primality of `modulus`.
    pub fn new(value: u32, modulus: u32) -> Result<Self> {
        Ok(PrimeField::new(modulus)?.element(value as i64))
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    fn with(&self, value: u32) -> Self {
        FieldElement { value, modulus: self.modulus }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(add_mod(self.value, other.value, self.modulus)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(sub_mod(self.value, other.value, self.modulus)))
    }

    pub fn neg(&self) -> Self {
        self.with(neg_mod(self.value, self.modulus))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(mul_mod(self.value, other.value, self.modulus)))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Self> {
        inv_mod(self.value, self.modulus).map(|v| self.with(v)).ok_or(Error::DivisionByZero(self.modulus))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Square-and-multiply; negative exponents go through the inverse.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { *self };
        Ok(self.with(pow_mod(base.value, k.unsigned_abs(), self.modulus)))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `p`, `None` when `a ≡ 0`.
pub fn inv_mod(a: u32, p: u32) -> Option<u32> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i64) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: u32, p: u32) -> FieldElement {
        FieldElement::new(v, p).unwrap()
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert!(FieldElement::new(1, 1).is_err());
    }

    #[test]
    fn small_examples() {
        assert_eq!(f(2, 3).add(&f(2, 3)).unwrap().value(), 1);
        assert_eq!(f(2, 5).inv().unwrap().value(), 3);
        assert_eq!(f(2, 5).pow(4).unwrap().value(), 1);
        assert_eq!(f(2, 5).pow(-1).unwrap().value(), 3);
        for p in [3u32, 5, 7] {
            for x in 0..p {
                assert_eq!(f(0, p).add(&f(x, p)).unwrap(), f(x, p));
                assert!(f(x, p).add(&f((p - x) % p, p)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn errors() {
        assert_eq!(f(1, 3).add(&f(1, 5)), Err(Error::ModulusMismatch(3, 5)));
        assert_eq!(f(0, 7).inv(), Err(Error::DivisionByZero(7)));
        assert!(f(0, 7).pow(-2).is_err());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [3u32, 5, 7] {
            let k = PrimeField::new(p).unwrap();
            let els: Vec<_> = k.elements().collect();
            for a in &els {
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), k.one());
                }
                assert!(a.add(&a.neg()).unwrap().is_zero());
                for b in &els {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                    for c in &els {
                        assert_eq!(a.add(b).unwrap().add(c).unwrap(), a.add(&b.add(c).unwrap()).unwrap());
                        assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
                        assert_eq!(
                            a.mul(&b.add(c).unwrap()).unwrap(),
                            a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fermat_little_theorem() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(f(a, p).pow(p as i64 - 1).unwrap().value(), 1, "a={a} p={p}");
            }
        }
    }
}
