//! Exact arithmetic in finite residue rings `Z/m`.
//!
//! Every matrix entry and every value a formula quantifies over lives in one
//! of these rings. Elements are stored as canonical residues in `[0, m)` and
//! re-normalized after every operation, so equality is plain `==` everywhere
//! downstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("operands live in different rings (Z/{0} vs Z/{1})")]
    MixedRings(u64, u64),
}

/// Descriptor of the residue ring `Z/m`. Cheap to copy and immutable, so it
/// can be shared freely across worker threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueRing {
    modulus: u64,
    is_field: bool,
}

impl ResidueRing {
    pub fn new(modulus: u64) -> Result<Self, RingError> {
        if modulus < 2 {
            return Err(RingError::ModulusTooSmall(modulus));
        }
        Ok(ResidueRing {
            modulus,
            is_field: is_prime(modulus),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// True exactly when the modulus is prime, i.e. `Z/m` is the field `F_m`.
    pub fn is_field(&self) -> bool {
        self.is_field
    }

    pub fn element(&self, value: u64) -> RingElement {
        RingElement {
            value: value % self.modulus,
            ring: *self,
        }
    }

    /// Canonical residue of a possibly negative integer.
    pub fn element_from_i64(&self, value: i64) -> RingElement {
        let m = self.modulus as i64;
        self.element(value.rem_euclid(m) as u64)
    }

    pub fn zero(&self) -> RingElement {
        self.element(0)
    }

    pub fn one(&self) -> RingElement {
        self.element(1)
    }

    /// All canonical residues, in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.modulus).map(move |v| self.element(v))
    }

    /// Raw `a + b mod m`; inputs must already be canonical.
    #[inline]
    pub fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    /// Raw `a * b mod m`; inputs must already be canonical.
    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    /// Raw `a - b mod m`; inputs must already be canonical.
    #[inline]
    pub fn sub_raw(&self, a: u64, b: u64) -> u64 {
        self.add_raw(a, self.modulus - b.min(self.modulus))
    }

    #[inline]
    pub fn neg_raw(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn check_same(&self, other: &ResidueRing) -> Result<(), RingError> {
        if self.modulus != other.modulus {
            return Err(RingError::MixedRings(self.modulus, other.modulus));
        }
        Ok(())
    }
}

/// A canonical residue tied to its ring. Operations between elements of
/// distinct rings are rejected rather than silently coerced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElement {
    value: u64,
    ring: ResidueRing,
}

impl RingElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.ring.check_same(&other.ring)?;
        Ok(RingElement {
            value: self.ring.add_raw(self.value, other.value),
            ring: self.ring,
        })
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.ring.check_same(&other.ring)?;
        Ok(RingElement {
            value: self.ring.mul_raw(self.value, other.value),
            ring: self.ring,
        })
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            value: self.ring.neg_raw(self.value),
            ring: self.ring,
        }
    }

    /// Image under the reduction map `Z/m -> Z/m'` for `m'` dividing `m`.
    pub fn reduce(&self, target: &ResidueRing) -> RingElement {
        target.element(self.value)
    }
}

impl std::fmt::Display for RingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All generators-exponents of a cyclic group of the given order: the
/// integers `u` in `[1, m]` with `gcd(u, m) = 1`. For `m = 1` this is `{1}`.
pub fn units_mod(m: u64) -> Vec<u64> {
    assert!(m >= 1, "units_mod requires m >= 1");
    (1..=m).filter(|&u| gcd(u, m) == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_examples() {
        let z2 = ResidueRing::new(2).unwrap();
        assert_eq!(z2.element(1).add(&z2.element(1)).unwrap(), z2.element(0));
        let z9 = ResidueRing::new(9).unwrap();
        assert_eq!(z9.element(5).add(&z9.element(7)).unwrap(), z9.element(3));
        for m in 2..10 {
            let r = ResidueRing::new(m).unwrap();
            for a in r.elements() {
                assert_eq!(a.add(&r.zero()).unwrap(), a);
            }
        }
    }

    #[test]
    fn mul_examples() {
        let z3 = ResidueRing::new(3).unwrap();
        assert_eq!(z3.element(2).mul(&z3.element(2)).unwrap(), z3.element(1));
        let z8 = ResidueRing::new(8).unwrap();
        assert_eq!(z8.element(3).mul(&z8.element(5)).unwrap(), z8.element(7));
        for m in 2..10 {
            let r = ResidueRing::new(m).unwrap();
            for a in r.elements() {
                assert_eq!(a.mul(&r.one()).unwrap(), a);
            }
        }
    }

    #[test]
    fn mixed_rings_rejected() {
        let z2 = ResidueRing::new(2).unwrap();
        let z3 = ResidueRing::new(3).unwrap();
        assert_eq!(
            z2.one().add(&z3.one()),
            Err(RingError::MixedRings(2, 3))
        );
        assert_eq!(
            z2.one().mul(&z3.one()),
            Err(RingError::MixedRings(2, 3))
        );
    }

    #[test]
    fn modulus_validation() {
        assert!(ResidueRing::new(0).is_err());
        assert!(ResidueRing::new(1).is_err());
        assert!(ResidueRing::new(2).is_ok());
    }

    #[test]
    fn units_examples() {
        assert_eq!(units_mod(6), vec![1, 5]);
        assert_eq!(units_mod(1), vec![1]);
        assert_eq!(units_mod(8), vec![1, 3, 5, 7]);
    }

    #[test]
    fn field_flag_matches_primality() {
        let primes = [2u64, 3, 5, 7, 11, 13];
        for m in 2..=16u64 {
            let r = ResidueRing::new(m).unwrap();
            assert_eq!(r.is_field(), primes.contains(&m), "m = {m}");
        }
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        // Associativity, commutativity, distributivity and identities hold
        // exactly for every triple in every ring with m <= 16.
        for m in 2..=16u64 {
            let r = ResidueRing::new(m).unwrap();
            for a in 0..m {
                for b in 0..m {
                    let ea = r.element(a);
                    let eb = r.element(b);
                    assert_eq!(ea.add(&eb).unwrap(), eb.add(&ea).unwrap());
                    assert_eq!(ea.mul(&eb).unwrap(), eb.mul(&ea).unwrap());
                    for c in 0..m {
                        let ec = r.element(c);
                        assert_eq!(
                            ea.add(&eb).unwrap().add(&ec).unwrap(),
                            ea.add(&eb.add(&ec).unwrap()).unwrap()
                        );
                        assert_eq!(
                            ea.mul(&eb).unwrap().mul(&ec).unwrap(),
                            ea.mul(&eb.mul(&ec).unwrap()).unwrap()
                        );
                        assert_eq!(
                            ea.mul(&eb.add(&ec).unwrap()).unwrap(),
                            ea.mul(&eb).unwrap().add(&ea.mul(&ec).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_is_homomorphism() {
        // For m' | m the map v -> v mod m' respects full addition and
        // multiplication tables.
        for m in 2..=16u64 {
            for mp in 2..=m {
                if m % mp != 0 {
                    continue;
                }
                let big = ResidueRing::new(m).unwrap();
                let small = ResidueRing::new(mp).unwrap();
                for a in 0..m {
                    for b in 0..m {
                        let (ea, eb) = (big.element(a), big.element(b));
                        assert_eq!(
                            ea.add(&eb).unwrap().reduce(&small),
                            ea.reduce(&small).add(&eb.reduce(&small)).unwrap()
                        );
                        assert_eq!(
                            ea.mul(&eb).unwrap().reduce(&small),
                            ea.reduce(&small).mul(&eb.reduce(&small)).unwrap()
                        );
                    }
                }
            }
        }
    }
}
