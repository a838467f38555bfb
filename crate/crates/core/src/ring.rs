//! The coefficient rings: the integers, the integers localized at a prime,
//! and the finite quotients Z/ell^k.
//!
//! All three are principal ideal domains or quotients thereof, and all three
//! share one scalar representation: exact rationals. A `LocalRing` value
//! carries the ring-specific notions of membership, unit, valuation and
//! division-with-remainder so that the same elimination code serves every
//! ring. No floating point appears anywhere.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Exact scalar shared by every ring in the crate.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn big(n: BigInt) -> Scalar {
    BigRational::from_integer(n)
}

/// ell-adic valuation of a nonzero integer.
fn int_valuation(n: &BigInt, ell: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let ell = BigInt::from(ell);
    let mut n = n.clone();
    let mut v = 0u64;
    loop {
        let (q, r) = n.div_rem(&ell);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalRing {
    /// The ring of integers.
    Integers,
    /// Rationals whose denominator is coprime to `ell`.
    LocalizedAt { ell: u64 },
    /// Z/ell^k, elements represented by integers in `[0, ell^k)`.
    ModPrimePower { ell: u64, k: u32 },
}

impl LocalRing {
    pub fn integers() -> Self {
        LocalRing::Integers
    }

    pub fn localized_at(ell: u64) -> Result<Self> {
        if !arith::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        Ok(LocalRing::LocalizedAt { ell })
    }

    pub fn mod_prime_power(ell: u64, k: u32) -> Result<Self> {
        if !arith::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if k == 0 {
            return Err(Error::InvalidInput("precision exponent k must be >= 1".into()));
        }
        Ok(LocalRing::ModPrimePower { ell, k })
    }

    pub fn residue_prime(&self) -> Option<u64> {
        match self {
            LocalRing::Integers => None,
            LocalRing::LocalizedAt { ell } | LocalRing::ModPrimePower { ell, .. } => Some(*ell),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            LocalRing::ModPrimePower { k, .. } => Some(*k),
            _ => None,
        }
    }

    fn modulus(&self) -> Option<BigInt> {
        match self {
            LocalRing::ModPrimePower { ell, k } => Some(BigInt::from(*ell).pow(*k)),
            _ => None,
        }
    }

    /// True iff `x` lies in the ring (before normalization).
    pub fn contains(&self, x: &Scalar) -> bool {
        match self {
            LocalRing::Integers => x.is_integer(),
            LocalRing::LocalizedAt { ell } | LocalRing::ModPrimePower { ell, .. } => {
                x.is_integer() || int_valuation(x.denom(), *ell) == 0
            }
        }
    }

    /// Canonical representative. For Z/ell^k this folds the rational into
    /// an integer in `[0, ell^k)`; elsewhere it is the identity.
    pub fn normalize(&self, x: &Scalar) -> Scalar {
        match self {
            LocalRing::Integers | LocalRing::LocalizedAt { .. } => x.clone(),
            LocalRing::ModPrimePower { .. } => {
                let m = self.modulus().unwrap();
                let num = x.numer().mod_floor(&m);
                let den = x.denom().mod_floor(&m);
                let den_inv = mod_inverse(&den, &m)
                    .expect("denominator must be a unit in Z/ell^k");
                big((num * den_inv).mod_floor(&m))
            }
        }
    }

    /// ell-adic valuation of a ring element; `None` means zero.
    /// For Z/ell^k valuations are capped at `k` and the zero class has
    /// valuation ">= k", reported as `None`.
    pub fn valuation(&self, x: &Scalar) -> Option<u64> {
        match self {
            LocalRing::Integers => {
                if x.is_zero() {
                    None
                } else {
                    Some(0)
                }
            }
            LocalRing::LocalizedAt { ell } => {
                if x.is_zero() {
                    None
                } else {
                    let vn = int_valuation(x.numer(), *ell) as i64;
                    let vd = int_valuation(x.denom(), *ell) as i64;
                    let v = vn - vd;
                    debug_assert!(v >= 0, "element outside the localization");
                    Some(v as u64)
                }
            }
            LocalRing::ModPrimePower { ell, k } => {
                let r = self.normalize(x);
                if r.is_zero() {
                    None
                } else {
                    Some(int_valuation(r.numer(), *ell).min(*k as u64))
                }
            }
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        self.normalize(x).is_zero()
    }

    pub fn is_unit(&self, x: &Scalar) -> bool {
        match self {
            LocalRing::Integers => x.is_integer() && x.numer().abs().is_one(),
            LocalRing::LocalizedAt { .. } | LocalRing::ModPrimePower { .. } => {
                self.valuation(x) == Some(0)
            }
        }
    }

    pub fn invert(&self, x: &Scalar) -> Result<Scalar> {
        if !self.is_unit(x) {
            return Err(Error::NotInvertible(self.to_string()));
        }
        Ok(self.normalize(&x.recip()))
    }

    /// Division with remainder driving the elimination loops.
    ///
    /// Over Z this is rounded division (|r| <= |b|/2). Over the local rings
    /// `b | a` exactly whenever `val(a) >= val(b)`, and the remainder is `a`
    /// itself otherwise.
    pub fn div_rem(&self, a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        debug_assert!(!self.is_zero(b));
        if self.is_zero(a) {
            return (Scalar::zero(), Scalar::zero());
        }
        match self {
            LocalRing::Integers => {
                let (n, d) = (a.numer(), b.numer());
                // Round to nearest so remainders shrink fast.
                let two = BigInt::from(2);
                let q = (n * two.clone() + d).div_floor(&(d * two));
                let r = a - big(q.clone()) * b;
                (big(q), r)
            }
            LocalRing::LocalizedAt { .. } | LocalRing::ModPrimePower { .. } => {
                let va = self.valuation(a);
                let vb = self.valuation(b).expect("b nonzero");
                match va {
                    None => (Scalar::zero(), Scalar::zero()),
                    Some(va) if va >= vb => {
                        let q = match self {
                            LocalRing::ModPrimePower { ell, .. } => {
                                // a = u_a ell^va, b = u_b ell^vb with u_b a unit:
                                // divide out the ell power, then invert the unit.
                                let m = self.modulus().unwrap();
                                let lp = BigInt::from(*ell).pow(vb as u32);
                                let a_red = self.normalize(a).numer() / &lp;
                                let b_unit = self.normalize(b).numer() / &lp;
                                let inv = mod_inverse(&b_unit.mod_floor(&m), &m).unwrap();
                                self.normalize(&big(a_red * inv))
                            }
                            _ => a / b,
                        };
                        (q, Scalar::zero())
                    }
                    Some(_) => (Scalar::zero(), a.clone()),
                }
            }
        }
    }

    /// Pivot ordering key: smaller is better. The primary component is the
    /// valuation where one exists, the secondary the absolute value, so the
    /// integer ring picks the smallest-magnitude pivot.
    pub fn pivot_key(&self, x: &Scalar) -> (u64, Scalar) {
        let v = match self {
            LocalRing::Integers => 0,
            _ => self.valuation(x).unwrap_or(u64::MAX),
        };
        (v, self.normalize(x).abs())
    }

    /// Scale a canonical diagonal entry to its normal form: nonnegative over
    /// Z, a plain power of ell over the local rings. Returns the unit `u`
    /// with `u * x = canonical`.
    pub fn canonical_unit(&self, x: &Scalar) -> Scalar {
        if self.is_zero(x) {
            return Scalar::one();
        }
        match self {
            LocalRing::Integers => {
                if x.is_negative() {
                    -Scalar::one()
                } else {
                    Scalar::one()
                }
            }
            LocalRing::LocalizedAt { ell } => {
                let v = self.valuation(x).unwrap();
                let target = big(BigInt::from(*ell).pow(v as u32));
                target / x
            }
            LocalRing::ModPrimePower { ell, .. } => {
                let v = self.valuation(x).unwrap();
                let lp = BigInt::from(*ell).pow(v as u32);
                let unit = self.normalize(x).numer() / &lp;
                let m = self.modulus().unwrap();
                big(mod_inverse(&unit.mod_floor(&m), &m).unwrap())
            }
        }
    }
}

impl fmt::Display for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalRing::Integers => write!(f, "Z"),
            LocalRing::LocalizedAt { ell } => write!(f, "Z_({ell})"),
            LocalRing::ModPrimePower { ell, k } => write!(f, "Z/{ell}^{k}"),
        }
    }
}

/// Inverse of `a` mod `m` when `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn membership_and_units() {
        let z = LocalRing::integers();
        let z3 = LocalRing::localized_at(3).unwrap();
        let z3k = LocalRing::mod_prime_power(3, 4).unwrap();

        assert!(z.contains(&int(7)) && !z.contains(&q(1, 2)));
        assert!(z3.contains(&q(1, 2)) && !z3.contains(&q(1, 3)));
        assert!(z.is_unit(&int(-1)) && !z.is_unit(&int(2)));
        assert!(z3.is_unit(&int(2)) && !z3.is_unit(&int(6)));
        assert!(z3k.is_unit(&int(80)));
        // 80 = -1 mod 81
        assert_eq!(z3k.normalize(&int(-1)), int(80));
        assert_eq!(z3k.invert(&int(80)).unwrap(), int(80));
    }

    #[test]
    fn valuations() {
        let z5 = LocalRing::localized_at(5).unwrap();
        assert_eq!(z5.valuation(&int(50)), Some(2));
        assert_eq!(z5.valuation(&q(50, 3)), Some(2));
        assert_eq!(z5.valuation(&int(3)), Some(0));
        assert_eq!(z5.valuation(&int(0)), None);

        let z25 = LocalRing::mod_prime_power(5, 2).unwrap();
        assert_eq!(z25.valuation(&int(25)), None);
        assert_eq!(z25.valuation(&int(10)), Some(1));
    }

    #[test]
    fn division() {
        let z = LocalRing::integers();
        let (q1, r1) = z.div_rem(&int(7), &int(3));
        assert_eq!(int(7), q1 * int(3) + r1.clone());
        assert!(r1.abs() <= q(3, 2));

        let z3 = LocalRing::localized_at(3).unwrap();
        let (q2, r2) = z3.div_rem(&int(18), &int(6));
        assert!(r2.is_zero());
        assert_eq!(q2, int(3));
        let (_, r3) = z3.div_rem(&int(2), &int(3));
        assert_eq!(r3, int(2));

        let z27 = LocalRing::mod_prime_power(3, 3).unwrap();
        let (q4, r4) = z27.div_rem(&int(6), &int(3));
        assert!(r4.is_zero());
        assert_eq!(q4, int(2));
    }
}
