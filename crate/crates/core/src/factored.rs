//! Nonnegative integers kept in factored form.
//!
//! The bound pipeline multiplies prime powers whose plain value overflows
//! machine words quickly, so the canonical representation is a
//! `prime -> exponent` map; the integer value is reconstructed on demand.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

/// A positive integer stored as a map `prime -> exponent`; the empty map is 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactoredInt {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInt {
    pub fn one() -> Self {
        Self::default()
    }

    /// Build from explicit prime/exponent pairs. Zero exponents are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (p, e) in pairs {
            if !arith::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if e > 0 {
                *factors.entry(p).or_insert(0) += e;
            }
        }
        Ok(Self { factors })
    }

    /// Factor a `u64` by trial division.
    pub fn factor(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cannot factor 0".into()));
        }
        Ok(Self { factors: arith::factor(n).into_iter().collect() })
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn prime_factors(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        Self { factors }
    }

    pub fn mul_prime_power(&mut self, p: u64, e: u32) {
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|(p, e)| other.exponent_of(*p) >= *e)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let factors = self
            .factors
            .iter()
            .filter_map(|(&p, &e)| {
                let f = other.exponent_of(p).min(e);
                (f > 0).then_some((p, f))
            })
            .collect();
        Self { factors }
    }

    pub fn to_bigint(&self) -> BigInt {
        let mut acc = BigInt::one();
        for (&p, &e) in &self.factors {
            acc *= BigInt::from(p).pow(e);
        }
        acc
    }

    /// Value as `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p)?;
            }
        }
        Some(acc)
    }

    /// All divisors, in factored form, sorted by numeric value.
    /// Only sensible when the divisor count is moderate.
    pub fn divisors(&self) -> Vec<FactoredInt> {
        let mut out = vec![FactoredInt::one()];
        for (&p, &e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for d in &out {
                for k in 0..=e {
                    let mut f = d.clone();
                    f.mul_prime_power(p, k);
                    next.push(f);
                }
            }
            out = next;
        }
        out.sort_by_key(|f| f.to_bigint());
        out
    }

    /// The largest divisor coprime to `p`. With `p = 0` this is the number itself.
    pub fn prime_to_p_part(&self, p: u64) -> Self {
        let factors = self
            .factors
            .iter()
            .filter(|(&q, _)| q != p)
            .map(|(&q, &e)| (q, e))
            .collect();
        Self { factors }
    }

    /// Render as e.g. `"2^2 * 3"`; the unit renders as `"1"`.
    pub fn factored_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        self.factors
            .iter()
            .map(|(p, e)| if *e == 1 { format!("{p}") } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.factored_string())
    }
}

impl Serialize for FactoredInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FactoredInt", 2)?;
        s.serialize_field("factored", &self.factored_string())?;
        s.serialize_field("value", &self.to_bigint().to_string())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for FactoredInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            value: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        let n: u64 = repr.value.parse().map_err(serde::de::Error::custom)?;
        FactoredInt::factor(n).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let n = FactoredInt::factor(5760).unwrap();
        assert_eq!(n.factored_string(), "2^7 * 3^2 * 5");
        assert_eq!(n.to_u64(), Some(5760));
        assert_eq!(FactoredInt::one().factored_string(), "1");
        assert_eq!(FactoredInt::one().to_bigint(), BigInt::one());
    }

    #[test]
    fn divisor_lattice() {
        let n = FactoredInt::factor(12).unwrap();
        let ds: Vec<u64> = n.divisors().iter().map(|d| d.to_u64().unwrap()).collect();
        assert_eq!(ds, [1, 2, 3, 4, 6, 12]);
        let m = FactoredInt::factor(8).unwrap();
        assert_eq!(n.gcd(&m).to_u64(), Some(4));
        assert!(FactoredInt::factor(4).unwrap().divides(&n));
        assert!(!FactoredInt::factor(8).unwrap().divides(&n));
    }

    #[test]
    fn prime_to_p() {
        let n = FactoredInt::factor(360).unwrap();
        assert_eq!(n.prime_to_p_part(2).to_u64(), Some(45));
        assert_eq!(n.prime_to_p_part(0).to_u64(), Some(360));
    }
}
