//! Element orders in classical groups over prime fields.
//!
//! Two independent routes live here side by side. The cheap route decides
//! "does GL_n(F_ell) / Sp_2m(F_ell) contain an element of order q^r?" from
//! the multiplicative order of ell modulo q^r. The expensive route actually
//! enumerates or samples the groups and reads the element orders off; it
//! exists to keep the cheap route honest, so it deliberately shares no code
//! with it beyond basic modular arithmetic.
//!
//! The GL criterion: an element of order q^r (q != ell prime) exists iff the
//! degree of F_ell(zeta_{q^r}) over F_ell is at most n. The symplectic rule
//! additionally accounts for eigenvalues pairing with their inverses: the
//! minimal block is d when some power of ell is -1 mod q^r (the irreducible
//! factor of the cyclotomic polynomial is self-reciprocal) and 2d otherwise.
//! The symplectic rule for general moduli is an artifact rule validated
//! against the enumeration oracles, not a quoted theorem.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, is_prime, multiplicative_order};
use crate::error::{Error, Result};
use crate::factored::FactoredInt;

pub const DEFAULT_SPECTRUM_BUDGET: u64 = 1_000_000;
pub const DEFAULT_SAMPLE_COUNT: u64 = 100_000;

/// A prime power q^r with its value cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub q: u64,
    pub r: u32,
    pub value: u64,
}

impl PrimePower {
    pub fn new(q: u64, r: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if r == 0 {
            return Err(Error::InvalidInput("exponent must be >= 1".into()));
        }
        Ok(PrimePower { q, r, value: arith::checked_pow(q, r)? })
    }

    /// All prime powers with value <= bound, ascending by value.
    pub fn up_to(bound: u64) -> Vec<PrimePower> {
        let mut out = Vec::new();
        for q in arith::primes_in(2, bound) {
            let mut r = 1u32;
            while let Ok(pp) = PrimePower::new(q, r) {
                if pp.value > bound {
                    break;
                }
                out.push(pp);
                r += 1;
            }
        }
        out.sort_by_key(|pp| pp.value);
        out
    }
}

/// Least d with ell^d = 1 mod n; this is the degree of F_ell(zeta_n) over
/// F_ell when gcd(ell, n) = 1.
pub fn mult_order(ell: u64, n: u64) -> Result<u64> {
    multiplicative_order(ell, n)
}

/// Does GL_n(F_ell) contain an element of exact order q^r?
/// Requires q != ell; the field-degree criterion does not cover q = ell.
pub fn gl_has_element_of_order(n: usize, pp: PrimePower, ell: u64) -> Result<bool> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if pp.q == ell {
        return Err(Error::CriterionInapplicable(ell));
    }
    Ok(mult_order(ell, pp.value)? <= n as u64)
}

/// Minimal dimension of a symplectic block carrying a primitive m-th root
/// of unity eigenvalue over F_ell (m coprime to ell). The +/-1 eigenvalues
/// force even-dimensional non-degenerate eigenspaces, hence the m <= 2
/// special cases.
fn symplectic_block_dim(m: u64, ell: u64) -> Result<u64> {
    Ok(match m {
        1 => 0,
        2 => 2,
        _ => {
            let d = mult_order(ell, m)?;
            if arith::minus_one_in_cyclic(ell, m)? {
                d
            } else {
                2 * d
            }
        }
    })
}

/// Does Sp_2m(F_ell) contain an element of exact order q^r?
///
/// Orders 1 and 2 are always present through the identity and its negative.
/// For q^r > 2 the rule is: with d the multiplicative order of ell mod q^r,
/// the order exists iff d <= 2m when -1 is a power of ell mod q^r, and iff
/// 2d <= 2m otherwise.
pub fn sp_has_element_of_order(m: usize, pp: PrimePower, ell: u64) -> Result<bool> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if pp.q == ell {
        return Err(Error::CriterionInapplicable(ell));
    }
    if pp.value <= 2 {
        return Ok(m >= 1);
    }
    Ok(symplectic_block_dim(pp.value, ell)? <= 2 * m as u64)
}

/// Minimal symplectic dimension over F_ell carrying a single element of
/// exact (possibly composite) order n coprime to ell.
///
/// A semisimple element of order n decomposes into blocks, one per divisor
/// it realizes; the blocks must jointly realize every maximal prime power
/// of n. Minimizing the total dimension is a covering problem over the
/// divisors of n, solved by a subset DP on the primes of n.
pub fn min_symplectic_dim_for_order(n: u64, ell: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    if n == 1 {
        return Ok(0);
    }
    if arith::gcd(n, ell) != 1 {
        return Err(Error::NotCoprime(n, ell));
    }
    let fact = FactoredInt::factor(n)?;
    let primes: Vec<(u64, u32)> = fact.prime_factors().collect();
    let full: usize = (1 << primes.len()) - 1;
    let mut dp = vec![u64::MAX; full + 1];
    dp[0] = 0;
    let divisors = fact.divisors();
    let mut blocks = Vec::new();
    for d in &divisors {
        let v = d.to_u64().expect("divisor of a u64 fits");
        if v == 1 {
            continue;
        }
        let mut mask = 0usize;
        for (i, &(p, e)) in primes.iter().enumerate() {
            if d.exponent_of(p) == e {
                mask |= 1 << i;
            }
        }
        if mask != 0 {
            blocks.push((mask, symplectic_block_dim(v, ell)?));
        }
    }
    for state in 0..=full {
        if dp[state] == u64::MAX {
            continue;
        }
        for &(mask, cost) in &blocks {
            let next = state | mask;
            let total = dp[state].saturating_add(cost);
            if total < dp[next] {
                dp[next] = total;
            }
        }
    }
    Ok(dp[full])
}

/// Which classical family a spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFamily {
    Gl,
    Sl,
    Sp,
}

impl GroupFamily {
    fn name(self) -> &'static str {
        match self {
            GroupFamily::Gl => "GL",
            GroupFamily::Sl => "SL",
            GroupFamily::Sp => "Sp",
        }
    }
}

/// |GL_n(F_ell)|, factored.
pub fn gl_group_order(n: usize, ell: u64) -> Result<FactoredInt> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let mut order = FactoredInt::one();
    order.mul_prime_power(ell, (n * (n - 1) / 2) as u32);
    for i in 1..=n {
        order = order.mul(&factor_ell_power_minus_one(ell, i as u32)?);
    }
    Ok(order)
}

/// |SL_n(F_ell)|, factored.
pub fn sl_group_order(n: usize, ell: u64) -> Result<FactoredInt> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let mut order = FactoredInt::one();
    order.mul_prime_power(ell, (n * (n - 1) / 2) as u32);
    for i in 2..=n {
        order = order.mul(&factor_ell_power_minus_one(ell, i as u32)?);
    }
    Ok(order)
}

/// |Sp_2m(F_ell)| = ell^(m^2) prod_{i=1..m} (ell^(2i) - 1), factored.
pub fn sp_group_order(m: usize, ell: u64) -> Result<FactoredInt> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let mut order = FactoredInt::one();
    order.mul_prime_power(ell, (m * m) as u32);
    for i in 1..=m {
        order = order.mul(&factor_ell_power_minus_one(ell, 2 * i as u32)?);
    }
    Ok(order)
}

/// Factor ell^i - 1 through the cyclotomic splitting
/// ell^i - 1 = prod_{d | i} Phi_d(ell), which keeps every piece small
/// enough for trial division.
fn factor_ell_power_minus_one(ell: u64, i: u32) -> Result<FactoredInt> {
    let mut out = FactoredInt::one();
    for d in 1..=i as u64 {
        if i as u64 % d != 0 {
            continue;
        }
        let phi_val = eval_cyclotomic(d, ell)?;
        out = out.mul(&FactoredInt::factor(phi_val)?);
    }
    Ok(out)
}

fn eval_cyclotomic(d: u64, x: u64) -> Result<u64> {
    let coeffs = cyclotomic_poly(d);
    let xb = BigInt::from(x);
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &xb + c;
    }
    acc.to_u64()
        .ok_or_else(|| Error::InvalidInput(format!("Phi_{d}({x}) exceeds u64")))
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial, exact.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
        let mut rem = num.to_vec();
        let mut quot = vec![BigInt::zero(); num.len() - den.len() + 1];
        let lead = den.last().expect("nonzero divisor");
        for k in (0..quot.len()).rev() {
            let c = &rem[k + den.len() - 1] / lead;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in den.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
        }
        debug_assert!(rem.iter().all(|c| c.is_zero()));
        quot
    }

    let mut memo: HashMap<u64, Vec<BigInt>> = HashMap::new();
    memo.insert(1, vec![BigInt::from(-1), BigInt::one()]);
    for d in 2..=n {
        if n % d != 0 {
            continue;
        }
        // x^d - 1 divided by all Phi_e with e | d, e < d
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = BigInt::from(-1);
        num[d as usize] = BigInt::one();
        let mut acc = num;
        for e in 1..d {
            if d % e == 0 {
                acc = poly_div_exact(&acc, &memo[&e]);
            }
        }
        memo.insert(d, acc);
    }
    memo.remove(&n).expect("n >= 1")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReciprocalPairing {
    /// The factor's roots are closed under inversion.
    SelfReciprocal,
    /// The roots' inverses are the roots of the factor at this index.
    PairedWith(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclotomicFactor {
    /// Exponents a with zeta^a a root of this factor (an orbit of
    /// multiplication by ell on the primitive residues mod n).
    pub root_exponents: Vec<u64>,
    pub degree: u64,
    pub pairing: ReciprocalPairing,
}

/// Degrees and inverse-closure structure of the irreducible factors of the
/// n-th cyclotomic polynomial over F_ell, read off the orbits of
/// multiplication by ell on (Z/n)^*.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclotomicFactorProfile {
    pub n: u64,
    pub ell: u64,
    pub factor_degree: u64,
    pub factors: Vec<CyclotomicFactor>,
}

pub fn cyclotomic_factor_profile(n: u64, ell: u64) -> Result<CyclotomicFactorProfile> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if arith::gcd(n, ell) != 1 {
        return Err(Error::NotCoprime(n, ell));
    }
    if n == 1 {
        return Ok(CyclotomicFactorProfile {
            n,
            ell,
            factor_degree: 1,
            factors: vec![CyclotomicFactor {
                root_exponents: vec![0],
                degree: 1,
                pairing: ReciprocalPairing::SelfReciprocal,
            }],
        });
    }
    let d = mult_order(ell, n)?;
    let mut orbit_of: HashMap<u64, usize> = HashMap::new();
    let mut orbits: Vec<Vec<u64>> = Vec::new();
    for a in 1..n {
        if arith::gcd(a, n) != 1 || orbit_of.contains_key(&a) {
            continue;
        }
        let idx = orbits.len();
        let mut member = a;
        let mut orbit = Vec::new();
        loop {
            orbit_of.insert(member, idx);
            orbit.push(member);
            member = arith::mul_mod(member, ell, n);
            if member == a {
                break;
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    let factors = orbits
        .iter()
        .map(|orbit| {
            let a = orbit[0];
            let mate = orbit_of[&(n - a)];
            let pairing = if orbits[mate][0] == a {
                ReciprocalPairing::SelfReciprocal
            } else {
                ReciprocalPairing::PairedWith(mate)
            };
            CyclotomicFactor { root_exponents: orbit.clone(), degree: orbit.len() as u64, pairing }
        })
        .collect();
    Ok(CyclotomicFactorProfile { n, ell, factor_degree: d, factors })
}

// ---------------------------------------------------------------------------
// Brute-force order spectra
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SpectrumMethod {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// Observed element orders of one classical group over a prime field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderSpectrum {
    pub family: GroupFamily,
    /// Matrix dimension (2m for the symplectic family).
    pub dimension: usize,
    pub ell: u64,
    pub group_order: FactoredInt,
    pub orders: BTreeSet<u64>,
    pub method: SpectrumMethod,
}

impl OrderSpectrum {
    pub fn contains(&self, order: u64) -> bool {
        self.orders.contains(&order)
    }

    pub fn describe(&self) -> String {
        format!("{}_{}(F_{})", self.family.name(), self.dimension, self.ell)
    }
}

/// Dense matrices over F_p with u64 entries; the fast path for enumeration
/// and sampling. Kept separate from the exact rational matrices on purpose:
/// the oracle should not share an arithmetic stack with what it checks.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FpMat {
    n: usize,
    p: u64,
    e: Vec<u64>,
}

impl FpMat {
    fn zero(n: usize, p: u64) -> Self {
        FpMat { n, p, e: vec![0; n * n] }
    }

    fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zero(n, p);
        for i in 0..n {
            m.e[i * n + i] = 1;
        }
        m
    }

    fn is_identity(&self) -> bool {
        self.e
            .iter()
            .enumerate()
            .all(|(idx, &x)| x == u64::from(idx / self.n == idx % self.n))
    }

    fn mul(&self, other: &FpMat) -> FpMat {
        let n = self.n;
        let p = self.p;
        let mut out = FpMat::zero(n, p);
        for i in 0..n {
            for k in 0..n {
                let a = self.e[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.e[i * n + j] = (out.e[i * n + j] + a * other.e[k * n + j]) % p;
                }
            }
        }
        out
    }

    fn pow(&self, mut exp: u64) -> FpMat {
        let mut acc = FpMat::identity(self.n, self.p);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn key(&self) -> u128 {
        let mut acc: u128 = 0;
        for &x in &self.e {
            acc = acc * self.p as u128 + x as u128;
        }
        acc
    }

    fn det(&self) -> u64 {
        let n = self.n;
        let p = self.p;
        let mut m = self.e.clone();
        let mut det = 1u64;
        for t in 0..n {
            let Some(piv) = (t..n).find(|&i| m[i * n + t] % p != 0) else { return 0 };
            if piv != t {
                for j in 0..n {
                    m.swap(piv * n + j, t * n + j);
                }
                det = (p - det) % p;
            }
            let pv = m[t * n + t];
            det = arith::mul_mod(det, pv, p);
            let inv = arith::pow_mod(pv, p - 2, p);
            for i in (t + 1)..n {
                let f = arith::mul_mod(m[i * n + t], inv, p);
                if f == 0 {
                    continue;
                }
                for j in t..n {
                    let sub = arith::mul_mod(f, m[t * n + j], p);
                    m[i * n + j] = (m[i * n + j] + p - sub) % p;
                }
            }
        }
        det
    }
}

fn gl_generators(n: usize, p: u64) -> Vec<FpMat> {
    let mut gens = sl_generators(n, p);
    if p > 2 {
        let alpha = primitive_root(p);
        let mut d = FpMat::identity(n, p);
        d.e[0] = alpha;
        gens.push(d);
    }
    if gens.is_empty() {
        gens.push(FpMat::identity(n, p));
    }
    gens
}

fn sl_generators(n: usize, p: u64) -> Vec<FpMat> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut t = FpMat::identity(n, p);
                t.e[i * n + j] = 1;
                gens.push(t);
            }
        }
    }
    gens
}

/// Symplectic transvections x -> x + e(x, v) v for projective
/// representatives v, with the block form [[0, I], [-I, 0]]. These generate
/// the full symplectic group.
fn sp_generators(m: usize, p: u64) -> Vec<FpMat> {
    let n = 2 * m;
    let mut gens = Vec::new();
    let mut v = vec![0u64; n];
    loop {
        // advance v through F_p^n
        let mut idx = 0;
        while idx < n {
            v[idx] += 1;
            if v[idx] < p {
                break;
            }
            v[idx] = 0;
            idx += 1;
        }
        if idx == n {
            break;
        }
        // projective representative: first nonzero coordinate = 1
        match v.iter().find(|&&x| x != 0) {
            Some(&lead) if lead == 1 => (),
            _ => continue,
        }
        // w = J v with J = [[0, I], [-I, 0]]
        let mut w = vec![0u64; n];
        for i in 0..m {
            w[i] = v[m + i];
            w[m + i] = (p - v[i]) % p;
        }
        let mut t = FpMat::identity(n, p);
        for i in 0..n {
            for j in 0..n {
                t.e[i * n + j] = (t.e[i * n + j] + v[i] * w[j]) % p;
            }
        }
        gens.push(t);
    }
    gens
}

fn primitive_root(p: u64) -> u64 {
    (2..p)
        .find(|&g| multiplicative_order(g, p).map(|d| d == p - 1).unwrap_or(false))
        .expect("prime fields have primitive roots")
}

fn family_generators(family: GroupFamily, dimension: usize, ell: u64) -> Result<Vec<FpMat>> {
    match family {
        GroupFamily::Gl => Ok(gl_generators(dimension, ell)),
        GroupFamily::Sl => Ok(sl_generators(dimension, ell)),
        GroupFamily::Sp => {
            if dimension % 2 != 0 {
                return Err(Error::InvalidInput("symplectic dimension must be even".into()));
            }
            Ok(sp_generators(dimension / 2, ell))
        }
    }
}

pub fn family_group_order(family: GroupFamily, dimension: usize, ell: u64) -> Result<FactoredInt> {
    match family {
        GroupFamily::Gl => gl_group_order(dimension, ell),
        GroupFamily::Sl => sl_group_order(dimension, ell),
        GroupFamily::Sp => {
            if dimension % 2 != 0 {
                return Err(Error::InvalidInput("symplectic dimension must be even".into()));
            }
            sp_group_order(dimension / 2, ell)
        }
    }
}

/// All divisors of `n`, factoring it against the known prime set of the
/// group order.
fn divisors_within(n: u64, group_order: &FactoredInt) -> Vec<u64> {
    let mut divs = vec![1u64];
    let mut rest = n;
    for (p, _) in group_order.prime_factors() {
        let mut v = 0u32;
        while rest % p == 0 {
            rest /= p;
            v += 1;
        }
        if v > 0 {
            let mut next = Vec::with_capacity(divs.len() * (v as usize + 1));
            for &d in &divs {
                let mut pk = 1u64;
                for _ in 0..=v {
                    next.push(d * pk);
                    pk *= p;
                }
            }
            divs = next;
        }
    }
    debug_assert_eq!(rest, 1, "element order must divide the group order");
    divs
}

/// Exact order of a group element, peeling prime factors off the known
/// group order.
fn element_order(g: &FpMat, group_order: &FactoredInt, order_u64: u64) -> u64 {
    let mut order = 1u64;
    for (p, e) in group_order.prime_factors() {
        let cofactor = order_u64 / p.pow(e);
        let mut h = g.pow(cofactor);
        let mut f = 0u32;
        while !h.is_identity() {
            h = h.pow(p);
            f += 1;
            debug_assert!(f <= e);
        }
        order *= p.pow(f);
    }
    order
}

/// Enumerate or sample a classical group and report the set of element
/// orders seen. Exhaustive mode refuses groups larger than the budget and
/// verifies that the closure size matches the order formula; sampled mode
/// is seeded and reproducible, with samples indexed so results do not
/// depend on evaluation order.
pub fn brute_force_spectrum(
    family: GroupFamily,
    dimension: usize,
    ell: u64,
    method: SpectrumMethod,
    budget: u64,
) -> Result<OrderSpectrum> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if dimension == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    let group_order = family_group_order(family, dimension, ell)?;
    if matches!(method, SpectrumMethod::Exhaustive)
        && group_order.to_bigint() > BigInt::from(budget)
    {
        return Err(Error::BudgetExceeded { order: group_order.to_bigint().to_string(), budget });
    }
    let order_u64 = group_order
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("group order exceeds u64".into()))?;
    let gens = family_generators(family, dimension, ell)?;

    let orders = match method {
        SpectrumMethod::Exhaustive => {
            let elements = closure(&gens, dimension, ell, order_u64)?;
            if elements.len() as u64 != order_u64 {
                return Err(Error::Internal(format!(
                    "closure produced {} elements, expected {order_u64}",
                    elements.len()
                )));
            }
            elements
                .iter()
                .map(|g| element_order(g, &group_order, order_u64))
                .collect::<BTreeSet<u64>>()
        }
        SpectrumMethod::Sampled { count, seed } => {
            let mut orders = BTreeSet::new();
            orders.insert(1);
            for i in 0..count {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
                let g = sample_element(family, dimension, ell, &gens, &mut rng);
                let n = element_order(&g, &group_order, order_u64);
                // The powers of g realize every divisor of n as an exact
                // order, so record them all; exact orders that are sparse in
                // the group (involutions, say) are still caught this way.
                orders.extend(divisors_within(n, &group_order));
            }
            orders
        }
    };

    for &o in &orders {
        if order_u64 % o != 0 {
            return Err(Error::Internal(format!("observed order {o} does not divide the group order")));
        }
    }
    Ok(OrderSpectrum { family, dimension, ell, group_order, orders, method })
}

fn closure(gens: &[FpMat], n: usize, p: u64, expected: u64) -> Result<Vec<FpMat>> {
    let mut seen: HashMap<u128, usize> = HashMap::with_capacity(expected as usize);
    let identity = FpMat::identity(n, p);
    let mut elements = vec![identity.clone()];
    seen.insert(identity.key(), 0);
    let mut frontier = 0usize;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in gens {
            let next = current.mul(g);
            let key = next.key();
            if !seen.contains_key(&key) {
                seen.insert(key, elements.len());
                elements.push(next);
                if elements.len() as u64 > expected {
                    return Err(Error::Internal("closure exceeded the group order formula".into()));
                }
            }
        }
    }
    Ok(elements)
}

fn sample_element(
    family: GroupFamily,
    n: usize,
    p: u64,
    gens: &[FpMat],
    rng: &mut ChaCha8Rng,
) -> FpMat {
    match family {
        GroupFamily::Gl | GroupFamily::Sl => {
            // Uniform over GL by rejection; SL by scaling the first row with
            // det^-1, which maps the uniform measure on GL onto SL.
            loop {
                let mut g = FpMat::zero(n, p);
                for x in g.e.iter_mut() {
                    *x = rng.random_range(0..p);
                }
                let d = g.det();
                if d == 0 {
                    continue;
                }
                if matches!(family, GroupFamily::Sl) {
                    let inv = arith::pow_mod(d, p - 2, p);
                    for j in 0..n {
                        g.e[j] = arith::mul_mod(g.e[j], inv, p);
                    }
                }
                return g;
            }
        }
        GroupFamily::Sp => {
            // Random word in the transvection generators.
            let mut g = FpMat::identity(n, p);
            for _ in 0..48 {
                let pick = rng.random_range(0..gens.len());
                g = g.mul(&gens[pick]);
            }
            g
        }
    }
}
