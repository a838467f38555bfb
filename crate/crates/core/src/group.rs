//! Finite matrix groups given by generators: closure enumeration, the
//! averaging idempotent, and equivariant splittings of lattices mod ell^k.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ring::{big, LocalRing, Scalar};
use crate::snf::{rank_mod, row_reduce_mod, solve_over};

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// A finite group of invertible matrices over a ring, materialized as its
/// full element list. The element list always starts with the identity and
/// is closed under products and inverses.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    ring: LocalRing,
    ambient_rank: usize,
    generators: Vec<Mat>,
    elements: Vec<Mat>,
}

impl MatrixGroup {
    pub fn trivial(ring: LocalRing, ambient_rank: usize) -> Self {
        MatrixGroup { ring, ambient_rank, generators: vec![], elements: vec![Mat::identity(ambient_rank)] }
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Conjugate the whole group by `p` (new element `p^-1 g p`), e.g. to
    /// follow a change of basis. `p` must be invertible over the ring.
    pub fn conjugated_by(&self, p: &Mat) -> Result<Self> {
        let p_inv = p.inverse_over(&self.ring)?;
        let conj = |g: &Mat| p_inv.mul(g).mul(p).normalize_in(&self.ring);
        Ok(MatrixGroup {
            ring: self.ring,
            ambient_rank: self.ambient_rank,
            generators: self.generators.iter().map(conj).collect(),
            elements: self.elements.iter().map(conj).collect(),
        })
    }
}

fn element_key(ring: &LocalRing, m: &Mat) -> Vec<Scalar> {
    m.normalize_in(ring).entries().cloned().collect()
}

/// Breadth-first closure of a generating set. Errors out once more than
/// `cap` distinct elements appear, which is the practical signal that the
/// generated group is infinite.
pub fn close_group(ring: LocalRing, generators: &[Mat], cap: usize) -> Result<MatrixGroup> {
    if cap == 0 {
        return Err(Error::InvalidInput("closure cap must be >= 1".into()));
    }
    let rank = generators.first().map_or(0, |g| g.rows());
    for g in generators {
        if !g.is_square() || g.rows() != rank {
            return Err(Error::Dimension("generators must be square of equal size".into()));
        }
        if !g.in_ring(&ring) {
            return Err(Error::NotInRing("generator entry".into(), ring.to_string()));
        }
        if !ring.is_unit(&g.det()) {
            return Err(Error::NotInvertible(ring.to_string()));
        }
    }
    let gens: Vec<Mat> = generators.iter().map(|g| g.normalize_in(&ring)).collect();
    let identity = Mat::identity(rank);
    let mut seen: HashMap<Vec<Scalar>, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    seen.insert(element_key(&ring, &identity), 0);
    let mut frontier = 0usize;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in &gens {
            let next = current.mul(g).normalize_in(&ring);
            let key = element_key(&ring, &next);
            if !seen.contains_key(&key) {
                if elements.len() >= cap {
                    return Err(Error::ClosureCapExceeded { cap });
                }
                seen.insert(key, elements.len());
                elements.push(next);
            }
        }
    }
    Ok(MatrixGroup { ring, ambient_rank: rank, generators: gens, elements })
}

/// The averaging operator `u = (1/|G|) sum_g g`.
///
/// Over Z_(ell) and Z/ell^k the group order must be prime to ell; over Z the
/// operator lives in the fraction field and is returned as an exact rational
/// matrix.
#[derive(Debug, Clone)]
pub struct AveragingOperator {
    pub matrix: Mat,
}

impl AveragingOperator {
    pub fn is_idempotent(&self, ring: &LocalRing) -> bool {
        let u = &self.matrix;
        u.mul(u).normalize_in(ring) == u.normalize_in(ring)
    }
}

pub fn average(group: &MatrixGroup, ring: &LocalRing) -> Result<AveragingOperator> {
    let order = group.order();
    if let Some(ell) = ring.residue_prime() {
        if order as u64 % ell == 0 {
            return Err(Error::OrderDivisibleByEll { order, ell });
        }
    }
    let mut sum = Mat::zero(group.ambient_rank(), group.ambient_rank());
    for g in group.elements() {
        sum = sum.add(g);
    }
    let inv_order = Scalar::one() / big(BigInt::from(order));
    Ok(AveragingOperator { matrix: sum.scale(&inv_order).normalize_in(ring) })
}

/// Check `g^T gram g = gram` for every matrix in `mats` (exact over the
/// ring). Generators suffice mathematically, but callers may pass a full
/// element list.
pub fn check_invariance(ring: &LocalRing, gram: &Mat, mats: &[Mat]) -> bool {
    let gram = gram.normalize_in(ring);
    mats.iter().all(|g| g.transpose().mul(&gram).mul(g).normalize_in(ring) == gram)
}

/// A direct-sum splitting of the full lattice mod ell^k into two G-stable
/// sublattices, `part` reducing mod ell to a prescribed subspace.
#[derive(Debug, Clone)]
pub struct InvariantSplitting {
    /// Basis (columns) of the lift of the prescribed subspace.
    pub part: Mat,
    /// Basis (columns) of a G-stable complement.
    pub complement: Mat,
    /// The equivariant idempotent projecting onto `part` along `complement`.
    pub projector: Mat,
}

/// Is the mod-ell column span of `subspace` stable under every generator?
fn is_stable_mod(ell: u64, subspace: &Mat, gens: &[Mat]) -> Result<bool> {
    let ring = LocalRing::mod_prime_power(ell, 1)?;
    for g in gens {
        let image = g.mul(subspace);
        let stacked = subspace.hstack(&image);
        if rank_mod(&stacked, ell)? != rank_mod(subspace, ell)? {
            return Ok(false);
        }
        let _ = ring; // rank comparison is the whole check
    }
    Ok(true)
}

/// Lift a G-stable subspace of M/ell M to a G-invariant splitting
/// M = M1 (+) M2 mod ell^k.
///
/// Construction: project onto the subspace along an arbitrary complement,
/// average the projector over the group (possible since ell does not divide
/// |G|), lift entries to Z/ell^k, re-average there, then sharpen with the
/// idempotent iteration `e <- 3e^2 - 2e^3` until exactly idempotent at
/// precision k. Averaging makes the projector exactly equivariant and the
/// iteration, being a polynomial in the projector, preserves that.
pub fn invariant_splitting(
    subspace_mod_ell: &Mat,
    group: &MatrixGroup,
    ell: u64,
    k: u32,
) -> Result<InvariantSplitting> {
    let n = group.ambient_rank();
    if subspace_mod_ell.rows() != n {
        return Err(Error::Dimension("subspace does not match the group's ambient rank".into()));
    }
    let order = group.order();
    if order as u64 % ell == 0 {
        return Err(Error::OrderDivisibleByEll { order, ell });
    }
    if !is_stable_mod(ell, subspace_mod_ell, group.elements())? {
        return Err(Error::NotStableMod { ell });
    }
    let ring_k = LocalRing::mod_prime_power(ell, k)?;
    let s = rank_mod(subspace_mod_ell, ell)?;

    // Arbitrary projector mod ell onto the subspace: complete the basis by
    // standard vectors and project along them.
    let mut basis = reduce_to_independent_columns(subspace_mod_ell, ell)?;
    for j in 0..n {
        if basis.cols() == n {
            break;
        }
        let mut e = Mat::zero(n, 1);
        e[(j, 0)] = Scalar::one();
        let candidate = basis.hstack(&e);
        if rank_mod(&candidate, ell)? == basis.cols() + 1 {
            basis = candidate;
        }
    }
    let ring1 = LocalRing::mod_prime_power(ell, 1)?;
    let basis_inv = basis.inverse_over(&ring1)?;
    let mut diag = Mat::zero(n, n);
    for i in 0..s {
        diag[(i, i)] = Scalar::one();
    }
    let pi0 = basis.mul(&diag).mul(&basis_inv).normalize_in(&ring1);

    let averaged = |pi: &Mat, ring: &LocalRing| -> Result<Mat> {
        let mut sum = Mat::zero(n, n);
        for g in group.elements() {
            let g_inv = g.inverse_over(ring)?;
            sum = sum.add(&g.mul(pi).mul(&g_inv));
        }
        let inv_order = ring.invert(&big(BigInt::from(order)))?;
        Ok(sum.scale(&inv_order).normalize_in(ring))
    };

    // Equivariant mod ell, then lifted and re-averaged at full precision.
    let pi_bar = averaged(&pi0, &ring1)?;
    let mut pi = averaged(&pi_bar, &ring_k)?;
    let mut iterations = 0;
    loop {
        let pi2 = pi.mul(&pi).normalize_in(&ring_k);
        if pi2 == pi {
            break;
        }
        // 3 pi^2 - 2 pi^3
        let pi3 = pi2.mul(&pi).normalize_in(&ring_k);
        pi = pi2.scale(&crate::ring::int(3)).sub(&pi3.scale(&crate::ring::int(2))).normalize_in(&ring_k);
        iterations += 1;
        if iterations > 64 {
            return Err(Error::Internal("idempotent iteration failed to converge".into()));
        }
    }

    let one_minus_pi = Mat::identity(n).sub(&pi).normalize_in(&ring_k);
    let part = independent_columns_mod(&pi, ell, s)?;
    let complement = independent_columns_mod(&one_minus_pi, ell, n - s)?;
    let stacked = part.hstack(&complement);
    if rank_mod(&stacked, ell)? != n {
        return Err(Error::Internal("splitting is not direct".into()));
    }
    Ok(InvariantSplitting { part, complement, projector: pi })
}

/// Select `want` columns of `m` that are independent mod ell.
fn independent_columns_mod(m: &Mat, ell: u64, want: usize) -> Result<Mat> {
    let (_, pivots) = row_reduce_mod(m, ell)?;
    if pivots.len() < want {
        return Err(Error::Internal(format!(
            "expected {want} independent columns, found {}",
            pivots.len()
        )));
    }
    Ok(m.select_columns(&pivots[..want]))
}

fn reduce_to_independent_columns(m: &Mat, ell: u64) -> Result<Mat> {
    let (_, pivots) = row_reduce_mod(m, ell)?;
    Ok(m.select_columns(&pivots))
}

/// Rank of the subspace fixed pointwise by the whole group, computed by
/// solving `(g - 1) x = 0` for all generators simultaneously over the
/// fraction field. Used as an independent cross-check of the averaging
/// operator's rank.
pub fn fixed_space_rank(group: &MatrixGroup) -> usize {
    let n = group.ambient_rank();
    if group.generators().is_empty() {
        return n;
    }
    let mut stacked = Mat::zero(0, n);
    for g in group.generators() {
        let gm1 = g.sub(&Mat::identity(n));
        stacked = if stacked.rows() == 0 {
            gm1
        } else {
            let rows = stacked.rows() + gm1.rows();
            Mat::from_fn(rows, n, |i, j| {
                if i < stacked.rows() {
                    stacked[(i, j)].clone()
                } else {
                    gm1[(i - stacked.rows(), j)].clone()
                }
            })
        };
    }
    n - stacked.rank()
}

/// Membership of a vector in a sublattice spanned by `basis` over the ring.
pub fn in_span(ring: &LocalRing, basis: &Mat, v: &Mat) -> Result<bool> {
    Ok(solve_over(ring, basis, v)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    #[test]
    fn closure_orders() {
        let z = LocalRing::Integers;
        let neg = Mat::from_i64_rows(&[&[-1, 0], &[0, -1]]);
        let g = close_group(z, &[neg], 100).unwrap();
        assert_eq!(g.order(), 2);

        let rot = Mat::from_i64_rows(&[&[0, -1], &[1, 0]]);
        let g = close_group(z, &[rot], 100).unwrap();
        assert_eq!(g.order(), 4);

        let unipotent = Mat::from_i64_rows(&[&[1, 1], &[0, 1]]);
        match close_group(z, &[unipotent], 100) {
            Err(Error::ClosureCapExceeded { cap: 100 }) => (),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn closure_rejects_non_units() {
        let z = LocalRing::Integers;
        let two = Mat::from_i64_rows(&[&[2]]);
        assert!(close_group(z, &[two], 10).is_err());
        // ...but 2 is invertible at 3.
        let z3 = LocalRing::localized_at(3).unwrap();
        let g = close_group(z3, &[Mat::from_i64_rows(&[&[-1]])], 10).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn averaging_examples() {
        let z3 = LocalRing::localized_at(3).unwrap();
        let trivial = MatrixGroup::trivial(z3, 2);
        let u = average(&trivial, &z3).unwrap();
        assert_eq!(u.matrix, Mat::identity(2));

        let neg = Mat::from_i64_rows(&[&[-1, 0], &[0, -1]]);
        let pm = close_group(z3, &[neg], 10).unwrap();
        let u = average(&pm, &z3).unwrap();
        assert!(u.matrix.is_zero_matrix());

        // cyclic coordinate 3-cycle over Z_(5): every entry of u is 1/3
        let z5 = LocalRing::localized_at(5).unwrap();
        let cycle = Mat::from_i64_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let c3 = close_group(z5, &[cycle], 10).unwrap();
        assert_eq!(c3.order(), 3);
        let u = average(&c3, &z5).unwrap();
        let third = Scalar::one() / int(3);
        assert!(u.matrix.entries().all(|x| *x == third));
        assert!(u.is_idempotent(&z5));
    }

    #[test]
    fn averaging_requires_coprime_order() {
        let z3 = LocalRing::localized_at(3).unwrap();
        let cycle = Mat::from_i64_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let c3 = close_group(z3, &[cycle], 10).unwrap();
        assert!(matches!(average(&c3, &z3), Err(Error::OrderDivisibleByEll { .. })));
    }

    #[test]
    fn invariance_checks() {
        let z = LocalRing::Integers;
        let j = Mat::from_i64_rows(&[&[0, 1], &[-1, 0]]);
        assert!(check_invariance(&z, &j, &[]));
        let rot = Mat::from_i64_rows(&[&[0, -1], &[1, 0]]);
        assert!(check_invariance(&z, &j, &[rot]));
        let stretch = Mat::from_i64_rows(&[&[2, 0], &[0, 1]]);
        assert!(!check_invariance(&z, &j, &[stretch]));
    }

    #[test]
    fn splitting_trivial_group() {
        let z = LocalRing::Integers;
        let trivial = MatrixGroup::trivial(z, 3);
        let sub = Mat::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 0]]);
        let split = invariant_splitting(&sub, &trivial, 5, 6).unwrap();
        assert_eq!(split.part.cols(), 2);
        assert_eq!(split.complement.cols(), 1);
        let ring = LocalRing::mod_prime_power(5, 6).unwrap();
        let pi = &split.projector;
        assert_eq!(pi.mul(pi).normalize_in(&ring), pi.normalize_in(&ring));
    }

    #[test]
    fn splitting_sign_group() {
        // G = {I, diag(1,-1)} acting on rank 2 and the subspace <e2> mod 5;
        // u(M) and (1-u)(M) are the eigenlattices.
        let z = LocalRing::Integers;
        let refl = Mat::from_i64_rows(&[&[1, 0], &[0, -1]]);
        let g = close_group(z, &[refl.clone()], 10).unwrap();
        let sub = Mat::from_i64_rows(&[&[0], &[1]]);
        let split = invariant_splitting(&sub, &g, 5, 8).unwrap();
        let ring = LocalRing::mod_prime_power(5, 8).unwrap();
        // both parts G-stable mod 5^8
        for basis in [&split.part, &split.complement] {
            let image = refl.mul(basis).normalize_in(&ring);
            assert!(solve_over(&ring, basis, &image).unwrap().is_some());
        }
    }

    #[test]
    fn splitting_requires_stability() {
        let z = LocalRing::Integers;
        let refl = Mat::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let g = close_group(z, &[refl], 10).unwrap();
        let sub = Mat::from_i64_rows(&[&[1], &[0]]);
        assert!(matches!(
            invariant_splitting(&sub, &g, 5, 4),
            Err(Error::NotStableMod { ell: 5 })
        ));
    }

    #[test]
    fn splitting_requires_coprime_order() {
        let z = LocalRing::Integers;
        let neg = Mat::from_i64_rows(&[&[-1, 0], &[0, -1]]);
        let g = close_group(z, &[neg], 10).unwrap();
        let sub = Mat::from_i64_rows(&[&[1], &[0]]);
        assert!(matches!(
            invariant_splitting(&sub, &g, 2, 4),
            Err(Error::OrderDivisibleByEll { order: 2, ell: 2 })
        ));
    }

    #[test]
    fn fixed_rank_matches_average_rank() {
        let z5 = LocalRing::localized_at(5).unwrap();
        let cycle = Mat::from_i64_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let c3 = close_group(z5, &[cycle], 10).unwrap();
        let u = average(&c3, &z5).unwrap();
        assert_eq!(u.matrix.rank(), fixed_space_rank(&c3));
        assert_eq!(fixed_space_rank(&c3), 1);
    }
}
