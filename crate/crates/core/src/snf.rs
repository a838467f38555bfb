//! Smith normal form and the linear-algebra routines built on it: kernels,
//! solving over a ring, saturation, and torsion-freeness of quotients.
//!
//! One elimination loop serves Z, Z_(ell) and Z/ell^k: every arithmetic
//! decision (pivot choice, division with remainder, unit normalization) is
//! routed through [`LocalRing`]. Pivoting picks the entry of smallest
//! valuation, then smallest absolute value, ties broken by lowest row then
//! column index, so results are deterministic.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ring::{LocalRing, Scalar};
use num_traits::{One, Zero};

/// Invertible change-of-basis pair `U A V = D` with tracked inverses.
///
/// `U` and `V` are unimodular over the active ring (determinant a unit) and
/// the diagonal of `D` is nonnegative with each entry dividing the next.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub u: Mat,
    pub u_inv: Mat,
    pub d: Mat,
    pub v: Mat,
    pub v_inv: Mat,
}

impl SnfDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).filter(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }
}

struct Worker<'r> {
    ring: &'r LocalRing,
    d: Mat,
    u: Mat,
    u_inv: Mat,
    v: Mat,
    v_inv: Mat,
}

impl<'r> Worker<'r> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// row[to] += c * row[from]
    fn row_axpy(&mut self, to: usize, from: usize, c: &Scalar) {
        self.d.row_axpy(to, from, c);
        self.u.row_axpy(to, from, c);
        self.u_inv.col_axpy(from, to, &-c.clone());
        for j in 0..self.d.cols() {
            self.d[(to, j)] = self.ring.normalize(&self.d[(to, j)]);
        }
    }

    /// col[to] += c * col[from]
    fn col_axpy(&mut self, to: usize, from: usize, c: &Scalar) {
        self.d.col_axpy(to, from, c);
        self.v.col_axpy(to, from, c);
        self.v_inv.row_axpy(from, to, &-c.clone());
        for i in 0..self.d.rows() {
            self.d[(i, to)] = self.ring.normalize(&self.d[(i, to)]);
        }
    }

    fn scale_row(&mut self, i: usize, unit: &Scalar) {
        let inv = self.ring.invert(unit).expect("scaling by a non-unit");
        self.d.scale_row(i, unit);
        self.u.scale_row(i, unit);
        self.u_inv.scale_col(i, &inv);
        for j in 0..self.d.cols() {
            self.d[(i, j)] = self.ring.normalize(&self.d[(i, j)]);
        }
    }

    fn best_pivot(&self, from: usize) -> Option<(usize, usize)> {
        let mut best: Option<((u64, Scalar), (usize, usize))> = None;
        for i in from..self.d.rows() {
            for j in from..self.d.cols() {
                let x = &self.d[(i, j)];
                if self.ring.is_zero(x) {
                    continue;
                }
                let key = self.ring.pivot_key(x);
                match &best {
                    Some((k, _)) if *k <= key => (),
                    _ => best = Some((key, (i, j))),
                }
            }
        }
        best.map(|(_, ij)| ij)
    }
}

/// Smith normal form of `a` over the given ring.
pub fn snf_over(ring: &LocalRing, a: &Mat) -> Result<SnfDecomposition> {
    if !a.in_ring(ring) {
        return Err(Error::NotInRing("matrix entry".into(), ring.to_string()));
    }
    let (r, c) = (a.rows(), a.cols());
    let mut w = Worker {
        ring,
        d: a.normalize_in(ring),
        u: Mat::identity(r),
        u_inv: Mat::identity(r),
        v: Mat::identity(c),
        v_inv: Mat::identity(c),
    };

    for t in 0..r.min(c) {
        'pivot: loop {
            let Some((pi, pj)) = w.best_pivot(t) else { break };
            w.swap_rows(pi, t);
            w.swap_cols(pj, t);

            let mut clean = true;
            for i in (t + 1)..r {
                if w.ring.is_zero(&w.d[(i, t)]) {
                    continue;
                }
                let (q, rem) = w.ring.div_rem(&w.d[(i, t)], &w.d[(t, t)]);
                if !q.is_zero() {
                    w.row_axpy(i, t, &-q);
                }
                if !w.ring.is_zero(&rem) {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            for j in (t + 1)..c {
                if w.ring.is_zero(&w.d[(t, j)]) {
                    continue;
                }
                let (q, rem) = w.ring.div_rem(&w.d[(t, j)], &w.d[(t, t)]);
                if !q.is_zero() {
                    w.col_axpy(j, t, &-q);
                }
                if !w.ring.is_zero(&rem) {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Divisor chain: the pivot must divide everything that remains.
            for i in (t + 1)..r {
                for j in (t + 1)..c {
                    let (_, rem) = w.ring.div_rem(&w.d[(i, j)], &w.d[(t, t)]);
                    if !w.ring.is_zero(&rem) {
                        w.row_axpy(t, i, &Scalar::one());
                        continue 'pivot;
                    }
                }
            }
            break;
        }
        if w.ring.is_zero(&w.d[(t, t)]) {
            break;
        }
    }

    // Canonicalize diagonal entries (sign over Z, power of ell locally).
    for t in 0..r.min(c) {
        if !w.ring.is_zero(&w.d[(t, t)]) {
            let unit = w.ring.canonical_unit(&w.d[(t, t)]);
            if !unit.is_one() {
                w.scale_row(t, &unit);
            }
        }
    }

    Ok(SnfDecomposition { u: w.u, u_inv: w.u_inv, d: w.d, v: w.v, v_inv: w.v_inv })
}

/// Smith normal form over the integers.
pub fn snf(a: &Mat) -> Result<SnfDecomposition> {
    snf_over(&LocalRing::Integers, a)
}

/// Basis of `{x : a x = 0}` over a domain, as matrix columns. The result is
/// a saturated sublattice (its columns extend to a basis of the ambient
/// module).
pub fn kernel_over(ring: &LocalRing, a: &Mat) -> Result<Mat> {
    if matches!(ring, LocalRing::ModPrimePower { .. }) {
        return Err(Error::InvalidInput("kernel basis requires a domain, not Z/ell^k".into()));
    }
    let s = snf_over(ring, a)?;
    let rank = s.rank();
    let idx: Vec<usize> = (rank..a.cols()).collect();
    Ok(s.v.select_columns(&idx))
}

/// Solve `a x = b` over the ring, for a matrix right-hand side.
pub fn solve_over(ring: &LocalRing, a: &Mat, b: &Mat) -> Result<Option<Mat>> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension("solve: row counts differ".into()));
    }
    let s = snf_over(ring, a)?;
    let c = s.u.mul(b).normalize_in(ring);
    let mut y = Mat::zero(a.cols(), b.cols());
    let diag = s.diagonal();
    for col in 0..b.cols() {
        for i in 0..a.rows() {
            let ci = &c[(i, col)];
            if i < diag.len() && !ring.is_zero(&diag[i]) {
                let (q, rem) = ring.div_rem(ci, &diag[i]);
                if !ring.is_zero(&rem) {
                    return Ok(None);
                }
                y[(i, col)] = q;
            } else if !ring.is_zero(ci) {
                return Ok(None);
            }
        }
    }
    Ok(Some(s.v.mul(&y).normalize_in(ring)))
}

/// True iff `v` lies in the column span of `basis` over the ring.
pub fn lattice_contains(ring: &LocalRing, basis: &Mat, v: &Mat) -> Result<bool> {
    Ok(solve_over(ring, basis, v)?.is_some())
}

/// Equality of the spanned sublattices.
pub fn lattice_eq(ring: &LocalRing, a: &Mat, b: &Mat) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension("lattices live in different ambient ranks".into()));
    }
    if a.rank() != b.rank() {
        return Ok(false);
    }
    Ok(lattice_contains(ring, a, b)? && lattice_contains(ring, b, a)?)
}

/// Saturation of the column span: the smallest saturated sublattice
/// containing it. Requires full column rank.
pub fn saturation_over(ring: &LocalRing, basis: &Mat) -> Result<Mat> {
    if basis.rank() != basis.cols() {
        return Err(Error::DependentColumns);
    }
    let s = snf_over(ring, basis)?;
    let idx: Vec<usize> = (0..basis.cols()).collect();
    Ok(s.u_inv.select_columns(&idx))
}

/// Columns completing a saturated sublattice to a basis of the ambient
/// module.
pub fn complement_of_saturated(ring: &LocalRing, basis: &Mat) -> Result<Mat> {
    let s = snf_over(ring, basis)?;
    if s.rank() != basis.cols() {
        return Err(Error::DependentColumns);
    }
    if !s.diagonal().iter().all(|d| ring.is_unit(d)) {
        return Err(Error::HypothesisFailed("sublattice is not saturated".into()));
    }
    let idx: Vec<usize> = (basis.cols()..basis.rows()).collect();
    Ok(s.u_inv.select_columns(&idx))
}

/// Is the quotient by the span of `n_basis` torsion-free over the ring?
///
/// Equivalently: is the sublattice saturated, i.e. are all nonzero diagonal
/// entries of its Smith form units? Dependent columns are rejected.
pub fn is_torsion_free_quotient(
    ring: &LocalRing,
    n_basis: &Mat,
    ambient_rank: usize,
) -> Result<bool> {
    if n_basis.rows() != ambient_rank {
        return Err(Error::Dimension(format!(
            "basis has {} rows; ambient rank is {ambient_rank}",
            n_basis.rows()
        )));
    }
    if n_basis.rank() != n_basis.cols() {
        return Err(Error::DependentColumns);
    }
    let s = snf_over(ring, n_basis)?;
    Ok(s.diagonal().iter().all(|d| ring.is_zero(d) || ring.is_unit(d)))
}

/// Row-reduce mod ell. Returns `(rref, pivot_columns)`.
///
/// Entries of `a` must be ell-integral; they are reduced into `[0, ell)`.
pub fn row_reduce_mod(a: &Mat, ell: u64) -> Result<(Vec<Vec<u64>>, Vec<usize>)> {
    let ring = LocalRing::mod_prime_power(ell, 1)?;
    if !a.in_ring(&ring) {
        return Err(Error::NotInRing("matrix entry".into(), ring.to_string()));
    }
    let (r, c) = (a.rows(), a.cols());
    let mut m: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let x = ring.normalize(&a[(i, j)]);
                    u64::try_from(x.numer().clone()).expect("reduced entry fits u64")
                })
                .collect()
        })
        .collect();
    let inv = |x: u64| crate::arith::pow_mod(x, ell - 2, ell);
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..c {
        let Some(p) = (row..r).find(|&i| m[i][col] % ell != 0) else { continue };
        m.swap(p, row);
        let f = inv(m[row][col]);
        for x in m[row].iter_mut() {
            *x = crate::arith::mul_mod(*x, f, ell);
        }
        for i in 0..r {
            if i != row && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..c {
                    let t = crate::arith::mul_mod(f, m[row][j], ell);
                    m[i][j] = (m[i][j] + ell - t) % ell;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == r {
            break;
        }
    }
    Ok((m, pivots))
}

/// Rank of `a` over the field with `ell` elements.
pub fn rank_mod(a: &Mat, ell: u64) -> Result<usize> {
    Ok(row_reduce_mod(a, ell)?.1.len())
}

/// Basis of the kernel of `a` over F_ell, as matrix columns with entries
/// reduced into `[0, ell)`.
pub fn kernel_mod(a: &Mat, ell: u64) -> Result<Mat> {
    if !crate::arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let (rref, pivots) = row_reduce_mod(a, ell)?;
    let c = a.cols();
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    let mut basis = Mat::zero(c, free.len());
    for (bk, &fj) in free.iter().enumerate() {
        basis[(fj, bk)] = Scalar::one();
        for (pr, &pc) in pivots.iter().enumerate() {
            let coeff = rref[pr][fj] % ell;
            if coeff != 0 {
                basis[(pc, bk)] = crate::ring::int((ell - coeff) as i64);
            }
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;
    use num_traits::Signed;

    fn check_snf(ring: &LocalRing, a: &Mat) {
        let s = snf_over(ring, a).unwrap();
        // U A V = D, and the tracked inverses really invert.
        assert_eq!(s.u.mul(a).mul(&s.v).normalize_in(ring), s.d);
        assert_eq!(s.u.mul(&s.u_inv).normalize_in(ring), Mat::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv).normalize_in(ring), Mat::identity(a.cols()));
        if matches!(ring, LocalRing::Integers) {
            assert!(s.u.det().abs() == int(1).abs() && s.v.det().abs() == int(1));
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !ring.is_zero(&w[0]) && !ring.is_zero(&w[1]) {
                let (_, rem) = ring.div_rem(&w[1], &w[0]);
                assert!(ring.is_zero(&rem), "divisor chain violated");
            }
            if ring.is_zero(&w[0]) {
                assert!(ring.is_zero(&w[1]));
            }
        }
    }

    #[test]
    fn snf_expected_diagonals() {
        let z = LocalRing::Integers;
        let a = Mat::from_i64_rows(&[&[2, 4], &[6, 8]]);
        let s = snf(&a).unwrap();
        check_snf(&z, &a);
        assert_eq!(s.diagonal(), vec![int(2), int(4)]);

        let id = Mat::identity(3);
        let s = snf(&id).unwrap();
        assert_eq!(s.diagonal(), vec![int(1), int(1), int(1)]);

        let zero = Mat::from_i64_rows(&[&[0]]);
        let s = snf(&zero).unwrap();
        assert_eq!(s.diagonal(), vec![int(0)]);
    }

    #[test]
    fn snf_local_rings() {
        let z3 = LocalRing::localized_at(3).unwrap();
        let a = Mat::from_i64_rows(&[&[6, 2], &[9, 15]]);
        check_snf(&z3, &a);
        let s = snf_over(&z3, &a).unwrap();
        // 2 is a unit at 3, so the first invariant factor is 1.
        assert_eq!(s.diagonal()[0], int(1));

        let z27 = LocalRing::mod_prime_power(3, 3).unwrap();
        check_snf(&z27, &a);
    }

    #[test]
    fn kernels_mod_ell() {
        let a = Mat::from_i64_rows(&[&[0, 3], &[-3, 0]]);
        let k = kernel_mod(&a, 3).unwrap();
        assert_eq!(k.cols(), 2);

        let k = kernel_mod(&Mat::identity(4), 5).unwrap();
        assert_eq!(k.cols(), 0);

        let a = Mat::from_i64_rows(&[&[1, 0], &[0, 3]]);
        let k = kernel_mod(&a, 3).unwrap();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![int(0), int(1)]);
    }

    #[test]
    fn kernel_columns_satisfy_system() {
        let a = Mat::from_i64_rows(&[&[2, 4, 1], &[1, 2, 5], &[0, 0, 3]]);
        for ell in [2u64, 3, 5, 7] {
            let k = kernel_mod(&a, ell).unwrap();
            let prod = a.mul(&k);
            let ring = LocalRing::mod_prime_power(ell, 1).unwrap();
            assert!(prod.normalize_in(&ring).is_zero_matrix());
            assert_eq!(k.cols(), a.cols() - rank_mod(&a, ell).unwrap());
        }
    }

    #[test]
    fn torsion_free_checks() {
        let z = LocalRing::Integers;
        let e1 = Mat::from_i64_rows(&[&[1], &[0]]);
        assert!(is_torsion_free_quotient(&z, &e1, 2).unwrap());
        let two_e1 = Mat::from_i64_rows(&[&[2], &[0]]);
        assert!(!is_torsion_free_quotient(&z, &two_e1, 2).unwrap());
        assert!(is_torsion_free_quotient(&z, &Mat::identity(2), 2).unwrap());
        let dep = Mat::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(is_torsion_free_quotient(&z, &dep, 2), Err(Error::DependentColumns)));
        // 2 is a unit at 3, so <2 e1> is saturated there.
        let z3 = LocalRing::localized_at(3).unwrap();
        assert!(is_torsion_free_quotient(&z3, &two_e1, 2).unwrap());
    }

    #[test]
    fn solving_and_saturation() {
        let z = LocalRing::Integers;
        let a = Mat::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let b = Mat::from_i64_rows(&[&[4], &[9]]);
        let x = solve_over(&z, &a, &b).unwrap().unwrap();
        assert_eq!(a.mul(&x), b);
        let b2 = Mat::from_i64_rows(&[&[1], &[0]]);
        assert!(solve_over(&z, &a, &b2).unwrap().is_none());

        let sat = saturation_over(&z, &Mat::from_i64_rows(&[&[2], &[4]])).unwrap();
        assert!(lattice_eq(&z, &sat, &Mat::from_i64_rows(&[&[1], &[2]])).unwrap());
    }
}
