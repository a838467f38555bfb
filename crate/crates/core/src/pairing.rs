//! Bilinear forms on free modules: perfectness, orthogonal complements,
//! induced quotient pairings, and the inductive construction of a perfect
//! invariant form from a non-degenerate one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{check_invariance, invariant_splitting, MatrixGroup};
use crate::matrix::Mat;
use crate::ring::{big, LocalRing, Scalar};
use crate::snf::{
    complement_of_saturated, is_torsion_free_quotient, kernel_mod, kernel_over, lattice_eq,
    solve_over,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub const DEFAULT_PRECISION: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Alternating,
    Symmetric,
}

/// A bilinear form on a finite-rank free module, given by its Gram matrix
/// in the standard basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramForm {
    pub ring: LocalRing,
    pub kind: FormKind,
    pub gram: Mat,
}

impl GramForm {
    pub fn new(ring: LocalRing, kind: FormKind, gram: Mat) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !gram.in_ring(&ring) {
            return Err(Error::NotInRing("Gram entry".into(), ring.to_string()));
        }
        let gram = gram.normalize_in(&ring);
        let gt = gram.transpose();
        match kind {
            FormKind::Alternating => {
                let neg = gram.neg().normalize_in(&ring);
                if gt.normalize_in(&ring) != neg {
                    return Err(Error::InvalidInput("alternating form requires gram^T = -gram".into()));
                }
                for i in 0..gram.rows() {
                    if !ring.is_zero(&gram[(i, i)]) {
                        return Err(Error::InvalidInput("alternating form requires a zero diagonal".into()));
                    }
                }
            }
            FormKind::Symmetric => {
                if gt.normalize_in(&ring) != gram {
                    return Err(Error::InvalidInput("symmetric form requires gram^T = gram".into()));
                }
            }
        }
        Ok(GramForm { ring, kind, gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    /// Evaluate e(x, y) = x^T gram y on column vectors.
    pub fn eval(&self, x: &Mat, y: &Mat) -> Scalar {
        let v = x.transpose().mul(&self.gram).mul(y);
        self.ring.normalize(&v[(0, 0)])
    }

    pub fn is_invariant_under(&self, mats: &[Mat]) -> bool {
        check_invariance(&self.ring, &self.gram, mats)
    }
}

/// A sublattice of a fixed ambient free module, spanned by the columns of
/// `basis`. Columns are required to be independent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sublattice {
    pub ambient_rank: usize,
    pub basis: Mat,
}

impl Sublattice {
    pub fn new(basis: Mat) -> Result<Self> {
        if basis.rank() != basis.cols() {
            return Err(Error::DependentColumns);
        }
        Ok(Sublattice { ambient_rank: basis.rows(), basis })
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice { ambient_rank, basis: Mat::zero(ambient_rank, 0) }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice { ambient_rank, basis: Mat::identity(ambient_rank) }
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }
}

fn require_domain(ring: &LocalRing, what: &str) -> Result<()> {
    if matches!(ring, LocalRing::ModPrimePower { .. }) {
        return Err(Error::InvalidInput(format!("{what} requires Z or Z_(ell), not a finite quotient")));
    }
    Ok(())
}

/// A pairing is perfect iff its Gram determinant is a unit of the ring;
/// both induced maps to the dual are then bijective.
pub fn is_perfect(e: &GramForm) -> bool {
    let det = e.gram.det();
    match e.ring {
        // Over Z/ell^k perfectness is detectable mod ell.
        LocalRing::ModPrimePower { .. } => e.ring.is_unit(&e.ring.normalize(&det)),
        _ => e.ring.is_unit(&det),
    }
}

/// The saturated sublattice `{x : e(x, l) = 0 for all l in L}`.
pub fn orthogonal_complement(e: &GramForm, l: &Sublattice) -> Result<Sublattice> {
    require_domain(&e.ring, "orthogonal complement")?;
    if l.ambient_rank != e.rank() {
        return Err(Error::Dimension("sublattice does not match the form's rank".into()));
    }
    // e(x, l) = 0 for all basis columns l: (gram . L)^T x = 0.
    let constraints = e.gram.mul(&l.basis).transpose();
    let basis = kernel_over(&e.ring, &constraints)?;
    Sublattice::new(basis)
}

/// Check `(L^perp)^perp = L` for a perfect form and a saturated sublattice.
/// Violated hypotheses are reported by name.
pub fn double_perp_check(e: &GramForm, l: &Sublattice) -> Result<bool> {
    require_domain(&e.ring, "double orthogonal complement")?;
    if !is_perfect(e) {
        return Err(Error::HypothesisFailed("the pairing is not perfect".into()));
    }
    if l.rank() > 0 && !is_torsion_free_quotient(&e.ring, &l.basis, l.ambient_rank)? {
        return Err(Error::HypothesisFailed("the quotient by L has torsion (L is not saturated)".into()));
    }
    let perp = orthogonal_complement(e, l)?;
    let perp2 = orthogonal_complement(e, &perp)?;
    lattice_eq(&e.ring, &perp2.basis, &l.basis)
}

/// Extend a linear functional given on a saturated sublattice `L` to the
/// ambient module, using perfectness of `e`. Returns the representing vector
/// `x` with `e(x, l_i) = phi_i`. This is the constructive face of the
/// surjectivity of `Hom(M, R) -> Hom(L, R)`.
pub fn extend_functional(e: &GramForm, l: &Sublattice, phi: &[Scalar]) -> Result<Mat> {
    require_domain(&e.ring, "functional extension")?;
    if phi.len() != l.rank() {
        return Err(Error::Dimension("functional length must equal the sublattice rank".into()));
    }
    if !is_perfect(e) {
        return Err(Error::HypothesisFailed("the pairing is not perfect".into()));
    }
    let lhs = l.basis.transpose().mul(&e.gram.transpose());
    let rhs = Mat::col_vec(phi);
    solve_over(&e.ring, &lhs, &rhs)?
        .ok_or_else(|| Error::HypothesisFailed("functional does not extend; is L saturated?".into()))
}

/// The perfect pairing induced on `N / N^perp` when `e` is perfect, `M/N`
/// is torsion-free and `N^perp <= N`.
///
/// Returns the form on a computed basis of coset representatives, together
/// with that basis (columns are ambient coordinates). A zero-rank quotient
/// yields the empty form.
pub struct QuotientForm {
    pub form: GramForm,
    pub coset_basis: Mat,
    pub perp_basis: Mat,
}

pub fn induced_quotient_form(e: &GramForm, n: &Sublattice) -> Result<QuotientForm> {
    require_domain(&e.ring, "induced quotient form")?;
    if !is_perfect(e) {
        return Err(Error::HypothesisFailed("the pairing is not perfect".into()));
    }
    if n.rank() > 0 && !is_torsion_free_quotient(&e.ring, &n.basis, n.ambient_rank)? {
        return Err(Error::HypothesisFailed("the quotient by N has torsion".into()));
    }
    let perp = orthogonal_complement(e, n)?;
    // N^perp must sit inside N.
    if perp.rank() > 0 {
        let inside = solve_over(&e.ring, &n.basis, &perp.basis)?;
        if inside.is_none() {
            return Err(Error::HypothesisFailed("N^perp is not contained in N".into()));
        }
    }
    let quotient_rank = n.rank() - perp.rank();
    if quotient_rank == 0 {
        let form = GramForm::new(e.ring, e.kind, Mat::zero(0, 0))?;
        return Ok(QuotientForm { form, coset_basis: Mat::zero(n.ambient_rank, 0), perp_basis: perp.basis });
    }
    // Coordinates of N^perp inside N, then a complement of those
    // coordinates gives coset representatives.
    let coset_basis = if perp.rank() == 0 {
        n.basis.clone()
    } else {
        let y = solve_over(&e.ring, &n.basis, &perp.basis)?
            .expect("containment was just checked");
        let complement = complement_of_saturated(&e.ring, &y)?;
        n.basis.mul(&complement)
    };
    let gram = coset_basis.transpose().mul(&e.gram).mul(&coset_basis);
    let form = GramForm::new(e.ring, e.kind, gram)?;
    if !is_perfect(&form) {
        return Err(Error::Internal("induced form failed the perfectness check".into()));
    }
    Ok(QuotientForm { form, coset_basis, perp_basis: perp.basis })
}

/// Result of [`perfectize`]: the new form, expressed on a new basis of the
/// same lattice, and the change of basis relating it to the input
/// coordinates (columns of `basis_change` are the new basis vectors).
///
/// When the input reduces non-degenerately mod ell the output stays in the
/// input ring and is exact. Otherwise the equivariant splitting only exists
/// at finite ell-adic precision and the result is returned over
/// `Z/ell^precision`, where perfectness and invariance remain decidable
/// (perfectness is detectable mod ell).
#[derive(Debug, Clone)]
pub struct Perfectized {
    pub form: GramForm,
    pub basis_change: Mat,
    pub precision: Option<u32>,
}

/// Build a perfect G-invariant form of the same kind from a non-degenerate
/// G-invariant one over Z_(ell) or Z/ell^k.
///
/// Follows the inductive construction: scale so the form takes unit values,
/// reduce mod ell, split off a complement of the radical equivariantly,
/// restrict to it (perfect there), replace the rest by its image under the
/// orthogonal projection, and recurse on the smaller block. Base cases
/// (rank 1 symmetric, rank 2 alternating) are settled by scaling alone.
pub fn perfectize(e: &GramForm, group: &MatrixGroup, precision: u32) -> Result<Perfectized> {
    let ell = match e.ring {
        LocalRing::Integers => {
            return Err(Error::InvalidInput("perfectize needs Z_(ell) or Z/ell^k".into()))
        }
        LocalRing::LocalizedAt { ell } | LocalRing::ModPrimePower { ell, .. } => ell,
    };
    if precision == 0 {
        return Err(Error::InvalidInput("precision must be >= 1".into()));
    }
    let order = group.order();
    if order as u64 % ell == 0 {
        return Err(Error::OrderDivisibleByEll { order, ell });
    }
    if group.ambient_rank() != e.rank() {
        return Err(Error::Dimension("group and form ranks differ".into()));
    }
    for g in group.elements() {
        if !g.in_ring(&e.ring) || !e.ring.is_unit(&g.det()) {
            return Err(Error::NotInvertible(e.ring.to_string()));
        }
    }
    if !e.is_invariant_under(group.elements()) {
        return Err(Error::HypothesisFailed("the form is not G-invariant".into()));
    }
    if e.rank() == 0 {
        return Ok(Perfectized { form: e.clone(), basis_change: Mat::zero(0, 0), precision: None });
    }
    match e.ring {
        LocalRing::LocalizedAt { .. } => {
            if e.gram.det().is_zero() {
                return Err(Error::DegenerateForm);
            }
            // Exact path: scaling may already make the reduction mod ell
            // non-degenerate, in which case no precision is lost.
            let scaled = scale_to_unit_values(e, ell)?;
            if kernel_mod(&scaled.gram, ell)?.cols() == 0 {
                return Ok(Perfectized {
                    form: scaled,
                    basis_change: Mat::identity(e.rank()),
                    precision: None,
                });
            }
            // A genuine splitting is needed; work at finite precision.
            let ring_k = LocalRing::mod_prime_power(ell, precision)?;
            let gram_k = e.gram.normalize_in(&ring_k);
            let group_k = reduce_group(group, &ring_k)?;
            let (gram_out, basis, k_out) =
                perfectize_worker(&ring_k, gram_k, e.kind, &group_k, precision)?;
            finish(e.kind, ell, gram_out, basis, k_out)
        }
        LocalRing::ModPrimePower { k, .. } => {
            let k = k.min(precision);
            let ring_k = LocalRing::mod_prime_power(ell, k)?;
            let gram_k = e.gram.normalize_in(&ring_k);
            let group_k = reduce_group(group, &ring_k)?;
            let (gram_out, basis, k_out) = perfectize_worker(&ring_k, gram_k, e.kind, &group_k, k)?;
            finish(e.kind, ell, gram_out, basis, k_out)
        }
        LocalRing::Integers => unreachable!(),
    }
}

fn finish(kind: FormKind, ell: u64, gram: Mat, basis: Mat, k_out: u32) -> Result<Perfectized> {
    let ring = LocalRing::mod_prime_power(ell, k_out)?;
    let form = GramForm::new(ring, kind, gram.normalize_in(&ring))?;
    if !is_perfect(&form) {
        return Err(Error::Internal("perfectize produced a non-perfect form".into()));
    }
    Ok(Perfectized { form, basis_change: basis.normalize_in(&ring), precision: Some(k_out) })
}

fn reduce_group(group: &MatrixGroup, ring: &LocalRing) -> Result<MatrixGroup> {
    regroup(group.generators(), group.ambient_rank(), ring, group.order())
}

/// Close a generator list over a new ring, keeping the ambient rank when no
/// generators are left.
fn regroup(gens: &[Mat], rank: usize, ring: &LocalRing, order_hint: usize) -> Result<MatrixGroup> {
    let gens: Vec<Mat> = gens
        .iter()
        .map(|g| g.normalize_in(ring))
        .filter(|g| *g != Mat::identity(rank))
        .collect();
    if gens.is_empty() {
        return Ok(MatrixGroup::trivial(*ring, rank));
    }
    crate::group::close_group(*ring, &gens, order_hint.max(1) * 2)
}

/// Divide out the minimal ell-valuation so some Gram entry becomes a unit.
fn scale_to_unit_values(e: &GramForm, ell: u64) -> Result<GramForm> {
    let min_val = e
        .gram
        .entries()
        .filter_map(|x| e.ring.valuation(x))
        .min()
        .ok_or(Error::DegenerateForm)?;
    if min_val == 0 {
        return Ok(e.clone());
    }
    let factor = Scalar::one() / big(BigInt::from(ell).pow(min_val as u32));
    GramForm::new(e.ring, e.kind, e.gram.scale(&factor))
}

/// The inductive step over Z/ell^m. Returns `(gram, basis, m_out)` where
/// `basis` expresses the final basis in the coordinates the worker was
/// called with, and `m_out <= m` is the surviving precision.
fn perfectize_worker(
    ring: &LocalRing,
    gram: Mat,
    kind: FormKind,
    group: &MatrixGroup,
    m: u32,
) -> Result<(Mat, Mat, u32)> {
    let (ell, _) = match ring {
        LocalRing::ModPrimePower { ell, k } => (*ell, *k),
        _ => return Err(Error::Internal("worker requires Z/ell^k".into())),
    };
    let n = gram.rows();
    if n == 0 {
        return Ok((gram, Mat::zero(0, 0), m));
    }

    // Scale so some entry is a unit. Dividing by ell^i costs i digits of
    // precision, so the working ring shrinks accordingly.
    let min_val = gram.entries().filter_map(|x| ring.valuation(x)).min();
    let Some(min_val) = min_val else {
        return Err(Error::PrecisionExhausted(m));
    };
    let (gram, ring, m) = if min_val > 0 {
        let m_new = m
            .checked_sub(min_val as u32)
            .filter(|&v| v >= 1)
            .ok_or(Error::PrecisionExhausted(m))?;
        let ring_new = LocalRing::mod_prime_power(ell, m_new)?;
        let factor = Scalar::one() / big(BigInt::from(ell).pow(min_val as u32));
        // Representatives are exactly divisible by ell^min_val, so this is
        // exact division followed by reduction at the lower precision.
        (gram.scale(&factor).normalize_in(&ring_new), ring_new, m_new)
    } else {
        (gram, *ring, m)
    };

    let radical = kernel_mod(&gram, ell)?;
    if radical.cols() == 0 {
        // Non-degenerate mod ell: perfect at this precision.
        return Ok((gram, Mat::identity(n), m));
    }

    let group_m = reduce_group(group, &ring)?;
    let split = invariant_splitting(&radical, &group_m, ell, m)?;
    let b1 = split.part; // reduces to the radical mod ell
    let b2 = split.complement; // G-stable complement; the form is perfect here
    let s = b1.cols();

    let gram2 = b2.transpose().mul(&gram).mul(&b2).normalize_in(&ring);
    let gram2_t_inv = gram2.transpose().inverse_over(&ring)?;

    // Orthogonal projector onto span(B2): pi(x) = B2 Gram2^-T B2^T gram^T x.
    let projector = b2.mul(&gram2_t_inv).mul(&b2.transpose()).mul(&gram.transpose());
    let w1 = b1.sub(&projector.mul(&b1)).normalize_in(&ring);

    // e(W1, B2) = 0 by construction; restrict and recurse on the W1 block.
    let gram1 = w1.transpose().mul(&gram).mul(&w1).normalize_in(&ring);
    debug_assert!(w1.transpose().mul(&gram).mul(&b2).normalize_in(&ring).is_zero_matrix());

    // Group action in the (W1 | B2) basis is block diagonal.
    let p = w1.hstack(&b2);
    let p_inv = p.inverse_over(&ring)?;
    let mut gens1 = Vec::new();
    for g in group_m.generators() {
        let conj = p_inv.mul(g).mul(&p).normalize_in(&ring);
        let mut blk = Mat::zero(s, s);
        for i in 0..s {
            for j in 0..s {
                blk[(i, j)] = conj[(i, j)].clone();
            }
        }
        gens1.push(blk);
    }
    let group1 = regroup(&gens1, s, &ring, group_m.order())?;

    let (gram1_out, basis1, m_out) = perfectize_worker(&ring, gram1, kind, &group1, m)?;

    // Assemble: new basis = P . diag(basis1, I), form = diag(gram1_out, gram2).
    let ring_out = LocalRing::mod_prime_power(ell, m_out)?;
    let inner = Mat::block_diag(&basis1, &Mat::identity(n - s));
    let basis = p.mul(&inner).normalize_in(&ring_out);
    let gram_out = Mat::block_diag(&gram1_out, &gram2).normalize_in(&ring_out);
    Ok((gram_out, basis, m_out))
}
