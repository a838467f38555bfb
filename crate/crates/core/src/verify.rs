//! Oracle suites: every cheap criterion in the crate checked against an
//! independent brute-force route, plus the seeded random corpora those
//! checks run on. The CLI `verify` subcommand drives [`run_suites`]; the
//! acceptance tests reuse the same generators with their own budgets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::bounds::{admissible_orders, default_prime_sample, j_bound, ReductionData};
use crate::classical::{
    brute_force_spectrum, cyclotomic_factor_profile, cyclotomic_poly, gl_has_element_of_order,
    sp_group_order, sp_has_element_of_order, GroupFamily, PrimePower, ReciprocalPairing,
    SpectrumMethod,
};
use crate::error::{Error, Result};
use crate::factored::FactoredInt;
use crate::group::{average, close_group, fixed_space_rank, MatrixGroup};
use crate::matrix::Mat;
use crate::pairing::{
    double_perp_check, extend_functional, induced_quotient_form, is_perfect, perfectize, FormKind,
    GramForm, Sublattice,
};
use crate::ring::{int, LocalRing, Scalar};
use crate::snf::{is_torsion_free_quotient, rank_mod, saturation_over, snf_over};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

fn outcome(name: &str, result: Result<String>) -> SuiteOutcome {
    match result {
        Ok(details) => SuiteOutcome { name: name.into(), passed: true, details },
        Err(e) => SuiteOutcome { name: name.into(), passed: false, details: e.to_string() },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Internal(msg()))
    }
}

// ---------------------------------------------------------------------------
// Random corpora
// ---------------------------------------------------------------------------

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index.wrapping_mul(GOLDEN)))
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| int(rng.random_range(-bound..=bound)))
}

/// Random element of GL_n(Z): a short word of elementary row operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Mat {
    let mut u = Mat::identity(n);
    for _ in 0..steps {
        match rng.random_range(0..3u8) {
            0 => {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j {
                    let c = int(rng.random_range(-2..=2i64));
                    u.row_axpy(i, j, &c);
                }
            }
            1 => {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                u.swap_rows(i, j);
            }
            _ => {
                let i = rng.random_range(0..n);
                u.scale_row(i, &int(-1));
            }
        }
    }
    u
}

/// Oracle: the set of finite orders of 2x2 integer matrices of determinant
/// one. A finite-order element has characteristic polynomial
/// x^2 - t x + 1 with |t| <= 2, so it is +/-I or conjugate to the companion
/// matrix of one of five polynomials; iterate those and keep whatever powers
/// back to the identity.
pub fn rank2_integral_symplectic_orders() -> BTreeSet<u64> {
    let mut orders = BTreeSet::new();
    orders.insert(1);
    orders.insert(2); // -I
    let identity = Mat::identity(2);
    for t in -2i64..=2 {
        let m = Mat::from_i64_rows(&[&[0, -1], &[1, t]]);
        let mut p = m.clone();
        for k in 1..=24u64 {
            if p == identity {
                orders.insert(k);
                break;
            }
            p = p.mul(&m);
        }
    }
    orders
}

/// One seeded instance for the perfectization fuzz: a small integral matrix
/// group of order 1, 2, 3 or 4 with order prime to ell, and a non-degenerate
/// invariant form of the requested kind over Z_(ell).
pub struct PerfectizeInstance {
    pub form: GramForm,
    pub group: MatrixGroup,
    pub ell: u64,
}

fn order_block(rng: &mut ChaCha8Rng, rank: usize, target: usize, kind: FormKind) -> Mat {
    match target {
        1 => Mat::identity(rank),
        // An involution fixing an odd-rank eigenblock kills every invariant
        // alternating form, so sign patterns must flip pairs in that case.
        2 => match (kind, rng.random_range(0..3u8)) {
            (_, 0) => Mat::identity(rank).neg(),
            (FormKind::Alternating, _) => {
                let mut d = Mat::identity(rank);
                let flips = 2 * rng.random_range(1..=rank / 2);
                for i in 0..flips {
                    d[(i, i)] = int(-1);
                }
                d
            }
            (FormKind::Symmetric, 1) => {
                let mut d = Mat::identity(rank);
                let flips = rng.random_range(1..=rank);
                for i in 0..flips {
                    d[(i, i)] = int(-1);
                }
                d
            }
            (FormKind::Symmetric, _) if rank >= 2 => {
                let swap = Mat::from_i64_rows(&[&[0, 1], &[1, 0]]);
                Mat::block_diag(&swap, &Mat::identity(rank - 2))
            }
            _ => Mat::identity(rank).neg(),
        },
        3 => {
            let c3 = Mat::from_i64_rows(&[&[0, -1], &[1, -1]]);
            Mat::block_diag(&c3, &Mat::identity(rank - 2))
        }
        4 => {
            let rot = Mat::from_i64_rows(&[&[0, -1], &[1, 0]]);
            Mat::block_diag(&rot, &Mat::identity(rank - 2))
        }
        _ => unreachable!(),
    }
}

pub fn random_perfectize_instance(seed: u64, index: u64) -> Result<PerfectizeInstance> {
    let mut rng = rng_for(seed, index);
    let ell = *[3u64, 5, 7].iter().nth(rng.random_range(0..3)).unwrap();
    let kind = if rng.random_bool(0.5) { FormKind::Alternating } else { FormKind::Symmetric };
    let rank = match kind {
        FormKind::Alternating => 2 * rng.random_range(1..=3usize),
        FormKind::Symmetric => rng.random_range(1..=6usize),
    };
    let mut orders: Vec<usize> = [1usize, 2, 3, 4]
        .into_iter()
        .filter(|&o| o as u64 % ell != 0 && (o < 3 || rank >= 2))
        .collect();
    let target = orders.remove(rng.random_range(0..orders.len()));
    let base = order_block(&mut rng, rank, target, kind);
    let u = random_unimodular(&mut rng, rank, 2 * rank + 2);
    let u_inv = u.inverse_over(&LocalRing::Integers).expect("unimodular");
    let generator = u_inv.mul(&base).mul(&u);

    let ring = LocalRing::localized_at(ell)?;
    let group = if target == 1 {
        MatrixGroup::trivial(ring, rank)
    } else {
        close_group(ring, &[generator], 16)?
    };
    ensure(group.order() == target, || {
        format!("constructed group has order {}, wanted {target}", group.order())
    })?;

    let averaged_form = |rng: &mut ChaCha8Rng| -> Mat {
        let raw = random_int_matrix(rng, rank, rank, 3);
        let seed_form = match kind {
            FormKind::Alternating => {
                let mut s = raw.sub(&raw.transpose());
                for i in 0..rank {
                    s[(i, i)] = Scalar::zero();
                }
                s
            }
            FormKind::Symmetric => raw.add(&raw.transpose()),
        };
        let mut sum = Mat::zero(rank, rank);
        for g in group.elements() {
            sum = sum.add(&g.transpose().mul(&seed_form).mul(g));
        }
        sum
    };

    for _ in 0..64 {
        let mut gram = averaged_form(&mut rng);
        if rng.random_bool(0.3) {
            gram = gram.scale(&int(ell as i64));
        }
        if rng.random_bool(0.3) {
            gram = gram.add(&averaged_form(&mut rng).scale(&int(ell as i64)));
        }
        if gram.det().is_zero() {
            continue;
        }
        let form = GramForm::new(ring, kind, gram)?;
        ensure(form.is_invariant_under(group.elements()), || "instance form not invariant".into())?;
        return Ok(PerfectizeInstance { form, group, ell });
    }
    Err(Error::Internal("could not build a non-degenerate invariant form".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerfectizeBranch {
    Exact,
    Split(u32),
}

/// Run perfectize on an instance and validate the full contract: output
/// perfect, invariant under the conjugated group, kind preserved.
pub fn check_perfectize_instance(inst: &PerfectizeInstance, precision: u32) -> Result<PerfectizeBranch> {
    let out = perfectize(&inst.form, &inst.group, precision)?;
    ensure(is_perfect(&out.form), || "output not perfect".into())?;
    ensure(out.form.kind == inst.form.kind, || "kind changed".into())?;
    match out.precision {
        None => {
            ensure(out.form.is_invariant_under(inst.group.elements()), || {
                "exact output lost invariance".into()
            })?;
            Ok(PerfectizeBranch::Exact)
        }
        Some(k) => {
            let ring = out.form.ring;
            let p_inv = out.basis_change.inverse_over(&ring)?;
            let conj: Vec<Mat> = inst
                .group
                .elements()
                .iter()
                .map(|g| p_inv.mul(g).mul(&out.basis_change).normalize_in(&ring))
                .collect();
            ensure(out.form.is_invariant_under(&conj), || "split output lost invariance".into())?;
            Ok(PerfectizeBranch::Split(k))
        }
    }
}

/// One seeded instance for the quotient-pairing fuzz: a perfect form and a
/// sublattice N with torsion-free quotient and N^perp inside N, produced in
/// standard coordinates and then conjugated by a random unimodular matrix.
pub struct QuotientInstance {
    pub form: GramForm,
    pub n: Sublattice,
}

pub fn random_quotient_instance(seed: u64, index: u64) -> Result<QuotientInstance> {
    let mut rng = rng_for(seed, index);
    let kind = if rng.random_bool(0.5) { FormKind::Alternating } else { FormKind::Symmetric };
    let pairs = rng.random_range(1..=3usize);
    let diags = match kind {
        FormKind::Alternating => 0,
        FormKind::Symmetric => rng.random_range(0..=(6 - 2 * pairs)),
    };
    let rank = 2 * pairs + diags;

    // Hyperbolic pairs (x_k, y_k) block by block, then +/-1 diagonal tails.
    let mut gram = Mat::zero(rank, rank);
    for k in 0..pairs {
        let (i, j) = (2 * k, 2 * k + 1);
        match kind {
            FormKind::Alternating => {
                gram[(i, j)] = int(1);
                gram[(j, i)] = int(-1);
            }
            FormKind::Symmetric => {
                gram[(i, j)] = int(1);
                gram[(j, i)] = int(1);
            }
        }
    }
    for d in 0..diags {
        let idx = 2 * pairs + d;
        gram[(idx, idx)] = int(if rng.random_bool(0.5) { 1 } else { -1 });
    }

    // N takes every pair either fully or by its first leg, plus every
    // diagonal vector; then N^perp is spanned by the half-pair legs, which
    // sit inside N.
    let mut columns: Vec<usize> = Vec::new();
    for k in 0..pairs {
        columns.push(2 * k);
        if rng.random_bool(0.5) {
            columns.push(2 * k + 1);
        }
    }
    for d in 0..diags {
        columns.push(2 * pairs + d);
    }
    let n_std = Mat::identity(rank).select_columns(&columns);

    let u = random_unimodular(&mut rng, rank, 2 * rank + 2);
    let u_inv = u.inverse_over(&LocalRing::Integers).expect("unimodular");
    let gram = u.transpose().mul(&gram).mul(&u);
    let basis = u_inv.mul(&n_std);
    let form = GramForm::new(LocalRing::Integers, kind, gram)?;
    Ok(QuotientInstance { form, n: Sublattice::new(basis)? })
}

/// Validate the quotient-pairing contract on one instance: induced form
/// perfect with kind preserved, plus double-perp and functional extension
/// on a random saturated sublattice for the same form.
pub fn check_quotient_instance(inst: &QuotientInstance, seed: u64, index: u64) -> Result<()> {
    let q = induced_quotient_form(&inst.form, &inst.n)?;
    ensure(is_perfect(&q.form) || q.form.rank() == 0, || "induced form not perfect".into())?;
    ensure(q.form.kind == inst.form.kind, || "induced form changed kind".into())?;

    let mut rng = rng_for(seed ^ 0xABCD, index);
    let rank = inst.form.rank();
    let sub_rank = rng.random_range(0..=rank);
    let l = if sub_rank == 0 {
        Sublattice::zero(rank)
    } else {
        let raw = loop {
            let m = random_int_matrix(&mut rng, rank, sub_rank, 4);
            if m.rank() == sub_rank {
                break m;
            }
        };
        Sublattice::new(saturation_over(&LocalRing::Integers, &raw)?)?
    };
    ensure(double_perp_check(&inst.form, &l)?, || "double perp mismatch".into())?;
    if l.rank() > 0 {
        let phi: Vec<Scalar> = (0..l.rank()).map(|_| int(rng.random_range(-9..=9))).collect();
        let x = extend_functional(&inst.form, &l, &phi)?;
        for (j, expected) in phi.iter().enumerate() {
            let lj = Mat::col_vec(&l.basis.column(j));
            ensure(&inst.form.eval(&x, &lj) == expected, || "functional extension wrong".into())?;
        }
    }
    Ok(())
}

/// Brute-force saturation oracle: for every prime dividing the gcd of the
/// maximal minors, some vector outside the lattice lands in it after
/// multiplication by that prime iff the mod-p rank drops.
pub fn torsion_free_oracle(basis: &Mat) -> Result<bool> {
    let r = basis.cols();
    if basis.rank() != r {
        return Err(Error::DependentColumns);
    }
    if r == 0 {
        return Ok(true);
    }
    let mut gcd = BigInt::zero();
    let rows: Vec<usize> = (0..basis.rows()).collect();
    for subset in combinations(&rows, r) {
        let minor = Mat::from_fn(r, r, |i, j| basis[(subset[i], j)].clone());
        let det = minor.det();
        debug_assert!(det.is_integer());
        gcd = num_integer::Integer::gcd(&gcd, det.numer());
    }
    gcd = gcd.abs();
    if gcd.is_zero() {
        return Err(Error::DependentColumns);
    }
    if gcd.is_one() {
        return Ok(true);
    }
    let mut n = gcd;
    let mut p = BigInt::from(2);
    let mut bad_primes = Vec::new();
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            bad_primes.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        bad_primes.push(n);
    }
    for p in bad_primes {
        let p64 = u64::try_from(p).map_err(|_| Error::Internal("minor gcd prime too large".into()))?;
        if rank_mod(basis, p64)? < r {
            return Ok(false);
        }
    }
    Ok(true)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomials over F_ell (independent route for the cyclotomic profile)
// ---------------------------------------------------------------------------

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_rem(num: &[u64], den: &[u64], ell: u64) -> Vec<u64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = arith::pow_mod(den[dd], ell - 2, ell);
    while rem.len() > dd && rem.len() >= den.len() {
        let k = rem.len() - den.len();
        let c = arith::mul_mod(*rem.last().unwrap(), lead_inv, ell);
        if c != 0 {
            for (i, &dc) in den.iter().enumerate() {
                let sub = arith::mul_mod(c, dc, ell);
                rem[k + i] = (rem[k + i] + ell - sub) % ell;
            }
        }
        rem.pop();
        rem = poly_trim(rem);
        if rem.iter().all(|&x| x == 0) {
            return vec![0];
        }
    }
    poly_trim(rem)
}

fn poly_div_exact(num: &[u64], den: &[u64], ell: u64) -> Option<Vec<u64>> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0u64; num.len() - den.len() + 1];
    let lead_inv = arith::pow_mod(den[dd], ell - 2, ell);
    for k in (0..quot.len()).rev() {
        let c = arith::mul_mod(rem[k + dd], lead_inv, ell);
        quot[k] = c;
        if c != 0 {
            for (i, &dc) in den.iter().enumerate() {
                let sub = arith::mul_mod(c, dc, ell);
                rem[k + i] = (rem[k + i] + ell - sub) % ell;
            }
        }
    }
    rem.iter().all(|&x| x == 0).then(|| poly_trim(quot))
}

/// All monic irreducible factors of `f` mod ell, found by trial division
/// over every monic polynomial of ascending degree. Exponential and proud
/// of it; this is the oracle side.
fn brute_force_poly_factors(f: &[u64], ell: u64) -> Vec<Vec<u64>> {
    let mut rest = f.to_vec();
    let mut out = Vec::new();
    'outer: while rest.len() > 1 {
        let deg = rest.len() - 1;
        for d in 1..=deg {
            let count = ell.pow(d as u32);
            for code in 0..count {
                let mut cand = vec![0u64; d + 1];
                let mut c = code;
                for item in cand.iter_mut().take(d) {
                    *item = c % ell;
                    c /= ell;
                }
                cand[d] = 1;
                if poly_rem(&rest, &cand, ell) == vec![0] {
                    rest = poly_div_exact(&rest, &cand, ell).expect("divides");
                    out.push(cand);
                    continue 'outer;
                }
            }
        }
        out.push(rest.clone());
        break;
    }
    out
}

fn poly_reciprocal_monic(f: &[u64], ell: u64) -> Option<Vec<u64>> {
    let c0 = f[0];
    if c0 == 0 {
        return None;
    }
    let inv = arith::pow_mod(c0, ell - 2, ell);
    let mut rev: Vec<u64> = f.iter().rev().copied().collect();
    for x in rev.iter_mut() {
        *x = arith::mul_mod(*x, inv, ell);
    }
    Some(poly_trim(rev))
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn suite_snf_properties(quick: bool) -> Result<String> {
    let rings = [
        LocalRing::Integers,
        LocalRing::localized_at(3)?,
        LocalRing::mod_prime_power(3, 5)?,
    ];
    let instances = if quick { 40 } else { 200 };
    let mut checked = 0usize;
    for i in 0..instances {
        let mut rng = rng_for(0x5806, i as u64);
        let rows = rng.random_range(1..=6usize);
        let cols = rng.random_range(1..=6usize);
        let a = random_int_matrix(&mut rng, rows, cols, 20);
        for ring in &rings {
            let s = snf_over(ring, &a)?;
            ensure(s.u.mul(&a).mul(&s.v).normalize_in(ring) == s.d, || "UAV != D".into())?;
            ensure(
                s.u.mul(&s.u_inv).normalize_in(ring) == Mat::identity(rows),
                || "U inverse broken".into(),
            )?;
            ensure(ring.is_unit(&s.u.det()), || "U not unimodular".into())?;
            ensure(ring.is_unit(&s.v.det()), || "V not unimodular".into())?;
            let diag = s.diagonal();
            for w in diag.windows(2) {
                if !ring.is_zero(&w[0]) {
                    if ring.is_zero(&w[1]) {
                        continue;
                    }
                    let (_, rem) = ring.div_rem(&w[1], &w[0]);
                    ensure(ring.is_zero(&rem), || "divisor chain broken".into())?;
                } else {
                    ensure(ring.is_zero(&w[1]), || "zero before nonzero on diagonal".into())?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} decompositions over 3 rings"))
}

fn suite_torsion_free_oracle(quick: bool) -> Result<String> {
    let instances = if quick { 60 } else { 300 };
    let z = LocalRing::Integers;
    let mut agreements = 0usize;
    let mut i = 0u64;
    while agreements < instances {
        let mut rng = rng_for(0x70F0, i);
        i += 1;
        let rows = rng.random_range(1..=5usize);
        let cols = rng.random_range(1..=rows);
        let basis = random_int_matrix(&mut rng, rows, cols, 6);
        if basis.rank() != cols {
            continue;
        }
        let fast = is_torsion_free_quotient(&z, &basis, rows)?;
        let slow = torsion_free_oracle(&basis)?;
        ensure(fast == slow, || format!("saturation disagreement on instance {i}"))?;
        agreements += 1;
    }
    Ok(format!("{agreements} random sublattices agreed with the minor-gcd oracle"))
}

fn suite_averaging(quick: bool) -> Result<String> {
    let instances = if quick { 40 } else { 150 };
    let mut checked = 0usize;
    for i in 0..instances {
        let inst = random_perfectize_instance(0xA00A, i as u64)?;
        let ring = LocalRing::localized_at(inst.ell)?;
        let u = average(&inst.group, &ring)?;
        ensure(u.is_idempotent(&ring), || "averaging operator not idempotent".into())?;
        ensure(u.matrix.rank() == fixed_space_rank(&inst.group), || {
            "rank of u differs from the fixed-space rank".into()
        })?;
        for g in inst.group.elements() {
            ensure(
                g.mul(&u.matrix).normalize_in(&ring) == u.matrix.normalize_in(&ring),
                || "g u != u".into(),
            )?;
        }
        let one_minus = Mat::identity(u.matrix.rows()).sub(&u.matrix);
        ensure(u.matrix.rank() + one_minus.rank() == u.matrix.rows(), || {
            "u and 1-u do not split the module".into()
        })?;
        checked += 1;
    }
    Ok(format!("{checked} averaging operators"))
}

fn suite_perfectize(quick: bool) -> Result<String> {
    let instances = if quick { 60 } else { 500 };
    let mut exact = 0usize;
    let mut split = 0usize;
    for i in 0..instances {
        let inst = random_perfectize_instance(0x9E4F, i as u64)?;
        match check_perfectize_instance(&inst, crate::pairing::DEFAULT_PRECISION)? {
            PerfectizeBranch::Exact => exact += 1,
            PerfectizeBranch::Split(_) => split += 1,
        }
    }
    ensure(exact > 0 && split > 0, || "fuzz corpus failed to exercise both branches".into())?;
    Ok(format!("{instances} instances ({exact} exact, {split} via splitting)"))
}

fn suite_quotient_pairings(quick: bool) -> Result<String> {
    let instances = if quick { 60 } else { 500 };
    for i in 0..instances {
        let inst = random_quotient_instance(0xBEE5, i as u64)?;
        check_quotient_instance(&inst, 0xBEE5, i as u64)?;
    }
    Ok(format!("{instances} quotient/double-perp/extension instances"))
}

fn suite_sp_criterion(quick: bool) -> Result<String> {
    let mut checked = 0usize;
    let powers = PrimePower::up_to(32);
    let rank2_primes: &[u64] = if quick { &[3, 5, 7] } else { &[3, 5, 7, 11, 13] };
    for &ell in rank2_primes {
        let spectrum =
            brute_force_spectrum(GroupFamily::Sp, 2, ell, SpectrumMethod::Exhaustive, 1_000_000)?;
        for pp in &powers {
            if pp.q == ell {
                continue;
            }
            let predicted = sp_has_element_of_order(1, *pp, ell)?;
            ensure(predicted == spectrum.contains(pp.value), || {
                format!("rank-2 disagreement at q^r = {} over F_{ell}", pp.value)
            })?;
            checked += 1;
        }
    }
    if !quick {
        let spectrum =
            brute_force_spectrum(GroupFamily::Sp, 4, 3, SpectrumMethod::Exhaustive, 1_000_000)?;
        for pp in &powers {
            if pp.q == 3 {
                continue;
            }
            let predicted = sp_has_element_of_order(2, *pp, 3)?;
            ensure(predicted == spectrum.contains(pp.value), || {
                format!("rank-4 disagreement at q^r = {} over F_3", pp.value)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (m, q^r, ell) cases against exhaustive spectra"))
}

fn suite_gl_criterion(quick: bool) -> Result<String> {
    let samples = if quick { 3_000 } else { 100_000 };
    let powers = PrimePower::up_to(16);
    let mut checked = 0usize;
    for n in 1..=4usize {
        for ell in [2u64, 3, 5, 7] {
            let order = crate::classical::gl_group_order(n, ell)?;
            let exhaustive = order.to_u64().map(|o| o <= 1_000_000).unwrap_or(false);
            let method = if exhaustive {
                SpectrumMethod::Exhaustive
            } else {
                SpectrumMethod::Sampled { count: samples, seed: 0x61 }
            };
            let spectrum = brute_force_spectrum(GroupFamily::Gl, n, ell, method, 1_000_000)?;
            for pp in &powers {
                if pp.q == ell {
                    continue;
                }
                let predicted = gl_has_element_of_order(n, *pp, ell)?;
                if predicted {
                    ensure(spectrum.contains(pp.value), || {
                        format!("GL_{n}(F_{ell}) should contain order {}", pp.value)
                    })?;
                } else if exhaustive {
                    ensure(!spectrum.contains(pp.value), || {
                        format!("GL_{n}(F_{ell}) should not contain order {}", pp.value)
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (n, q^r, ell) cases against spectra"))
}

fn suite_lemma_2bd(quick: bool) -> Result<String> {
    let samples = if quick { 3_000 } else { 100_000 };
    let mut checked = 0usize;
    for &ell in &[5u64, 13, 29, 37] {
        debug_assert_eq!(ell % 8, 5);
        for m in [1usize, 2] {
            let order = sp_group_order(m, ell)?;
            let method = if order.to_u64().map(|o| o <= 1_000_000).unwrap_or(false) {
                SpectrumMethod::Exhaustive
            } else {
                SpectrumMethod::Sampled { count: samples, seed: 0x2BD }
            };
            let spectrum = brute_force_spectrum(GroupFamily::Sp, 2 * m, ell, method, 1_000_000)?;
            for &o in &spectrum.orders {
                if o.is_power_of_two() && o > 1 {
                    let r = o.trailing_zeros();
                    ensure(2u64.pow(r - 1) <= 2 * m as u64, || {
                        format!("order 2^{r} appeared in Sp_{}(F_{ell})", 2 * m)
                    })?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} spectra scanned for oversized 2-power orders"))
}

fn suite_gcd_vs_j(quick: bool) -> Result<String> {
    let ranges: &[(u64, u64)] = if quick { &[(3, 103)] } else { &[(3, 503), (11, 511), (101, 601)] };
    let max_m = if quick { 2 } else { 3 };
    let mut checked = 0usize;
    for m in 1..=max_m {
        for &(lo, hi) in ranges {
            let mut gcd: Option<FactoredInt> = None;
            for ell in arith::primes_in(lo, hi) {
                let order = sp_group_order(m, ell)?;
                gcd = Some(match gcd {
                    None => order,
                    Some(g) => g.gcd(&order),
                });
            }
            let gcd = gcd.expect("nonempty prime range");
            let expected = j_bound(2 * m as u32);
            ensure(gcd == expected, || {
                format!("gcd over [{lo}, {hi}] for m = {m} is {gcd}, expected {expected}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (m, range) gcds matched J(2m)"))
}

fn suite_growth_bound(_quick: bool) -> Result<String> {
    // J(n) 1000^n < (4462 n)^n for even n, squared comparison against
    // 2 (4462 n)^(2n) for odd n to keep sqrt(2) exact.
    let mut checked = 0usize;
    for n in 1..=20u32 {
        let j = j_bound(n).to_bigint();
        let lhs_base = BigInt::from(1000).pow(n) * &j;
        let rhs_base = BigInt::from(4462u64 * n as u64).pow(n);
        if n % 2 == 0 {
            ensure(lhs_base < rhs_base, || format!("growth bound failed at even n = {n}"))?;
        } else {
            let lhs = &lhs_base * &lhs_base;
            let rhs = BigInt::from(2) * &rhs_base * &rhs_base;
            ensure(lhs < rhs, || format!("growth bound failed at odd n = {n}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} values of n compared in exact integer arithmetic"))
}

fn suite_divisibility_chain(quick: bool) -> Result<String> {
    let max_d = if quick { 4 } else { 6 };
    let mut checked = 0usize;
    for d in 1..=max_d {
        for t in 0..=d {
            let a = d - t;
            for t_v in 0..=t {
                for a_v in 0..=a {
                    for p in [0u64, 2, 3, 5, 7] {
                        let data = ReductionData { d, p, t, a, t_v, a_v, deg_lambda: None };
                        data.validate()?;
                        let n = crate::bounds::n_of(&data);
                        let j_pair = j_bound(data.gl_rank()).mul(&j_bound(data.sp_rank()));
                        let j_top = j_bound(2 * d);
                        ensure(n.divides(&j_pair), || {
                            format!("N does not divide J J at {data:?}")
                        })?;
                        ensure(j_pair.divides(&j_top), || {
                            format!("J J does not divide J(2d) at {data:?}")
                        })?;
                        let m = crate::bounds::m_of(&data);
                        for (q, _) in n.prime_factors() {
                            ensure(q <= m as u64 + 1, || "prime divisor of N exceeds M+1".into())?;
                        }
                        ensure(crate::bounds::q_bound(&data) <= 2 * d + 1, || {
                            "Q bound exceeded 2d+1".into()
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} rank tuples"))
}

fn suite_admissible_orders(_quick: bool) -> Result<String> {
    let primes = default_prime_sample(50);
    let good = ReductionData { d: 1, p: 0, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: Some(1) };
    let got: BTreeSet<u64> =
        admissible_orders(&good, &primes)?.iter().filter_map(|o| o.to_u64()).collect();
    let oracle = rank2_integral_symplectic_orders();
    ensure(got == oracle, || format!("elliptic admissible orders {got:?} != oracle {oracle:?}"))?;

    let mult = ReductionData { d: 1, p: 0, t: 1, a: 0, t_v: 0, a_v: 0, deg_lambda: Some(1) };
    let got: Vec<u64> = admissible_orders(&mult, &primes)?.iter().filter_map(|o| o.to_u64()).collect();
    ensure(got == [1, 2], || format!("multiplicative case gave {got:?}"))?;

    // Monotonicity: a larger sample can only remove orders.
    let small = default_prime_sample(10);
    let with_small: BTreeSet<u64> =
        admissible_orders(&good, &small)?.iter().filter_map(|o| o.to_u64()).collect();
    ensure(got_subset(&gotset(&good, &primes)?, &with_small), || {
        "enlarging the prime sample added admissible orders".into()
    })?;

    // Divisor closure on a larger example.
    let surface = ReductionData { d: 3, p: 0, t: 2, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
    let orders = gotset(&surface, &primes)?;
    for &o in &orders {
        for div in 1..=o {
            if o % div == 0 {
                ensure(orders.contains(&div), || {
                    format!("admissible set not divisor-closed: {o} in, {div} out")
                })?;
            }
        }
    }
    Ok("elliptic cases match the trace-bound oracle; monotone and divisor-closed".into())
}

fn gotset(data: &ReductionData, primes: &[u64]) -> Result<BTreeSet<u64>> {
    Ok(admissible_orders(data, primes)?.iter().filter_map(|o| o.to_u64()).collect())
}

fn got_subset(small: &BTreeSet<u64>, large: &BTreeSet<u64>) -> bool {
    small.iter().all(|x| large.contains(x))
}

fn suite_cyclotomic_profile(_quick: bool) -> Result<String> {
    let cases = [(8u64, 5u64), (3, 7), (4, 3), (12, 5), (16, 7), (5, 2), (15, 2), (9, 2)];
    for (n, ell) in cases {
        let profile = cyclotomic_factor_profile(n, ell)?;
        let phi = arith::euler_phi(n);
        let total: u64 = profile.factors.iter().map(|f| f.degree).sum();
        ensure(total == phi, || format!("degrees of Phi_{n} mod {ell} sum to {total}, not {phi}"))?;
        let d = crate::classical::mult_order(ell, n)?;
        ensure(profile.factor_degree == d, || "profile degree != multiplicative order".into())?;

        // Independent route: reduce Phi_n mod ell and factor it by trial
        // division over all monic polynomials.
        let coeffs: Vec<u64> = cyclotomic_poly(n)
            .iter()
            .map(|c| {
                let m = BigInt::from(ell);
                let r = ((c % &m) + &m) % &m;
                u64::try_from(r).unwrap()
            })
            .collect();
        let factors = brute_force_poly_factors(&poly_trim(coeffs), ell);
        ensure(factors.len() == profile.factors.len(), || {
            format!("Phi_{n} mod {ell}: {} true factors vs {} in the profile", factors.len(), profile.factors.len())
        })?;
        ensure(factors.iter().all(|f| f.len() as u64 - 1 == d), || {
            "brute-force factor of unexpected degree".into()
        })?;
        let self_recip_true = factors
            .iter()
            .filter(|f| poly_reciprocal_monic(f, ell).as_deref() == Some(f.as_slice()))
            .count();
        let self_recip_profile = profile
            .factors
            .iter()
            .filter(|f| matches!(f.pairing, ReciprocalPairing::SelfReciprocal))
            .count();
        ensure(self_recip_true == self_recip_profile, || {
            format!("self-reciprocal count mismatch for Phi_{n} mod {ell}")
        })?;
    }
    Ok(format!("{} (n, ell) profiles against brute-force polynomial factorization", cases.len()))
}

/// Run every suite; ordering is fixed by suite name.
pub fn run_suites(quick: bool) -> Vec<SuiteOutcome> {
    let mut outcomes = vec![
        outcome("admissible-orders", suite_admissible_orders(quick)),
        outcome("averaging-operator", suite_averaging(quick)),
        outcome("cyclotomic-profile", suite_cyclotomic_profile(quick)),
        outcome("divisibility-chain", suite_divisibility_chain(quick)),
        outcome("gcd-vs-j", suite_gcd_vs_j(quick)),
        outcome("gl-criterion", suite_gl_criterion(quick)),
        outcome("growth-bound", suite_growth_bound(quick)),
        outcome("sp-2power-bound", suite_lemma_2bd(quick)),
        outcome("perfectize-fuzz", suite_perfectize(quick)),
        outcome("quotient-pairing-fuzz", suite_quotient_pairings(quick)),
        outcome("snf-properties", suite_snf_properties(quick)),
        outcome("sp-criterion", suite_sp_criterion(quick)),
        outcome("torsion-free-oracle", suite_torsion_free_oracle(quick)),
    ];
    outcomes.sort_by(|a, b| a.name.cmp(&b.name));
    outcomes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_oracle_orders() {
        let orders: Vec<u64> = rank2_integral_symplectic_orders().into_iter().collect();
        assert_eq!(orders, [1, 2, 3, 4, 6]);
    }

    #[test]
    fn quick_suites_pass() {
        for s in run_suites(true) {
            assert!(s.passed, "suite {} failed: {}", s.name, s.details);
        }
    }

    #[test]
    fn unimodular_generator_is_unimodular() {
        for i in 0..20 {
            let mut rng = rng_for(17, i);
            let u = random_unimodular(&mut rng, 4, 12);
            assert_eq!(u.det().numer().abs(), BigInt::one());
        }
    }
}
