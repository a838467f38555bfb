//! Property tests for the exact linear algebra and the bound pipeline.

use num_traits::Signed;
use proptest::prelude::*;

use semistable::bounds::{j_bound, m_of, n_of, q_bound, ReductionData};
use semistable::matrix::Mat;
use semistable::ring::{int, LocalRing};
use semistable::snf::{kernel_mod, rank_mod, snf_over};

fn small_matrix() -> impl Strategy<Value = Mat> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-20i64..=20, r * c).prop_map(move |entries| {
            let mut idx = 0;
            Mat::from_fn(r, c, |_, _| {
                let v = int(entries[idx]);
                idx += 1;
                v
            })
        })
    })
}

proptest! {
    /// U A V = D with unimodular U, V and a divisor chain on the diagonal,
    /// over all three coefficient rings.
    #[test]
    fn snf_roundtrip(a in small_matrix()) {
        for ring in [LocalRing::Integers, LocalRing::localized_at(5).unwrap(), LocalRing::mod_prime_power(5, 4).unwrap()] {
            let s = snf_over(&ring, &a).unwrap();
            prop_assert_eq!(s.u.mul(&a).mul(&s.v).normalize_in(&ring), s.d.clone());
            prop_assert!(ring.is_unit(&s.u.det()));
            prop_assert!(ring.is_unit(&s.v.det()));
            if matches!(ring, LocalRing::Integers) {
                prop_assert_eq!(s.u.det().abs(), int(1));
                prop_assert_eq!(s.v.det().abs(), int(1));
            }
            let diag = s.diagonal();
            for w in diag.windows(2) {
                if ring.is_zero(&w[0]) {
                    prop_assert!(ring.is_zero(&w[1]));
                } else if !ring.is_zero(&w[1]) {
                    let (_, rem) = ring.div_rem(&w[1], &w[0]);
                    prop_assert!(ring.is_zero(&rem));
                }
            }
        }
    }

    /// Kernel columns solve the system mod ell and count the corank.
    #[test]
    fn kernel_mod_properties(a in small_matrix(), ell_idx in 0usize..4) {
        let ell = [2u64, 3, 5, 7][ell_idx];
        let k = kernel_mod(&a, ell).unwrap();
        prop_assert_eq!(k.cols(), a.cols() - rank_mod(&a, ell).unwrap());
        let ring = LocalRing::mod_prime_power(ell, 1).unwrap();
        prop_assert!(a.mul(&k).normalize_in(&ring).is_zero_matrix());
    }

    /// The bound pipeline's divisibility and ceiling invariants on fuzzed
    /// rank data.
    #[test]
    fn bound_invariants(d in 1u32..=8, t_frac in 0u32..=8, tv_frac in 0u32..=8, av_frac in 0u32..=8, p_idx in 0usize..5) {
        let t = t_frac % (d + 1);
        let a = d - t;
        let t_v = if t == 0 { 0 } else { tv_frac % (t + 1) };
        let a_v = if a == 0 { 0 } else { av_frac % (a + 1) };
        let p = [0u64, 2, 3, 5, 7][p_idx];
        let data = ReductionData { d, p, t, a, t_v, a_v, deg_lambda: None };
        data.validate().unwrap();
        let n = n_of(&data);
        prop_assert!(n.divides(&j_bound(data.gl_rank()).mul(&j_bound(data.sp_rank()))));
        prop_assert!(q_bound(&data) <= 2 * d + 1);
        prop_assert!(q_bound(&data) <= m_of(&data) + 1);
        for (q, _) in n.prime_factors() {
            prop_assert!(q <= m_of(&data) as u64 + 1);
        }
        if data.is_semistable() {
            prop_assert!(n.is_one());
        }
    }
}
