//! Acceptance suite: every release gate in one place, each criterion timed
//! and reported on its own line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use semistable::arith;
use semistable::bounds::{
    admissible_orders, default_prime_sample, j_bound, n_of, q_bound, ReductionData,
};
use semistable::classical::{
    brute_force_spectrum, gl_group_order, gl_has_element_of_order, sp_group_order,
    sp_has_element_of_order, GroupFamily, PrimePower, SpectrumMethod,
};
use semistable::factored::FactoredInt;
use semistable::verify::{
    check_perfectize_instance, check_quotient_instance, random_perfectize_instance,
    random_quotient_instance, rank2_integral_symplectic_orders,
};

struct Criterion {
    index: u32,
    name: &'static str,
    limit: Duration,
    started: Instant,
}

impl Criterion {
    fn start(index: u32, name: &'static str, limit: Duration) -> Self {
        Criterion { index, name, limit, started: Instant::now() }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed();
        let ok = elapsed <= self.limit;
        println!(
            "acceptance {:>2} ({}): {} in {:.3?} (limit {:?})",
            self.index,
            self.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            self.limit
        );
        assert!(ok, "criterion {} exceeded its time limit: {elapsed:.3?}", self.index);
    }

    fn fail(self, message: &str) -> ! {
        println!("acceptance {:>2} ({}): FAIL — {message}", self.index, self.name);
        panic!("criterion {} failed: {message}", self.index);
    }
}

#[test]
fn criterion_01_j_values() {
    let c = Criterion::start(1, "J(0), J(1), J(2)", Duration::from_millis(1));
    let checks = [(0u32, 1u64), (1, 2), (2, 24)];
    for (n, expected) in checks {
        if j_bound(n).to_u64() != Some(expected) {
            c.fail(&format!("J({n}) != {expected}"));
        }
    }
    c.finish();
}

#[test]
fn criterion_02_gcd_characterization() {
    let c = Criterion::start(2, "gcd of symplectic orders equals J(2m)", Duration::from_secs(1));
    for m in 1..=3usize {
        for (lo, hi) in [(3u64, 503u64), (11, 511), (101, 601)] {
            let mut gcd: Option<FactoredInt> = None;
            for ell in arith::primes_in(lo, hi) {
                let order = sp_group_order(m, ell).unwrap();
                gcd = Some(match gcd {
                    None => order,
                    Some(g) => g.gcd(&order),
                });
            }
            let gcd = gcd.unwrap();
            let expected = j_bound(2 * m as u32);
            if gcd != expected {
                c.fail(&format!(
                    "m = {m}, range [{lo}, {hi}]: gcd {} != J({}) = {}",
                    gcd,
                    2 * m,
                    expected
                ));
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_03_growth_bound() {
    let c = Criterion::start(3, "J(n) growth bound", Duration::from_secs(1));
    // Exact comparison against (4462 n / 1000)^n; odd case squared so that
    // sqrt(2) never needs evaluating.
    for n in 1..=20u32 {
        let j = j_bound(n).to_bigint();
        let lhs = BigInt::from(1000).pow(n) * &j;
        let rhs = BigInt::from(4462u64 * n as u64).pow(n);
        let ok = if n % 2 == 0 { lhs < rhs } else { &lhs * &lhs < BigInt::from(2) * &rhs * &rhs };
        if !ok {
            c.fail(&format!("bound violated at n = {n}"));
        }
    }
    c.finish();
}

#[test]
fn criterion_04_two_power_orders() {
    let c = Criterion::start(4, "no oversized 2-power symplectic orders", Duration::from_secs(60));
    let cases = [
        (1usize, 5u64, SpectrumMethod::Exhaustive),
        (1, 13, SpectrumMethod::Exhaustive),
        (2, 5, SpectrumMethod::Sampled { count: 100_000, seed: 0 }),
        (2, 13, SpectrumMethod::Sampled { count: 100_000, seed: 0 }),
    ];
    for (m, ell, method) in cases {
        assert_eq!(ell % 8, 5);
        let spectrum =
            brute_force_spectrum(GroupFamily::Sp, 2 * m, ell, method, 1_000_000).unwrap();
        for &order in &spectrum.orders {
            if order.is_power_of_two() && order > 1 {
                let r = order.trailing_zeros();
                if 2u64.pow(r - 1) > 2 * m as u64 {
                    c.fail(&format!("order 2^{r} found in Sp_{}(F_{ell})", 2 * m));
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_05_sp_criterion_vs_exhaustive() {
    let c = Criterion::start(5, "symplectic order criterion vs enumeration", Duration::from_secs(300));
    let powers = PrimePower::up_to(32);
    let mut cases = 0usize;
    for ell in [3u64, 5, 7, 11, 13] {
        let spectrum =
            brute_force_spectrum(GroupFamily::Sp, 2, ell, SpectrumMethod::Exhaustive, 1_000_000)
                .unwrap();
        for pp in &powers {
            if pp.q == ell {
                continue;
            }
            let predicted = sp_has_element_of_order(1, *pp, ell).unwrap();
            if predicted != spectrum.contains(pp.value) {
                c.fail(&format!("m=1, ell={ell}, q^r={}: criterion {predicted}", pp.value));
            }
            cases += 1;
        }
    }
    let spectrum =
        brute_force_spectrum(GroupFamily::Sp, 4, 3, SpectrumMethod::Exhaustive, 1_000_000).unwrap();
    assert_eq!(spectrum.group_order.to_u64(), Some(51840));
    for pp in &powers {
        if pp.q == 3 {
            continue;
        }
        let predicted = sp_has_element_of_order(2, *pp, 3).unwrap();
        if predicted != spectrum.contains(pp.value) {
            c.fail(&format!("m=2, ell=3, q^r={}: criterion {predicted}", pp.value));
        }
        cases += 1;
    }
    assert!(cases >= 80);
    c.finish();
}

#[test]
fn criterion_06_gl_criterion_vs_sampling() {
    let c = Criterion::start(6, "general linear order criterion vs sampling", Duration::from_secs(120));
    let powers = PrimePower::up_to(16);
    for n in 1..=4usize {
        for ell in [2u64, 3, 5, 7] {
            let order = gl_group_order(n, ell).unwrap();
            let exhaustive = n <= 2 || order.to_u64().map(|o| o <= 1_000_000).unwrap_or(false);
            let method = if exhaustive {
                SpectrumMethod::Exhaustive
            } else {
                SpectrumMethod::Sampled { count: 100_000, seed: 6 }
            };
            let spectrum = brute_force_spectrum(GroupFamily::Gl, n, ell, method, 1_000_000).unwrap();
            for pp in &powers {
                if pp.q == ell {
                    continue;
                }
                let predicted = gl_has_element_of_order(n, *pp, ell).unwrap();
                if predicted && !spectrum.contains(pp.value) {
                    c.fail(&format!("GL_{n}(F_{ell}) missing asserted order {}", pp.value));
                }
                if !predicted && n <= 2 && spectrum.contains(pp.value) {
                    c.fail(&format!("GL_{n}(F_{ell}) contains denied order {}", pp.value));
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_07_elliptic_bounds() {
    let c = Criterion::start(7, "elliptic N and admissible orders", Duration::from_secs(1));
    let primes = default_prime_sample(50);

    let good = ReductionData { d: 1, p: 0, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: Some(1) };
    if n_of(&good).to_u64() != Some(12) {
        c.fail("potentially good elliptic case: N != 12");
    }
    let orders: BTreeSet<u64> =
        admissible_orders(&good, &primes).unwrap().iter().filter_map(|o| o.to_u64()).collect();
    let oracle = rank2_integral_symplectic_orders();
    if orders != oracle {
        c.fail(&format!("admissible orders {orders:?} != trace-bound oracle {oracle:?}"));
    }

    let mult = ReductionData { d: 1, p: 0, t: 1, a: 0, t_v: 0, a_v: 0, deg_lambda: Some(1) };
    if n_of(&mult).to_u64() != Some(2) {
        c.fail("potentially multiplicative elliptic case: N != 2");
    }
    let orders: Vec<u64> =
        admissible_orders(&mult, &primes).unwrap().iter().filter_map(|o| o.to_u64()).collect();
    if orders != [1, 2] {
        c.fail(&format!("multiplicative admissible orders {orders:?} != [1, 2]"));
    }
    c.finish();
}

#[test]
fn criterion_08_divisibility_chain() {
    let c = Criterion::start(8, "N | J(t-t_v) J(2(a-a_v)) | J(2d)", Duration::from_secs(10));
    for d in 1..=6u32 {
        for t in 0..=d {
            let a = d - t;
            for t_v in 0..=t {
                for a_v in 0..=a {
                    for p in [0u64, 2, 3, 5, 7, 11, 13] {
                        let data = ReductionData { d, p, t, a, t_v, a_v, deg_lambda: None };
                        data.validate().unwrap();
                        let n = n_of(&data);
                        let j_pair = j_bound(data.gl_rank()).mul(&j_bound(data.sp_rank()));
                        let j_top = j_bound(2 * d);
                        if !n.divides(&j_pair) {
                            c.fail(&format!("N does not divide the J product at {data:?}"));
                        }
                        if !j_pair.divides(&j_top) {
                            c.fail(&format!("J product does not divide J(2d) at {data:?}"));
                        }
                        if q_bound(&data) > 2 * d + 1 {
                            c.fail(&format!("prime bound exceeded 2d + 1 at {data:?}"));
                        }
                    }
                }
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_09_perfectize_fuzz() {
    let c = Criterion::start(9, "perfectize on 500 seeded instances", Duration::from_secs(120));
    let mut exact = 0usize;
    let mut split = 0usize;
    for index in 0..500u64 {
        let inst = match random_perfectize_instance(0x9E4F, index) {
            Ok(inst) => inst,
            Err(e) => c.fail(&format!("instance {index} generation failed: {e}")),
        };
        match check_perfectize_instance(&inst, 8) {
            Ok(semistable::verify::PerfectizeBranch::Exact) => exact += 1,
            Ok(semistable::verify::PerfectizeBranch::Split(_)) => split += 1,
            Err(e) => c.fail(&format!("instance {index} failed: {e}")),
        }
    }
    println!("    perfectize corpus: {exact} exact, {split} split");
    assert!(exact > 0 && split > 0, "corpus must exercise both branches");
    c.finish();
}

#[test]
fn criterion_10_quotient_pairing_fuzz() {
    let c = Criterion::start(10, "quotient pairings on 500 seeded instances", Duration::from_secs(60));
    for index in 0..500u64 {
        let inst = match random_quotient_instance(0xBEE5, index) {
            Ok(inst) => inst,
            Err(e) => c.fail(&format!("instance {index} generation failed: {e}")),
        };
        if let Err(e) = check_quotient_instance(&inst, 0xBEE5, index) {
            c.fail(&format!("instance {index} failed: {e}"));
        }
    }
    c.finish();
}
