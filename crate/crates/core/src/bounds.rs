//! The bound pipeline: from numeric reduction data to divisibility bounds
//! on the obstruction group, candidate orders, and structured advice about
//! which extensions can achieve semistable reduction.
//!
//! All logarithms are integer iterations and all products are factored
//! integers; nothing here rounds.

use serde::{Deserialize, Serialize};

use crate::arith::{self, is_prime};
use crate::classical::min_symplectic_dim_for_order;
use crate::error::{Error, Result};
use crate::factored::FactoredInt;

pub const DEFAULT_PRIME_SAMPLE: usize = 50;

/// The numeric shadow of an abelian variety with a discrete valuation:
/// dimension, residue characteristic, and the toric/abelian ranks before
/// and after semistable reduction is achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionData {
    /// Dimension of the abelian variety.
    pub d: u32,
    /// Residue characteristic; 0 for equal characteristic zero.
    pub p: u64,
    /// Toric rank after semistable reduction is reached.
    pub t: u32,
    /// Abelian rank after semistable reduction is reached.
    pub a: u32,
    /// Toric rank at the given place.
    pub t_v: u32,
    /// Abelian rank at the given place.
    pub a_v: u32,
    /// Polarization degree, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg_lambda: Option<u64>,
}

impl ReductionData {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidReductionData("d must be >= 1".into()));
        }
        if self.a + self.t != self.d {
            return Err(Error::InvalidReductionData(format!(
                "a + t must equal d (got {} + {} != {})",
                self.a, self.t, self.d
            )));
        }
        if self.t_v > self.t {
            return Err(Error::InvalidReductionData("t_v must satisfy t_v <= t".into()));
        }
        if self.a_v > self.a {
            return Err(Error::InvalidReductionData("a_v must satisfy a_v <= a".into()));
        }
        if self.p != 0 && !is_prime(self.p) {
            return Err(Error::InvalidReductionData(format!("p = {} is neither 0 nor prime", self.p)));
        }
        if let Some(deg) = self.deg_lambda {
            if deg == 0 {
                return Err(Error::InvalidReductionData("deg_lambda must be positive".into()));
            }
        }
        Ok(())
    }

    /// Semistability is derived, not stored: the ranks already match.
    pub fn is_semistable(&self) -> bool {
        (self.t_v, self.a_v) == (self.t, self.a)
    }

    /// Rank of the general-linear factor, `t - t_v`.
    pub fn gl_rank(&self) -> u32 {
        self.t - self.t_v
    }

    /// Rank of the symplectic factor, `2(a - a_v)`.
    pub fn sp_rank(&self) -> u32 {
        2 * (self.a - self.a_v)
    }
}

/// `s(n, q) = sum_j floor(n / (q^j (q - 1)))`; the sum is finite because
/// terms vanish once `q^j (q-1) > n`.
pub fn s(n: u32, q: u64) -> u32 {
    debug_assert!(is_prime(q));
    let n = n as u64;
    let mut total = 0u64;
    let mut denom = q - 1;
    while denom <= n {
        total += n / denom;
        match denom.checked_mul(q) {
            Some(next) => denom = next,
            None => break,
        }
    }
    total as u32
}

/// The least common multiple of the orders of finite subgroups of the
/// n-dimensional rational general linear group: `prod q^{s(n,q)}` over
/// primes `q <= n + 1`.
pub fn j_bound(n: u32) -> FactoredInt {
    let mut out = FactoredInt::one();
    for q in arith::primes_in(2, n as u64 + 1) {
        out.mul_prime_power(q, s(n, q));
    }
    out
}

/// `M = max(t - t_v, 2(a - a_v))`.
pub fn m_of(data: &ReductionData) -> u32 {
    data.gl_rank().max(data.sp_rank())
}

/// Largest e >= 0 with q^e (q - 1) <= m, by exact iteration.
fn int_log_term(m: u32, q: u64) -> u32 {
    let m = m as u64;
    let mut e = 0u32;
    let mut value = q - 1;
    loop {
        match value.checked_mul(q) {
            Some(next) if next <= m => {
                value = next;
                e += 1;
            }
            _ => return e,
        }
    }
}

/// The certified multiple of the obstruction group order: 1 in the
/// semistable case, otherwise the product over primes `q <= M + 1` of
/// `q^{r_q}`, where `r_q = 1 + floor(log_q(M / (q-1)))` for `q != p` and
/// `r_p = s(t - t_v, p) + s(2(a - a_v), p)` when the residue characteristic
/// itself is at most `M + 1`.
pub fn n_of(data: &ReductionData) -> FactoredInt {
    if data.is_semistable() {
        return FactoredInt::one();
    }
    let m = m_of(data);
    let mut out = FactoredInt::one();
    for q in arith::primes_in(2, m as u64 + 1) {
        let exp = if q == data.p {
            s(data.gl_rank(), q) + s(data.sp_rank(), q)
        } else {
            1 + int_log_term(m, q)
        };
        out.mul_prime_power(q, exp);
    }
    out
}

/// Upper bound for the largest prime divisor of the obstruction group
/// order: `M + 1`, or 1 in the semistable case.
pub fn q_bound(data: &ReductionData) -> u32 {
    if data.is_semistable() {
        1
    } else {
        m_of(data) + 1
    }
}

/// Minimal dimension of a rational-integer matrix of exact order n.
/// Sum of phi over the maximal prime powers, except that a bare factor of
/// 2 is free whenever n has an odd part to absorb the sign.
fn min_gl_dim_for_order(n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut dim = 0u64;
    let mut two_exp = 0u32;
    for (q, e) in arith::factor(n) {
        if q == 2 {
            two_exp = e;
        } else {
            dim += arith::euler_phi(q.pow(e));
        }
    }
    match two_exp {
        0 => dim,
        1 => {
            if n == 2 {
                1
            } else {
                dim // -1 rides along with any odd-order block
            }
        }
        e => dim + arith::euler_phi(2u64.pow(e)),
    }
}

/// Default sampling set: the first `count` primes.
pub fn default_prime_sample(count: usize) -> Vec<u64> {
    arith::first_primes(count)
}

/// Can a cyclic group of order `n` (coprime to the residue characteristic)
/// act faithfully through `GL_gl(Z) x Sp_sp(F_ell)` for every sampled ell?
fn cyclic_order_realizable(n: u64, gl: u64, sp: u64, primes: &[u64], p: u64) -> Result<bool> {
    // Partition the maximal prime powers of n between the two factors.
    let fact = arith::factor(n);
    let parts = 1usize << fact.len();
    'split: for mask in 0..parts {
        let mut n1 = 1u64;
        let mut n2 = 1u64;
        for (i, &(q, e)) in fact.iter().enumerate() {
            if mask & (1 << i) != 0 {
                n1 *= q.pow(e);
            } else {
                n2 *= q.pow(e);
            }
        }
        if min_gl_dim_for_order(n1) > gl {
            continue;
        }
        if n2 > 1 {
            let usable: Vec<u64> =
                primes.iter().copied().filter(|&ell| ell != p && n % ell != 0).collect();
            if usable.is_empty() {
                return Err(Error::InvalidInput(
                    "prime sample contains no prime coprime to the candidate order".into(),
                ));
            }
            for &ell in &usable {
                if min_symplectic_dim_for_order(n2, ell)? > sp {
                    continue 'split;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Divisors of N whose prime-to-p part admits a cyclic realization inside
/// `GL_{t-t_v}(Z) x Sp_{2(a-a_v)}`, the symplectic side checked over every
/// prime in the sample. This refines the plain divisibility bound; it is an
/// oracle-validated artifact rule, with the density-one quantification over
/// residue primes replaced by the finite sample.
pub fn admissible_orders(data: &ReductionData, primes: &[u64]) -> Result<Vec<FactoredInt>> {
    data.validate()?;
    if primes.is_empty() {
        return Err(Error::InvalidInput("prime sample must be nonempty".into()));
    }
    let n = n_of(data);
    let gl = data.gl_rank() as u64;
    let sp = data.sp_rank() as u64;
    let mut out = Vec::new();
    for divisor in n.divisors() {
        let coprime_part = divisor.prime_to_p_part(data.p);
        let value = coprime_part
            .to_u64()
            .ok_or_else(|| Error::Internal("candidate order exceeds u64".into()))?;
        if cyclic_order_realizable(value, gl, sp, primes, data.p)? {
            out.push(divisor);
        }
    }
    Ok(out)
}

/// Primes `ell <= bound` with `ell != p` and `ell` dividing neither the
/// polarization degree nor N; at such primes the lattice pairing stays
/// perfect and the integral symplectic embedding is available.
pub fn safe_primes(data: &ReductionData, bound: u64) -> Result<Vec<u64>> {
    data.validate()?;
    let deg = data.deg_lambda.ok_or(Error::MissingPolarizationDegree)?;
    if bound < 2 {
        return Err(Error::InvalidInput("bound must be >= 2".into()));
    }
    let n = n_of(data);
    Ok(arith::primes_in(2, bound)
        .into_iter()
        .filter(|&ell| ell != data.p && deg % ell != 0 && n.exponent_of(ell) == 0)
        .collect())
}

/// One structured finding in the advice report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Finding {
    pub code: String,
    pub statement: String,
    pub applies_when: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl Finding {
    fn new(code: &str, statement: String, applies_when: &str) -> Self {
        Finding { code: code.into(), statement, applies_when: applies_when.into(), params: Default::default() }
    }

    fn with(mut self, key: &str, value: serde_json::Value) -> Self {
        self.params.insert(key.into(), value);
        self
    }
}

/// Report logic: which extension degrees can possibly help, and which
/// recipes are available. Findings carry their applicability conditions.
pub fn advice(data: &ReductionData, primes: &[u64]) -> Result<Vec<Finding>> {
    data.validate()?;
    if data.is_semistable() {
        return Ok(vec![Finding::new(
            "no_extension_needed",
            "reduction is already semistable at v; the obstruction group is trivial and no extension is required".into(),
            "(t_v, a_v) = (t, a)",
        )]);
    }
    let q = q_bound(data);
    let n = n_of(data);
    let mut findings = Vec::new();

    findings.push(
        Finding::new(
            "inertia_index_prime_divisor",
            format!(
                "any finite separable extension over which semistable reduction is achieved has inertia index divisible by some prime <= {q}"
            ),
            "semistable reduction holds at w but not at v",
        )
        .with("q_bound", q.into()),
    );
    findings.push(Finding::new(
        "inertia_index_divides_local_degree",
        "the inertia index divides the local degree [L_w : F_v], so the bound above constrains that degree as well".into(),
        "always",
    ));
    findings.push(
        Finding::new(
            "prime_power_degree",
            format!("if the extension degree is a power of a prime q, then q <= {q}"),
            "the base is complete at v, or the extension is Galois",
        )
        .with("q_bound", q.into()),
    );

    let orders = admissible_orders(data, primes)?;
    let candidate_degrees: Vec<u64> = orders
        .iter()
        .filter_map(|o| o.to_u64())
        .filter(|&r| r > 1 && (data.p == 0 || r % data.p != 0))
        .collect();
    if !candidate_degrees.is_empty() {
        findings.push(
            Finding::new(
                "cyclic_kummer_recipe",
                "for r the order of the obstruction group (prime to p), adjoining an r-th root of a uniformizer to F(zeta_r) gives a cyclic totally ramified degree-r extension achieving semistable reduction above v".into(),
                "r = #G is prime to p; candidate values of r listed",
            )
            .with("candidate_degrees", candidate_degrees.clone().into())
            .with("q_bound", q.into()),
        );
    }

    if data.p > 0 && data.p > q as u64 {
        findings.push(
            Finding::new(
                "tame_ramification_certified",
                format!(
                    "p = {} exceeds the prime bound {q}, so p does not divide N = {} and the obstruction group is cyclic of order prime to p; a tamely ramified extension suffices",
                    data.p,
                    n.factored_string()
                ),
                "p > M + 1",
            )
            .with("p", data.p.into()),
        );
        findings.push(Finding::new(
            "tame_degree_available",
            "a finite Galois extension of degree prime to p achieving semistable reduction exists".into(),
            "F contains the relevant roots of unity, or p exceeds the largest prime divisor bound",
        ));
    }
    Ok(findings)
}

/// Everything the pipeline knows about one input, assembled and
/// cross-checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub input: ReductionData,
    pub semistable: bool,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: FactoredInt,
    pub q_bound: u32,
    pub j_gl: FactoredInt,
    pub j_sp: FactoredInt,
    pub j_2d: FactoredInt,
    pub admissible_orders: Vec<FactoredInt>,
    pub advice: Vec<Finding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safe_primes: Option<Vec<u64>>,
    pub prime_sample: Vec<u64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub prime_sample_count: usize,
    pub safe_prime_bound: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { prime_sample_count: DEFAULT_PRIME_SAMPLE, safe_prime_bound: 100 }
    }
}

impl BoundReport {
    pub fn compute(data: &ReductionData, options: &ReportOptions) -> Result<BoundReport> {
        data.validate()?;
        let primes = default_prime_sample(options.prime_sample_count);
        let n = n_of(data);
        let j_gl = j_bound(data.gl_rank());
        let j_sp = j_bound(data.sp_rank());
        let j_2d = j_bound(2 * data.d);
        if !n.divides(&j_gl.mul(&j_sp)) {
            return Err(Error::Internal("N does not divide J(t-t_v) J(2(a-a_v))".into()));
        }
        let m = m_of(data);
        let q = q_bound(data);
        if !(q <= m + 1 && m + 1 <= 2 * data.d + 1) {
            return Err(Error::Internal("prime bound exceeded its ceiling".into()));
        }
        let safe = match data.deg_lambda {
            Some(_) => Some(safe_primes(data, options.safe_prime_bound)?),
            None => None,
        };
        let notes = vec![
            format!(
                "admissible orders refine the divisibility bound by an oracle-validated rule; the density-one prime quantification is replaced by the first {} primes",
                options.prime_sample_count
            ),
            "N is a certified multiple of the obstruction group order; admissible orders are candidates, not certificates".into(),
        ];
        Ok(BoundReport {
            input: *data,
            semistable: data.is_semistable(),
            m,
            n: n.clone(),
            q_bound: q,
            j_gl,
            j_sp,
            j_2d,
            admissible_orders: admissible_orders(data, &primes)?,
            advice: advice(data, &primes)?,
            safe_primes: safe,
            prime_sample: primes,
            notes,
        })
    }

    /// Human-oriented rendering; the JSON form is the source of truth.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let d = &self.input;
        out.push_str(&format!(
            "reduction data: d={} p={} (t, a)=({}, {}) (t_v, a_v)=({}, {})\n",
            d.d, d.p, d.t, d.a, d.t_v, d.a_v
        ));
        out.push_str(&format!("semistable at v: {}\n", self.semistable));
        out.push_str(&format!("M = {}\n", self.m));
        out.push_str(&format!("N = {} = {}\n", self.n.factored_string(), self.n.to_bigint()));
        out.push_str(&format!("largest prime divisor bound Q <= {}\n", self.q_bound));
        out.push_str(&format!(
            "J(t-t_v) = {}, J(2(a-a_v)) = {}, J(2d) = {}\n",
            self.j_gl.factored_string(),
            self.j_sp.factored_string(),
            self.j_2d.factored_string()
        ));
        let orders: Vec<String> =
            self.admissible_orders.iter().map(|o| o.to_bigint().to_string()).collect();
        out.push_str(&format!("admissible orders: {{{}}}\n", orders.join(", ")));
        if let Some(safe) = &self.safe_primes {
            let s: Vec<String> = safe.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("safe primes: {{{}}}\n", s.join(", ")));
        }
        for f in &self.advice {
            out.push_str(&format!("advice [{}] ({}): {}\n", f.code, f.applies_when, f.statement));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn good_elliptic() -> ReductionData {
        ReductionData { d: 1, p: 0, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: Some(1) }
    }

    fn mult_elliptic() -> ReductionData {
        ReductionData { d: 1, p: 0, t: 1, a: 0, t_v: 0, a_v: 0, deg_lambda: Some(1) }
    }

    fn semistable_surface() -> ReductionData {
        ReductionData { d: 2, p: 0, t: 1, a: 1, t_v: 1, a_v: 1, deg_lambda: Some(1) }
    }

    #[test]
    fn s_values() {
        assert_eq!(s(2, 2), 3);
        assert_eq!(s(0, 2), 0);
        assert_eq!(s(0, 97), 0);
        assert_eq!(s(4, 2), 7);
        assert_eq!(s(4, 3), 2);
        assert_eq!(s(4, 5), 1);
    }

    #[test]
    fn j_values() {
        assert_eq!(j_bound(0).to_u64(), Some(1));
        assert_eq!(j_bound(1).to_u64(), Some(2));
        assert_eq!(j_bound(2).to_u64(), Some(24));
        assert_eq!(j_bound(4).to_u64(), Some(5760));
        assert_eq!(j_bound(4).factored_string(), "2^7 * 3^2 * 5");
    }

    #[test]
    fn m_n_q_examples() {
        let g = good_elliptic();
        assert_eq!(m_of(&g), 2);
        assert_eq!(n_of(&g).to_u64(), Some(12));
        assert_eq!(q_bound(&g), 3);

        let m = mult_elliptic();
        assert_eq!(m_of(&m), 1);
        assert_eq!(n_of(&m).to_u64(), Some(2));
        assert_eq!(q_bound(&m), 2);

        let ss = semistable_surface();
        assert_eq!(m_of(&ss), 0);
        assert!(n_of(&ss).is_one());
        assert_eq!(q_bound(&ss), 1);
    }

    #[test]
    fn n_with_residue_characteristic() {
        // p = 2 <= M + 1 switches the 2-exponent to s(t-t_v, 2) + s(2(a-a_v), 2)
        let data = ReductionData { d: 1, p: 2, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
        // s(0, 2) + s(2, 2) = 0 + 3
        assert_eq!(n_of(&data).to_u64(), Some(8 * 3));
        // p = 5 > M + 1 = 3: no 5-factor at all
        let data5 = ReductionData { d: 1, p: 5, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
        assert_eq!(n_of(&data5).to_u64(), Some(12));
    }

    #[test]
    fn admissible_orders_elliptic() {
        let primes = default_prime_sample(50);
        let got: Vec<u64> = admissible_orders(&good_elliptic(), &primes)
            .unwrap()
            .iter()
            .map(|o| o.to_u64().unwrap())
            .collect();
        assert_eq!(got, [1, 2, 3, 4, 6]);

        let got: Vec<u64> = admissible_orders(&mult_elliptic(), &primes)
            .unwrap()
            .iter()
            .map(|o| o.to_u64().unwrap())
            .collect();
        assert_eq!(got, [1, 2]);

        let got: Vec<u64> = admissible_orders(&semistable_surface(), &primes)
            .unwrap()
            .iter()
            .map(|o| o.to_u64().unwrap())
            .collect();
        assert_eq!(got, [1]);
    }

    #[test]
    fn gl_dimension_rule() {
        assert_eq!(min_gl_dim_for_order(1), 0);
        assert_eq!(min_gl_dim_for_order(2), 1);
        assert_eq!(min_gl_dim_for_order(3), 2);
        assert_eq!(min_gl_dim_for_order(4), 2);
        assert_eq!(min_gl_dim_for_order(6), 2); // -1 times an order-3 block
        assert_eq!(min_gl_dim_for_order(12), 4);
        assert_eq!(min_gl_dim_for_order(8), 4);
    }

    #[test]
    fn safe_prime_examples() {
        let got = safe_primes(&good_elliptic(), 20).unwrap();
        assert_eq!(got, [5, 7, 11, 13, 17, 19]);

        let ss = semistable_surface();
        assert_eq!(safe_primes(&ss, 10).unwrap(), [2, 3, 5, 7]);

        let mut m = mult_elliptic();
        m.deg_lambda = Some(35);
        assert_eq!(safe_primes(&m, 12).unwrap(), [3, 11]);

        let mut no_deg = good_elliptic();
        no_deg.deg_lambda = None;
        assert!(matches!(safe_primes(&no_deg, 10), Err(Error::MissingPolarizationDegree)));
    }

    #[test]
    fn advice_findings() {
        let primes = default_prime_sample(50);
        let f = advice(&semistable_surface(), &primes).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].code, "no_extension_needed");

        let f = advice(&good_elliptic(), &primes).unwrap();
        let kummer = f.iter().find(|x| x.code == "cyclic_kummer_recipe").unwrap();
        let degrees: Vec<u64> = kummer.params["candidate_degrees"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        assert_eq!(degrees, [2, 3, 4, 6]);
        assert_eq!(kummer.params["q_bound"], 3);

        // p = 5 with M = 2 puts p above the prime bound: tame findings fire
        let data = ReductionData { d: 1, p: 5, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
        let f = advice(&data, &primes).unwrap();
        assert!(f.iter().any(|x| x.code == "tame_ramification_certified"));
        assert!(f.iter().any(|x| x.code == "tame_degree_available"));
    }

    #[test]
    fn report_assembly() {
        let report = BoundReport::compute(&good_elliptic(), &ReportOptions::default()).unwrap();
        assert_eq!(report.n.to_u64(), Some(12));
        assert_eq!(report.q_bound, 3);
        assert!(report.n.divides(&report.j_gl.mul(&report.j_sp)));
        assert!(report.j_gl.mul(&report.j_sp).divides(&report.j_2d));
        assert_eq!(report.safe_primes.as_deref().unwrap(), [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]);
        let text = report.render_text();
        assert!(text.contains("N = 2^2 * 3 = 12"));
    }

    #[test]
    fn validation_rejects_bad_data() {
        let bad = ReductionData { d: 2, p: 0, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
        assert!(bad.validate().is_err());
        let bad_p = ReductionData { d: 1, p: 4, t: 0, a: 1, t_v: 0, a_v: 0, deg_lambda: None };
        assert!(bad_p.validate().is_err());
        let bad_tv = ReductionData { d: 1, p: 0, t: 0, a: 1, t_v: 1, a_v: 0, deg_lambda: None };
        assert!(bad_tv.validate().is_err());
    }
}
