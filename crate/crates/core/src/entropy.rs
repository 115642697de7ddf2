//! Scalar information-theoretic kernels and exact binomial-tail arithmetic.
//!
//! All logarithms and entropies in this crate are base 2 (bits). Tail sums
//! M = sum_{i=0}^{t} C(n,i) are kept as exact arbitrary-precision integers up
//! to n = 10^4 and switch to a compensated log-domain form beyond that.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Largest n for which tail sums and complements are computed with exact
/// big integers; beyond this the log-domain forms take over.
const EXACT_BIGINT_LIMIT: u64 = 10_000;

/// Binary entropy H(x) = -x log2 x - (1-x) log2(1-x), with H(0) = H(1) = 0
/// by continuous extension.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    // ln_1p keeps the (1-x) term accurate for small x.
    let h = -x * x.log2() - (1.0 - x) * ((-x).ln_1p() / LN_2);
    Ok(h.min(1.0))
}

/// The exact tail sum M = sum_{i=0}^{t} C(n,i) together with its base-2 log.
#[derive(Debug, Clone)]
pub struct BinomialTail {
    n: u64,
    t: u64,
    exact_count: BigUint,
    log2_count: f64,
}

impl BinomialTail {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Exact M as an arbitrary-precision integer.
    pub fn exact_count(&self) -> &BigUint {
        &self.exact_count
    }

    /// log2(M), accurate to ~1e-15 relative.
    pub fn log2_count(&self) -> f64 {
        self.log2_count
    }

    /// True when M = 2^n, i.e. every string passes and the threshold is
    /// degenerate.
    pub fn is_full(&self) -> bool {
        self.exact_count == BigUint::one() << self.n as usize
    }
}

/// Exact Hamming-ball size M = sum_{i=0}^{t} C(n,i).
///
/// Coefficients are accumulated by the multiplicative recurrence
/// C(n,i+1) = C(n,i) * (n-i) / (i+1) in exact integer arithmetic.
pub fn binomial_tail(n: u64, t: u64) -> Result<BinomialTail> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if t > n {
        return Err(Error::ThresholdOutOfRange { n, t });
    }
    let mut coeff = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..t {
        coeff = coeff * BigUint::from(n - i) / BigUint::from(i + 1);
        sum += &coeff;
    }
    let log2_count = log2_biguint(&sum);
    Ok(BinomialTail {
        n,
        t,
        exact_count: sum,
        log2_count,
    })
}

/// log2(2^n - M), the log-size of the complement of the Hamming ball.
///
/// Exact big-integer arithmetic for n <= 10^4; for larger n the value is
/// n + log2(1 - M 2^-n) with the log1p form keeping the small-ratio case
/// stable. Fails with a degenerate-threshold error when M = 2^n.
pub fn log2_complement(n: u64, tail: &BinomialTail) -> Result<f64> {
    if tail.n() != n {
        return Err(Error::InvalidParameter(format!(
            "tail was computed for n = {}, not n = {}",
            tail.n(),
            n
        )));
    }
    if tail.is_full() {
        return Err(Error::DegenerateThreshold { n });
    }
    if n <= EXACT_BIGINT_LIMIT {
        let full = BigUint::one() << n as usize;
        let diff = full - tail.exact_count();
        return Ok(log2_biguint(&diff));
    }
    let ratio = (tail.log2_count() - n as f64).exp2();
    Ok(n as f64 + (-ratio).ln_1p() / LN_2)
}

/// Stirling bracket (lower, upper) around the exact tail sum M at t = floor(alpha n):
/// (8 n a (1-a))^(-1/2) 2^(n H(a)) <= M <= 2^(n H(a)) with a = t/n.
///
/// alpha = 0 returns (1, 1). Values can overflow to infinity for large n H(a);
/// callers comparing against exact M should stay below n ~ 1000.
pub fn stirling_bracket(n: u64, alpha: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            lo: 0.0,
            hi: 0.5,
        });
    }
    let t = threshold_from_alpha(n, alpha);
    if t == 0 {
        return Ok((1.0, 1.0));
    }
    let a = t as f64 / n as f64;
    let h = binary_entropy(a)?;
    let upper = (n as f64 * h).exp2();
    let lower = upper / (8.0 * n as f64 * a * (1.0 - a)).sqrt();
    Ok((lower, upper))
}

/// t = floor(alpha * n), with a 1e-9 nudge so that fractions like 0.3 * 10,
/// which land just below an integer in binary floating point, floor to the
/// intended value.
pub fn threshold_from_alpha(n: u64, alpha: f64) -> u64 {
    ((alpha * n as f64 + 1e-9).floor() as u64).min(n)
}

/// P[Bin(n, e) <= t], by compensated summation of per-term values whose
/// binomial coefficients are exact big integers carried in log2 form.
pub fn binomial_cdf(n: u64, t: u64, e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::OutOfRange {
            name: "e",
            value: e,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if t > n {
        return Err(Error::ThresholdOutOfRange { n, t });
    }
    if t == n || e == 0.0 {
        return Ok(1.0);
    }
    if e == 1.0 {
        return Ok(0.0);
    }
    let log2_e = e.log2();
    let log2_1me = (-e).ln_1p() / LN_2;
    let mut coeff = BigUint::one();
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64; // Kahan compensation
    for i in 0..=t {
        if i > 0 {
            coeff = coeff * BigUint::from(n - i + 1) / BigUint::from(i);
        }
        let log2_term = log2_biguint(&coeff) + i as f64 * log2_e + (n - i) as f64 * log2_1me;
        let term = log2_term.exp2();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// log2 of a positive big integer, from the top 53 bits of the mantissa.
pub(crate) fn log2_biguint(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53-bit mantissa fits");
    shift as f64 + top.log2()
}
