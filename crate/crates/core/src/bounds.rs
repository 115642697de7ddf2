//! Certified-dimension lower bounds for the dimension test: the exact and
//! Stirling two-basis bounds, the pairwise multi-basis family bounds, the MUB
//! extractor bound, and the threshold sweep that maximizes the certified
//! count.

use serde::Serialize;

use crate::entropy::{binary_entropy, binomial_tail, log2_complement, threshold_from_alpha};
use crate::error::{Error, Result};

/// Which encoding bases the verifier draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    /// Transversal computational / Hadamard, the two-basis protocol.
    Xz,
    /// Transversal Pauli X, Y or Z.
    Xyz,
    /// Per-qubit independent X or Z (2^n bases).
    Bb84,
    /// Per-qubit independent X, Y or Z (3^n bases).
    SixState,
    /// Per-qudit random member of a full set of d+1 MUB, d a prime power.
    Mub(u32),
}

impl BasisFamily {
    pub fn name(&self) -> String {
        match self {
            BasisFamily::Xz => "xz".into(),
            BasisFamily::Xyz => "xyz".into(),
            BasisFamily::Bb84 => "bb84".into(),
            BasisFamily::SixState => "six-state".into(),
            BasisFamily::Mub(d) => format!("mub({d})"),
        }
    }
}

/// d >= 2 and d = p^k for a single prime p.
pub fn is_prime_power(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut m = d;
    let mut p = 0u32;
    for q in 2..=d {
        if q * q > d {
            break;
        }
        if m.is_multiple_of(q) {
            p = q;
            while m.is_multiple_of(q) {
                m /= q;
            }
            break;
        }
    }
    if p == 0 {
        return true; // d itself is prime
    }
    m == 1
}

/// A test instance: n qubits, integer mismatch threshold t = floor(alpha n),
/// and the basis family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    n: u64,
    t: u64,
    family: BasisFamily,
}

impl ProtocolParams {
    pub fn new(n: u64, t: u64, family: BasisFamily) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if t > n {
            return Err(Error::ThresholdOutOfRange { n, t });
        }
        if let BasisFamily::Mub(d) = family {
            if !is_prime_power(d) {
                return Err(Error::NotPrimePower { d });
            }
        }
        Ok(Self { n, t, family })
    }

    pub fn from_alpha(n: u64, alpha: f64, family: BasisFamily) -> Result<Self> {
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                lo: 0.0,
                hi: 0.5,
            });
        }
        Self::new(n, threshold_from_alpha(n, alpha), family)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.t as f64 / self.n as f64
    }

    /// The protocol is stated for alpha < 1/2; larger thresholds are allowed
    /// here but flagged as outside that regime.
    pub fn outside_regime(&self) -> bool {
        2 * self.t >= self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    Exact,
    Stirling,
    PairwiseXyz,
    PairwiseBb84,
    PairwiseSixState,
    MubExtractor,
}

impl BoundVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BoundVariant::Exact => "exact",
            BoundVariant::Stirling => "stirling",
            BoundVariant::PairwiseXyz => "pairwise-xyz",
            BoundVariant::PairwiseBb84 => "pairwise-bb84",
            BoundVariant::PairwiseSixState => "pairwise-six-state",
            BoundVariant::MubExtractor => "mub-extractor",
        }
    }
}

/// Result of a bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Raw lower bound on log2 dim H_Q, in bits; may be negative, and is
    /// -inf for a vacuous threshold.
    pub log2_dim_lower: f64,
    /// min(n, max(0, log2_dim_lower)).
    pub certified_qubits: f64,
    pub variant: BoundVariant,
    pub n: u64,
    pub t: u64,
    pub p: f64,
    /// True when M = 2^n and the exact bound carries no information.
    pub vacuous: bool,
    /// True for the pairwise family and extractor bounds, which are derived for
    /// sufficiently large n.
    pub asymptotic: bool,
    /// True when t >= n/2, outside the protocol's stated threshold range.
    pub outside_regime: bool,
}

impl BoundReport {
    fn new(
        params: &ProtocolParams,
        p: f64,
        variant: BoundVariant,
        raw: f64,
        asymptotic: bool,
    ) -> Self {
        BoundReport {
            log2_dim_lower: raw,
            certified_qubits: raw.max(0.0).min(params.n as f64),
            variant,
            n: params.n,
            t: params.t,
            p,
            vacuous: raw == f64::NEG_INFINITY,
            asymptotic,
            outside_regime: params.outside_regime(),
        }
    }
}

fn check_pass_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

fn require_family(params: &ProtocolParams, expected: &'static str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::WrongFamily {
            expected,
            actual: params.family.name(),
        })
    }
}

/// Exact two-basis bound:
/// log2 dim H_Q >= n - 2 H(p) - 2 p log2 M - 2 (1-p) log2(2^n - M)
/// with M the exact Hamming-ball size at radius t. The p = 0 and p = 1
/// endpoints use the 0 log(.) = 0 convention; M = 2^n yields a vacuous-flagged
/// report with a -inf raw bound.
pub fn bound_exact(params: &ProtocolParams, p: f64) -> Result<BoundReport> {
    require_family(params, "xz", params.family == BasisFamily::Xz)?;
    check_pass_probability(p)?;
    let tail = binomial_tail(params.n, params.t)?;
    if tail.is_full() {
        return Ok(BoundReport::new(
            params,
            p,
            BoundVariant::Exact,
            f64::NEG_INFINITY,
            false,
        ));
    }
    let h_p = binary_entropy(p)?;
    let term_match = if p == 0.0 {
        0.0
    } else {
        2.0 * p * tail.log2_count()
    };
    let term_miss = if p == 1.0 {
        0.0
    } else {
        2.0 * (1.0 - p) * log2_complement(params.n, &tail)?
    };
    let raw = params.n as f64 - 2.0 * h_p - term_match - term_miss;
    Ok(BoundReport::new(params, p, BoundVariant::Exact, raw, false))
}

/// Stirling form of the two-basis bound:
/// log2 dim H_Q >= ((1 - H(alpha)) 2p - 1) n - 2 H(p), alpha = t/n.
pub fn bound_stirling(params: &ProtocolParams, p: f64) -> Result<BoundReport> {
    require_family(params, "xz", params.family == BasisFamily::Xz)?;
    check_pass_probability(p)?;
    let raw = two_basis_style_exponent(params, p, 1.0)?;
    Ok(BoundReport::new(
        params,
        p,
        BoundVariant::Stirling,
        raw,
        false,
    ))
}

fn two_basis_style_exponent(params: &ProtocolParams, p: f64, kappa: f64) -> Result<f64> {
    let h_alpha = binary_entropy(params.alpha().min(1.0))?;
    let h_p = binary_entropy(p)?;
    Ok(((1.0 - h_alpha) * 2.0 * p - kappa) * params.n as f64 - 2.0 * h_p)
}

/// Multi-basis bounds obtained by averaging the two-basis relation over all
/// basis pairs of a family: exponent ((1 - H(alpha)) 2p - kappa) n - 2 H(p)
/// with kappa = 1 (XYZ), 3/2 (BB84), 4/3 (six-state). Valid for sufficiently
/// large n; reports carry the asymptotic flag.
pub fn bound_pairwise(params: &ProtocolParams, p: f64) -> Result<BoundReport> {
    check_pass_probability(p)?;
    let (kappa, variant) = match params.family {
        BasisFamily::Xyz => (1.0, BoundVariant::PairwiseXyz),
        BasisFamily::Bb84 => (1.5, BoundVariant::PairwiseBb84),
        BasisFamily::SixState => (4.0 / 3.0, BoundVariant::PairwiseSixState),
        _ => {
            return Err(Error::WrongFamily {
                expected: "xyz | bb84 | six-state",
                actual: params.family.name(),
            })
        }
    };
    let raw = two_basis_style_exponent(params, p, kappa)?;
    Ok(BoundReport::new(params, p, variant, raw, true))
}

/// Extractor-based bound for a full set of MUB on qudits:
/// log2 dim H_Q >= ((log2 d - H(alpha) - alpha log2(d-1)) p + log2((d+1)/(2d))) n - H(p).
pub fn bound_mub_extractor(params: &ProtocolParams, p: f64) -> Result<BoundReport> {
    let d = match params.family {
        BasisFamily::Mub(d) => d,
        _ => {
            return Err(Error::WrongFamily {
                expected: "mub(d)",
                actual: params.family.name(),
            })
        }
    };
    check_pass_probability(p)?;
    let df = d as f64;
    let alpha = params.alpha();
    let h_alpha = binary_entropy(alpha)?;
    let rate =
        (df.log2() - h_alpha - alpha * (df - 1.0).log2()) * p + ((df + 1.0) / (2.0 * df)).log2();
    let raw = rate * params.n as f64 - binary_entropy(p)?;
    Ok(BoundReport::new(
        params,
        p,
        BoundVariant::MubExtractor,
        raw,
        true,
    ))
}

/// The bound appropriate to the instance's family: the exact two-basis bound
/// for XZ, the pairwise bound for XYZ / BB84 / six-state, the extractor bound
/// for MUB.
pub fn bound_for_family(params: &ProtocolParams, p: f64) -> Result<BoundReport> {
    match params.family {
        BasisFamily::Xz => bound_exact(params, p),
        BasisFamily::Xyz | BasisFamily::Bb84 | BasisFamily::SixState => bound_pairwise(params, p),
        BasisFamily::Mub(_) => bound_mub_extractor(params, p),
    }
}

/// Right-hand side of the averaged uncertainty relation for a basis family:
/// the quantity the family-averaged conditional entropy must dominate.
///
/// XZ and XYZ: n/2 + H(A|B)/2. BB84: (2^(n-2)/(2^n-1)) n + H(A|B)/2.
/// Six-state: (3^(n-1)/(3^n-1)) n + H(A|B)/2.
/// MUB(d): log2((d+1)/2) n + min(0, H(A|B)).
pub fn avg_entropy_rhs(family: BasisFamily, n: u64, h_ab: f64) -> f64 {
    let nf = n as f64;
    match family {
        BasisFamily::Xz | BasisFamily::Xyz => 0.5 * nf + 0.5 * h_ab,
        BasisFamily::Bb84 => {
            let coeff = 2f64.powi(n as i32 - 2) / (2f64.powi(n as i32) - 1.0);
            coeff * nf + 0.5 * h_ab
        }
        BasisFamily::SixState => {
            let coeff = 3f64.powi(n as i32 - 1) / (3f64.powi(n as i32) - 1.0);
            coeff * nf + 0.5 * h_ab
        }
        BasisFamily::Mub(d) => {
            let df = d as f64;
            ((df + 1.0) / 2.0).log2() * nf + h_ab.min(0.0)
        }
    }
}

/// Maximizes the certified-qubit count of the family bound over the
/// threshold, given the pass probability at every t in [0, ceil(n/2) - 1].
/// Ties break toward smaller t.
pub fn optimize_threshold(
    n: u64,
    family: BasisFamily,
    p_of_t: &[f64],
) -> Result<(u64, BoundReport)> {
    let expected = n.div_ceil(2) as usize;
    if p_of_t.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "p_of_t must cover t in [0, {}], got {} entries",
            expected - 1,
            p_of_t.len()
        )));
    }
    let mut best: Option<(u64, BoundReport)> = None;
    for (t, &p) in p_of_t.iter().enumerate() {
        let params = ProtocolParams::new(n, t as u64, family)?;
        let report = bound_for_family(&params, p)?;
        let better = match &best {
            None => true,
            Some((_, current)) => report.certified_qubits > current.certified_qubits,
        };
        if better {
            best = Some((t as u64, report));
        }
    }
    Ok(best.expect("at least t = 0 is scanned"))
}

/// Asymptotic certified qubits per protocol qubit at p = 1, t = 0, as n grows.
pub fn asymptotic_table(family: BasisFamily) -> f64 {
    match family {
        BasisFamily::Xz | BasisFamily::Xyz => 1.0,
        BasisFamily::Bb84 => 0.5,
        BasisFamily::SixState => 2.0 / 3.0,
        BasisFamily::Mub(d) => ((d as f64 + 1.0) / 2.0).log2(),
    }
}

/// Asymptotic coefficient d/(d+1) for a full MUB set analyzed through the
/// pairwise two-basis relation; at d = 2 this is the six-state value 2/3.
pub fn asymptotic_mub_pairwise(d: u32) -> f64 {
    d as f64 / (d as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from a 60-digit evaluation of the exact bound at n=90, t=9,
    // p = f64(0.99).
    const BOUND_90_9_099: f64 = 9.775_858_405_283_252;

    fn xz(n: u64, t: u64) -> ProtocolParams {
        ProtocolParams::new(n, t, BasisFamily::Xz).unwrap()
    }

    #[test]
    fn prime_powers() {
        let powers: Vec<u32> = (2..=32).filter(|&d| is_prime_power(d)).collect();
        assert_eq!(
            powers,
            vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]
        );
        assert!(!is_prime_power(1));
        assert!(!is_prime_power(0));
    }

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::new(0, 0, BasisFamily::Xz).is_err());
        assert!(ProtocolParams::new(4, 5, BasisFamily::Xz).is_err());
        assert!(matches!(
            ProtocolParams::new(4, 1, BasisFamily::Mub(6)),
            Err(Error::NotPrimePower { d: 6 })
        ));
        let p = ProtocolParams::from_alpha(10, 0.3, BasisFamily::Xz).unwrap();
        assert_eq!(p.t(), 3);
        assert!(!p.outside_regime());
        assert!(xz(10, 5).outside_regime());
    }

    #[test]
    fn exact_perfect_play_certifies_n() {
        for n in [1u64, 10, 90, 1000] {
            let r = bound_exact(&xz(n, 0), 1.0).unwrap();
            assert_eq!(r.log2_dim_lower, n as f64);
            assert_eq!(r.certified_qubits, n as f64);
            assert!(!r.vacuous);
        }
    }

    #[test]
    fn exact_classical_guess_point() {
        // n=1, t=0, p=1/2: 1 - 2 H(1/2) = -1, clamped to 0 certified.
        let r = bound_exact(&xz(1, 0), 0.5).unwrap();
        assert!((r.log2_dim_lower + 1.0).abs() < 1e-12);
        assert_eq!(r.certified_qubits, 0.0);
    }

    #[test]
    fn exact_matches_high_precision_oracle() {
        let r = bound_exact(&xz(90, 9), 0.99).unwrap();
        assert!(
            (r.log2_dim_lower - BOUND_90_9_099).abs() < 1e-9,
            "got {}",
            r.log2_dim_lower
        );
    }

    #[test]
    fn exact_vacuous_at_full_threshold() {
        let r = bound_exact(&xz(3, 3), 0.9).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.certified_qubits, 0.0);
        assert!(r.outside_regime);
    }

    #[test]
    fn exact_rejects_bad_inputs() {
        assert!(bound_exact(&xz(5, 1), 1.2).is_err());
        let bb84 = ProtocolParams::new(5, 1, BasisFamily::Bb84).unwrap();
        assert!(matches!(
            bound_exact(&bb84, 0.9),
            Err(Error::WrongFamily { .. })
        ));
    }

    #[test]
    fn stirling_examples() {
        // alpha = 0, p = 1: exponent reduces to n.
        let r = bound_stirling(&xz(37, 0), 1.0).unwrap();
        assert_eq!(r.log2_dim_lower, 37.0);
        // p = 1/2, alpha = 0: 0*n - 2 H(1/2) = -2.
        let r = bound_stirling(&xz(37, 0), 0.5).unwrap();
        assert!((r.log2_dim_lower + 2.0).abs() < 1e-12);
        assert_eq!(r.certified_qubits, 0.0);
        // n=90, t=9, p=1 literal formula.
        let r = bound_stirling(&xz(90, 9), 1.0).unwrap();
        let expected = ((1.0 - binary_entropy(0.1).unwrap()) * 2.0 - 1.0) * 90.0;
        assert!((r.log2_dim_lower - expected).abs() < 1e-10);
    }

    #[test]
    fn exact_dominates_stirling_on_grid() {
        for n in 1..=40u64 {
            for t in 0..n.div_ceil(2) {
                let params = xz(n, t);
                for k in 0..=20 {
                    let p = k as f64 / 20.0;
                    let e = bound_exact(&params, p).unwrap().log2_dim_lower;
                    let s = bound_stirling(&params, p).unwrap().log2_dim_lower;
                    assert!(e >= s - 1e-9, "n={n} t={t} p={p}: exact {e} < stirling {s}");
                }
            }
        }
    }

    #[test]
    fn exact_monotone_in_p_above_one_half() {
        // Nondecreasing in p for p >= 1/2 at fixed (n, t) with t < n/2; the
        // formula makes no such claim below 1/2 and none is asserted there.
        for n in [3u64, 10, 25, 60] {
            for t in 0..n.div_ceil(2) {
                let params = xz(n, t);
                let mut prev = f64::NEG_INFINITY;
                for step in 0..=50 {
                    let p = 0.5 + step as f64 * 0.01;
                    let b = bound_exact(&params, p).unwrap().log2_dim_lower;
                    assert!(b >= prev - 1e-10, "n={n} t={t} p={p}: {b} < {prev}");
                    prev = b;
                }
            }
        }
    }

    #[test]
    fn pairwise_asymptotic_table_points() {
        let p = 1.0;
        let xyz = ProtocolParams::new(1000, 0, BasisFamily::Xyz).unwrap();
        assert!((bound_pairwise(&xyz, p).unwrap().log2_dim_lower - 1000.0).abs() < 1e-9);
        let bb84 = ProtocolParams::new(1000, 0, BasisFamily::Bb84).unwrap();
        assert!((bound_pairwise(&bb84, p).unwrap().log2_dim_lower - 500.0).abs() < 1e-9);
        let six = ProtocolParams::new(1000, 0, BasisFamily::SixState).unwrap();
        let got = bound_pairwise(&six, p).unwrap().log2_dim_lower;
        assert!((got - 2000.0 / 3.0).abs() < 1e-9);
        // Six-state coefficient equals the pairwise MUB value at d = 2.
        assert!((got / 1000.0 - asymptotic_mub_pairwise(2)).abs() < 1e-12);
        // Pairwise family bounds are flagged as asymptotic.
        assert!(bound_pairwise(&six, p).unwrap().asymptotic);
    }

    #[test]
    fn mub_extractor_examples() {
        let d2 = ProtocolParams::new(10, 0, BasisFamily::Mub(2)).unwrap();
        let r = bound_mub_extractor(&d2, 1.0).unwrap();
        assert!((r.log2_dim_lower - 10.0 * 1.5f64.log2()).abs() < 1e-12);
        // d = 3: log2 3 + log2(4/6) = 1, so the bound is n.
        let d3 = ProtocolParams::new(10, 0, BasisFamily::Mub(3)).unwrap();
        let r = bound_mub_extractor(&d3, 1.0).unwrap();
        assert!((r.log2_dim_lower - 10.0).abs() < 1e-12);
        // p = 0: the negative offset term remains; certified clamps to 0.
        let r = bound_mub_extractor(&d2, 0.0).unwrap();
        assert!((r.log2_dim_lower - 10.0 * (3.0f64 / 4.0).log2()).abs() < 1e-12);
        assert_eq!(r.certified_qubits, 0.0);
    }

    #[test]
    fn avg_entropy_rhs_examples() {
        assert!((avg_entropy_rhs(BasisFamily::Xyz, 1, -1.0) - 0.0).abs() < 1e-15);
        assert!((avg_entropy_rhs(BasisFamily::Bb84, 1, -1.0) - 0.0).abs() < 1e-15);
        // BB84 coefficient at n=1 coincides with the XZ pair.
        assert!(
            (avg_entropy_rhs(BasisFamily::Bb84, 1, -0.3)
                - avg_entropy_rhs(BasisFamily::Xz, 1, -0.3))
            .abs()
                < 1e-15
        );
        let n = 4u64;
        let got = avg_entropy_rhs(BasisFamily::Mub(2), n, -(n as f64));
        let expected = 1.5f64.log2() * n as f64 - n as f64;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn optimize_threshold_trivial_cases() {
        let n = 10u64;
        let len = n.div_ceil(2) as usize;
        let (t, r) = optimize_threshold(n, BasisFamily::Xz, &vec![1.0; len]).unwrap();
        assert_eq!(t, 0);
        assert_eq!(r.certified_qubits, n as f64);
        let (t, r) = optimize_threshold(n, BasisFamily::Xz, &vec![0.0; len]).unwrap();
        assert_eq!(t, 0, "ties break toward smaller t");
        assert_eq!(r.certified_qubits, 0.0);
        assert!(optimize_threshold(n, BasisFamily::Xz, &[1.0; 2]).is_err());
    }

    #[test]
    fn asymptotic_table_values() {
        assert_eq!(asymptotic_table(BasisFamily::Xz), 1.0);
        assert_eq!(asymptotic_table(BasisFamily::Xyz), 1.0);
        assert_eq!(asymptotic_table(BasisFamily::Bb84), 0.5);
        assert!((asymptotic_table(BasisFamily::SixState) - 2.0 / 3.0).abs() < 1e-15);
        assert!((asymptotic_table(BasisFamily::Mub(5)) - 3f64.log2()).abs() < 1e-15);
    }
}
