//! Seeded Monte-Carlo execution of the dimension test.
//!
//! Randomness is counter based: trial i draws from a ChaCha8 stream cipher
//! keyed by the run seed with the stream index set to i, so every trial is
//! reproducible in isolation and results are bit-identical for any number of
//! worker threads. Within a trial the draw order is fixed: basis, string,
//! then per-qubit strategy randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bounds::{BasisFamily, ProtocolParams};
use crate::entropy::binomial_tail;
use crate::error::{Error, Result};
use crate::noise::{per_bit_error, NoiseParams, PipelineOptions, RoundBasis};

/// Largest n the simulator supports; strings are packed into u128 words.
pub const MAX_SIM_QUBITS: u64 = 128;

/// Prover strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Measures every qubit in the announced basis, with the honest-device
    /// noise pipeline deciding each bit's error probability.
    HonestMatched,
    /// Stores the first k qubits faithfully (measured noiselessly in the
    /// matched basis) and guesses the remaining n-k bits uniformly.
    StoreK(u64),
    /// Pure guessing; identical to StoreK(0).
    ClassicalGuess,
    /// Always answers the same string, low bit first.
    FixedAnswer(u128),
}

/// One protocol round.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub theta: RoundBasis,
    /// Alice's string, bit j of the integer is qubit j.
    pub s: u128,
    /// Bob's answer.
    pub s_prime: u128,
    pub mismatches: u32,
    pub passed: bool,
}

impl TrialRecord {
    /// Bit-string rendering, qubit 0 first.
    pub fn bits(value: u128, n: u64) -> String {
        (0..n)
            .map(|j| if value >> j & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Empirical pass statistics with a one-sided lower confidence bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalPass {
    pub trials: u64,
    pub passes: u64,
    pub trials_z: u64,
    pub passes_z: u64,
    pub trials_x: u64,
    pub passes_x: u64,
    pub p_hat: f64,
    /// Confidence level is 1 - delta.
    pub delta: f64,
    /// Clopper-Pearson lower bound on p at confidence 1 - delta.
    pub p_lower: f64,
}

/// Per-trial generator: ChaCha8 keyed by the run seed, stream = trial index.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn low_bits(k: u64) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

struct TrialSetup {
    n: u64,
    t: u64,
    strategy: Strategy,
    /// correct-readout probability indexed by [basis][encoded bit].
    honest_correct: [[f64; 2]; 2],
}

fn run_one(setup: &TrialSetup, seed: u64, trial: u64) -> TrialRecord {
    let mut rng = trial_rng(seed, trial);
    let n = setup.n;
    let mask = low_bits(n);
    let theta = if rng.gen::<bool>() {
        RoundBasis::X
    } else {
        RoundBasis::Z
    };
    let s = rng.gen::<u128>() & mask;
    let s_prime = match &setup.strategy {
        Strategy::HonestMatched => {
            let probs = &setup.honest_correct[match theta {
                RoundBasis::Z => 0,
                RoundBasis::X => 1,
            }];
            let mut out = 0u128;
            for j in 0..n {
                let bit = (s >> j & 1) as usize;
                let correct = rng.gen::<f64>() < probs[bit];
                let answer = if correct {
                    bit as u128
                } else {
                    1 - bit as u128
                };
                out |= answer << j;
            }
            out
        }
        Strategy::StoreK(k) => {
            let keep = low_bits(*k);
            (s & keep) | (rng.gen::<u128>() & mask & !keep)
        }
        Strategy::ClassicalGuess => rng.gen::<u128>() & mask,
        Strategy::FixedAnswer(a) => a & mask,
    };
    let mismatches = (s ^ s_prime).count_ones();
    TrialRecord {
        trial,
        theta,
        s,
        s_prime,
        mismatches,
        passed: u64::from(mismatches) <= setup.t,
    }
}

fn build_setup(
    params: &ProtocolParams,
    noise: &NoiseParams,
    strategy: &Strategy,
    opts: PipelineOptions,
) -> Result<TrialSetup> {
    if params.family() != BasisFamily::Xz {
        return Err(Error::WrongFamily {
            expected: "xz",
            actual: params.family().name(),
        });
    }
    if params.n() > MAX_SIM_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "simulator supports n <= {MAX_SIM_QUBITS}, got {}",
            params.n()
        )));
    }
    let strategy = match strategy {
        Strategy::ClassicalGuess => Strategy::StoreK(0),
        Strategy::StoreK(k) if *k > params.n() => {
            return Err(Error::InvalidParameter(format!(
                "store-k with k = {k} exceeds n = {}",
                params.n()
            )));
        }
        other => other.clone(),
    };
    let mut honest_correct = [[1.0; 2]; 2];
    if strategy == Strategy::HonestMatched {
        for (bi, basis) in [RoundBasis::Z, RoundBasis::X].into_iter().enumerate() {
            for bit in 0..2u8 {
                honest_correct[bi][bit as usize] = 1.0 - per_bit_error(noise, basis, bit, opts)?;
            }
        }
    }
    Ok(TrialSetup {
        n: params.n(),
        t: params.t(),
        strategy,
        honest_correct,
    })
}

fn tally(records: impl Iterator<Item = (RoundBasis, bool)>, delta: f64) -> Result<EmpiricalPass> {
    let mut counts = [0u64; 4]; // trials_z, passes_z, trials_x, passes_x
    for (theta, passed) in records {
        let base = match theta {
            RoundBasis::Z => 0,
            RoundBasis::X => 2,
        };
        counts[base] += 1;
        counts[base + 1] += u64::from(passed);
    }
    let trials = counts[0] + counts[2];
    let passes = counts[1] + counts[3];
    Ok(EmpiricalPass {
        trials,
        passes,
        trials_z: counts[0],
        passes_z: counts[1],
        trials_x: counts[2],
        passes_x: counts[3],
        p_hat: passes as f64 / trials as f64,
        delta,
        p_lower: confidence_lower(passes, trials, delta)?,
    })
}

/// Runs the protocol `trials` times. Deterministic given the seed; trials are
/// evaluated in parallel and merged by order-independent summation.
pub fn run_trials(
    params: &ProtocolParams,
    noise: &NoiseParams,
    strategy: &Strategy,
    trials: u64,
    seed: u64,
    delta: f64,
    opts: PipelineOptions,
) -> Result<EmpiricalPass> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let setup = build_setup(params, noise, strategy, opts)?;
    let pairs: Vec<(RoundBasis, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let r = run_one(&setup, seed, i);
            (r.theta, r.passed)
        })
        .collect();
    tally(pairs.into_iter(), delta)
}

/// As [`run_trials`], but also returns the full per-trial log.
pub fn run_trials_logged(
    params: &ProtocolParams,
    noise: &NoiseParams,
    strategy: &Strategy,
    trials: u64,
    seed: u64,
    delta: f64,
    opts: PipelineOptions,
) -> Result<(EmpiricalPass, Vec<TrialRecord>)> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let setup = build_setup(params, noise, strategy, opts)?;
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| run_one(&setup, seed, i))
        .collect();
    let stats = tally(records.iter().map(|r| (r.theta, r.passed)), delta)?;
    Ok((stats, records))
}

/// Exact pass probability of the store-k adversary:
/// sum_{j=0}^{min(t, n-k)} C(n-k, j) 2^-(n-k).
pub fn strategy_store_k(n: u64, k: u64, t: u64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    if t > n {
        return Err(Error::ThresholdOutOfRange { n, t });
    }
    let guessed = n - k;
    if guessed == 0 {
        return Ok(1.0);
    }
    let tail = binomial_tail(guessed, t.min(guessed))?;
    Ok((tail.log2_count() - guessed as f64).exp2().min(1.0))
}

/// One-sided Clopper-Pearson lower confidence bound at confidence 1 - delta:
/// the delta-quantile of Beta(passes, trials - passes + 1), 0 when no trial
/// passed.
pub fn confidence_lower(passes: u64, trials: u64, delta: f64) -> Result<f64> {
    if trials == 0 || passes > trials {
        return Err(Error::InvalidParameter(format!(
            "invalid counts: {passes} / {trials}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if passes == 0 {
        return Ok(0.0);
    }
    let beta = Beta::new(passes as f64, (trials - passes) as f64 + 1.0)
        .map_err(|e| Error::InvalidParameter(format!("beta distribution: {e}")))?;
    Ok(beta.inverse_cdf(delta).clamp(0.0, 1.0))
}

/// Hoeffding lower bound p_hat - sqrt(ln(1/delta) / (2 trials)), clamped to
/// [0, 1]. Looser than Clopper-Pearson but assumption-transparent.
pub fn confidence_lower_hoeffding(passes: u64, trials: u64, delta: f64) -> Result<f64> {
    if trials == 0 || passes > trials {
        return Err(Error::InvalidParameter(format!(
            "invalid counts: {passes} / {trials}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let p_hat = passes as f64 / trials as f64;
    Ok((p_hat - ((1.0 / delta).ln() / (2.0 * trials as f64)).sqrt()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binomial_cdf;
    use crate::noise::{honest_pass_prob, scale_noise};
    use rand::Rng;

    fn xz(n: u64, t: u64) -> ProtocolParams {
        ProtocolParams::new(n, t, BasisFamily::Xz).unwrap()
    }

    fn se(p: f64, trials: u64) -> f64 {
        (p * (1.0 - p) / trials as f64).sqrt()
    }

    #[test]
    fn deterministic_across_runs_and_thread_counts() {
        let params = xz(20, 2);
        let noise = scale_noise(0.01).unwrap();
        let opts = PipelineOptions::default();
        let a = run_trials(
            &params,
            &noise,
            &Strategy::HonestMatched,
            20_000,
            7,
            0.05,
            opts,
        )
        .unwrap();
        let b = run_trials(
            &params,
            &noise,
            &Strategy::HonestMatched,
            20_000,
            7,
            0.05,
            opts,
        )
        .unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = single
            .install(|| {
                run_trials(
                    &params,
                    &noise,
                    &Strategy::HonestMatched,
                    20_000,
                    7,
                    0.05,
                    opts,
                )
            })
            .unwrap();
        assert_eq!(a, c);
        // A different seed gives a different trial stream.
        let d = run_trials(
            &params,
            &noise,
            &Strategy::HonestMatched,
            20_000,
            8,
            0.05,
            opts,
        )
        .unwrap();
        assert_ne!(a.passes, d.passes);
    }

    #[test]
    fn zero_noise_honest_always_passes() {
        let stats = run_trials(
            &xz(40, 0),
            &NoiseParams::zero(),
            &Strategy::HonestMatched,
            5_000,
            1,
            0.05,
            PipelineOptions::default(),
        )
        .unwrap();
        assert_eq!(stats.passes, stats.trials);
        assert_eq!(stats.p_hat, 1.0);
    }

    #[test]
    fn classical_guess_hits_two_to_minus_n() {
        let trials = 10_000_000u64;
        let stats = run_trials(
            &xz(10, 0),
            &NoiseParams::zero(),
            &Strategy::ClassicalGuess,
            trials,
            99,
            0.05,
            PipelineOptions::default(),
        )
        .unwrap();
        let p = 2f64.powi(-10);
        assert!(
            (stats.p_hat - p).abs() <= 3.0 * se(p, trials),
            "p_hat = {}",
            stats.p_hat
        );
    }

    #[test]
    fn store_k_matches_closed_form() {
        let (n, k, t) = (12u64, 5u64, 2u64);
        let expected = strategy_store_k(n, k, t).unwrap();
        let trials = 1_000_000u64;
        let stats = run_trials(
            &xz(n, t),
            &NoiseParams::zero(),
            &Strategy::StoreK(k),
            trials,
            3,
            0.05,
            PipelineOptions::default(),
        )
        .unwrap();
        assert!(
            (stats.p_hat - expected).abs() <= 3.0 * se(expected, trials),
            "p_hat = {} expected = {expected}",
            stats.p_hat
        );
    }

    #[test]
    fn store_k_closed_form_values() {
        assert_eq!(strategy_store_k(9, 9, 3).unwrap(), 1.0);
        assert_eq!(strategy_store_k(10, 0, 0).unwrap(), 2f64.powi(-10));
        // Enumeration oracle over all 2^5 guess patterns.
        let brute = (0u32..32).filter(|g| g.count_ones() <= 2).count() as f64 / 32.0;
        assert_eq!(strategy_store_k(10, 5, 2).unwrap(), brute);
        assert_eq!(brute, 0.5);
        assert!(strategy_store_k(4, 5, 0).is_err());
    }

    #[test]
    fn fixed_answer_mismatches_are_binomial_half() {
        let (n, t) = (16u64, 6u64);
        let trials = 200_000u64;
        let stats = run_trials(
            &xz(n, t),
            &NoiseParams::zero(),
            &Strategy::FixedAnswer(0b1010_1010_1010_1010),
            trials,
            17,
            0.05,
            PipelineOptions::default(),
        )
        .unwrap();
        let p = binomial_cdf(n, t, 0.5).unwrap();
        assert!((stats.p_hat - p).abs() <= 3.0 * se(p, trials));
    }

    #[test]
    fn honest_agrees_with_analytic_pass_probability() {
        // The module-level agreement check; the acceptance suite runs the
        // full 20-configuration version.
        let mut rng = trial_rng(314, 0);
        let opts = PipelineOptions::default();
        for case in 0..5 {
            let n = rng.gen_range(5..=60);
            let t = rng.gen_range(0..=n / 4);
            let total = rng.gen::<f64>() * 0.01;
            let params = xz(n, t);
            let noise = scale_noise(total).unwrap();
            let analytic = honest_pass_prob(&params, &noise, opts).unwrap().p;
            let trials = 100_000u64;
            let stats = run_trials(
                &params,
                &noise,
                &Strategy::HonestMatched,
                trials,
                1000 + case,
                0.05,
                opts,
            )
            .unwrap();
            let tol = 4.0 * se(analytic, trials).max(1e-9);
            assert!(
                (stats.p_hat - analytic).abs() <= tol,
                "case {case}: n={n} t={t} total={total}: {} vs {analytic}",
                stats.p_hat
            );
        }
    }

    #[test]
    fn honest_large_run_agrees_at_three_sigma() {
        let params = xz(50, 3);
        let noise = scale_noise(0.005).unwrap();
        let opts = PipelineOptions::default();
        let analytic = honest_pass_prob(&params, &noise, opts).unwrap().p;
        let trials = 1_000_000u64;
        let stats = run_trials(
            &params,
            &noise,
            &Strategy::HonestMatched,
            trials,
            42,
            0.05,
            opts,
        )
        .unwrap();
        assert!(
            (stats.p_hat - analytic).abs() <= 3.0 * se(analytic, trials),
            "{} vs {analytic}",
            stats.p_hat
        );
    }

    #[test]
    fn trial_log_is_consistent() {
        let params = xz(8, 1);
        let (stats, records) = run_trials_logged(
            &params,
            &NoiseParams::zero(),
            &Strategy::ClassicalGuess,
            500,
            5,
            0.05,
            PipelineOptions::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 500);
        let mut passes = 0;
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.trial, i as u64);
            assert_eq!(r.mismatches, (r.s ^ r.s_prime).count_ones());
            assert_eq!(r.passed, r.mismatches <= 1);
            passes += u64::from(r.passed);
        }
        assert_eq!(passes, stats.passes);
        assert_eq!(TrialRecord::bits(0b0110, 6), "011000");
    }

    #[test]
    fn confidence_corner_cases() {
        // All passes: Clopper-Pearson gives delta^(1/trials).
        for trials in [10u64, 1000, 10_000] {
            let lower = confidence_lower(trials, trials, 0.05).unwrap();
            let expected = 0.05f64.powf(1.0 / trials as f64);
            assert!(
                (lower - expected).abs() < 1e-9,
                "trials={trials}: {lower} vs {expected}"
            );
        }
        assert_eq!(confidence_lower(0, 100, 0.05).unwrap(), 0.0);
        assert!(confidence_lower(5, 4, 0.05).is_err());
        assert!(confidence_lower(5, 10, 0.0).is_err());
    }

    #[test]
    fn hoeffding_formula_point() {
        let lower = confidence_lower_hoeffding(9000, 10_000, 0.05).unwrap();
        let expected = 0.9 - (20f64.ln() / 20_000.0).sqrt();
        assert!((lower - expected).abs() < 1e-12);
        assert_eq!(confidence_lower_hoeffding(1, 10_000_000, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_never_exceeds_p_hat() {
        for passes in [0u64, 1, 50, 99, 100] {
            let p_hat = passes as f64 / 100.0;
            for &delta in &[0.01, 0.05, 0.5] {
                let cp = confidence_lower(passes, 100, delta).unwrap();
                let hf = confidence_lower_hoeffding(passes, 100, delta).unwrap();
                assert!(cp <= p_hat + 1e-12, "CP {cp} > {p_hat}");
                assert!(hf <= p_hat + 1e-12);
            }
        }
    }
}
