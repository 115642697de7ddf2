//! Honest-device noise pipeline and analytic pass probabilities.
//!
//! Per qubit, the pipeline is: preparation of |0> afflicted by a bit-flip
//! channel (rate p1); an encoding rotation, each compiled gate followed by a
//! depolarizing channel (parameter p2); a dephasing transmission channel
//! (rate p3); an optional decode rotation on the receiver side, again followed
//! by depolarizing; and a Z readout whose outcome flips with probability p4.
//!
//! Encoding |0> in the Z round applies no gate and therefore, by default, no
//! gate depolarizing; |1>, |+> and |-> each cost exactly one compiled gate
//! (the |-> rotation HX counts as one). Z-round decoding applies no gate,
//! X-round decoding applies one. [`PipelineOptions`] exposes the two
//! conventions this fixes: whether identity operations still depolarize, and
//! whether HX costs two gates.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{optimize_threshold, BasisFamily, ProtocolParams};
use crate::density::{apply_channel_1q, hadamard, pauli_x, Channel1q, DensityMatrix};
use crate::entropy::binomial_cdf;
use crate::error::{Error, Result};

/// Basis of a protocol round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RoundBasis {
    Z,
    X,
}

impl RoundBasis {
    pub fn name(&self) -> &'static str {
        match self {
            RoundBasis::Z => "Z",
            RoundBasis::X => "X",
        }
    }
}

/// Relative weights of the four error rates: reset, single-qubit gate,
/// shuttling, measurement.
pub const BASE_PROFILE: [f64; 4] = [5e-3, 5e-5, 6e-6, 1e-3];

/// Per-operation error rates of the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    /// Preparation bit-flip rate.
    pub p1: f64,
    /// Per-gate depolarizing parameter (CP requires p2 <= 3/4).
    pub p2: f64,
    /// Transmission dephasing rate.
    pub p3: f64,
    /// Readout flip rate.
    pub p4: f64,
}

impl NoiseParams {
    pub fn new(p1: f64, p2: f64, p3: f64, p4: f64) -> Result<Self> {
        for (name, value, hi) in [
            ("p1", p1, 1.0),
            ("p2", p2, 0.75),
            ("p3", p3, 1.0),
            ("p4", p4, 1.0),
        ] {
            if !(0.0..=hi).contains(&value) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    lo: 0.0,
                    hi,
                });
            }
        }
        Ok(Self { p1, p2, p3, p4 })
    }

    pub fn zero() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
            p4: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.p1 + self.p2 + self.p3 + self.p4
    }
}

/// Splits a total noise rate over the four operations in the fixed base
/// proportions, so that p1 + p2 + p3 + p4 = total exactly.
pub fn scale_noise(total: f64) -> Result<NoiseParams> {
    if !total.is_finite() || total < 0.0 {
        return Err(Error::OutOfRange {
            name: "total",
            value: total,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let sum: f64 = BASE_PROFILE.iter().sum();
    let p1 = total * (BASE_PROFILE[0] / sum);
    let p2 = total * (BASE_PROFILE[1] / sum);
    let p3 = total * (BASE_PROFILE[2] / sum);
    // The last component absorbs the rounding so the four rates sum to the
    // requested total exactly.
    let p4 = (total - p1 - p2 - p3).max(0.0);
    NoiseParams::new(p1, p2, p3, p4)
}

/// Resolutions of the two conventions the noise model leaves open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Apply a gate-depolarizing channel even when the encoding or decoding
    /// rotation is the identity (default: no gate, no gate error).
    pub depolarize_identity: bool,
    /// Count the |-> encoding rotation HX as two gates with two depolarizing
    /// applications instead of one compiled gate (default: one).
    pub per_gate_depolarizing: bool,
}

/// Marginal per-qubit error rates for the two round bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerQubitErrors {
    pub e_z: f64,
    pub e_x: f64,
}

impl PerQubitErrors {
    pub fn get(&self, basis: RoundBasis) -> f64 {
        match basis {
            RoundBasis::Z => self.e_z,
            RoundBasis::X => self.e_x,
        }
    }
}

/// Probability that the decoded bit differs from the encoded one, for a fixed
/// round basis and encoded bit value, computed by running the 2x2 density
/// matrix through the full channel pipeline.
pub fn per_bit_error(
    noise: &NoiseParams,
    basis: RoundBasis,
    bit: u8,
    opts: PipelineOptions,
) -> Result<f64> {
    if bit > 1 {
        return Err(Error::InvalidParameter("bit must be 0 or 1".into()));
    }
    let depol = Channel1q::Depolarizing(noise.p2);

    // 1. Preparation in |0> with a bit flip.
    let mut rho = DensityMatrix::from_diagonal(&[1.0, 0.0])?;
    rho = apply_channel_1q(&rho, &Channel1q::BitFlip(noise.p1))?;

    // 2. Encoding rotation, one depolarizing per compiled gate.
    match (basis, bit) {
        (RoundBasis::Z, 0) => {
            if opts.depolarize_identity {
                rho = apply_channel_1q(&rho, &depol)?;
            }
        }
        (RoundBasis::Z, _) => {
            rho = apply_channel_1q(&rho, &Channel1q::Unitary(pauli_x()))?;
            rho = apply_channel_1q(&rho, &depol)?;
        }
        (RoundBasis::X, 0) => {
            rho = apply_channel_1q(&rho, &Channel1q::Unitary(hadamard()))?;
            rho = apply_channel_1q(&rho, &depol)?;
        }
        (RoundBasis::X, _) => {
            rho = apply_channel_1q(&rho, &Channel1q::Unitary(pauli_x()))?;
            if opts.per_gate_depolarizing {
                rho = apply_channel_1q(&rho, &depol)?;
            }
            rho = apply_channel_1q(&rho, &Channel1q::Unitary(hadamard()))?;
            rho = apply_channel_1q(&rho, &depol)?;
        }
    }

    // 3. Transmission dephasing.
    rho = apply_channel_1q(&rho, &Channel1q::Dephasing(noise.p3))?;

    // 4./5. Decode rotation back to the Z axis where needed, then Z readout.
    match basis {
        RoundBasis::Z => {
            if opts.depolarize_identity {
                rho = apply_channel_1q(&rho, &depol)?;
            }
        }
        RoundBasis::X => {
            rho = apply_channel_1q(&rho, &Channel1q::Unitary(hadamard()))?;
            rho = apply_channel_1q(&rho, &depol)?;
        }
    }

    let p_outcome_one = (1.0 - noise.p4) * rho.mat()[(1, 1)].re + noise.p4 * rho.mat()[(0, 0)].re;
    let err = if bit == 0 {
        p_outcome_one
    } else {
        1.0 - p_outcome_one
    };
    // Rounding in the unitary products can leave a sub-ulp excursion outside
    // [0, 1]; the protocol math needs a genuine probability.
    Ok(err.clamp(0.0, 1.0))
}

/// Marginal per-qubit error rate for a basis, averaged over the uniform
/// encoded bit. Bits are i.i.d. uniform, so per-qubit errors are i.i.d. across
/// qubits with exactly this rate.
pub fn per_qubit_error(
    noise: &NoiseParams,
    basis: RoundBasis,
    opts: PipelineOptions,
) -> Result<f64> {
    Ok(0.5 * (per_bit_error(noise, basis, 0, opts)? + per_bit_error(noise, basis, 1, opts)?))
}

pub fn per_qubit_errors(noise: &NoiseParams, opts: PipelineOptions) -> Result<PerQubitErrors> {
    Ok(PerQubitErrors {
        e_z: per_qubit_error(noise, RoundBasis::Z, opts)?,
        e_x: per_qubit_error(noise, RoundBasis::X, opts)?,
    })
}

/// Per-basis and averaged pass probabilities of the honest matched-basis
/// prover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassStats {
    pub p_z: f64,
    pub p_x: f64,
    /// p = (p_x + p_z) / 2, the quantity entering the dimension bounds.
    pub p: f64,
}

/// Analytic pass probabilities: p_theta = P[Bin(n, e_theta) <= t].
pub fn honest_pass_prob(
    params: &ProtocolParams,
    noise: &NoiseParams,
    opts: PipelineOptions,
) -> Result<PassStats> {
    if params.family() != BasisFamily::Xz {
        return Err(Error::WrongFamily {
            expected: "xz",
            actual: params.family().name(),
        });
    }
    let errors = per_qubit_errors(noise, opts)?;
    let p_z = binomial_cdf(params.n(), params.t(), errors.e_z)?;
    let p_x = binomial_cdf(params.n(), params.t(), errors.e_x)?;
    Ok(PassStats {
        p_z,
        p_x,
        p: 0.5 * (p_x + p_z),
    })
}

/// One row of the certified-qubits sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub total: f64,
    pub t_star: u64,
    pub alpha_star: f64,
    pub p_x: f64,
    pub p_z: f64,
    pub p: f64,
    pub certified_qubits: f64,
}

/// For every (total, n) cell: analytic pass probabilities over all thresholds
/// t < n/2, then the threshold maximizing the exact bound. Rows are ordered by
/// total (in the order given) and then by n ascending; the computation is
/// parallel but the output is deterministic.
pub fn certified_sweep(
    n_min: u64,
    n_max: u64,
    totals: &[f64],
    opts: PipelineOptions,
) -> Result<Vec<SweepRow>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidParameter(format!(
            "invalid n range [{n_min}, {n_max}]"
        )));
    }
    let mut cells = Vec::new();
    for &total in totals {
        let errors = per_qubit_errors(&scale_noise(total)?, opts)?;
        for n in n_min..=n_max {
            cells.push((n, total, errors));
        }
    }
    cells
        .par_iter()
        .map(|&(n, total, errors)| {
            let count = n.div_ceil(2);
            let mut p_of_t = Vec::with_capacity(count as usize);
            let mut per_basis = Vec::with_capacity(count as usize);
            for t in 0..count {
                let p_z = binomial_cdf(n, t, errors.e_z)?;
                let p_x = binomial_cdf(n, t, errors.e_x)?;
                per_basis.push((p_x, p_z));
                p_of_t.push(0.5 * (p_x + p_z));
            }
            let (t_star, report) = optimize_threshold(n, BasisFamily::Xz, &p_of_t)?;
            let (p_x, p_z) = per_basis[t_star as usize];
            Ok(SweepRow {
                n,
                total,
                t_star,
                alpha_star: t_star as f64 / n as f64,
                p_x,
                p_z,
                p: p_of_t[t_star as usize],
                certified_qubits: report.certified_qubits,
            })
        })
        .collect()
}
