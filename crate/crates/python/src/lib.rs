//! Python bindings for the dimension-test library: entropy kernels, the
//! certified-dimension bounds, the noise pipeline, Monte-Carlo simulation,
//! and the numerical verification suites.

use num_bigint::BigUint;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qdimtest::bounds::{self, BasisFamily, ProtocolParams};
use qdimtest::density::{BipartiteState, DensityMatrix};
use qdimtest::entropy;
use qdimtest::linalg::CMatrix;
use qdimtest::noise::{self, NoiseParams, PipelineOptions, RoundBasis};
use qdimtest::oracle;
use qdimtest::sim::{self, Strategy};

fn err<T>(r: qdimtest::Result<T>) -> PyResult<T> {
    r.map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_family(family: &str, d: u32) -> PyResult<BasisFamily> {
    Ok(match family {
        "xz" => BasisFamily::Xz,
        "xyz" => BasisFamily::Xyz,
        "bb84" => BasisFamily::Bb84,
        "six-state" => BasisFamily::SixState,
        "mub" => BasisFamily::Mub(d),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown family {other:?}; expected xz | xyz | bb84 | six-state | mub"
            )))
        }
    })
}

fn parse_basis(basis: &str) -> PyResult<RoundBasis> {
    match basis {
        "Z" | "z" => Ok(RoundBasis::Z),
        "X" | "x" => Ok(RoundBasis::X),
        other => Err(PyValueError::new_err(format!(
            "unknown basis {other:?}; expected Z or X"
        ))),
    }
}

fn noise_from(rates: (f64, f64, f64, f64)) -> PyResult<NoiseParams> {
    err(NoiseParams::new(rates.0, rates.1, rates.2, rates.3))
}

fn options(depolarize_identity: bool, per_gate_depolarizing: bool) -> PipelineOptions {
    PipelineOptions {
        depolarize_identity,
        per_gate_depolarizing,
    }
}

/// A certified-dimension bound evaluation.
#[pyclass(name = "BoundReport", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBoundReport {
    variant: String,
    n: u64,
    t: u64,
    p: f64,
    log2_dim_lower: f64,
    certified_qubits: f64,
    vacuous: bool,
    asymptotic: bool,
    outside_regime: bool,
}

impl From<bounds::BoundReport> for PyBoundReport {
    fn from(r: bounds::BoundReport) -> Self {
        PyBoundReport {
            variant: r.variant.name().to_string(),
            n: r.n,
            t: r.t,
            p: r.p,
            log2_dim_lower: r.log2_dim_lower,
            certified_qubits: r.certified_qubits,
            vacuous: r.vacuous,
            asymptotic: r.asymptotic,
            outside_regime: r.outside_regime,
        }
    }
}

#[pymethods]
impl PyBoundReport {
    fn __repr__(&self) -> String {
        format!(
            "BoundReport(variant='{}', n={}, t={}, p={}, log2_dim_lower={}, certified_qubits={})",
            self.variant, self.n, self.t, self.p, self.log2_dim_lower, self.certified_qubits
        )
    }
}

/// One row of the certified-qubits sweep.
#[pyclass(name = "SweepRow", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySweepRow {
    n: u64,
    total: f64,
    t_star: u64,
    alpha_star: f64,
    p_x: f64,
    p_z: f64,
    p: f64,
    certified_qubits: f64,
}

/// Empirical pass statistics of a simulation run.
#[pyclass(name = "EmpiricalPass", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEmpiricalPass {
    trials: u64,
    passes: u64,
    trials_z: u64,
    passes_z: u64,
    trials_x: u64,
    passes_x: u64,
    p_hat: f64,
    delta: f64,
    p_lower: f64,
}

#[pymethods]
impl PyEmpiricalPass {
    fn __repr__(&self) -> String {
        format!(
            "EmpiricalPass(trials={}, passes={}, p_hat={}, p_lower={})",
            self.trials, self.passes, self.p_hat, self.p_lower
        )
    }
}

/// Binary entropy H(x) in bits, H(0) = H(1) = 0.
#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    err(entropy::binary_entropy(x))
}

/// Exact Hamming-ball size M = sum_{i<=t} C(n,i) and its log2, as (int, float).
#[pyfunction]
fn binomial_tail(n: u64, t: u64) -> PyResult<(BigUint, f64)> {
    let tail = err(entropy::binomial_tail(n, t))?;
    Ok((tail.exact_count().clone(), tail.log2_count()))
}

/// log2(2^n - M) for the tail at threshold t.
#[pyfunction]
fn log2_complement(n: u64, t: u64) -> PyResult<f64> {
    let tail = err(entropy::binomial_tail(n, t))?;
    err(entropy::log2_complement(n, &tail))
}

/// Stirling bracket (lower, upper) around M at t = floor(alpha n).
#[pyfunction]
fn stirling_bracket(n: u64, alpha: f64) -> PyResult<(f64, f64)> {
    err(entropy::stirling_bracket(n, alpha))
}

/// P[Bin(n, e) <= t].
#[pyfunction]
fn binomial_cdf(n: u64, t: u64, e: f64) -> PyResult<f64> {
    err(entropy::binomial_cdf(n, t, e))
}

/// t = floor(alpha n) with representation-error tolerance.
#[pyfunction]
fn threshold_from_alpha(n: u64, alpha: f64) -> u64 {
    entropy::threshold_from_alpha(n, alpha)
}

/// Exact two-basis bound at mismatch threshold t and pass probability p.
#[pyfunction]
fn bound_exact(n: u64, t: u64, p: f64) -> PyResult<PyBoundReport> {
    let params = err(ProtocolParams::new(n, t, BasisFamily::Xz))?;
    Ok(err(bounds::bound_exact(&params, p))?.into())
}

/// Stirling form of the two-basis bound.
#[pyfunction]
fn bound_stirling(n: u64, t: u64, p: f64) -> PyResult<PyBoundReport> {
    let params = err(ProtocolParams::new(n, t, BasisFamily::Xz))?;
    Ok(err(bounds::bound_stirling(&params, p))?.into())
}

/// Multi-basis pairwise-family bound; family is "xyz", "bb84" or "six-state".
#[pyfunction]
fn bound_pairwise(n: u64, t: u64, p: f64, family: &str) -> PyResult<PyBoundReport> {
    let params = err(ProtocolParams::new(n, t, parse_family(family, 2)?))?;
    Ok(err(bounds::bound_pairwise(&params, p))?.into())
}

/// Extractor bound for a full MUB set on qudits of prime-power dimension d.
#[pyfunction]
fn bound_mub_extractor(n: u64, t: u64, p: f64, d: u32) -> PyResult<PyBoundReport> {
    let params = err(ProtocolParams::new(n, t, BasisFamily::Mub(d)))?;
    Ok(err(bounds::bound_mub_extractor(&params, p))?.into())
}

/// Asymptotic certified qubits per protocol qubit for a family.
#[pyfunction]
#[pyo3(signature = (family, d = 2))]
fn asymptotic_coefficient(family: &str, d: u32) -> PyResult<f64> {
    Ok(bounds::asymptotic_table(parse_family(family, d)?))
}

/// Splits a total noise rate over (p1, p2, p3, p4) in the base proportions.
#[pyfunction]
fn scale_noise(total: f64) -> PyResult<(f64, f64, f64, f64)> {
    let p = err(noise::scale_noise(total))?;
    Ok((p.p1, p.p2, p.p3, p.p4))
}

/// Marginal per-qubit error rate for basis "Z" or "X".
#[pyfunction]
#[pyo3(signature = (noise, basis, depolarize_identity = false, per_gate_depolarizing = false))]
fn per_qubit_error(
    noise: (f64, f64, f64, f64),
    basis: &str,
    depolarize_identity: bool,
    per_gate_depolarizing: bool,
) -> PyResult<f64> {
    err(noise::per_qubit_error(
        &noise_from(noise)?,
        parse_basis(basis)?,
        options(depolarize_identity, per_gate_depolarizing),
    ))
}

/// Analytic honest pass probabilities (p_z, p_x, p).
#[pyfunction]
#[pyo3(signature = (n, t, noise, depolarize_identity = false, per_gate_depolarizing = false))]
fn honest_pass_prob(
    n: u64,
    t: u64,
    noise: (f64, f64, f64, f64),
    depolarize_identity: bool,
    per_gate_depolarizing: bool,
) -> PyResult<(f64, f64, f64)> {
    let params = err(ProtocolParams::new(n, t, BasisFamily::Xz))?;
    let stats = err(noise::honest_pass_prob(
        &params,
        &noise_from(noise)?,
        options(depolarize_identity, per_gate_depolarizing),
    ))?;
    Ok((stats.p_z, stats.p_x, stats.p))
}

/// Certified qubits optimized over the threshold, for each n and total.
#[pyfunction]
#[pyo3(signature = (n_min, n_max, totals, depolarize_identity = false, per_gate_depolarizing = false))]
fn certified_sweep(
    n_min: u64,
    n_max: u64,
    totals: Vec<f64>,
    depolarize_identity: bool,
    per_gate_depolarizing: bool,
) -> PyResult<Vec<PySweepRow>> {
    let rows = err(noise::certified_sweep(
        n_min,
        n_max,
        &totals,
        options(depolarize_identity, per_gate_depolarizing),
    ))?;
    Ok(rows
        .into_iter()
        .map(|r| PySweepRow {
            n: r.n,
            total: r.total,
            t_star: r.t_star,
            alpha_star: r.alpha_star,
            p_x: r.p_x,
            p_z: r.p_z,
            p: r.p,
            certified_qubits: r.certified_qubits,
        })
        .collect())
}

/// Seeded Monte-Carlo protocol run. Strategy is "honest", "store-k"
/// (requires k), "classical-guess", or "fixed" (requires answer, a bit string
/// with qubit 0 first).
#[pyfunction]
#[pyo3(signature = (n, t, trials, seed, noise = (0.0, 0.0, 0.0, 0.0), strategy = "honest",
                    k = None, answer = None, delta = 0.05,
                    depolarize_identity = false, per_gate_depolarizing = false))]
#[allow(clippy::too_many_arguments)]
fn run_trials(
    n: u64,
    t: u64,
    trials: u64,
    seed: u64,
    noise: (f64, f64, f64, f64),
    strategy: &str,
    k: Option<u64>,
    answer: Option<&str>,
    delta: f64,
    depolarize_identity: bool,
    per_gate_depolarizing: bool,
) -> PyResult<PyEmpiricalPass> {
    let params = err(ProtocolParams::new(n, t, BasisFamily::Xz))?;
    let strategy = match strategy {
        "honest" => Strategy::HonestMatched,
        "store-k" => {
            Strategy::StoreK(k.ok_or_else(|| PyValueError::new_err("store-k requires k"))?)
        }
        "classical-guess" => Strategy::ClassicalGuess,
        "fixed" => {
            let bits = answer.ok_or_else(|| PyValueError::new_err("fixed requires answer"))?;
            if bits.len() as u64 > n || bits.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(PyValueError::new_err(format!("bad answer {bits:?}")));
            }
            Strategy::FixedAnswer(
                bits.bytes()
                    .enumerate()
                    .fold(0u128, |acc, (i, b)| acc | (u128::from(b - b'0') << i)),
            )
        }
        other => return Err(PyValueError::new_err(format!("unknown strategy {other:?}"))),
    };
    let stats = err(sim::run_trials(
        &params,
        &noise_from(noise)?,
        &strategy,
        trials,
        seed,
        delta,
        options(depolarize_identity, per_gate_depolarizing),
    ))?;
    Ok(PyEmpiricalPass {
        trials: stats.trials,
        passes: stats.passes,
        trials_z: stats.trials_z,
        passes_z: stats.passes_z,
        trials_x: stats.trials_x,
        passes_x: stats.passes_x,
        p_hat: stats.p_hat,
        delta: stats.delta,
        p_lower: stats.p_lower,
    })
}

/// Exact pass probability of the store-k adversary.
#[pyfunction]
fn strategy_store_k(n: u64, k: u64, t: u64) -> PyResult<f64> {
    err(sim::strategy_store_k(n, k, t))
}

/// One-sided Clopper-Pearson lower confidence bound on p.
#[pyfunction]
fn confidence_lower(passes: u64, trials: u64, delta: f64) -> PyResult<f64> {
    err(sim::confidence_lower(passes, trials, delta))
}

/// One-sided Hoeffding lower confidence bound on p.
#[pyfunction]
fn confidence_lower_hoeffding(passes: u64, trials: u64, delta: f64) -> PyResult<f64> {
    err(sim::confidence_lower_hoeffding(passes, trials, delta))
}

/// von Neumann entropy of a density matrix given as a nested list of complex
/// entries, in bits.
#[pyfunction]
fn von_neumann_entropy(matrix: Vec<Vec<Complex64>>) -> PyResult<f64> {
    err(qdimtest::density::von_neumann_entropy(&density_from(
        matrix,
    )?))
}

/// Conditional entropy H(A|B) of a bipartite state on dim_a x dim_b, A-major
/// index ordering.
#[pyfunction]
fn conditional_entropy(dim_a: usize, dim_b: usize, matrix: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let state = err(BipartiteState::new(dim_a, dim_b, density_from(matrix)?))?;
    err(qdimtest::density::conditional_entropy(&state))
}

fn density_from(matrix: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    let dim = matrix.len();
    if matrix.iter().any(|row| row.len() != dim) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    err(DensityMatrix::new(CMatrix::from_fn(dim, dim, |i, j| {
        matrix[i][j]
    })))
}

/// Runs a verification suite ("all", "uncertainty", "logdim",
/// "data-processing", "fano", "averaged"); returns (checks, violations). An
/// optional n restricts instances to that Alice size.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0, count = 100, n = None))]
fn verify_suite(suite: &str, seed: u64, count: u64, n: Option<u64>) -> PyResult<(u64, u64)> {
    let report = err(match suite {
        "all" => oracle::run_all_suites(seed, count, n),
        "uncertainty" => oracle::run_uncertainty_suite(seed, count, n),
        "logdim" => oracle::run_logdim_suite(seed, count, n),
        "data-processing" => oracle::run_data_processing_suite(seed, count, n),
        "fano" => oracle::run_fano_suite(seed, count, n),
        "averaged" => oracle::run_averaged_suite(seed, count, n),
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    })?;
    Ok((report.checks, report.violations.len() as u64))
}

#[pymodule]
fn qdimtest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBoundReport>()?;
    m.add_class::<PySweepRow>()?;
    m.add_class::<PyEmpiricalPass>()?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_tail, m)?)?;
    m.add_function(wrap_pyfunction!(log2_complement, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_from_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(bound_exact, m)?)?;
    m.add_function(wrap_pyfunction!(bound_stirling, m)?)?;
    m.add_function(wrap_pyfunction!(bound_pairwise, m)?)?;
    m.add_function(wrap_pyfunction!(bound_mub_extractor, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(scale_noise, m)?)?;
    m.add_function(wrap_pyfunction!(per_qubit_error, m)?)?;
    m.add_function(wrap_pyfunction!(honest_pass_prob, m)?)?;
    m.add_function(wrap_pyfunction!(certified_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_function(wrap_pyfunction!(strategy_store_k, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_lower, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_lower_hoeffding, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
