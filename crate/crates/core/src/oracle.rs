//! Brute-force numerical verification of the entropy inequalities behind the
//! dimension bounds, on instances small enough for dense spectral arithmetic
//! (Alice up to 3 qubits, Bob's register up to dimension 8).
//!
//! Instances are states (I ⊗ C_B) applied to n EPR pairs, where C_B is a
//! random channel with classical-quantum output: a Gaussian-orthonormalized
//! isometry into B ⊗ environment, the environment traced out, and the
//! classical factor pinched. All sampling is seed-deterministic.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{avg_entropy_rhs, BasisFamily};
use crate::density::{
    apply_kraus_on_b, complementarity, conditional_entropy, epr_pairs, measure_a, BipartiteState,
    MeasurementBasis, PauliAxis,
};
use crate::entropy::{binary_entropy, binomial_tail, log2_complement};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::noise::RoundBasis;
use crate::sim::TrialRecord;

/// Slack allowed on every inequality; sits above the ~1e-10 noise floor of
/// the Jacobi solver.
pub const CHECK_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Both sides of a checked inequality. The direction (which side must
/// dominate) is fixed by the check that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// A sampled test state: (I ⊗ C_B) on n EPR pairs, with Bob's output split
/// into a classical factor of dimension dim_c and a quantum factor of
/// dimension dim_q.
#[derive(Debug, Clone)]
pub struct SmallInstance {
    n: u64,
    dim_c: usize,
    dim_q: usize,
    joint: BipartiteState,
    seed: u64,
}

impl SmallInstance {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn dim_q(&self) -> usize {
        self.dim_q
    }

    pub fn state(&self) -> &BipartiteState {
        &self.joint
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Wraps an explicitly built state (identity channel, product states, ...).
    pub fn from_state(n: u64, dim_c: usize, dim_q: usize, joint: BipartiteState) -> Result<Self> {
        check_instance_dims(n, dim_c, dim_q)?;
        if joint.dim_a() != 1 << n || joint.dim_b() != dim_c * dim_q {
            return Err(Error::DimensionMismatch {
                expected: (1 << n) * dim_c * dim_q,
                actual: joint.dim_a() * joint.dim_b(),
            });
        }
        Ok(Self {
            n,
            dim_c,
            dim_q,
            joint,
            seed: 0,
        })
    }

    /// n EPR pairs with an untouched B side (dim_c = 1, dim_q = 2^n).
    pub fn untouched_epr(n: u64) -> Result<Self> {
        check_instance_dims(n, 1, 1 << n)?;
        Ok(Self {
            n,
            dim_c: 1,
            dim_q: 1 << n,
            joint: epr_pairs(n as usize),
            seed: 0,
        })
    }

    /// Seed-deterministic random instance.
    pub fn sample(n: u64, dim_c: usize, dim_q: usize, seed: u64) -> Result<Self> {
        check_instance_dims(n, dim_c, dim_q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kraus = sample_cq_channel(1 << n, dim_c, dim_q, &mut rng);
        let joint = apply_kraus_on_b(&epr_pairs(n as usize), &kraus, dim_c * dim_q)?;
        Ok(Self {
            n,
            dim_c,
            dim_q,
            joint,
            seed,
        })
    }
}

fn check_instance_dims(n: u64, dim_c: usize, dim_q: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "instance n must be in [1, 3], got {n}"
        )));
    }
    if dim_c == 0 || dim_q == 0 || dim_c * dim_q > 8 {
        return Err(Error::InvalidParameter(format!(
            "Bob dimension {} exceeds 8",
            dim_c * dim_q
        )));
    }
    Ok(())
}

/// Gaussian matrix with orthonormalized columns (rows >= cols).
fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    assert!(rows >= cols);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<Complex64> = (0..rows)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // Modified Gram-Schmidt against the accepted columns.
        for u in &columns {
            let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ip * ui;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // essentially-dependent draw, resample
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        columns.push(v);
    }
    CMatrix::from_fn(rows, cols, |i, j| columns[j][i])
}

/// Kraus operators of a random classical-quantum channel
/// C^dim_in -> C^dim_c ⊗ C^dim_q: random isometry into (C ⊗ Q) ⊗ E with
/// dim_e = dim_in, environment traced out, classical factor pinched.
pub fn sample_cq_channel(
    dim_in: usize,
    dim_c: usize,
    dim_q: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CMatrix> {
    let dim_b = dim_c * dim_q;
    let dim_e = dim_in;
    let v = random_isometry(dim_b * dim_e, dim_in, rng);
    let mut kraus = Vec::with_capacity(dim_e * dim_c);
    for e in 0..dim_e {
        for cl in 0..dim_c {
            // Rows of V live on (b, e) = b * dim_e + e; keep environment slot
            // e and the classical block cl.
            let k = CMatrix::from_fn(dim_b, dim_in, |b, a| {
                if b / dim_q == cl {
                    v[(b * dim_e + e, a)]
                } else {
                    c(0.0, 0.0)
                }
            });
            kraus.push(k);
        }
    }
    kraus
}

/// Random POVM with `outcomes` elements on dimension `dim`: Gaussian Wishart
/// atoms G_i normalized by the inverse square root of their sum.
pub fn sample_povm(dim: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Result<Vec<CMatrix>> {
    let atoms: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let a = CMatrix::from_fn(dim, dim, |_, _| {
                c(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            a.mul(&a.adjoint())
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for g in &atoms {
        total = total.add(g);
    }
    let (w, vec) = eigh(&total)?;
    let mut inv_root = CMatrix::zeros(dim, dim);
    for (k, &lambda) in w.iter().enumerate() {
        if lambda <= 1e-12 {
            return Err(Error::InvalidParameter("degenerate POVM normalizer".into()));
        }
        let col = vec.column(k);
        let scale = 1.0 / lambda.sqrt();
        for i in 0..dim {
            for j in 0..dim {
                inv_root[(i, j)] += scale * col[i] * col[j].conj();
            }
        }
    }
    Ok(atoms
        .iter()
        .map(|g| inv_root.mul(g).mul(&inv_root))
        .collect())
}

/// POVM that measures each element of the given basis.
pub fn basis_povm(basis: &MeasurementBasis) -> Vec<CMatrix> {
    basis
        .vectors()
        .iter()
        .map(|v| CMatrix::outer(v, v))
        .collect()
}

/// Uncertainty relation with quantum memory:
/// H(A|B)_{b1(rho)} + H(A|B)_{b2(rho)} - log2(1/c) >= H(A|B)_rho.
pub fn check_uncertainty(
    state: &BipartiteState,
    b1: &MeasurementBasis,
    b2: &MeasurementBasis,
) -> Result<CheckOutcome> {
    let comp = complementarity(b1, b2)?;
    let h1 = conditional_entropy(&measure_a(state, b1)?)?;
    let h2 = conditional_entropy(&measure_a(state, b2)?)?;
    let lhs = h1 + h2 - (1.0 / comp).log2();
    let rhs = conditional_entropy(state)?;
    Ok(CheckOutcome {
        lhs,
        rhs,
        holds: lhs >= rhs - CHECK_TOL,
    })
}

/// Dimension witness: -H(A|B) <= log2 dim H_Q for classical-quantum B.
pub fn check_logdim_witness(inst: &SmallInstance) -> Result<CheckOutcome> {
    let lhs = -conditional_entropy(inst.state())?;
    let rhs = (inst.dim_q() as f64).log2();
    Ok(CheckOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOL,
    })
}

/// Data processing: measuring B to produce the guess cannot reduce Bob's
/// uncertainty, H(S|B, theta) <= H(S|S', theta). The POVM must have 2^n
/// outcomes, one per candidate string.
pub fn check_data_processing(
    inst: &SmallInstance,
    povm: &[CMatrix],
    theta: RoundBasis,
) -> Result<CheckOutcome> {
    let n = inst.n() as usize;
    let size = 1usize << n;
    if povm.len() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            actual: povm.len(),
        });
    }
    let axis = match theta {
        RoundBasis::Z => PauliAxis::Z,
        RoundBasis::X => PauliAxis::X,
    };
    let basis = MeasurementBasis::pauli_product(&vec![axis; n]);
    let lhs = conditional_entropy(&measure_a(inst.state(), &basis)?)?;

    // Joint distribution P(s, s') = Tr[(|s><s|_theta ⊗ E_{s'}) rho].
    let dim_b = inst.state().dim_b();
    let rho = inst.state().state().mat();
    let mut joint = vec![vec![0.0f64; size]; size];
    for (s, v) in basis.vectors().iter().enumerate() {
        // Conditional block on B for Alice outcome s.
        let mut block = CMatrix::zeros(dim_b, dim_b);
        for a1 in 0..size {
            for a2 in 0..size {
                let w = v[a1].conj() * v[a2];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for b1 in 0..dim_b {
                    for b2 in 0..dim_b {
                        block[(b1, b2)] += w * rho[(a1 * dim_b + b1, a2 * dim_b + b2)];
                    }
                }
            }
        }
        for (sp, e) in povm.iter().enumerate() {
            joint[s][sp] = block.mul(e).trace().re.max(0.0);
        }
    }
    let rhs = classical_conditional_entropy(&joint);
    Ok(CheckOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOL,
    })
}

/// H(S|S') of a joint probability table indexed [s][s'].
#[allow(clippy::needless_range_loop)] // indices are n-bit strings
fn classical_conditional_entropy(joint: &[Vec<f64>]) -> f64 {
    let size = joint.len();
    let mut h = 0.0;
    for sp in 0..size {
        let mass: f64 = (0..size).map(|s| joint[s][sp]).sum();
        if mass <= 0.0 {
            continue;
        }
        for s in 0..size {
            let p = joint[s][sp];
            if p > 0.0 {
                h -= p * (p / mass).log2();
            }
        }
    }
    h
}

/// Finite joint distribution of (S, S', Theta) for the Fano check, dense over
/// both strings and the two bases.
#[derive(Debug, Clone)]
pub struct JointDist {
    n: u64,
    /// probs[theta][s][s'], theta 0 = Z, 1 = X.
    probs: Vec<Vec<Vec<f64>>>,
}

impl JointDist {
    fn empty(n: u64) -> Self {
        let size = 1usize << n;
        Self {
            n,
            probs: vec![vec![vec![0.0; size]; size]; 2],
        }
    }

    /// S uniform, S' uniform and independent, Theta uniform.
    pub fn uniform_independent(n: u64) -> Self {
        let mut d = Self::empty(n);
        let size = 1usize << n;
        let p = 0.5 / (size * size) as f64;
        for theta in 0..2 {
            for s in 0..size {
                for sp in 0..size {
                    d.probs[theta][s][sp] = p;
                }
            }
        }
        d
    }

    /// S uniform, S' = S always.
    pub fn perfectly_correlated(n: u64) -> Self {
        let mut d = Self::empty(n);
        let size = 1usize << n;
        let p = 0.5 / size as f64;
        for theta in 0..2 {
            for s in 0..size {
                d.probs[theta][s][s] = p;
            }
        }
        d
    }

    /// Empirical distribution of a simulation log.
    pub fn from_records(n: u64, records: &[TrialRecord]) -> Result<Self> {
        if n > 16 {
            return Err(Error::InvalidParameter(
                "dense joint distribution limited to n <= 16".into(),
            ));
        }
        let mut d = Self::empty(n);
        let size = 1usize << n;
        let w = 1.0 / records.len() as f64;
        for r in records {
            let theta = match r.theta {
                RoundBasis::Z => 0,
                RoundBasis::X => 1,
            };
            let s = (r.s as usize) & (size - 1);
            let sp = (r.s_prime as usize) & (size - 1);
            d.probs[theta][s][sp] += w;
        }
        Ok(d)
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// Fano decomposition: H(S|S', Theta) <= H(p) + p log2 M + (1-p) log2(2^n - M),
/// with the conditional entropy and pass rate read off the distribution and
/// both averaged over the two bases.
#[allow(clippy::needless_range_loop)] // indices are n-bit strings
pub fn check_fano_decomposition(dist: &JointDist, t: u64) -> Result<CheckOutcome> {
    let n = dist.n;
    if t > n {
        return Err(Error::ThresholdOutOfRange { n, t });
    }
    let size = 1usize << n;
    let mut h_per_theta = [0.0f64; 2];
    let mut p_per_theta = [1.0f64; 2];
    for theta in 0..2 {
        let table = &dist.probs[theta];
        let mass: f64 = table.iter().flatten().sum();
        if mass <= 0.0 {
            continue; // absent basis: vacuous contribution
        }
        let mut h = 0.0;
        for sp in 0..size {
            let col: f64 = (0..size).map(|s| table[s][sp]).sum();
            if col <= 0.0 {
                continue;
            }
            for s in 0..size {
                let p = table[s][sp];
                if p > 0.0 {
                    h -= (p / mass) * (p / col).log2();
                }
            }
        }
        h_per_theta[theta] = h;
        let mut pass = 0.0;
        for s in 0..size {
            for sp in 0..size {
                if (s ^ sp).count_ones() as u64 <= t {
                    pass += table[s][sp];
                }
            }
        }
        p_per_theta[theta] = pass / mass;
    }
    let lhs = 0.5 * (h_per_theta[0] + h_per_theta[1]);
    let p = (0.5 * (p_per_theta[0] + p_per_theta[1])).clamp(0.0, 1.0);
    let tail = binomial_tail(n, t)?;
    let term_match = if p == 0.0 { 0.0 } else { p * tail.log2_count() };
    let rhs = if tail.is_full() && p < 1.0 {
        f64::INFINITY
    } else {
        let term_miss = if p >= 1.0 {
            0.0
        } else {
            (1.0 - p) * log2_complement(n, &tail)?
        };
        binary_entropy(p)? + term_match + term_miss
    };
    Ok(CheckOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + CHECK_TOL,
    })
}

/// All bases of a family on n qubits.
pub fn family_bases(family: BasisFamily, n: u64) -> Result<Vec<MeasurementBasis>> {
    let n = n as usize;
    let transversal = |axis: PauliAxis| MeasurementBasis::pauli_product(&vec![axis; n]);
    let product_set = |axes: &[PauliAxis]| -> Vec<MeasurementBasis> {
        let mut out = Vec::new();
        let mut stack = vec![Vec::<PauliAxis>::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == n {
                out.push(MeasurementBasis::pauli_product(&prefix));
                continue;
            }
            for &a in axes.iter().rev() {
                let mut next = prefix.clone();
                next.push(a);
                stack.push(next);
            }
        }
        out
    };
    Ok(match family {
        BasisFamily::Xz => vec![transversal(PauliAxis::Z), transversal(PauliAxis::X)],
        BasisFamily::Xyz => vec![
            transversal(PauliAxis::X),
            transversal(PauliAxis::Y),
            transversal(PauliAxis::Z),
        ],
        BasisFamily::Bb84 => product_set(&[PauliAxis::X, PauliAxis::Z]),
        BasisFamily::SixState | BasisFamily::Mub(2) => {
            product_set(&[PauliAxis::X, PauliAxis::Y, PauliAxis::Z])
        }
        BasisFamily::Mub(d) => {
            return Err(Error::InvalidParameter(format!(
                "averaged-relation check supports MUB only at d = 2, got d = {d}"
            )))
        }
    })
}

/// Averaged uncertainty relation of a family: the mean of H(A|B) over all
/// family bases must dominate [`avg_entropy_rhs`].
pub fn check_averaged_relations(inst: &SmallInstance, family: BasisFamily) -> Result<CheckOutcome> {
    let bases = family_bases(family, inst.n())?;
    let mut sum = 0.0;
    for basis in &bases {
        sum += conditional_entropy(&measure_a(inst.state(), basis)?)?;
    }
    let lhs = sum / bases.len() as f64;
    let h_ab = conditional_entropy(inst.state())?;
    let rhs = avg_entropy_rhs(family, inst.n(), h_ab);
    Ok(CheckOutcome {
        lhs,
        rhs,
        holds: lhs >= rhs - CHECK_TOL,
    })
}

/// One violating instance, dumped with enough detail to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub suite: String,
    pub seed: u64,
    pub index: u64,
    pub detail: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Joint density matrix as nested [re, im] arrays, when an instance state
    /// is involved.
    pub joint_matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn dump_matrix(state: &BipartiteState) -> Vec<Vec<[f64; 2]>> {
    let m = state.state().mat();
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Outcome of a suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: u64,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self
    }
}

fn instance_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    // (dim_c, dim_q) with dim_c * dim_q <= 8; includes trivial classical and
    // trivial quantum parts and a non-power-of-two quantum side.
    const CHOICES: [(usize, usize); 7] = [(1, 2), (1, 4), (1, 8), (2, 2), (2, 4), (2, 3), (4, 1)];
    CHOICES[rng.gen_range(0..CHOICES.len())]
}

fn sub_seed(seed: u64, suite: u64, index: u64) -> u64 {
    // SplitMix64 over a combined counter; distinct per (suite, index).
    let mut z = seed
        .wrapping_add(suite.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uncertainty relation on `count` random instances per n in {1, 2} (or the
/// single filtered n), plus the EPR equality case.
pub fn run_uncertainty_suite(seed: u64, count: u64, n_filter: Option<u64>) -> Result<SuiteReport> {
    let ns = filtered_ns(&[1, 2], n_filter)?;
    let mut report = SuiteReport {
        suite: "uncertainty".into(),
        checks: 0,
        violations: Vec::new(),
    };
    // Equality at maximal entanglement: lhs = rhs = -n for untouched EPR.
    for &n in &ns {
        let inst = SmallInstance::untouched_epr(n)?;
        let x = MeasurementBasis::pauli_product(&vec![PauliAxis::X; n as usize]);
        let z = MeasurementBasis::pauli_product(&vec![PauliAxis::Z; n as usize]);
        let out = check_uncertainty(inst.state(), &x, &z)?;
        report.checks += 1;
        if !out.holds || (out.lhs - out.rhs).abs() > 1e-8 {
            report.violations.push(Violation {
                suite: report.suite.clone(),
                seed,
                index: n,
                detail: format!("EPR equality case violated at n = {n}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            });
        }
    }
    let cases: Vec<(u64, u64)> = ns
        .iter()
        .flat_map(|&n| (0..count).map(move |i| (n, i)))
        .collect();
    let results: Vec<Result<Option<Violation>>> = cases
        .par_iter()
        .map(|&(n, i)| {
            let s = sub_seed(seed, 1, n * count + i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let (dim_c, dim_q) = instance_dims(&mut rng);
            let inst = SmallInstance::sample(n, dim_c, dim_q, s)?;
            let x = MeasurementBasis::pauli_product(&vec![PauliAxis::X; n as usize]);
            let z = MeasurementBasis::pauli_product(&vec![PauliAxis::Z; n as usize]);
            let out = check_uncertainty(inst.state(), &x, &z)?;
            Ok((!out.holds).then(|| Violation {
                suite: "uncertainty".into(),
                seed: s,
                index: i,
                detail: format!("n={n} dim_c={dim_c} dim_q={dim_q}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            }))
        })
        .collect();
    for r in results {
        report.checks += 1;
        if let Some(v) = r? {
            report.violations.push(v);
        }
    }
    Ok(report)
}

/// Dimension witness on anchors (identity channel, full measurement) and
/// `count` random classical-quantum instances with n in {1, 2, 3} (or the
/// single filtered n).
pub fn run_logdim_suite(seed: u64, count: u64, n_filter: Option<u64>) -> Result<SuiteReport> {
    let ns = filtered_ns(&[1, 2, 3], n_filter)?;
    let mut report = SuiteReport {
        suite: "logdim".into(),
        checks: 0,
        violations: Vec::new(),
    };
    for &n in &ns {
        let inst = SmallInstance::untouched_epr(n)?;
        let out = check_logdim_witness(&inst)?;
        report.checks += 1;
        // Identity channel achieves equality: -H(A|B) = n = log2 dim_q.
        if !out.holds || (out.lhs - out.rhs).abs() > 1e-8 {
            report.violations.push(Violation {
                suite: report.suite.clone(),
                seed,
                index: n,
                detail: format!("identity-channel equality violated at n = {n}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            });
        }
        // Full Z measurement of B: purely classical output, dim_q = 1.
        let size = 1usize << n;
        let kraus: Vec<CMatrix> = (0..size)
            .map(|s| {
                CMatrix::from_fn(size, size, |i, j| {
                    if i == s && j == s {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
            })
            .collect();
        let measured = apply_kraus_on_b(&epr_pairs(n as usize), &kraus, size)?;
        let inst = SmallInstance::from_state(n, size, 1, measured)?;
        let out = check_logdim_witness(&inst)?;
        report.checks += 1;
        if !out.holds {
            report.violations.push(Violation {
                suite: report.suite.clone(),
                seed,
                index: n,
                detail: format!("fully measured B at n = {n}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            });
        }
    }
    let cases: Vec<u64> = (0..count).collect();
    let results: Vec<Result<Option<Violation>>> = cases
        .par_iter()
        .map(|&i| {
            let s = sub_seed(seed, 2, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = ns[rng.gen_range(0..ns.len())];
            let (dim_c, dim_q) = instance_dims(&mut rng);
            let inst = SmallInstance::sample(n, dim_c, dim_q, s)?;
            let out = check_logdim_witness(&inst)?;
            Ok((!out.holds).then(|| Violation {
                suite: "logdim".into(),
                seed: s,
                index: i,
                detail: format!("n={n} dim_c={dim_c} dim_q={dim_q}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            }))
        })
        .collect();
    for r in results {
        report.checks += 1;
        if let Some(v) = r? {
            report.violations.push(v);
        }
    }
    Ok(report)
}

/// Data processing against `count` random POVMs, both bases each, n in {1, 2}
/// (or the single filtered n).
pub fn run_data_processing_suite(
    seed: u64,
    count: u64,
    n_filter: Option<u64>,
) -> Result<SuiteReport> {
    let ns = filtered_ns(&[1, 2], n_filter)?;
    let cases: Vec<u64> = (0..count).collect();
    let results: Vec<Result<(u64, Vec<Violation>)>> = cases
        .par_iter()
        .map(|&i| {
            let s = sub_seed(seed, 3, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = ns[rng.gen_range(0..ns.len())];
            let (dim_c, dim_q) = instance_dims(&mut rng);
            let inst = SmallInstance::sample(n, dim_c, dim_q, s)?;
            let povm = sample_povm(dim_c * dim_q, 1 << n, &mut rng)?;
            let mut violations = Vec::new();
            let mut checks = 0;
            for theta in [RoundBasis::Z, RoundBasis::X] {
                let out = check_data_processing(&inst, &povm, theta)?;
                checks += 1;
                if !out.holds {
                    violations.push(Violation {
                        suite: "data-processing".into(),
                        seed: s,
                        index: i,
                        detail: format!("n={n} dim_c={dim_c} dim_q={dim_q} theta={}", theta.name()),
                        lhs: out.lhs,
                        rhs: out.rhs,
                        joint_matrix: Some(dump_matrix(inst.state())),
                    });
                }
            }
            Ok((checks, violations))
        })
        .collect();
    let mut report = SuiteReport {
        suite: "data-processing".into(),
        checks: 0,
        violations: Vec::new(),
    };
    for r in results {
        let (checks, violations) = r?;
        report.checks += checks;
        report.violations.extend(violations);
    }
    Ok(report)
}

/// Fano decomposition: the two exact enumeration anchors plus `count` random
/// simulated strategy distributions with n <= 6 (or the single filtered n).
pub fn run_fano_suite(seed: u64, count: u64, n_filter: Option<u64>) -> Result<SuiteReport> {
    use crate::bounds::ProtocolParams;
    use crate::noise::{scale_noise, PipelineOptions};
    use crate::sim::{run_trials_logged, Strategy};

    let mut report = SuiteReport {
        suite: "fano".into(),
        checks: 0,
        violations: Vec::new(),
    };
    let push_if_violated = |out: CheckOutcome, equality: bool, detail: String, seed, index| {
        let bad = !out.holds || (equality && (out.lhs - out.rhs).abs() > 1e-8);
        if bad {
            Some(Violation {
                suite: "fano".into(),
                seed,
                index,
                detail,
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: None,
            })
        } else {
            None
        }
    };
    // Exact enumeration anchors, both with equality.
    if n_filter.is_none() || n_filter == Some(4) {
        let out = check_fano_decomposition(&JointDist::perfectly_correlated(4), 0)?;
        report.checks += 1;
        if let Some(v) = push_if_violated(out, true, "S' = S, t = 0".into(), seed, 0) {
            report.violations.push(v);
        }
        let out = check_fano_decomposition(&JointDist::uniform_independent(4), 1)?;
        report.checks += 1;
        if let Some(v) = push_if_violated(out, true, "independent uniform, n=4 t=1".into(), seed, 1)
        {
            report.violations.push(v);
        }
    }

    let cases: Vec<u64> = (0..count).collect();
    let results: Vec<Result<Option<Violation>>> = cases
        .par_iter()
        .map(|&i| {
            let s = sub_seed(seed, 4, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = match n_filter {
                Some(n) if (1..=6).contains(&n) => n,
                Some(n) => {
                    return Err(Error::InvalidParameter(format!(
                        "fano suite supports n in [1, 6], got {n}"
                    )))
                }
                None => rng.gen_range(2..=6u64),
            };
            let t = rng.gen_range(0..n.div_ceil(2));
            let params = ProtocolParams::new(n, t, BasisFamily::Xz)?;
            let strategy = match rng.gen_range(0..3) {
                0 => Strategy::HonestMatched,
                1 => Strategy::StoreK(rng.gen_range(0..=n)),
                _ => Strategy::FixedAnswer(rng.gen::<u128>()),
            };
            let noise = scale_noise(rng.gen::<f64>() * 0.2)?;
            let (_, records) = run_trials_logged(
                &params,
                &noise,
                &strategy,
                4000,
                s,
                0.05,
                PipelineOptions::default(),
            )?;
            let dist = JointDist::from_records(n, &records)?;
            let out = check_fano_decomposition(&dist, t)?;
            Ok((!out.holds).then(|| Violation {
                suite: "fano".into(),
                seed: s,
                index: i,
                detail: format!("simulated n={n} t={t} strategy={strategy:?}"),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: None,
            }))
        })
        .collect();
    for r in results {
        report.checks += 1;
        if let Some(v) = r? {
            report.violations.push(v);
        }
    }
    Ok(report)
}

/// Averaged relations for XYZ, BB84 and six-state at n <= 2 and the MUB
/// extractor at d = 2, n = 1, `count` random instances each, plus the EPR
/// equality anchor for XYZ. An n filter restricts every family to that n
/// (and lifts the MUB check to it, up to n = 2).
pub fn run_averaged_suite(seed: u64, count: u64, n_filter: Option<u64>) -> Result<SuiteReport> {
    if let Some(n) = n_filter {
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "averaged suite supports n in [1, 2], got {n}"
            )));
        }
    }
    let mut report = SuiteReport {
        suite: "averaged".into(),
        checks: 0,
        violations: Vec::new(),
    };
    // Bell-state anchor: all three transversal entropies vanish, and the RHS
    // is n/2 + H(A|B)/2 = 0.
    if n_filter.is_none() || n_filter == Some(1) {
        let inst = SmallInstance::untouched_epr(1)?;
        let out = check_averaged_relations(&inst, BasisFamily::Xyz)?;
        report.checks += 1;
        if !out.holds || (out.lhs - out.rhs).abs() > 1e-8 {
            report.violations.push(Violation {
                suite: report.suite.clone(),
                seed,
                index: 0,
                detail: "EPR equality case for XYZ".into(),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            });
        }
    }
    let families = [
        (BasisFamily::Xyz, 2u64),
        (BasisFamily::Bb84, 2),
        (BasisFamily::SixState, 2),
        (BasisFamily::Mub(2), 1),
    ];
    let cases: Vec<(BasisFamily, u64, u64)> = families
        .iter()
        .flat_map(|&(f, max_n)| (0..count).map(move |i| (f, max_n, i)))
        .collect();
    let results: Vec<Result<Option<Violation>>> = cases
        .par_iter()
        .enumerate()
        .map(|(case, &(family, max_n, i))| {
            let s = sub_seed(seed, 5, case as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = match n_filter {
                Some(n) => n,
                None => rng.gen_range(1..=max_n),
            };
            let (dim_c, dim_q) = instance_dims(&mut rng);
            let inst = SmallInstance::sample(n, dim_c, dim_q, s)?;
            let out = check_averaged_relations(&inst, family)?;
            Ok((!out.holds).then(|| Violation {
                suite: "averaged".into(),
                seed: s,
                index: i,
                detail: format!("family={} n={n} dim_c={dim_c} dim_q={dim_q}", family.name()),
                lhs: out.lhs,
                rhs: out.rhs,
                joint_matrix: Some(dump_matrix(inst.state())),
            }))
        })
        .collect();
    for r in results {
        report.checks += 1;
        if let Some(v) = r? {
            report.violations.push(v);
        }
    }
    Ok(report)
}

/// Runs every suite and merges the reports. The n filter applies only where
/// a suite supports that instance size.
pub fn run_all_suites(seed: u64, count: u64, n_filter: Option<u64>) -> Result<SuiteReport> {
    let fits = |lo: u64, hi: u64| n_filter.filter(|n| (lo..=hi).contains(n));
    let report = SuiteReport {
        suite: "all".into(),
        checks: 0,
        violations: Vec::new(),
    };
    Ok(report
        .merge(run_uncertainty_suite(seed, count, fits(1, 2))?)
        .merge(run_logdim_suite(seed, count, fits(1, 3))?)
        .merge(run_data_processing_suite(seed, count.min(200), fits(1, 2))?)
        .merge(run_fano_suite(seed, count.min(100), fits(1, 6))?)
        .merge(run_averaged_suite(seed, count.min(100), fits(1, 2))?))
}

/// Valid instance sizes after applying an optional filter.
fn filtered_ns(supported: &[u64], n_filter: Option<u64>) -> Result<Vec<u64>> {
    match n_filter {
        None => Ok(supported.to_vec()),
        Some(n) if supported.contains(&n) => Ok(vec![n]),
        Some(n) => Err(Error::InvalidParameter(format!(
            "suite supports n in {supported:?}, got {n}"
        ))),
    }
}

/// Negative-path self test: deliberately mis-states the complementarity of
/// the X/Z pair on an EPR instance (using c = 1/4^n instead of 1/2^n), which
/// must produce a reported violation.
pub fn self_test_violation(seed: u64) -> Result<SuiteReport> {
    let inst = SmallInstance::untouched_epr(1)?;
    let x = MeasurementBasis::pauli(PauliAxis::X);
    let z = MeasurementBasis::pauli(PauliAxis::Z);
    let good = check_uncertainty(inst.state(), &x, &z)?;
    // Corrupted evaluation: double the log 1/c penalty.
    let lhs = good.lhs - inst.n() as f64;
    let rhs = good.rhs;
    let holds = lhs >= rhs - CHECK_TOL;
    let mut report = SuiteReport {
        suite: "self-test".into(),
        checks: 1,
        violations: Vec::new(),
    };
    if !holds {
        report.violations.push(Violation {
            suite: report.suite.clone(),
            seed,
            index: 0,
            detail: "intentionally corrupted complementarity (c = 1/4^n)".into(),
            lhs,
            rhs,
            joint_matrix: Some(dump_matrix(inst.state())),
        });
    }
    Ok(report)
}
