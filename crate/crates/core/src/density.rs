//! Density matrices, bipartite states, measurement bases, the single-qubit
//! channels of the noise pipeline, and von Neumann / conditional entropies.
//!
//! Tensor ordering is A-major throughout: a joint index (a, b) maps to
//! a * dim_b + b.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => c(0.0, -1.0),
        (1, 0) => c(0.0, 1.0),
        _ => c(0.0, 0.0),
    })
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(1.0, 0.0),
        (1, 1) => c(-1.0, 0.0),
        _ => c(0.0, 0.0),
    })
}

pub fn hadamard() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| {
        if (i, j) == (1, 1) {
            c(-FRAC_1_SQRT_2, 0.0)
        } else {
            c(FRAC_1_SQRT_2, 0.0)
        }
    })
}

/// Hermitian, unit-trace, positive-semidefinite (up to tolerance) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace; positivity is checked where the
    /// spectrum is actually needed (see [`von_neumann_entropy`]).
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                actual: mat.cols(),
            });
        }
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { trace: tr.re });
        }
        Ok(Self { mat })
    }

    /// rho = |psi><psi| from a state vector (normalized first).
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-15 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let normalized: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(CMatrix::outer(&normalized, &normalized))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = 1.0 / dim as f64;
        Self {
            mat: CMatrix::from_fn(
                dim,
                dim,
                |i, j| if i == j { c(p, 0.0) } else { c(0.0, 0.0) },
            ),
        }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let mat = CMatrix::from_fn(probs.len(), probs.len(), |i, j| {
            if i == j {
                c(probs[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.mat)?.0)
    }
}

/// H(rho) = -Tr[rho log2 rho] via spectral decomposition, 0 log 0 = 0.
///
/// Eigenvalues below -1e-10 are rejected; small negatives are clamped to zero
/// and the spectrum renormalized before the entropy sum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let raw = rho.eigenvalues()?;
    let mut min = f64::INFINITY;
    for &w in &raw {
        min = min.min(w);
    }
    if min < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let clipped: Vec<f64> = raw.iter().map(|&w| w.clamp(0.0, 1.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut h = 0.0;
    for &w in &clipped {
        let p = w / total;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    Ok(h.clamp(0.0, (rho.dim() as f64).log2()))
}

/// Joint state on H_A tensor H_B with A-major index ordering.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, state: DensityMatrix) -> Result<Self> {
        if dim_a * dim_b != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                actual: state.dim(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            state,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Tr_A, leaving the B marginal.
    pub fn partial_trace_a(&self) -> Result<DensityMatrix> {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = self.state.mat();
        let out = CMatrix::from_fn(db, db, |b1, b2| {
            (0..da).map(|a| m[(a * db + b1, a * db + b2)]).sum()
        });
        DensityMatrix::new(out)
    }

    /// Tr_B, leaving the A marginal.
    pub fn partial_trace_b(&self) -> Result<DensityMatrix> {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = self.state.mat();
        let out = CMatrix::from_fn(da, da, |a1, a2| {
            (0..db).map(|b| m[(a1 * db + b, a2 * db + b)]).sum()
        });
        DensityMatrix::new(out)
    }
}

/// Conditional von Neumann entropy H(A|B) = H(rho_AB) - H(rho_B), in bits.
pub fn conditional_entropy(state: &BipartiteState) -> Result<f64> {
    let joint = von_neumann_entropy(state.state())?;
    let rho_b = state.partial_trace_a()?;
    Ok(joint - von_neumann_entropy(&rho_b)?)
}

/// An orthonormal basis given as a list of column vectors.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter(
                "basis must be a square set of vectors".into(),
            ));
        }
        let mut dev = 0.0_f64;
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate() {
                let ip: Complex64 = vi.iter().zip(vj).map(|(a, b)| a.conj() * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((ip - c(expected, 0.0)).norm());
            }
        }
        if dev > ORTHO_TOL {
            return Err(Error::NotOrthonormal { deviation: dev });
        }
        Ok(Self { dim, vectors })
    }

    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = vec![c(0.0, 0.0); dim];
                v[i] = c(1.0, 0.0);
                v
            })
            .collect();
        Self { dim, vectors }
    }

    /// Single-qubit eigenbasis of the given Pauli axis.
    pub fn pauli(axis: PauliAxis) -> Self {
        let s = FRAC_1_SQRT_2;
        let vectors = match axis {
            PauliAxis::Z => vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
            PauliAxis::X => vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]],
            PauliAxis::Y => vec![vec![c(s, 0.0), c(0.0, s)], vec![c(s, 0.0), c(0.0, -s)]],
        };
        Self { dim: 2, vectors }
    }

    /// Tensor product basis; the left factor is index-major.
    pub fn tensor(&self, other: &MeasurementBasis) -> Self {
        let dim = self.dim * other.dim;
        let mut vectors = Vec::with_capacity(dim);
        for vi in &self.vectors {
            for wj in &other.vectors {
                let mut v = Vec::with_capacity(dim);
                for a in vi {
                    for b in wj {
                        v.push(a * b);
                    }
                }
                vectors.push(v);
            }
        }
        Self { dim, vectors }
    }

    /// Product of single-qubit Pauli bases, one axis per qubit.
    pub fn pauli_product(axes: &[PauliAxis]) -> Self {
        let mut basis = Self::pauli(axes[0]);
        for &axis in &axes[1..] {
            basis = basis.tensor(&Self::pauli(axis));
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Pinching of the A factor: rho' = sum_x (|x><x| ⊗ I) rho (|x><x| ⊗ I).
///
/// The result is classical on A in the given basis; the map is idempotent and
/// trace preserving.
pub fn measure_a(state: &BipartiteState, basis: &MeasurementBasis) -> Result<BipartiteState> {
    if basis.dim() != state.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a(),
            actual: basis.dim(),
        });
    }
    let id_b = CMatrix::identity(state.dim_b());
    let dim = state.dim_a() * state.dim_b();
    let mut out = CMatrix::zeros(dim, dim);
    for x in basis.vectors() {
        let proj = CMatrix::outer(x, x).kron(&id_b);
        out = out.add(&proj.mul(state.state().mat()).mul(&proj));
    }
    BipartiteState::new(state.dim_a(), state.dim_b(), DensityMatrix::new(out)?)
}

/// The single-qubit channels of the honest-device noise model.
#[derive(Debug, Clone)]
pub enum Channel1q {
    /// (1-p) rho + p X rho X
    BitFlip(f64),
    /// (1 - 4p/3) rho + (2p/3) I; completely positive for p <= 3/4.
    Depolarizing(f64),
    /// (1-p) rho + p Z rho Z
    Dephasing(f64),
    /// U rho U^dagger
    Unitary(CMatrix),
}

pub fn apply_channel_1q(rho: &DensityMatrix, channel: &Channel1q) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    let m = rho.mat();
    let out = match channel {
        Channel1q::BitFlip(p) => {
            check_rate("bit-flip p", *p, 1.0)?;
            let x = pauli_x();
            m.scale(c(1.0 - p, 0.0))
                .add(&x.mul(m).mul(&x).scale(c(*p, 0.0)))
        }
        Channel1q::Depolarizing(p) => {
            check_rate("depolarizing p", *p, 0.75)?;
            let id = CMatrix::identity(2);
            m.scale(c(1.0 - 4.0 * p / 3.0, 0.0))
                .add(&id.scale(c(2.0 * p / 3.0, 0.0)))
        }
        Channel1q::Dephasing(p) => {
            check_rate("dephasing p", *p, 1.0)?;
            let z = pauli_z();
            m.scale(c(1.0 - p, 0.0))
                .add(&z.mul(m).mul(&z).scale(c(*p, 0.0)))
        }
        Channel1q::Unitary(u) => {
            let dev = u
                .mul(&u.adjoint())
                .sub(&CMatrix::identity(2))
                .frobenius_norm();
            if dev > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "matrix is not unitary (||UU+ - I|| = {dev:.3e})"
                )));
            }
            u.mul(m).mul(&u.adjoint())
        }
    };
    DensityMatrix::new(out)
}

fn check_rate(name: &'static str, p: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&p) {
        return Err(Error::OutOfRange {
            name,
            value: p,
            lo: 0.0,
            hi,
        });
    }
    Ok(())
}

/// c = max_{x,z} |<x|z>|^2 between two equal-dimension bases.
pub fn complementarity(b1: &MeasurementBasis, b2: &MeasurementBasis) -> Result<f64> {
    if b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch {
            expected: b1.dim(),
            actual: b2.dim(),
        });
    }
    let mut best = 0.0_f64;
    for x in b1.vectors() {
        for z in b2.vectors() {
            let ip: Complex64 = x.iter().zip(z).map(|(a, b)| a.conj() * b).sum();
            best = best.max(ip.norm_sqr());
        }
    }
    Ok(best)
}

/// n EPR pairs as a bipartite state, Alice holding the first factor:
/// 2^-n sum_{s,s'} |s><s'|_A ⊗ |s><s'|_B.
pub fn epr_pairs(n: usize) -> BipartiteState {
    let d = 1usize << n;
    let amp = 1.0 / (d as f64).sqrt();
    let mut psi = vec![c(0.0, 0.0); d * d];
    for s in 0..d {
        psi[s * d + s] = c(amp, 0.0);
    }
    let rho = DensityMatrix::pure(&psi).expect("EPR state is valid");
    BipartiteState::new(d, d, rho).expect("dimensions agree")
}

/// Applies a channel given in Kraus form to the B factor. Kraus operators may
/// be rectangular (dim_b_out x dim_b_in); completeness sum_j K_j^dagger K_j = I
/// is checked.
pub fn apply_kraus_on_b(
    state: &BipartiteState,
    kraus: &[CMatrix],
    dim_b_out: usize,
) -> Result<BipartiteState> {
    let din = state.dim_b();
    let mut completeness = CMatrix::zeros(din, din);
    for k in kraus {
        if k.rows() != dim_b_out || k.cols() != din {
            return Err(Error::DimensionMismatch {
                expected: dim_b_out * din,
                actual: k.rows() * k.cols(),
            });
        }
        completeness = completeness.add(&k.adjoint().mul(k));
    }
    let dev = completeness.sub(&CMatrix::identity(din)).frobenius_norm();
    if dev > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "Kraus operators not trace preserving (deviation {dev:.3e})"
        )));
    }
    let id_a = CMatrix::identity(state.dim_a());
    let dout = state.dim_a() * dim_b_out;
    let mut out = CMatrix::zeros(dout, dout);
    for k in kraus {
        let lifted = id_a.kron(k);
        out = out.add(&lifted.mul(state.state().mat()).mul(&lifted.adjoint()));
    }
    BipartiteState::new(state.dim_a(), dim_b_out, DensityMatrix::new(out)?)
}
