//! Exact density-matrix evolution through the Kraus map, for small registers.
//!
//! This is the ground-truth route against which the stochastic trajectories
//! are validated: `ρ(t+dt) = Σ_μ M_μ ρ M_μ†`, unitary conjugation for gates,
//! and Bell-measurement projections for the teleportation pipeline. Dense
//! operators are built directly from their defining formulas, independent of
//! the state-vector kernels.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuits::GateOp;
use crate::error::{Error, Result};
use crate::noise::{NoiseChannel, DENSE_QUBIT_CAP};
use crate::state::{DensityMatrix, StateVector};
use crate::trajectory::{Schedule, ScheduleStep};

/// One completely positive step: a labeled Kraus set.
#[derive(Debug, Clone)]
pub struct SuperoperatorStep {
    kraus: Vec<DMatrix<Complex64>>,
    label: String,
}

impl SuperoperatorStep {
    /// Validates completeness `Σ M†M = 1` within 1e-12.
    pub fn new(kraus: Vec<DMatrix<Complex64>>, label: impl Into<String>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus set".into()));
        }
        let dim = kraus[0].nrows();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for m in &kraus {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows(),
                });
            }
            sum += m.adjoint() * m;
        }
        let deviation = (sum - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > 1e-12 {
            return Err(Error::KrausIncomplete { deviation });
        }
        Ok(Self {
            kraus,
            label: label.into(),
        })
    }

    /// The per-sub-step Kraus set of a noise channel.
    pub fn from_channel(channel: &NoiseChannel) -> Result<Self> {
        SuperoperatorStep::new(channel.kraus_matrices()?, format!("{:?}", channel.model()))
    }

    pub fn kraus(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `ρ ↦ Σ_μ M_μ ρ M_μ†`.
pub fn apply_superoperator(rho: &DensityMatrix, step: &SuperoperatorStep) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if step.kraus[0].nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: step.kraus[0].nrows(),
        });
    }
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for m in &step.kraus {
        out += m * rho.elements() * m.adjoint();
    }
    DensityMatrix::from_elements(rho.n_qubits(), out)
}

/// `ρ ↦ U ρ U†`, validating unitarity within 1e-10.
pub fn apply_unitary(rho: &DensityMatrix, u: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: u.nrows(),
        });
    }
    let deviation = (u.adjoint() * u - DMatrix::<Complex64>::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::NonUnitary { deviation });
    }
    DensityMatrix::from_elements(rho.n_qubits(), u * rho.elements() * u.adjoint())
}

/// The four Bell-measurement outcomes on a qubit pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    /// Amplitudes over `|b1 b0⟩` (index `2·b1 + b0`).
    pub fn amplitudes(&self) -> [Complex64; 4] {
        let h = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellOutcome::PhiPlus => [h, z, z, h],
            BellOutcome::PhiMinus => [h, z, z, -h],
            BellOutcome::PsiPlus => [z, h, h, z],
            BellOutcome::PsiMinus => [z, h, -h, z],
        }
    }
}

/// Project the two least significant qubits onto a Bell outcome.
///
/// Returns the renormalized density matrix of the remaining qubits together
/// with the outcome probability.
pub fn bell_project(
    rho_joint: &DensityMatrix,
    outcome: BellOutcome,
) -> Result<(DensityMatrix, f64)> {
    let n = rho_joint.n_qubits();
    if n < 3 {
        return Err(Error::InvalidQubitCount { min: 3, got: n });
    }
    let bell = outcome.amplitudes();
    let rest_dim = rho_joint.dim() / 4;
    let mut projected = DMatrix::<Complex64>::zeros(rest_dim, rest_dim);
    for jp in 0..rest_dim {
        for kp in 0..rest_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, bc) in bell.iter().enumerate() {
                for (cp, bcp) in bell.iter().enumerate() {
                    acc += bc.conj() * rho_joint.elements()[(4 * jp + c, 4 * kp + cp)] * bcp;
                }
            }
            projected[(jp, kp)] = acc;
        }
    }
    let prob = projected.trace().re;
    if prob <= 1e-14 {
        return Err(Error::ZeroProbabilityOutcome);
    }
    let inv = Complex64::new(1.0 / prob, 0.0);
    let rho = DensityMatrix::from_elements(n - 2, projected.map(|z| z * inv))?;
    Ok((rho, prob))
}

fn check_dense_cap(n_qubits: usize) -> Result<usize> {
    if n_qubits > DENSE_QUBIT_CAP {
        return Err(Error::TooManyQubits {
            n: n_qubits,
            max: DENSE_QUBIT_CAP,
        });
    }
    Ok(1usize << n_qubits)
}

/// Dense discrete Fourier transform on an m-qubit register:
/// `F[k, j] = exp(2πi kj / 2^m) / √2^m`.
pub fn dft_matrix(m_qubits: usize) -> Result<DMatrix<Complex64>> {
    let dim = check_dense_cap(m_qubits)?;
    let norm = 1.0 / (dim as f64).sqrt();
    Ok(DMatrix::from_fn(dim, dim, |k, j| {
        Complex64::from_polar(norm, 2.0 * PI * (k as f64) * (j as f64) / (dim as f64))
    }))
}

/// Dense quantized baker's-map matrix `B = F_n⁻¹ (F_{n-1} ⊕ F_{n-1})`.
pub fn baker_matrix(n_qubits: usize) -> Result<DMatrix<Complex64>> {
    if n_qubits < 2 {
        return Err(Error::InvalidQubitCount {
            min: 2,
            got: n_qubits,
        });
    }
    check_dense_cap(n_qubits)?;
    let f_sub = dft_matrix(n_qubits - 1)?;
    let block = DMatrix::<Complex64>::identity(2, 2).kronecker(&f_sub);
    Ok(dft_matrix(n_qubits)?.adjoint() * block)
}

/// Dense matrix of an elementary gate on an n-qubit register.
pub fn gate_matrix(n_qubits: usize, gate: &GateOp) -> Result<DMatrix<Complex64>> {
    let dim = check_dense_cap(n_qubits)?;
    let one = Complex64::new(1.0, 0.0);
    match *gate {
        GateOp::Hadamard { qubit } => {
            if qubit >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit,
                    n_qubits,
                });
            }
            let h = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
            let mask = 1usize << qubit;
            let mut m = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                // column j spreads over rows j and j ^ mask
                let sign = if j & mask != 0 { -h } else { h };
                m[(j, j)] = sign;
                m[(j ^ mask, j)] = h;
            }
            Ok(m)
        }
        GateOp::ControlledPhase {
            control,
            target,
            angle,
        } => {
            if control >= n_qubits || target >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: control.max(target),
                    n_qubits,
                });
            }
            if control == target {
                return Err(Error::DuplicateQubits);
            }
            let mask = (1usize << control) | (1usize << target);
            let phase = Complex64::from_polar(1.0, angle);
            let mut m = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                m[(j, j)] = if j & mask == mask { phase } else { one };
            }
            Ok(m)
        }
        GateOp::Swap { q1, q2 } => {
            if q1 >= n_qubits || q2 >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q1.max(q2),
                    n_qubits,
                });
            }
            if q1 == q2 {
                return Err(Error::DuplicateQubits);
            }
            let m1 = 1usize << q1;
            let m2 = 1usize << q2;
            let mut m = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                let b1 = (j & m1 != 0) as usize;
                let b2 = (j & m2 != 0) as usize;
                let i = if b1 != b2 { j ^ m1 ^ m2 } else { j };
                m[(i, j)] = one;
            }
            Ok(m)
        }
    }
}

/// Dense swap operator exchanging qubits `q1` and `q2`.
pub fn swap_matrix(n_qubits: usize, q1: usize, q2: usize) -> Result<DMatrix<Complex64>> {
    gate_matrix(n_qubits, &GateOp::Swap { q1, q2 })
}

/// Evolve a density matrix through the same interleaved program the
/// trajectory engine runs: dense unitaries for gates, the channel's Kraus map
/// (applied `sub_steps_per_gate` times) for each noise interval.
pub fn run_schedule(
    rho0: &DensityMatrix,
    schedule: &Schedule,
    channel: &NoiseChannel,
) -> Result<DensityMatrix> {
    let n = rho0.n_qubits();
    let step = SuperoperatorStep::from_channel(channel)?;
    let mut rho = rho0.clone();
    for s in schedule.steps() {
        match s {
            ScheduleStep::Gate(gate) => {
                let u = gate_matrix(n, gate)?;
                rho = apply_unitary(&rho, &u)?;
            }
            ScheduleStep::Noise => {
                for _ in 0..channel.sub_steps_per_gate() {
                    rho = apply_superoperator(&rho, &step)?;
                }
            }
        }
    }
    Ok(rho)
}

/// `⟨state|ρ|state⟩` specialized to a pure reference: fidelity of ρ.
pub fn fidelity_against(rho: &DensityMatrix, reference: &StateVector) -> Result<f64> {
    rho.expectation_with(reference)
}

/// Apply a dense operator to a state vector (test and verification helper).
pub fn apply_matrix_to_state(
    m: &DMatrix<Complex64>,
    state: &StateVector,
) -> Result<StateVector> {
    if m.ncols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: m.ncols(),
        });
    }
    let v = DVector::from_column_slice(state.amplitudes());
    let out = m * v;
    StateVector::from_amplitudes(out.iter().cloned().collect())
}
