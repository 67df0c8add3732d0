//! In-place unitary gate kernels and circuit builders.
//!
//! The quantized baker's map acts on n qubits as `B = F_n⁻¹ (F_{n-1} ⊕ F_{n-1})`
//! in the position basis: the block matrix applies an (n−1)-qubit Fourier
//! transform to the low n−1 bits while leaving the top bit alone, and `F_n⁻¹`
//! acts on the whole register. One map direction decomposes into `(n−1)²`
//! controlled phase shifts and `2n−1` Hadamard gates, plus bit-reversal swaps
//! which are tallied separately.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// An elementary gate acting on one or two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Hadamard { qubit: usize },
    /// Multiplies `|11⟩` amplitudes (on control, target) by `e^{iθ}`.
    ControlledPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Swap { q1: usize, q2: usize },
}

impl GateOp {
    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits,
                })
            } else {
                Ok(())
            }
        };
        match *self {
            GateOp::Hadamard { qubit } => check(qubit),
            GateOp::ControlledPhase {
                control,
                target,
                angle,
            } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::DuplicateQubits);
                }
                if !angle.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite controlled-phase angle {angle}"
                    )));
                }
                Ok(())
            }
            GateOp::Swap { q1, q2 } => {
                check(q1)?;
                check(q2)?;
                if q1 == q2 {
                    return Err(Error::DuplicateQubits);
                }
                Ok(())
            }
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> GateOp {
        match *self {
            GateOp::ControlledPhase {
                control,
                target,
                angle,
            } => GateOp::ControlledPhase {
                control,
                target,
                angle: -angle,
            },
            g => g,
        }
    }
}

/// An ordered list of gates; doubles as the gate log for budget accounting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateSequence {
    ops: Vec<GateOp>,
}

impl GateSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    pub fn extend(&mut self, other: &GateSequence) {
        self.ops.extend_from_slice(&other.ops);
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn hadamard_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, GateOp::Hadamard { .. }))
            .count()
    }

    pub fn controlled_phase_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, GateOp::ControlledPhase { .. }))
            .count()
    }

    pub fn swap_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, GateOp::Swap { .. }))
            .count()
    }

    /// The inverse circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> GateSequence {
        GateSequence {
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
        }
    }
}

/// Number of elementary gates in the budget sense: Hadamards and controlled
/// phase shifts. Bit-reversal swaps are bookkept separately.
pub fn gate_count(sequence: &GateSequence) -> usize {
    sequence.hadamard_count() + sequence.controlled_phase_count()
}

/// Apply one gate in place. Preserves the 2-norm.
pub fn apply_gate(state: &mut StateVector, gate: &GateOp) -> Result<()> {
    gate.validate(state.n_qubits())?;
    let dim = state.dim();
    let amps = state.amplitudes_mut();
    match *gate {
        GateOp::Hadamard { qubit } => {
            let mask = 1usize << qubit;
            let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
            for base in (0..dim).step_by(mask << 1) {
                for offset in 0..mask {
                    let i = base + offset;
                    let j = i | mask;
                    let a = amps[i];
                    let b = amps[j];
                    amps[i] = c * (a + b);
                    amps[j] = c * (a - b);
                }
            }
        }
        GateOp::ControlledPhase {
            control,
            target,
            angle,
        } => {
            let mask = (1usize << control) | (1usize << target);
            let phase = Complex64::from_polar(1.0, angle);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *a *= phase;
                }
            }
        }
        GateOp::Swap { q1, q2 } => {
            let m1 = 1usize << q1;
            let m2 = 1usize << q2;
            for i in 0..dim {
                if i & m1 != 0 && i & m2 == 0 {
                    amps.swap(i, i ^ m1 ^ m2);
                }
            }
        }
    }
    Ok(())
}

/// Apply every gate of a sequence in order.
pub fn apply_sequence(state: &mut StateVector, sequence: &GateSequence) -> Result<()> {
    for op in sequence.ops() {
        apply_gate(state, op)?;
    }
    Ok(())
}

fn check_register(qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::InvalidParameter("empty qubit register".into()));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubits);
        }
        let _ = q;
    }
    Ok(())
}

/// Circuit for the discrete Fourier transform on a register.
///
/// `qubits[t]` carries bit `t` of the register value; the circuit realizes
/// `|j⟩ ↦ 2^{-m/2} Σ_k exp(2πi jk / 2^m) |k⟩` on the m-qubit register,
/// ending with bit-reversal swaps.
pub fn qft_sequence(qubits: &[usize]) -> Result<GateSequence> {
    check_register(qubits)?;
    let m = qubits.len();
    let mut seq = GateSequence::new();
    for i in (0..m).rev() {
        seq.push(GateOp::Hadamard { qubit: qubits[i] });
        for j in (0..i).rev() {
            let angle = 2.0 * PI / ((1u64 << (i - j + 1)) as f64);
            seq.push(GateOp::ControlledPhase {
                control: qubits[j],
                target: qubits[i],
                angle,
            });
        }
    }
    for r in 0..m / 2 {
        seq.push(GateOp::Swap {
            q1: qubits[r],
            q2: qubits[m - 1 - r],
        });
    }
    Ok(seq)
}

/// Circuit for the inverse Fourier transform on a register.
pub fn inverse_qft_sequence(qubits: &[usize]) -> Result<GateSequence> {
    Ok(qft_sequence(qubits)?.inverse())
}

/// Apply the Fourier transform to a register in place.
pub fn qft(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    apply_sequence(state, &qft_sequence(qubits)?)
}

/// Apply the inverse Fourier transform to a register in place.
pub fn inverse_qft(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    apply_sequence(state, &inverse_qft_sequence(qubits)?)
}

/// Direction of one baker's-map step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BakerDirection {
    Forward,
    Backward,
}

/// Circuit for one step of the quantized baker's map on `n` qubits.
///
/// Forward applies `F_n⁻¹ (F_{n-1} ⊕ F_{n-1})`; backward applies the adjoint.
pub fn baker_sequence(n_qubits: usize, direction: BakerDirection) -> Result<GateSequence> {
    if n_qubits < 2 {
        return Err(Error::InvalidQubitCount {
            min: 2,
            got: n_qubits,
        });
    }
    let all: Vec<usize> = (0..n_qubits).collect();
    let low: Vec<usize> = (0..n_qubits - 1).collect();
    let mut seq = GateSequence::new();
    match direction {
        BakerDirection::Forward => {
            seq.extend(&qft_sequence(&low)?);
            seq.extend(&inverse_qft_sequence(&all)?);
        }
        BakerDirection::Backward => {
            seq.extend(&qft_sequence(&all)?);
            seq.extend(&inverse_qft_sequence(&low)?);
        }
    }
    Ok(seq)
}

/// Apply one baker's-map step in place, returning the gate log.
pub fn baker_step(state: &mut StateVector, direction: BakerDirection) -> Result<GateSequence> {
    let seq = baker_sequence(state.n_qubits(), direction)?;
    apply_sequence(state, &seq)?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{fidelity_pure, random_state};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Dense DFT matrix, straight from its defining formula.
    fn dense_dft(m: usize) -> DMatrix<Complex64> {
        let dim = 1usize << m;
        let norm = 1.0 / (dim as f64).sqrt();
        DMatrix::from_fn(dim, dim, |k, j| {
            Complex64::from_polar(norm, 2.0 * PI * (k as f64) * (j as f64) / (dim as f64))
        })
    }

    fn apply_dense(mat: &DMatrix<Complex64>, state: &StateVector) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        (mat * v).iter().cloned().collect()
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::basis(1, 0).unwrap();
        apply_gate(&mut s, &GateOp::Hadamard { qubit: 0 }).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn swap_on_binary_state() {
        let mut s = StateVector::basis(2, 0b01).unwrap();
        apply_gate(&mut s, &GateOp::Swap { q1: 0, q2: 1 }).unwrap();
        assert!((s.amplitudes()[0b10].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn controlled_phase_pi_flips_eleven() {
        let mut s = StateVector::basis(2, 0b11).unwrap();
        apply_gate(
            &mut s,
            &GateOp::ControlledPhase {
                control: 0,
                target: 1,
                angle: PI,
            },
        )
        .unwrap();
        assert!((s.amplitudes()[0b11].re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn gate_rejects_out_of_range_operand() {
        let mut s = StateVector::basis(2, 0).unwrap();
        assert!(apply_gate(&mut s, &GateOp::Hadamard { qubit: 2 }).is_err());
        assert!(apply_gate(&mut s, &GateOp::Swap { q1: 1, q2: 1 }).is_err());
    }

    #[test]
    fn gates_preserve_norm() {
        let mut s = random_state(4, &mut rng(1)).unwrap();
        let gates = [
            GateOp::Hadamard { qubit: 2 },
            GateOp::ControlledPhase {
                control: 0,
                target: 3,
                angle: 0.7,
            },
            GateOp::Swap { q1: 1, q2: 3 },
        ];
        for g in &gates {
            apply_gate(&mut s, g).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let mut s = StateVector::basis(1, 0).unwrap();
        qft(&mut s, &[0]).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn qft_two_qubits_on_zero_is_uniform() {
        let mut s = StateVector::basis(2, 0).unwrap();
        qft(&mut s, &[0, 1]).unwrap();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn qft_three_qubits_matches_dense_matrix() {
        let f3 = dense_dft(3);
        let s0 = random_state(3, &mut rng(2)).unwrap();
        let expected = apply_dense(&f3, &s0);
        let mut s = s0.clone();
        qft(&mut s, &[0, 1, 2]).unwrap();
        for (a, e) in s.amplitudes().iter().zip(&expected) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_qft_matches_adjoint_dense_matrix() {
        let f3_inv = dense_dft(3).adjoint();
        let s0 = random_state(3, &mut rng(3)).unwrap();
        let expected = apply_dense(&f3_inv, &s0);
        let mut s = s0.clone();
        inverse_qft(&mut s, &[0, 1, 2]).unwrap();
        for (a, e) in s.amplitudes().iter().zip(&expected) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_qft_undoes_qft() {
        let s0 = random_state(4, &mut rng(4)).unwrap();
        let mut s = s0.clone();
        qft(&mut s, &[0, 1, 2, 3]).unwrap();
        inverse_qft(&mut s, &[0, 1, 2, 3]).unwrap();
        for (a, e) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_rejects_duplicate_indices() {
        let mut s = StateVector::basis(3, 0).unwrap();
        assert!(qft(&mut s, &[0, 1, 1]).is_err());
    }

    #[test]
    fn qft_fourth_power_is_identity() {
        let s0 = random_state(3, &mut rng(5)).unwrap();
        let mut s = s0.clone();
        for _ in 0..4 {
            qft(&mut s, &[0, 1, 2]).unwrap();
        }
        for (a, e) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - e).norm() < 1e-9);
        }
    }

    #[test]
    fn baker_forward_backward_is_identity() {
        let s0 = random_state(5, &mut rng(6)).unwrap();
        let mut s = s0.clone();
        baker_step(&mut s, BakerDirection::Forward).unwrap();
        baker_step(&mut s, BakerDirection::Backward).unwrap();
        assert!((fidelity_pure(&s, &s0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn baker_matches_dense_block_matrix() {
        // B = F_3^{-1} (F_2 ⊕ F_2) built directly from the dense DFTs,
        // with the block matrix diagonal in the position basis.
        let f2 = dense_dft(2);
        let block = DMatrix::<Complex64>::identity(2, 2).kronecker(&f2);
        // verify block diagonality
        for i in 0..8 {
            for j in 0..8 {
                if (i < 4) != (j < 4) {
                    assert!(block[(i, j)].norm() < 1e-15);
                }
            }
        }
        let b = dense_dft(3).adjoint() * &block;
        for col in 0..8 {
            let mut s = StateVector::basis(3, col).unwrap();
            baker_step(&mut s, BakerDirection::Forward).unwrap();
            for row in 0..8 {
                let d = (s.amplitudes()[row] - b[(row, col)]).norm();
                assert!(d < 1e-11, "entry ({row},{col}) off by {d}");
            }
        }
    }

    #[test]
    fn baker_gate_budget() {
        let seq = baker_sequence(10, BakerDirection::Forward).unwrap();
        assert_eq!(seq.controlled_phase_count(), 81);
        assert_eq!(seq.hadamard_count(), 19);
        assert_eq!(gate_count(&seq), 100);

        let back = baker_sequence(10, BakerDirection::Backward).unwrap();
        assert_eq!(gate_count(&back), 100);
    }

    #[test]
    fn gate_count_empty_and_round_trips() {
        assert_eq!(gate_count(&GateSequence::new()), 0);

        // two forward+backward pairs at n=5: 2·2·(16+9) = 100
        let mut seq = GateSequence::new();
        for _ in 0..2 {
            seq.extend(&baker_sequence(5, BakerDirection::Forward).unwrap());
            seq.extend(&baker_sequence(5, BakerDirection::Backward).unwrap());
        }
        assert_eq!(gate_count(&seq), 100);
    }

    #[test]
    fn baker_rejects_single_qubit() {
        assert!(baker_sequence(1, BakerDirection::Forward).is_err());
    }
}
