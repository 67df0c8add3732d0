//! Dense state vectors and density matrices over the computational basis.
//!
//! Basis convention: `|i_{n-1} … i_1 i_0⟩` with `i = Σ_l i_l 2^l`, so qubit
//! `l` corresponds to bit `l` of the amplitude index. Qubit 0 is the least
//! significant bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Norm tolerance for pure-state checks.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Tolerance for density-matrix trace and Hermiticity checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// A pure n-qubit state: `2^n` complex amplitudes in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidQubitCount { min: 1, got: 0 });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Build from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Rescale to unit norm. Errors on a zero-norm state.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability that qubit `qubit` reads 1.
    pub fn qubit_up_probability(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(j, _)| j & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Outer product `|self⟩⟨self|`.
    pub fn outer_product(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (j, aj) in self.amps.iter().enumerate() {
            for (k, ak) in self.amps.iter().enumerate() {
                m[(j, k)] = aj * ak.conj();
            }
        }
        DensityMatrix {
            n_qubits: self.n_qubits,
            elements: m,
        }
    }

    /// Tensor product `|self⟩ ⊗ |other⟩`, with `other` occupying the low bits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let d_other = other.dim();
        let mut amps = Vec::with_capacity(self.dim() * d_other);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }
}

/// A mixed n-qubit state: `2^n × 2^n` complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_elements(n_qubits: usize, elements: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if elements.nrows() != dim || elements.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: elements.nrows(),
            });
        }
        Ok(Self { n_qubits, elements })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn trace(&self) -> Complex64 {
        self.elements.trace()
    }

    /// Maximum elementwise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.elements.adjoint();
        (&self.elements - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue (the matrix is treated as Hermitian).
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = self.elements.clone().symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `⟨state|ρ|state⟩`, real part (the value is real for Hermitian ρ).
    pub fn expectation_with(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, aj) in state.amplitudes().iter().enumerate() {
            for (k, ak) in state.amplitudes().iter().enumerate() {
                acc += aj.conj() * self.elements[(j, k)] * ak;
            }
        }
        Ok(acc.re)
    }

    /// Partial trace down to a single qubit.
    pub fn reduced_single_qubit(&self, target: usize) -> Result<DensityMatrix> {
        if target >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: target,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << target;
        let dim = self.dim();
        let mut m = DMatrix::zeros(2, 2);
        for rest in 0..dim / 2 {
            // scatter the non-target bits around the target position
            let low = rest & (mask - 1);
            let high = (rest & !(mask - 1)) << 1;
            let base = high | low;
            for a in 0..2usize {
                for b in 0..2usize {
                    let j = base | (a << target);
                    let k = base | (b << target);
                    m[(a, b)] += self.elements[(j, k)];
                }
            }
        }
        DensityMatrix::from_elements(1, m)
    }
}

/// A state with every amplitude of modulus `1/√2^n` and uniform random phases.
pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    if n_qubits == 0 {
        return Err(Error::InvalidQubitCount { min: 1, got: 0 });
    }
    let dim = 1usize << n_qubits;
    let r = 1.0 / (dim as f64).sqrt();
    let amps = (0..dim)
        .map(|_| Complex64::from_polar(r, TAU * rng.gen::<f64>()))
        .collect();
    let mut state = StateVector { n_qubits, amps };
    state.normalize()?;
    Ok(state)
}

/// Random coefficients for the mediating `n − 2` qubits of a chain of `n`.
pub fn random_chain_coefficients<R: Rng + ?Sized>(
    n_chain: usize,
    rng: &mut R,
) -> Result<StateVector> {
    if n_chain < 3 {
        return Err(Error::InvalidQubitCount { min: 3, got: n_chain });
    }
    random_state(n_chain - 2, rng)
}

/// Reduced 2×2 density matrix of one qubit of a pure state.
pub fn reduced_single_qubit(state: &StateVector, target: usize) -> Result<DensityMatrix> {
    state.check_qubit(target)?;
    let mask = 1usize << target;
    let amps = state.amplitudes();
    let mut rho00 = 0.0;
    let mut rho11 = 0.0;
    let mut rho01 = Complex64::new(0.0, 0.0);
    for (j, a) in amps.iter().enumerate() {
        if j & mask == 0 {
            let b = amps[j | mask];
            rho00 += a.norm_sqr();
            rho11 += b.norm_sqr();
            rho01 += a * b.conj();
        }
    }
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(rho00, 0.0),
            rho01,
            rho01.conj(),
            Complex64::new(rho11, 0.0),
        ],
    );
    DensityMatrix::from_elements(1, m)
}

/// `|⟨reference|state⟩|²` for normalized pure states.
pub fn fidelity_pure(state: &StateVector, reference: &StateVector) -> Result<f64> {
    Ok(reference.inner(state)?.norm_sqr())
}
