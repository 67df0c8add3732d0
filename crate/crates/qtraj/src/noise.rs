//! n-qubit noise channels as jump-operator families.
//!
//! Three models, each a set of jump operators `M_1 … M_n` plus a diagonal
//! no-jump operator `M_0` with `Σ_μ M_μ†M_μ = 1` holding exactly:
//!
//! * `AmpShared` — one damping budget for the whole register: a basis state
//!   with `m` excited qubits decays with total probability γ, each of the m
//!   single-decay successors being equally likely. `M_μ` has the element
//!   `√(γ/m(j))` at `(j − 2^{μ-1}, j)` whenever bit μ−1 of `j` is set, and
//!   `M_0 = diag(1, √(1−γ), …, √(1−γ))`.
//! * `AmpIndependent` — every qubit couples to its own bath: `M_μ` is the
//!   single-qubit lowering operator `√γ σ⁻` embedded at qubit μ−1, and
//!   `M_0 = diag(√(1 − m(j)γ))` with `m(j)` the number of set bits of `j`.
//! * `PhaseFlip` — `M_μ = √γ Z` embedded at qubit μ−1 and
//!   `M_0 = √(1−nγ)·1`.
//!
//! γ is the dimensionless rate per noise sub-step. A protocol-level rate per
//! gate interval is split across `sub_steps_per_gate` sub-steps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Hard cap for materializing dense Kraus matrices.
pub const DENSE_QUBIT_CAP: usize = 10;

/// Which generalized channel a [`NoiseChannel`] realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    AmpShared,
    AmpIndependent,
    PhaseFlip,
}

/// Per-sub-step rate and sub-step schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Dimensionless rate γ per noise sub-step.
    pub gamma: f64,
    /// Sub-steps making up one gate-level noise interval.
    pub sub_steps_per_gate: usize,
}

/// Result of one stochastic noise sub-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpOutcome {
    NoJump,
    /// A jump through operator `M_mu`; `mu` is the 1-based qubit label.
    Jump { mu: usize },
}

/// A noise model bound to a register size and rate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    model: NoiseModel,
    params: NoiseParams,
    n_qubits: usize,
}

impl NoiseChannel {
    /// Channel with an explicit per-sub-step rate.
    pub fn new(model: NoiseModel, n_qubits: usize, params: NoiseParams) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidQubitCount { min: 1, got: 0 });
        }
        if params.sub_steps_per_gate == 0 {
            return Err(Error::InvalidParameter(
                "sub_steps_per_gate must be positive".into(),
            ));
        }
        let gamma = params.gamma;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1], got {gamma}"
            )));
        }
        // the no-jump amplitude √(1 − m γ) must stay real for every basis state
        let worst = match model {
            NoiseModel::AmpShared => gamma,
            NoiseModel::AmpIndependent | NoiseModel::PhaseFlip => gamma * n_qubits as f64,
        };
        if worst > 1.0 {
            return Err(Error::RateTooLarge { gamma, n_qubits });
        }
        Ok(Self {
            model,
            params,
            n_qubits,
        })
    }

    /// Channel from a gate-level rate, split evenly across `sub_steps` sub-steps.
    pub fn from_gate_rate(
        model: NoiseModel,
        n_qubits: usize,
        gamma_gate: f64,
        sub_steps: usize,
    ) -> Result<Self> {
        if sub_steps == 0 {
            return Err(Error::InvalidParameter(
                "sub_steps must be positive".into(),
            ));
        }
        Self::new(
            model,
            n_qubits,
            NoiseParams {
                gamma: gamma_gate / sub_steps as f64,
                sub_steps_per_gate: sub_steps,
            },
        )
    }

    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn params(&self) -> NoiseParams {
        self.params
    }

    /// γ per sub-step.
    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn sub_steps_per_gate(&self) -> usize {
        self.params.sub_steps_per_gate
    }

    /// Jump probabilities `dp_μ` for μ = 1…n on a normalized state.
    pub fn jump_probabilities(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let gamma = self.params.gamma;
        let n = self.n_qubits;
        let mut dp = vec![0.0; n];
        match self.model {
            NoiseModel::PhaseFlip => {
                dp.fill(gamma);
            }
            NoiseModel::AmpIndependent => {
                for (j, a) in state.amplitudes().iter().enumerate() {
                    let p = a.norm_sqr();
                    if p == 0.0 {
                        continue;
                    }
                    let mut bits = j;
                    while bits != 0 {
                        let l = bits.trailing_zeros() as usize;
                        dp[l] += gamma * p;
                        bits &= bits - 1;
                    }
                }
            }
            NoiseModel::AmpShared => {
                for (j, a) in state.amplitudes().iter().enumerate() {
                    let p = a.norm_sqr();
                    if p == 0.0 || j == 0 {
                        continue;
                    }
                    let share = gamma * p / (j.count_ones() as f64);
                    let mut bits = j;
                    while bits != 0 {
                        let l = bits.trailing_zeros() as usize;
                        dp[l] += share;
                        bits &= bits - 1;
                    }
                }
            }
        }
        Ok(dp)
    }

    /// Apply jump operator `M_mu` (1-based `mu`) and renormalize.
    pub fn apply_jump(&self, state: &mut StateVector, mu: usize) -> Result<()> {
        self.check_state(state)?;
        if mu == 0 || mu > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: mu,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << (mu - 1);
        let dim = state.dim();
        let amps = state.amplitudes_mut();
        match self.model {
            NoiseModel::PhaseFlip => {
                // √γ Z is unitary up to scale: negate the bit-set half
                for (j, a) in amps.iter_mut().enumerate() {
                    if j & mask != 0 {
                        *a = -*a;
                    }
                }
                return Ok(());
            }
            NoiseModel::AmpIndependent => {
                for i in 0..dim {
                    amps[i] = if i & mask == 0 {
                        amps[i | mask]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
            }
            NoiseModel::AmpShared => {
                for i in 0..dim {
                    amps[i] = if i & mask == 0 {
                        let j = i | mask;
                        amps[j] / (j.count_ones() as f64).sqrt()
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
            }
        }
        if state.norm_sq() <= 0.0 {
            return Err(Error::ZeroProbabilityJump { mu });
        }
        state.normalize()
    }

    /// Apply the no-jump operator `M_0` and renormalize.
    pub fn apply_no_jump(&self, state: &mut StateVector) -> Result<()> {
        self.check_state(state)?;
        let gamma = self.params.gamma;
        match self.model {
            NoiseModel::PhaseFlip => {
                let w = 1.0 - gamma * self.n_qubits as f64;
                if w <= 0.0 && gamma > 0.0 {
                    return Err(Error::RateTooLarge {
                        gamma,
                        n_qubits: self.n_qubits,
                    });
                }
                // M_0 ∝ identity: renormalization restores the state exactly
            }
            NoiseModel::AmpShared => {
                let w = (1.0 - gamma).sqrt();
                let amps = state.amplitudes_mut();
                for a in amps.iter_mut().skip(1) {
                    *a *= w;
                }
                if state.norm_sq() <= 0.0 {
                    return Err(Error::RateTooLarge {
                        gamma,
                        n_qubits: self.n_qubits,
                    });
                }
                state.normalize()?;
            }
            NoiseModel::AmpIndependent => {
                let amps = state.amplitudes_mut();
                for (j, a) in amps.iter_mut().enumerate() {
                    let m = j.count_ones() as f64;
                    let w2 = 1.0 - m * gamma;
                    if w2 < 0.0 {
                        return Err(Error::RateTooLarge {
                            gamma,
                            n_qubits: self.n_qubits,
                        });
                    }
                    *a *= w2.sqrt();
                }
                if state.norm_sq() <= 0.0 {
                    return Err(Error::RateTooLarge {
                        gamma,
                        n_qubits: self.n_qubits,
                    });
                }
                state.normalize()?;
            }
        }
        Ok(())
    }

    /// Dense Kraus matrices `[M_0, M_1, …, M_n]` for oracle use.
    pub fn kraus_matrices(&self) -> Result<Vec<DMatrix<Complex64>>> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                n: self.n_qubits,
                max: DENSE_QUBIT_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let gamma = self.params.gamma;
        let mut out = Vec::with_capacity(self.n_qubits + 1);

        let mut m0 = DMatrix::<Complex64>::zeros(dim, dim);
        match self.model {
            NoiseModel::AmpShared => {
                for j in 0..dim {
                    let w = if j == 0 { 1.0 } else { (1.0 - gamma).sqrt() };
                    m0[(j, j)] = Complex64::new(w, 0.0);
                }
            }
            NoiseModel::AmpIndependent => {
                for j in 0..dim {
                    let m = j.count_ones() as f64;
                    m0[(j, j)] = Complex64::new((1.0 - m * gamma).sqrt(), 0.0);
                }
            }
            NoiseModel::PhaseFlip => {
                let w = (1.0 - gamma * self.n_qubits as f64).sqrt();
                for j in 0..dim {
                    m0[(j, j)] = Complex64::new(w, 0.0);
                }
            }
        }
        out.push(m0);

        for mu in 1..=self.n_qubits {
            let mask = 1usize << (mu - 1);
            let mut m = DMatrix::<Complex64>::zeros(dim, dim);
            match self.model {
                NoiseModel::AmpShared => {
                    for j in 0..dim {
                        if j & mask != 0 {
                            let w = (gamma / j.count_ones() as f64).sqrt();
                            m[(j - mask, j)] = Complex64::new(w, 0.0);
                        }
                    }
                }
                NoiseModel::AmpIndependent => {
                    let w = gamma.sqrt();
                    for j in 0..dim {
                        if j & mask != 0 {
                            m[(j - mask, j)] = Complex64::new(w, 0.0);
                        }
                    }
                }
                NoiseModel::PhaseFlip => {
                    let w = gamma.sqrt();
                    for j in 0..dim {
                        let sign = if j & mask != 0 { -w } else { w };
                        m[(j, j)] = Complex64::new(sign, 0.0);
                    }
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.n_qubits,
                got: state.dim(),
            });
        }
        if state.norm_sq() <= 0.0 {
            return Err(Error::ZeroNormState);
        }
        Ok(())
    }
}
