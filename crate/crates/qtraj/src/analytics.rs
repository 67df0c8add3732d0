//! Closed-form predictions for the noise experiments.
//!
//! All time arguments are dimensionless accumulated rates (`Γt/ħ` at the
//! sub-step level, `Γτ/ħ` per gate interval); no physical units appear
//! anywhere.

use crate::error::{Error, Result};

/// Class populations `W_0 … W_m` of a damping cascade.
///
/// Class `k` collects the basis states reachable from the initial state by
/// exactly `k` single-qubit decays; class `m` (the ground state) absorbs the
/// remainder so the weights always sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeDistribution {
    pub probabilities: Vec<f64>,
    pub m: usize,
}

impl CascadeDistribution {
    fn from_open_weights(mut w: Vec<f64>) -> Self {
        let m = w.len();
        let partial: f64 = w.iter().sum();
        w.push((1.0 - partial).clamp(0.0, 1.0));
        Self {
            probabilities: w,
            m,
        }
    }
}

/// A fidelity value together with its long-time asymptote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityPrediction {
    pub value: f64,
    pub asymptote: f64,
}

/// Cascade classes under the shared-rate damping model.
///
/// `W_k = (Γt/ħ)^k e^{-Γt/ħ} / k!` for `k < m`, with `W_m` absorbing the rest.
pub fn cascade_shared(m: usize, rate_time: f64) -> Result<CascadeDistribution> {
    if rate_time < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate_time must be nonnegative, got {rate_time}"
        )));
    }
    let mut w = Vec::with_capacity(m);
    let mut term = (-rate_time).exp(); // (rt)^k e^{-rt} / k!, starting at k = 0
    for k in 0..m {
        w.push(term);
        term *= rate_time / (k as f64 + 1.0);
    }
    Ok(CascadeDistribution::from_open_weights(w))
}

/// Cascade classes under independent per-qubit damping.
///
/// With `n_k = m − k` qubits still excited in class `k`, the class weights
/// solve `dW_k/dt = n_{k-1}W_{k-1} − n_k W_k`; the solution is binomial:
/// `W_k = C(m,k) e^{-(m-k)·rt} (1 − e^{-rt})^k`, equal to the alternating
/// exponential sum `m!/n_k! Σ_i (−1)^{k−i} e^{−n_i·rt} / (i!(k−i)!)`.
pub fn cascade_independent(n: usize, m: usize, rate_time: f64) -> Result<CascadeDistribution> {
    if m > n {
        return Err(Error::InvalidParameter(format!(
            "initial excitation count {m} exceeds qubit count {n}"
        )));
    }
    if rate_time < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate_time must be nonnegative, got {rate_time}"
        )));
    }
    let survive = (-rate_time).exp();
    let decayed = 1.0 - survive;
    let mut w = Vec::with_capacity(m);
    let mut binom = 1.0; // C(m, k)
    for k in 0..m {
        let value = binom * survive.powi((m - k) as i32) * decayed.powi(k as i32);
        w.push(value);
        binom *= (m - k) as f64 / (k as f64 + 1.0);
    }
    Ok(CascadeDistribution::from_open_weights(w))
}

/// Fidelity of an equal-modulus random state under the generalized phase
/// flip channel: `F = 2^{-n} Σ_i C(n,i) e^{-2i·rt} = ((1 + e^{-2rt})/2)^n`.
pub fn phaseflip_fidelity(n: usize, rate_time: f64) -> Result<FidelityPrediction> {
    if n == 0 {
        return Err(Error::InvalidQubitCount { min: 1, got: 0 });
    }
    if rate_time < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate_time must be nonnegative, got {rate_time}"
        )));
    }
    let value = ((1.0 + (-2.0 * rate_time).exp()) / 2.0).powi(n as i32);
    Ok(FidelityPrediction {
        value,
        asymptote: 0.5f64.powi(n as i32),
    })
}

/// Teleportation fidelity under independent damping:
/// `F = 1/2 + e^{-γk}/2` after `k` swap intervals at gate rate γ.
pub fn teleport_fidelity_independent(gamma_gate: f64, k: usize) -> Result<FidelityPrediction> {
    if gamma_gate < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be nonnegative, got {gamma_gate}"
        )));
    }
    Ok(FidelityPrediction {
        value: 0.5 + 0.5 * (-gamma_gate * k as f64).exp(),
        asymptote: 0.5,
    })
}

/// Baker's-map computation fidelity after `k` forward/backward step pairs
/// under per-gate phase flip at rate γ: `F = exp(-nγN_g) = exp(-2γn³k)`,
/// with the gate budget `N_g = 2n²k`.
pub fn baker_fidelity(n: usize, gamma_gate: f64, k: usize) -> Result<FidelityPrediction> {
    if n < 2 {
        return Err(Error::InvalidQubitCount { min: 2, got: n });
    }
    if gamma_gate < 0.0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "need gamma >= 0 and k >= 1, got gamma {gamma_gate}, k {k}"
        )));
    }
    let nf = n as f64;
    Ok(FidelityPrediction {
        value: (-2.0 * gamma_gate * nf.powi(3) * k as f64).exp(),
        asymptote: 0.0,
    })
}

/// Step pairs until the baker fidelity drops to `target`:
/// `k_f = −ln(target) / (2γn³)`.
pub fn baker_kf(n: usize, gamma_gate: f64, target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) || target == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target fidelity must lie in (0, 1), got {target}"
        )));
    }
    if gamma_gate <= 0.0 {
        return Err(Error::InvalidParameter(
            "gamma must be positive for a finite crossing time".into(),
        ));
    }
    Ok(-target.ln() / (2.0 * gamma_gate * (n as f64).powi(3)))
}

/// Gate budget at the fidelity target: `(N_g)_f = 2n²k_f = −ln(target)/(γn)`.
pub fn baker_gate_budget(n: usize, gamma_gate: f64, target: f64) -> Result<f64> {
    Ok(2.0 * (n as f64).powi(2) * baker_kf(n, gamma_gate, target)?)
}

/// Mean phase-flip decay rate in units of Γ: the binomial average of the
/// per-class rates `2i` is exactly `n`.
pub fn mean_phaseflip_rate(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidQubitCount { min: 1, got: 0 });
    }
    Ok(n as f64)
}
