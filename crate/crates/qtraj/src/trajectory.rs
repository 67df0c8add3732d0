//! The Monte Carlo wave-function loop and ensemble averaging.
//!
//! Each trajectory owns an RNG stream keyed by `(master_seed, trajectory
//! index)`, so ensembles are reproducible bit-for-bit regardless of worker
//! count or evaluation order. Per noise sub-step one uniform variate ε decides
//! between the jump operators (cumulative intervals, closed on the left) and
//! the no-jump drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{apply_gate, GateOp};
use crate::error::{Error, Result};
use crate::noise::{JumpOutcome, NoiseChannel};
use crate::state::{DensityMatrix, StateVector};

/// Ensemble configuration: channel, trajectory count, and master seed.
#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub channel: NoiseChannel,
    pub n_trajectories: usize,
    pub master_seed: u64,
}

impl TrajectoryConfig {
    pub fn new(channel: NoiseChannel, n_trajectories: usize, master_seed: u64) -> Result<Self> {
        if n_trajectories == 0 {
            return Err(Error::InvalidParameter(
                "n_trajectories must be positive".into(),
            ));
        }
        Ok(Self {
            channel,
            n_trajectories,
            master_seed,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.channel.n_qubits()
    }

    pub fn sub_steps(&self) -> usize {
        self.channel.sub_steps_per_gate()
    }
}

/// Mean and standard error of an ensemble observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleEstimate {
    pub mean: f64,
    /// Sample standard deviation over √N; undefined for a single sample.
    pub std_error: Option<f64>,
    pub n_samples: usize,
}

impl EnsembleEstimate {
    /// Reduce samples in index order (bit-stable across worker counts).
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n >= 2 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (n as f64 - 1.0);
            Some((var / n as f64).sqrt())
        } else {
            None
        };
        Self {
            mean,
            std_error,
            n_samples: n,
        }
    }
}

/// One step of an interleaved gate/noise program.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleStep {
    Gate(GateOp),
    /// One gate-level noise interval: `sub_steps_per_gate` stochastic sub-steps.
    Noise,
}

/// An interleaved gate/noise program.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    steps: Vec<ScheduleStep>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_gate(&mut self, gate: GateOp) {
        self.steps.push(ScheduleStep::Gate(gate));
    }

    pub fn push_noise(&mut self) {
        self.steps.push(ScheduleStep::Noise);
    }

    /// `count` consecutive noise intervals.
    pub fn noise_intervals(count: usize) -> Self {
        Self {
            steps: vec![ScheduleStep::Noise; count],
        }
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The RNG stream for trajectory `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One stochastic noise sub-step: sample ε, jump or drift, renormalize.
pub fn noise_sub_step<R: Rng + ?Sized>(
    state: &mut StateVector,
    channel: &NoiseChannel,
    rng: &mut R,
) -> Result<JumpOutcome> {
    let dp = channel.jump_probabilities(state)?;
    let total: f64 = dp.iter().sum();
    let eps: f64 = rng.gen();
    if total > 0.0 && eps <= total {
        // cumulative intervals: μ is the first operator whose upper boundary
        // reaches ε, skipping zero-probability operators
        let mut acc = 0.0;
        for (l, &p) in dp.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc += p;
            if eps <= acc {
                let mu = l + 1;
                channel.apply_jump(state, mu)?;
                return Ok(JumpOutcome::Jump { mu });
            }
        }
        // ε landed within `total` but rounding pushed it past the last
        // accumulated boundary: take the last nonzero operator
        let mu = dp.iter().rposition(|&p| p > 0.0).unwrap() + 1;
        channel.apply_jump(state, mu)?;
        return Ok(JumpOutcome::Jump { mu });
    }
    if total >= 1.0 {
        return Err(Error::RateTooLarge {
            gamma: channel.gamma(),
            n_qubits: channel.n_qubits(),
        });
    }
    channel.apply_no_jump(state)?;
    Ok(JumpOutcome::NoJump)
}

/// One full noise interval: `sub_steps_per_gate` sub-steps.
pub fn noise_interval<R: Rng + ?Sized>(
    state: &mut StateVector,
    channel: &NoiseChannel,
    rng: &mut R,
) -> Result<()> {
    for _ in 0..channel.sub_steps_per_gate() {
        noise_sub_step(state, channel, rng)?;
    }
    Ok(())
}

/// Run one trajectory through a schedule with a caller-provided RNG.
pub fn run_trajectory_with_rng<R: Rng + ?Sized>(
    initial: &StateVector,
    schedule: &Schedule,
    channel: &NoiseChannel,
    rng: &mut R,
) -> Result<StateVector> {
    let mut state = initial.clone();
    for step in schedule.steps() {
        match step {
            ScheduleStep::Gate(gate) => apply_gate(&mut state, gate)?,
            ScheduleStep::Noise => noise_interval(&mut state, channel, rng)?,
        }
    }
    Ok(state)
}

/// Run the trajectory with the stream keyed by `(master_seed, index)`.
pub fn run_trajectory(
    initial: &StateVector,
    schedule: &Schedule,
    config: &TrajectoryConfig,
    trajectory_index: u64,
) -> Result<StateVector> {
    let mut rng = stream_rng(config.master_seed, trajectory_index);
    run_trajectory_with_rng(initial, schedule, &config.channel, &mut rng)
}

/// Evaluate `per_trajectory` for every index in parallel, collecting results
/// in trajectory order.
pub fn ensemble_samples<T, F>(n_trajectories: usize, per_trajectory: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n_trajectories as u64)
        .into_par_iter()
        .map(per_trajectory)
        .collect()
}

/// Ensemble mean and standard error of a scalar observable at schedule end.
pub fn ensemble_observable<F>(
    initial: &StateVector,
    schedule: &Schedule,
    config: &TrajectoryConfig,
    observable: F,
) -> Result<EnsembleEstimate>
where
    F: Fn(&StateVector) -> f64 + Sync,
{
    let samples = ensemble_samples(config.n_trajectories, |i| {
        let state = run_trajectory(initial, schedule, config, i)?;
        Ok(observable(&state))
    })?;
    Ok(EnsembleEstimate::from_samples(&samples))
}

/// Ensemble estimates of a vector observable, one estimate per component.
pub fn ensemble_observables_vec<F>(
    initial: &StateVector,
    schedule: &Schedule,
    config: &TrajectoryConfig,
    observable: F,
) -> Result<Vec<EnsembleEstimate>>
where
    F: Fn(&StateVector) -> Vec<f64> + Sync,
{
    let rows = ensemble_samples(config.n_trajectories, |i| {
        let state = run_trajectory(initial, schedule, config, i)?;
        Ok(observable(&state))
    })?;
    let width = rows.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(width);
    let mut column = vec![0.0; rows.len()];
    for k in 0..width {
        for (i, row) in rows.iter().enumerate() {
            column[i] = row[k];
        }
        out.push(EnsembleEstimate::from_samples(&column));
    }
    Ok(out)
}

/// Trajectory-averaged density matrix with a per-entry standard error.
///
/// Returns `(mean of |φ_i⟩⟨φ_i|, entrywise SE)` where the SE of an entry
/// combines the real and imaginary sample variances. Accumulation runs over
/// fixed-size blocks reduced in order, so results do not depend on the
/// worker count.
pub fn ensemble_density_matrix(
    initial: &StateVector,
    schedule: &Schedule,
    config: &TrajectoryConfig,
) -> Result<(DensityMatrix, nalgebra::DMatrix<f64>)> {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    const BLOCK: usize = 64;
    let n_traj = config.n_trajectories;
    let dim = initial.dim();
    let n_blocks = n_traj.div_ceil(BLOCK);

    struct Partial {
        sum: nalgebra::DMatrix<num_complex::Complex64>,
        sum_sq: nalgebra::DMatrix<f64>, // per-entry |z|² accumulator
    }

    let partials: Vec<Partial> = (0..n_blocks)
        .into_par_iter()
        .map(|b| -> Result<Partial> {
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(n_traj);
            let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
            let mut sum_sq = DMatrix::<f64>::zeros(dim, dim);
            for i in lo..hi {
                let state = run_trajectory(initial, schedule, config, i as u64)?;
                let amps = state.amplitudes();
                for (j, aj) in amps.iter().enumerate() {
                    for (k, ak) in amps.iter().enumerate() {
                        let z = aj * ak.conj();
                        sum[(j, k)] += z;
                        sum_sq[(j, k)] += z.norm_sqr();
                    }
                }
            }
            Ok(Partial { sum, sum_sq })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
    let mut sum_sq = DMatrix::<f64>::zeros(dim, dim);
    for p in partials {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }

    let nf = n_traj as f64;
    let mean = sum.map(|z| z / nf);
    let se = DMatrix::from_fn(dim, dim, |j, k| {
        if n_traj < 2 {
            return f64::NAN;
        }
        let var = (sum_sq[(j, k)] - mean[(j, k)].norm_sqr() * nf) / (nf - 1.0);
        (var.max(0.0) / nf).sqrt()
    });
    let rho = DensityMatrix::from_elements(initial.n_qubits(), mean)?;
    Ok((rho, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{NoiseModel, NoiseParams};
    use crate::state::random_state;
    use crate::circuits::baker_sequence;

    fn channel(model: NoiseModel, n: usize, gamma: f64, s: usize) -> NoiseChannel {
        NoiseChannel::new(
            model,
            n,
            NoiseParams {
                gamma,
                sub_steps_per_gate: s,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_rate_never_jumps() {
        let ch = channel(NoiseModel::AmpShared, 2, 0.0, 1);
        let s0 = random_state(2, &mut stream_rng(1, 0)).unwrap();
        let mut s = s0.clone();
        let mut rng = stream_rng(2, 0);
        for _ in 0..50 {
            let out = noise_sub_step(&mut s, &ch, &mut rng).unwrap();
            assert_eq!(out, JumpOutcome::NoJump);
        }
        for (a, e) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn saturated_phase_flip_always_jumps_uniformly() {
        let n = 4;
        let ch = channel(NoiseModel::PhaseFlip, n, 1.0 / n as f64, 1);
        let s = random_state(n, &mut stream_rng(3, 0)).unwrap();
        let mut counts = vec![0usize; n];
        let mut rng = stream_rng(4, 0);
        let trials = 4000;
        for _ in 0..trials {
            let mut state = s.clone();
            match noise_sub_step(&mut state, &ch, &mut rng).unwrap() {
                JumpOutcome::Jump { mu } => counts[mu - 1] += 1,
                JumpOutcome::NoJump => panic!("dp = 1 must always jump"),
            }
        }
        let expect = trials as f64 / n as f64;
        let sigma = (expect * (1.0 - 1.0 / n as f64)).sqrt();
        for (l, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 5.0 * sigma,
                "qubit {l} count {c} vs {expect}"
            );
        }
    }

    #[test]
    fn jump_frequency_matches_rate() {
        // single excited qubit at γ = 0.5: empirical jump rate within
        // binomial error of 0.5
        let ch = channel(NoiseModel::AmpShared, 1, 0.5, 1);
        let mut rng = stream_rng(5, 0);
        let trials = 10_000;
        let mut jumps = 0;
        for _ in 0..trials {
            let mut state = StateVector::basis(1, 1).unwrap();
            if let JumpOutcome::Jump { .. } = noise_sub_step(&mut state, &ch, &mut rng).unwrap() {
                jumps += 1;
            }
        }
        let freq = jumps as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.015, "frequency {freq}");
    }

    #[test]
    fn empty_schedule_returns_initial() {
        let ch = channel(NoiseModel::PhaseFlip, 3, 0.01, 1);
        let config = TrajectoryConfig::new(ch, 4, 9).unwrap();
        let s0 = random_state(3, &mut stream_rng(10, 0)).unwrap();
        let out = run_trajectory(&s0, &Schedule::new(), &config, 0).unwrap();
        assert_eq!(out, s0);
    }

    #[test]
    fn noiseless_schedule_equals_direct_circuit() {
        let n = 4;
        let ch = channel(NoiseModel::PhaseFlip, n, 0.0, 1);
        let config = TrajectoryConfig::new(ch, 2, 11).unwrap();
        let s0 = random_state(n, &mut stream_rng(12, 0)).unwrap();

        let seq = baker_sequence(n, crate::circuits::BakerDirection::Forward).unwrap();
        let mut schedule = Schedule::new();
        for op in seq.ops() {
            schedule.push_gate(*op);
            schedule.push_noise();
        }
        let traj = run_trajectory(&s0, &schedule, &config, 0).unwrap();

        let mut direct = s0.clone();
        crate::circuits::apply_sequence(&mut direct, &seq).unwrap();
        for (a, e) in traj.amplitudes().iter().zip(direct.amplitudes()) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_decay_matches_exact_iteration() {
        // P(|1⟩) after k sub-steps at rate γ must follow (1−γ)^k
        let gamma = 0.05;
        let k = 20;
        let ch = channel(NoiseModel::AmpShared, 1, gamma, 1);
        let config = TrajectoryConfig::new(ch, 2000, 77).unwrap();
        let s0 = StateVector::basis(1, 1).unwrap();
        let schedule = Schedule::noise_intervals(k);
        let est = ensemble_observable(&s0, &schedule, &config, |s| {
            s.qubit_up_probability(0).unwrap()
        })
        .unwrap();
        let exact = (1.0f64 - gamma).powi(k as i32);
        let se = est.std_error.unwrap().max(1e-12);
        assert!(
            (est.mean - exact).abs() < 3.0 * se,
            "mean {} exact {} se {}",
            est.mean,
            exact,
            se
        );
    }

    #[test]
    fn ensemble_is_deterministic_and_order_free() {
        let ch = channel(NoiseModel::AmpIndependent, 3, 0.04, 2);
        let config = TrajectoryConfig::new(ch, 64, 123).unwrap();
        let s0 = StateVector::basis(3, 0b111).unwrap();
        let schedule = Schedule::noise_intervals(5);
        let obs = |s: &StateVector| s.qubit_up_probability(2).unwrap();
        let a = ensemble_observable(&s0, &schedule, &config, obs).unwrap();
        let b = ensemble_observable(&s0, &schedule, &config, obs).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(
            a.std_error.unwrap().to_bits(),
            b.std_error.unwrap().to_bits()
        );

        // reversing evaluation order must not change anything
        let samples: Vec<f64> = {
            let mut idx: Vec<u64> = (0..64).collect();
            idx.reverse();
            let mut out = vec![0.0; 64];
            for i in idx {
                let st = run_trajectory(&s0, &schedule, &config, i).unwrap();
                out[i as usize] = obs(&st);
            }
            out
        };
        let c = EnsembleEstimate::from_samples(&samples);
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn constant_observable_has_zero_error() {
        let ch = channel(NoiseModel::PhaseFlip, 2, 0.05, 1);
        let config = TrajectoryConfig::new(ch, 32, 5).unwrap();
        let s0 = StateVector::basis(2, 0).unwrap();
        let schedule = Schedule::noise_intervals(3);
        let est = ensemble_observable(&s0, &schedule, &config, |_| 1.0).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, Some(0.0));
    }

    #[test]
    fn single_sample_std_error_is_undefined() {
        let est = EnsembleEstimate::from_samples(&[0.7]);
        assert_eq!(est.mean, 0.7);
        assert!(est.std_error.is_none());
    }

    #[test]
    fn intermediate_states_stay_normalized() {
        let n = 3;
        let ch = channel(NoiseModel::AmpShared, n, 0.3, 1);
        let mut rng = stream_rng(31, 7);
        let mut state = StateVector::basis(n, 0b111).unwrap();
        for _ in 0..40 {
            noise_sub_step(&mut state, &ch, &mut rng).unwrap();
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn std_error_scales_as_inverse_sqrt() {
        let gamma = 0.1;
        let ch = channel(NoiseModel::AmpShared, 1, gamma, 1);
        let s0 = StateVector::basis(1, 1).unwrap();
        let schedule = Schedule::noise_intervals(10);
        let mut points = Vec::new();
        for &n_traj in &[100usize, 400, 1600] {
            let config = TrajectoryConfig::new(ch.clone(), n_traj, 999).unwrap();
            let est = ensemble_observable(&s0, &schedule, &config, |s| {
                s.qubit_up_probability(0).unwrap()
            })
            .unwrap();
            points.push(((n_traj as f64).ln(), est.std_error.unwrap().ln()));
        }
        let (slope, _) = crate::stats::linear_fit(
            &points.iter().map(|p| p.0).collect::<Vec<_>>(),
            &points.iter().map(|p| p.1).collect::<Vec<_>>(),
        );
        assert!(
            (slope + 0.5).abs() < 0.1,
            "std_error scaling slope {slope}"
        );
    }

    #[test]
    fn averaged_density_matrix_matches_small_oracle() {
        // 1-qubit amplitude damping for a handful of steps
        let gamma = 0.2;
        let steps = 4;
        let ch = channel(NoiseModel::AmpShared, 1, gamma, 1);
        let config = TrajectoryConfig::new(ch.clone(), 4000, 2024).unwrap();
        let s0 = StateVector::basis(1, 1).unwrap();
        let schedule = Schedule::noise_intervals(steps);
        let (rho, se) = ensemble_density_matrix(&s0, &schedule, &config).unwrap();

        let p1 = (1.0f64 - gamma).powi(steps as i32);
        assert!((rho.elements()[(1, 1)].re - p1).abs() < 5.0 * se[(1, 1)] + 1e-9);
        assert!((rho.elements()[(0, 0)].re - (1.0 - p1)).abs() < 5.0 * se[(0, 0)] + 1e-9);
    }
}
