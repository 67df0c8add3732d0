use qtraj::noise::{NoiseChannel, NoiseModel};
use qtraj::protocols::*;
use qtraj::trajectory::stream_rng;
use std::time::Instant;

fn main() {
    // criterion-5 calibration: shared-model teleport fidelity at n=6 via the
    // oracle across a γ grid; how non-exponential is F̄(γ)?
    let n = 6;
    let s = 4;
    let gammas: Vec<f64> = (1..=10).map(|i| 0.35 * i as f64).collect();
    let mut lnfbar = Vec::new();
    for &gamma in &gammas {
        let channel = NoiseChannel::from_gate_rate(NoiseModel::AmpShared, n, gamma, s).unwrap();
        let setup = TeleportSetup::plus_state(n, channel).unwrap();
        let chain = build_chain_initial(&setup, &mut stream_rng(77, 0)).unwrap();
        let f = teleport_fidelity_oracle(&setup, &chain).unwrap();
        let fbar = f - 0.5;
        lnfbar.push((gamma, fbar.ln()));
        println!("gamma={gamma:.2} F={f:.6} Fbar={fbar:.6}");
    }
    // local slopes of ln F̄ vs γ reveal curvature
    for w in lnfbar.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        println!("slope around gamma {:.2}: {slope:.4}", 0.5 * (w[0].0 + w[1].0));
    }

    // trajectory ensemble cost at n=6, N=2000, one gamma
    let t0 = Instant::now();
    let channel = NoiseChannel::from_gate_rate(NoiseModel::AmpShared, n, 1.4, s).unwrap();
    let setup = TeleportSetup::plus_state(n, channel)
        .unwrap()
        .with_chain_init(ChainInit::Fixed(
            build_chain_initial(
                &TeleportSetup::plus_state(
                    n,
                    NoiseChannel::from_gate_rate(NoiseModel::AmpShared, n, 1.4, s).unwrap(),
                )
                .unwrap(),
                &mut stream_rng(77, 0),
            )
            .unwrap(),
        ));
    let est = teleport_fidelity(&setup, 2000, 999).unwrap();
    println!(
        "traj N=2000 at gamma=1.4: Fbar={:.5}±{:.5} in {:?}",
        est.mean - 0.5,
        est.std_error.unwrap(),
        t0.elapsed()
    );
}
