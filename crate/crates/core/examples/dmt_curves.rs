//! Closed-form diversity-multiplexing tradeoffs and a Monte Carlo outage
//! check of the variable-bias schedule.
//!
//!     cargo run --release --example dmt_curves

use lastseq::channel::{dmt_lp_oracle, dmt_mmse_dfe, dmt_optimal, dmt_variable, large_n_bias_exceedance, BiasSchedule};
use lastseq::harness::{run_outage_sweep, OutageRate, RateMode, SimConfig};

fn main() -> lastseq::Result<()> {
    let (m, n) = (2, 2);
    let schedules = [vec![1.0, 1.0], vec![1.5, 0.5], vec![1.2, 0.8], vec![2.0, 0.0]];
    println!("{:>5} {:>7} {:>7} {}", "r", "d*", "d_dfe", schedules.iter().map(|z| format!("{z:>11?}")).collect::<String>());
    for i in 0..=8 {
        let r = i as f64 * 0.25;
        let vals: String = schedules
            .iter()
            .map(|z| format!("{:>11.3}", dmt_variable(r, z, m, n).expect("valid zeta")))
            .collect();
        println!("{r:>5.2} {:>7.3} {:>7.3} {vals}", dmt_optimal(r, m, n)?, dmt_mmse_dfe(r, m, n)?);
    }
    let r = 0.6;
    println!("\nLP grid check at r = {r}, zeta = (1.5, 0.5): closed form {:.4}, grid {:.4}", dmt_variable(r, &[1.5, 0.5], m, n)?, dmt_lp_oracle(r, &[1.5, 0.5], m, n, 0.005));

    // With zeta = (2, 0) the schedule behaves like plain MMSE-DFE detection,
    // so at a fixed rate the outage slope should approach 1.
    let mut cfg = SimConfig::new(2, 2, 3, vec![10.0, 15.0, 20.0, 25.0, 30.0], 100_000);
    cfg.rate = RateMode::FixedBpcu { bpcu: 4.0 };
    cfg.bias = BiasSchedule::Variable { zeta: vec![2.0, 0.0], phi: 0.5 };
    cfg.outage_rate = OutageRate::Scheme;
    let s = run_outage_sweep(&cfg, None)?;
    for p in &s.points {
        println!("{:>5.1} dB  Pr(R_b < R) = {:.3e}", p.snr_db, p.outage_prob);
    }
    println!("fitted outage slope {:?} (predicted 1)", s.slopes.outage);

    println!("\nlarge-N exponent of Pr(b < rho^(kappa/M)), M = 2, kappa = 1, eps = 0.25:");
    for n_rx in [2, 4, 8, 16] {
        println!("  N = {n_rx:>2}: {:.3}", large_n_bias_exceedance(2, n_rx, 1.0, 0.25)?);
    }
    Ok(())
}
