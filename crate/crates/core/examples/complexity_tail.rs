//! Complexity tail of the MMSE-DFE Stack decoder: Pr(C >= L) with L = rho
//! next to the FER, and the per-trial bounds L and L0.
//!
//!     cargo run --release --example complexity_tail -- [trials]

use lastseq::channel::sample_rayleigh;
use lastseq::complexity::tail_threshold;
use lastseq::frontend::{mmse_dfe_preprocess, transmit};
use lastseq::harness::{run_complexity_sweep, LRule, SimConfig};
use lastseq::lattice::NestedLastCode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lastseq::Result<()> {
    let trials: u64 = std::env::args().nth(1).map_or(20_000, |s| s.parse().expect("trials"));

    let mut cfg = SimConfig::new(2, 2, 3, vec![6.0, 10.0, 14.0, 18.0], trials);
    cfg.code.p = 5;
    cfg.complexity.l_rule = LRule::RhoScaling;
    cfg.seed = 5;
    let (summary, _) = run_complexity_sweep(&cfg, None)?;
    println!("{:>7} {:>10} {:>12} {:>10}", "snr_db", "FER", "Pr(C>=rho)", "mean C");
    for p in &summary.points {
        println!("{:>7.1} {:>10.2e} {:>12.2e} {:>10.1}", p.snr_db, p.fer, p.tail_prob.unwrap_or(0.0), p.mean_nodes);
    }
    println!("slopes: FER {:?}, tail {:?}", summary.slopes.fer, summary.slopes.tail);

    // Bounds for a few individual channel draws.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let code = NestedLastCode::for_rate(2, 3, 5, 6, 4.0, &mut rng)?;
    let rho = 10f64.powf(1.6);
    println!("\nper-trial bounds at 16 dB, b = 0.6:");
    for _ in 0..5 {
        let ch = sample_rayleigh(2, 2, rho, &mut rng);
        let cw = code.encode(&code.random_message(&mut rng))?;
        let prob = mmse_dfe_preprocess(&code, &ch, &transmit(&ch, 3, &cw.x, &mut rng))?;
        let b = tail_threshold(&prob, 0.6, 2, 3, rho);
        println!("  L = {:>12.1}  L0 = {:>14.1}  S_1 = {:.2}  S_12 = {:.3e}", b.l_threshold, b.l0, b.s_k[0], b.s_k[11]);
    }
    Ok(())
}
