//! Performance-complexity tradeoff of the bias term (Figs. 5 and 6 setting).
//!
//!     cargo run --release --example bias_tradeoff -- [trials]

use lastseq::channel::BiasSchedule;
use lastseq::harness::{run_fer_sweep, SimConfig};

fn main() -> lastseq::Result<()> {
    let trials: u64 = std::env::args().nth(1).map_or(5_000, |s| s.parse().expect("trials"));
    println!("{:>6} {:>8} {:>10} {:>10} {:>10}", "b", "snr_db", "FER", "mean C", "95% hi");
    for b in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 1e9] {
        let mut cfg = SimConfig::new(2, 2, 3, vec![12.0, 16.0, 20.0], trials);
        cfg.code.p = 5;
        cfg.bias = BiasSchedule::Fixed { b };
        cfg.seed = 4;
        let (summary, _) = run_fer_sweep(&cfg, None)?;
        for p in &summary.points {
            println!("{b:>6} {:>8.1} {:>10.2e} {:>10.2} {:>10.2}", p.snr_db, p.fer, p.mean_nodes, p.nodes_interval.hi);
        }
    }
    Ok(())
}
