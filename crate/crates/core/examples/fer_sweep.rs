//! MMSE-DFE vs naive front-end FER sweep at M = N = 2, T = 3, R = 4 bpcu,
//! b = 0.6 (the Fig. 3 setting at desk scale).
//!
//!     cargo run --release --example fer_sweep -- [trials] [out_dir]

use lastseq::frontend::FrontendKind;
use lastseq::harness::{emit_outputs, run_fer_sweep, MaxNodes, SimConfig};

fn main() -> lastseq::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: u64 = args.next().map_or(20_000, |s| s.parse().expect("trials"));
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "out/fer".into()));

    for frontend in [FrontendKind::MmseDfe, FrontendKind::Naive] {
        let mut cfg = SimConfig::new(2, 2, 3, vec![8.0, 12.0, 16.0, 20.0, 24.0], trials);
        cfg.frontend = frontend;
        cfg.code.p = 5;
        cfg.target_errors = Some(100);
        cfg.max_nodes = MaxNodes::Fixed { limit: 100_000 };
        cfg.seed = 11;
        let (summary, records) = run_fer_sweep(&cfg, None)?;
        println!("{}:", frontend.name());
        for p in &summary.points {
            println!(
                "  {:>5.1} dB  FER {:.3e} [{:.2e}, {:.2e}]  outage {:.2e}  mean C {:.1}",
                p.snr_db, p.fer, p.fer_interval.lo, p.fer_interval.hi, p.outage_prob, p.mean_nodes
            );
        }
        match summary.slopes.fer {
            Some(s) => println!("  fitted FER slope {s:.2}"),
            None => println!("  too few points with errors for a slope"),
        }
        emit_outputs(&summary, &records, &out.join(frontend.name()))?;
    }
    println!("plot data under {}", out.display());
    Ok(())
}
