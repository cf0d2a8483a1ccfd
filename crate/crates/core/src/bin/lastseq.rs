//! Command-line front end for the sweeps in `lastseq::harness`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lastseq::channel::{dmt_mmse_dfe, dmt_optimal, dmt_variable};
use lastseq::harness::{emit_outputs, run_complexity_sweep, run_fer_sweep, run_outage_sweep, build_code, SimConfig, SweepSummary};
use lastseq::Error;

#[derive(Parser)]
#[command(name = "lastseq", version, about = "Lattice sequential decoding of LAST-coded MIMO channels")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML sweep configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trials per SNR point (overrides the config).
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Frame error rate sweep.
    Fer,
    /// Complexity tail sweep.
    Complexity,
    /// Channel-only outage sweep.
    Outage,
    /// Closed-form DMT curves as plot data.
    DmtCurve {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Variable-bias coefficients, comma separated.
        #[arg(long, value_delimiter = ',')]
        zeta: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Build a nested LAST code and write it as TOML.
    CodeGen {
        #[arg(long)]
        m_tx: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        k_info: Option<usize>,
        /// Rate in bits per channel use.
        #[arg(long)]
        rate: Option<f64>,
    },
}

fn load_config(g: &Global) -> Result<SimConfig, Error> {
    let path = g.config.as_ref().ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let mut cfg = SimConfig::load(path)?;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(g: &Global) -> PathBuf {
    g.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn report(summary: &SweepSummary, written: &[PathBuf]) {
    println!("{:>8} {:>9} {:>8} {:>11} {:>11} {:>10}", "snr_db", "trials", "errors", "fer", "outage", "mean_C");
    for p in &summary.points {
        println!(
            "{:>8.2} {:>9} {:>8} {:>11.3e} {:>11.3e} {:>10.1}",
            p.snr_db, p.trials, p.errors, p.fer, p.outage_prob, p.mean_nodes
        );
    }
    let s = &summary.slopes;
    let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
    println!("slopes: fer {} outage {} tail {}", show(s.fer), show(s.outage), show(s.tail));
    for w in written {
        println!("wrote {}", w.display());
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io { path: parent.into(), source: e })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn run(cli: Cli) -> Result<(), Error> {
    let g = &cli.global;
    match cli.command {
        Command::Fer | Command::Complexity => {
            let cfg = load_config(g)?;
            let (summary, records) = match cli.command {
                Command::Fer => run_fer_sweep(&cfg, g.threads)?,
                _ => run_complexity_sweep(&cfg, g.threads)?,
            };
            let written = emit_outputs(&summary, &records, &out_dir(g))?;
            report(&summary, &written);
        }
        Command::Outage => {
            let cfg = load_config(g)?;
            let summary = run_outage_sweep(&cfg, g.threads)?;
            let written = emit_outputs(&summary, &[], &out_dir(g))?;
            report(&summary, &written);
        }
        Command::DmtCurve { m, n, zeta, step } => {
            if !(step > 0.0) {
                return Err(Error::Config(format!("step {step} must be positive")));
            }
            let zeta = if zeta.is_empty() { vec![1.0; m] } else { zeta };
            let mut text = format!("# r d_optimal d_mmse_dfe d_variable zeta={zeta:?}\n");
            let steps = (m.min(n) as f64 / step).round() as usize;
            for i in 0..=steps {
                let r = (i as f64 * step).min(m.min(n) as f64);
                let var = dmt_variable(r.min(m as f64), &zeta, m, n).map_err(|e| Error::Config(e.to_string()))?;
                text += &format!("{r} {} {} {var}\n", dmt_optimal(r, m, n)?, dmt_mmse_dfe(r, m, n)?);
            }
            match &g.out {
                Some(dir) => {
                    let path = dir.join("plotdata").join("dmt.dat");
                    write_file(&path, &text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
        Command::CodeGen { m_tx, t, p, k_info, rate } => {
            let mut cfg = match &g.config {
                Some(_) => load_config(g)?,
                None => SimConfig::new(2, 2, 3, vec![0.0], 1),
            };
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            cfg.m_tx = m_tx.unwrap_or(cfg.m_tx);
            cfg.n_rx = cfg.n_rx.max(cfg.m_tx);
            cfg.t = t.unwrap_or(cfg.t);
            cfg.code.p = p.unwrap_or(cfg.code.p);
            cfg.code.k_info = k_info.unwrap_or(cfg.code.k_info);
            cfg.code.path = None;
            if let Some(r) = rate {
                cfg.rate = lastseq::harness::RateMode::FixedBpcu { bpcu: r };
            }
            cfg.validate()?;
            let code = build_code(&cfg)?;
            let text = code.to_text();
            match &g.out {
                Some(dir) => {
                    let path = dir.join("code.toml");
                    write_file(&path, &text)?;
                    println!("wrote {} (rate {} bpcu, fingerprint {})", path.display(), code.rate_bpcu(), code.fingerprint());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Parameter(_) | Error::Parse { .. } | Error::Unsupported(_) => 2,
                Error::Io { .. } => 3,
                _ => 1,
            })
        }
    }
}
