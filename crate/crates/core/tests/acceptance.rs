//! Acceptance suite. Every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.
//!
//! Run alone with `cargo test --release --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use lastseq::channel::{
    achievable_rate_rb, bias_rate_offset, dmt_lp_oracle, dmt_mmse_dfe, dmt_variable, r_last, sample_rayleigh, BiasSchedule,
};
use lastseq::complexity::{
    avg_complexity_exponent, cutoff_multiplexing_gain, snr_exponent_fit, sphere_complexity_ratio, tail_threshold,
};
use lastseq::decoders::{babai_decode, brute_force_clps, residual_norm_sq, sphere_decode, stack_decode, DecoderParams};
use lastseq::frontend::{mmse_dfe_preprocess, transmit, DecodingProblem, FrontendKind};
use lastseq::harness::{
    run_complexity_sweep, run_fer_sweep, run_outage_sweep, write_trials_csv, LRule, MaxNodes, OutageRate, RateMode, SimConfig,
    SnrPoint, SweepSummary,
};
use lastseq::lattice::NestedLastCode;
use lastseq::linalg::lower_right;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// FER window over which slopes and gaps are measured.
const WINDOW: (f64, f64) = (1e-4, 1e-1);
const TARGET_ERRORS: u64 = 100;
const MAX_TRIALS: u64 = 1_000_000;
const NODE_LIMIT: u64 = 100_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Upper-triangular problem around a point of `[-4, 4]^m`; conditioned so
/// that the closest point stays well inside `[-8, 8]^m`.
fn random_problem(rng: &mut ChaCha8Rng, m: usize, noise: f64) -> (DecodingProblem, Vec<i64>) {
    let mut r = DMatrix::zeros(m, m);
    for i in 0..m {
        r[(i, i)] = 0.8 + 1.2 * rng.random::<f64>();
        for j in (i + 1)..m {
            r[(i, j)] = 0.4 * rng.sample::<f64, _>(StandardNormal);
        }
    }
    let z: Vec<i64> = (0..m).map(|_| rng.random_range(-4..=4)).collect();
    let zf = DVector::from_iterator(m, z.iter().map(|&v| v as f64));
    let e = DVector::from_fn(m, |_, _| noise * rng.sample::<f64, _>(StandardNormal));
    (DecodingProblem::new(r.clone(), &r * zf + e).unwrap(), z)
}

/// Number of integer points within squared distance `radius_sq` of `y'`,
/// by plain depth-first enumeration with interval bounds per coordinate.
fn count_within(prob: &DecodingProblem, radius_sq: f64) -> usize {
    fn go(r: &DMatrix<f64>, y: &DVector<f64>, i: usize, z: &mut Vec<i64>, partial: f64, radius_sq: f64) -> usize {
        let m = y.len();
        let mut c = y[i];
        for j in (i + 1)..m {
            c -= r[(i, j)] * z[j] as f64;
        }
        c /= r[(i, i)];
        let half = ((radius_sq - partial).max(0.0)).sqrt() / r[(i, i)];
        let mut n = 0;
        for v in (c - half).ceil() as i64..=(c + half).floor() as i64 {
            let e = r[(i, i)] * (v as f64 - c);
            let d = partial + e * e;
            if d > radius_sq {
                continue;
            }
            z[i] = v;
            n += if i == 0 { 1 } else { go(r, y, i - 1, z, d, radius_sq) };
        }
        n
    }
    let m = prob.dim();
    go(&prob.r_upper, &prob.y_prime, m - 1, &mut vec![0; m], 0.0, radius_sq)
}

fn exact_clps() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut agree = 0;
    let total = 500;
    for i in 0..total {
        let m = [2, 4, 6][i % 3];
        let (p, _) = random_problem(&mut rng, m, 0.7);
        let s = sphere_decode(&p).z_hat;
        let b = brute_force_clps(&p, 8).ok();
        if s == b {
            agree += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(agree == total && secs < 60.0, format!("{agree}/{total} agree, {secs:.1} s (limit 60 s)"))
}

fn zero_bias_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut agree, mut total, mut skipped) = (0, 0, 0);
    while total < 200 {
        let m = 2 + (total + skipped) % 7;
        let (p, _) = random_problem(&mut rng, m, 0.9);
        let best = sphere_decode(&p);
        let d = residual_norm_sq(&p, best.z_hat.as_ref().unwrap());
        if count_within(&p, d * (1.0 + 1e-9) + 1e-12) != 1 {
            skipped += 1;
            continue;
        }
        total += 1;
        if stack_decode(&p, &DecoderParams::with_bias(0.0)).z_hat == best.z_hat {
            agree += 1;
        }
    }
    verdict(agree == total, format!("{agree}/{total} unique-minimizer instances agree ({skipped} ties skipped)"))
}

fn huge_bias_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut ok = 0;
    let total = 1000;
    for i in 0..total {
        let m = 2 + i % 11;
        let (p, _) = random_problem(&mut rng, m, 1.0);
        let out = stack_decode(&p, &DecoderParams::with_bias(1e9));
        if out.z_hat == babai_decode(&p).z_hat && out.nodes == m as u64 {
            ok += 1;
        }
    }
    verdict(ok == total, format!("{ok}/{total} return the Babai point with C = m"))
}

fn node_bound() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let code = NestedLastCode::for_rate(2, 3, 5, 6, 4.0, &mut rng).unwrap();
    let (mut checked, mut violations, mut decodes) = (0, 0, 0);
    // Violations left after discounting the one node of the transmitted
    // path that every level must visit.
    let mut off_path_violations = 0;
    let mut worst = 0.0f64;
    for snr_db in [14.0, 16.0, 18.0, 20.0, 22.0] {
        let rho = 10f64.powf(snr_db / 10.0);
        let radius_sq = 6.0 * (1.0 + rho.ln());
        for _ in 0..2000 {
            let ch = sample_rayleigh(2, 2, rho, &mut rng);
            let cw = code.encode(&code.random_message(&mut rng)).unwrap();
            let prob = mmse_dfe_preprocess(&code, &ch, &transmit(&ch, 3, &cw.x, &mut rng)).unwrap();
            let out = stack_decode(&prob, &DecoderParams::with_bias(0.6));
            decodes += 1;
            if residual_norm_sq(&prob, &cw.lattice_coords) > radius_sq {
                continue;
            }
            checked += 1;
            let bounds = tail_threshold(&prob, 0.6, 2, 3, rho);
            let (mut bad, mut bad_off_path) = (false, false);
            for (&visits, &s) in out.visits_per_level.iter().zip(&bounds.s_k) {
                worst = worst.max(visits as f64 / s);
                bad |= visits as f64 > s;
                bad_off_path |= visits.saturating_sub(1) as f64 > s;
            }
            violations += bad as usize;
            off_path_violations += bad_off_path as usize;
        }
    }
    verdict(
        violations == 0,
        format!(
            "{violations} violating trials among {checked} in the noise ball ({decodes} decodes), max visits/bound {worst:.3}; \
             {off_path_violations} when the transmitted-path node is not counted"
        ),
    )
}

fn in_window(p: &SnrPoint) -> bool {
    p.errors > 0 && p.fer >= WINDOW.0 && p.fer <= WINDOW.1
}

fn window_slope(points: &[SnrPoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| in_window(p)).map(|p| (p.rho, p.fer)).collect();
    snr_exponent_fit(&pts).ok()
}

fn base_config(snr_db: Vec<f64>) -> SimConfig {
    let mut cfg = SimConfig::new(2, 2, 3, snr_db, MAX_TRIALS);
    cfg.target_errors = Some(TARGET_ERRORS);
    cfg.max_nodes = MaxNodes::Fixed { limit: NODE_LIMIT };
    cfg.bias = BiasSchedule::Fixed { b: 0.6 };
    cfg.seed = 2024;
    cfg
}

fn fmt_points(points: &[SnrPoint]) -> String {
    points.iter().map(|p| format!("{}:{:.2e}", p.snr_db, p.fer)).collect::<Vec<_>>().join(" ")
}

/// Shared MMSE-DFE run at R = 4 bpcu with `L = rho`, used by several criteria.
fn mmse_reference() -> SweepSummary {
    let mut cfg = base_config(vec![10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0]);
    cfg.complexity.l_rule = LRule::RhoScaling;
    run_complexity_sweep(&cfg, None).unwrap().0
}

fn front_end_comparison(mmse: &SweepSummary) -> Verdict {
    let mut cfg = base_config(vec![10.0, 14.0, 18.0, 22.0, 26.0]);
    cfg.frontend = FrontendKind::Naive;
    let naive = run_fer_sweep(&cfg, None).unwrap().0;
    let s_mmse = window_slope(&mmse.points);
    let s_naive = window_slope(&naive.points);
    let mut separated = true;
    let mut common = 0;
    for n in &naive.points {
        if let Some(m) = mmse.points.iter().find(|m| m.snr_db == n.snr_db) {
            common += 1;
            separated &= m.fer < n.fer && m.fer_interval.hi < n.fer_interval.lo;
        }
    }
    let ok_mmse = s_mmse.is_some_and(|s| (3.0..=5.0).contains(&s));
    let ok_naive = s_naive.is_some_and(|s| (1.3..=2.7).contains(&s));
    verdict(
        ok_mmse && ok_naive && separated && common > 0,
        format!(
            "slope mmse {} (need [3, 5]), naive {} (need [1.3, 2.7]), separated at {common} common points: {separated}; mmse [{}] naive [{}]",
            s_mmse.map_or("n/a".into(), |s| format!("{s:.2}")),
            s_naive.map_or("n/a".into(), |s| format!("{s:.2}")),
            fmt_points(&mmse.points),
            fmt_points(&naive.points)
        ),
    )
}

/// `log10(FER / P_out)` over the FER window, with the outage estimated on
/// an independent, larger channel sample.
fn outage_gaps(fer: &SweepSummary, rate: f64) -> Vec<(f64, f64)> {
    let mut cfg = base_config(fer.points.iter().map(|p| p.snr_db).collect());
    cfg.rate = RateMode::FixedBpcu { bpcu: rate };
    cfg.trials = 2_000_000;
    cfg.target_errors = None;
    cfg.outage_rate = OutageRate::RLast;
    cfg.seed = 77;
    let out = run_outage_sweep(&cfg, None).unwrap();
    fer.points
        .iter()
        .zip(&out.points)
        .filter(|(f, o)| in_window(f) && o.outages >= 10)
        .map(|(f, o)| (f.snr_db, (f.fer / o.outage_prob).log10()))
        .collect()
}

fn outage_tracking(mmse: &SweepSummary) -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    let runs = [
        (4.0, None),
        (8.0, Some(vec![16.0, 18.0, 20.0, 22.0, 24.0, 26.0, 28.0])),
        (10.34, Some(vec![20.0, 22.0, 24.0, 26.0, 28.0, 30.0, 32.0])),
    ];
    for (rate, grid) in runs {
        let fer = match grid {
            None => mmse.clone(),
            Some(g) => {
                let mut cfg = base_config(g);
                cfg.rate = RateMode::FixedBpcu { bpcu: rate };
                run_fer_sweep(&cfg, None).unwrap().0
            }
        };
        let gaps = outage_gaps(&fer, rate);
        let lo = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
        let spread = hi - lo;
        pass &= gaps.len() >= 3 && spread <= 0.5;
        let listed: Vec<String> = gaps.iter().map(|(s, g)| format!("{s}:{g:.2}")).collect();
        details.push(format!("R={rate}: spread {spread:.2} over {} points [{}]", gaps.len(), listed.join(" ")));
    }
    verdict(pass, format!("{} (limit 0.5)", details.join("; ")))
}

fn bias_complexity() -> Verdict {
    let mut means = Vec::new();
    for b in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let mut cfg = base_config(vec![16.0]);
        cfg.trials = 20_000;
        cfg.target_errors = None;
        cfg.bias = BiasSchedule::Fixed { b };
        let (s, _) = run_fer_sweep(&cfg, None).unwrap();
        means.push((b, s.points[0].nodes_interval.clone()));
    }
    let pass = means.windows(2).all(|w| w[1].1.lo <= w[0].1.hi);
    let listed: Vec<String> = means
        .iter()
        .map(|(b, i)| format!("b={b}: {:.2} [{:.2}, {:.2}]", i.estimate, i.lo, i.hi))
        .collect();
    verdict(pass, listed.join(", "))
}

fn tail_slope_match(mmse: &SweepSummary) -> Verdict {
    let common: Vec<&SnrPoint> = mmse
        .points
        .iter()
        .filter(|p| in_window(p) && p.tail_prob.is_some_and(|t| t > 0.0 && t <= WINDOW.1))
        .collect();
    let fer = snr_exponent_fit(&common.iter().map(|p| (p.rho, p.fer)).collect::<Vec<_>>()).ok();
    let tail = snr_exponent_fit(&common.iter().map(|p| (p.rho, p.tail_prob.unwrap())).collect::<Vec<_>>()).ok();
    let listed: Vec<String> = common.iter().map(|p| format!("{}:{:.2e}/{:.2e}", p.snr_db, p.fer, p.tail_prob.unwrap())).collect();
    match (fer, tail) {
        (Some(f), Some(t)) => verdict(
            (f - t).abs() <= 1.0,
            format!("FER slope {f:.2}, Pr(C >= rho) slope {t:.2}, diff {:.2} (limit 1.0) [{}]", (f - t).abs(), listed.join(" ")),
        ),
        _ => verdict(false, format!("fewer than 3 common points [{}]", listed.join(" "))),
    }
}

fn rate_anchors() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let ch = sample_rayleigh(2, 2, 10f64.powf(rng.random_range(0.0..3.0)), &mut rng);
        worst = worst.max((achievable_rate_rb(&ch, 0.0, 1.0) - r_last(&ch)).abs());
    }
    // Independent evaluation of the AWGN surrogate: b = sigma^2 log2(4 / (pi sigma^2)), sigma^2 = 1/2.
    let b = 0.5 * (8.0 / std::f64::consts::PI).log2();
    let offset = bias_rate_offset(1, b, 1.0);
    verdict(
        worst <= 1e-12 && (offset - 1.64).abs() <= 0.01,
        format!("max |R_b(0) - R_LAST| = {worst:.1e}, AWGN offset {offset:.4} (1.64 +- 0.01)"),
    )
}

fn dmt_closed_forms() -> Verdict {
    let step = 0.005;
    let tol = 1e-6 + 4.0 * step;
    let mut worst = 0.0f64;
    for zeta in [[1.0, 1.0], [1.5, 0.5], [2.0, 0.0], [1.2, 0.8]] {
        for i in 0..=40 {
            let r = i as f64 * 0.05;
            let d = dmt_variable(r, &zeta, 2, 2).unwrap();
            worst = worst.max((d - dmt_lp_oracle(r, &zeta, 2, 2, step)).abs());
        }
    }
    let mut example = 0.0f64;
    // All bias on the strongest eigenvalue collapses to the MMSE-DFE curve.
    for i in 0..=40 {
        let r = i as f64 * 0.05;
        let expected = (2.0 - 2.0 + 1.0) * (1.0 - r / 2.0);
        example = example.max((dmt_variable(r, &[2.0, 0.0], 2, 2).unwrap() - expected).abs());
        example = example.max((dmt_mmse_dfe(r, 2, 2).unwrap() - expected).abs());
    }
    verdict(
        worst <= tol && example == 0.0,
        format!("max |closed form - LP grid| {worst:.2e} (limit {tol:.3e}), zeta = (2, 0) vs MMSE-DFE max deviation {example:e}"),
    )
}

fn formula_checks() -> Verdict {
    let c1 = cutoff_multiplexing_gain(2, 2, 3);
    let c2 = cutoff_multiplexing_gain(4, 4, 4);
    let l0 = avg_complexity_exponent(0.0, 2, 2, 3).unwrap();
    let gamma = sphere_complexity_ratio(3, 3, 5, 1e3);

    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = DMatrix::from_fn(8, 8, |_, _| rng.sample::<f64, _>(StandardNormal));
        let g = DMatrix::from_fn(8, 8, |i, j| if i >= j { rng.sample::<f64, _>(StandardNormal) } else { 0.0 });
        let ag = &a * &g;
        for k in 1..=8 {
            let lhs = lower_right(&ag, k).determinant();
            let rhs = lower_right(&a, k).determinant() * lower_right(&g, k).determinant();
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE));
        }
    }
    let pass = c1 == 0 && c2 == 2 && l0 == -4.0 && (gamma - 31.0).abs() <= 2.0 && worst <= 1e-9;
    verdict(
        pass,
        format!("cutoff(2,2,3)={c1}, cutoff(4,4,4)={c2}, l(0)={l0}, gamma={gamma:.2}, det identity rel err {worst:.1e}"),
    )
}

fn determinism() -> Verdict {
    let mut cfg = base_config(vec![8.0, 14.0]);
    cfg.trials = 3000;
    cfg.target_errors = None;
    let a = write_trials_csv(&run_fer_sweep(&cfg, None).unwrap().1);
    let b = write_trials_csv(&run_fer_sweep(&cfg, None).unwrap().1);
    let c = write_trials_csv(&run_fer_sweep(&cfg, Some(1)).unwrap().1);
    cfg.decoder = lastseq::harness::DecoderKind::Fano;
    let d = write_trials_csv(&run_complexity_sweep(&cfg, Some(2)).unwrap().1);
    let e = write_trials_csv(&run_complexity_sweep(&cfg, Some(1)).unwrap().1);
    verdict(
        a == b && a == c && d == e && a != d,
        format!("fer reruns identical: {}, across thread counts: {}, complexity reruns identical: {}", a == b, a == c, d == e),
    )
}

fn main() -> ExitCode {
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected = |id: usize| only.is_empty() || only.contains(&id);
    let start = Instant::now();
    let mut failed = 0;
    let mut ran = 0;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        if !selected(id) {
            return;
        }
        let t = Instant::now();
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {} ({:.1} s)", v.detail, t.elapsed().as_secs_f64());
        failed += !v.pass as usize;
        ran += 1;
    };
    report(1, "exact closest point search", &mut exact_clps);
    report(2, "zero bias matches sphere decoding", &mut zero_bias_equivalence);
    report(3, "huge bias matches Babai with C = m", &mut huge_bias_equivalence);
    report(4, "per-level node bound", &mut node_bound);
    let mmse = [5, 6, 8].into_iter().any(selected).then(mmse_reference);
    let mmse = mmse.as_ref();
    report(5, "MMSE-DFE vs naive FER slopes", &mut || front_end_comparison(mmse.unwrap()));
    report(6, "FER tracks outage at fixed rate", &mut || outage_tracking(mmse.unwrap()));
    report(7, "mean complexity non-increasing in b", &mut bias_complexity);
    report(8, "complexity tail slope matches FER slope", &mut || tail_slope_match(mmse.unwrap()));
    report(9, "achievable-rate anchors", &mut rate_anchors);
    report(10, "DMT closed forms", &mut dmt_closed_forms);
    report(11, "formula unit checks", &mut formula_checks);
    report(12, "determinism", &mut determinism);
    println!("{failed} of {ran} criteria failed, {:.0} s total", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
