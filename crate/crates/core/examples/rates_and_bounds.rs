//! Achievable rates under biased decoding and the closed-form complexity
//! quantities.
//!
//!     cargo run --release --example rates_and_bounds

use lastseq::channel::{achievable_rate_rb, awgn_optimal_bias, bias_rate_offset, r_last, sample_rayleigh, variable_bias};
use lastseq::complexity::{avg_complexity_exponent, cutoff_multiplexing_gain, l_out, sphere_complexity_ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lastseq::Result<()> {
    let b = awgn_optimal_bias(0.5);
    println!("AWGN bias for sigma^2 = 0.5: {b:.4}, rate offset {:.4} bits", bias_rate_offset(1, b, 1.0));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = 100.0;
    let ch = sample_rayleigh(2, 2, rho, &mut rng);
    println!("\none 2x2 channel at 20 dB: R_LAST = {:.3} bits", r_last(&ch));
    for b in [0.0, 0.1, 0.6, 2.0, 8.0] {
        println!("  b = {b:>4}: R_b = {:.3}", achievable_rate_rb(&ch, b, 1.0));
    }
    let spec = ch.spectrum();
    for zeta in [[1.0, 1.0], [1.5, 0.5], [2.0, 0.0]] {
        let b = variable_bias(&spec, rho, &zeta, 0.25, 1.0)?;
        println!("  variable bias zeta = {zeta:?}, phi = 1/4: b = {b:.4}, R_b = {:.3}", achievable_rate_rb(&ch, b, 1.0));
    }

    println!("\naverage-complexity exponent l(r), M = N = 2, T = 3:");
    for r in [0.0, 0.5, 1.0, 1.5, 2.0] {
        println!("  r = {r}: l = {:>6.3}, L_out(30 dB) = {:.2}", avg_complexity_exponent(r, 2, 2, 3)?, l_out(r, 2, 2, 3, 1e3)?);
    }
    for (m, n, t) in [(2, 2, 3), (4, 4, 4), (2, 6, 2)] {
        println!("cut-off multiplexing gain M={m} N={n} T={t}: {}", cutoff_multiplexing_gain(m, n, t));
    }
    for snr_db in [20.0, 30.0, 40.0, 60.0] {
        let rho = 10f64.powf(snr_db / 10.0);
        println!("sphere/sequential complexity ratio, 3x3, T = 5, {snr_db} dB: {:.2}", sphere_complexity_ratio(3, 3, 5, rho));
    }
    Ok(())
}
