//! Runs the four tree searches on the same MMSE-DFE problems and compares
//! their answers and node counts.
//!
//!     cargo run --release --example decode_compare -- [snr_db] [instances]

use lastseq::channel::sample_rayleigh;
use lastseq::decoders::{babai_decode, fano_decode, sphere_decode, stack_decode, DecoderParams};
use lastseq::frontend::{mmse_dfe_preprocess, transmit};
use lastseq::lattice::NestedLastCode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lastseq::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(14.0, |s| s.parse().expect("snr_db"));
    let instances: usize = args.next().map_or(2000, |s| s.parse().expect("instances"));
    let rho = 10f64.powf(snr_db / 10.0);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let code = NestedLastCode::for_rate(2, 3, 5, 6, 4.0, &mut rng)?;
    let params = DecoderParams::with_bias(0.6);

    let names = ["sphere", "stack", "fano", "babai"];
    let mut errors = [0usize; 4];
    let mut nodes = [0u64; 4];
    let mut agree_with_sphere = [0usize; 4];
    for _ in 0..instances {
        let ch = sample_rayleigh(2, 2, rho, &mut rng);
        let cw = code.encode(&code.random_message(&mut rng))?;
        let y = transmit(&ch, 3, &cw.x, &mut rng);
        let prob = mmse_dfe_preprocess(&code, &ch, &y)?;
        let outs = [sphere_decode(&prob), stack_decode(&prob, &params), fano_decode(&prob, &params), babai_decode(&prob)];
        for (i, o) in outs.iter().enumerate() {
            nodes[i] += o.nodes;
            if o.z_hat.as_deref() != Some(cw.lattice_coords.as_slice()) {
                errors[i] += 1;
            }
            if o.z_hat == outs[0].z_hat {
                agree_with_sphere[i] += 1;
            }
        }
    }

    println!("{instances} frames at {snr_db} dB, M = N = 2, T = 3, R = 4 bpcu, b = 0.6");
    println!("{:>8} {:>10} {:>12} {:>14}", "decoder", "FER", "mean nodes", "same as sphere");
    for i in 0..4 {
        let n = instances as f64;
        println!(
            "{:>8} {:>10.2e} {:>12.1} {:>13.1}%",
            names[i],
            errors[i] as f64 / n,
            nodes[i] as f64 / n,
            100.0 * agree_with_sphere[i] as f64 / n
        );
    }
    Ok(())
}
