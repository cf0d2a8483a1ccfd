//! Builds nested LAST codes for the three Fig. 4 rates, prints their
//! geometry and writes one to disk.
//!
//!     cargo run --release --example code_gen -- [out.toml]

use lastseq::harness::code_radius_ratio;
use lastseq::lattice::{geometry, LatticeBasis, NestedLastCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lastseq::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "code.toml".into());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let code = NestedLastCode::for_rate(2, 3, 5, 6, 4.0, &mut rng)?;

    let geo = geometry(&LatticeBasis::new(code.coding_generator().clone())?)?;
    println!("coding lattice: volume {:.4e}, r_eff {:.4}, r_pack {:.4}, ratio {:.4}", geo.volume, geo.r_eff, geo.r_pack, geo.radius_ratio());

    // The nesting ratio is the only thing that changes between rates.
    for rate in [4.0, 8.0, 10.34] {
        let c = code.renested(lastseq::lattice::nesting_ratio_for_bits(rate * 3.0, code.dim())?)?;
        println!(
            "target {rate:>5} bpcu -> q = {}, 2^{:.2} codewords, rate {:.3} bpcu, ratio {:.4}",
            c.nesting_ratio,
            c.codebook_bits(),
            c.rate_bpcu(),
            code_radius_ratio(&c)?
        );
    }

    let energy: f64 = (0..2000)
        .map(|_| code.encode(&code.random_message(&mut rng)).map(|cw| cw.x.norm_squared()))
        .sum::<lastseq::Result<f64>>()?
        / 2000.0;
    println!("mean codeword energy {energy:.3} (power constraint MT = 6)");

    code.save(std::path::Path::new(&out))?;
    let back = NestedLastCode::load(std::path::Path::new(&out))?;
    assert_eq!(back.fingerprint(), code.fingerprint());
    println!("wrote {out} (fingerprint {})", code.fingerprint());
    Ok(())
}
