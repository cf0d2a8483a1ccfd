use super::{DecodeOutcome, SchnorrEuchner, Tree};
use crate::frontend::DecodingProblem;

/// Successive cancellation (Babai nearest plane): decide the last coordinate
/// first and round each center in turn. Always visits exactly `m` nodes.
pub fn babai_decode(prob: &DecodingProblem) -> DecodeOutcome {
    let tree = Tree::new(prob);
    let m = tree.m;
    let mut out = DecodeOutcome::new(m);
    let mut z = vec![0i64; m];
    for level in 1..=m {
        let i = tree.index(level);
        let c = tree.center(i, &z);
        z[i] = SchnorrEuchner::round(c);
        out.nodes += 1;
        out.metric_evals += 1;
        out.visits_per_level[level - 1] = 1;
    }
    out.z_hat = Some(z);
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{random_problem, rng};
    use super::super::{residual_norm_sq, sphere_decode};
    use super::*;

    #[test]
    fn noiseless_and_count() {
        let mut g = rng(40);
        for m in [1, 5, 12] {
            let (p, z) = random_problem(&mut g, m, 0.0);
            let out = babai_decode(&p);
            assert_eq!(out.z_hat, Some(z));
            assert_eq!(out.nodes, m as u64);
        }
    }

    #[test]
    fn equals_sphere_when_optimal() {
        let mut g = rng(41);
        let mut checked = 0;
        for _ in 0..300 {
            let (p, _) = random_problem(&mut g, 5, 0.7);
            let bab = babai_decode(&p).z_hat.unwrap();
            let sph = sphere_decode(&p).z_hat.unwrap();
            let (db, ds) = (residual_norm_sq(&p, &bab), residual_norm_sq(&p, &sph));
            assert!(db >= ds - 1e-12);
            if (db - ds).abs() <= 1e-12 {
                assert_eq!(bab, sph);
                checked += 1;
            }
            assert_eq!(babai_decode(&p).nodes, 5);
        }
        assert!(checked > 50);
    }
}
