//! Dyadic decomposition, the paraproduct split of the nonlinearity
//! F(u) = -d/dx u^{k+1}, and space-time norm estimate ratios on an
//! ensemble of linear flows.

use gbo_lab::lp::{
    nonlinear_estimate_ratios, paraproduct_decompose, DyadicDecomposition, SpaceTimeArray,
};
use gbo_lab::solver::InitialData;
use gbo_lab::{SpectralField, TorusGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let k = 6u32;
    let grid = TorusGrid::new(256, 100.0, 4).unwrap();
    let decomp = DyadicDecomposition::with_defaults(&grid, k);
    println!("dyadic bands: {:?}", decomp.band_range());

    // exact split F(u) = G - Pi on random fields
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let data = InitialData::RandomBand {
            amp: rng.gen_range(0.1..1.5),
            modes: rng.gen_range(4..=64),
            seed: rng.gen(),
        };
        let u = data.build(&grid);
        let split = paraproduct_decompose(&u, &decomp, k);
        let resid = split.f_of_u.add(&split.pi_part).sub(&split.g_part).l2_norm()
            / split.f_of_u.l2_norm().max(1e-300);
        worst = worst.max(resid);
    }
    println!("worst paraproduct identity residual over 50 fields = {worst:.3e}");
    assert!(worst < 1e-10, "F + Pi must equal G exactly");

    // estimate ratios on short free evolutions
    let mut ensembles = Vec::new();
    for seed in 0..4u64 {
        let u0 = InitialData::RandomBand {
            amp: 0.4,
            modes: 24,
            seed,
        }
        .build(&grid);
        let times: Vec<f64> = (0..17).map(|i| i as f64 * 0.05).collect();
        let snaps: Vec<SpectralField> = times.iter().map(|&t| u0.linear_propagate(t)).collect();
        ensembles.push(SpaceTimeArray::new(times, snaps).unwrap());
    }
    let report = nonlinear_estimate_ratios(&ensembles, k, 0.1).unwrap();
    println!(
        "Pi ratios: max {:.3e}, median {:.3e}",
        report.pi_max, report.pi_median
    );
    println!(
        "G  ratios: max {:.3e}, median {:.3e}",
        report.g_max, report.g_median
    );
    assert!(report.pi_max.is_finite() && report.g_max.is_finite());
}
