//! Minimize f(u) = int chi^2 u^{k+1} D_x u over the unit sphere of the
//! homogeneous Sobolev space H^alpha, alpha = 1/2 - 2/(k+2), on a
//! band-limited torus. The infimum should be zero, and the extremizer
//! must satisfy the Lagrange and Pohozaev identities.

use gbo_lab::positivity::{build_problem, extremize, sphere_alpha, ChiSpec};

fn main() {
    for &k in &[4u32, 6] {
        println!("k = {k}, alpha = {}", sphere_alpha(k));
        for &modes in &[4usize, 8] {
            let problem = build_problem(k, modes, ChiSpec::One).unwrap();
            let report = extremize(&problem, 6, 150, 42);
            println!(
                "  N_modes {modes:2}: f_min = {:+.6e}  lagrange {:.2e}  pohozaev ({:.2e}, {:.2e})  converged restarts {}",
                report.f_min,
                report.residuals.lagrange,
                report.residuals.pohozaev1,
                report.residuals.pohozaev2,
                report.restarts
            );
            assert!(report.f_min >= -1e-6, "sphere minimum must be nonnegative");
            assert!(report.residuals.lagrange < 1e-6, "Lagrange condition");
            assert!(report.residuals.pohozaev1 < 1e-6, "first Pohozaev identity");
            assert!(report.residuals.pohozaev2 < 1e-6, "second Pohozaev identity");
        }
    }
    println!("weighted pairing is nonnegative on the constraint sphere");
}
