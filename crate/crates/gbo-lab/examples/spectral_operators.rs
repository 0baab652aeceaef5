//! Exercise the spectral toolbox: Hilbert transform, fractional and
//! ordinary derivatives, Parseval, and dealiased powers.

use gbo_lab::{SpectralField, TorusGrid};

fn main() {
    let grid = TorusGrid::new(1024, 2.0 * std::f64::consts::PI, 4).unwrap();

    // H(cos) = sin, H(sin) = -cos, H^2 = -I on mean-free fields
    let cos3 = SpectralField::from_fn(&grid, |x| (3.0 * x).cos());
    let sin3 = SpectralField::from_fn(&grid, |x| (3.0 * x).sin());
    let h = cos3.hilbert();
    let resid = h.sub(&sin3).sup_norm();
    println!("|H cos3x - sin3x|_inf      = {resid:.3e}");
    assert!(resid < 1e-12, "Hilbert transform of cos failed");
    let hh = h.hilbert().add(&cos3).sup_norm();
    println!("|H^2 u + u|_inf            = {hh:.3e}");
    assert!(hh < 1e-12, "H^2 should be -I on mean-free data");

    // |D|^1 cos(mx) = m cos(mx); |D|^{1/2} twice composes to |D|
    let d1 = cos3.frac_deriv(1.0).unwrap();
    let resid = d1.sub(&cos3.scale(3.0)).sup_norm();
    println!("||D| cos3x - 3cos3x|_inf   = {resid:.3e}");
    assert!(resid < 1e-12, "|D| eigenvalue mismatch");
    let half_twice = cos3
        .frac_deriv(0.5)
        .unwrap()
        .frac_deriv(0.5)
        .unwrap()
        .sub(&d1)
        .sup_norm();
    println!("||D|^1/2 |D|^1/2 - |D||    = {half_twice:.3e}");
    assert!(half_twice < 1e-12, "fractional derivative composition");

    // d/dx = -H |D| on mean-free fields (H has symbol -i sgn)
    let resid = cos3
        .deriv()
        .add(&cos3.frac_deriv(1.0).unwrap().hilbert())
        .sup_norm();
    println!("|d/dx + H|D||_inf          = {resid:.3e}");
    assert!(resid < 1e-12, "factorization d/dx = -H|D|");

    // Parseval: spectral L2 norm matches physical quadrature
    let u = SpectralField::from_fn(&grid, |x| (-((x - 3.0) * (x - 3.0)) / 0.5).exp());
    let vals = u.values();
    let dx = grid.dx();
    let quad: f64 = vals.iter().map(|v| v * v * dx).sum::<f64>().sqrt();
    let resid = (u.l2_norm() - quad).abs() / quad;
    println!("Parseval relative residual = {resid:.3e}");
    assert!(resid < 1e-12, "Parseval identity");

    // dealiased cube of a two-mode field is exact
    let two = SpectralField::from_fn(&grid, |x| x.cos() + 0.5 * (2.0 * x).sin());
    let (cube, truncated) = two.dealiased_power(3);
    assert!(!truncated, "cube of low-mode data must fit the band");
    let exact = SpectralField::from_fn(&grid, |x| {
        let v = x.cos() + 0.5 * (2.0 * x).sin();
        v * v * v
    });
    let resid = cube.sub(&exact).sup_norm();
    println!("dealiased cube residual    = {resid:.3e}");
    assert!(resid < 1e-12, "dealiased power should be alias-free");

    println!("all operator identities hold");
}
