//! Localization weights: a smooth even cutoff `chi` that is 1 on
//! `[-R, R]` and vanishes outside `[-(R+R1), R+R1]`, together with the odd
//! truncated-identity weight `Phi(x) = (1/R) \int_0^x (chi^2 * chi^2)(s) ds`.
//!
//! `Phi` grows like `x` through the core and saturates at
//! `(\int chi^2)^2 / (2R)`; its third derivative decays like `1/R1^2`,
//! which drives all the error-budget bounds downstream.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;

/// Sampled weight family on a grid. All arrays are indexed by grid point,
/// i.e. entry `m` is the weight evaluated at the wrapped coordinate of
/// `x_m` (so index 0 is the center `x = 0`).
pub struct WeightFamily {
    grid: Arc<TorusGrid>,
    r: f64,
    r1: f64,
    chi: Vec<f64>,
    chi1: Vec<f64>,
    chi2: Vec<f64>,
    /// `(chi^2)''`, the modulus controlling the positivity correction.
    chi_sq_d2: Vec<f64>,
    phi: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    phi3: Vec<f64>,
}

/// `exp(-1/s)` glued to zero: the standard smooth transition ingredient.
fn bump_half(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth monotone step: 0 for `s <= 0`, 1 for `s >= 1`.
fn smoothstep(s: f64) -> f64 {
    let a = bump_half(s);
    let b = bump_half(1.0 - s);
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

fn chi_template(x: f64, r: f64, r1: f64) -> f64 {
    let t = x.abs();
    if t <= r {
        1.0
    } else if t >= r + r1 {
        0.0
    } else {
        smoothstep((r + r1 - t) / r1)
    }
}

impl WeightFamily {
    /// Build the sampled family. Requires `R1 < R` and `R + R1 < L/4` so
    /// that the support of `chi^2 * chi^2` fits inside half the torus.
    pub fn build(grid: &Arc<TorusGrid>, r: f64, r1: f64) -> Result<Self> {
        let l = grid.domain_length();
        if !(r > 0.0 && r1 > 0.0 && r1 < r) || r + r1 >= l / 4.0 {
            return Err(Error::WeightsTooLarge(r + r1));
        }
        let n = grid.len();
        let dx = grid.dx();
        // finite-difference step for the analytic template; scaled to the
        // transition width so the third-derivative roundoff stays benign
        let h = r1 * 1e-4;
        let chi_at = |x: f64| chi_template(x, r, r1);
        let mut chi = Vec::with_capacity(n);
        let mut chi1 = Vec::with_capacity(n);
        let mut chi2 = Vec::with_capacity(n);
        let mut chi_sq_d2 = Vec::with_capacity(n);
        for m in 0..n {
            let x = grid.wrap(m as f64 * dx);
            chi.push(chi_at(x));
            chi1.push((chi_at(x + h) - chi_at(x - h)) / (2.0 * h));
            chi2.push((chi_at(x + h) - 2.0 * chi_at(x) + chi_at(x - h)) / (h * h));
            let sq = |y: f64| chi_at(y) * chi_at(y);
            chi_sq_d2.push((sq(x + h) - 2.0 * sq(x) + sq(x - h)) / (h * h));
        }
        // Phi' = (chi^2 * chi^2) / R via circular convolution; the support
        // condition keeps the periodization exact.
        let w: Vec<Complex64> = chi
            .iter()
            .map(|&c| Complex64::new(c * c, 0.0))
            .collect();
        let pair = grid.fft(n);
        let mut buf = w;
        pair.forward.process(&mut buf);
        for c in buf.iter_mut() {
            *c = *c * *c;
        }
        pair.inverse.process(&mut buf);
        let phi1: Vec<f64> = buf
            .iter()
            .map(|c| c.re / n as f64 * dx / r)
            .collect();
        // Phi by cumulative trapezoid on the positive half, mirrored odd.
        let mut phi = vec![0.0; n];
        for m in 1..=n / 2 {
            phi[m % n] = phi[m - 1] + dx * 0.5 * (phi1[m - 1] + phi1[m % n]);
        }
        for m in n / 2 + 1..n {
            phi[m] = -phi[n - m];
        }
        // Phi'' and Phi''' by spectral differentiation of the smooth Phi'.
        let phi1_field = SpectralField::from_samples(grid, &phi1);
        let phi2 = phi1_field.deriv().values();
        let phi3 = phi1_field.deriv().deriv().values();
        Ok(WeightFamily {
            grid: Arc::clone(grid),
            r,
            r1,
            chi,
            chi1,
            chi2,
            chi_sq_d2,
            phi,
            phi1,
            phi2,
            phi3,
        })
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn chi1(&self) -> &[f64] {
        &self.chi1
    }

    pub fn chi2(&self) -> &[f64] {
        &self.chi2
    }

    pub fn chi_sq_d2(&self) -> &[f64] {
        &self.chi_sq_d2
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }

    pub fn phi3(&self) -> &[f64] {
        &self.phi3
    }

    fn interp(&self, table: &[f64], x: f64) -> f64 {
        let n = self.grid.len();
        let dx = self.grid.dx();
        let l = self.grid.domain_length();
        let mut y = x % l;
        if y < 0.0 {
            y += l;
        }
        let f = y / dx;
        let i0 = f.floor() as usize % n;
        let i1 = (i0 + 1) % n;
        let t = f - f.floor();
        table[i0] * (1.0 - t) + table[i1] * t
    }

    /// Linear interpolation with wraparound for each sampled weight.
    pub fn chi_at(&self, x: f64) -> f64 {
        self.interp(&self.chi, x)
    }

    pub fn chi1_at(&self, x: f64) -> f64 {
        self.interp(&self.chi1, x)
    }

    pub fn chi2_at(&self, x: f64) -> f64 {
        self.interp(&self.chi2, x)
    }

    pub fn phi_at(&self, x: f64) -> f64 {
        self.interp(&self.phi, x)
    }

    pub fn phi3_at(&self, x: f64) -> f64 {
        self.interp(&self.phi3, x)
    }

    fn sup(table: &[f64]) -> f64 {
        table.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    pub fn chi1_sup(&self) -> f64 {
        Self::sup(&self.chi1)
    }

    pub fn chi2_sup(&self) -> f64 {
        Self::sup(&self.chi2)
    }

    pub fn chi_sq_d2_sup(&self) -> f64 {
        Self::sup(&self.chi_sq_d2)
    }

    pub fn phi3_sup(&self) -> f64 {
        Self::sup(&self.phi3)
    }

    pub fn phi_sup(&self) -> f64 {
        Self::sup(&self.phi)
    }

    /// `\int chi^2 dx` by the trapezoid rule (exact here: smooth periodic).
    pub fn chi_sq_integral(&self) -> f64 {
        self.chi.iter().map(|c| c * c).sum::<f64>() * self.grid.dx()
    }

    pub fn chi_pow4_integral(&self) -> f64 {
        self.chi.iter().map(|c| c.powi(4)).sum::<f64>() * self.grid.dx()
    }

    /// Saturation value of `Phi`: should equal `(\int chi^2)^2 / (2R)`.
    pub fn phi_plateau(&self) -> f64 {
        // sample well past the support of Phi', away from the wrap jump
        self.phi[self.grid.len() * 3 / 8]
    }
}
