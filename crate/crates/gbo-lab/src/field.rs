//! Real-valued fields stored by their Fourier coefficients, and the
//! Fourier-multiplier operators acting on them.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Parity of a multiplier symbol, deciding the Nyquist-mode treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// One real field on a [`TorusGrid`], held as complex Fourier coefficients
/// in DFT order.
///
/// Invariants kept by every constructor and operation: Hermitian symmetry
/// `c(-xi) = conj(c(xi))`, and a zero Nyquist coefficient (the Nyquist mode
/// has no well-defined frequency sign, so odd symbols would break realness
/// there; we exclude it from the band altogether).
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<TorusGrid>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Zero field.
    pub fn zero(grid: &Arc<TorusGrid>) -> Self {
        SpectralField {
            grid: Arc::clone(grid),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Build from real collocation samples.
    pub fn from_samples(grid: &Arc<TorusGrid>, samples: &[f64]) -> Self {
        assert_eq!(samples.len(), grid.len());
        let coeffs = grid.analyze(samples);
        let mut f = SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        };
        f.enforce_realness();
        f
    }

    /// Build by sampling a function of `x`.
    pub fn from_fn(grid: &Arc<TorusGrid>, func: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.xs().iter().map(|&x| func(x)).collect();
        Self::from_samples(grid, &samples)
    }

    /// Build from raw coefficients (caller provides DFT order); symmetry and
    /// the Nyquist zero are then enforced.
    pub fn from_coeffs(grid: &Arc<TorusGrid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        let mut f = SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        };
        f.enforce_realness();
        f
    }

    fn enforce_realness(&mut self) {
        let n = self.coeffs.len();
        self.coeffs[0].im = 0.0;
        self.coeffs[n / 2] = Complex64::new(0.0, 0.0);
        for m in 1..n / 2 {
            let avg = 0.5 * (self.coeffs[m] + self.coeffs[n - m].conj());
            self.coeffs[m] = avg;
            self.coeffs[n - m] = avg.conj();
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at signed frequency index `m'` (units of `2 pi / L`).
    pub fn coeff_at(&self, signed: i64) -> Complex64 {
        let n = self.grid.len() as i64;
        if signed >= n / 2 || signed < -n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        let m = if signed >= 0 { signed } else { signed + n } as usize;
        self.coeffs[m]
    }

    pub fn set_coeff(&mut self, signed: i64, value: Complex64) {
        let n = self.grid.len() as i64;
        assert!(signed > -n / 2 && signed < n / 2, "index outside band");
        let m = if signed >= 0 { signed } else { signed + n } as usize;
        self.coeffs[m] = value;
        if signed != 0 {
            let mc = (-signed + if signed > 0 { n } else { 0 }) as usize;
            self.coeffs[mc] = value.conj();
        } else {
            self.coeffs[0].im = 0.0;
        }
    }

    /// Real collocation samples of the band-limited interpolant.
    pub fn values(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        self.grid.fft(self.grid.len()).inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Samples on a refined grid with `factor * n` points.
    pub fn values_padded(&self, factor: usize) -> Vec<f64> {
        let n = self.grid.len();
        let m = n * factor;
        if factor == 1 {
            return self.values();
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..n {
            let signed = TorusGrid::signed_index(i, n);
            let j = if signed >= 0 { signed as usize } else { (signed + m as i64) as usize };
            buf[j] = self.coeffs[i];
        }
        self.grid.fft(m).inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Exact integral of the interpolant over the torus.
    pub fn integrate(&self) -> f64 {
        self.grid.domain_length() * self.coeffs[0].re
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Sobolev norm; the homogeneous variant drops the mean mode.
    pub fn sobolev_norm(&self, s: f64, homogeneous: bool) -> f64 {
        let l = self.grid.domain_length();
        let mut sum = 0.0;
        for (m, c) in self.coeffs.iter().enumerate() {
            let xi = self.grid.freq(m);
            let w = if homogeneous {
                if xi == 0.0 {
                    continue;
                }
                xi.abs().powf(2.0 * s)
            } else {
                (1.0 + xi * xi).powf(s)
            };
            sum += w * c.norm_sqr();
        }
        (l * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0, false)
    }

    /// `L^p` norm of the collocation samples (discrete, with `dx` weight);
    /// `p = infinity` is the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vals = self.values();
        if p.is_infinite() {
            return vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        }
        let dx = self.grid.dx();
        (vals.iter().map(|&v| v.abs().powf(p)).sum::<f64>() * dx).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// `L^2` pairing `\int f g`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert!(self.grid.as_ref() == other.grid.as_ref(), "grid mismatch");
        let l = self.grid.domain_length();
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        l * sum
    }

    pub fn scale(&self, c: f64) -> SpectralField {
        let coeffs = self.coeffs.iter().map(|&z| z * c).collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        assert!(self.grid.as_ref() == other.grid.as_ref(), "grid mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        SpectralField {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.add(&other.scale(-1.0))
    }

    /// Hilbert transform, multiplier `-i sgn(xi)` with `sgn(0) = 0`.
    pub fn hilbert(&self) -> SpectralField {
        Multiplier::hilbert(&self.grid).apply(self)
    }

    /// Fractional derivative `|D|^s`; the mean mode is annihilated.
    pub fn frac_deriv(&self, s: f64) -> Result<SpectralField> {
        if s < -0.5 {
            return Err(Error::BadExponent(s));
        }
        Ok(Multiplier::frac_deriv(&self.grid, s).apply(self))
    }

    /// Spatial derivative, multiplier `i xi`.
    pub fn deriv(&self) -> SpectralField {
        Multiplier::derivative(&self.grid).apply(self)
    }

    /// Linear Benjamin-Ono propagator `V(t)`, symbol `exp(-i xi |xi| t)`.
    pub fn linear_propagate(&self, t: f64) -> SpectralField {
        Multiplier::propagator(&self.grid, t).apply(self)
    }

    /// Pointwise power `f^p` projected back onto the grid band, with the
    /// product evaluated on a zero-padded grid. The result is exact when
    /// `pad >= ceil((p+1)/2)`; otherwise the returned flag marks a
    /// truncated (aliased) evaluation.
    pub fn dealiased_power_with(&self, p: u32, pad: usize) -> (SpectralField, bool) {
        assert!(p >= 1);
        if p == 1 {
            return (self.clone(), false);
        }
        let needed = (p as usize + 2) / 2; // ceil((p+1)/2)
        let truncated = pad < needed;
        let vals = self.values_padded(pad);
        let powed: Vec<f64> = vals.iter().map(|&v| v.powi(p as i32)).collect();
        (self.project_from_padded(&powed, pad), truncated)
    }

    /// Pointwise power with the grid's default pad factor.
    pub fn dealiased_power(&self, p: u32) -> (SpectralField, bool) {
        self.dealiased_power_with(p, self.grid.pad_factor())
    }

    /// Dealiased pointwise product of two fields.
    pub fn dealiased_product(&self, other: &SpectralField, pad: usize) -> SpectralField {
        assert!(self.grid.as_ref() == other.grid.as_ref(), "grid mismatch");
        let a = self.values_padded(pad);
        let b = other.values_padded(pad);
        let prod: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| x * y).collect();
        self.project_from_padded(&prod, pad)
    }

    /// Analyze samples on the `pad`-refined grid and keep the central band.
    pub fn project_from_padded(&self, samples: &[f64], pad: usize) -> SpectralField {
        let n = self.grid.len();
        let m = n * pad;
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.fft(m).forward.process(&mut buf);
        let scale = 1.0 / m as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let signed = TorusGrid::signed_index(i, n);
            if signed == -(n as i64) / 2 {
                continue;
            }
            let j = if signed >= 0 { signed as usize } else { (signed + m as i64) as usize };
            coeffs[i] = buf[j] * scale;
        }
        SpectralField::from_coeffs(&self.grid, coeffs)
    }

    /// Fraction of the mass `u^2` lying within `L/8` of the wrap point.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let vals = self.values();
        let l = self.grid.domain_length();
        let mut boundary = 0.0;
        let mut total = 0.0;
        for (m, &v) in vals.iter().enumerate() {
            let x = self.grid.xs()[m];
            let d = self.grid.wrap(x).abs(); // distance to the wrap point x = 0 (mod L)
            let sq = v * v;
            total += sq;
            if d < l / 8.0 {
                boundary += sq;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            boundary / total
        }
    }
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("l2", &self.l2_norm())
            .finish()
    }
}

/// A Fourier multiplier: one complex symbol value per grid frequency.
pub struct Multiplier {
    symbols: Vec<Complex64>,
    parity: Parity,
}

impl Multiplier {
    fn build(grid: &Arc<TorusGrid>, parity: Parity, f: impl Fn(f64) -> Complex64) -> Self {
        let symbols = grid.freqs().iter().map(|&xi| f(xi)).collect();
        Multiplier { symbols, parity }
    }

    /// `-i sgn(xi)`, with `sgn(0) = 0`.
    pub fn hilbert(grid: &Arc<TorusGrid>) -> Self {
        Self::build(grid, Parity::Odd, |xi| {
            Complex64::new(0.0, -xi.signum() * if xi == 0.0 { 0.0 } else { 1.0 })
        })
    }

    /// `|xi|^s`, zero at the mean mode.
    pub fn frac_deriv(grid: &Arc<TorusGrid>, s: f64) -> Self {
        Self::build(grid, Parity::Even, |xi| {
            if xi == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(xi.abs().powf(s), 0.0)
            }
        })
    }

    /// `i xi`.
    pub fn derivative(grid: &Arc<TorusGrid>) -> Self {
        Self::build(grid, Parity::Odd, |xi| Complex64::new(0.0, xi))
    }

    /// `exp(-i xi |xi| t)`, unimodular for every frequency.
    pub fn propagator(grid: &Arc<TorusGrid>, t: f64) -> Self {
        Self::build(grid, Parity::None, |xi| {
            Complex64::from_polar(1.0, -xi * xi.abs() * t)
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.symbols)
            .map(|(c, s)| c * s)
            .collect();
        SpectralField::from_coeffs(f.grid(), coeffs)
    }
}
