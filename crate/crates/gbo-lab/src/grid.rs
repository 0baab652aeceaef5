//! Periodic spatial grid and its frequency lattice.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Forward/inverse transform pair for one size, shared and read-only.
#[derive(Clone)]
pub struct FftPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

/// Discretization of the torus `[0, L)` with `n` collocation points.
///
/// Frequencies are the exact lattice `xi_m = 2 pi m / L` for
/// `m = -n/2, ..., n/2 - 1`, stored in DFT order. Fourier coefficients
/// follow the convention `c(xi) = (1/L) \int f e^{-i xi x} dx`, so the
/// quadrature `\int f = L c(0)` is exact on band-limited fields.
pub struct TorusGrid {
    n: usize,
    length: f64,
    pad_factor: usize,
    xs: Vec<f64>,
    freqs: Vec<f64>,
    ffts: Mutex<HashMap<usize, FftPair>>,
}

impl TorusGrid {
    pub fn new(n: usize, length: f64, pad_factor: usize) -> Result<Arc<Self>> {
        if !n.is_power_of_two() || n < 16 {
            return Err(Error::BadGridSize(n));
        }
        if !(length > 0.0) {
            return Err(Error::BadDomainLength(length));
        }
        if pad_factor < 1 {
            return Err(Error::BadPadFactor);
        }
        let dx = length / n as f64;
        let xs = (0..n).map(|m| m as f64 * dx).collect();
        let base = 2.0 * PI / length;
        let freqs = (0..n).map(|m| base * Self::signed_index(m, n) as f64).collect();
        Ok(Arc::new(TorusGrid {
            n,
            length,
            pad_factor,
            xs,
            freqs,
            ffts: Mutex::new(HashMap::new()),
        }))
    }

    /// DFT bin `m` mapped to its signed frequency index.
    pub fn signed_index(m: usize, n: usize) -> i64 {
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain_length(&self) -> f64 {
        self.length
    }

    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Collocation abscissae `x_m = m L / n`.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Frequency lattice in DFT order.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn freq(&self, m: usize) -> f64 {
        self.freqs[m]
    }

    /// Coordinate wrapped into the symmetric fundamental domain `[-L/2, L/2)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let half = self.length / 2.0;
        let mut y = x % self.length;
        if y >= half {
            y -= self.length;
        } else if y < -half {
            y += self.length;
        }
        y
    }

    /// Planned transforms for `size` points, cached per grid.
    pub fn fft(&self, size: usize) -> FftPair {
        let mut map = self.ffts.lock().unwrap();
        map.entry(size)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                FftPair {
                    forward: planner.plan_fft_forward(size),
                    inverse: planner.plan_fft_inverse(size),
                }
            })
            .clone()
    }

    /// Forward DFT of real samples, normalized by `1/n`.
    pub fn analyze(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft(self.n).forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("pad_factor", &self.pad_factor)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_exact() {
        let g = TorusGrid::new(16, 2.0 * PI, 1).unwrap();
        let idx: Vec<i64> = (0..16).map(|m| TorusGrid::signed_index(m, 16)).collect();
        assert_eq!(idx[0], 0);
        assert_eq!(idx[7], 7);
        assert_eq!(idx[8], -8);
        assert_eq!(idx[15], -1);
        for m in 0..16 {
            assert_eq!(g.freq(m), idx[m] as f64);
        }
    }

    #[test]
    fn lattice_spacing() {
        let g = TorusGrid::new(32, 4.0 * PI, 2).unwrap();
        assert!((g.freq(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(15, 1.0, 1).is_err());
        assert!(TorusGrid::new(8, 1.0, 1).is_err());
        assert!(TorusGrid::new(16, -1.0, 1).is_err());
        assert!(TorusGrid::new(16, 1.0, 0).is_err());
    }

    #[test]
    fn wrap_is_symmetric() {
        let g = TorusGrid::new(16, 10.0, 1).unwrap();
        assert_eq!(g.wrap(5.0), -5.0);
        assert_eq!(g.wrap(9.0), -1.0);
        assert_eq!(g.wrap(2.0), 2.0);
    }
}
