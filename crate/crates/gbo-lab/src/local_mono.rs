//! Localized interaction functional `M(t) = \iint Phi(y-x) rho(x) e(y)`
//! and its discrete monotonicity ledger: the windowed main term, the
//! energy-side errors `E1..E3`, and the mass-side errors `T1..T4`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::{observables, Trajectory};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::weights::WeightFamily;

/// Circular convolution `dx * sum_m a[(n-m) mod N] b[m]` via FFT.
fn circ_conv(grid: &Arc<TorusGrid>, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let pair = grid.fft(n);
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    pair.forward.process(&mut fa);
    pair.forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    pair.inverse.process(&mut fa);
    let scale = grid.dx() / n as f64;
    fa.iter().map(|c| c.re * scale).collect()
}

fn interp(grid: &Arc<TorusGrid>, table: &[f64], x: f64) -> f64 {
    let n = grid.len();
    let l = grid.domain_length();
    let dx = grid.dx();
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

/// Pointwise mass and energy densities sampled at the collocation points.
fn densities(u: &SpectralField, k: u32) -> (Vec<f64>, Vec<f64>) {
    let vals = u.values();
    let hux = u.deriv().hilbert().values();
    let rho: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let e: Vec<f64> = vals
        .iter()
        .zip(&hux)
        .map(|(&v, &h)| 0.5 * v * h + v.powi(k as i32 + 2) / (k as f64 + 2.0))
        .collect();
    (rho, e)
}

/// Pair two densities through the weight: `\iint Phi(y-x) a(x) b(y)`.
///
/// Evaluated as `dx * sum_y (Phi (*) a)(y) b(y)` with one FFT correlation.
pub fn interaction_pairing(w: &WeightFamily, a: &[f64], b: &[f64]) -> f64 {
    let grid = w.grid();
    let conv = circ_conv(grid, w.phi(), a);
    conv.iter().zip(b).map(|(c, v)| c * v).sum::<f64>() * grid.dx()
}

/// Same pairing by the direct `O(N^2)` double sum; correctness oracle.
pub fn interaction_pairing_direct(w: &WeightFamily, a: &[f64], b: &[f64]) -> f64 {
    let grid = w.grid();
    let n = grid.len();
    let dx = grid.dx();
    let phi = w.phi();
    let mut acc = 0.0;
    for y in 0..n {
        let mut inner = 0.0;
        for x in 0..n {
            inner += phi[(y + n - x) % n] * a[x];
        }
        acc += inner * b[y];
    }
    acc * dx * dx
}

/// The localized interaction functional `M` for a state.
pub fn interaction_m(u: &SpectralField, k: u32, w: &WeightFamily) -> f64 {
    let (rho, e) = densities(u, k);
    interaction_pairing(w, &rho, &e)
}

/// `M` by the quadratic-cost double sum.
pub fn interaction_m_direct(u: &SpectralField, k: u32, w: &WeightFamily) -> f64 {
    let (rho, e) = densities(u, k);
    interaction_pairing_direct(w, &rho, &e)
}

/// Windowed monotonicity main term
/// `\int_s [ \int rho[chi_s u] \int kappa[chi_s u]
///           - \int j[chi_s u] \int e[chi_s u] ] ds/R`,
/// with the `s`-line discretized on a strided copy of the grid.
pub fn main_term(u: &SpectralField, k: u32, w: &WeightFamily) -> f64 {
    let grid = u.grid();
    let n = grid.len();
    let dx = grid.dx();
    let stride = (n / 128).max(1);
    let vals = u.values();
    let mut acc = 0.0;
    for node in (0..n).step_by(stride) {
        let s = node as f64 * dx;
        let windowed: Vec<f64> = (0..n)
            .map(|m| w.chi_at(m as f64 * dx - s) * vals[m])
            .collect();
        let f = SpectralField::from_samples(grid, &windowed);
        if f.l2_norm() == 0.0 {
            continue;
        }
        let obs = observables(&f, k);
        acc += obs.mass * obs.k_int - obs.j_int * obs.energy;
    }
    acc * (stride as f64 * dx) / w.r()
}

#[derive(Debug, Clone, Serialize)]
pub struct DmRecord {
    pub t: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "dM_fd")]
    pub dm_fd: f64,
    pub main_term: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBudget {
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "T3")]
    pub t3: f64,
    #[serde(rename = "T4")]
    pub t4: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.e1 + self.e2 + self.e3 + self.t1 + self.t2 + self.t3 + self.t4
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalMonoReport {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub records: Vec<DmRecord>,
    pub error_budget: ErrorBudget,
}

/// Commutator `[H, Q]u` against a window `p`, i.e. `\int p (y) ([H,Q]u)(y)`,
/// by direct quadrature of the principal-value kernel
/// `(Q(z) - Q(y))/(y - z)` on a strided lattice. The diagonal limit is
/// `-Q'(y)`; `q1` supplies that derivative.
fn commutator_pairing(
    grid: &Arc<TorusGrid>,
    p: &[f64],
    q: &[f64],
    q1: &[f64],
    u: &[f64],
    stride: usize,
) -> f64 {
    let n = grid.len();
    let dx = grid.dx();
    let dc = stride as f64 * dx;
    let mut acc = 0.0;
    for y in (0..n).step_by(stride) {
        if p[y] == 0.0 {
            continue;
        }
        let ys = y as f64 * dx;
        let mut inner = 0.0;
        for z in (0..n).step_by(stride) {
            let d = grid.wrap(ys - z as f64 * dx);
            let kernel = if z == y {
                -q1[y]
            } else {
                (q[z] - q[y]) / d
            };
            inner += kernel * u[z];
        }
        acc += p[y] * inner * dc;
    }
    acc * dc / std::f64::consts::PI
}

/// Magnitudes of the error terms in the discrete monotonicity ledger.
///
/// `E1, E2, E3` are the energy-side terms paired against `rho`; `T1..T4`
/// are `L^2_s(ds/R)` norms of the mass-side window defects.
pub fn error_budget(u: &SpectralField, k: u32, w: &WeightFamily) -> ErrorBudget {
    let grid = u.grid();
    let n = grid.len();
    let dx = grid.dx();
    let ki = k as i32;
    let vals = u.values();
    let ux = u.deriv().values();
    let hu = u.hilbert().values();
    let rho: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let v_pow: Vec<f64> = vals.iter().map(|v| v.powi(ki + 1)).collect();
    // psi = Phi''' correlated with rho; shared by E1 and E2
    let psi = circ_conv(grid, w.phi3(), &rho);
    let e1 = 0.5
        * psi
            .iter()
            .zip(&rho)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
        * dx;
    let e3_density: Vec<f64> = v_pow.iter().zip(&hu).map(|(a, b)| a * b).collect();
    let e3 = 0.5
        * circ_conv(grid, w.phi2(), &rho)
            .iter()
            .zip(&e3_density)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
        * dx;
    // E2 = (1/2pi) | \int_r r^2 \iint psi(rz + (1-r)y) u(y) u^{k+1}(z) |
    let stride = (n / 256).max(1);
    let dc = stride as f64 * dx;
    let r_nodes = 32;
    let mut e2 = 0.0;
    for ri in 0..r_nodes {
        let r = (ri as f64 + 0.5) / r_nodes as f64;
        let mut acc = 0.0;
        for y in (0..n).step_by(stride) {
            if vals[y] == 0.0 {
                continue;
            }
            let ys = y as f64 * dx;
            let mut inner = 0.0;
            for z in (0..n).step_by(stride) {
                inner += interp(grid, &psi, r * (z as f64 * dx) + (1.0 - r) * ys) * v_pow[z];
            }
            acc += inner * vals[y];
        }
        e2 += r * r * acc * dc * dc / r_nodes as f64;
    }
    let e2 = e2.abs() / (2.0 * std::f64::consts::PI);
    // mass-side windows on coarse s-nodes
    let s_stride = (n / 64).max(1);
    let ds = s_stride as f64 * dx;
    let com_stride = (n / 256).max(1);
    let (mut t1, mut t2, mut t3, mut t4) = (0.0, 0.0, 0.0, 0.0);
    for node in (0..n).step_by(s_stride) {
        let s = node as f64 * dx;
        let chi_s: Vec<f64> = (0..n).map(|m| w.chi_at(m as f64 * dx - s)).collect();
        let chi1_s: Vec<f64> = (0..n).map(|m| w.chi1_at(m as f64 * dx - s)).collect();
        let chi2_s: Vec<f64> = (0..n).map(|m| w.chi2_at(m as f64 * dx - s)).collect();
        let window: Vec<f64> = chi_s.iter().zip(&vals).map(|(c, v)| c * v).collect();
        // T1: chi_s u [H, chi_s'] u
        let i1 = commutator_pairing(grid, &window, &chi1_s, &chi2_s, &vals, com_stride);
        // T2: chi_s u [H, chi_s] u_x
        let i2 = commutator_pairing(grid, &window, &chi_s, &chi1_s, &ux, com_stride);
        // T3: chi chi' u H u
        let i3 = (0..n)
            .map(|m| chi_s[m] * chi1_s[m] * vals[m] * hu[m])
            .sum::<f64>()
            * dx;
        // T4: (chi^2 - chi^{k+2}) u^{k+2}
        let i4 = (0..n)
            .map(|m| {
                (chi_s[m] * chi_s[m] - chi_s[m].powi(ki + 2)) * vals[m].powi(ki + 2)
            })
            .sum::<f64>()
            * dx;
        let weight = ds / w.r();
        t1 += i1 * i1 * weight;
        t2 += i2 * i2 * weight;
        t3 += i3 * i3 * weight;
        t4 += i4 * i4 * weight;
    }
    ErrorBudget {
        e1,
        e2,
        e3,
        t1: t1.sqrt(),
        t2: t2.sqrt(),
        t3: t3.sqrt(),
        t4: t4.sqrt(),
    }
}

/// Full ledger along a trajectory: `M`, its centered finite difference,
/// the windowed main term, and the residual between them, with the error
/// budget evaluated at the middle snapshot.
pub fn dm_report(traj: &Trajectory, w: &WeightFamily) -> Result<LocalMonoReport> {
    if traj.snapshots.len() < 3 {
        return Err(Error::TooFewRecords {
            need: 3,
            got: traj.snapshots.len(),
        });
    }
    let dt = traj.dt_out()?;
    let k = traj.k;
    let ms: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|u| interaction_m(u, k, w))
        .collect();
    let mut records = Vec::new();
    for i in 1..traj.snapshots.len() - 1 {
        let dm_fd = (ms[i + 1] - ms[i - 1]) / (2.0 * dt);
        let mt = main_term(&traj.snapshots[i], k, w);
        records.push(DmRecord {
            t: traj.times[i],
            m: ms[i],
            dm_fd,
            main_term: mt,
            residual: dm_fd - mt,
        });
    }
    let mid = traj.snapshots.len() / 2;
    let budget = error_budget(&traj.snapshots[mid], k, w);
    Ok(LocalMonoReport {
        r: w.r(),
        r1: w.r1(),
        records,
        error_budget: budget,
    })
}

/// The two localized pairings `\int g f H f_x` and `\int g f^{k+2}`,
/// whose combined size is controlled by
/// `(|g|_sup + |g'|_sup)(|f|_{H^{1/2}}^2 + |f|_{H^{1/2}}^{k+2})`.
pub fn localization_pairings(g: &SpectralField, f: &SpectralField, k: u32) -> Result<(f64, f64)> {
    if f.l2_norm() == 0.0 {
        return Err(Error::EmptyInput("zero field".into()));
    }
    let grid = f.grid();
    let dx = grid.dx();
    let gv = g.values();
    let fv = f.values();
    let hfx = f.deriv().hilbert().values();
    let a = (0..grid.len())
        .map(|m| gv[m] * fv[m] * hfx[m])
        .sum::<f64>()
        * dx;
    let b = (0..grid.len())
        .map(|m| gv[m] * fv[m].powi(k as i32 + 2))
        .sum::<f64>()
        * dx;
    Ok((a, b))
}

/// Ratio of the localized pairings to the Sobolev bound; finite and
/// scale-free, so it stays bounded as the window grows.
pub fn localization_ratio(g: &SpectralField, f: &SpectralField, k: u32) -> Result<f64> {
    let (a, b) = localization_pairings(g, f, k)?;
    let h = g.sup_norm() + g.deriv().sup_norm();
    let nf = f.sobolev_norm(0.5, false);
    let denom = h * (nf * nf + nf.powi(k as i32 + 2));
    if denom == 0.0 {
        return Err(Error::EmptyInput("zero window".into()));
    }
    Ok((a.abs() + b.abs()) / denom)
}

/// Near-diagonal kernel check: validates the three Schur hypotheses on a
/// sampled kernel and returns `|\iint K u v| / (H sqrt(R1 R2) |u| |v|)`,
/// which never exceeds 1.
///
/// `kernel` is row-major with `u.len()` rows (`y`) and `v.len()` columns
/// (`z`); `dy`, `dz` are the quadrature weights.
pub fn schur_check(
    kernel: &[f64],
    dy: f64,
    dz: f64,
    u: &[f64],
    v: &[f64],
    height: f64,
    r1: f64,
    r2: f64,
) -> Result<f64> {
    let (ny, nz) = (u.len(), v.len());
    if kernel.len() != ny * nz || ny == 0 || nz == 0 {
        return Err(Error::EmptyInput("kernel shape mismatch".into()));
    }
    let tol = 1.0 + 1e-12;
    for row in 0..ny {
        let support: usize = (0..nz)
            .filter(|&col| kernel[row * nz + col] != 0.0)
            .count();
        if support as f64 * dz > r2 * tol {
            return Err(Error::KernelBounds(format!(
                "z-support {} exceeds R2 = {r2}",
                support as f64 * dz
            )));
        }
    }
    for col in 0..nz {
        let support: usize = (0..ny)
            .filter(|&row| kernel[row * nz + col] != 0.0)
            .count();
        if support as f64 * dy > r1 * tol {
            return Err(Error::KernelBounds(format!(
                "y-support {} exceeds R1 = {r1}",
                support as f64 * dy
            )));
        }
    }
    let sup = kernel.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if sup > height * tol {
        return Err(Error::KernelBounds(format!(
            "height {sup} exceeds H = {height}"
        )));
    }
    let mut pairing = 0.0;
    for row in 0..ny {
        let mut inner = 0.0;
        for col in 0..nz {
            inner += kernel[row * nz + col] * v[col];
        }
        pairing += inner * u[row];
    }
    let pairing = (pairing * dy * dz).abs();
    let nu = (u.iter().map(|x| x * x).sum::<f64>() * dy).sqrt();
    let nv = (v.iter().map(|x| x * x).sum::<f64>() * dz).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::EmptyInput("zero test function".into()));
    }
    Ok(pairing / (height * (r1 * r2).sqrt() * nu * nv))
}
