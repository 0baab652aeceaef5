//! Pointwise densities and currents of the flow, conserved quantities,
//! mass/energy centers, the virial monotonicity gap, and scattering
//! diagnostics.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::lp::SpaceTimeArray;

/// Guard threshold: at most this fraction of the mass may sit within `L/8`
/// of the wrap point for position diagnostics to be meaningful.
pub const BOUNDARY_GUARD: f64 = 1e-6;

/// One record of scalar observables for a field at time `t`.
///
/// `mass = \int u^2`, `energy = \int (1/2 u H u_x + u^{k+2}/(k+2))`;
/// `j_int` and `k_int` are the integrated mass and energy currents driving
/// the centers: `d/dt \int x rho = \int j`, `d/dt \int x e = \int k`.
#[derive(Debug, Clone, Serialize)]
pub struct Observables {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub mean: f64,
    pub x_m: f64,
    pub x_e: f64,
    pub j_int: f64,
    pub k_int: f64,
    pub p_int: f64,
    pub sup: f64,
    pub h_half: f64,
    pub h_sk: f64,
    /// False when the boundary-mass guard failed; centers are then
    /// meaningless although the integrals remain valid.
    pub centers_valid: bool,
}

impl Observables {
    pub const CSV_HEADER: &'static str = "t,mass,energy,mean,xM,xE,Jint,Kint,Pint,sup,H12,Hsk";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.mass,
            self.energy,
            self.mean,
            self.x_m,
            self.x_e,
            self.j_int,
            self.k_int,
            self.p_int,
            self.sup,
            self.h_half,
            self.h_sk
        )
    }
}

/// Pointwise evaluation of `u`, `u_x`, `H u_x`, and derived densities on a
/// refined grid fine enough that every integral below is alias-free
/// (powers up to `2k+2` appear in the energy current).
struct DensityEval {
    dx: f64,
    u: Vec<f64>,
    ux: Vec<f64>,
    hux: Vec<f64>,
}

impl DensityEval {
    fn new(field: &SpectralField, k: u32) -> Self {
        let pad = (k as usize + 2).max(field.grid().pad_factor());
        let dx = field.grid().dx() / pad as f64;
        DensityEval {
            dx,
            u: field.values_padded(pad),
            ux: field.deriv().values_padded(pad),
            hux: field.deriv().hilbert().values_padded(pad),
        }
    }

    fn integral(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.u.len()).map(f).sum::<f64>() * self.dx
    }

    fn rho(&self, i: usize) -> f64 {
        self.u[i] * self.u[i]
    }

    fn e(&self, i: usize, k: u32) -> f64 {
        0.5 * self.u[i] * self.hux[i] + self.u[i].powi(k as i32 + 2) / (k as f64 + 2.0)
    }

    fn j(&self, i: usize, k: u32) -> f64 {
        2.0 * self.u[i] * self.hux[i]
            + 2.0 * (k as f64 + 1.0) / (k as f64 + 2.0) * self.u[i].powi(k as i32 + 2)
    }

    fn kappa(&self, i: usize, k: u32) -> f64 {
        self.ux[i] * self.ux[i]
            + 1.5 * self.u[i].powi(k as i32 + 1) * self.hux[i]
            + 0.5 * self.u[i].powi(2 * k as i32 + 2)
    }
}

/// Position of the first trigonometric moment of a nonnegative-total weight,
/// then a linear correction in the recentered coordinate. Returns a value
/// in `[0, L)`.
fn circular_center(grid: &TorusGrid, pad: usize, weight: &[f64]) -> f64 {
    let l = grid.domain_length();
    let npad = weight.len();
    let dx = l / npad as f64;
    let _ = pad;
    let (mut c, mut s, mut tot) = (0.0, 0.0, 0.0);
    for (i, &w) in weight.iter().enumerate() {
        let theta = 2.0 * PI * (i as f64 * dx) / l;
        c += w * theta.cos();
        s += w * theta.sin();
        tot += w;
    }
    if tot == 0.0 {
        return 0.0;
    }
    let mut xbar = l / (2.0 * PI) * s.atan2(c);
    if xbar < 0.0 {
        xbar += l;
    }
    // first-moment refinement around xbar
    let mut m1 = 0.0;
    for (i, &w) in weight.iter().enumerate() {
        m1 += w * grid.wrap(i as f64 * dx - xbar);
    }
    let mut center = xbar + m1 * dx / (tot * dx);
    center = center.rem_euclid(l);
    center
}

/// Full observable record of a field.
pub fn observables(u: &SpectralField, k: u32) -> Observables {
    let t = 0.0;
    observables_at(u, k, t)
}

pub fn observables_at(u: &SpectralField, k: u32, t: f64) -> Observables {
    let grid = u.grid();
    let ev = DensityEval::new(u, k);
    let mass = ev.integral(|i| ev.rho(i));
    let energy = ev.integral(|i| ev.e(i, k));
    let j_int = ev.integral(|i| ev.j(i, k));
    let k_int = ev.integral(|i| ev.kappa(i, k));
    let p_int = ev.integral(|i| ev.u[i].powi(k as i32 + 2));
    let centers_valid = u.boundary_mass_fraction() <= BOUNDARY_GUARD && mass > 0.0;
    let rho: Vec<f64> = (0..ev.u.len()).map(|i| ev.rho(i)).collect();
    let evals: Vec<f64> = (0..ev.u.len()).map(|i| ev.e(i, k)).collect();
    let x_m = circular_center(grid, 1, &rho);
    let x_e = circular_center(grid, 1, &evals);
    Observables {
        t,
        mass,
        energy,
        mean: u.integrate(),
        x_m,
        x_e,
        j_int,
        k_int,
        p_int,
        sup: u.sup_norm(),
        h_half: u.sobolev_norm(0.5, false),
        h_sk: u.sobolev_norm(crate::critical_index(k), true),
        centers_valid,
    }
}

/// Time-ordered snapshots of one run plus the per-snapshot observables.
#[derive(Clone)]
pub struct Trajectory {
    pub k: u32,
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    pub records: Vec<Observables>,
}

impl Trajectory {
    pub fn from_snapshots(k: u32, times: Vec<f64>, snapshots: Vec<SpectralField>) -> Self {
        let records = times
            .iter()
            .zip(&snapshots)
            .map(|(&t, s)| observables_at(s, k, t))
            .collect();
        Trajectory {
            k,
            times,
            snapshots,
            records,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.snapshots[0].grid()
    }

    pub fn dt_out(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(Error::TooFewRecords {
                need: 2,
                got: self.times.len(),
            });
        }
        let dt = self.times[1] - self.times[0];
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300) {
                return Err(Error::NonUniformCadence);
            }
        }
        Ok(dt)
    }

    pub fn as_spacetime(&self) -> Result<SpaceTimeArray> {
        SpaceTimeArray::new(self.times.clone(), self.snapshots.clone())
    }

    /// Center positions unwrapped into a continuous series (the torus wrap
    /// is undone by tracking the nearest continuation snapshot to snapshot).
    pub fn unwrapped_centers(&self, energy: bool) -> Vec<f64> {
        let l = self.grid().domain_length();
        let mut out = Vec::with_capacity(self.records.len());
        let mut offset = 0.0;
        let mut prev: Option<f64> = None;
        for r in &self.records {
            let raw = if energy { r.x_e } else { r.x_m };
            if let Some(p) = prev {
                let mut cur = raw + offset;
                while cur - p > l / 2.0 {
                    cur -= l;
                    offset -= l;
                }
                while cur - p < -l / 2.0 {
                    cur += l;
                    offset += l;
                }
                out.push(cur);
                prev = Some(cur);
            } else {
                out.push(raw);
                prev = Some(raw);
            }
        }
        out
    }
}

/// Per-time residuals of the center-current relations
/// `d/dt \int x rho = \int j` and `d/dt \int x e = \int k`, measured by
/// central finite differences at the snapshot cadence.
#[derive(Debug, Clone, Serialize)]
pub struct CenterCurrentResidual {
    pub t: f64,
    pub mass_residual: f64,
    pub energy_residual: f64,
}

pub fn center_current_residual(traj: &Trajectory) -> Result<Vec<CenterCurrentResidual>> {
    if traj.records.len() < 3 {
        return Err(Error::TooFewRecords {
            need: 3,
            got: traj.records.len(),
        });
    }
    let dt = traj.dt_out()?;
    let xm = traj.unwrapped_centers(false);
    let xe = traj.unwrapped_centers(true);
    // \int x rho = x_M * M and \int x e = x_E * E in the recentered frame
    let ym: Vec<f64> = xm
        .iter()
        .zip(&traj.records)
        .map(|(&x, r)| x * r.mass)
        .collect();
    let ye: Vec<f64> = xe
        .iter()
        .zip(&traj.records)
        .map(|(&x, r)| x * r.energy)
        .collect();
    let mut out = Vec::new();
    for i in 1..traj.records.len() - 1 {
        let dm = (ym[i + 1] - ym[i - 1]) / (2.0 * dt);
        let de = (ye[i + 1] - ye[i - 1]) / (2.0 * dt);
        out.push(CenterCurrentResidual {
            t: traj.times[i],
            mass_residual: dm - traj.records[i].j_int,
            energy_residual: de - traj.records[i].k_int,
        });
    }
    Ok(out)
}

/// Gap of the virial monotonicity inequality:
/// `\int rho \int kappa - \int j \int e - k^2/(2(k+2)^2) M^2 (\int u^{k+2})^2`.
/// The inequality asserts this is nonnegative for every `H^1` field.
pub fn monotonicity_gap(u: &SpectralField, k: u32) -> f64 {
    let ev = DensityEval::new(u, k);
    let mass = ev.integral(|i| ev.rho(i));
    let energy = ev.integral(|i| ev.e(i, k));
    let j = ev.integral(|i| ev.j(i, k));
    let kap = ev.integral(|i| ev.kappa(i, k));
    let p = ev.integral(|i| ev.u[i].powi(k as i32 + 2));
    let kf = k as f64;
    mass * kap - j * energy - kf * kf / (2.0 * (kf + 2.0).powi(2)) * mass * mass * p * p
}

/// Magnitude scale of the gap's ingredients, for relative tolerances.
pub fn monotonicity_scale(u: &SpectralField, k: u32) -> f64 {
    let ev = DensityEval::new(u, k);
    let mass = ev.integral(|i| ev.rho(i));
    let energy = ev.integral(|i| ev.e(i, k));
    let j = ev.integral(|i| ev.j(i, k));
    let kap = ev.integral(|i| ev.kappa(i, k));
    (mass * kap).abs() + (j * energy).abs()
}

/// Series of Cauchy differences `|| V(-t_{i+1}) u(t_{i+1}) - V(-t_i) u(t_i) ||_{H^s_dot}`.
/// For a scattering solution the profile `w(t) = V(-t) u(t)` converges, so
/// the differences decay in later windows; for a purely linear trajectory
/// they vanish identically.
pub fn scattering_cauchy(traj: &Trajectory, s: f64) -> Result<Vec<(f64, f64)>> {
    if traj.records.len() < 2 {
        return Err(Error::TooFewRecords {
            need: 2,
            got: traj.records.len(),
        });
    }
    let mut prev: Option<SpectralField> = None;
    let mut out = Vec::new();
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let w = snap.linear_propagate(-traj.times[i]);
        if let Some(p) = prev {
            out.push((traj.times[i], w.sub(&p).sobolev_norm(s, true)));
        }
        prev = Some(w);
    }
    Ok(out)
}

/// Least-squares slope of the unwrapped mass center over the trajectory.
/// For a modulated packet with carrier `xi_0` under the linear flow this
/// is the group velocity `2 |xi_0|`.
pub fn packet_velocity(traj: &Trajectory) -> Result<f64> {
    if traj.records.len() < 2 {
        return Err(Error::TooFewRecords {
            need: 2,
            got: traj.records.len(),
        });
    }
    if let Some(r) = traj.records.iter().find(|r| !r.centers_valid) {
        return Err(Error::BoundaryGuard {
            t: r.t,
            fraction: f64::NAN,
        });
    }
    let xs = traj.unwrapped_centers(false);
    let n = xs.len() as f64;
    let tbar = traj.times.iter().sum::<f64>() / n;
    let xbar = xs.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, x) in traj.times.iter().zip(&xs) {
        num += (t - tbar) * (x - xbar);
        den += (t - tbar) * (t - tbar);
    }
    Ok(num / den)
}

/// `L^k_x L^infty_t` norm of a space-time window.
pub fn lk_linf_norm(a: &SpaceTimeArray, k: u32) -> f64 {
    a.lk_linf_norm(k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<TorusGrid> {
        TorusGrid::new(64, 2.0 * PI, 4).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn observables_of_cosine() {
        // u = cos x, k = 6, L = 2pi: M = pi, E = pi/2 + 35 pi / 512
        // (symbolic: \int cos^8 = 35 pi / 64, and \int cos H (cos)_x = pi)
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| x.cos());
        let obs = observables(&u, 6);
        assert!(close(obs.mass, PI, 1e-12));
        let expect_e = PI / 2.0 + 35.0 * PI / 512.0;
        assert!(close(obs.energy, expect_e, 1e-12), "{}", obs.energy);
    }

    #[test]
    fn observables_of_zero() {
        let g = grid();
        let obs = observables(&SpectralField::zero(&g), 6);
        assert_eq!(obs.mass, 0.0);
        assert_eq!(obs.energy, 0.0);
        assert_eq!(obs.j_int, 0.0);
        assert_eq!(obs.sup, 0.0);
    }

    #[test]
    fn gaussian_center_is_found() {
        let g = TorusGrid::new(256, 100.0, 4).unwrap();
        let x0 = 42.0;
        let u = SpectralField::from_fn(&g, |x| {
            let d = (x - x0 + 50.0).rem_euclid(100.0) - 50.0;
            (-(d / 3.0) * (d / 3.0)).exp()
        });
        let obs = observables(&u, 6);
        assert!(obs.centers_valid);
        assert!((obs.x_m - x0).abs() < g.dx(), "x_m = {}", obs.x_m);
    }

    #[test]
    fn energy_kinetic_term_is_half_derivative_norm() {
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| (2.0 * x).cos() + 0.5 * (5.0 * x).sin());
        let hux = u.deriv().hilbert();
        let lhs = u.dealiased_product(&hux, 2).integrate();
        let d = u.frac_deriv(0.5).unwrap();
        let rhs = d.l2_norm().powi(2);
        assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn density_integrals_match_conserved_quantities() {
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| 0.8 * (3.0 * x).cos() + 0.1 * (7.0 * x).sin());
        let obs = observables(&u, 4);
        // definitional consistency: integrals recomputed from L2 pairings
        assert!(close(obs.mass, u.l2_norm().powi(2), 1e-12));
        let kin = u.frac_deriv(0.5).unwrap().l2_norm().powi(2);
        let (p6, _) = u.dealiased_power_with(6, 8);
        assert!(close(obs.energy, 0.5 * kin + p6.integrate() / 6.0, 1e-12));
    }

    #[test]
    fn gap_vanishes_for_zero_field() {
        let g = grid();
        assert_eq!(monotonicity_gap(&SpectralField::zero(&g), 6), 0.0);
    }

    #[test]
    fn gap_of_cosine_matches_symbolic_oracle() {
        // u = cos x, k = 6:
        //   M = pi, P = \int cos^8 = 35 pi/64
        //   \int u H u_x = pi   (mode 1, |xi| = 1)
        //   \int u_x^2 = pi
        //   \int u^7 H u_x: H u_x = cos x, so = \int cos^8 = 35 pi/64
        //   \int u^{14} = C(14,7)/2^14 * 2 pi = 3432/16384 * 2 pi = 429 pi/1024
        //   E = pi/2 + 35 pi/512
        //   J = 2 pi + (14/8)(35 pi/64) = 2 pi + 245 pi/256
        //   K = pi + (3/2)(35pi/64) + (1/2)(429 pi/1024)
        let g = grid();
        let u = SpectralField::from_fn(&g, |x| x.cos());
        let m = PI;
        let p = 35.0 * PI / 64.0;
        let e = PI / 2.0 + 35.0 * PI / 512.0;
        let j = 2.0 * PI + 245.0 * PI / 256.0;
        let kap = PI + 1.5 * p + 0.5 * (429.0 * PI / 1024.0);
        let expect = m * kap - j * e - 36.0 / (2.0 * 64.0) * m * m * p * p;
        let got = monotonicity_gap(&u, 6);
        assert!(close(got, expect, 1e-12), "{got} vs {expect}");
    }

    #[test]
    fn random_fields_have_nonnegative_gap() {
        use rand::{Rng, SeedableRng};
        let g = grid();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in [4u32, 6] {
            for _ in 0..50 {
                let mut f = SpectralField::zero(&g);
                for m in 1..12i64 {
                    f.set_coeff(
                        m,
                        num_complex::Complex64::new(
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                        ),
                    );
                }
                let h1 = f.sobolev_norm(1.0, false);
                let f = f.scale(1.0 / h1);
                let gap = monotonicity_gap(&f, k);
                let scale = monotonicity_scale(&f, k);
                assert!(gap >= -1e-10 * scale, "gap {gap} scale {scale} k {k}");
            }
        }
    }

    #[test]
    fn linear_trajectory_has_constant_profile() {
        let g = grid();
        let u0 = SpectralField::from_fn(&g, |x| (2.0 * x).cos() + 0.3 * (5.0 * x).sin());
        let times: Vec<f64> = (0..5).map(|i| 0.2 * i as f64).collect();
        let snaps: Vec<SpectralField> = times.iter().map(|&t| u0.linear_propagate(t)).collect();
        let traj = Trajectory::from_snapshots(6, times, snaps);
        for (_, d) in scattering_cauchy(&traj, crate::critical_index(6)).unwrap() {
            assert!(d <= 1e-12);
        }
    }

    #[test]
    fn zero_trajectory_zero_series() {
        let g = grid();
        let times: Vec<f64> = (0..4).map(|i| 0.1 * i as f64).collect();
        let snaps = vec![SpectralField::zero(&g); 4];
        let traj = Trajectory::from_snapshots(6, times, snaps);
        for r in center_current_residual(&traj).unwrap() {
            assert_eq!(r.mass_residual, 0.0);
            assert_eq!(r.energy_residual, 0.0);
        }
        for (_, d) in scattering_cauchy(&traj, 0.25).unwrap() {
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn pure_gaussian_has_no_drift_speed() {
        let g = TorusGrid::new(512, 200.0, 4).unwrap();
        let u0 = SpectralField::from_fn(&g, |x| {
            let d = (x - 100.0) / 5.0;
            0.5 * (-d * d).exp()
        });
        let times: Vec<f64> = (0..6).map(|i| 0.05 * i as f64).collect();
        let snaps: Vec<SpectralField> = times.iter().map(|&t| u0.linear_propagate(t)).collect();
        let traj = Trajectory::from_snapshots(6, times, snaps);
        let v = packet_velocity(&traj).unwrap();
        assert!(v.abs() < 0.5, "spurious drift {v}");
    }

    #[test]
    fn modulated_packet_moves_at_group_velocity() {
        let g = TorusGrid::new(2048, 200.0, 4).unwrap();
        let xi0 = 8.0;
        let u0 = SpectralField::from_fn(&g, |x| {
            let d = (x - 60.0) / 6.0;
            0.3 * (-d * d).exp() * (xi0 * x).cos()
        });
        let times: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
        let snaps: Vec<SpectralField> = times.iter().map(|&t| u0.linear_propagate(t)).collect();
        let traj = Trajectory::from_snapshots(6, times, snaps);
        let v = packet_velocity(&traj).unwrap();
        assert!(
            (v - 2.0 * xi0).abs() <= 0.05 * 2.0 * xi0,
            "speed {v}, expected {}",
            2.0 * xi0
        );
    }
}
