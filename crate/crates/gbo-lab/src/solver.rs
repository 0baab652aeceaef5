//! Time integration of `u_t + H u_xx + d/dx(u^{k+1}) = 0` with exact
//! treatment of the stiff linear multiplier.
//!
//! The linear symbol `-i xi |xi|` is integrated exactly; the nonlinearity is
//! handled by fourth-order exponential time differencing (ETDRK4, with the
//! phi-function coefficients evaluated by complex contour averaging) or by
//! an integrating-factor RK4 kept as an independent oracle.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Trajectory, BOUNDARY_GUARD};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    EtdRk4,
    IfRk4,
}

/// Initial-data families used by the verification suites.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `A exp(-((x - x0)/w)^2)`; `x0` defaults to the domain center.
    Gaussian {
        amp: f64,
        width: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    /// Gaussian envelope modulated by a carrier `cos(xi0 x)`.
    ModulatedGaussian {
        amp: f64,
        width: f64,
        carrier: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    /// Random band-limited data normalized to `amp` in `H^{1/2}`.
    RandomBand {
        amp: f64,
        modes: usize,
        seed: u64,
    },
}

impl InitialData {
    /// Whether the boundary-mass guard applies; band-limited noise fills
    /// the whole torus and is exempt.
    pub fn is_localized(&self) -> bool {
        !matches!(self, InitialData::RandomBand { .. })
    }

    pub fn build(&self, grid: &Arc<TorusGrid>) -> SpectralField {
        let l = grid.domain_length();
        match *self {
            InitialData::Gaussian { amp, width, center } => {
                let x0 = center.unwrap_or(l / 2.0);
                SpectralField::from_fn(grid, |x| {
                    let d = grid.wrap(x - x0) / width;
                    amp * (-d * d).exp()
                })
            }
            InitialData::ModulatedGaussian {
                amp,
                width,
                carrier,
                center,
            } => {
                let x0 = center.unwrap_or(l / 2.0);
                SpectralField::from_fn(grid, |x| {
                    let d = grid.wrap(x - x0) / width;
                    amp * (-d * d).exp() * (carrier * x).cos()
                })
            }
            InitialData::RandomBand { amp, modes, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut f = SpectralField::zero(grid);
                let top = modes.min(grid.len() / 2 - 1) as i64;
                for m in 1..=top {
                    f.set_coeff(
                        m,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    );
                }
                let h = f.sobolev_norm(0.5, false);
                if h > 0.0 {
                    f.scale(amp / h)
                } else {
                    f
                }
            }
        }
    }
}

/// Full simulation configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(default = "default_pad")]
    pub pad_factor: usize,
    pub k: u32,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    pub data: InitialData,
    /// Snapshot every this many steps.
    #[serde(default = "default_cadence")]
    pub snapshot_every: usize,
    /// Checkpoint every this many steps (0 = never).
    #[serde(default)]
    pub checkpoint_every: usize,
    /// Off-spec focusing sign, for blow-up-guard testing only.
    #[serde(default)]
    pub focusing: bool,
    /// Weight radii carried along for the localized-functional diagnostics.
    #[serde(default)]
    pub weight_r: Option<f64>,
    #[serde(default)]
    pub weight_r1: Option<f64>,
}

fn default_pad() -> usize {
    4
}
fn default_integrator() -> Integrator {
    Integrator::EtdRk4
}
fn default_cadence() -> usize {
    100
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k % 2 != 0 || self.k < 4 {
            return Err(Error::BadPower(self.k));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidConfig(
                "snapshot_every must be a positive multiple of dt".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<TorusGrid>> {
        TorusGrid::new(self.n, self.l, self.pad_factor)
    }
}

/// Current integration state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: SpectralField,
    pub k: u32,
    pub step_count: u64,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowUp { t: f64 },
    GuardViolation { t: f64, fraction: f64 },
}

/// A trajectory plus how the run ended. Partial artifacts survive aborts.
pub struct SimOutcome {
    pub trajectory: Trajectory,
    pub termination: Termination,
    /// Last valid state before a blow-up, if any.
    pub last_state: SimState,
}

/// Per-step operator tables for one (grid, dt, k) combination.
pub struct Stepper {
    k: u32,
    sign: f64,
    pad: usize,
    dt: f64,
    /// ixi multiplier values in DFT order.
    ixi: Vec<Complex64>,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

const CONTOUR_POINTS: usize = 64;

impl Stepper {
    pub fn new(grid: &Arc<TorusGrid>, k: u32, dt: f64, focusing: bool) -> Self {
        let n = grid.len();
        let mut ixi = Vec::with_capacity(n);
        let mut e_full = Vec::with_capacity(n);
        let mut e_half = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        for m in 0..n {
            let xi = grid.freq(m);
            ixi.push(Complex64::new(0.0, xi));
            // linear symbol: u_t = -H u_xx => c = -i xi |xi|
            let c = Complex64::new(0.0, -xi * xi.abs());
            let z = c * dt;
            e_full.push(z.exp());
            e_half.push((z * 0.5).exp());
            // phi coefficients by averaging over a unit circle around z
            let mut aq = Complex64::new(0.0, 0.0);
            let mut a1 = Complex64::new(0.0, 0.0);
            let mut a2 = Complex64::new(0.0, 0.0);
            let mut a3 = Complex64::new(0.0, 0.0);
            for j in 0..CONTOUR_POINTS {
                let theta = std::f64::consts::PI * (2.0 * j as f64 + 1.0) / CONTOUR_POINTS as f64;
                let zz = z + Complex64::from_polar(1.0, theta);
                let ez = zz.exp();
                let z2 = zz * zz;
                let z3 = z2 * zz;
                aq += ((zz * 0.5).exp() - 1.0) / zz;
                a1 += (-4.0 - zz + ez * (4.0 - 3.0 * zz + z2)) / z3;
                a2 += (2.0 + zz + ez * (zz - 2.0)) / z3;
                a3 += (-4.0 - 3.0 * zz - z2 + ez * (4.0 - zz)) / z3;
            }
            let scale = dt / CONTOUR_POINTS as f64;
            q.push(aq * scale);
            f1.push(a1 * scale);
            f2.push(a2 * scale);
            f3.push(a3 * scale);
        }
        Stepper {
            k,
            sign: if focusing { 1.0 } else { -1.0 },
            pad: (((k + 3) / 2) as usize).max(grid.pad_factor()),
            dt,
            ixi,
            e_full,
            e_half,
            q,
            f1,
            f2,
            f3,
        }
    }

    /// Spectral coefficients of the nonlinear term `-d/dx(u^{k+1})`.
    fn nonlinear(&self, u: &SpectralField) -> Vec<Complex64> {
        let (p, _) = u.dealiased_power_with(self.k + 1, self.pad);
        p.coeffs()
            .iter()
            .zip(&self.ixi)
            .map(|(c, ix)| self.sign * (c * ix))
            .collect()
    }

    fn field(&self, grid: &Arc<TorusGrid>, coeffs: Vec<Complex64>) -> SpectralField {
        SpectralField::from_coeffs(grid, coeffs)
    }

    /// One ETDRK4 step.
    pub fn step_etdrk4(&self, u: &SpectralField) -> SpectralField {
        let grid = u.grid();
        let v = u.coeffs();
        let nv = self.nonlinear(u);
        let a: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_half[i] * v[i] + self.q[i] * nv[i])
            .collect();
        let na = self.nonlinear(&self.field(grid, a.clone()));
        let b: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_half[i] * v[i] + self.q[i] * na[i])
            .collect();
        let nb = self.nonlinear(&self.field(grid, b));
        let c: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_half[i] * a[i] + self.q[i] * (2.0 * nb[i] - nv[i]))
            .collect();
        let nc = self.nonlinear(&self.field(grid, c));
        let next: Vec<Complex64> = (0..v.len())
            .map(|i| {
                self.e_full[i] * v[i]
                    + self.f1[i] * nv[i]
                    + 2.0 * self.f2[i] * (na[i] + nb[i])
                    + self.f3[i] * nc[i]
            })
            .collect();
        self.field(grid, next)
    }

    /// One integrating-factor RK4 step.
    pub fn step_ifrk4(&self, u: &SpectralField) -> SpectralField {
        let grid = u.grid();
        let v = u.coeffs();
        let h = self.dt;
        let k1 = self.nonlinear(u);
        let s1: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_half[i] * (v[i] + 0.5 * h * k1[i]))
            .collect();
        let k2 = self.nonlinear(&self.field(grid, s1));
        let s2: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_half[i] * v[i] + 0.5 * h * k2[i])
            .collect();
        let k3 = self.nonlinear(&self.field(grid, s2));
        let s3: Vec<Complex64> = (0..v.len())
            .map(|i| self.e_full[i] * v[i] + h * self.e_half[i] * k3[i])
            .collect();
        let k4 = self.nonlinear(&self.field(grid, s3));
        let next: Vec<Complex64> = (0..v.len())
            .map(|i| {
                self.e_full[i] * v[i]
                    + h / 6.0
                        * (self.e_full[i] * k1[i]
                            + 2.0 * self.e_half[i] * (k2[i] + k3[i])
                            + k4[i])
            })
            .collect();
        self.field(grid, next)
    }

    pub fn step(&self, u: &SpectralField, method: Integrator) -> SpectralField {
        match method {
            Integrator::EtdRk4 => self.step_etdrk4(u),
            Integrator::IfRk4 => self.step_ifrk4(u),
        }
    }
}

/// Advance a state by one step of size `dt`.
///
/// Fourth-order accurate; exact on the pure linear flow for the zero field.
/// A non-finite result aborts with a blow-up error carrying the failure time.
pub fn advance(state: &SimState, dt: f64, method: Integrator) -> Result<SimState> {
    assert!(dt > 0.0, "dt must be positive");
    let stepper = Stepper::new(state.u.grid(), state.k, dt, false);
    let u = stepper.step(&state.u, method);
    if !u.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::BlowUp {
            t: state.t + dt,
            what: "non-finite coefficients after step".into(),
        });
    }
    Ok(SimState {
        t: state.t + dt,
        u,
        k: state.k,
        step_count: state.step_count + 1,
    })
}

/// Advance by one signed step (negative `dt` runs the flow backwards);
/// used by the time-reversal checks.
pub fn advance_signed(state: &SimState, dt: f64, method: Integrator) -> Result<SimState> {
    let stepper = Stepper::new(state.u.grid(), state.k, dt, false);
    let u = stepper.step(&state.u, method);
    Ok(SimState {
        t: state.t + dt,
        u,
        k: state.k,
        step_count: state.step_count + 1,
    })
}

/// Run a full simulation. Deterministic: identical configs produce
/// bit-identical trajectories.
pub fn simulate(config: &SimConfig) -> Result<SimOutcome> {
    config.validate()?;
    let grid = config.grid()?;
    let u0 = config.data.build(&grid);
    let guarded = config.data.is_localized();
    let guard0 = u0.boundary_mass_fraction();
    if guarded && guard0 > BOUNDARY_GUARD && u0.l2_norm() > 0.0 {
        return Err(Error::BoundaryGuard {
            t: 0.0,
            fraction: guard0,
        });
    }
    let stepper = Stepper::new(&grid, config.k, config.dt, config.focusing);
    let steps = (config.t_end / config.dt).round() as u64;
    let mut state = SimState {
        t: 0.0,
        u: u0,
        k: config.k,
        step_count: 0,
    };
    let mut times = vec![0.0];
    let mut snaps = vec![state.u.clone()];
    let mut termination = Termination::Completed;
    for step in 1..=steps {
        let u = stepper.step(&state.u, config.integrator);
        let finite = u
            .coeffs()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
            && u.sup_norm() < 1e12;
        if !finite {
            termination = Termination::BlowUp {
                t: step as f64 * config.dt,
            };
            break;
        }
        state = SimState {
            t: step as f64 * config.dt,
            u,
            k: config.k,
            step_count: step,
        };
        if step % config.snapshot_every as u64 == 0 || step == steps {
            let frac = state.u.boundary_mass_fraction();
            if guarded && frac > BOUNDARY_GUARD && state.u.l2_norm() > 0.0 {
                termination = Termination::GuardViolation {
                    t: state.t,
                    fraction: frac,
                };
                break;
            }
            if step % config.snapshot_every as u64 == 0 {
                times.push(state.t);
                snaps.push(state.u.clone());
            }
        }
    }
    let trajectory = Trajectory::from_snapshots(config.k, times, snaps);
    Ok(SimOutcome {
        trajectory,
        termination,
        last_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small_grid() -> Arc<TorusGrid> {
        TorusGrid::new(128, 2.0 * PI * 10.0, 4).unwrap()
    }

    fn gaussian(grid: &Arc<TorusGrid>, amp: f64) -> SpectralField {
        let l = grid.domain_length();
        SpectralField::from_fn(grid, |x| {
            let d = grid.wrap(x - l / 2.0) / 2.0;
            amp * (-d * d).exp()
        })
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = small_grid();
        let state = SimState {
            t: 0.0,
            u: SpectralField::zero(&g),
            k: 6,
            step_count: 0,
        };
        for method in [Integrator::EtdRk4, Integrator::IfRk4] {
            let next = advance(&state, 0.05, method).unwrap();
            assert_eq!(next.u.l2_norm(), 0.0);
            assert_eq!(next.t, 0.05);
        }
    }

    #[test]
    fn tiny_amplitude_matches_linear_flow() {
        let g = small_grid();
        let u = gaussian(&g, 1e-8);
        let state = SimState {
            t: 0.0,
            u: u.clone(),
            k: 6,
            step_count: 0,
        };
        let dt = 0.01;
        let next = advance(&state, dt, Integrator::EtdRk4).unwrap();
        let lin = u.linear_propagate(dt);
        let diff: f64 = next
            .u
            .coeffs()
            .iter()
            .zip(lin.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-20, "diff {diff}");
    }

    #[test]
    fn local_error_is_fifth_order() {
        // Richardson: one dt step vs two dt/2 steps against a dt/100 oracle
        let g = small_grid();
        let u = gaussian(&g, 0.8);
        let k = 6;
        let dt = 0.05;
        let reference = {
            let stepper = Stepper::new(&g, k, dt / 100.0, false);
            let mut v = u.clone();
            for _ in 0..100 {
                v = stepper.step_ifrk4(&v);
            }
            v
        };
        let coarse = Stepper::new(&g, k, dt, false).step_etdrk4(&u);
        let fine = {
            let s = Stepper::new(&g, k, dt / 2.0, false);
            s.step_etdrk4(&s.step_etdrk4(&u))
        };
        let e1 = coarse.sub(&reference).l2_norm();
        let e2 = fine.sub(&reference).l2_norm();
        let ratio = e1 / e2;
        assert!(
            ratio > 16.0 && ratio < 64.0,
            "local error ratio {ratio}, expected near 2^5"
        );
    }

    #[test]
    fn time_reversal_ifrk4() {
        let g = small_grid();
        let u = gaussian(&g, 0.5);
        let state = SimState {
            t: 0.0,
            u: u.clone(),
            k: 6,
            step_count: 0,
        };
        let dt = 0.02;
        let fwd = advance_signed(&state, dt, Integrator::IfRk4).unwrap();
        let back = advance_signed(&fwd, -dt, Integrator::IfRk4).unwrap();
        let err = back.u.sub(&u).l2_norm();
        assert!(err < 10.0 * dt.powi(5), "reversal error {err}");
    }

    #[test]
    fn zero_amplitude_trajectory_is_zero() {
        let config = SimConfig {
            n: 128,
            l: 100.0,
            pad_factor: 4,
            k: 6,
            dt: 0.01,
            t_end: 0.1,
            integrator: Integrator::EtdRk4,
            data: InitialData::Gaussian {
                amp: 0.0,
                width: 2.0,
                center: None,
            },
            snapshot_every: 5,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        let out = simulate(&config).unwrap();
        assert_eq!(out.termination, Termination::Completed);
        for s in &out.trajectory.snapshots {
            assert_eq!(s.l2_norm(), 0.0);
        }
    }

    #[test]
    fn mass_energy_nearly_conserved() {
        let config = SimConfig {
            n: 256,
            l: 100.0,
            pad_factor: 4,
            k: 6,
            dt: 0.005,
            t_end: 1.0,
            integrator: Integrator::EtdRk4,
            data: InitialData::Gaussian {
                amp: 0.5,
                width: 5.0,
                center: None,
            },
            snapshot_every: 50,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        let out = simulate(&config).unwrap();
        assert_eq!(out.termination, Termination::Completed);
        let r0 = &out.trajectory.records[0];
        let rn = out.trajectory.records.last().unwrap();
        assert!((rn.mass - r0.mass).abs() / r0.mass < 1e-9);
        assert!((rn.energy - r0.energy).abs() / r0.energy.abs() < 1e-9);
        // mean mode is untouched by the flow
        assert!((rn.mean - r0.mean).abs() <= 1e-10 * (1.0 + r0.mean.abs()));
    }

    #[test]
    fn determinism() {
        let config = SimConfig {
            n: 128,
            l: 100.0,
            pad_factor: 4,
            k: 6,
            dt: 0.01,
            t_end: 0.2,
            integrator: Integrator::EtdRk4,
            data: InitialData::RandomBand {
                amp: 0.3,
                modes: 10,
                seed: 42,
            },
            snapshot_every: 10,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        for (x, y) in a
            .trajectory
            .snapshots
            .iter()
            .zip(&b.trajectory.snapshots)
        {
            assert_eq!(x.coeffs(), y.coeffs());
        }
    }

    #[test]
    fn huge_dt_focusing_blows_up_with_report() {
        let config = SimConfig {
            n: 128,
            l: 100.0,
            pad_factor: 4,
            k: 6,
            dt: 5.0,
            t_end: 100.0,
            integrator: Integrator::IfRk4,
            data: InitialData::Gaussian {
                amp: 3.0,
                width: 2.0,
                center: None,
            },
            snapshot_every: 1,
            checkpoint_every: 0,
            focusing: true,
            weight_r: None,
            weight_r1: None,
        };
        let out = simulate(&config).unwrap();
        assert!(matches!(out.termination, Termination::BlowUp { .. }));
        // last valid state is finite
        assert!(out.last_state.u.sup_norm().is_finite());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = SimConfig {
            n: 128,
            l: 100.0,
            pad_factor: 4,
            k: 5,
            dt: 0.01,
            t_end: 1.0,
            integrator: Integrator::EtdRk4,
            data: InitialData::Gaussian {
                amp: 0.1,
                width: 2.0,
                center: None,
            },
            snapshot_every: 10,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        assert!(matches!(config.validate(), Err(Error::BadPower(5))));
        config.k = 6;
        config.dt = -1.0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn off_center_data_trips_guard() {
        let config = SimConfig {
            n: 128,
            l: 100.0,
            pad_factor: 4,
            k: 6,
            dt: 0.01,
            t_end: 0.1,
            integrator: Integrator::EtdRk4,
            data: InitialData::Gaussian {
                amp: 0.5,
                width: 5.0,
                center: Some(2.0), // sits right at the wrap point
            },
            snapshot_every: 5,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        assert!(matches!(
            simulate(&config),
            Err(Error::BoundaryGuard { .. })
        ));
    }
}
