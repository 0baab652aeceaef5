//! Sign verification for the windowed functional
//! `f(u) = \int chi^2 u^{k+1} D_x u` on the finite-dimensional sphere
//! `{ u : |u|_{H-dot^alpha} = 1, u mean-free, modes <= N }` with
//! `alpha = 1/2 - 2/(k+2)`.
//!
//! The minimum is located by projected gradient descent with restarts and
//! cross-checked against the Lagrange and Pohozaev identities an extremizer
//! must satisfy, plus a brute-force random falsifier.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::weights::WeightFamily;

/// Scaling-critical exponent of the constraint norm.
pub fn sphere_alpha(k: u32) -> f64 {
    0.5 - 2.0 / (k as f64 + 2.0)
}

/// Choice of window in the functional.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChiSpec {
    /// `chi = 1`; the second-derivative modulus vanishes.
    One,
    /// Compactly supported cutoff with core radius `r`, transition `r1`
    /// (in units of the `2 pi` torus circumference).
    Cutoff { r: f64, r1: f64 },
}

pub struct SphereProblem {
    pub k: u32,
    pub alpha: f64,
    pub n_modes: usize,
    pub chi_spec: ChiSpec,
    grid: Arc<TorusGrid>,
    /// `chi^2` sampled on the padded quadrature lattice.
    chi_sq_padded: Vec<f64>,
    chi_sq_d2_sup: f64,
    pad: usize,
}

pub fn build_problem(k: u32, n_modes: usize, chi_spec: ChiSpec) -> Result<SphereProblem> {
    if k % 2 != 0 || k < 4 {
        return Err(Error::BadPower(k));
    }
    if n_modes == 0 {
        return Err(Error::InvalidConfig("n_modes must be positive".into()));
    }
    // quadrature lattice wide enough that products up to degree k+2 of
    // band-limited factors are integrated exactly
    let n = (8 * n_modes).next_power_of_two().max(16);
    let pad = ((k as usize + 3) / 2).max(4);
    let grid = TorusGrid::new(n, 2.0 * PI, pad)?;
    let np = n * pad;
    let dxp = 2.0 * PI / np as f64;
    let (chi_sq_padded, chi_sq_d2_sup) = match chi_spec {
        ChiSpec::One => (vec![1.0; np], 0.0),
        ChiSpec::Cutoff { r, r1 } => {
            let w = WeightFamily::build(&grid, r, r1)?;
            let samples: Vec<f64> = (0..np)
                .map(|m| {
                    let c = w.chi_at(m as f64 * dxp);
                    c * c
                })
                .collect();
            (samples, w.chi_sq_d2_sup())
        }
    };
    Ok(SphereProblem {
        k,
        alpha: sphere_alpha(k),
        n_modes,
        chi_spec,
        grid,
        chi_sq_padded,
        chi_sq_d2_sup,
        pad,
    })
}

impl SphereProblem {
    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn chi_sq_d2_sup(&self) -> f64 {
        self.chi_sq_d2_sup
    }

    /// Project a field onto the feasible subspace: mean-free, modes
    /// `1..=n_modes` only.
    pub fn project(&self, u: &SpectralField) -> SpectralField {
        let n = self.grid.len();
        let mut coeffs = u.coeffs().to_vec();
        for m in 0..n {
            let idx = TorusGrid::signed_index(m, n).unsigned_abs() as usize;
            if idx == 0 || idx > self.n_modes {
                coeffs[m] = Complex64::new(0.0, 0.0);
            }
        }
        SpectralField::from_coeffs(&self.grid, coeffs)
    }

    /// Random feasible point on the sphere, coefficients colored by `1/|m|`.
    pub fn random_point(&self, rng: &mut ChaCha8Rng) -> SpectralField {
        let mut f = SpectralField::zero(&self.grid);
        for m in 1..=self.n_modes as i64 {
            let scale = 1.0 / m as f64;
            f.set_coeff(
                m,
                Complex64::new(
                    scale * rng.gen_range(-1.0..1.0),
                    scale * rng.gen_range(-1.0..1.0),
                ),
            );
        }
        self.renormalize(&f)
    }

    pub fn sphere_norm(&self, u: &SpectralField) -> f64 {
        u.sobolev_norm(self.alpha, true)
    }

    pub fn renormalize(&self, u: &SpectralField) -> SpectralField {
        let nrm = self.sphere_norm(u);
        assert!(nrm > 0.0, "cannot renormalize the zero field");
        u.scale(1.0 / nrm)
    }

    /// `f(u) = \int chi^2 u^{k+1} D_x u` on the padded quadrature lattice.
    pub fn eval_f(&self, u: &SpectralField) -> f64 {
        let uv = u.values_padded(self.pad);
        let dv = u.frac_deriv(1.0).expect("s = 1").values_padded(self.pad);
        let np = uv.len();
        let dxp = self.grid.domain_length() / np as f64;
        (0..np)
            .map(|m| self.chi_sq_padded[m] * uv[m].powi(self.k as i32 + 1) * dv[m])
            .sum::<f64>()
            * dxp
    }

    /// `L^2` gradient of `f`, projected to the feasible subspace:
    /// `Q[(k+1) chi^2 u^k D_x u + D_x(chi^2 u^{k+1})]`.
    pub fn grad_f(&self, u: &SpectralField) -> SpectralField {
        let uv = u.values_padded(self.pad);
        let dv = u.frac_deriv(1.0).expect("s = 1").values_padded(self.pad);
        let np = uv.len();
        let ki = self.k as i32;
        let t1: Vec<f64> = (0..np)
            .map(|m| (ki as f64 + 1.0) * self.chi_sq_padded[m] * uv[m].powi(ki) * dv[m])
            .collect();
        let w: Vec<f64> = (0..np)
            .map(|m| self.chi_sq_padded[m] * uv[m].powi(ki + 1))
            .collect();
        let t1f = u.project_from_padded(&t1, self.pad);
        let wf = u
            .project_from_padded(&w, self.pad)
            .frac_deriv(1.0)
            .expect("s = 1");
        self.project(&t1f.add(&wf))
    }

    /// Constraint gradient direction `D^{2 alpha} u` (the feasible subspace
    /// is invariant under it).
    pub fn constraint_grad(&self, u: &SpectralField) -> SpectralField {
        u.frac_deriv(2.0 * self.alpha).expect("2 alpha > -1/2")
    }

    /// Component of `g` tangent to the sphere at `u`.
    pub fn tangent(&self, u: &SpectralField, g: &SpectralField) -> SpectralField {
        let w = self.constraint_grad(u);
        let ww = w.inner(&w);
        let coeff = g.inner(&w) / ww;
        g.sub(&w.scale(coeff))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PohozaevResiduals {
    /// `|grad f(u0) - lambda D^{2 alpha} u0|_{L^2}`
    pub lagrange: f64,
    /// defect of `lambda = (k+2) f(u0)` recomputed via the inner product
    pub pohozaev1: f64,
    /// defect of the `D_x`-paired identity
    pub pohozaev2: f64,
}

/// The identities an extremizer on the sphere must satisfy, evaluated at a
/// candidate `u0`. `lambda` is taken as `(k+2) f(u0)`.
pub fn pohozaev_residuals(problem: &SphereProblem, u0: &SpectralField) -> PohozaevResiduals {
    let k = problem.k;
    let f0 = problem.eval_f(u0);
    let lambda = (k as f64 + 2.0) * f0;
    let grad = problem.grad_f(u0);
    let w = problem.constraint_grad(u0);
    let lag = grad.sub(&w.scale(lambda)).l2_norm();
    let p1 = (grad.inner(u0) - lambda).abs();
    // lambda <D^{2a}u0, D_x u0> = (k+1) \int chi^2 u0^k [(D_x u0)^2 + (d_x u0)^2]
    //                             - (1/(k+2)) \int (chi^2)'' u0^{k+2}
    let dxu = u0.frac_deriv(1.0).expect("s = 1");
    let lhs = lambda * w.inner(&dxu);
    let pad = problem.pad;
    let uv = u0.values_padded(pad);
    let dv = dxu.values_padded(pad);
    let pv = u0.deriv().values_padded(pad);
    let np = uv.len();
    let dxp = problem.grid.domain_length() / np as f64;
    let mut rhs = (0..np)
        .map(|m| {
            (k as f64 + 1.0)
                * problem.chi_sq_padded[m]
                * uv[m].powi(k as i32)
                * (dv[m] * dv[m] + pv[m] * pv[m])
        })
        .sum::<f64>()
        * dxp;
    if let ChiSpec::Cutoff { .. } = problem.chi_spec {
        // second-derivative window samples on the padded lattice
        let w_fam = match problem.chi_spec {
            ChiSpec::Cutoff { r, r1 } => WeightFamily::build(&problem.grid, r, r1).unwrap(),
            ChiSpec::One => unreachable!(),
        };
        let corr = (0..np)
            .map(|m| {
                let x = m as f64 * dxp;
                let d2 = {
                    // interpolate (chi^2)'' from the family's base lattice
                    let table = w_fam.chi_sq_d2();
                    let n = problem.grid.len();
                    let dx = problem.grid.dx();
                    let f = (x / dx).rem_euclid(n as f64);
                    let i0 = f.floor() as usize % n;
                    let i1 = (i0 + 1) % n;
                    let t = f - f.floor();
                    table[i0] * (1.0 - t) + table[i1] * t
                };
                d2 * uv[m].powi(k as i32 + 2)
            })
            .sum::<f64>()
            * dxp;
        rhs -= corr / (k as f64 + 2.0);
    }
    PohozaevResiduals {
        lagrange: lag,
        pohozaev1: p1,
        pohozaev2: (lhs - rhs).abs(),
    }
}

pub struct MinimizeOutcome {
    pub minimizer: SpectralField,
    pub f_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient descent on the sphere with Armijo backtracking and
/// renormalization retraction.
pub fn minimize_sphere(
    problem: &SphereProblem,
    init: &SpectralField,
    tol: f64,
    max_iter: usize,
) -> MinimizeOutcome {
    let mut u = problem.renormalize(&problem.project(init));
    let mut fu = problem.eval_f(&u);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let g = problem.tangent(&u, &problem.grad_f(&u));
        let gn = g.l2_norm();
        if gn < tol * (1.0 + fu.abs()) {
            converged = true;
            break;
        }
        let mut step = 1.0 / (1.0 + gn);
        let mut advanced = false;
        for _ in 0..40 {
            let trial = problem.renormalize(&u.sub(&g.scale(step)));
            let ft = problem.eval_f(&trial);
            // Armijo: require a decrease proportional to the step
            if ft <= fu - 1e-4 * step * gn * gn {
                u = trial;
                fu = ft;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            converged = gn < 1e3 * tol * (1.0 + fu.abs());
            break;
        }
    }
    MinimizeOutcome {
        minimizer: u,
        f_min: fu,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremizerReport {
    pub k: u32,
    pub alpha: f64,
    #[serde(rename = "N_modes")]
    pub n_modes: usize,
    pub chi_spec: ChiSpec,
    pub f_min: f64,
    pub lambda: f64,
    pub residuals: PohozaevResiduals,
    pub restarts: usize,
    pub samples: usize,
}

/// Multi-start minimization plus a random falsifier sweep; the report
/// carries the best minimum found and the extremizer identities at it.
pub fn extremize(
    problem: &SphereProblem,
    restarts: usize,
    samples: usize,
    seed: u64,
) -> ExtremizerReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<MinimizeOutcome> = None;
    for _ in 0..restarts {
        let init = problem.random_point(&mut rng);
        let out = minimize_sphere(problem, &init, 1e-10, 4000);
        if best.as_ref().map_or(true, |b| out.f_min < b.f_min) {
            best = Some(out);
        }
    }
    // falsifier: cheap random probes, polishing the lowest ones
    let mut probes: Vec<(f64, SpectralField)> = (0..samples)
        .map(|_| {
            let p = problem.random_point(&mut rng);
            (problem.eval_f(&p), p)
        })
        .collect();
    probes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (_, p) in probes.iter().take(10) {
        let out = minimize_sphere(problem, p, 1e-10, 4000);
        if best.as_ref().map_or(true, |b| out.f_min < b.f_min) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one start");
    let residuals = pohozaev_residuals(problem, &best.minimizer);
    ExtremizerReport {
        k: problem.k,
        alpha: problem.alpha,
        n_modes: problem.n_modes,
        chi_spec: problem.chi_spec.clone(),
        f_min: best.f_min,
        lambda: (problem.k as f64 + 2.0) * best.f_min,
        residuals,
        restarts,
        samples,
    }
}

/// Ratio `|u|_{L^{k+2}}^{k+2} / (|u|_{H-dot^{alpha+1/2}}^2 |u|_{H-dot^alpha}^k)`
/// for the embedding underlying the positivity bound; finite for mean-free
/// band-limited fields.
pub fn embedding_ratio(u: &SpectralField, k: u32) -> Result<f64> {
    if u.mean().abs() > 1e-12 * (1.0 + u.l2_norm()) {
        return Err(Error::InvalidConfig(
            "embedding ratio requires a mean-free field".into(),
        ));
    }
    let a = sphere_alpha(k);
    let num = u.lp_norm(k as f64 + 2.0).powi(k as i32 + 2);
    let d1 = u.sobolev_norm(a + 0.5, true).powi(2);
    let d2 = u.sobolev_norm(a, true).powi(k as i32);
    if d1 * d2 == 0.0 {
        return Err(Error::EmptyInput("zero field".into()));
    }
    Ok(num / (d1 * d2))
}
