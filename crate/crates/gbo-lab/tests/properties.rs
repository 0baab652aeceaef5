//! Property-based invariants of the spectral field algebra on random data.

use gbo_lab::{SpectralField, TorusGrid};
use proptest::prelude::*;

fn field(samples: &[f64]) -> SpectralField {
    let grid = TorusGrid::new(64, 50.0, 4).unwrap();
    SpectralField::from_samples(&grid, samples)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Re-analyzing a field's own samples is the identity: the realness and
    /// Nyquist projections are idempotent.
    #[test]
    fn analysis_is_idempotent(samples in prop::collection::vec(-1.0f64..1.0, 64)) {
        let u = field(&samples);
        let v = SpectralField::from_samples(u.grid(), &u.values());
        let diff = u.sub(&v).sup_norm();
        prop_assert!(diff <= 1e-12 * (1.0 + u.sup_norm()), "diff {diff:.3e}");
    }

    /// Parseval: the spectral L2 norm matches trapezoid quadrature of u^2.
    #[test]
    fn parseval(samples in prop::collection::vec(-1.0f64..1.0, 64)) {
        let u = field(&samples);
        let vals = u.values();
        let dx = u.grid().dx();
        let quad = vals.iter().map(|v| v * v * dx).sum::<f64>().sqrt();
        prop_assert!((u.l2_norm() - quad).abs() <= 1e-10 * (1.0 + quad));
    }

    /// The Hilbert transform is an isometry on mean-free fields and kills
    /// the mean mode.
    #[test]
    fn hilbert_isometry(samples in prop::collection::vec(-1.0f64..1.0, 64)) {
        let u = field(&samples);
        let h = u.hilbert();
        prop_assert!(h.mean().abs() <= 1e-12);
        let mean_free = (u.l2_norm().powi(2)
            - u.mean().powi(2) * u.grid().domain_length())
            .max(0.0)
            .sqrt();
        prop_assert!((h.l2_norm() - mean_free).abs() <= 1e-10 * (1.0 + mean_free));
    }

    /// Dealiased multiplication is commutative.
    #[test]
    fn product_commutes(
        a in prop::collection::vec(-1.0f64..1.0, 64),
        b in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let u = field(&a);
        let v = field(&b);
        let uv = u.dealiased_product(&v, 4);
        let vu = v.dealiased_product(&u, 4);
        prop_assert!(uv.sub(&vu).sup_norm() <= 1e-12 * (1.0 + uv.sup_norm()));
    }

    /// Linear propagation conserves every homogeneous Sobolev norm and
    /// composes additively in time.
    #[test]
    fn propagator_group_law(
        samples in prop::collection::vec(-1.0f64..1.0, 64),
        t1 in -2.0f64..2.0,
        t2 in -2.0f64..2.0,
    ) {
        let u = field(&samples);
        let a = u.linear_propagate(t1).linear_propagate(t2);
        let b = u.linear_propagate(t1 + t2);
        prop_assert!(a.sub(&b).sup_norm() <= 1e-9 * (1.0 + u.sup_norm()));
        let n0 = u.sobolev_norm(0.5, true);
        let n1 = a.sobolev_norm(0.5, true);
        prop_assert!((n0 - n1).abs() <= 1e-10 * (1.0 + n0));
    }
}
