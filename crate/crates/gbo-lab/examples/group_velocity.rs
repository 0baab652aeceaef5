//! Track modulated wave packets and compare their speed to the group
//! velocity 2|xi0| of the linear dispersion.

use gbo_lab::diagnostics::packet_velocity;
use gbo_lab::solver::{simulate, InitialData, Integrator, SimConfig};

fn main() {
    for &carrier in &[4.0, 8.0, 16.0] {
        // keep the carrier well below the Nyquist frequency pi*N/L
        let config = SimConfig {
            n: 4096,
            l: 400.0,
            pad_factor: 4,
            k: 6,
            dt: 0.002,
            t_end: 4.0,
            integrator: Integrator::EtdRk4,
            data: InitialData::ModulatedGaussian {
                amp: 0.01,
                width: 8.0,
                carrier,
                center: Some(-100.0),
            },
            snapshot_every: 200,
            checkpoint_every: 0,
            focusing: false,
            weight_r: None,
            weight_r1: None,
        };
        let outcome = simulate(&config).unwrap();
        let v = packet_velocity(&outcome.trajectory).unwrap();
        let expected = 2.0 * carrier;
        let rel = (v - expected).abs() / expected;
        println!(
            "carrier {carrier:5.1}: measured speed {v:8.3}, expected {expected:5.1}, rel err {rel:.2e}"
        );
        assert!(rel < 0.05, "packet speed should match 2|xi0| within 5%");
    }
}
