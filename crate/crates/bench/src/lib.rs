//! Shared fixtures for the criterion benchmarks.

use kronig_core::units::ev_to_model;
use kronig_core::ModelParams;

/// 0.5 eV barriers, `gamma = 0.1`, 500 nm device.
pub fn reference_lattice(n: u64) -> ModelParams {
    ModelParams::new(ev_to_model(0.5), 0.1, 500.0, n).expect("valid reference parameters")
}

/// `steps` energies spread evenly over `(0, e_max]`.
pub fn energy_grid(e_max: f64, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|i| e_max * i as f64 / steps as f64)
        .collect()
}
