//! Laboratory units (eV, nm) versus model units.
//!
//! Model units measure lengths in nanometres and energies in multiples of
//! 0.038 eV, which makes `hbar^2 / 2m = 1` for a free electron.

/// Energy in eV corresponding to one model energy unit.
pub const ENERGY_QUANTUM_EV: f64 = 0.038;

/// Length in nm corresponding to one model length unit.
pub const LENGTH_UNIT_NM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub energy_quantum: f64,
    pub length_unit: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl UnitSystem {
    pub const STANDARD: UnitSystem = UnitSystem {
        energy_quantum: ENERGY_QUANTUM_EV,
        length_unit: LENGTH_UNIT_NM,
    };

    pub fn ev_to_model(&self, e_ev: f64) -> f64 {
        e_ev / self.energy_quantum
    }

    pub fn model_to_ev(&self, e_model: f64) -> f64 {
        e_model * self.energy_quantum
    }

    pub fn nm_to_model(&self, x_nm: f64) -> f64 {
        x_nm / self.length_unit
    }

    pub fn model_to_nm(&self, x_model: f64) -> f64 {
        x_model * self.length_unit
    }
}

/// Converts an energy in eV to model units.
pub fn ev_to_model(e_ev: f64) -> f64 {
    UnitSystem::STANDARD.ev_to_model(e_ev)
}

/// Converts a model-unit energy back to eV.
pub fn model_to_ev(e_model: f64) -> f64 {
    UnitSystem::STANDARD.model_to_ev(e_model)
}

pub fn nm_to_model(x_nm: f64) -> f64 {
    UnitSystem::STANDARD.nm_to_model(x_nm)
}

pub fn model_to_nm(x_model: f64) -> f64 {
    UnitSystem::STANDARD.model_to_nm(x_model)
}
