//! Adiabatic quantum evolution over curvature-indexed level ladders.
//!
//! The library models a family of Hamiltonians steered by a single real
//! parameter `gamma = beta * R(t)`, where `R(t)` is a scalar curvature profile
//! and `beta` an inverse temperature.  On top of that it provides:
//!
//! * exact spectral propagation and adiabaticity diagnostics ([`propagator`]),
//! * dynamical/geometric phase split of the evolved state ([`phase`]),
//! * a partition sum built from the connection integral and several routes to
//!   the expected energy ([`thermo`]),
//! * the trace-matched energy constant and a cosmological-constant estimate
//!   ([`gravity`]),
//! * modular reduction of large integer scales onto a finite index set
//!   ([`reduction`]).

pub mod error;
pub mod geometry;
pub mod gravity;
pub mod model;
pub mod phase;
pub mod propagator;
pub mod quad;
pub mod reduction;
pub mod thermo;

pub use error::{Error, Result};

use geometry::{CurvatureProfile, ThermoParams};
use model::QuantumModel;

/// A model plus the drive that steers it.  Bundles the pieces almost every
/// operation needs: the Hamiltonian family, the curvature profile, the
/// thermodynamic parameters entering `gamma = beta * R`, and `hbar`.
#[derive(Debug, Clone, Copy)]
pub struct System<'a> {
    pub model: &'a QuantumModel,
    pub profile: &'a CurvatureProfile,
    pub thermo: &'a ThermoParams,
    pub hbar: f64,
}

impl<'a> System<'a> {
    pub fn new(
        model: &'a QuantumModel,
        profile: &'a CurvatureProfile,
        thermo: &'a ThermoParams,
        hbar: f64,
    ) -> Result<Self> {
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(Error::domain("hbar", format!("must be finite and positive, got {hbar}")));
        }
        Ok(System { model, profile, thermo, hbar })
    }

    /// Steering parameter at time `t`.
    pub fn gamma_at(&self, t: f64) -> Result<f64> {
        geometry::gamma_at(self.profile, self.thermo, t)
    }

    /// Curvature value at time `t`.
    pub fn curvature_at(&self, t: f64) -> Result<f64> {
        self.profile.curvature_at(t)
    }
}
