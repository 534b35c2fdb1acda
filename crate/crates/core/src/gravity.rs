//! Trace-matched energetics in D dimensions.
//!
//! Taking the trace of the field equations with a perfect-fluid source of
//! energy `E` gives `kappa E = R (1 - D/2) + Lambda D` with
//! `kappa = 8 pi G / c^4`.  Matching that against the constant-connection
//! energy `omega (1 - beta) delta_R` fixes the proportionality constant
//! `omega = (1 - D/2) c^4 / (8 pi G (1 - beta))`, which has a pole at
//! `beta = 1`.  The cosmological term is sourced by the explicit
//! beta-dependence of the connection.

use crate::error::{Error, Result};
use crate::phase;
use crate::quad;
use crate::thermo;
use crate::System;

/// Gravitational and quantum constants, with the coupling `kappa` derived
/// from them.  All values are positive; dimension counts spacetime
/// dimensions and must be at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConstants {
    g: f64,
    c: f64,
    hbar: f64,
    k_b: f64,
    planck_length: f64,
    dimension: u32,
    kappa: f64,
}

/// Relative slack allowed between a caller-supplied kappa and `8 pi G / c^4`.
pub const KAPPA_TOL: f64 = 1e-14;

impl PhysicalConstants {
    /// Planck units: every constant 1, four spacetime dimensions.
    pub fn planck() -> Self {
        PhysicalConstants {
            g: 1.0,
            c: 1.0,
            hbar: 1.0,
            k_b: 1.0,
            planck_length: 1.0,
            dimension: 4,
            kappa: 8.0 * std::f64::consts::PI,
        }
    }

    pub fn new(
        g: f64,
        c: f64,
        hbar: f64,
        k_b: f64,
        planck_length: f64,
        dimension: u32,
    ) -> Result<Self> {
        for (name, v) in
            [("g", g), ("c", c), ("hbar", hbar), ("k_b", k_b), ("planck_length", planck_length)]
        {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain("constants", format!("{name} must be positive, got {v}")));
            }
        }
        if dimension < 2 {
            return Err(Error::domain("dimension", format!("need at least 2, got {dimension}")));
        }
        let kappa = 8.0 * std::f64::consts::PI * g / c.powi(4);
        Ok(PhysicalConstants { g, c, hbar, k_b, planck_length, dimension, kappa })
    }

    /// Like [`PhysicalConstants::new`] but with an explicit kappa, which must
    /// agree with `8 pi G / c^4` to within [`KAPPA_TOL`] relative.
    pub fn with_kappa(
        g: f64,
        c: f64,
        hbar: f64,
        k_b: f64,
        planck_length: f64,
        dimension: u32,
        kappa: f64,
    ) -> Result<Self> {
        let base = Self::new(g, c, hbar, k_b, planck_length, dimension)?;
        if (kappa - base.kappa).abs() > KAPPA_TOL * base.kappa.abs() {
            return Err(Error::domain(
                "kappa",
                format!("{kappa} disagrees with 8 pi G / c^4 = {}", base.kappa),
            ));
        }
        Ok(PhysicalConstants { kappa, ..base })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn planck_length(&self) -> f64 {
        self.planck_length
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Energy from the trace of the field equations:
/// `E = [R (1 - D/2) + Lambda D] / kappa`.
pub fn einstein_trace_energy(curvature: f64, constants: &PhysicalConstants, lambda: f64) -> f64 {
    let d = constants.dimension as f64;
    (curvature * (1.0 - d / 2.0) + lambda * d) / constants.kappa
}

/// Trace-matched proportionality constant
/// `omega = (1 - D/2) c^4 / (8 pi G (1 - beta))`; `beta = 1` is a pole and is
/// rejected outright.
pub fn omega_constant(beta: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::domain("beta", format!("must be finite, got {beta}")));
    }
    if beta == 1.0 {
        return Err(Error::BetaPole);
    }
    let d = constants.dimension as f64;
    Ok((1.0 - d / 2.0) * constants.c.powi(4)
        / (8.0 * std::f64::consts::PI * constants.g * (1.0 - beta)))
}

/// Residual between the constant-connection energy at the trace-matched
/// omega and the trace-form energy with no cosmological term.  Algebraically
/// zero for every beta != 1.
pub fn trace_consistency(beta: f64, delta_r: f64, constants: &PhysicalConstants) -> Result<f64> {
    let omega = omega_constant(beta, constants)?;
    let matched = thermo::expected_energy_const_omega(omega, beta, delta_r);
    let trace = einstein_trace_energy(delta_r, constants, 0.0);
    Ok(matched - trace)
}

/// Cosmological constant sourced by the explicit beta-dependence of the
/// connection:
/// `Lambda = -(beta 8 pi G / (D c^4)) * integral of dA/dbeta du`.
pub fn cosmological_constant(
    system: &System,
    j: usize,
    t0: f64,
    t1: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let dim = system.model.dim();
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dimension: dim });
    }
    let beta = system.thermo.beta();
    let u0 = system.gamma_at(t0)?;
    let u1 = system.gamma_at(t1)?;
    let dbeta = |u: f64| -> f64 {
        system.model.connection_beta_derivative(j, u, beta).unwrap_or(f64::NAN)
    };
    let integral = quad::simpson(dbeta, u0, u1, phase::QUAD_TOL)?;
    let d = constants.dimension as f64;
    Ok(-(beta * 8.0 * std::f64::consts::PI * constants.g) / (d * constants.c.powi(4)) * integral)
}
