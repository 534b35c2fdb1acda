//! Splitting the evolved state's accumulated argument into dynamical and
//! geometric parts.
//!
//! The dynamical angle is `-(1/hbar) * integral of E_j(gamma(t)) dt`.  The
//! analytic geometric angle is the connection-weighted integral
//! `-beta * integral of A_j(u; beta) du` between the endpoint values of the
//! steering parameter `u = gamma`.  The numeric geometric angle is read off a
//! propagated trajectory: the overlap argument against the instantaneous
//! eigenstate, minus the running dynamical angle, unwrapped step by step so
//! no branch cuts are crossed silently.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::Trajectory;
use crate::quad;
use crate::System;

/// Quadrature tolerance used for the phase and partition integrals.
pub const QUAD_TOL: f64 = 1e-10;

/// Extraction refuses to trust overlaps once the instantaneous fidelity falls
/// below this floor.
pub const FIDELITY_FLOOR: f64 = 0.99;

/// Which variable the geometric integral bounds refer to: the steering
/// parameter `u = beta * R` (default) or the bare curvature `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsReading {
    Gamma,
    Curvature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDecomposition {
    /// Total phase exponent `i * (dynamical + geometric)`; purely imaginary,
    /// so `exp` of it has unit modulus.
    pub omega_total: Complex64,
    pub dynamical_angle: f64,
    pub geometric_angle_numeric: f64,
    pub geometric_angle_analytic: f64,
    /// `|numeric - analytic|` after branch alignment into `(-pi, pi]`.
    pub residual: f64,
}

/// Wrap an angle difference into `(-pi, pi]`.
pub fn wrap_angle(d: f64) -> f64 {
    let mut w = d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
    if w <= -std::f64::consts::PI {
        w += std::f64::consts::TAU;
    }
    w
}

/// `-(1/hbar) * integral of E_j(gamma(t)) dt` over `[t0, t1]`.
pub fn dynamical_phase(system: &System, j: usize, t0: f64, t1: f64) -> Result<f64> {
    check_range(system, t0, t1)?;
    let dim = system.model.dim();
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dimension: dim });
    }
    let energy = |t: f64| -> f64 {
        system
            .gamma_at(t)
            .and_then(|gamma| system.model.eigen_energy(j, gamma))
            .unwrap_or(f64::NAN)
    };
    Ok(-quad::simpson(energy, t0, t1, QUAD_TOL)? / system.hbar)
}

/// Analytic geometric angle with the default bounds reading (`u = beta * R`).
pub fn geometric_phase_analytic(system: &System, j: usize, t0: f64, t1: f64) -> Result<f64> {
    geometric_phase_analytic_with(system, j, t0, t1, BoundsReading::Gamma)
}

/// Analytic geometric angle `-beta * integral of A_j` with selectable bounds
/// variable.  Under the default reading the integral runs between the
/// endpoint steering values; under [`BoundsReading::Curvature`] it runs
/// between the endpoint curvatures.
pub fn geometric_phase_analytic_with(
    system: &System,
    j: usize,
    t0: f64,
    t1: f64,
    reading: BoundsReading,
) -> Result<f64> {
    check_range(system, t0, t1)?;
    let dim = system.model.dim();
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dimension: dim });
    }
    let beta = system.thermo.beta();
    let scale = system.thermo.gamma_scale();
    let connection = |gamma: f64| -> f64 {
        system.model.berry_connection(j, gamma, beta).map(|c| c.value).unwrap_or(f64::NAN)
    };
    let integral = match reading {
        BoundsReading::Gamma => {
            let u0 = system.gamma_at(t0)?;
            let u1 = system.gamma_at(t1)?;
            quad::simpson(connection, u0, u1, QUAD_TOL)?
        }
        BoundsReading::Curvature => {
            let r0 = system.curvature_at(t0)?;
            let r1 = system.curvature_at(t1)?;
            quad::simpson(|r| connection(scale * beta * r), r0, r1, QUAD_TOL)?
        }
    };
    Ok(-beta * integral)
}

/// Geometric angle read off a propagated trajectory.
///
/// At each grid time the overlap `<phi_j(gamma(t)) | psi(t)>` is formed; its
/// argument minus the running dynamical angle advances continuously, with
/// per-step increments wrapped into `(-pi, pi]`.  The final unwrapped value
/// is returned.  Refuses trajectories whose fidelity to level `j` dips below
/// [`FIDELITY_FLOOR`].
pub fn geometric_phase_numeric(trajectory: &Trajectory, system: &System, j: usize) -> Result<f64> {
    let dim = system.model.dim();
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dimension: dim });
    }
    let m = trajectory.times.len();
    if m < 2 || trajectory.states.len() != m {
        return Err(Error::domain("trajectory", "needs at least two aligned samples"));
    }

    let beta = system.thermo.beta();
    let mut overlap_args = Vec::with_capacity(m);
    let mut min_fidelity = f64::INFINITY;
    for (t, psi) in trajectory.times.iter().zip(&trajectory.states) {
        let phi = system.model.basis_state(j, system.gamma_at(*t)?, beta)?;
        let overlap = phi.dotc(psi);
        min_fidelity = min_fidelity.min(overlap.norm_sqr());
        overlap_args.push(overlap.arg());
    }
    if min_fidelity < FIDELITY_FLOOR {
        return Err(Error::NonAdiabatic { min_fidelity, floor: FIDELITY_FLOOR });
    }

    // Running dynamical angle on the same grid, one Simpson panel per step.
    let energy = |t: f64| -> Result<f64> {
        system.model.eigen_energy(j, system.gamma_at(t)?)
    };
    let mut geometric = overlap_args[0];
    let mut theta_d = 0.0;
    let mut prev = overlap_args[0];
    let mut e_left = energy(trajectory.times[0])?;
    for (k, arg) in overlap_args.iter().enumerate().skip(1) {
        let (a, b) = (trajectory.times[k - 1], trajectory.times[k]);
        let e_mid = energy(0.5 * (a + b))?;
        let e_right = energy(b)?;
        theta_d -= (b - a) / 6.0 * (e_left + 4.0 * e_mid + e_right) / system.hbar;
        e_left = e_right;

        let x = arg - theta_d;
        geometric += wrap_angle(x - prev);
        prev = x;
    }
    Ok(geometric)
}

/// Full phase split over the span of a trajectory.
pub fn decompose(trajectory: &Trajectory, system: &System, j: usize) -> Result<PhaseDecomposition> {
    let t0 = *trajectory.times.first().ok_or_else(|| Error::domain("trajectory", "empty"))?;
    let t1 = *trajectory.times.last().expect("nonempty");
    let dynamical_angle = dynamical_phase(system, j, t0, t1)?;
    let geometric_angle_numeric = geometric_phase_numeric(trajectory, system, j)?;
    let geometric_angle_analytic = geometric_phase_analytic(system, j, t0, t1)?;
    let residual = wrap_angle(geometric_angle_numeric - geometric_angle_analytic).abs();
    Ok(PhaseDecomposition {
        omega_total: Complex64::new(0.0, dynamical_angle + geometric_angle_numeric),
        dynamical_angle,
        geometric_angle_numeric,
        geometric_angle_analytic,
        residual,
    })
}

fn check_range(system: &System, t0: f64, t1: f64) -> Result<()> {
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(Error::domain("time range", format!("need finite t1 >= t0, got [{t0}, {t1}]")));
    }
    // Surfaces interval violations before quadrature turns them into NaNs.
    system.gamma_at(t0)?;
    system.gamma_at(t1)?;
    Ok(())
}
