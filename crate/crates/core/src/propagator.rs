//! Time evolution under the steered Hamiltonian.
//!
//! Each step applies the exponential midpoint rule: the propagator over
//! `[t_k, t_k + dt]` is `exp(-i H(t_mid) dt / hbar)`, evaluated in spectral
//! form from the model's analytic eigenpairs.  Each step is exactly unitary,
//! so norm drift can only come from roundoff; the scheme is second order in
//! `dt` overall.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::System;

/// Unitarity guard: a drift of `max_k |norm(psi_k) - 1|` beyond this aborts
/// the run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;

/// Spectral gaps below this floor count as degenerate when a pair of levels
/// is actually coupled by the drive.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Uniform grid `t_0 .. t_1`, `steps + 1` entries.
    pub times: Vec<f64>,
    /// State at each grid time; `states[0]` is the chosen eigenstate.
    pub states: Vec<DVector<Complex64>>,
    pub step_size: f64,
    /// `max_k |norm(psi_k) - 1|` over the run.
    pub norm_drift: f64,
    /// Largest adiabaticity ratio seen at any step midpoint.
    pub adiabaticity_max: f64,
}

/// Evolve the eigenstate `j0` of the initial Hamiltonian across `[t0, t1]`
/// with `steps` uniform midpoint-rule steps.
pub fn propagate(
    system: &System,
    j0: usize,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Trajectory> {
    let n = system.model.dim();
    if j0 >= n {
        return Err(Error::IndexOutOfRange { index: j0, dimension: n });
    }
    if steps < 10 {
        return Err(Error::domain("steps", format!("need at least 10, got {steps}")));
    }
    if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
        return Err(Error::domain("time range", format!("need finite t1 > t0, got [{t0}, {t1}]")));
    }

    let beta = system.thermo.beta();
    let dt = (t1 - t0) / steps as f64;
    let mut psi = system.model.basis_state(j0, system.gamma_at(t0)?, beta)?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(psi.clone());

    let mut norm_drift = 0.0f64;
    let mut adiabaticity_max = 0.0f64;

    for k in 0..steps {
        let t_mid = t0 + (k as f64 + 0.5) * dt;
        let gamma = system.gamma_at(t_mid)?;

        adiabaticity_max = adiabaticity_max.max(adiabaticity_at(system, t_mid, gamma)?);

        // psi <- sum_j exp(-i E_j dt / hbar) |phi_j><phi_j|psi>
        let mut next = DVector::<Complex64>::zeros(n);
        for j in 0..n {
            let phi = system.model.basis_state(j, gamma, beta)?;
            let amp = phi.dotc(&psi);
            let phase = Complex64::from_polar(
                1.0,
                -system.model.eigen_energy(j, gamma)? * dt / system.hbar,
            );
            next += phi * (phase * amp);
        }
        psi = next;

        let drift = (psi.norm() - 1.0).abs();
        norm_drift = norm_drift.max(drift);
        if norm_drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { drift: norm_drift, limit: NORM_DRIFT_LIMIT });
        }

        times.push(if k == steps - 1 { t1 } else { t0 + (k + 1) as f64 * dt });
        states.push(psi.clone());
    }

    Ok(Trajectory { times, states, step_size: dt, norm_drift, adiabaticity_max })
}

/// Adiabaticity ratio
/// `eps(t) = hbar * max_{k != j} |<phi_k| dH/dt |phi_j>| / (E_k - E_j)^2`.
///
/// `dH/dt = (dH/dgamma) * dgamma/dt`, and the matrix element reduces to
/// `(E_j - E_k) <phi_k | d/dgamma phi_j>`, so only genuinely coupled pairs
/// contribute.  Pairs with zero coupling are skipped regardless of their gap;
/// a coupled pair closer than `gap_floor` is reported as degenerate.
pub fn adiabaticity(system: &System, t: f64) -> Result<f64> {
    adiabaticity_with_floor(system, t, DEFAULT_GAP_FLOOR)
}

pub fn adiabaticity_with_floor(system: &System, t: f64, gap_floor: f64) -> Result<f64> {
    let gamma = system.gamma_at(t)?;
    adiabaticity_inner(system, t, gamma, gap_floor)
}

fn adiabaticity_at(system: &System, t: f64, gamma: f64) -> Result<f64> {
    adiabaticity_inner(system, t, gamma, DEFAULT_GAP_FLOOR)
}

fn adiabaticity_inner(system: &System, t: f64, gamma: f64, gap_floor: f64) -> Result<f64> {
    let n = system.model.dim();
    let beta = system.thermo.beta();
    let gamma_rate = system.thermo.gamma_scale() * beta * system.profile.curvature_rate_at(t)?;

    let mut worst = 0.0f64;
    for j in 0..n {
        let e_j = system.model.eigen_energy(j, gamma)?;
        let dphi_j = system.model.state_gamma_derivative(j, gamma, beta)?;
        for k in 0..n {
            if k == j {
                continue;
            }
            let phi_k = system.model.basis_state(k, gamma, beta)?;
            let coupling = phi_k.dotc(&dphi_j).norm();
            if coupling == 0.0 {
                continue;
            }
            let gap = (system.model.eigen_energy(k, gamma)? - e_j).abs();
            if gap < gap_floor {
                return Err(Error::Degeneracy { gap, floor: gap_floor, j, k });
            }
            // |<phi_k|dH/dgamma|phi_j>| = gap * coupling for k != j.
            worst = worst.max(system.hbar * gamma_rate.abs() * coupling / gap);
        }
    }
    Ok(worst)
}

/// Overlap `|<phi_j(gamma(t_k)) | psi_k>|^2` along a trajectory.
pub fn instantaneous_fidelity(
    trajectory: &Trajectory,
    system: &System,
    j: usize,
) -> Result<Vec<f64>> {
    let n = system.model.dim();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dimension: n });
    }
    let beta = system.thermo.beta();
    trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(&t, psi)| {
            let phi = system.model.basis_state(j, system.gamma_at(t)?, beta)?;
            Ok(phi.dotc(psi).norm_sqr().min(1.0))
        })
        .collect()
}
