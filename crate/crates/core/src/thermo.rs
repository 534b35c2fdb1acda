//! Partition sum and expected-energy routes.
//!
//! The log partition sum is the same connection-weighted integral as the
//! analytic geometric angle, `ln Z = -beta * integral of A_j(u) du`, taken
//! between the endpoint steering values.  The expected energy
//! `<E> = -d ln Z / d beta` is computed three ways: by central finite
//! differences in beta, by the boundary (Leibniz) expansion of the
//! beta-derivative, and for constant connections by the closed form
//! `omega (1 - beta) delta_R`.  The Leibniz expansion ships in two sign
//! conventions that are exact negations of each other; both are kept and the
//! caller picks one explicitly.

use crate::error::{Error, Result};
use crate::phase;
use crate::quad;
use crate::System;

/// Default finite-difference step, as a fraction of beta.
pub const DEFAULT_FD_STEP_FACTOR: f64 = 1e-4;

/// Below this beta the central difference switches to Richardson
/// extrapolation to keep the relative truncation error in check.
pub const RICHARDSON_BETA_FLOOR: f64 = 1e-2;

/// Sign convention for the boundary expansion of `-d ln Z / d beta`.
///
/// `Consistent` is the actual derivative route and matches the
/// finite-difference energy.  `Negated` is the term-by-term negation of it;
/// it is preserved verbatim because downstream consumers expect both columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeibnizVariant {
    Negated,
    Consistent,
}

/// The four terms of the boundary expansion, in the `Negated` sign convention:
/// the bulk connection integral, the two endpoint boundary terms, and the
/// explicit beta-dependence of the connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeibnizTerms {
    /// `-integral of A(u) du`
    pub connection_integral: f64,
    /// `-u1 * A(u1)`
    pub boundary_end: f64,
    /// `+u0 * A(u0)`
    pub boundary_start: f64,
    /// `-beta * integral of dA/dbeta du`
    pub extrinsic: f64,
}

impl LeibnizTerms {
    pub fn total(&self) -> f64 {
        self.connection_integral + self.boundary_end + self.boundary_start + self.extrinsic
    }
}

/// Everything the thermodynamic layer reports for one level over one span.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoReport {
    pub ln_z: f64,
    pub energy_fd: f64,
    pub energy_leibniz_negated: f64,
    pub energy_leibniz_consistent: f64,
    pub energy_const_omega: f64,
    pub energy_extrinsic: f64,
    pub delta_s: f64,
    /// Bulk and boundary terms of the expansion, `Negated` signs.
    pub intrinsic_terms: [f64; 3],
    pub extrinsic_term: f64,
    /// `|ln_z - geometric analytic angle|`; the two are one pipeline, so this
    /// stays at zero.
    pub ln_z_identification_residual: f64,
}

/// `ln Z = -beta * integral of A_j(u) du` between the endpoint steering
/// values.  Shares its pipeline with
/// [`phase::geometric_phase_analytic`]; the two are the same expression.
pub fn ln_partition(system: &System, j: usize, t0: f64, t1: f64) -> Result<f64> {
    phase::geometric_phase_analytic(system, j, t0, t1)
}

/// `<E> = -d ln Z / d beta` by central differences.  `step` overrides the
/// default `1e-4 * beta`; it must satisfy `0 < step <= beta / 2` so both
/// shifted temperatures stay physical.  For very small beta a Richardson
/// combination of two step sizes is used instead of a single stencil.
pub fn expected_energy_fd(
    system: &System,
    j: usize,
    t0: f64,
    t1: f64,
    step: Option<f64>,
) -> Result<f64> {
    let beta = system.thermo.beta();
    let h = step.unwrap_or(DEFAULT_FD_STEP_FACTOR * beta);
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::domain("fd step", format!("must be positive, got {h}")));
    }
    if h > beta / 2.0 {
        return Err(Error::domain(
            "fd step",
            format!("step {h} too large for beta {beta}; need h <= beta/2"),
        ));
    }

    let ln_z_at = |b: f64| -> Result<f64> {
        let shifted = system.thermo.with_beta(b)?;
        let sys = System { thermo: &shifted, ..*system };
        ln_partition(&sys, j, t0, t1)
    };

    let central = |h: f64| -> Result<f64> {
        Ok((ln_z_at(beta + h)? - ln_z_at(beta - h)?) / (2.0 * h))
    };

    let derivative = if beta < RICHARDSON_BETA_FLOOR {
        let d_h = central(h)?;
        let d_half = central(h / 2.0)?;
        (4.0 * d_half - d_h) / 3.0
    } else {
        central(h)?
    };
    Ok(-derivative)
}

/// The four boundary-expansion terms (in `Negated` signs) for level `j` over
/// `[t0, t1]`.
pub fn leibniz_terms(system: &System, j: usize, t0: f64, t1: f64) -> Result<LeibnizTerms> {
    let dim = system.model.dim();
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dimension: dim });
    }
    let beta = system.thermo.beta();
    let u0 = system.gamma_at(t0)?;
    let u1 = system.gamma_at(t1)?;

    let connection = |u: f64| -> f64 {
        system.model.berry_connection(j, u, beta).map(|c| c.value).unwrap_or(f64::NAN)
    };
    let connection_integral = -quad::simpson(connection, u0, u1, phase::QUAD_TOL)?;

    let boundary_end = -u1 * system.model.berry_connection(j, u1, beta)?.value;
    let boundary_start = u0 * system.model.berry_connection(j, u0, beta)?.value;

    let dbeta = |u: f64| -> f64 {
        system.model.connection_beta_derivative(j, u, beta).unwrap_or(f64::NAN)
    };
    let extrinsic = -beta * quad::simpson(dbeta, u0, u1, phase::QUAD_TOL)?;

    Ok(LeibnizTerms { connection_integral, boundary_end, boundary_start, extrinsic })
}

/// Expected energy through the boundary expansion.  The `Consistent` variant
/// is the exact negation of the `Negated` one by construction.
pub fn expected_energy_leibniz(
    system: &System,
    j: usize,
    t0: f64,
    t1: f64,
    variant: LeibnizVariant,
) -> Result<f64> {
    let total = leibniz_terms(system, j, t0, t1)?.total();
    Ok(match variant {
        LeibnizVariant::Negated => total,
        LeibnizVariant::Consistent => -total,
    })
}

/// Closed form for a constant connection: `omega * (1 - beta) * delta_r`.
pub fn expected_energy_const_omega(omega: f64, beta: f64, delta_r: f64) -> f64 {
    omega * (1.0 - beta) * delta_r
}

/// Constant-connection form plus the explicit beta-dependence correction:
/// `omega (1 - beta) delta_r - beta * integral of dA/dbeta du`.
pub fn expected_energy_extrinsic(
    system: &System,
    j: usize,
    t0: f64,
    t1: f64,
    omega: f64,
) -> Result<f64> {
    let beta = system.thermo.beta();
    let delta_r = system.curvature_at(t1)? - system.curvature_at(t0)?;
    let terms = leibniz_terms(system, j, t0, t1)?;
    Ok(expected_energy_const_omega(omega, beta, delta_r) + terms.extrinsic)
}

/// Entropy variation `delta_S = <E> beta + ln Z` plus the identification
/// check between `ln Z` and the analytic geometric angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheck {
    pub delta_s: f64,
    pub ln_z: f64,
    pub expected_energy: f64,
    pub identification_residual: f64,
}

pub fn entropy_variation(system: &System, j: usize, t0: f64, t1: f64) -> Result<EntropyCheck> {
    let ln_z = ln_partition(system, j, t0, t1)?;
    let expected_energy = expected_energy_fd(system, j, t0, t1, None)?;
    let geometric = phase::geometric_phase_analytic(system, j, t0, t1)?;
    let identification_residual = (ln_z - geometric).abs();
    if identification_residual > 1e-12 {
        return Err(Error::numeric(
            "entropy_variation",
            format!("ln Z and the geometric angle diverged by {identification_residual:e}"),
        ));
    }
    Ok(EntropyCheck {
        delta_s: expected_energy * system.thermo.beta() + ln_z,
        ln_z,
        expected_energy,
        identification_residual,
    })
}

/// One-call summary of the thermodynamic layer.  The constant-connection
/// column takes `omega` from the connection value at the midpoint steering
/// parameter, which is exact for every built-in model.
pub fn thermo_report(system: &System, j: usize, t0: f64, t1: f64) -> Result<ThermoReport> {
    let entropy = entropy_variation(system, j, t0, t1)?;
    let terms = leibniz_terms(system, j, t0, t1)?;
    let beta = system.thermo.beta();
    let u_mid = 0.5 * (system.gamma_at(t0)? + system.gamma_at(t1)?);
    let omega = system.model.berry_connection(j, u_mid, beta)?.value;
    let delta_r = system.curvature_at(t1)? - system.curvature_at(t0)?;
    let negated = terms.total();
    Ok(ThermoReport {
        ln_z: entropy.ln_z,
        energy_fd: entropy.expected_energy,
        energy_leibniz_negated: negated,
        energy_leibniz_consistent: -negated,
        energy_const_omega: expected_energy_const_omega(omega, beta, delta_r),
        energy_extrinsic: expected_energy_const_omega(omega, beta, delta_r) + terms.extrinsic,
        delta_s: entropy.delta_s,
        intrinsic_terms: [terms.connection_integral, terms.boundary_end, terms.boundary_start],
        extrinsic_term: terms.extrinsic,
        ln_z_identification_residual: entropy.identification_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurvatureProfile, ThermoParams};
    use crate::model::QuantumModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauge_system() -> (QuantumModel, CurvatureProfile, ThermoParams) {
        // omega = 1 on the probed level, beta = 2, R from 1 to 3.
        let model = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0]).unwrap();
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        let thermo = ThermoParams::from_beta(2.0, 1.0).unwrap();
        (model, profile, thermo)
    }

    fn beta_system() -> (QuantumModel, CurvatureProfile, ThermoParams) {
        // omega_0 = 0.5, eta = 0.5, beta = 2, R from 1 to 3.
        let model = QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![0.5, 1.0], 0.5).unwrap();
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        let thermo = ThermoParams::from_beta(2.0, 1.0).unwrap();
        (model, profile, thermo)
    }

    #[test]
    fn ln_partition_constant_connection() {
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let v = ln_partition(&system, 0, 0.0, 2.0).unwrap();
        assert!((v + 8.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn ln_partition_closed_loop_is_zero() {
        let model = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0]).unwrap();
        let profile = CurvatureProfile::sinusoidal(1.5, 0.5, 4.0).unwrap();
        let thermo = ThermoParams::from_beta(1.2, 1.0).unwrap();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        assert_eq!(ln_partition(&system, 0, 0.0, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn ln_partition_small_beta_limit() {
        let model = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0]).unwrap();
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        for beta in [1e-2, 1e-4, 1e-6] {
            let thermo = ThermoParams::from_beta(beta, 1.0).unwrap();
            let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
            let v = ln_partition(&system, 0, 0.0, 2.0).unwrap();
            assert!(v.abs() <= 2.0 * beta * beta + 1e-15, "beta {beta}: {v}");
        }
    }

    #[test]
    fn fd_energy_quadratic_case_is_sharp() {
        // ln Z = -omega beta^2 delta_R is quadratic in beta, so the central
        // stencil is exact up to roundoff: <E> = 2 omega beta delta_R = 8.
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let v = expected_energy_fd(&system, 0, 0.0, 2.0, None).unwrap();
        assert!((v - 8.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn fd_energy_beta_ladder_matches_symbolic_derivative() {
        // ln Z = -(omega beta^2 + eta beta^3) delta_R gives
        // <E> = (2 omega beta + 3 eta beta^2) delta_R = 16 for these numbers.
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let v = expected_energy_fd(&system, 0, 0.0, 2.0, None).unwrap();
        assert!((v - 16.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn fd_step_is_validated() {
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        assert!(expected_energy_fd(&system, 0, 0.0, 2.0, Some(1.5)).is_err());
        assert!(expected_energy_fd(&system, 0, 0.0, 2.0, Some(0.0)).is_err());
        assert!(expected_energy_fd(&system, 0, 0.0, 2.0, Some(-0.1)).is_err());
        assert!(expected_energy_fd(&system, 0, 0.0, 2.0, Some(1.0)).is_ok());
    }

    #[test]
    fn fd_truncation_error_falls_as_h_squared() {
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let exact = 16.0;
        let e1 = (expected_energy_fd(&system, 0, 0.0, 2.0, Some(2e-1)).unwrap() - exact).abs();
        let e2 = (expected_energy_fd(&system, 0, 0.0, 2.0, Some(1e-1)).unwrap() - exact).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn leibniz_terms_constant_connection() {
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let t = leibniz_terms(&system, 0, 0.0, 2.0).unwrap();
        assert!((t.connection_integral + 4.0).abs() < 1e-10);
        assert!((t.boundary_end + 6.0).abs() < 1e-12);
        assert!((t.boundary_start - 2.0).abs() < 1e-12);
        assert_eq!(t.extrinsic, 0.0);
        assert!((t.total() + 8.0).abs() < 1e-10);
    }

    #[test]
    fn leibniz_variants_are_exact_negations() {
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let negated = expected_energy_leibniz(&system, 0, 0.0, 2.0, LeibnizVariant::Negated).unwrap();
        let consistent =
            expected_energy_leibniz(&system, 0, 0.0, 2.0, LeibnizVariant::Consistent).unwrap();
        assert_eq!(negated + consistent, 0.0);
        assert!((negated + 16.0).abs() < 1e-9, "negated {negated}");
    }

    #[test]
    fn leibniz_terms_beta_ladder() {
        // A = 1.5, u from 2 to 6: bulk -9... spelled out by hand:
        // T1 = -6, T2 = -9, T3 = +3, T4 = -4.
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let t = leibniz_terms(&system, 0, 0.0, 2.0).unwrap();
        assert!((t.connection_integral + 6.0).abs() < 1e-10);
        assert!((t.boundary_end + 9.0).abs() < 1e-12);
        assert!((t.boundary_start - 3.0).abs() < 1e-12);
        assert!((t.extrinsic + 4.0).abs() < 1e-10);
    }

    #[test]
    fn leibniz_consistent_agrees_with_fd_across_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let omega = rng.gen_range(0.5..2.0);
            let eta = rng.gen_range(0.2..1.0);
            let beta = rng.gen_range(0.5..2.0);
            let rate = rng.gen_range(0.25..1.0);
            let base = rng.gen_range(0.5..2.0);
            let theta = rng.gen_range(0.3..2.8);
            let models = [
                QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![omega, omega + 0.3]).unwrap(),
                QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![omega, omega + 0.3], eta).unwrap(),
                QuantumModel::spin_cone(theta, 1.0).unwrap(),
            ];
            let profile = CurvatureProfile::linear_ramp(base, rate).unwrap();
            let thermo = ThermoParams::from_beta(beta, 1.0).unwrap();
            for model in &models {
                let system = System::new(model, &profile, &thermo, 1.0).unwrap();
                let fd = expected_energy_fd(&system, 0, 0.0, 2.0, Some(1e-4)).unwrap();
                let lb = expected_energy_leibniz(&system, 0, 0.0, 2.0, LeibnizVariant::Consistent)
                    .unwrap();
                let tol = (1e-6 * fd.abs()).max(1e-9);
                assert!((fd - lb).abs() < tol, "{}: fd {fd}, leibniz {lb}", model.kind());
            }
        }
    }

    #[test]
    fn const_omega_closed_form() {
        assert_eq!(expected_energy_const_omega(2.0, 0.25, 3.0), 4.5);
        assert_eq!(expected_energy_const_omega(2.0, 1.0, 3.0), 0.0);
        assert_eq!(expected_energy_const_omega(2.0, 0.25, 0.0), 0.0);
    }

    #[test]
    fn extrinsic_energy_reduces_to_const_omega_without_beta_coupling() {
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let omega = 1.0;
        let v = expected_energy_extrinsic(&system, 0, 0.0, 2.0, omega).unwrap();
        assert_eq!(v, expected_energy_const_omega(omega, 2.0, 2.0));
    }

    #[test]
    fn extrinsic_energy_beta_ladder() {
        // omega (1 - beta) delta_R - 4 = 1.5 * (-1) * 2 - 4 = -7.
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let v = expected_energy_extrinsic(&system, 0, 0.0, 2.0, 1.5).unwrap();
        assert!((v + 7.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn extrinsic_energy_closed_loop_vanishes() {
        let model = QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![0.5, 1.0], 0.5).unwrap();
        let profile = CurvatureProfile::sinusoidal(1.0, 0.5, 6.0).unwrap();
        let thermo = ThermoParams::from_beta(2.0, 1.0).unwrap();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let v = expected_energy_extrinsic(&system, 0, 0.0, 6.0, 1.5).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn entropy_closed_form() {
        // delta_S = <E> beta + ln Z = omega beta^2 delta_R = 8.
        let (model, profile, thermo) = gauge_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let e = entropy_variation(&system, 0, 0.0, 2.0).unwrap();
        assert!((e.delta_s - 8.0).abs() < 1e-8, "got {}", e.delta_s);
        assert_eq!(e.identification_residual, 0.0);
    }

    #[test]
    fn entropy_closed_loop_reduces_to_energy_term() {
        let model = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0]).unwrap();
        let profile = CurvatureProfile::sinusoidal(1.5, 0.5, 4.0).unwrap();
        let thermo = ThermoParams::from_beta(1.2, 1.0).unwrap();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let e = entropy_variation(&system, 0, 0.0, 4.0).unwrap();
        assert_eq!(e.ln_z, 0.0);
        assert_eq!(e.delta_s, e.expected_energy * 1.2);
    }

    #[test]
    fn entropy_fades_with_beta() {
        // delta_S = omega beta^2 delta_R, so the series 1e-1, 1e-2, 1e-3
        // falls toward zero; the smallest beta exercises the Richardson path.
        let model = QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![1.0, 2.0]).unwrap();
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for beta in [1e-1, 1e-2, 1e-3] {
            let thermo = ThermoParams::from_beta(beta, 1.0).unwrap();
            let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
            let e = entropy_variation(&system, 0, 0.0, 2.0).unwrap();
            assert!(e.delta_s.abs() < last, "beta {beta}: {}", e.delta_s);
            assert!((e.delta_s - 2.0 * beta * beta).abs() < 1e-8);
            last = e.delta_s.abs();
        }
    }

    #[test]
    fn report_columns_are_mutually_consistent() {
        let (model, profile, thermo) = beta_system();
        let system = System::new(&model, &profile, &thermo, 1.0).unwrap();
        let r = thermo_report(&system, 0, 0.0, 2.0).unwrap();
        assert_eq!(r.energy_leibniz_negated + r.energy_leibniz_consistent, 0.0);
        assert_eq!(
            r.ln_z,
            phase::geometric_phase_analytic(&system, 0, 0.0, 2.0).unwrap()
        );
        assert_eq!(r.ln_z_identification_residual, 0.0);
        // Midpoint connection for this model: omega + eta * beta = 1.5.
        assert!((r.energy_const_omega - expected_energy_const_omega(1.5, 2.0, 2.0)).abs() < 1e-12);
        assert!((r.energy_extrinsic - (r.energy_const_omega + r.extrinsic_term)).abs() < 1e-12);
        assert!((r.delta_s - (r.energy_fd * 2.0 + r.ln_z)).abs() < 1e-12);
        assert!((r.energy_leibniz_consistent - r.energy_fd).abs() < 1e-6);
    }
}
