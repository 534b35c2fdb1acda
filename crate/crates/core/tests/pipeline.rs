//! Cross-module checks through the public API, the way a downstream
//! consumer would wire the library together.

use num_bigint::BigUint;

use curvphase_core::geometry::{self, CurvatureProfile, ThermoParams};
use curvphase_core::model::QuantumModel;
use curvphase_core::{gravity, phase, propagator, reduction, thermo, System};

#[test]
fn closed_loop_pipeline_cancels_every_geometric_quantity() {
    let model = QuantumModel::gauge_ladder(0.5, 1.0, 0.4, vec![1.0, 2.0]).unwrap();
    let profile = CurvatureProfile::sinusoidal(2.0, 1.0, 40.0).unwrap();
    let params = ThermoParams::from_beta(0.8, 1.0).unwrap();
    let system = System::new(&model, &profile, &params, 1.0).unwrap();

    let traj = propagator::propagate(&system, 0, 0.0, 40.0, 8000).unwrap();
    let parts = phase::decompose(&traj, &system, 0).unwrap();
    assert!(parts.geometric_angle_numeric.abs() < 1e-6, "{}", parts.geometric_angle_numeric);
    assert!(parts.geometric_angle_analytic.abs() < 1e-12);

    let report = thermo::thermo_report(&system, 0, 0.0, 40.0).unwrap();
    assert!(report.ln_z.abs() < 1e-10);

    let lambda = gravity::cosmological_constant(
        &system,
        0,
        0.0,
        40.0,
        &gravity::PhysicalConstants::planck(),
    )
    .unwrap();
    assert_eq!(lambda, 0.0);
}

#[test]
fn ramp_pipeline_matches_the_ladder_closed_forms() {
    let eta = 0.6;
    let beta = 1.0;
    let model = QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![0.5, 1.25], eta).unwrap();
    let profile = CurvatureProfile::linear_ramp(1.0, 0.5).unwrap();
    let params = ThermoParams::from_beta(beta, 1.0).unwrap();
    let system = System::new(&model, &profile, &params, 1.0).unwrap();

    let t1 = 4.0;
    let delta_r = 2.0;
    let rate = 0.5 + eta * beta;
    let traj = propagator::propagate(&system, 0, 0.0, t1, 20_000).unwrap();
    let parts = phase::decompose(&traj, &system, 0).unwrap();
    let expected = phase::wrap_angle(-rate * beta * delta_r);
    assert!(
        (parts.geometric_angle_numeric - expected).abs() < 1e-6,
        "numeric {} vs closed form {expected}",
        parts.geometric_angle_numeric
    );
    assert!(parts.residual < 1e-6, "residual {}", parts.residual);

    let fidelity = propagator::instantaneous_fidelity(&traj, &system, 0).unwrap();
    assert!(fidelity.iter().all(|f| *f > 0.999999));

    let report = thermo::thermo_report(&system, 0, 0.0, t1).unwrap();
    assert!((report.ln_z - (-rate * beta * beta * delta_r)).abs() < 1e-10);
    assert_eq!(report.energy_leibniz_negated, -report.energy_leibniz_consistent);

    let lambda = gravity::cosmological_constant(
        &system,
        0,
        0.0,
        t1,
        &gravity::PhysicalConstants::planck(),
    )
    .unwrap();
    let closed = -2.0 * std::f64::consts::PI * eta * beta * beta * delta_r;
    assert!((lambda - closed).abs() < 1e-9 * closed.abs());
}

#[test]
fn steering_locked_scales_agree_everywhere_through_the_public_api() {
    let profile = CurvatureProfile::linear_ramp(1.0, 1.0).unwrap();
    let params = ThermoParams::from_beta(2.0, 1.0).unwrap();
    let states = 11;
    let times: Vec<f64> = (0..50).map(|i| 3.0 * i as f64 / 49.0).collect();
    let scales: Vec<BigUint> = times
        .iter()
        .map(|&t| {
            let gamma = geometry::gamma_at(&profile, &params, t).unwrap();
            let residue = geometry::initial_index(gamma, states).unwrap();
            BigUint::from(9u32) * states + BigUint::from(residue)
        })
        .collect();
    let report =
        reduction::correspondence_report(&scales, states, &profile, &params, &times).unwrap();
    assert_eq!(report.agreement_rate, 1.0);
    assert!(report.samples.iter().all(|s| s.agrees));
}

#[test]
fn error_codes_are_stable_across_the_api_surface() {
    let model = QuantumModel::gauge_ladder(1.0, 1.0, 0.0, vec![0.5, 1.0]).unwrap();
    let profile = CurvatureProfile::linear_ramp(1.0, 0.5).unwrap();
    let params = ThermoParams::from_beta(1.0, 1.0).unwrap();
    let system = System::new(&model, &profile, &params, 1.0).unwrap();

    let err = propagator::propagate(&system, 7, 0.0, 1.0, 100).unwrap_err();
    assert_eq!(err.code(), "E_INDEX");
    let err = propagator::propagate(&system, 0, 1.0, 1.0, 100).unwrap_err();
    assert_eq!(err.code(), "E_DOMAIN");
    let bounded = profile.clone().with_interval(0.0, 1.0).unwrap();
    assert_eq!(bounded.curvature_at(2.0).unwrap_err().code(), "E_INTERVAL");
    assert_eq!(ThermoParams::from_beta(-1.0, 1.0).unwrap_err().code(), "E_DOMAIN");
    assert_eq!(
        CurvatureProfile::sinusoidal(1.0, 1.0, -3.0).unwrap_err().code(),
        "E_DOMAIN"
    );
    assert_eq!(
        gravity::omega_constant(1.0, &gravity::PhysicalConstants::planck())
            .unwrap_err()
            .code(),
        "E_SINGULARITY"
    );
    assert_eq!(reduction::index_mod(&BigUint::from(5u32), 0).unwrap_err().code(), "E_DOMAIN");
}
