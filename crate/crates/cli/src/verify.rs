//! Built-in verification suite: eight pass/fail criteria with pinned
//! tolerances, each emitting deterministic artifact files.
//!
//! The criteria double as the project's acceptance gate; the integration
//! test target `acceptance` calls the same functions one by one.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use curvphase_core::geometry::{self, CurvatureProfile, ThermoParams};
use curvphase_core::model::QuantumModel;
use curvphase_core::phase;
use curvphase_core::propagator;
use curvphase_core::reduction;
use curvphase_core::thermo::{self, LeibnizVariant};
use curvphase_core::{gravity, System};

use crate::report::{csv_string, sci17};
use crate::scenario::run_config_str;
use crate::sweep::{run_sweep, sweep_csv};

pub const RUN_CONFIGS: [(&str, &str); 5] = [
    ("spincone_loop", include_str!("../../../configs/spincone_loop.json")),
    ("gauge_ladder_ramp", include_str!("../../../configs/gauge_ladder_ramp.json")),
    ("gauge_ladder_loop", include_str!("../../../configs/gauge_ladder_loop.json")),
    ("beta_ladder_ramp", include_str!("../../../configs/beta_ladder_ramp.json")),
    ("reduction_demo", include_str!("../../../configs/reduction_demo.json")),
];

pub const SWEEP_CONFIGS: [(&str, &str); 2] = [
    ("rate_sweep", include_str!("../../../configs/sweeps/rate_sweep.json")),
    ("beta_sweep", include_str!("../../../configs/sweeps/beta_sweep.json")),
];

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub number: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Deterministic data files: `(file name, contents)`.
    pub artifacts: Vec<(String, String)>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}  {}: {}",
            self.number,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn outcome(
    number: u8,
    name: &'static str,
    passed: bool,
    detail: String,
    artifacts: Vec<(String, String)>,
) -> CriterionOutcome {
    CriterionOutcome { number, name, passed, detail, artifacts }
}

/// Norm drift below 1e-9 on every bundled scenario, each at 1e4+ steps.
pub fn criterion_1() -> CriterionOutcome {
    let started = Instant::now();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for (name, json) in RUN_CONFIGS {
        match run_config_str(json) {
            Ok(bundle) => {
                let drift = bundle.trajectory.norm_drift;
                worst = worst.max(drift);
                if bundle.built.steps < 10_000 {
                    problems.push(format!("{name}: only {} steps", bundle.built.steps));
                }
                if drift >= 1e-9 {
                    problems.push(format!("{name}: drift {drift:.3e}"));
                }
                rows.push(vec![
                    name.to_string(),
                    bundle.built.steps.to_string(),
                    sci17(drift),
                ]);
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        problems.push(format!("runtime {elapsed:.1} s exceeds 5 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("max norm drift {worst:.3e} across {} scenarios in {elapsed:.2} s", RUN_CONFIGS.len())
    } else {
        problems.join("; ")
    };
    let artifact = csv_string(&["scenario", "steps", "norm-drift"], &rows);
    outcome(1, "unitarity", passed, detail, vec![("c1_unitarity.csv".into(), artifact)])
}

/// Spin-cone holonomy -pi(1 - cos theta) within 1e-3 rad at sweep rate 1e-3.
pub fn criterion_2() -> CriterionOutcome {
    let started = Instant::now();
    let rate = 1e-3;
    let steps = 40_000;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for theta in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2]
    {
        let run = || -> curvphase_core::Result<(f64, f64)> {
            let model = QuantumModel::spin_cone(theta, 5.0)?;
            let profile = CurvatureProfile::linear_ramp(0.0, rate)?;
            let params = ThermoParams::from_beta(1.0, 1.0)?;
            let system = System::new(&model, &profile, &params, 1.0)?;
            let t1 = std::f64::consts::TAU / rate;
            let traj = propagator::propagate(&system, 0, 0.0, t1, steps)?;
            let numeric = phase::geometric_phase_numeric(&traj, &system, 0)?;
            let oracle = -std::f64::consts::PI * (1.0 - theta.cos());
            Ok((numeric, oracle))
        };
        match run() {
            Ok((numeric, oracle)) => {
                let err = (numeric - oracle).abs();
                worst = worst.max(err);
                if err >= 1e-3 {
                    problems.push(format!("theta {theta:.4}: error {err:.3e}"));
                }
                rows.push(vec![sci17(theta), sci17(numeric), sci17(oracle), sci17(err)]);
            }
            Err(e) => problems.push(format!("theta {theta:.4}: {e}")),
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        problems.push(format!("runtime {elapsed:.1} s exceeds 10 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("max holonomy error {worst:.3e} rad at rate {rate:.0e} in {elapsed:.2} s")
    } else {
        problems.join("; ")
    };
    let artifact = csv_string(&["theta", "numeric", "oracle", "error"], &rows);
    outcome(2, "holonomy", passed, detail, vec![("c2_holonomy.csv".into(), artifact)])
}

/// Analytic-vs-numeric residual below 1e-3 and monotone over the bundled
/// factor-2 rate sweep.
pub fn criterion_3() -> CriterionOutcome {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut residuals = Vec::new();
    let mut artifact = String::new();
    let raw: serde_json::Value =
        serde_json::from_str(SWEEP_CONFIGS[0].1).expect("bundled sweep parses");
    match run_sweep(&raw, None) {
        Ok(result) => {
            artifact = sweep_csv(&result);
            for row in &result.rows {
                match &row.outcome {
                    Ok(bundle) => {
                        let residual = bundle
                            .report
                            .phase
                            .residual
                            .value()
                            .expect("residual is numeric");
                        if residual >= 1e-3 {
                            problems
                                .push(format!("rate {:.2e}: residual {residual:.3e}", row.value));
                        }
                        residuals.push(residual);
                    }
                    Err(e) => problems.push(format!("rate {:.2e}: {}", row.value, e.message)),
                }
            }
            for pair in residuals.windows(2) {
                if pair[1] >= pair[0] {
                    problems.push(format!(
                        "residual not decreasing: {:.3e} then {:.3e}",
                        pair[0], pair[1]
                    ));
                }
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        problems.push(format!("runtime {elapsed:.1} s exceeds 10 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!(
            "residuals {} rad, monotone over factor-2 rate sweep in {elapsed:.2} s",
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(" > ")
        )
    } else {
        problems.join("; ")
    };
    outcome(3, "phase-pipeline", passed, detail, vec![("c3_rate_residuals.csv".into(), artifact)])
}

/// Finite-difference energy against the sign-consistent expansion on random
/// draws, plus the exact-negation identity of the printed expansion.
pub fn criterion_4() -> CriterionOutcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for kind in ["gauge-ladder", "beta-ladder", "spin-cone"] {
        for draw in 0..20 {
            let mut run = || -> curvphase_core::Result<(f64, f64, f64)> {
                let w0 = rng.gen_range(0.5..2.0);
                let eta = rng.gen_range(0.2..1.0);
                let beta = rng.gen_range(0.5..2.0);
                let ramp = rng.gen_range(0.25..1.0);
                let base = rng.gen_range(0.5..2.0);
                let theta = rng.gen_range(0.3..2.8);
                let model = match kind {
                    "gauge-ladder" => {
                        QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![w0, w0 + 0.5])?
                    }
                    "beta-ladder" => {
                        QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![w0, w0 + 0.5], eta)?
                    }
                    _ => QuantumModel::spin_cone(theta, 1.0)?,
                };
                let profile = CurvatureProfile::linear_ramp(base, ramp)?;
                let params = ThermoParams::from_beta(beta, 1.0)?;
                let system = System::new(&model, &profile, &params, 1.0)?;
                let fd = thermo::expected_energy_fd(&system, 0, 0.0, 2.0, None)?;
                let consistent = thermo::expected_energy_leibniz(
                    &system,
                    0,
                    0.0,
                    2.0,
                    LeibnizVariant::Consistent,
                )?;
                let negated =
                    thermo::expected_energy_leibniz(&system, 0, 0.0, 2.0, LeibnizVariant::Negated)?;
                Ok((fd, consistent, negated))
            };
            match run() {
                Ok((fd, consistent, negated)) => {
                    let err = (fd - consistent).abs();
                    let tol = (1e-6 * fd.abs()).max(1e-9);
                    let rel = err / fd.abs().max(1e-300);
                    worst_rel = worst_rel.max(rel);
                    if err > tol {
                        problems.push(format!(
                            "{kind} draw {draw}: |fd - consistent| {err:.3e} over tol {tol:.1e}"
                        ));
                    }
                    if (negated + consistent).abs() > 1e-12 * negated.abs().max(1.0) {
                        problems.push(format!("{kind} draw {draw}: negation violated"));
                    }
                    rows.push(vec![
                        kind.to_string(),
                        draw.to_string(),
                        sci17(fd),
                        sci17(consistent),
                        sci17(negated),
                    ]);
                }
                Err(e) => problems.push(format!("{kind} draw {draw}: {e}")),
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        problems.push(format!("runtime {elapsed:.1} s exceeds 5 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("60 draws, worst fd-vs-expansion relative error {worst_rel:.3e} in {elapsed:.2} s")
    } else {
        problems.join("; ")
    };
    let artifact =
        csv_string(&["model", "draw", "energy-fd", "energy-consistent", "energy-negated"], &rows);
    outcome(4, "thermo-oracle", passed, detail, vec![("c4_thermo_oracle.csv".into(), artifact)])
}

/// Trace-identity residual below 1e-12 relative on a 10x10 grid at D = 4.
pub fn criterion_5() -> CriterionOutcome {
    let started = Instant::now();
    let planck = gravity::PhysicalConstants::planck();
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for i in 0..10 {
        let beta = -2.0 + (0.99 + 2.0) * i as f64 / 9.0;
        for k in 0..10 {
            let delta_r = -5.0 + 10.0 * k as f64 / 9.0;
            match gravity::trace_consistency(beta, delta_r, &planck) {
                Ok(residual) => {
                    let scale =
                        gravity::einstein_trace_energy(delta_r, &planck, 0.0).abs().max(1e-300);
                    let rel = residual.abs() / scale;
                    worst_rel = worst_rel.max(rel);
                    if rel > 1e-12 {
                        problems.push(format!(
                            "beta {beta:.3}, delta-r {delta_r:.3}: relative residual {rel:.3e}"
                        ));
                    }
                    rows.push(vec![sci17(beta), sci17(delta_r), sci17(residual)]);
                }
                Err(e) => problems.push(format!("beta {beta:.3}: {e}")),
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        problems.push(format!("runtime {elapsed:.2} s exceeds 1 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("worst relative residual {worst_rel:.3e} over 100 grid points in {elapsed:.3} s")
    } else {
        problems.join("; ")
    };
    let artifact = csv_string(&["beta", "delta-r", "residual"], &rows);
    outcome(5, "einstein-trace", passed, detail, vec![("c5_trace_grid.csv".into(), artifact)])
}

/// Cosmological term: zero without beta coupling, closed form and scaling
/// exponents with it.
pub fn criterion_6() -> CriterionOutcome {
    let started = Instant::now();
    let planck = gravity::PhysicalConstants::planck();
    let mut rows = Vec::new();
    let mut problems = Vec::new();

    let lambda_of = |eta: Option<f64>, beta: f64| -> curvphase_core::Result<f64> {
        let model = match eta {
            Some(eta) => QuantumModel::beta_ladder(0.0, 1.0, 0.0, vec![0.5, 1.0], eta)?,
            None => QuantumModel::gauge_ladder(0.0, 1.0, 0.0, vec![0.5, 1.0])?,
        };
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0)?;
        let params = ThermoParams::from_beta(beta, 1.0)?;
        let system = System::new(&model, &profile, &params, 1.0)?;
        gravity::cosmological_constant(&system, 0, 0.0, 2.0, &planck)
    };

    match lambda_of(None, 2.0) {
        Ok(gauge) => {
            if gauge.abs() > 1e-15 {
                problems.push(format!("gauge-ladder lambda {gauge:.3e} above 1e-15"));
            }
            rows.push(vec!["gauge".into(), sci17(0.0), sci17(2.0), sci17(gauge)]);
        }
        Err(e) => problems.push(format!("gauge-ladder: {e}")),
    }

    let mut lambdas = std::collections::BTreeMap::new();
    for (eta, beta) in [(0.5, 2.0), (1.0, 2.0), (0.5, 1.0)] {
        match lambda_of(Some(eta), beta) {
            Ok(lambda) => {
                let closed = -2.0 * std::f64::consts::PI * eta * beta * beta * 2.0;
                let rel = ((lambda - closed) / closed).abs();
                if rel > 1e-10 {
                    problems.push(format!(
                        "eta {eta}, beta {beta}: relative error {rel:.3e} against closed form"
                    ));
                }
                lambdas.insert((format!("{eta}"), format!("{beta}")), lambda);
                rows.push(vec!["beta-ladder".into(), sci17(eta), sci17(beta), sci17(lambda)]);
            }
            Err(e) => problems.push(format!("eta {eta}, beta {beta}: {e}")),
        }
    }
    if problems.is_empty() {
        let l_base = lambdas[&("0.5".to_string(), "2".to_string())];
        let l_eta = lambdas[&("1".to_string(), "2".to_string())];
        let l_beta = lambdas[&("0.5".to_string(), "1".to_string())];
        let eta_exp = (l_eta / l_base).ln() / (1.0f64 / 0.5).ln();
        let beta_exp = (l_base / l_beta).ln() / (2.0f64 / 1.0).ln();
        if (eta_exp - 1.0).abs() > 1e-6 {
            problems.push(format!("fitted eta exponent {eta_exp} off unity"));
        }
        if (beta_exp - 2.0).abs() > 1e-6 {
            problems.push(format!("fitted beta exponent {beta_exp} off two"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 2.0 {
        problems.push(format!("runtime {elapsed:.2} s exceeds 2 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("closed form matched, scaling exponents (1, 2) recovered in {elapsed:.3} s")
    } else {
        problems.join("; ")
    };
    let artifact = csv_string(&["model", "eta", "beta", "lambda"], &rows);
    outcome(6, "cosmological-term", passed, detail, vec![("c6_lambda.csv".into(), artifact)])
}

fn decimal_remainder(scale: &BigUint, states: usize) -> usize {
    let mut r: u64 = 0;
    for d in scale.to_str_radix(10).bytes() {
        r = (r * 10 + u64::from(d - b'0')) % states as u64;
    }
    r as usize
}

/// Reduction rule: oracle agreement, residue uniformity, and the two
/// correspondence baselines.
pub fn criterion_7() -> CriterionOutcome {
    let started = Instant::now();
    let mut problems = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let scale =
            (BigUint::from(rng.gen::<u64>()) << 64u32) | BigUint::from(rng.gen::<u64>());
        let states = rng.gen_range(1..=1_000_000usize);
        let got = reduction::index_mod(&scale, states).expect("states positive");
        if got != decimal_remainder(&scale, states) {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        problems.push(format!("{mismatches} oracle mismatches out of 10000"));
    }

    let mut histogram_artifact = String::new();
    let mut p_value = f64::NAN;
    match reduction::uniformity_scan(&(BigUint::from(1u32) << 127u32), 100_000, 101) {
        Ok(scan) => {
            p_value = scan.p_value;
            if scan.p_value <= 0.001 {
                problems.push(format!("uniformity p {:.3e} at or below 0.001", scan.p_value));
            }
            let rows: Vec<Vec<String>> = scan
                .histogram
                .iter()
                .enumerate()
                .map(|(residue, &count)| vec![residue.to_string(), count.to_string()])
                .collect();
            histogram_artifact = csv_string(&["residue", "count"], &rows);
        }
        Err(e) => problems.push(format!("uniformity scan: {e}")),
    }

    let mut corr_rows = Vec::new();
    let corr = || -> curvphase_core::Result<(f64, f64)> {
        let profile = CurvatureProfile::linear_ramp(1.0, 1.0)?;
        let params = ThermoParams::from_beta(2.0, 1.0)?;
        let states = 101;
        let times: Vec<f64> = (0..400).map(|i| 2.0 * i as f64 / 399.0).collect();
        let locked: Vec<BigUint> = times
            .iter()
            .map(|&t| {
                let gamma = geometry::gamma_at(&profile, &params, t)?;
                let residue = geometry::initial_index(gamma, states)?;
                Ok(BigUint::from(5u32) * states + BigUint::from(residue))
            })
            .collect::<curvphase_core::Result<_>>()?;
        let locked_rate =
            reduction::correspondence_report(&locked, states, &profile, &params, &times)?
                .agreement_rate;
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        let times: Vec<f64> = (0..10_000).map(|i| 2.0 * i as f64 / 9999.0).collect();
        let random: Vec<BigUint> = times
            .iter()
            .map(|_| (BigUint::from(rng.gen::<u64>()) << 64u32) | BigUint::from(rng.gen::<u64>()))
            .collect();
        let random_rate =
            reduction::correspondence_report(&random, states, &profile, &params, &times)?
                .agreement_rate;
        Ok((locked_rate, random_rate))
    };
    match corr() {
        Ok((locked_rate, random_rate)) => {
            if locked_rate != 1.0 {
                problems.push(format!("by-construction agreement {locked_rate}, expected 1.0"));
            }
            let baseline = 1.0 / 101.0;
            if (random_rate - baseline).abs() > 0.02 {
                problems.push(format!(
                    "independent agreement {random_rate:.4} outside 1/101 +- 0.02"
                ));
            }
            corr_rows.push(vec!["steering".into(), "400".into(), sci17(locked_rate)]);
            corr_rows.push(vec!["random".into(), "10000".into(), sci17(random_rate)]);
        }
        Err(e) => problems.push(format!("correspondence: {e}")),
    }

    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        problems.push(format!("runtime {elapsed:.1} s exceeds 5 s"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("10000 oracle pairs exact, uniformity p {p_value:.3}, baselines matched in {elapsed:.2} s")
    } else {
        problems.join("; ")
    };
    let corr_artifact = csv_string(&["source", "samples", "agreement-rate"], &corr_rows);
    outcome(
        7,
        "reduction-rule",
        passed,
        detail,
        vec![
            ("c7_residue_histogram.csv".into(), histogram_artifact),
            ("c7_correspondence.csv".into(), corr_artifact),
        ],
    )
}

fn artifact_pass() -> (Vec<(String, String)>, bool) {
    let outcomes =
        [criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(), criterion_7()];
    let all_passed = outcomes.iter().all(|c| c.passed);
    let artifacts = outcomes.into_iter().flat_map(|c| c.artifacts).collect();
    (artifacts, all_passed)
}

/// Two full suite passes must agree byte for byte and finish inside 60 s.
pub fn criterion_8() -> CriterionOutcome {
    let started = Instant::now();
    let (first, _) = artifact_pass();
    let (second, _) = artifact_pass();
    let elapsed = started.elapsed().as_secs_f64();
    let mut problems = Vec::new();
    let mut rows = Vec::new();
    if first.len() != second.len() {
        problems.push(format!("{} artifacts then {}", first.len(), second.len()));
    }
    for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
        let identical = name_a == name_b && bytes_a == bytes_b;
        if !identical {
            problems.push(format!("{name_a} differs between passes"));
        }
        rows.push(vec![name_a.clone(), bytes_a.len().to_string(), identical.to_string()]);
    }
    if elapsed >= 60.0 {
        problems.push(format!("two passes took {elapsed:.1} s, over the 60 s budget"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!(
            "{} artifacts byte-identical across passes, both in {elapsed:.1} s",
            first.len()
        )
    } else {
        problems.join("; ")
    };
    let artifact = csv_string(&["artifact", "bytes", "identical"], &rows);
    outcome(
        8,
        "reproducibility",
        passed,
        detail,
        vec![("c8_reproducibility.csv".into(), artifact)],
    )
}

#[derive(Debug)]
pub struct VerifySummary {
    pub outcomes: Vec<CriterionOutcome>,
    pub all_passed: bool,
}

/// Run the whole suite in order.
pub fn run_all() -> VerifySummary {
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let all_passed = outcomes.iter().all(|c| c.passed);
    VerifySummary { outcomes, all_passed }
}
