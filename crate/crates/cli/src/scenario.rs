//! Scenario execution: config to report, plus the file emitters.

use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use curvphase_core::geometry::{self, CurvaturePath};
use curvphase_core::phase::{self, BoundsReading};
use curvphase_core::propagator::{self, Trajectory};
use curvphase_core::reduction::{self, CorrespondenceReport, SensitivityMap, UniformityScan};
use curvphase_core::{gravity, thermo, System};

use crate::config::{
    BuiltScenario, CorrespondencePlan, CorrespondenceSource, OutputsConfig, ReductionPlan,
    ScenarioConfig,
};
use crate::report::{
    csv_string, sci17, sha256_hex, CorrespondenceBlock, GravityBlock, PhaseBlock, Provenance,
    Quantity, ReductionBlock, RunReport, ScanBlock, ScenarioBlock, SensitivityBlock, ThermoBlock,
    TrajectoryBlock,
};
use crate::{CliError, ReportFormat, Result};

/// Everything a run produced, before any of it touches disk.
#[derive(Debug, Clone)]
pub struct RunBundle {
    pub config: ScenarioConfig,
    pub built: BuiltScenario,
    pub report: RunReport,
    pub trajectory: Trajectory,
    pub fidelity: Vec<f64>,
    pub reduction: Option<ReductionResults>,
}

#[derive(Debug, Clone)]
pub struct ReductionResults {
    pub scan: Option<UniformityScan>,
    pub sensitivity: Option<SensitivityMap>,
    pub correspondence: Option<CorrespondenceReport>,
}

/// Parse, validate, and run a scenario given as raw JSON text.
pub fn run_config_str(json: &str) -> Result<RunBundle> {
    let config = ScenarioConfig::from_json_str(json)?;
    let built = config.build()?;
    run_built(config, built, &sha256_hex(json.as_bytes()))
}

pub fn run_built(
    config: ScenarioConfig,
    built: BuiltScenario,
    config_sha256: &str,
) -> Result<RunBundle> {
    let system = System::new(&built.model, &built.profile, &built.thermo, built.constants.hbar())
        .map_err(CliError::numeric)?;
    let j = built.initial_index;

    let trajectory = propagator::propagate(&system, j, built.t0, built.t1, built.steps)
        .map_err(CliError::numeric)?;
    let mut decomposition =
        phase::decompose(&trajectory, &system, j).map_err(CliError::numeric)?;
    if built.bounds == BoundsReading::Curvature {
        let analytic = phase::geometric_phase_analytic_with(
            &system,
            j,
            built.t0,
            built.t1,
            BoundsReading::Curvature,
        )
        .map_err(CliError::numeric)?;
        decomposition.geometric_angle_analytic = analytic;
        decomposition.residual =
            phase::wrap_angle(decomposition.geometric_angle_numeric - analytic).abs();
    }
    let thermo_report =
        thermo::thermo_report(&system, j, built.t0, built.t1).map_err(CliError::numeric)?;
    let fidelity =
        propagator::instantaneous_fidelity(&trajectory, &system, j).map_err(CliError::numeric)?;

    let beta = built.thermo.beta();
    let delta_r = system.curvature_at(built.t1).map_err(CliError::numeric)?
        - system.curvature_at(built.t0).map_err(CliError::numeric)?;
    let gravity_block = GravityBlock {
        kappa: built.constants.kappa().into(),
        dimension: built.constants.dimension(),
        omega: Quantity::from_result(gravity::omega_constant(beta, &built.constants)),
        trace_residual: Quantity::from_result(gravity::trace_consistency(
            beta,
            delta_r,
            &built.constants,
        )),
        lambda: Quantity::from_result(gravity::cosmological_constant(
            &system,
            j,
            built.t0,
            built.t1,
            &built.constants,
        )),
    };

    let reduction = match &built.reduction {
        Some(plan) => Some(run_reduction(plan, &built)?),
        None => None,
    };

    let report = RunReport {
        provenance: Provenance {
            tool: "curvphase".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config_sha256.into(),
        },
        scenario: ScenarioBlock {
            model_kind: built.model.kind().into(),
            dimension: built.model.dim(),
            initial_index: j,
            t0: built.t0.into(),
            t1: built.t1.into(),
            steps: built.steps,
            beta: beta.into(),
            gamma_scale: built.thermo.gamma_scale().into(),
            bounds_reading: match built.bounds {
                BoundsReading::Gamma => "gamma".into(),
                BoundsReading::Curvature => "curvature".into(),
            },
        },
        phase: PhaseBlock {
            dynamical_angle: decomposition.dynamical_angle.into(),
            geometric_angle_numeric: decomposition.geometric_angle_numeric.into(),
            geometric_angle_analytic: decomposition.geometric_angle_analytic.into(),
            residual: decomposition.residual.into(),
            omega_total_imag: decomposition.omega_total.im.into(),
            exp_omega_modulus: decomposition.omega_total.exp().norm().into(),
        },
        trajectory: TrajectoryBlock {
            step_size: trajectory.step_size.into(),
            norm_drift: trajectory.norm_drift.into(),
            adiabaticity_max: trajectory.adiabaticity_max.into(),
            final_fidelity: fidelity.last().copied().unwrap_or(f64::NAN).into(),
        },
        thermo: ThermoBlock {
            ln_z: thermo_report.ln_z.into(),
            energy_fd: thermo_report.energy_fd.into(),
            energy_leibniz_negated: thermo_report.energy_leibniz_negated.into(),
            energy_leibniz_consistent: thermo_report.energy_leibniz_consistent.into(),
            energy_const_omega: thermo_report.energy_const_omega.into(),
            energy_extrinsic: thermo_report.energy_extrinsic.into(),
            delta_s: thermo_report.delta_s.into(),
            intrinsic_terms: [
                thermo_report.intrinsic_terms[0].into(),
                thermo_report.intrinsic_terms[1].into(),
                thermo_report.intrinsic_terms[2].into(),
            ],
            extrinsic_term: thermo_report.extrinsic_term.into(),
            ln_z_identification_residual: thermo_report.ln_z_identification_residual.into(),
        },
        gravity: gravity_block,
        reduction: reduction.as_ref().map(|r| ReductionBlock {
            states: built.reduction.as_ref().expect("plan exists").states,
            scan: r.scan.as_ref().map(|s| ScanBlock {
                chi_square: s.chi_square.into(),
                p_value: s.p_value.into(),
                degrees_of_freedom: s.degrees_of_freedom,
            }),
            sensitivity: r.sensitivity.as_ref().map(|s| SensitivityBlock {
                center_index: s.center_index,
                radius: built
                    .reduction
                    .as_ref()
                    .and_then(|p| p.sensitivity.as_ref())
                    .expect("plan exists")
                    .radius,
                change_fraction: s.change_fraction.into(),
            }),
            correspondence: r.correspondence.as_ref().map(|c| CorrespondenceBlock {
                samples: c.samples.len(),
                agreement_rate: c.agreement_rate.into(),
            }),
        }),
    };

    Ok(RunBundle { config, built, report, trajectory, fidelity, reduction })
}

fn run_reduction(plan: &ReductionPlan, built: &BuiltScenario) -> Result<ReductionResults> {
    let scan = match &plan.scan {
        Some(s) => Some(
            reduction::uniformity_scan_with_stride(&s.start, s.count, plan.states, &s.stride)
                .map_err(CliError::numeric)?,
        ),
        None => None,
    };
    let sensitivity = match &plan.sensitivity {
        Some(s) => Some(
            reduction::sensitivity_map(&s.scale, plan.states, s.radius)
                .map_err(CliError::numeric)?,
        ),
        None => None,
    };
    let correspondence = match &plan.correspondence {
        Some(c) => Some(run_correspondence(c, plan.states, built)?),
        None => None,
    };
    Ok(ReductionResults { scan, sensitivity, correspondence })
}

fn run_correspondence(
    plan: &CorrespondencePlan,
    states: usize,
    built: &BuiltScenario,
) -> Result<CorrespondenceReport> {
    let n = plan.samples;
    let times: Vec<f64> = (0..n)
        .map(|i| built.t0 + (built.t1 - built.t0) * i as f64 / (n - 1) as f64)
        .collect();
    let scales: Vec<BigUint> = match plan.source {
        CorrespondenceSource::Steering => {
            let mut scales = Vec::with_capacity(n);
            for &t in &times {
                let gamma =
                    geometry::gamma_at(&built.profile, &built.thermo, t).map_err(CliError::numeric)?;
                let residue =
                    geometry::initial_index(gamma, states).map_err(CliError::numeric)?;
                scales
                    .push(BigUint::from(plan.offset_multiple) * states + BigUint::from(residue));
            }
            scales
        }
        CorrespondenceSource::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            (0..n)
                .map(|_| (BigUint::from(rng.gen::<u64>()) << 64u32) | BigUint::from(rng.gen::<u64>()))
                .collect()
        }
    };
    reduction::correspondence_report(&scales, states, &built.profile, &built.thermo, &times)
        .map_err(CliError::numeric)
}

/// Write the files named in the outputs table; returns the paths written.
pub fn write_outputs(
    bundle: &RunBundle,
    out_dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    let outputs = bundle.config.outputs.clone().unwrap_or_default();
    let mut written = Vec::new();

    let report_name = outputs.report.clone().unwrap_or_else(|| match format {
        ReportFormat::Json => "report.json".into(),
        ReportFormat::Csv => "report.csv".into(),
    });
    let report_text = match format {
        ReportFormat::Json => bundle.report.to_json_string(),
        ReportFormat::Csv => bundle.report.to_csv_string(),
    };
    written.push(write_file(out_dir, &report_name, report_text.as_bytes())?);

    if let Some(name) = &outputs.trajectory {
        written.push(write_file(out_dir, name, trajectory_csv(bundle).as_bytes())?);
    }
    if let Some(name) = &outputs.path {
        written.push(write_file(out_dir, name, path_csv(bundle)?.as_bytes())?);
    }
    if let Some(name) = &outputs.histogram {
        let scan = scan_of(bundle)?;
        written.push(write_file(out_dir, name, histogram_csv(scan).as_bytes())?);
    }
    if let Some(name) = &outputs.correspondence {
        let corr = correspondence_of(bundle)?;
        written.push(write_file(out_dir, name, correspondence_csv(corr).as_bytes())?);
    }
    if let Some(name) = &outputs.plot_data {
        written.push(write_file(out_dir, name, plot_data_csv(bundle)?.as_bytes())?);
    }
    Ok(written)
}

fn scan_of(bundle: &RunBundle) -> Result<&UniformityScan> {
    bundle
        .reduction
        .as_ref()
        .and_then(|r| r.scan.as_ref())
        .ok_or_else(|| CliError::Validation("outputs.histogram: no scan was run".into()))
}

fn correspondence_of(bundle: &RunBundle) -> Result<&CorrespondenceReport> {
    bundle
        .reduction
        .as_ref()
        .and_then(|r| r.correspondence.as_ref())
        .ok_or_else(|| CliError::Validation("outputs.correspondence: no comparison was run".into()))
}

fn write_file(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = out_dir.join(name);
    let dir = path.parent().unwrap_or(out_dir);
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.to_path_buf(), e))?;
    std::fs::write(&path, bytes).map_err(|e| CliError::io(path.clone(), e))?;
    Ok(path)
}

pub fn trajectory_csv(bundle: &RunBundle) -> String {
    let dim = bundle.built.model.dim();
    let mut header: Vec<String> = vec!["time".into(), "norm".into(), "fidelity".into()];
    for j in 0..dim {
        header.push(format!("level-{j}-re"));
        header.push(format!("level-{j}-im"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = bundle
        .trajectory
        .times
        .iter()
        .zip(&bundle.trajectory.states)
        .zip(&bundle.fidelity)
        .map(|((&t, state), &f)| {
            let mut row = vec![sci17(t), sci17(state.norm()), sci17(f)];
            for c in state.iter() {
                row.push(sci17(c.re));
                row.push(sci17(c.im));
            }
            row
        })
        .collect();
    csv_string(&header_refs, &rows)
}

fn sampled_path(bundle: &RunBundle) -> Result<CurvaturePath> {
    let samples = bundle.built.steps.min(2000) + 1;
    geometry::curvature_path(
        &bundle.built.profile,
        &bundle.built.thermo,
        bundle.built.t0,
        bundle.built.t1,
        samples,
    )
    .map_err(CliError::numeric)
}

pub fn path_csv(bundle: &RunBundle) -> Result<String> {
    let path = sampled_path(bundle)?;
    let rows: Vec<Vec<String>> = path
        .points
        .iter()
        .map(|p| vec![sci17(p.time), sci17(p.curvature), sci17(p.gamma), sci17(p.curvature_rate)])
        .collect();
    Ok(csv_string(&["time", "curvature", "gamma", "curvature-rate"], &rows))
}

pub fn histogram_csv(scan: &UniformityScan) -> String {
    let rows: Vec<Vec<String>> = scan
        .histogram
        .iter()
        .enumerate()
        .map(|(residue, &count)| vec![residue.to_string(), count.to_string()])
        .collect();
    csv_string(&["residue", "count"], &rows)
}

pub fn correspondence_csv(report: &CorrespondenceReport) -> String {
    let rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .map(|s| {
            vec![
                sci17(s.time),
                s.scale.to_str_radix(10),
                s.index.to_string(),
                s.gamma_index.to_string(),
                s.agrees.to_string(),
            ]
        })
        .collect();
    csv_string(&["time", "scale", "index", "gamma-index", "agrees"], &rows)
}

/// Tidy long-format series table for plotting: one `(series, x, y)` row per
/// sampled point, at most ~1000 points per series.
pub fn plot_data_csv(bundle: &RunBundle) -> Result<String> {
    let times = &bundle.trajectory.times;
    let stride = (times.len().saturating_sub(1) / 1000).max(1);
    let mut picks: Vec<usize> = (0..times.len()).step_by(stride).collect();
    if *picks.last().expect("nonempty grid") != times.len() - 1 {
        picks.push(times.len() - 1);
    }
    let mut rows = Vec::new();
    for &k in &picks {
        let t = times[k];
        let r = bundle.built.profile.curvature_at(t).map_err(CliError::numeric)?;
        let gamma = geometry::gamma_at(&bundle.built.profile, &bundle.built.thermo, t)
            .map_err(CliError::numeric)?;
        rows.push(vec!["curvature".into(), sci17(t), sci17(r)]);
        rows.push(vec!["gamma".into(), sci17(t), sci17(gamma)]);
        rows.push(vec!["fidelity".into(), sci17(t), sci17(bundle.fidelity[k])]);
        rows.push(vec!["norm".into(), sci17(t), sci17(bundle.trajectory.states[k].norm())]);
    }
    Ok(csv_string(&["series", "x", "y"], &rows))
}

/// Outputs table of a bundle, with defaults applied.
pub fn outputs_of(bundle: &RunBundle) -> OutputsConfig {
    bundle.config.outputs.clone().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_bundle() -> RunBundle {
        let raw = serde_json::json!({
            "model": {
                "kind": "gauge-ladder",
                "base-energy": 1.0, "spacing": 1.0, "tilt": 0.0, "gauge-rates": [0.5, 1.0]
            },
            "profile": { "kind": "linear-ramp", "base": 1.0, "rate": 0.5 },
            "thermo": { "beta": 1.0 },
            "run": { "t0": 0.0, "t1": 2.0, "steps": 200, "initial-index": "auto" }
        });
        run_config_str(&raw.to_string()).unwrap()
    }

    #[test]
    fn trajectory_csv_has_per_level_columns() {
        let text = trajectory_csv(&small_bundle());
        let header = text.lines().next().unwrap();
        assert_eq!(header, "time,norm,fidelity,level-0-re,level-0-im,level-1-re,level-1-im");
        assert_eq!(text.lines().count(), 202);
    }

    #[test]
    fn plot_data_reaches_the_final_time() {
        let bundle = small_bundle();
        let text = plot_data_csv(&bundle).unwrap();
        for series in ["curvature", "gamma", "fidelity", "norm"] {
            let last = text
                .lines()
                .rfind(|l| l.starts_with(&format!("{series},")))
                .unwrap_or_else(|| panic!("no rows for {series}"));
            let x: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(x, 2.0, "{series} stops short of t1");
        }
    }
}
