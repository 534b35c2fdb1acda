//! Report tree and deterministic emission.
//!
//! Every float is printed as 17 significant digits in scientific notation,
//! in JSON and CSV alike, so reruns of the same config reproduce output
//! files byte for byte.  A field whose computation failed carries its error
//! code instead of a number; nothing else about the run is lost.

use std::str::FromStr;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

/// Fixed 17-significant-digit scientific rendering.  The exponent always
/// carries a sign, which is also how the JSON serializer normalizes
/// numbers, so CSV cells and JSON bytes agree exactly.
pub fn sci17(x: f64) -> String {
    let s = format!("{:.16e}", x);
    match s.find('e') {
        Some(k) if !s[k + 1..].starts_with('-') => format!("{}e+{}", &s[..k], &s[k + 1..]),
        _ => s,
    }
}

/// A numeric report field: either a finite value or the error code of the
/// computation that should have produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Value(f64),
    Failed { code: String },
}

impl Quantity {
    pub fn from_result(r: curvphase_core::Result<f64>) -> Self {
        match r {
            Ok(x) => Quantity::Value(x),
            Err(e) => Quantity::Failed { code: e.code().to_string() },
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Quantity::Value(x) => Some(*x),
            Quantity::Failed { .. } => None,
        }
    }

    /// CSV cell rendering: the formatted number, or the bare error code.
    pub fn cell(&self) -> String {
        match self {
            Quantity::Value(x) if x.is_finite() => sci17(*x),
            Quantity::Value(_) => "E_NUMERIC".into(),
            Quantity::Failed { code } => code.clone(),
        }
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Value(x)
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Value(x) if x.is_finite() => {
                let n = serde_json::Number::from_str(&sci17(*x))
                    .map_err(serde::ser::Error::custom)?;
                n.serialize(s)
            }
            Quantity::Value(_) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("error", "E_NUMERIC")?;
                m.end()
            }
            Quantity::Failed { code } => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("error", code)?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ScenarioBlock {
    pub model_kind: String,
    pub dimension: usize,
    pub initial_index: usize,
    pub t0: Quantity,
    pub t1: Quantity,
    pub steps: usize,
    pub beta: Quantity,
    pub gamma_scale: Quantity,
    pub bounds_reading: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PhaseBlock {
    pub dynamical_angle: Quantity,
    pub geometric_angle_numeric: Quantity,
    pub geometric_angle_analytic: Quantity,
    pub residual: Quantity,
    pub omega_total_imag: Quantity,
    pub exp_omega_modulus: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrajectoryBlock {
    pub step_size: Quantity,
    pub norm_drift: Quantity,
    pub adiabaticity_max: Quantity,
    pub final_fidelity: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThermoBlock {
    pub ln_z: Quantity,
    pub energy_fd: Quantity,
    pub energy_leibniz_negated: Quantity,
    pub energy_leibniz_consistent: Quantity,
    pub energy_const_omega: Quantity,
    pub energy_extrinsic: Quantity,
    pub delta_s: Quantity,
    pub intrinsic_terms: [Quantity; 3],
    pub extrinsic_term: Quantity,
    pub ln_z_identification_residual: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GravityBlock {
    pub kappa: Quantity,
    pub dimension: u32,
    pub omega: Quantity,
    pub trace_residual: Quantity,
    pub lambda: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ScanBlock {
    pub chi_square: Quantity,
    pub p_value: Quantity,
    pub degrees_of_freedom: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SensitivityBlock {
    pub center_index: usize,
    pub radius: u32,
    pub change_fraction: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CorrespondenceBlock {
    pub samples: usize,
    pub agreement_rate: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReductionBlock {
    pub states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<CorrespondenceBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunReport {
    pub provenance: Provenance,
    pub scenario: ScenarioBlock,
    pub phase: PhaseBlock,
    pub trajectory: TrajectoryBlock,
    pub thermo: ThermoBlock,
    pub gravity: GravityBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionBlock>,
}

impl RunReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flat `field,value` rows, one per leaf, fields dotted and sorted.
    pub fn to_csv_string(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        csv_string(&["field", "value"], &rows)
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, rows: &mut Vec<Vec<String>>) {
    match value {
        serde_json::Value::Object(map) => {
            if let Some(serde_json::Value::String(code)) = map.get("error") {
                if map.len() == 1 {
                    rows.push(vec![prefix.to_string(), code.clone()]);
                    return;
                }
            }
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        serde_json::Value::Number(n) => rows.push(vec![prefix.to_string(), n.to_string()]),
        serde_json::Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
        serde_json::Value::Bool(b) => rows.push(vec![prefix.to_string(), b.to_string()]),
        serde_json::Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
    }
}

/// Render rows as RFC-4180 CSV with a header line.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 rows")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci17_survives_a_parse_round_trip() {
        for x in [0.1, 1.0, -std::f64::consts::PI, 1.0e300, 5.0e-324, -0.0] {
            let printed = sci17(x);
            assert_eq!(printed.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{printed}");
        }
    }

    #[test]
    fn quantity_cells_print_values_or_codes() {
        assert_eq!(Quantity::from(1.5).cell(), "1.5000000000000000e+0");
        assert_eq!(Quantity::from(f64::NAN).cell(), "E_NUMERIC");
        assert_eq!(Quantity::Failed { code: "E_SINGULARITY".into() }.cell(), "E_SINGULARITY");
    }

    #[test]
    fn quantity_serializes_the_printed_literal() {
        let json = serde_json::to_string(&Quantity::from(0.1)).unwrap();
        assert_eq!(json, "1.0000000000000001e-1");
        let json = serde_json::to_string(&Quantity::from(1.5)).unwrap();
        assert_eq!(json, "1.5000000000000000e+0");
        let json = serde_json::to_string(&Quantity::Failed { code: "E_X".into() }).unwrap();
        assert_eq!(json, "{\"error\":\"E_X\"}");
    }

    #[test]
    fn csv_rows_end_with_a_newline_after_the_header() {
        let text = csv_string(&["k", "v"], &[vec!["a".into(), "1".into()]]);
        assert_eq!(text, "k,v\na,1\n");
    }

    #[test]
    fn sha256_matches_the_empty_input_vector() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
