use serde_json::Value;

use super::MeasurementModel;
use crate::input::{as_object, f64_rows, optional_f64, optional_str, reject_unknown, required_f64, InputError};
use crate::linalg::RealMatrix;

/// Parses `{"model": ..., "sigma"?, "p_dark"?, "nu"?, "theta"?, "label"?}`.
pub fn parse_measurement(value: &Value) -> Result<MeasurementModel, InputError> {
    let obj = as_object(value, "measurement")?;
    reject_unknown(obj, &["model", "sigma", "p_dark", "nu", "theta", "label"])?;
    let model = optional_str(obj, "model")?.ok_or_else(|| InputError::field("model", "missing model name"))?;
    fn param(field: &'static str) -> impl Fn(super::MeasurementError) -> InputError {
        move |e| InputError::field(field, e.to_string())
    }
    let parsed = match model {
        "gaussian" => {
            let rows = f64_rows(
                obj.get("sigma").ok_or_else(|| InputError::field("sigma", "gaussian model needs Σ"))?,
                "sigma",
            )?;
            let sigma = RealMatrix::from_rows(&rows).map_err(|e| InputError::field("sigma", e.to_string()))?;
            MeasurementModel::gaussian(sigma).map_err(param("sigma"))?
        }
        "heterodyne" => MeasurementModel::heterodyne(),
        "homodyne" => MeasurementModel::homodyne(optional_f64(obj, "theta")?.unwrap_or(0.0)).map_err(param("theta"))?,
        "ideal_pd" => MeasurementModel::ideal_pd(),
        "realistic_pd" => MeasurementModel::realistic_pd(required_f64(obj, "p_dark")?).map_err(param("p_dark"))?,
        "thermal_pd" => MeasurementModel::thermal_pd(required_f64(obj, "nu")?).map_err(param("nu"))?,
        other => {
            return Err(InputError::field(
                "model",
                format!(
                    "unknown model `{other}` (expected gaussian, heterodyne, homodyne, ideal_pd, realistic_pd or thermal_pd)"
                ),
            ))
        }
    };
    Ok(match optional_str(obj, "label")? {
        Some(label) => parsed.with_label(label),
        None => parsed,
    })
}

/// Parses a list of measurement set members. A member is either a single-mode
/// measurement object or an array of them (a tensor product over modes).
pub fn parse_measurement_list(value: &Value) -> Result<Vec<Vec<MeasurementModel>>, InputError> {
    let items = value
        .as_array()
        .ok_or_else(|| InputError::field("", "expected an array of measurements"))?;
    if items.is_empty() {
        return Err(InputError::field("", "measurement list is empty"));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, item)| match item {
            Value::Array(factors) if !factors.is_empty() => factors
                .iter()
                .enumerate()
                .map(|(j, f)| parse_measurement(f).map_err(|e| e.within(&format!("[{i}][{j}]"))))
                .collect(),
            Value::Array(_) => Err(InputError::field(format!("[{i}]"), "empty product measurement")),
            other => Ok(vec![parse_measurement(other).map_err(|e| e.within(&format!("[{i}]")))?]),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_json;
    use crate::measurements::MeasurementKind;

    #[test]
    fn parses_catalogue() {
        let v = parse_json(
            r#"[{"model": "gaussian", "sigma": [[1,0],[0,1]], "label": "vac"},
                {"model": "realistic_pd", "p_dark": 0.25},
                {"model": "thermal_pd", "nu": 2},
                [{"model": "heterodyne"}, {"model": "homodyne", "theta": 1.0}]]"#,
        )
        .unwrap();
        let list = parse_measurement_list(&v).unwrap();
        assert_eq!(list.len(), 4);
        assert_eq!(list[0][0].label(), "vac");
        assert_eq!(list[1][0].kind(), &MeasurementKind::RealisticPd { p_dark: 0.25 });
        assert_eq!(list[3].len(), 2);
    }

    #[test]
    fn diagnostics() {
        let v = parse_json(r#"[{"model": "realistic_pd", "p_dark": 2}]"#).unwrap();
        let err = parse_measurement_list(&v).unwrap_err();
        assert!(matches!(&err, InputError::Field { field, .. } if field == "[0].p_dark"), "{err}");
        let v = parse_json(r#"[{"model": "thermal_pd"}]"#).unwrap();
        assert!(parse_measurement_list(&v).unwrap_err().to_string().contains("[0].nu"));
        let v = parse_json(r#"[]"#).unwrap();
        assert!(parse_measurement_list(&v).is_err());
        let v = parse_json(r#"{"model": "photon_counter"}"#).unwrap();
        assert!(parse_measurement(&v).is_err());
    }
}
