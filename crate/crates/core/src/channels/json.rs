use serde_json::Value;

use super::{loss_with_excess, make_channel, ChannelClass, ChannelTag, GaussianChannel};
use crate::input::{
    as_object, f64_rows, f64_vector, optional_f64, optional_str, reject_unknown, InputError,
};
use crate::linalg::RealMatrix;

/// Parses a channel object.
///
/// Accepted shapes:
/// - catalogue: `{"class": "C_loss", "tau": 0.4, "nbar": 0}`
/// - loss with excess noise: `{"tau": 0.5, "epsilon": 0.2}` (optionally with `"class": "C_loss"`)
/// - raw: `{"modes": 1, "T": [[..]], "N": [[..]], "d": [..]}`
pub fn parse_channel(value: &Value) -> Result<GaussianChannel, InputError> {
    let obj = as_object(value, "channel")?;
    if obj.contains_key("T") || obj.contains_key("N") || obj.contains_key("modes") {
        return parse_raw(obj);
    }
    reject_unknown(obj, &["class", "tau", "nbar", "epsilon"])?;
    let tau = optional_f64(obj, "tau")?;
    let nbar = optional_f64(obj, "nbar")?.unwrap_or(0.0);
    let class = optional_str(obj, "class")?;

    if let Some(epsilon) = optional_f64(obj, "epsilon")? {
        if let Some(name) = class {
            let tag: ChannelTag = name.parse().map_err(|e: String| InputError::field("class", e))?;
            if tag != ChannelTag::CLoss {
                return Err(InputError::field("epsilon", "excess noise only applies to class C_loss"));
            }
        }
        let tau = tau.ok_or_else(|| InputError::field("tau", "missing required number"))?;
        if nbar != 0.0 {
            return Err(InputError::field("nbar", "use epsilon for excess noise, not nbar"));
        }
        return loss_with_excess(tau, epsilon).map_err(|e| InputError::field("epsilon", e.to_string()));
    }

    let name = class.ok_or_else(|| InputError::field("class", "missing channel class"))?;
    let tag: ChannelTag = name.parse().map_err(|e: String| InputError::field("class", e))?;
    let class = match (tau, tag.fixed_tau()) {
        (Some(t), _) => ChannelClass::new(tag, t, nbar),
        (None, Some(_)) => ChannelClass::fixed(tag, nbar),
        (None, None) => return Err(InputError::field("tau", format!("class {tag} needs τ"))),
    }
    .map_err(|e| InputError::field(if tau.is_some() { "tau" } else { "nbar" }, e.to_string()))?;
    class.channel().map_err(|e| InputError::field("class", e.to_string()))
}

fn parse_raw(obj: &serde_json::Map<String, Value>) -> Result<GaussianChannel, InputError> {
    reject_unknown(obj, &["modes", "T", "N", "d"])?;
    let modes = match obj.get("modes") {
        Some(v) => v
            .as_u64()
            .filter(|&m| m >= 1)
            .ok_or_else(|| InputError::field("modes", "expected a positive integer"))? as usize,
        None => return Err(InputError::field("modes", "missing mode count")),
    };
    let matrix = |key: &str| -> Result<RealMatrix, InputError> {
        let rows = f64_rows(
            obj.get(key).ok_or_else(|| InputError::field(key, "missing matrix"))?,
            key,
        )?;
        RealMatrix::from_rows(&rows).map_err(|e| InputError::field(key, e.to_string()))
    };
    let t = matrix("T")?;
    let n = matrix("N")?;
    let d = match obj.get("d") {
        Some(v) => f64_vector(v, "d")?,
        None => vec![0.0; 2 * modes],
    };
    make_channel(modes, t, n, d).map_err(|e| InputError::field("", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_json;

    fn parse(text: &str) -> Result<GaussianChannel, InputError> {
        parse_channel(&parse_json(text).unwrap())
    }

    #[test]
    fn catalogue_entry() {
        let ch = parse(r#"{"class": "C_loss", "tau": 0.4}"#).unwrap();
        assert!((ch.noise().get(0, 0) - 0.6).abs() < 1e-15);
        let id = parse(r#"{"class": "B2_Id"}"#).unwrap();
        assert_eq!(id, GaussianChannel::identity(1).unwrap());
    }

    #[test]
    fn excess_noise_constructor() {
        let ch = parse(r#"{"class": "C_loss", "tau": 0.5, "epsilon": 0.5}"#).unwrap();
        assert!((ch.noise().get(1, 1) - 1.5).abs() < 1e-15);
        assert!(parse(r#"{"class": "B2", "tau": 1, "epsilon": 0.5}"#).is_err());
    }

    #[test]
    fn raw_matrices() {
        let ch = parse(r#"{"modes": 1, "T": [[1,0],[0,1]], "N": [[0,0],[0,0]], "d": [0.5, 0]}"#)
            .unwrap();
        assert_eq!(ch.displacement(), &[0.5, 0.0]);
        let err = parse(r#"{"modes": 1, "T": [[2,0],[0,2]], "N": [[0,0],[0,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("completely positive"));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = parse(r#"{"class": "C_loss", "tau": "x"}"#).unwrap_err();
        assert!(matches!(&err, InputError::Field { field, .. } if field == "tau"), "{err}");
        let err = parse(r#"{"class": "C_loss", "tau": 1.5}"#).unwrap_err();
        assert!(matches!(&err, InputError::Field { field, .. } if field == "tau"));
        let err = parse(r#"{"class": "Q"}"#).unwrap_err();
        assert!(matches!(&err, InputError::Field { field, .. } if field == "class"));
        let err = parse(r#"{"class": "B2", "taus": 1}"#).unwrap_err();
        assert!(matches!(&err, InputError::Field { field, .. } if field == "taus"));
    }
}
