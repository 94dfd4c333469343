//! CSV and JSON output. Numbers are printed with 17 significant digits so
//! identical inputs give byte-identical files.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cauchy::{BlowupReport, RadialProfile};
use crate::error::{Error, Result};

pub const SCHEMA: &str = "hessian-radial/1";

pub const PROFILE_CSV_HEADER: &str = "r,phi,dphi,volterra,defect";

/// `{:.16e}`: 17 significant digits, round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: std::io::Error) -> Error {
    Error::Evaluation {
        t: f64::NAN,
        message: format!("write failed: {e}"),
    }
}

/// Writes `r,phi,dphi,volterra,defect`. The defect of node `i` is that of the
/// cell ending there, so the first row leaves it empty.
pub fn write_profile_csv<W: Write>(profile: &RadialProfile, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{PROFILE_CSV_HEADER}")?;
    let defect = profile.defect();
    for i in 0..profile.len() {
        let d = match (i, defect) {
            (0, _) | (_, None) => String::new(),
            (_, Some(d)) => fmt_f64(d[i - 1]),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(profile.grid()[i]),
            fmt_f64(profile.phi()[i]),
            fmt_f64(profile.dphi()[i]),
            fmt_f64(profile.volterra()[i]),
            d
        )?;
    }
    Ok(())
}

pub fn profile_csv_string(profile: &RadialProfile) -> String {
    let mut buf = Vec::new();
    write_profile_csv(profile, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Wraps a payload with the schema tag and a `kind` discriminator.
pub fn document<T: Serialize>(kind: &str, payload: &T) -> Result<Value> {
    let body = serde_json::to_value(payload).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(json!({ "schema": SCHEMA, "kind": kind, "data": body }))
}

pub fn profile_json(profile: &RadialProfile) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "profile",
        "params": profile.params(),
        "f": profile.nonlinearity().to_string(),
        "a": profile.initial_value(),
        "truncated": profile.truncated(),
        "r": profile.grid(),
        "phi": profile.phi(),
        "dphi": profile.dphi(),
        "volterra": profile.volterra(),
        "defect": profile.defect(),
    })
}

pub fn blowup_json(report: &BlowupReport) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": "blowup",
        "result": report.status,
        "raw_brackets": report.raw_brackets,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn write_json<W: Write>(value: &Value, mut out: W) -> Result<()> {
    out.write_all(to_pretty(value).as_bytes()).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::picard_solve;
    use crate::nonlinearity::Nonlinearity;
    use crate::radial::ProblemParams;

    fn small_profile() -> RadialProfile {
        let p = ProblemParams::new(2, 1, 0.0).unwrap();
        picard_solve(&p, &Nonlinearity::constant(1.0).unwrap(), 0.0, 1.0, 0.25, 1e-12, 50).unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = profile_csv_string(&small_profile());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], PROFILE_CSV_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1].ends_with(','));
        assert_eq!(lines[1].split(',').count(), 5);
        // φ(1) = 1/4 exactly for this source
        let last: Vec<f64> = lines[5].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(last[0], 1.0);
        assert!((last[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn csv_is_deterministic() {
        assert_eq!(
            profile_csv_string(&small_profile()),
            profile_csv_string(&small_profile())
        );
    }

    #[test]
    fn formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_carries_schema() {
        let v = profile_json(&small_profile());
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["f"], "const:1");
        assert_eq!(v["r"].as_array().unwrap().len(), 5);
        assert_eq!(v["defect"].as_array().unwrap().len(), 4);
        let d = document("mu0", &json!({ "n": 2 })).unwrap();
        assert_eq!(d["schema"], SCHEMA);
        assert_eq!(d["data"]["n"], 2);
    }
}
