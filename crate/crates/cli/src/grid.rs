//! Sweep axes: `start:stop:count` (inclusive, evenly spaced) or a single value.

use hessian_radial::Nonlinearity;

pub fn parse_axis(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number {v:?} in {s:?}"))
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [start, stop, count] => {
            let (start, stop) = (num(start)?, num(stop)?);
            let count: usize = count.trim().parse().map_err(|_| format!("bad count in {s:?}"))?;
            if count == 0 {
                return Err(format!("grid {s:?} needs at least one point"));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (stop - start) / (count - 1) as f64;
            Ok((0..count)
                .map(|i| if i + 1 == count { stop } else { start + step * i as f64 })
                .collect())
        }
        _ => Err(format!("expected <value> or <start>:<stop>:<count>, got {s:?}")),
    }
}

/// `exp:1` or `exp:0:2:5`.
pub fn parse_family_axis(s: &str) -> Result<Vec<Nonlinearity>, String> {
    let (name, rest) = s
        .split_once(':')
        .ok_or_else(|| format!("expected <family>:<grid>, got {s:?}"))?;
    parse_axis(rest)?
        .into_iter()
        .map(|v| format!("{name}:{v}").parse::<Nonlinearity>().map_err(|e| e.to_string()))
        .collect()
}
