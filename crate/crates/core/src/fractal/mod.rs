//! Cantor sets, the cone-union domain, the bicone and the generalized
//! staircase function.

pub mod cantor;
pub mod staircase;

pub use cantor::{cantor_contains, cantor_distance, cantor_gaps, CantorScheme, CantorSpec};
pub use staircase::Staircase;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Domain;

/// Builds one of the named domains. `params` holds `key=value` pairs; only
/// `level` (Cantor enumeration depth) and `rho` are recognized.
pub fn build_named_domain(name: &str, params: &BTreeMap<String, f64>) -> Result<Domain> {
    let level = match params.get("level") {
        Some(&l) if (1.0..=24.0).contains(&l) && l.fract() == 0.0 => l as u32,
        Some(&l) => return Err(Error::InvalidParameter(format!("level = {l}"))),
        None => 12,
    };
    let rho = params.get("rho").copied().unwrap_or(1.0 / 3.0);
    for key in params.keys() {
        if key != "level" && key != "rho" {
            return Err(Error::InvalidParameter(format!(
                "unknown key '{key}' for {name}"
            )));
        }
    }
    match name {
        "omega_C" | "omega_c" | "cone_union_cantor" => Ok(Domain::ConeUnionCantor),
        "bicone" => Ok(Domain::Bicone),
        "square_minus_cantor" => Ok(Domain::SquareMinusCantor { level }),
        "disk_minus_cantor" => Ok(Domain::DiskMinusCantor { level }),
        "cusp" => Ok(Domain::Cusp),
        "square" => Ok(Domain::unit_square()),
        "triangle" => Domain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        "crack_1d" => Ok(Domain::crack_1d()),
        "crack_2d" => Ok(Domain::crack_2d()),
        "cantor_1d" => Domain::cantor_complement(rho, level),
        "cantor_comb" => Domain::cantor_comb(rho, level),
        other => Err(Error::UnknownName(format!("domain '{other}'"))),
    }
}

/// Parses `name` or `name:key=value,key=value` and builds the domain.
pub fn parse_named_domain(spec: &str) -> Result<Domain> {
    let (name, params) = split_params(spec)?;
    build_named_domain(&name, &params)
}

/// Splits `name:key=value,...` into the name and its numeric parameters.
pub fn split_params(spec: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{kv}'")))?;
        params.insert(k.trim().to_string(), parse_number(v)?);
    }
    Ok((name.trim().to_string(), params))
}

/// Accepts plain decimals and fractions such as `1/3`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a number: '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        return Ok(p / q);
    }
    s.parse().map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        let none = BTreeMap::new();
        assert!(build_named_domain("omega_C", &none)
            .unwrap()
            .contains([0.0, 0.5]));
        assert!(build_named_domain("bicone", &none)
            .unwrap()
            .contains([0.0, -0.5]));
        let cusp = build_named_domain("cusp", &none).unwrap();
        assert_eq!(cusp.bbox(), ([-1.0, 0.0], [1.0, 1.0]));
        assert!(matches!(
            build_named_domain("moebius", &none),
            Err(Error::UnknownName(_))
        ));
    }

    #[test]
    fn parse_with_params() {
        let d = parse_named_domain("cantor_1d:rho=1/4,level=3").unwrap();
        match d {
            Domain::IntervalUnion(u) => assert_eq!(u.intervals().len(), 15),
            _ => panic!("expected intervals"),
        }
        assert!(parse_named_domain("cantor_1d:rho=0.5").is_err());
        assert!(parse_named_domain("bicone:colour=2").is_err());
    }
}
