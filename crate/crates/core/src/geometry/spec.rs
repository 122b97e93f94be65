//! JSON domain descriptions: `{"kind": "...", "params": {...}}`.
//!
//! | kind                  | params                                           |
//! |-----------------------|--------------------------------------------------|
//! | `interval_union`      | `intervals: [[a, b], ...]` (sorted, disjoint)    |
//! | `polygon`             | `vertices: [[x, y], ...]` (counterclockwise), optional `slits: [[[x, y], [x, y]], ...]` |
//! | `cusp`                | optional `exponent` (only 3)                     |
//! | `cone_union_cantor`   | none                                             |
//! | `bicone`              | none                                             |
//! | `square_minus_cantor` | optional `level` (default 12)                    |
//! | `disk_minus_cantor`   | optional `level` (default 12)                    |
//! | `cantor_complement`   | `rho`, `level`                                   |
//! | `cantor_comb`         | `rho`, `level`                                   |
//!
//! Unknown keys are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Domain, Point};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: String,
    #[serde(default)]
    params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalParams {
    intervals: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonParams {
    vertices: Vec<Point>,
    #[serde(default)]
    slits: Vec<[Point; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CuspParams {
    #[serde(default = "three")]
    exponent: u32,
}

fn three() -> u32 {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelParams {
    #[serde(default = "twelve")]
    level: u32,
}

fn twelve() -> u32 {
    12
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CantorParams {
    rho: f64,
    level: u32,
}

fn params<T: DeserializeOwned>(kind: &str, v: Value) -> Result<T> {
    let v = if v.is_null() { json!({}) } else { v };
    serde_json::from_value(v).map_err(|e| Error::InvalidDomain(format!("{kind}: {e}")))
}

/// Parses a domain description.
pub fn domain_from_json(text: &str) -> Result<Domain> {
    let env: Envelope =
        serde_json::from_str(text).map_err(|e| Error::InvalidDomain(e.to_string()))?;
    domain_from_value(env)
}

fn domain_from_value(env: Envelope) -> Result<Domain> {
    let kind = env.kind.as_str();
    let p = env.params;
    match kind {
        "interval_union" => Domain::interval_union(params::<IntervalParams>(kind, p)?.intervals),
        "polygon" => {
            let q: PolygonParams = params(kind, p)?;
            Domain::polygon_with_slits(q.vertices, q.slits)
        }
        "cusp" => {
            let q: CuspParams = params(kind, p)?;
            if q.exponent != 3 {
                return Err(Error::InvalidDomain(format!(
                    "cusp exponent {} is not supported (only 3)",
                    q.exponent
                )));
            }
            Ok(Domain::Cusp)
        }
        "cone_union_cantor" => params::<Empty>(kind, p).map(|_| Domain::ConeUnionCantor),
        "bicone" => params::<Empty>(kind, p).map(|_| Domain::Bicone),
        "square_minus_cantor" => {
            let level = params::<LevelParams>(kind, p)?.level;
            check_level(level)?;
            Ok(Domain::SquareMinusCantor { level })
        }
        "disk_minus_cantor" => {
            let level = params::<LevelParams>(kind, p)?.level;
            check_level(level)?;
            Ok(Domain::DiskMinusCantor { level })
        }
        "cantor_complement" => {
            let q: CantorParams = params(kind, p)?;
            Domain::cantor_complement(q.rho, q.level)
        }
        "cantor_comb" => {
            let q: CantorParams = params(kind, p)?;
            Domain::cantor_comb(q.rho, q.level)
        }
        other => Err(Error::UnknownName(format!("domain kind '{other}'"))),
    }
}

fn check_level(level: u32) -> Result<()> {
    if (1..=24).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

/// Reads a domain description from a file.
pub fn domain_from_file(path: &Path) -> Result<Domain> {
    domain_from_json(&std::fs::read_to_string(path)?)
}

/// The description that [`domain_from_json`] maps back to `domain`.
pub fn domain_to_json(domain: &Domain) -> Value {
    match domain {
        Domain::IntervalUnion(u) => {
            json!({"kind": "interval_union", "params": {"intervals": u.intervals()}})
        }
        Domain::Polygon(p) => json!({
            "kind": "polygon",
            "params": {"vertices": p.vertices(), "slits": p.slits()}
        }),
        Domain::Cusp => json!({"kind": "cusp", "params": {"exponent": 3}}),
        Domain::ConeUnionCantor => json!({"kind": "cone_union_cantor", "params": {}}),
        Domain::Bicone => json!({"kind": "bicone", "params": {}}),
        Domain::SquareMinusCantor { level } => {
            json!({"kind": "square_minus_cantor", "params": {"level": level}})
        }
        Domain::DiskMinusCantor { level } => {
            json!({"kind": "disk_minus_cantor", "params": {"level": level}})
        }
        Domain::CantorComb(c) => {
            json!({"kind": "cantor_comb", "params": {"rho": c.rho, "level": c.level}})
        }
    }
}
