//! System definition files (TOML).
//!
//! ```toml
//! [group]
//! name = "heisenberg"          # heisenberg | aff2 | sl2 | rn
//!
//! [control]
//! m = 1
//! lower = [-1.0]
//! upper = [1.0]
//!
//! [map]
//! F = ["-u1/2 - u1^2/3", "u1", "u1/2"]
//! f0 = ["x1 + x2 + x2^2/2", "x2", "x2 + x3"]
//! f0_inverse = ["x1 - x2 - x2^2/2", "x2", "x3 - x2"]
//!
//! [numeric]                    # optional
//! tol = 1e-8
//! fd_step = 1e-5
//! grid = 11
//! seed = 0
//! ```
//!
//! Instead of expressions, `[map]` may name a catalog system
//! (`catalog = "paper-aff2"`), in which case `[control]` is optional and
//! `group.a` / `group.d` set the Aff(2,ℝ) automorphism. An `rn` group may
//! omit `[map]` and give `n`, `A` (n×n) and `B` (n×m) in `[group]`.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::expr::CompiledMap;
use crate::groups::LieGroupModel;
use crate::system::{ControlRange, GroupMap, LinearSystem};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    group: RawGroup,
    control: Option<RawControl>,
    map: Option<RawMap>,
    numeric: Option<NumericOverrides>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    name: String,
    n: Option<usize>,
    a: Option<f64>,
    d: Option<f64>,
    #[serde(rename = "A")]
    a_matrix: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawControl {
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    catalog: Option<String>,
    #[serde(rename = "F")]
    control: Option<Vec<String>>,
    f0: Option<Vec<String>>,
    f0_inverse: Option<Vec<String>>,
}

/// Optional numeric settings from the `[numeric]` section.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericOverrides {
    pub tol: Option<f64>,
    pub fd_step: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

/// A loaded system plus the file's numeric overrides.
#[derive(Debug, Clone)]
pub struct SystemFile {
    pub system: LinearSystem,
    pub numeric: NumericOverrides,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::SystemFile(format!("{field}: {msg}"))
}

/// Resolves `target` as a catalog system name, or else as a path to a
/// system file.
pub fn load(target: &str, params: &BTreeMap<String, f64>) -> Result<SystemFile> {
    if catalog::SYSTEM_NAMES.contains(&target) {
        return Ok(SystemFile {
            system: catalog::lookup(target, params)?,
            numeric: NumericOverrides::default(),
        });
    }
    let path = Path::new(target);
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::SystemFile(format!(
            "cannot read system `{target}`: {e} (catalog systems: {})",
            catalog::SYSTEM_NAMES.join(", ")
        ))
    })?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(target);
    parse_str(name, &text, params).map_err(|e| match e {
        Error::SystemFile(msg) => Error::SystemFile(format!("{target}: {msg}")),
        other => other,
    })
}

fn matrix(
    field: &str,
    rows: &[Vec<f64>],
    nrows: usize,
    ncols: Option<usize>,
) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(field_err(
            field,
            format!("expected {nrows} rows, found {}", rows.len()),
        ));
    }
    let ncols = ncols.unwrap_or_else(|| rows.first().map_or(0, |r| r.len()));
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(field_err(
                field,
                format!("row {} has {} entries, expected {ncols}", i + 1, r.len()),
            ));
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn range_from(control: &RawControl) -> Result<ControlRange> {
    if control.m == 0 {
        return Err(field_err("control.m", "must be positive"));
    }
    for (field, v) in [
        ("control.lower", &control.lower),
        ("control.upper", &control.upper),
    ] {
        if v.len() != control.m {
            return Err(field_err(
                field,
                format!(
                    "expected {} entries to match control.m = {}, found {}",
                    control.m,
                    control.m,
                    v.len()
                ),
            ));
        }
    }
    ControlRange::new(control.lower.clone(), control.upper.clone())
        .map_err(|e| field_err("control", e))
}

fn compile(
    field: &str,
    sources: &[String],
    controls: usize,
    states: usize,
    out_dim: usize,
) -> Result<CompiledMap> {
    if sources.len() != out_dim {
        return Err(field_err(
            field,
            format!(
                "expected {out_dim} coordinate expressions, found {}",
                sources.len()
            ),
        ));
    }
    CompiledMap::compile(sources, controls, states).map_err(|e| field_err(field, e))
}

/// Parses a system file body. `name` labels the resulting system.
pub fn parse_str(name: &str, text: &str, params: &BTreeMap<String, f64>) -> Result<SystemFile> {
    let raw: RawFile = toml::from_str(text)
        .map_err(|e| Error::SystemFile(e.to_string().trim_end().to_string()))?;
    let numeric = raw.numeric.unwrap_or_default();
    let group = &raw.group;
    let model =
        LieGroupModel::from_name(&group.name, group.n).map_err(|e| field_err("group.name", e))?;
    let big_n = model.ambient_dim();

    let map = raw.map.as_ref();
    let catalog_name = map.and_then(|m| m.catalog.as_deref());
    let has_exprs =
        map.is_some_and(|m| m.control.is_some() || m.f0.is_some() || m.f0_inverse.is_some());

    let system = match (catalog_name, has_exprs) {
        (Some(_), true) => {
            return Err(field_err(
                "map",
                "give either `catalog` or the expressions F/f0/f0_inverse, not both",
            ))
        }
        (Some(cat), false) => {
            let mut merged = BTreeMap::new();
            if let Some(a) = group.a {
                merged.insert("a".to_string(), a);
            }
            if let Some(d) = group.d {
                merged.insert("d".to_string(), d);
            }
            merged.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
            let sys = catalog::lookup(cat, &merged).map_err(|e| field_err("map.catalog", e))?;
            if sys.model().name() != model.name() {
                return Err(field_err(
                    "group.name",
                    format!("catalog system `{cat}` lives on `{}`", sys.model().name()),
                ));
            }
            match &raw.control {
                Some(c) => {
                    let range = range_from(c)?;
                    if range.dim() != sys.control_dim() {
                        return Err(field_err(
                            "control.m",
                            format!(
                                "catalog system `{cat}` takes {} controls, found {}",
                                sys.control_dim(),
                                c.m
                            ),
                        ));
                    }
                    sys.with_range(range)?
                }
                None => sys,
            }
        }
        (None, true) => {
            let map = map.expect("expressions imply a map section");
            let control = raw.control.as_ref().ok_or_else(|| {
                field_err(
                    "control",
                    "section is required for expression-defined systems",
                )
            })?;
            let range = range_from(control)?;
            let m = range.dim();
            let f_src = map
                .control
                .as_ref()
                .ok_or_else(|| field_err("map.F", "missing"))?;
            let f0_src = map
                .f0
                .as_ref()
                .ok_or_else(|| field_err("map.f0", "missing"))?;
            let inv_src = map.f0_inverse.as_ref().ok_or_else(|| {
                field_err("map.f0_inverse", "required for expression-defined systems")
            })?;
            let f = compile("map.F", f_src, m, 0, big_n)?;
            let f0 = compile("map.f0", f0_src, 0, big_n, big_n)?;
            let inv = compile("map.f0_inverse", inv_src, 0, big_n, big_n)?;
            LinearSystem::new(
                name,
                model,
                GroupMap::control_expressions("F", f),
                GroupMap::state_expressions("f0", f0),
                Some(GroupMap::state_expressions("f0_inverse", inv)),
                range,
            )
        }
        (None, false) => {
            let LieGroupModel::Rn(n) = model else {
                return Err(field_err(
                    "map",
                    "missing: give `catalog` or the expressions F, f0, f0_inverse",
                ));
            };
            let a_rows = group
                .a_matrix
                .as_ref()
                .ok_or_else(|| field_err("group.A", "missing"))?;
            let b_rows = group
                .b_matrix
                .as_ref()
                .ok_or_else(|| field_err("group.B", "missing"))?;
            let a = matrix("group.A", a_rows, n, Some(n))?;
            let b = matrix("group.B", b_rows, n, None)?;
            if b.ncols() == 0 {
                return Err(field_err("group.B", "needs at least one column"));
            }
            let sys = catalog::rn_linear(a, b.clone()).map_err(|e| field_err("group.A", e))?;
            let sys = match &raw.control {
                Some(c) => {
                    if c.m != b.ncols() {
                        return Err(field_err(
                            "control.m",
                            format!(
                                "{} does not match the {} columns of group.B",
                                c.m,
                                b.ncols()
                            ),
                        ));
                    }
                    sys.with_range(range_from(c)?)?
                }
                None => sys,
            };
            LinearSystem::new(
                name,
                model,
                control_of(&sys),
                drift_of(&sys),
                inverse_of(&sys),
                sys.range().clone(),
            )
        }
    };
    Ok(SystemFile { system, numeric })
}

fn control_of(sys: &LinearSystem) -> GroupMap {
    let s = sys.clone();
    GroupMap::new("F(u) = B u", move |u| Ok(s.control_map(u)?.0))
}

fn drift_of(sys: &LinearSystem) -> GroupMap {
    let s = sys.clone();
    GroupMap::new("f0(x) = A x", move |x| Ok(s.drift(&x.clone().into())?.0))
}

fn inverse_of(sys: &LinearSystem) -> Option<GroupMap> {
    let s = sys.clone();
    Some(GroupMap::new("f0^-1(x) = A^-1 x", move |x| {
        Ok(s.drift_inverse(&x.clone().into())?.0)
    }))
}
