//! Built-in example systems.
//!
//! * `paper-sl2`: `F(u) = [[1+u, −u], [u, 1−u]]`, `f0(g) = h g h⁻¹` with
//!   `h = [[1, 1], [0, 1]]`, `U = [−1, 1]`.
//! * `paper-aff2`: `F(u) = (eᵘ, u²)`, `f0(x, y) = (x, a(x − 1) + d·y)`,
//!   `U = [−1, 1]`; parameters `a` (default 1) and `d` (default 1, nonzero).
//! * `paper-heisenberg`: `F(u) = (−u/2 − u²/3, u, u/2)`,
//!   `f0(x) = (x1 + x2 + x2²/2, x2, x2 + x3)`, `U = [−1, 1]`.
//!
//! Linear systems on ℝⁿ (`f0 = A`, `F(u) = B·u`) come from [`rn_linear`].

use std::collections::BTreeMap;

use nalgebra::{dvector, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::groups::LieGroupModel;
use crate::system::{ControlRange, GroupMap, LinearSystem};

pub const PAPER_SL2: &str = "paper-sl2";
pub const PAPER_AFF2: &str = "paper-aff2";
pub const PAPER_HEISENBERG: &str = "paper-heisenberg";

pub const SYSTEM_NAMES: [&str; 3] = [PAPER_SL2, PAPER_AFF2, PAPER_HEISENBERG];

fn unit_interval() -> ControlRange {
    ControlRange::symmetric(1, 1.0).expect("[-1, 1] is a valid range")
}

pub fn paper_sl2() -> LinearSystem {
    let control = GroupMap::new("F(u) = [[1+u, -u], [u, 1-u]]", |u| {
        let u = u[0];
        Ok(dvector![1.0 + u, -u, u, 1.0 - u])
    });
    // h g h⁻¹ with h = [[1, 1], [0, 1]]
    let drift = GroupMap::new("f0(g) = h g h^-1", |g| {
        let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
        Ok(dvector![a + c, -a + b - c + d, c, d - c])
    });
    let drift_inverse = GroupMap::new("f0^-1(g) = h^-1 g h", |g| {
        let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
        Ok(dvector![a - c, a + b - c - d, c, c + d])
    });
    LinearSystem::new(
        PAPER_SL2,
        LieGroupModel::Sl2,
        control,
        drift,
        Some(drift_inverse),
        unit_interval(),
    )
}

/// Aff(2,ℝ) system with automorphism `(x, y) ↦ (x, a(x − 1) + d·y)`.
pub fn paper_aff2(a: f64, d: f64) -> Result<LinearSystem> {
    if d == 0.0 || !d.is_finite() || !a.is_finite() {
        return Err(Error::NotInvertible(format!(
            "aff2 automorphism needs finite a and nonzero d (got a = {a}, d = {d})"
        )));
    }
    let control = GroupMap::new("F(u) = (exp(u), u^2)", |u| {
        let u = u[0];
        Ok(dvector![u.exp(), u * u])
    });
    let drift = GroupMap::new(format!("f0(x, y) = (x, {a}(x - 1) + {d}y)"), move |g| {
        Ok(dvector![g[0], a * (g[0] - 1.0) + d * g[1]])
    });
    let drift_inverse = GroupMap::new("f0^-1", move |g| {
        Ok(dvector![g[0], (g[1] - a * (g[0] - 1.0)) / d])
    });
    Ok(LinearSystem::new(
        PAPER_AFF2,
        LieGroupModel::Aff2,
        control,
        drift,
        Some(drift_inverse),
        unit_interval(),
    ))
}

pub fn paper_heisenberg() -> LinearSystem {
    let control = GroupMap::new("F(u) = (-u/2 - u^2/3, u, u/2)", |u| {
        let u = u[0];
        Ok(dvector![-u / 2.0 - u * u / 3.0, u, u / 2.0])
    });
    let drift = GroupMap::new("f0(x) = (x1 + x2 + x2^2/2, x2, x2 + x3)", |x| {
        Ok(dvector![x[0] + x[1] + x[1] * x[1] / 2.0, x[1], x[1] + x[2]])
    });
    let drift_inverse = GroupMap::new("f0^-1", |y| {
        Ok(dvector![y[0] - y[1] - y[1] * y[1] / 2.0, y[1], y[2] - y[1]])
    });
    LinearSystem::new(
        PAPER_HEISENBERG,
        LieGroupModel::Heisenberg,
        control,
        drift,
        Some(drift_inverse),
        unit_interval(),
    )
}

/// Linear system on ℝⁿ: `f0(x) = A·x`, `F(u) = B·u`, `U = [−1, 1]^m`.
pub fn rn_linear(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<LinearSystem> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.nrows(),
        });
    }
    let m = b.ncols();
    let a_inv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("matrix A is singular".into()))?;
    let control = GroupMap::new("F(u) = B u", move |u: &DVector<f64>| Ok(&b * u));
    let drift = GroupMap::new("f0(x) = A x", move |x: &DVector<f64>| Ok(&a * x));
    let drift_inverse = GroupMap::new("f0^-1(x) = A^-1 x", move |x: &DVector<f64>| Ok(&a_inv * x));
    Ok(LinearSystem::new(
        "rn-linear",
        LieGroupModel::Rn(n),
        control,
        drift,
        Some(drift_inverse),
        ControlRange::symmetric(m, 1.0)?,
    ))
}

/// Looks up a catalog system by name, applying `params` overrides.
pub fn lookup(name: &str, params: &BTreeMap<String, f64>) -> Result<LinearSystem> {
    let allowed: &[&str] = match name {
        PAPER_AFF2 => &["a", "d"],
        PAPER_SL2 | PAPER_HEISENBERG => &[],
        other => {
            return Err(Error::SystemFile(format!(
                "unknown catalog system `{other}` (expected one of {})",
                SYSTEM_NAMES.join(", ")
            )))
        }
    };
    if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::SystemFile(format!(
            "system `{name}` has no parameter `{key}`"
        )));
    }
    match name {
        PAPER_SL2 => Ok(paper_sl2()),
        PAPER_HEISENBERG => Ok(paper_heisenberg()),
        _ => paper_aff2(
            params.get("a").copied().unwrap_or(1.0),
            params.get("d").copied().unwrap_or(1.0),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_systems_validate() {
        for sys in [
            paper_sl2(),
            paper_heisenberg(),
            paper_aff2(1.0, 1.0).unwrap(),
            paper_aff2(0.0, -2.0).unwrap(),
        ] {
            let report = sys.validate(11, 200);
            assert!(report.passed(), "{}: {report:?}", sys.name());
        }
    }

    #[test]
    fn lookup_rejects_unknown() {
        assert!(lookup("paper-so3", &BTreeMap::new()).is_err());
        let mut p = BTreeMap::new();
        p.insert("b".to_string(), 1.0);
        assert!(lookup(PAPER_AFF2, &p).is_err());
        p.clear();
        p.insert("d".to_string(), 0.0);
        assert!(lookup(PAPER_AFF2, &p).is_err());
    }

    #[test]
    fn rn_linear_requires_invertible_a() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::from_element(2, 1, 1.0);
        assert!(matches!(rn_linear(a, b), Err(Error::NotInvertible(_))));
    }
}
