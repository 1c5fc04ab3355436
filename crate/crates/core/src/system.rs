//! Discrete-time linear systems `g_{k+1} = F(u_k) · f0(g_k)` on a group model.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{numerical_rank, RealMatrix};
use crate::error::{Error, Result};
use crate::expr::{CompiledMap, Env};
use crate::groups::{automorphism_power, hat_derivative, GroupPoint, LieGroupModel};

type MapFn = dyn Fn(&DVector<f64>) -> Result<DVector<f64>> + Send + Sync;

/// A smooth map between coordinate spaces, either a native closure or a
/// compiled expression map.
#[derive(Clone)]
pub struct GroupMap {
    label: String,
    f: Arc<MapFn>,
}

impl GroupMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&DVector<f64>) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// Control map `u ↦ F(u)` from expressions in `u1..um`.
    pub fn control_expressions(label: impl Into<String>, map: CompiledMap) -> Self {
        Self::new(label, move |u| {
            let out = map.eval(&Env {
                u: u.as_slice(),
                x: &[],
            })?;
            Ok(DVector::from_vec(out))
        })
    }

    /// State map `g ↦ f(g)` from expressions in `x1..xN`.
    pub fn state_expressions(label: impl Into<String>, map: CompiledMap) -> Self {
        Self::new(label, move |x| {
            let out = map.eval(&Env {
                u: &[],
                x: x.as_slice(),
            })?;
            Ok(DVector::from_vec(out))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        (self.f)(x)
    }
}

impl fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupMap")
            .field("label", &self.label)
            .finish()
    }
}

/// Axis-aligned control box containing `0` in its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlRange {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ControlRange {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidRange(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidRange(
                "control dimension must be positive".into(),
            ));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidRange(format!(
                    "axis {} has non-finite bounds",
                    i + 1
                )));
            }
            if !(*lo < 0.0 && 0.0 < *hi) {
                return Err(Error::InvalidRange(format!(
                    "axis {} bounds [{lo}, {hi}] must satisfy lower < 0 < upper",
                    i + 1
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The box `[-r, r]^m`.
    pub fn symmetric(m: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; m], vec![r; m])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `λ·U` for `λ > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.lower.iter().map(|x| x * lambda).collect(),
            self.upper.iter().map(|x| x * lambda).collect(),
        )
    }

    pub fn check(&self, u: &DVector<f64>) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        for (i, &x) in u.iter().enumerate() {
            if !(self.lower[i] <= x && x <= self.upper[i]) {
                return Err(Error::ControlOutOfRange {
                    index: i,
                    value: x,
                    lower: self.lower[i],
                    upper: self.upper[i],
                });
            }
        }
        Ok(())
    }

    /// Like [`check`](Self::check) but also requires distance `margin` from
    /// the boundary.
    pub fn check_interior(&self, u: &DVector<f64>, margin: f64) -> Result<()> {
        self.check(u)?;
        // Tolerates rounding for points inset by exactly `margin`.
        let slack = 1e-9 * margin;
        for (i, &x) in u.iter().enumerate() {
            if x - self.lower[i] < margin - slack || self.upper[i] - x < margin - slack {
                return Err(Error::BoundaryMargin {
                    index: i,
                    value: x,
                    margin,
                });
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| rng.random_range(*lo..=*hi)),
        )
    }
}

/// A finite control sequence with every entry inside the control box.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence(Vec<DVector<f64>>);

impl ControlSequence {
    pub fn new(range: &ControlRange, controls: Vec<DVector<f64>>) -> Result<Self> {
        for u in &controls {
            range.check(u)?;
        }
        Ok(Self(controls))
    }

    pub fn zeros(m: usize, k: usize) -> Self {
        Self(vec![DVector::zeros(m); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[DVector<f64>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<DVector<f64>> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub samples: usize,
    pub seed: u64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, residual: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            threshold,
            passed: residual <= threshold,
        });
    }
}

pub const CHECK_CONTROL_AT_ZERO: &str = "F(0) = e";
pub const CHECK_DRIFT_IDENTITY: &str = "f0(e) = e";
pub const CHECK_CONTROL_MEMBERSHIP: &str = "F(U) in G";
pub const CHECK_DRIFT_MEMBERSHIP: &str = "f0(G) in G";
pub const CHECK_HOMOMORPHISM: &str = "f0(gh) = f0(g) f0(h)";
pub const CHECK_INVERSE: &str = "f0_inverse(f0(g)) = g";

/// A linear system on a Lie group: `f_u(g) = F(u) · f0(g)`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    name: String,
    model: LieGroupModel,
    control: GroupMap,
    drift: GroupMap,
    drift_inverse: Option<GroupMap>,
    range: ControlRange,
}

impl LinearSystem {
    pub fn new(
        name: impl Into<String>,
        model: LieGroupModel,
        control: GroupMap,
        drift: GroupMap,
        drift_inverse: Option<GroupMap>,
        range: ControlRange,
    ) -> Self {
        Self {
            name: name.into(),
            model,
            control,
            drift,
            drift_inverse,
            range,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &LieGroupModel {
        &self.model
    }

    pub fn range(&self) -> &ControlRange {
        &self.range
    }

    pub fn control_dim(&self) -> usize {
        self.range.dim()
    }

    pub fn has_inverse(&self) -> bool {
        self.drift_inverse.is_some()
    }

    /// Same system with a different control box.
    pub fn with_range(&self, range: ControlRange) -> Result<Self> {
        if range.dim() != self.range.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.range.dim(),
                found: range.dim(),
            });
        }
        Ok(Self {
            range,
            ..self.clone()
        })
    }

    /// Same system with a different drift map (used to inject defects).
    pub fn with_drift(&self, drift: GroupMap, drift_inverse: Option<GroupMap>) -> Self {
        Self {
            drift,
            drift_inverse,
            ..self.clone()
        }
    }

    pub fn with_control(&self, control: GroupMap) -> Self {
        Self {
            control,
            ..self.clone()
        }
    }

    fn point(&self, v: DVector<f64>) -> Result<GroupPoint> {
        if v.len() != self.model.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.model.ambient_dim(),
                found: v.len(),
            });
        }
        Ok(GroupPoint(v))
    }

    /// `F(u) = f_u(e)`, without range checks.
    pub fn control_map(&self, u: &DVector<f64>) -> Result<GroupPoint> {
        if u.len() != self.control_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.control_dim(),
                found: u.len(),
            });
        }
        self.point(self.control.apply(u)?)
    }

    pub fn drift(&self, g: &GroupPoint) -> Result<GroupPoint> {
        self.point(self.drift.apply(g.coords())?)
    }

    pub fn drift_inverse(&self, g: &GroupPoint) -> Result<GroupPoint> {
        let inv = self.drift_inverse.as_ref().ok_or_else(|| {
            Error::NotInvertible(format!("system `{}` has no f0 inverse", self.name))
        })?;
        self.point(inv.apply(g.coords())?)
    }

    /// `f0^k(g)`; negative `k` uses the inverse.
    pub fn drift_power(&self, k: i64, g: &GroupPoint) -> Result<GroupPoint> {
        if k < 0 && self.drift_inverse.is_none() {
            return Err(Error::NotInvertible(format!(
                "system `{}` has no f0 inverse",
                self.name
            )));
        }
        automorphism_power(
            |x| self.drift(x),
            Some(|x: &GroupPoint| self.drift_inverse(x)),
            k,
            g,
        )
    }

    /// One step `f_u(g) = F(u) · f0(g)`.
    pub fn step(&self, u: &DVector<f64>, g: &GroupPoint) -> Result<GroupPoint> {
        self.range.check(u)?;
        let fu = self.control_map(u)?;
        Ok(self.model.product(&fu, &self.drift(g)?))
    }

    /// `φ(k, g, u)` by iterating [`step`](Self::step) over the first `k` controls.
    pub fn solve(&self, k: usize, g: &GroupPoint, controls: &[DVector<f64>]) -> Result<GroupPoint> {
        if controls.len() < k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: controls.len(),
            });
        }
        let mut x = g.clone();
        for u in &controls[..k] {
            x = self.step(u, &x)?;
        }
        Ok(x)
    }

    /// The whole trajectory `g, φ(1,g,u), …, φ(k,g,u)`.
    pub fn trajectory(
        &self,
        k: usize,
        g: &GroupPoint,
        controls: &[DVector<f64>],
    ) -> Result<Vec<GroupPoint>> {
        if controls.len() < k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: controls.len(),
            });
        }
        let mut out = Vec::with_capacity(k + 1);
        out.push(g.clone());
        for u in &controls[..k] {
            let next = self.step(u, out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Reversed-time system `f̂_u(g) = f_u⁻¹(e) · f0⁻¹(g)`, whose step is the
    /// inverse of the forward step.
    pub fn reversed(&self) -> Result<Self> {
        let inverse = self.drift_inverse.clone().ok_or_else(|| {
            Error::NotInvertible(format!("system `{}` has no f0 inverse", self.name))
        })?;
        let model = self.model;
        let control = self.control.clone();
        let inv = inverse.clone();
        let reversed_control = GroupMap::new(format!("reversed({})", control.label()), move |u| {
            let fu = GroupPoint(control.apply(u)?);
            inv.apply(model.inverse(&fu).coords())
        });
        Ok(Self {
            name: format!("{}-reversed", self.name),
            model,
            control: reversed_control,
            drift: inverse,
            drift_inverse: Some(self.drift.clone()),
            range: self.range.clone(),
        })
    }

    /// Checks the defining axioms at `samples` random points.
    pub fn validate(&self, seed: u64, samples: usize) -> ValidationReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = &self.model;
        let e = model.identity();
        let mut report = ValidationReport {
            checks: Vec::new(),
            samples,
            seed,
        };
        let dist = |a: Result<GroupPoint>, b: &GroupPoint| {
            a.map(|a| a.distance(b)).unwrap_or(f64::INFINITY)
        };

        report.push(
            CHECK_CONTROL_AT_ZERO,
            dist(self.control_map(&DVector::zeros(self.control_dim())), &e),
            1e-9,
        );
        report.push(CHECK_DRIFT_IDENTITY, dist(self.drift(&e), &e), 1e-9);

        let mut control_membership: f64 = 0.0;
        let mut drift_membership: f64 = 0.0;
        let mut homomorphism: f64 = 0.0;
        let mut inverse: f64 = 0.0;
        for _ in 0..samples {
            let u = self.range.sample(&mut rng);
            control_membership = control_membership.max(
                self.control_map(&u)
                    .map(|p| model.membership_residual(&p))
                    .unwrap_or(f64::INFINITY),
            );
            let g = model.random_point(&mut rng);
            let h = model.random_point(&mut rng);
            let fg = self.drift(&g);
            let fh = self.drift(&h);
            let fgh = self.drift(&model.product(&g, &h));
            let residual = match (&fg, &fh, &fgh) {
                (Ok(a), Ok(b), Ok(c)) => {
                    drift_membership = drift_membership.max(model.membership_residual(a));
                    c.distance(&model.product(a, b))
                }
                _ => f64::INFINITY,
            };
            homomorphism = homomorphism.max(residual);
            if self.drift_inverse.is_some() {
                let r = fg
                    .and_then(|a| self.drift_inverse(&a))
                    .map(|b| b.distance(&g));
                inverse = inverse.max(r.unwrap_or(f64::INFINITY));
            }
        }
        report.push(CHECK_CONTROL_MEMBERSHIP, control_membership, 1e-9);
        report.push(CHECK_DRIFT_MEMBERSHIP, drift_membership, 1e-9);
        report.push(CHECK_HOMOMORPHISM, homomorphism, 1e-7);
        if self.drift_inverse.is_some() {
            report.push(CHECK_INVERSE, inverse, 1e-8);
        }
        report
    }

    /// `d̂F_u` as an `N × m` matrix: central differences in each control
    /// direction, right-trivialized at `F(u)`.
    pub fn hat_derivative_control(&self, u: &DVector<f64>, step: f64) -> Result<RealMatrix> {
        self.range.check_interior(u, step)?;
        let domain = LieGroupModel::Rn(self.control_dim());
        hat_derivative(
            &domain,
            &self.model,
            |v| self.control_map(v.coords()),
            &GroupPoint(u.clone()),
            step,
        )
    }

    /// `d̂(f0)_g` in ambient coordinates.
    pub fn hat_derivative_drift(&self, g: &GroupPoint, step: f64) -> Result<RealMatrix> {
        hat_derivative(&self.model, &self.model, |x| self.drift(x), g, step)
    }

    /// The infinitesimal automorphism `ψ = d̂(f0)_e` as an `N × N` matrix.
    pub fn infinitesimal_automorphism(&self, step: f64) -> Result<RealMatrix> {
        let psi = self.hat_derivative_drift(&self.model.identity(), step)?;
        let alg = self.model.algebra_subspace();
        let image = &psi * alg.to_matrix();
        for col in image.column_iter() {
            let residual = alg.residual(&col.into_owned());
            if residual > 1e-6 * (1.0 + col.norm()) {
                return Err(Error::NotInAlgebra { residual });
            }
        }
        let (rank, _) = numerical_rank(&image, 1e-8)?;
        let n = self.model.group_dim();
        if rank < n {
            return Err(Error::SingularAutomorphism { rank, expected: n });
        }
        Ok(psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn control_range_validation() {
        assert!(ControlRange::new(vec![-1.0], vec![1.0]).is_ok());
        assert!(ControlRange::new(vec![0.0], vec![1.0]).is_err());
        assert!(ControlRange::new(vec![-1.0, -1.0], vec![1.0]).is_err());
        assert!(ControlRange::new(vec![], vec![]).is_err());
        let r = ControlRange::symmetric(1, 1.0).unwrap();
        assert!(matches!(
            r.check(&dvector![1.5]),
            Err(Error::ControlOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            r.check_interior(&dvector![1.0], 1e-5),
            Err(Error::BoundaryMargin { .. })
        ));
    }

    #[test]
    fn paper_heisenberg_validates() {
        let sys = catalog::paper_heisenberg();
        let report = sys.validate(0, 200);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn perturbed_drift_fails_homomorphism() {
        let sys = catalog::paper_heisenberg();
        let base = sys.clone();
        let eps = 1e-3;
        let drift = GroupMap::new("perturbed", move |x| {
            let g = base.drift(&GroupPoint(x.clone()))?;
            Ok(g.coords().add_scalar(eps))
        });
        let report = sys.with_drift(drift, None).validate(0, 50);
        assert!(!report.check(CHECK_HOMOMORPHISM).unwrap().passed);
        assert!(!report.passed());
    }

    #[test]
    fn shifted_control_fails_identity_check() {
        let sys = catalog::paper_heisenberg();
        let base = sys.clone();
        let control = GroupMap::new("shifted", move |u| {
            let mut g = base.control_map(u)?.0;
            g[0] += 0.1;
            Ok(g)
        });
        let report = sys.with_control(control).validate(0, 10);
        assert!(!report.check(CHECK_CONTROL_AT_ZERO).unwrap().passed);
    }

    #[test]
    fn step_examples() {
        let sys = catalog::paper_sl2();
        let g = GroupPoint::new(vec![2.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            sys.step(&dvector![0.0], &g).unwrap(),
            sys.drift(&g).unwrap()
        );

        let u = 0.3;
        let h = dmatrix![1.0, 1.0; 0.0, 1.0];
        let h_inv = dmatrix![1.0, -1.0; 0.0, 1.0];
        let fu = dmatrix![1.0 + u, -u; u, 1.0 - u];
        let gm = dmatrix![2.0, 1.0; 1.0, 1.0];
        let expected = fu * h * gm * h_inv;
        let got = sys.step(&dvector![u], &g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((got.as_slice()[2 * i + j] - expected[(i, j)]).abs() < 1e-14);
            }
        }
        assert!(matches!(
            sys.step(&dvector![2.0], &g),
            Err(Error::ControlOutOfRange { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let sys = catalog::paper_heisenberg();
        let g = GroupPoint::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(sys.solve(0, &g, &[]).unwrap(), g);
        assert_eq!(
            sys.solve(1, &g, &[dvector![0.0]]).unwrap(),
            GroupPoint::new(vec![1.5, 1.0, 1.0])
        );
        assert!(sys.solve(2, &g, &[dvector![0.0]]).is_err());
    }

    #[test]
    fn reversed_zero_control_is_drift_inverse() {
        let sys = catalog::paper_heisenberg();
        let rev = sys.reversed().unwrap();
        let g = GroupPoint::new(vec![0.4, -0.2, 1.1]);
        assert!(
            rev.step(&dvector![0.0], &g)
                .unwrap()
                .distance(&sys.drift_inverse(&g).unwrap())
                < 1e-15
        );
        assert!(rev.validate(3, 100).passed());
    }

    #[test]
    fn reversed_needs_inverse() {
        let sys = catalog::paper_heisenberg();
        let d = sys.clone();
        let no_inv = sys.with_drift(
            GroupMap::new("f0", move |x| Ok(d.drift(&GroupPoint(x.clone()))?.0)),
            None,
        );
        assert!(matches!(no_inv.reversed(), Err(Error::NotInvertible(_))));
        assert!(matches!(
            no_inv.drift_power(-1, &GroupPoint::new(vec![0.0; 3])),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn hat_derivative_control_golden_values() {
        let sl2 = catalog::paper_sl2();
        let d = sl2.hat_derivative_control(&dvector![0.37], 1e-5).unwrap();
        assert!((d.column(0) - dvector![1.0, -1.0, 1.0, -1.0]).amax() < 1e-9);

        let heis = catalog::paper_heisenberg();
        let u = -0.6;
        let d = heis.hat_derivative_control(&dvector![u], 1e-5).unwrap();
        assert!((d.column(0) - dvector![-0.5 - 7.0 * u / 6.0, 1.0, 0.5]).amax() < 1e-9);

        let aff2 = catalog::paper_aff2(1.0, 1.0).unwrap();
        let u: f64 = 0.8;
        let d = aff2.hat_derivative_control(&dvector![u], 1e-5).unwrap();
        assert!((d.column(0) - dvector![1.0, 2.0 * u * (-u).exp()]).amax() < 1e-9);

        assert!(matches!(
            aff2.hat_derivative_control(&dvector![1.0], 1e-5),
            Err(Error::BoundaryMargin { .. })
        ));
    }

    #[test]
    fn infinitesimal_automorphisms() {
        let heis = catalog::paper_heisenberg();
        let psi = heis.infinitesimal_automorphism(1e-5).unwrap();
        assert!((psi - dmatrix![1.0, 1.0, 0.0; 0.0, 1.0, 0.0; 0.0, 1.0, 1.0]).amax() < 1e-9);

        let sl2 = catalog::paper_sl2();
        let psi = sl2.infinitesimal_automorphism(1e-5).unwrap();
        let expected = dmatrix![
            1.0, 0.0, 1.0, 0.0;
            -1.0, 1.0, -1.0, 1.0;
            0.0, 0.0, 1.0, 0.0;
            0.0, 0.0, -1.0, 1.0
        ];
        assert!((psi - expected).amax() < 1e-9);

        let id = heis.with_drift(GroupMap::new("id", |x| Ok(x.clone())), None);
        let psi = id.infinitesimal_automorphism(1e-5).unwrap();
        assert!((psi - RealMatrix::identity(3, 3)).amax() < 1e-9);

        let collapse = heis.with_drift(
            GroupMap::new("collapse", |x| Ok(dvector![x[0], 0.0, 0.0])),
            None,
        );
        assert!(matches!(
            collapse.infinitesimal_automorphism(1e-5),
            Err(Error::SingularAutomorphism { .. })
        ));
    }
}
