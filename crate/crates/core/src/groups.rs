//! Lie group models in ambient coordinates and the built-in catalog.
//!
//! | model        | N | n | coordinates                                   |
//! |--------------|---|---|-----------------------------------------------|
//! | `heisenberg` | 3 | 3 | `(x1, x2, x3)`, `x1` is the corner entry      |
//! | `aff2`       | 2 | 2 | half plane `(x > 0, y)`, identity `(1, 0)`    |
//! | `sl2`        | 4 | 3 | 2×2 matrix entries, row-major                 |
//! | `rn`         | n | n | vector addition                               |
//!
//! Right translation is `R_g(h) = h·g` and left translation `L_g(h) = g·h`.
//! Tangent vectors are right-trivialized: `φ_g(X) = d(R_g)_e X`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::algebra::{AlgebraBasis, AlgebraVector, RealMatrix};
use crate::error::{Error, Result};

/// A point of a group model in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint(pub DVector<f64>);

impl GroupPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(DVector::from_vec(coords))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn distance(&self, other: &GroupPoint) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

impl From<DVector<f64>> for GroupPoint {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketMechanism {
    StructureConstants,
    MatrixCommutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieGroupModel {
    /// Three-dimensional Heisenberg group with product
    /// `(x1 + y1 + x2·y3, x2 + y2, x3 + y3)`.
    Heisenberg,
    /// Affine group of the line, `(x1, y1)·(x2, y2) = (x1·x2, y2 + x2·y1)`.
    Aff2,
    /// SL(2,ℝ) embedded in ℝ⁴.
    Sl2,
    /// Abelian group ℝⁿ.
    Rn(usize),
}

/// Names accepted by [`LieGroupModel::from_name`].
pub const CATALOG_NAMES: [&str; 4] = ["heisenberg", "aff2", "sl2", "rn"];

/// Relative finite-difference step for model Jacobians.
const CHART_STEP: f64 = 1e-5;

impl LieGroupModel {
    pub fn from_name(name: &str, n: Option<usize>) -> Result<Self> {
        match name {
            "heisenberg" => Ok(Self::Heisenberg),
            "aff2" => Ok(Self::Aff2),
            "sl2" => Ok(Self::Sl2),
            "rn" => match n {
                Some(n) if n > 0 => Ok(Self::Rn(n)),
                _ => Err(Error::SystemFile(
                    "group `rn` requires a positive `n`".into(),
                )),
            },
            other => Err(Error::SystemFile(format!(
                "unknown group `{other}` (expected one of {})",
                CATALOG_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Heisenberg => "heisenberg",
            Self::Aff2 => "aff2",
            Self::Sl2 => "sl2",
            Self::Rn(_) => "rn",
        }
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Heisenberg => 3,
            Self::Aff2 => 2,
            Self::Sl2 => 4,
            Self::Rn(n) => *n,
        }
    }

    /// Group dimension `n`.
    pub fn group_dim(&self) -> usize {
        match self {
            Self::Heisenberg | Self::Sl2 => 3,
            Self::Aff2 => 2,
            Self::Rn(n) => *n,
        }
    }

    pub fn bracket_mechanism(&self) -> BracketMechanism {
        match self {
            Self::Sl2 => BracketMechanism::MatrixCommutator,
            _ => BracketMechanism::StructureConstants,
        }
    }

    pub fn is_matrix_model(&self) -> bool {
        self.bracket_mechanism() == BracketMechanism::MatrixCommutator
    }

    pub fn identity(&self) -> GroupPoint {
        match self {
            Self::Heisenberg => GroupPoint::new(vec![0.0; 3]),
            Self::Aff2 => GroupPoint::new(vec![1.0, 0.0]),
            Self::Sl2 => GroupPoint::new(vec![1.0, 0.0, 0.0, 1.0]),
            Self::Rn(n) => GroupPoint::new(vec![0.0; *n]),
        }
    }

    /// Group product, extended polynomially (rationally for inverses) to all
    /// of ℝᴺ. Finite-difference curves may leave the group slightly.
    pub fn product(&self, g: &GroupPoint, h: &GroupPoint) -> GroupPoint {
        let (a, b) = (g.as_slice(), h.as_slice());
        match self {
            Self::Heisenberg => {
                GroupPoint::new(vec![a[0] + b[0] + a[1] * b[2], a[1] + b[1], a[2] + b[2]])
            }
            Self::Aff2 => GroupPoint::new(vec![a[0] * b[0], b[1] + b[0] * a[1]]),
            Self::Sl2 => GroupPoint::new(mat2_mul(a, b).to_vec()),
            Self::Rn(_) => GroupPoint(g.coords() + h.coords()),
        }
    }

    pub fn inverse(&self, g: &GroupPoint) -> GroupPoint {
        let a = g.as_slice();
        match self {
            Self::Heisenberg => GroupPoint::new(vec![-a[0] + a[1] * a[2], -a[1], -a[2]]),
            Self::Aff2 => GroupPoint::new(vec![1.0 / a[0], -a[1] / a[0]]),
            Self::Sl2 => {
                let det = a[0] * a[3] - a[1] * a[2];
                GroupPoint::new(vec![a[3] / det, -a[1] / det, -a[2] / det, a[0] / det])
            }
            Self::Rn(_) => GroupPoint(-g.coords()),
        }
    }

    /// Standard basis of the Lie algebra in ambient coordinates.
    pub fn algebra_basis(&self) -> Vec<AlgebraVector> {
        match self {
            Self::Sl2 => vec![
                DVector::from_vec(vec![1.0, 0.0, 0.0, -1.0]),
                DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
                DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]),
            ],
            _ => {
                let n = self.ambient_dim();
                (0..n)
                    .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
                    .collect()
            }
        }
    }

    /// The Lie algebra as an orthonormal subspace of ℝᴺ.
    pub fn algebra_subspace(&self) -> AlgebraBasis {
        AlgebraBasis::from_vectors(self.ambient_dim(), &self.algebra_basis(), 1e-12)
            .expect("catalog algebra bases are well formed")
    }

    /// Bracket without the membership check; see [`crate::algebra::bracket`].
    pub fn raw_bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        match self {
            Self::Heisenberg => DVector::from_vec(vec![x[1] * y[2] - x[2] * y[1], 0.0, 0.0]),
            Self::Aff2 => DVector::from_vec(vec![0.0, x[0] * y[1] - x[1] * y[0]]),
            Self::Sl2 => {
                let xy = mat2_mul(x.as_slice(), y.as_slice());
                let yx = mat2_mul(y.as_slice(), x.as_slice());
                DVector::from_fn(4, |i, _| xy[i] - yx[i])
            }
            Self::Rn(n) => DVector::zeros(*n),
        }
    }

    /// Distance from the membership constraint (0 for members).
    pub fn membership_residual(&self, g: &GroupPoint) -> f64 {
        if g.len() != self.ambient_dim() || g.coords().iter().any(|x| !x.is_finite()) {
            return f64::INFINITY;
        }
        let a = g.as_slice();
        match self {
            Self::Sl2 => (a[0] * a[3] - a[1] * a[2] - 1.0).abs(),
            Self::Aff2 if a[0] <= 0.0 => f64::INFINITY,
            _ => 0.0,
        }
    }

    pub fn is_member(&self, g: &GroupPoint, tol: f64) -> bool {
        self.membership_residual(g) <= tol
    }

    /// A random group element near the identity (coordinates of order one).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupPoint {
        match self {
            Self::Heisenberg => {
                GroupPoint::new((0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            }
            Self::Aff2 => GroupPoint::new(vec![
                rng.random_range(-1.0f64..1.0).exp(),
                rng.random_range(-1.0..1.0),
            ]),
            Self::Sl2 => {
                let a: f64 = rng.random_range(0.5..1.5);
                let b: f64 = rng.random_range(-1.0..1.0);
                let c: f64 = rng.random_range(-1.0..1.0);
                GroupPoint::new(vec![a, b, c, (1.0 + b * c) / a])
            }
            Self::Rn(n) => GroupPoint::new((0..*n).map(|_| rng.random_range(-1.0..1.0)).collect()),
        }
    }

    /// A random Lie algebra element with entries in `[-1, 1]`.
    pub fn random_algebra_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraVector {
        let basis = self.algebra_basis();
        let mut v = DVector::zeros(self.ambient_dim());
        for b in &basis {
            v += b * rng.random_range(-1.0..1.0);
        }
        v
    }

    /// First-order curve through `g` with velocity `d(R_g)_e X` at `t = 0`:
    /// `t ↦ (e + tX)·g`.
    pub fn curve_through(&self, x: &AlgebraVector, t: f64, g: &GroupPoint) -> GroupPoint {
        let start = GroupPoint(self.identity().coords() + x * t);
        self.product(&start, g)
    }

    /// Jacobian of `h ↦ h·g` at the identity, `d(R_g)_e`.
    pub fn right_translation_jacobian(&self, g: &GroupPoint) -> RealMatrix {
        let n = self.ambient_dim();
        let step = CHART_STEP * g.coords().norm().max(1.0);
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut dir = DVector::zeros(n);
            dir[j] = 1.0;
            let plus = self.curve_through(&dir, step, g);
            let minus = self.curve_through(&dir, -step, g);
            let col = (plus.coords() - minus.coords()) / (2.0 * step);
            jac.set_column(j, &col);
        }
        jac
    }

    /// `φ_g(X) = d(R_g)_e X`, the right-invariant field `X` evaluated at `g`.
    pub fn lift(&self, g: &GroupPoint, x: &AlgebraVector) -> DVector<f64> {
        if self.is_matrix_model() {
            DVector::from_vec(mat2_mul(x.as_slice(), g.as_slice()).to_vec())
        } else {
            self.right_translation_jacobian(g) * x
        }
    }

    /// `φ_g⁻¹(v)`: the algebra element whose right-invariant field takes the
    /// value `v` at `g`.
    pub fn trivialize_tangent(&self, g: &GroupPoint, v: &DVector<f64>) -> Result<AlgebraVector> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        if self.is_matrix_model() {
            let g_inv = self.inverse(g);
            if g_inv.coords().iter().any(|x| !x.is_finite()) {
                return Err(Error::DegenerateChart {
                    point: g.as_slice().to_vec(),
                });
            }
            return Ok(DVector::from_vec(
                mat2_mul(v.as_slice(), g_inv.as_slice()).to_vec(),
            ));
        }
        let jac = self.right_translation_jacobian(g);
        let lu = jac.lu();
        lu.solve(v).ok_or_else(|| Error::DegenerateChart {
            point: g.as_slice().to_vec(),
        })
    }

    /// `Ad(g)` as an `N × N` matrix: conjugation for matrix models, the hat
    /// derivative of `L_g` otherwise.
    pub fn adjoint(&self, g: &GroupPoint) -> Result<RealMatrix> {
        if self.is_matrix_model() {
            let gm = mat2(g.as_slice());
            let g_inv = gm
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::DegenerateChart {
                    point: g.as_slice().to_vec(),
                })?;
            // vec_r(g X g⁻¹) = (g ⊗ g⁻ᵀ) vec_r(X)
            return Ok(gm.kronecker(&g_inv.transpose()));
        }
        hat_derivative(
            self,
            self,
            |h| Ok(self.product(g, h)),
            &self.identity(),
            CHART_STEP,
        )
    }
}

fn mat2(a: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, a)
}

fn mat2_mul(a: &[f64], b: &[f64]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Hat derivative `d̂f_h` of a map between group models, as an
/// `N_cod × N_dom` matrix acting on ambient algebra coordinates.
///
/// Column `j` differentiates `f` along the curve `(e + t·E_j)·h` by central
/// differences and right-trivializes the result at `f(h)`.
pub fn hat_derivative<F>(
    domain: &LieGroupModel,
    codomain: &LieGroupModel,
    f: F,
    h: &GroupPoint,
    step: f64,
) -> Result<RealMatrix>
where
    F: Fn(&GroupPoint) -> Result<GroupPoint>,
{
    let n_dom = domain.ambient_dim();
    let n_cod = codomain.ambient_dim();
    let base = f(h)?;
    let mut out = DMatrix::zeros(n_cod, n_dom);
    for j in 0..n_dom {
        let mut dir = DVector::zeros(n_dom);
        dir[j] = 1.0;
        let plus = f(&domain.curve_through(&dir, step, h))?;
        let minus = f(&domain.curve_through(&dir, -step, h))?;
        let tangent = (plus.coords() - minus.coords()) / (2.0 * step);
        out.set_column(j, &codomain.trivialize_tangent(&base, &tangent)?);
    }
    Ok(out)
}

/// `f0^k(g)` by iterated application; negative `k` uses `f0_inverse`.
pub fn automorphism_power<F, G>(
    f0: F,
    f0_inverse: Option<G>,
    k: i64,
    g: &GroupPoint,
) -> Result<GroupPoint>
where
    F: Fn(&GroupPoint) -> Result<GroupPoint>,
    G: Fn(&GroupPoint) -> Result<GroupPoint>,
{
    let mut x = g.clone();
    if k >= 0 {
        for _ in 0..k {
            x = f0(&x)?;
        }
    } else {
        let inv = f0_inverse
            .ok_or_else(|| Error::NotInvertible("no inverse supplied for negative power".into()))?;
        for _ in 0..(-k) {
            x = inv(&x)?;
        }
    }
    Ok(x)
}
