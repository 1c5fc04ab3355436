//! Dense linear algebra over the reals and Lie-algebraic subspace machinery.
//!
//! Subspaces are stored as orthonormal bases ([`AlgebraBasis`]). Ranks use a
//! relative singular-value threshold `tol · σ_max`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::groups::LieGroupModel;

pub type RealMatrix = DMatrix<f64>;
pub type AlgebraVector = DVector<f64>;

/// Principal-angle threshold used for span equality and containment checks.
pub const SPAN_ANGLE_TOL: f64 = 1e-7;

/// An orthonormal basis of a subspace of the ambient coordinate space `ℝᴺ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraBasis {
    ambient_dim: usize,
    vectors: Vec<AlgebraVector>,
    tol: f64,
}

impl AlgebraBasis {
    pub fn empty(ambient_dim: usize, tol: f64) -> Self {
        Self {
            ambient_dim,
            vectors: Vec::new(),
            tol,
        }
    }

    /// Orthonormal basis of the span of `vectors`.
    pub fn from_vectors(ambient_dim: usize, vectors: &[AlgebraVector], tol: f64) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
        }
        if vectors.is_empty() {
            return Ok(Self::empty(ambient_dim, tol));
        }
        let m = RealMatrix::from_columns(vectors);
        Self::column_space(&m, tol)
    }

    /// Orthonormal basis of the numerical column space of `m`.
    pub fn column_space(m: &RealMatrix, tol: f64) -> Result<Self> {
        Ok(numerical_rank(m, tol)?.1)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[AlgebraVector] {
        &self.vectors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Basis vectors as the columns of an `N × dim` matrix.
    pub fn to_matrix(&self) -> RealMatrix {
        if self.vectors.is_empty() {
            RealMatrix::zeros(self.ambient_dim, 0)
        } else {
            RealMatrix::from_columns(&self.vectors)
        }
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &AlgebraVector) -> AlgebraVector {
        let mut p = AlgebraVector::zeros(self.ambient_dim);
        for q in &self.vectors {
            p += q * q.dot(v);
        }
        p
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &AlgebraVector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Whether `v` lies in the subspace, relative to its own norm.
    pub fn contains_vector(&self, v: &AlgebraVector, tol: f64) -> bool {
        self.residual(v) <= tol * v.norm().max(f64::MIN_POSITIVE)
    }

    /// Largest principal angle between `other` and this subspace, taking the
    /// angles of `other` into `self` (so it measures `other ⊆ self`).
    pub fn max_angle_from(&self, other: &AlgebraBasis) -> f64 {
        if other.is_empty() {
            return 0.0;
        }
        largest_angle_sin(self, other).min(1.0).asin()
    }

    /// `other ⊆ self` with all principal angles below `angle_tol`.
    pub fn contains(&self, other: &AlgebraBasis, angle_tol: f64) -> bool {
        other.dim() <= self.dim() && self.max_angle_from(other) < angle_tol
    }

    /// Equal spans: same dimension and all principal angles below `angle_tol`.
    pub fn same_span(&self, other: &AlgebraBasis, angle_tol: f64) -> bool {
        self.dim() == other.dim()
            && self.contains(other, angle_tol)
            && other.contains(self, angle_tol)
    }

    /// Principal angles (ascending) between two subspaces of equal ambient dimension.
    pub fn principal_angles(&self, other: &AlgebraBasis) -> Vec<f64> {
        if self.is_empty() || other.is_empty() {
            return Vec::new();
        }
        let cross = self.to_matrix().transpose() * other.to_matrix();
        let mut angles: Vec<f64> = cross
            .singular_values()
            .iter()
            .map(|c| c.clamp(-1.0, 1.0).acos())
            .collect();
        angles.sort_by(f64::total_cmp);
        angles
    }
}

/// Sine of the largest angle between vectors of `other` and the subspace `base`,
/// computed from the singular values of `(I − P_base) Q_other`.
fn largest_angle_sin(base: &AlgebraBasis, other: &AlgebraBasis) -> f64 {
    let q = other.to_matrix();
    let p = base.to_matrix();
    let residual = if base.is_empty() {
        q
    } else {
        &q - &p * (p.transpose() * &q)
    };
    residual
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Numerical rank and an orthonormal basis of the column space.
///
/// The rank counts singular values strictly above `tol · σ_max`; a zero
/// matrix has rank 0.
pub fn numerical_rank(m: &RealMatrix, tol: f64) -> Result<(usize, AlgebraBasis)> {
    if m.nrows() == 0 {
        return Err(Error::InvalidMatrix("matrix has no rows".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidMatrix(format!(
            "rank tolerance {tol} not in (0, 1)"
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let n = m.nrows();
    if m.ncols() == 0 {
        return Ok((0, AlgebraBasis::empty(n, tol)));
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok((0, AlgebraBasis::empty(n, tol)));
    }
    let cutoff = tol * sigma_max;
    let vectors: Vec<AlgebraVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > cutoff)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    Ok((
        vectors.len(),
        AlgebraBasis {
            ambient_dim: n,
            vectors,
            tol,
        },
    ))
}

/// Orthonormal basis of the sum of the input spans.
pub fn span_union(bases: &[&AlgebraBasis], tol: f64) -> Result<AlgebraBasis> {
    let Some(first) = bases.first() else {
        return Err(Error::InvalidMatrix("span_union of no bases".into()));
    };
    let n = first.ambient_dim;
    let mut cols = Vec::new();
    for b in bases {
        if b.ambient_dim != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.ambient_dim,
            });
        }
        cols.extend(b.vectors.iter().cloned());
    }
    AlgebraBasis::from_vectors(n, &cols, tol)
}

/// Kalman matrix `(ψ^{p−1} B … ψ B  B)` for a block `B` of columns.
pub fn kalman_matrix(psi: &RealMatrix, b: &RealMatrix, powers: usize) -> RealMatrix {
    let n = b.nrows();
    let m = b.ncols();
    let mut blocks = Vec::with_capacity(powers);
    let mut current = b.clone();
    for _ in 0..powers {
        blocks.push(current.clone());
        current = psi * current;
    }
    let mut out = RealMatrix::zeros(n, m * powers);
    for (slot, block) in blocks.iter().rev().enumerate() {
        out.view_mut((0, slot * m), (n, m)).copy_from(block);
    }
    out
}

/// Smallest `ψ`-invariant subspace containing `span(B)`: the column space of
/// `(ψ^{n−1}B … ψB B)`.
pub fn psi_invariant_hull(
    b: &AlgebraBasis,
    psi: &RealMatrix,
    n: usize,
    tol: f64,
) -> Result<AlgebraBasis> {
    let dim = b.ambient_dim;
    if psi.nrows() != dim || psi.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: psi.nrows(),
        });
    }
    let (psi_rank, _) = numerical_rank(psi, tol)?;
    if psi_rank < dim {
        return Err(Error::SingularAutomorphism {
            rank: psi_rank,
            expected: dim,
        });
    }
    if b.is_empty() {
        return Ok(AlgebraBasis::empty(dim, tol));
    }
    let k = kalman_matrix(psi, &b.to_matrix(), n.max(1));
    AlgebraBasis::column_space(&k, tol)
}

/// Lie bracket in the model's ambient coordinates.
pub fn bracket(
    model: &LieGroupModel,
    x: &AlgebraVector,
    y: &AlgebraVector,
) -> Result<AlgebraVector> {
    let alg = model.algebra_subspace();
    for v in [x, y] {
        if v.len() != model.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.ambient_dim(),
                found: v.len(),
            });
        }
        let residual = alg.residual(v);
        if residual > 1e-7 * v.norm().max(1.0) {
            return Err(Error::NotInAlgebra { residual });
        }
    }
    Ok(model.raw_bracket(x, y))
}

/// Smallest bracket-closed subspace containing the generators.
///
/// Alternates between collecting pairwise brackets of the current basis and
/// taking the span union, until the dimension stops growing.
pub fn subalgebra_closure(
    model: &LieGroupModel,
    generators: &AlgebraBasis,
    tol: f64,
) -> Result<AlgebraBasis> {
    let n = model.group_dim();
    let mut current = AlgebraBasis::from_vectors(model.ambient_dim(), generators.vectors(), tol)?;
    for _ in 0..=n {
        let vs = current.vectors();
        let mut brackets = Vec::with_capacity(vs.len() * vs.len().saturating_sub(1) / 2);
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                brackets.push(bracket(model, &vs[i], &vs[j])?);
            }
        }
        let mut all = vs.to_vec();
        all.extend(brackets);
        let next = AlgebraBasis::from_vectors(model.ambient_dim(), &all, tol)?;
        if next.dim() == current.dim() {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::ClosureDidNotConverge {
        rounds: n + 1,
        dim: current.dim(),
    })
}

/// Whether `S` is closed under the bracket within `tol` (relative to the
/// norms of the basis vectors).
pub fn is_bracket_closed(model: &LieGroupModel, s: &AlgebraBasis, tol: f64) -> Result<bool> {
    for x in s.vectors() {
        for y in s.vectors() {
            let z = bracket(model, x, y)?;
            if s.residual(&z) > tol * (1.0 + z.norm()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use nalgebra::dvector;

    fn sl2_kalman() -> RealMatrix {
        dmatrix![3.0, 2.0, 1.0; -9.0, -4.0, -1.0; 1.0, 1.0, 1.0; -3.0, -2.0, -1.0]
    }

    fn sl2_psi() -> RealMatrix {
        dmatrix![
            1.0, 0.0, 1.0, 0.0;
            -1.0, 1.0, -1.0, 1.0;
            0.0, 0.0, 1.0, 0.0;
            0.0, 0.0, -1.0, 1.0
        ]
    }

    #[test]
    fn rank_of_identity_zero_and_kalman() {
        assert_eq!(
            numerical_rank(&RealMatrix::identity(3, 3), 1e-10)
                .unwrap()
                .0,
            3
        );
        assert_eq!(
            numerical_rank(&RealMatrix::zeros(4, 4), 1e-10).unwrap().0,
            0
        );
        assert_eq!(numerical_rank(&sl2_kalman(), 1e-8).unwrap().0, 3);
    }

    #[test]
    fn rank_rejects_nan_and_bad_tol() {
        let mut m = RealMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(
            numerical_rank(&m, 1e-8),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(numerical_rank(&RealMatrix::identity(2, 2), 1.5).is_err());
        assert!(numerical_rank(&RealMatrix::zeros(0, 2), 1e-8).is_err());
    }

    #[test]
    fn column_basis_is_orthonormal() {
        let (_, b) = numerical_rank(&sl2_kalman(), 1e-8).unwrap();
        let q = b.to_matrix();
        let gram = q.transpose() * &q;
        assert!((gram - RealMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn span_union_idempotent_and_aff2_pair() {
        let a = AlgebraBasis::from_vectors(3, &[dvector![1.0, 0.0, 0.0]], 1e-8).unwrap();
        assert_eq!(span_union(&[&a, &a], 1e-8).unwrap().dim(), 1);

        let v1 = AlgebraBasis::from_vectors(2, &[dvector![1.0, 0.0]], 1e-8).unwrap();
        let v2 =
            AlgebraBasis::from_vectors(2, &[dvector![1.0, 2.0 * (-1.0f64).exp()]], 1e-8).unwrap();
        assert_eq!(span_union(&[&v1, &v2], 1e-8).unwrap().dim(), 2);
    }

    #[test]
    fn span_union_rejects_mixed_dims() {
        let a = AlgebraBasis::from_vectors(3, &[dvector![1.0, 0.0, 0.0]], 1e-8).unwrap();
        let b = AlgebraBasis::from_vectors(2, &[dvector![1.0, 0.0]], 1e-8).unwrap();
        assert!(matches!(
            span_union(&[&a, &b], 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hull_of_sl2_control_direction() {
        let b = AlgebraBasis::from_vectors(4, &[dvector![1.0, -1.0, 1.0, -1.0]], 1e-8).unwrap();
        let hull = psi_invariant_hull(&b, &sl2_psi(), 3, 1e-8).unwrap();
        assert_eq!(hull.dim(), 3);
        let k = AlgebraBasis::column_space(&sl2_kalman(), 1e-8).unwrap();
        assert!(hull.same_span(&k, SPAN_ANGLE_TOL));
    }

    #[test]
    fn kalman_matrix_matches_golden() {
        let k = kalman_matrix(
            &sl2_psi(),
            &RealMatrix::from_column_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]),
            3,
        );
        assert_eq!(k, sl2_kalman());
    }

    #[test]
    fn hull_with_identity_psi_is_span() {
        let b = AlgebraBasis::from_vectors(
            4,
            &[dvector![1.0, 2.0, 0.0, 0.0], dvector![0.0, 1.0, 1.0, 0.0]],
            1e-8,
        )
        .unwrap();
        let hull = psi_invariant_hull(&b, &RealMatrix::identity(4, 4), 4, 1e-8).unwrap();
        assert!(hull.same_span(&b, SPAN_ANGLE_TOL));
    }

    #[test]
    fn hull_rejects_singular_psi() {
        let b = AlgebraBasis::from_vectors(2, &[dvector![1.0, 0.0]], 1e-8).unwrap();
        let psi = dmatrix![1.0, 0.0; 0.0, 0.0];
        assert!(matches!(
            psi_invariant_hull(&b, &psi, 2, 1e-8),
            Err(Error::SingularAutomorphism { .. })
        ));
    }

    #[test]
    fn principal_angles_of_coordinate_planes() {
        let a = AlgebraBasis::from_vectors(
            3,
            &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0]],
            1e-8,
        )
        .unwrap();
        let b = AlgebraBasis::from_vectors(
            3,
            &[dvector![1.0, 0.0, 0.0], dvector![0.0, 0.0, 1.0]],
            1e-8,
        )
        .unwrap();
        let angles = a.principal_angles(&b);
        assert!(angles[0].abs() < 1e-12);
        assert!((angles[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(!a.same_span(&b, SPAN_ANGLE_TOL));
        assert!(a.contains(
            &AlgebraBasis::from_vectors(3, &[dvector![1.0, 1.0, 0.0]], 1e-8).unwrap(),
            1e-7
        ));
    }

    #[test]
    fn brackets_in_catalog_models() {
        let aff2 = LieGroupModel::Aff2;
        assert_eq!(
            bracket(&aff2, &dvector![1.0, 0.0], &dvector![0.0, 1.0]).unwrap(),
            dvector![0.0, 1.0]
        );
        let h = LieGroupModel::Heisenberg;
        assert_eq!(
            bracket(&h, &dvector![0.0, 1.0, 0.0], &dvector![0.0, 0.0, 1.0]).unwrap(),
            dvector![1.0, 0.0, 0.0]
        );
        let x = dvector![0.3, -1.0, 2.0];
        assert_eq!(bracket(&h, &x, &x).unwrap().norm(), 0.0);
    }

    #[test]
    fn bracket_rejects_non_traceless_sl2_vector() {
        let sl2 = LieGroupModel::Sl2;
        let r = bracket(
            &sl2,
            &dvector![1.0, 0.0, 0.0, 1.0],
            &dvector![0.0, 1.0, 0.0, 0.0],
        );
        assert!(matches!(r, Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn closures() {
        let rn = LieGroupModel::Rn(3);
        let g = AlgebraBasis::from_vectors(3, &[dvector![1.0, 1.0, 0.0]], 1e-8).unwrap();
        assert!(subalgebra_closure(&rn, &g, 1e-8)
            .unwrap()
            .same_span(&g, SPAN_ANGLE_TOL));

        let h = LieGroupModel::Heisenberg;
        let g = AlgebraBasis::from_vectors(
            3,
            &[dvector![0.0, 1.0, 0.0], dvector![0.0, 0.0, 1.0]],
            1e-8,
        )
        .unwrap();
        assert_eq!(subalgebra_closure(&h, &g, 1e-8).unwrap().dim(), 3);

        let aff2 = LieGroupModel::Aff2;
        let g =
            AlgebraBasis::from_vectors(2, &[dvector![1.0, 0.0], dvector![1.0, 2.0]], 1e-8).unwrap();
        assert_eq!(subalgebra_closure(&aff2, &g, 1e-8).unwrap().dim(), 2);

        // A single sl2 generator spans an abelian subalgebra.
        let sl2 = LieGroupModel::Sl2;
        let g = AlgebraBasis::from_vectors(4, &[dvector![1.0, -1.0, 1.0, -1.0]], 1e-8).unwrap();
        assert_eq!(subalgebra_closure(&sl2, &g, 1e-8).unwrap().dim(), 1);
        // Two generic sl2 directions generate everything.
        let g = AlgebraBasis::from_vectors(
            4,
            &[dvector![0.0, 1.0, 0.0, 0.0], dvector![0.0, 0.0, 1.0, 0.0]],
            1e-8,
        )
        .unwrap();
        let s = subalgebra_closure(&sl2, &g, 1e-8).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(is_bracket_closed(&sl2, &s, 1e-9).unwrap());
    }
}
