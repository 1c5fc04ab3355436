//! Decision procedures: control distribution, accessibility, ad-rank, regular
//! pairs, and sampled probes of the reachable and controllable sets.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    kalman_matrix, numerical_rank, psi_invariant_hull, subalgebra_closure, AlgebraBasis, RealMatrix,
};
use crate::error::{Error, Result};
use crate::groups::{GroupPoint, LieGroupModel};
use crate::system::{ControlRange, LinearSystem};
use crate::{DEFAULT_FD_STEP, DEFAULT_GRID, DEFAULT_SEED, DEFAULT_TOL};

/// Grids larger than this fall back to random sampling.
pub const MAX_GRID_POINTS: usize = 10_000;
/// Number of seeded samples used when the uniform grid is too large.
pub const RANDOM_GRID_POINTS: usize = 256;
/// Relative singular-value threshold for empirical dimension estimates.
pub const EMPIRICAL_RANK_THRESHOLD: f64 = 0.05;
/// Minimum neighbours required by [`empirical_dimension`].
pub const MIN_NEIGHBOURS: usize = 20;
/// Default neighbourhood radius for [`empirical_dimension`], as a fraction of
/// the median offset norm.
pub const DEFAULT_RADIUS_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub tol: f64,
    pub fd_step: f64,
    pub grid: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            fd_step: DEFAULT_FD_STEP,
            grid: DEFAULT_GRID,
            seed: DEFAULT_SEED,
        }
    }
}

/// Control values at which `d̂F` is sampled, with a description for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    pub points: Vec<DVector<f64>>,
    pub description: String,
}

impl ControlGrid {
    /// Uniform `per_axis` grid over `U` shrunk by `margin` on every side, plus
    /// the origin. Falls back to [`RANDOM_GRID_POINTS`] seeded uniform samples
    /// when `m ≥ 4` or the grid would exceed [`MAX_GRID_POINTS`].
    pub fn build(range: &ControlRange, per_axis: usize, margin: f64, seed: u64) -> Self {
        let m = range.dim();
        let per_axis = per_axis.max(1);
        let inner: Vec<(f64, f64)> = range
            .lower()
            .iter()
            .zip(range.upper())
            .map(|(lo, hi)| (lo + margin, hi - margin))
            .collect();
        let total = (per_axis as u128)
            .checked_pow(m as u32)
            .unwrap_or(u128::MAX);
        let mut points = Vec::new();
        let description;
        if m >= 4 || total > MAX_GRID_POINTS as u128 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shrunk = ControlRange::new(
                inner.iter().map(|(lo, _)| *lo).collect(),
                inner.iter().map(|(_, hi)| *hi).collect(),
            )
            .unwrap_or_else(|_| range.clone());
            for _ in 0..RANDOM_GRID_POINTS {
                points.push(shrunk.sample(&mut rng));
            }
            description = format!("{RANDOM_GRID_POINTS} seeded uniform samples (seed {seed}) + origin, margin {margin:e}");
        } else {
            let axis = |lo: f64, hi: f64| -> Vec<f64> {
                if per_axis == 1 {
                    vec![0.5 * (lo + hi)]
                } else {
                    (0..per_axis)
                        .map(|i| lo + (hi - lo) * i as f64 / (per_axis - 1) as f64)
                        .collect()
                }
            };
            let axes: Vec<Vec<f64>> = inner.iter().map(|(lo, hi)| axis(*lo, *hi)).collect();
            let mut idx = vec![0usize; m];
            loop {
                points.push(DVector::from_iterator(
                    m,
                    idx.iter().enumerate().map(|(d, &i)| axes[d][i]),
                ));
                let mut d = 0;
                while d < m {
                    idx[d] += 1;
                    if idx[d] < per_axis {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == m {
                    break;
                }
            }
            description = format!("uniform {per_axis}^{m} grid + origin, margin {margin:e}");
        }
        let origin = DVector::zeros(m);
        if !points.iter().any(|p| p == &origin) {
            points.push(origin);
        }
        Self {
            points,
            description,
        }
    }
}

/// Span of the columns of `d̂F_u` over the grid.
pub fn control_distribution(
    sys: &LinearSystem,
    grid: &[DVector<f64>],
    step: f64,
    tol: f64,
) -> Result<AlgebraBasis> {
    if grid.is_empty() {
        return Err(Error::Precondition("control grid is empty".into()));
    }
    let mut columns = Vec::new();
    for u in grid {
        let d = sys.hat_derivative_control(u, step)?;
        columns.extend(d.column_iter().map(|c| c.into_owned()));
    }
    AlgebraBasis::from_vectors(sys.model().ambient_dim(), &columns, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessibilityVerdict {
    Accessible,
    NotAccessibleAtSampledPoints,
}

impl AccessibilityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Accessible => "accessible",
            Self::NotAccessibleAtSampledPoints => "not-accessible-at-sampled-points",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AccessibilityReport {
    pub w: AlgebraBasis,
    pub v: AlgebraBasis,
    pub h: AlgebraBasis,
    pub psi: RealMatrix,
    pub n: usize,
    pub verdict: AccessibilityVerdict,
    pub grid: String,
    pub grid_points: usize,
    pub options: AnalysisOptions,
}

impl AccessibilityReport {
    pub fn dim_w(&self) -> usize {
        self.w.dim()
    }

    pub fn dim_v(&self) -> usize {
        self.v.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.h.dim()
    }

    pub fn is_accessible(&self) -> bool {
        self.verdict == AccessibilityVerdict::Accessible
    }
}

/// `W → V = ψ-hull(W) → 𝔥 = smallest ψ-invariant subalgebra ⊇ V`, and the
/// verdict `dim 𝔥 = n`.
pub fn accessibility_report(
    sys: &LinearSystem,
    opts: &AnalysisOptions,
) -> Result<AccessibilityReport> {
    let model = sys.model();
    let big_n = model.ambient_dim();
    let n = model.group_dim();
    let grid = ControlGrid::build(sys.range(), opts.grid, opts.fd_step, opts.seed);
    let psi = sys.infinitesimal_automorphism(opts.fd_step)?;
    let w = control_distribution(sys, &grid.points, opts.fd_step, opts.tol)?;
    let v = psi_invariant_hull(&w, &psi, big_n, opts.tol)?;
    let mut h = v.clone();
    for _ in 0..=n {
        let closed = subalgebra_closure(model, &h, opts.tol)?;
        let next = psi_invariant_hull(&closed, &psi, big_n, opts.tol)?;
        let done = next.dim() == h.dim();
        h = next;
        if done {
            break;
        }
    }
    let verdict = if h.dim() == n {
        AccessibilityVerdict::Accessible
    } else {
        AccessibilityVerdict::NotAccessibleAtSampledPoints
    };
    Ok(AccessibilityReport {
        w,
        v,
        h,
        psi,
        n,
        verdict,
        grid: grid.description,
        grid_points: grid.points.len(),
        options: *opts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdRankVerdict {
    LocallyControllable,
    Inconclusive,
}

impl AdRankVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LocallyControllable => "locally-controllable",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdRankReport {
    /// `(ψ^{n−1} d̂F_0 … ψ d̂F_0  d̂F_0)`, `N × n·m`.
    pub v_matrix: RealMatrix,
    pub df0: RealMatrix,
    pub psi: RealMatrix,
    pub rank: usize,
    pub n: usize,
    pub verdict: AdRankVerdict,
}

pub fn ad_rank_report(sys: &LinearSystem, step: f64, tol: f64) -> Result<AdRankReport> {
    let n = sys.model().group_dim();
    let psi = sys.infinitesimal_automorphism(step)?;
    let df0 = sys.hat_derivative_control(&DVector::zeros(sys.control_dim()), step)?;
    let v_matrix = kalman_matrix(&psi, &df0, n);
    let (rank, _) = numerical_rank(&v_matrix, tol)?;
    let verdict = if rank == n {
        AdRankVerdict::LocallyControllable
    } else {
        AdRankVerdict::Inconclusive
    };
    Ok(AdRankReport {
        v_matrix,
        df0,
        psi,
        rank,
        n,
        verdict,
    })
}

/// Jacobian of `u ↦ φ(k, e, u)` over all `k·m` control entries, right-trivialized
/// at the endpoint. Column `i·m + j` is component `j` of control `u_i`.
pub fn regular_jacobian(
    sys: &LinearSystem,
    controls: &[DVector<f64>],
    step: f64,
) -> Result<RealMatrix> {
    let k = controls.len();
    let m = sys.control_dim();
    for u in controls {
        sys.range().check_interior(u, step)?;
    }
    let model = sys.model();
    let e = model.identity();
    let end = sys.solve(k, &e, controls)?;
    let mut jac = RealMatrix::zeros(model.ambient_dim(), k * m);
    let mut perturbed = controls.to_vec();
    for i in 0..k {
        for j in 0..m {
            perturbed[i][j] = controls[i][j] + step;
            let plus = sys.solve(k, &e, &perturbed)?;
            perturbed[i][j] = controls[i][j] - step;
            let minus = sys.solve(k, &e, &perturbed)?;
            perturbed[i][j] = controls[i][j];
            let tangent = (plus.coords() - minus.coords()) / (2.0 * step);
            jac.set_column(i * m + j, &model.trivialize_tangent(&end, &tangent)?);
        }
    }
    Ok(jac)
}

/// Numerical rank of [`regular_jacobian`]; the pair `(e, u)` is regular iff
/// this equals the group dimension.
pub fn regular_rank(
    sys: &LinearSystem,
    controls: &[DVector<f64>],
    step: f64,
    tol: f64,
) -> Result<usize> {
    if controls.is_empty() {
        return Ok(0);
    }
    Ok(numerical_rank(&regular_jacobian(sys, controls, step)?, tol)?.0)
}

/// Endpoints of sampled trajectories from the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<GroupPoint>,
    pub k: usize,
    pub seed: u64,
    pub count: usize,
}

impl SampleCloud {
    /// The cloud point nearest to the coordinate-wise median.
    pub fn median_point(&self) -> Option<GroupPoint> {
        let first = self.points.first()?;
        let dim = first.len();
        let median: Vec<f64> = (0..dim)
            .map(|d| {
                let mut xs: Vec<f64> = self.points.iter().map(|p| p.as_slice()[d]).collect();
                xs.sort_by(f64::total_cmp);
                xs[xs.len() / 2]
            })
            .collect();
        let target = GroupPoint::new(median);
        self.points
            .iter()
            .min_by(|a, b| a.distance(&target).total_cmp(&b.distance(&target)))
            .cloned()
    }

    /// CSV with header `k,seed,idx,c1..cN`.
    pub fn to_csv(&self) -> String {
        let dim = self.points.first().map_or(0, |p| p.len());
        let mut out = String::from("k,seed,idx");
        for c in 1..=dim {
            out.push_str(&format!(",c{c}"));
        }
        out.push('\n');
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{},{},{}", self.k, self.seed, i));
            for x in p.as_slice() {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Random stream for trajectory `idx`: independent of how many other
/// trajectories are drawn or in which order.
pub fn trajectory_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

/// Controls used by trajectory `idx` of a cloud with the given seed.
pub fn trajectory_controls(
    range: &ControlRange,
    k: usize,
    seed: u64,
    idx: u64,
) -> Vec<DVector<f64>> {
    let mut rng = trajectory_rng(seed, idx);
    (0..k).map(|_| range.sample(&mut rng)).collect()
}

/// `count` endpoints `φ(k, e, u)` with i.i.d. uniform controls in `U`.
pub fn sample_reachable(
    sys: &LinearSystem,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<SampleCloud> {
    sample_with(sys, k, count, seed, |range, _, idx| {
        trajectory_controls(range, k, seed, idx)
    })
}

/// Like [`sample_reachable`] with a caller-supplied control generator
/// `(range, k, idx) -> controls`.
pub fn sample_with<F>(
    sys: &LinearSystem,
    k: usize,
    count: usize,
    seed: u64,
    controls: F,
) -> Result<SampleCloud>
where
    F: Fn(&ControlRange, usize, u64) -> Vec<DVector<f64>>,
{
    if count == 0 {
        return Err(Error::Precondition(
            "sample count must be at least 1".into(),
        ));
    }
    let e = sys.model().identity();
    let points = (0..count as u64)
        .map(|idx| sys.solve(k, &e, &controls(sys.range(), k, idx)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleCloud {
        points,
        k,
        seed,
        count,
    })
}

/// Recomputes point `idx` of a cloud sampled with [`sample_reachable`].
pub fn replay(sys: &LinearSystem, k: usize, seed: u64, idx: u64) -> Result<GroupPoint> {
    let controls = trajectory_controls(sys.range(), k, seed, idx);
    sys.solve(k, &sys.model().identity(), &controls)
}

/// Right-trivialized offset `p·c⁻¹ − e` in ambient coordinates.
pub fn offset(model: &LieGroupModel, p: &GroupPoint, center: &GroupPoint) -> DVector<f64> {
    model.product(p, &model.inverse(center)).coords() - model.identity().coords()
}

/// Rank (relative threshold [`EMPIRICAL_RANK_THRESHOLD`]) of the covariance
/// of the offsets of cloud points lying within `radius_fraction` times the
/// median offset norm from `center`.
///
/// Offsets are expressed in an orthonormal basis of the Lie algebra, so the
/// estimate never exceeds the group dimension even for embedded models.
pub fn empirical_dimension(
    model: &LieGroupModel,
    cloud: &SampleCloud,
    center: &GroupPoint,
    radius_fraction: f64,
) -> Result<usize> {
    empirical_dimension_with(
        model,
        &cloud.points,
        center,
        radius_fraction,
        EMPIRICAL_RANK_THRESHOLD,
    )
}

pub fn empirical_dimension_with(
    model: &LieGroupModel,
    points: &[GroupPoint],
    center: &GroupPoint,
    radius_fraction: f64,
    threshold: f64,
) -> Result<usize> {
    if !(radius_fraction > 0.0 && radius_fraction.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "radius fraction must be positive, got {radius_fraction}"
        )));
    }
    let basis = model.algebra_subspace().to_matrix();
    let offsets: Vec<DVector<f64>> = points
        .iter()
        .map(|p| basis.tr_mul(&offset(model, p, center)))
        .collect();
    let mut norms: Vec<f64> = offsets.iter().map(|d| d.norm()).collect();
    norms.sort_by(f64::total_cmp);
    let median = norms.get(norms.len() / 2).copied().unwrap_or(0.0);
    let radius = radius_fraction * median;
    let near: Vec<&DVector<f64>> = offsets.iter().filter(|d| d.norm() <= radius).collect();
    if near.len() < MIN_NEIGHBOURS {
        return Err(Error::InsufficientSamples {
            found: near.len(),
            required: MIN_NEIGHBOURS,
        });
    }
    let dim = basis.ncols();
    let count = near.len() as f64;
    let mean = near.iter().fold(DVector::zeros(dim), |acc, d| acc + *d) / count;
    let mut cov = RealMatrix::zeros(dim, dim);
    for d in &near {
        let c = *d - &mean;
        cov += &c * c.transpose();
    }
    cov /= count;
    let sigma = cov.singular_values();
    let max = sigma.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|s| **s > threshold * max).count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub k: usize,
    pub count: usize,
    pub seed: u64,
    /// Overlap radius as a fraction of the forward cloud's median offset
    /// norm from the identity.
    pub eps: f64,
    pub radius_fraction: f64,
    pub tol: f64,
    pub fd_step: f64,
    /// Refuse to run unless the ad-rank condition holds.
    pub require_ad_rank: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            k: 5,
            count: 2000,
            seed: DEFAULT_SEED,
            eps: 0.1,
            radius_fraction: DEFAULT_RADIUS_FRACTION,
            tol: DEFAULT_TOL,
            fd_step: DEFAULT_FD_STEP,
            require_ad_rank: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub ad_rank: AdRankVerdict,
    pub forward: SampleCloud,
    pub backward: SampleCloud,
    pub forward_dim: usize,
    pub backward_dim: usize,
    /// Absolute overlap radius actually used.
    pub eps_absolute: f64,
    /// Fraction of forward samples within `eps_absolute` of some backward sample.
    pub overlap_fraction: f64,
    /// The same fraction restricted to forward samples within `eps_absolute`
    /// of the identity.
    pub overlap_near_identity: f64,
    pub full_dimension: bool,
    pub options: ProbeOptions,
}

/// Sampled evidence for a control set around the identity: forward cloud
/// (reachable set), reversed-system cloud (controllable set), their overlap
/// and empirical dimensions at `e`.
pub fn control_set_probe(sys: &LinearSystem, opts: &ProbeOptions) -> Result<ProbeReport> {
    let ad = ad_rank_report(sys, opts.fd_step, opts.tol)?;
    if opts.require_ad_rank && ad.verdict != AdRankVerdict::LocallyControllable {
        return Err(Error::Precondition(format!(
            "ad-rank condition fails (rank {} < {}); the control-set probe requires it",
            ad.rank, ad.n
        )));
    }
    let model = sys.model();
    let e = model.identity();
    let reversed = sys.reversed()?;
    let forward = sample_reachable(sys, opts.k, opts.count, opts.seed)?;
    let backward = sample_reachable(&reversed, opts.k, opts.count, opts.seed.wrapping_add(1))?;
    let forward_dim = empirical_dimension(model, &forward, &e, opts.radius_fraction)?;
    let backward_dim = empirical_dimension(model, &backward, &e, opts.radius_fraction)?;

    let mut norms: Vec<f64> = forward
        .points
        .iter()
        .map(|p| offset(model, p, &e).norm())
        .collect();
    norms.sort_by(f64::total_cmp);
    let eps = opts.eps * norms[norms.len() / 2];
    let near_backward = |p: &GroupPoint| {
        backward
            .points
            .iter()
            .any(|q| offset(model, p, q).norm() < eps)
    };
    let mut hits = 0usize;
    let mut near_e = 0usize;
    let mut near_e_hits = 0usize;
    for p in &forward.points {
        let hit = near_backward(p);
        hits += usize::from(hit);
        if offset(model, p, &e).norm() < eps {
            near_e += 1;
            near_e_hits += usize::from(hit);
        }
    }
    let n = model.group_dim();
    Ok(ProbeReport {
        ad_rank: ad.verdict,
        forward_dim,
        backward_dim,
        overlap_fraction: hits as f64 / forward.points.len() as f64,
        overlap_near_identity: if near_e == 0 {
            0.0
        } else {
            near_e_hits as f64 / near_e as f64
        },
        eps_absolute: eps,
        full_dimension: forward_dim == n && backward_dim == n,
        forward,
        backward,
        options: *opts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::system::GroupMap;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn grid_construction() {
        let r = ControlRange::symmetric(1, 1.0).unwrap();
        let g = ControlGrid::build(&r, 11, 1e-5, 0);
        assert_eq!(g.points.len(), 11);
        assert!((g.points[0][0] + 1.0 - 1e-5).abs() < 1e-15);

        let r = ControlRange::symmetric(2, 1.0).unwrap();
        assert_eq!(ControlGrid::build(&r, 4, 1e-5, 0).points.len(), 17);

        let r = ControlRange::symmetric(4, 1.0).unwrap();
        assert_eq!(
            ControlGrid::build(&r, 11, 1e-5, 0).points.len(),
            RANDOM_GRID_POINTS + 1
        );
    }

    #[test]
    fn control_distribution_examples() {
        let opts = AnalysisOptions::default();
        let sl2 = catalog::paper_sl2();
        let grid = ControlGrid::build(sl2.range(), 11, opts.fd_step, 0);
        let w = control_distribution(&sl2, &grid.points, opts.fd_step, opts.tol).unwrap();
        assert_eq!(w.dim(), 1);
        assert!(w.contains_vector(&dvector![1.0, -1.0, 1.0, -1.0], 1e-8));

        let aff2 = catalog::paper_aff2(1.0, 1.0).unwrap();
        let w = control_distribution(&aff2, &grid.points, opts.fd_step, opts.tol).unwrap();
        assert_eq!(w.dim(), 2);

        let constant = sl2.with_control(GroupMap::new("e", |_| Ok(dvector![1.0, 0.0, 0.0, 1.0])));
        let w = control_distribution(&constant, &grid.points, opts.fd_step, opts.tol).unwrap();
        assert_eq!(w.dim(), 0);
    }

    #[test]
    fn accessibility_examples() {
        let opts = AnalysisOptions::default();
        let r = accessibility_report(&catalog::paper_sl2(), &opts).unwrap();
        assert_eq!((r.dim_w(), r.dim_v(), r.dim_h()), (1, 3, 3));
        assert!(r.is_accessible());

        let r = accessibility_report(&catalog::paper_heisenberg(), &opts).unwrap();
        assert_eq!((r.dim_w(), r.dim_v(), r.dim_h()), (2, 3, 3));
        assert!(r.is_accessible());

        let sys = catalog::rn_linear(RealMatrix::identity(2, 2), dmatrix![1.0; 0.0]).unwrap();
        let r = accessibility_report(&sys, &opts).unwrap();
        assert_eq!(r.dim_h(), 1);
        assert_eq!(
            r.verdict,
            AccessibilityVerdict::NotAccessibleAtSampledPoints
        );
    }

    #[test]
    fn ad_rank_examples() {
        let r = ad_rank_report(&catalog::paper_sl2(), 1e-5, 1e-8).unwrap();
        let k = dmatrix![3.0, 2.0, 1.0; -9.0, -4.0, -1.0; 1.0, 1.0, 1.0; -3.0, -2.0, -1.0];
        assert!((&r.v_matrix - k).amax() < 1e-6);
        assert_eq!(r.rank, 3);
        assert_eq!(r.verdict, AdRankVerdict::LocallyControllable);

        let r = ad_rank_report(&catalog::paper_aff2(0.0, 1.0).unwrap(), 1e-5, 1e-8).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.verdict, AdRankVerdict::Inconclusive);
        let r = ad_rank_report(&catalog::paper_aff2(1.0, 1.0).unwrap(), 1e-5, 1e-8).unwrap();
        assert!((&r.v_matrix - dmatrix![1.0, 1.0; 1.0, 0.0]).amax() < 1e-8);
        assert_eq!(r.verdict, AdRankVerdict::LocallyControllable);
    }

    #[test]
    fn heisenberg_ad_rank_matrix_is_rank_two() {
        // ψ = I + N with N² = 0, so ψ²b − 2ψb + b = 0 for every b.
        let r = ad_rank_report(&catalog::paper_heisenberg(), 1e-5, 1e-8).unwrap();
        let expected = dmatrix![1.5, 0.5, -0.5; 1.0, 1.0, 1.0; 2.5, 1.5, 0.5];
        assert!((&r.v_matrix - expected).amax() < 1e-6);
        assert_eq!(r.rank, 2);
        assert_eq!(r.verdict, AdRankVerdict::Inconclusive);
    }

    #[test]
    fn regular_rank_examples() {
        let sl2 = catalog::paper_sl2();
        assert_eq!(
            regular_rank(&sl2, &vec![dvector![0.0]; 3], 1e-5, 1e-8).unwrap(),
            3
        );
        assert_eq!(regular_rank(&sl2, &[dvector![0.0]], 1e-5, 1e-8).unwrap(), 1);
        let constant = sl2.with_control(GroupMap::new("e", |_| Ok(dvector![1.0, 0.0, 0.0, 1.0])));
        assert_eq!(
            regular_rank(&constant, &vec![dvector![0.2]; 4], 1e-5, 1e-8).unwrap(),
            0
        );
    }

    #[test]
    fn sampling_is_replayable() {
        let sys = catalog::paper_heisenberg();
        let a = sample_reachable(&sys, 3, 50, 9).unwrap();
        let b = sample_reachable(&sys, 3, 50, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(replay(&sys, 3, 9, 17).unwrap(), a.points[17]);

        let zero = sample_with(&sys, 4, 1, 0, |range, k, _| {
            vec![DVector::zeros(range.dim()); k]
        })
        .unwrap();
        assert_eq!(zero.points, vec![sys.model().identity()]);

        let csv = a.to_csv();
        assert!(csv.starts_with("k,seed,idx,c1,c2,c3\n3,9,0,"));
        assert_eq!(csv.lines().count(), 51);
    }

    #[test]
    fn empirical_dimension_synthetic() {
        let model = LieGroupModel::Rn(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let range = ControlRange::symmetric(2, 1.0).unwrap();
        let points: Vec<GroupPoint> = (0..500)
            .map(|_| {
                let s = range.sample(&mut rng);
                GroupPoint::new(vec![s[0], s[1], s[0] - 2.0 * s[1]])
            })
            .collect();
        let cloud = SampleCloud {
            points,
            k: 0,
            seed: 5,
            count: 500,
        };
        let c = model.identity();
        assert_eq!(empirical_dimension(&model, &cloud, &c, 0.8).unwrap(), 2);

        let repeated = SampleCloud {
            points: vec![GroupPoint::new(vec![1.0, 2.0, 3.0]); 30],
            k: 0,
            seed: 0,
            count: 30,
        };
        let c = GroupPoint::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(empirical_dimension(&model, &repeated, &c, 0.5).unwrap(), 0);

        let few = SampleCloud {
            points: repeated.points[..5].to_vec(),
            ..repeated
        };
        assert!(matches!(
            empirical_dimension(&model, &few, &c, 0.5),
            Err(Error::InsufficientSamples { found: 5, .. })
        ));
    }

    #[test]
    fn probe_gates_on_ad_rank() {
        let sys = catalog::paper_aff2(0.0, 1.0).unwrap();
        let r = control_set_probe(&sys, &ProbeOptions::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
