//! Samples the reachable set R_k from the identity, writes it as CSV and
//! estimates its local dimension.

use lie_access::analysis::{
    empirical_dimension, replay, sample_reachable, DEFAULT_RADIUS_FRACTION,
};
use lie_access::catalog::{paper_heisenberg, paper_sl2};

pub fn main() -> lie_access::Result<()> {
    for sys in [paper_sl2(), paper_heisenberg()] {
        let cloud = sample_reachable(&sys, 5, 5000, 0)?;
        let e = sys.model().identity();
        let dim = empirical_dimension(sys.model(), &cloud, &e, DEFAULT_RADIUS_FRACTION)?;
        let median = cloud.median_point().expect("non-empty cloud");
        let dim_median =
            empirical_dimension(sys.model(), &cloud, &median, DEFAULT_RADIUS_FRACTION)?;
        println!(
            "{}: {} points, dimension {dim} at e, {dim_median} at {median}",
            sys.name(),
            cloud.count
        );

        // Any single trajectory can be recomputed from (seed, index).
        assert_eq!(replay(&sys, 5, 0, 42)?, cloud.points[42]);

        let csv = cloud.to_csv();
        for line in csv.lines().take(3) {
            println!("  {line}");
        }
    }
    Ok(())
}
