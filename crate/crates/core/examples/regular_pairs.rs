//! Rank of the endpoint map u -> phi(k, e, u). A pair (e, u) is regular when
//! the rank equals the group dimension.

use lie_access::analysis::{regular_rank, trajectory_controls};
use lie_access::catalog::{paper_heisenberg, paper_sl2};
use lie_access::{DEFAULT_FD_STEP, DEFAULT_TOL};
use nalgebra::DVector;

pub fn main() -> lie_access::Result<()> {
    for sys in [paper_sl2(), paper_heisenberg()] {
        for k in 1..=4 {
            let zero = vec![DVector::zeros(1); k];
            let random = trajectory_controls(sys.range(), k, 0, 0);
            println!(
                "{:<18} k = {k}: rank at u = 0 is {}, at a random u is {}",
                sys.name(),
                regular_rank(&sys, &zero, DEFAULT_FD_STEP, DEFAULT_TOL)?,
                regular_rank(&sys, &random, DEFAULT_FD_STEP, DEFAULT_TOL)?
            );
        }
    }
    Ok(())
}
