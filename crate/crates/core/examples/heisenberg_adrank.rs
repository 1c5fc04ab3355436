//! Ad-rank test on the Heisenberg example. The Kalman-type matrix built from
//! psi and dF_0 has rank 2 because psi - I is nilpotent of order two, so the
//! test is inconclusive even though the system is accessible.

use lie_access::analysis::{accessibility_report, ad_rank_report, AnalysisOptions};
use lie_access::catalog::paper_heisenberg;
use lie_access::{DEFAULT_FD_STEP, DEFAULT_TOL};

pub fn main() -> lie_access::Result<()> {
    let sys = paper_heisenberg();
    let ad = ad_rank_report(&sys, DEFAULT_FD_STEP, DEFAULT_TOL)?;
    println!("dF_0 = {:.6}", ad.df0.transpose());
    println!("V =\n{:.6}", ad.v_matrix);
    println!("rank V = {} of {}: {}", ad.rank, ad.n, ad.verdict.as_str());

    let psi_minus_i = &ad.psi - nalgebra::DMatrix::identity(3, 3);
    println!("|(psi - I)^2| = {:e}", (&psi_minus_i * &psi_minus_i).amax());

    let acc = accessibility_report(&sys, &AnalysisOptions::default())?;
    println!(
        "dim V = {}, dim h = {}: {}",
        acc.dim_v(),
        acc.dim_h(),
        acc.verdict.as_str()
    );
    Ok(())
}
