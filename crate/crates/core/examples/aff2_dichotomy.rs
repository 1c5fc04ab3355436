//! The Aff(2,R) family f0(x, y) = (x, a(x - 1) + d y) satisfies the ad-rank
//! condition exactly when a is nonzero.

use lie_access::analysis::{accessibility_report, ad_rank_report, AnalysisOptions};
use lie_access::catalog::paper_aff2;
use lie_access::{DEFAULT_FD_STEP, DEFAULT_TOL};

pub fn main() -> lie_access::Result<()> {
    println!(
        "{:>6} {:>6} {:>5} {:>22} {:>12}",
        "a", "d", "rank", "ad-rank verdict", "accessible"
    );
    for (a, d) in [(1.0, 1.0), (0.5, 2.0), (-3.0, 1.0), (0.0, 1.0), (0.0, -2.0)] {
        let sys = paper_aff2(a, d)?;
        let ad = ad_rank_report(&sys, DEFAULT_FD_STEP, DEFAULT_TOL)?;
        let acc = accessibility_report(&sys, &AnalysisOptions::default())?;
        println!(
            "{a:>6} {d:>6} {:>5} {:>22} {:>12}",
            ad.rank,
            ad.verdict.as_str(),
            acc.is_accessible()
        );
    }
    Ok(())
}
