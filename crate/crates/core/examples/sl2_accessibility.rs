//! Accessibility of the SL(2,R) example: the control distribution W is a
//! line, its psi-invariant hull V is all of sl(2,R).

use lie_access::analysis::{accessibility_report, AnalysisOptions};
use lie_access::catalog::paper_sl2;

pub fn main() -> lie_access::Result<()> {
    let sys = paper_sl2();
    let report = accessibility_report(&sys, &AnalysisOptions::default())?;
    println!("system: {}", sys.name());
    println!("grid: {} ({} points)", report.grid, report.grid_points);
    println!("psi =\n{:.6}", report.psi);
    println!(
        "dim W = {}, dim V = {}, dim h = {}",
        report.dim_w(),
        report.dim_v(),
        report.dim_h()
    );
    println!("verdict: {}", report.verdict.as_str());
    assert!(report.is_accessible());
    Ok(())
}
