//! On R^n the accessibility verdict reduces to the classical Kalman rank
//! condition rank [A^(n-1)B ... AB B] = n.

use lie_access::algebra::{kalman_matrix, numerical_rank};
use lie_access::analysis::{accessibility_report, AnalysisOptions};
use lie_access::catalog::rn_linear;
use nalgebra::dmatrix;

pub fn main() -> lie_access::Result<()> {
    let cases = [
        (
            "double integrator",
            dmatrix![1.0, 1.0; 0.0, 1.0],
            dmatrix![0.0; 1.0],
        ),
        (
            "decoupled, one input",
            dmatrix![2.0, 0.0; 0.0, 3.0],
            dmatrix![1.0; 0.0],
        ),
        (
            "rotation",
            dmatrix![0.0, -1.0; 1.0, 0.0],
            dmatrix![1.0; 0.0],
        ),
        (
            "chain of three",
            dmatrix![1.0, 1.0, 0.0; 0.0, 1.0, 1.0; 0.0, 0.0, 1.0],
            dmatrix![0.0; 0.0; 1.0],
        ),
    ];
    for (label, a, b) in cases {
        let n = a.nrows();
        let kalman = numerical_rank(&kalman_matrix(&a, &b, n), lie_access::DEFAULT_TOL)?.0;
        let report = accessibility_report(&rn_linear(a, b)?, &AnalysisOptions::default())?;
        println!(
            "{label:<22} Kalman rank {kalman}/{n}  dim h = {}  {}",
            report.dim_h(),
            report.verdict.as_str()
        );
        assert_eq!(report.is_accessible(), kalman == n);
    }
    Ok(())
}
