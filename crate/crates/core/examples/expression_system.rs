//! Loads a system defined by expressions from a TOML file and checks that it
//! is a well-formed linear system before analysing it.

use std::collections::BTreeMap;
use std::path::Path;

use lie_access::analysis::{accessibility_report, AnalysisOptions};
use lie_access::sysfile;

pub fn main() -> lie_access::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/systems/heisenberg.toml");
    let file = sysfile::load(path.to_str().expect("utf-8 path"), &BTreeMap::new())?;
    let sys = &file.system;

    let validation = sys.validate(0, 200);
    for check in &validation.checks {
        println!(
            "{:<28} residual {:.2e}  {}",
            check.name,
            check.residual,
            if check.passed { "ok" } else { "FAILED" }
        );
    }

    let opts = AnalysisOptions {
        grid: file.numeric.grid.unwrap_or(lie_access::DEFAULT_GRID),
        ..AnalysisOptions::default()
    };
    let report = accessibility_report(sys, &opts)?;
    println!(
        "{}: dim h = {} -> {}",
        sys.name(),
        report.dim_h(),
        report.verdict.as_str()
    );

    // Malformed definitions are rejected with a diagnostic naming the field.
    let broken = std::fs::read_to_string(&path)
        .expect("readable")
        .replace("m = 1", "m = 2");
    match sysfile::parse_str("broken", &broken, &BTreeMap::new()) {
        Ok(_) => unreachable!("inconsistent control dimension accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
