//! Sampled evidence for a control set around the identity: forward and
//! backward (reversed-system) clouds, their dimension at e and their overlap.

use lie_access::analysis::{control_set_probe, ProbeOptions};
use lie_access::catalog::{paper_aff2, paper_heisenberg, paper_sl2};

pub fn main() -> lie_access::Result<()> {
    let sl2 = control_set_probe(&paper_sl2(), &ProbeOptions::default())?;
    println!(
        "paper-sl2: dims {}/{}, overlap {:.3} (eps {:.3}), near e {:.2}",
        sl2.forward_dim,
        sl2.backward_dim,
        sl2.overlap_fraction,
        sl2.eps_absolute,
        sl2.overlap_near_identity
    );

    // The ad-rank condition fails here, so the probe refuses to run by default.
    let gated = control_set_probe(&paper_aff2(0.0, 1.0)?, &ProbeOptions::default());
    println!(
        "paper-aff2 (a = 0): {}",
        gated.err().map(|e| e.to_string()).unwrap_or_default()
    );

    let forced = ProbeOptions {
        require_ad_rank: false,
        ..ProbeOptions::default()
    };
    let heis = control_set_probe(&paper_heisenberg(), &forced)?;
    println!(
        "paper-heisenberg (ungated, ad-rank {}): dims {}/{}, overlap {:.3}",
        heis.ad_rank.as_str(),
        heis.forward_dim,
        heis.backward_dim,
        heis.overlap_fraction
    );
    Ok(())
}
