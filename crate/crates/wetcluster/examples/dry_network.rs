//! Solves dry (zero wet budget) instances: enumerates the segment-network
//! topologies for a boundary trace, optimizes junction positions, and
//! prints the winner with its angle residuals and runners-up.

use wetcluster::cluster::{BoundaryTrace, Jump, Weights};
use wetcluster::dry::best_dry;
use wetcluster::geom::PI;

fn main() -> wetcluster::Result<()> {
    // Three equally spaced boundary jumps: the minimizer is the symmetric
    // three-spoke network through the center.
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let w = Weights::equal(3);
    let sol = best_dry(&trace, &w, 4)?;
    println!("symmetric three-jump instance");
    println!("  best energy       {:.9}", sol.best.energy);
    println!("  junctions         {:?}", sol.best.positions);
    println!("  angle residual    {:.2e}", sol.best.angle_residual);
    for (i, r) in sol.runners_up.iter().enumerate() {
        println!("  runner-up {i}: energy {:.6} ({} junctions pinned)",
            r.energy,
            r.topology.junctions.iter().filter(|j| j.pinned.is_some()).count());
    }

    // Unequal weights shift the junction; the weighted angle conditions
    // still hold at the optimum.
    let wp = Weights(vec![1.0, 1.0, 1.0, 1.2]);
    let solp = best_dry(&trace, &wp, 4)?;
    println!("\nperturbed weights c = (1, 1, 1, 1.2)");
    println!("  energy            {:.9}", solp.best.energy);
    println!("  junction          {:?}", solp.best.positions[0]);
    println!("  sine-law residual {:.2e}", solp.best.angle_residual);

    // Two jumps: a plain chord, no junctions at all.
    let chord = BoundaryTrace::new(vec![
        Jump { angle: 0.0, label: 1 },
        Jump { angle: PI / 2.0, label: 2 },
    ]);
    let solc = best_dry(&chord, &Weights::equal(2), 4)?;
    println!("\ntwo jumps a quarter turn apart");
    println!("  energy            {:.9} (exact: {:.9})", solc.best.energy, 2.0 * 2.0_f64.sqrt());
    Ok(())
}
