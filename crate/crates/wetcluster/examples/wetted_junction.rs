//! Builds the predicted wetted minimizer for a small wet-area budget:
//! calibrates the shared arc curvature, replaces the triple junction by a
//! curvilinear triangle, and prints the closed-form energy accounting.

use wetcluster::cluster::{BoundaryTrace, Jump, Weights};
use wetcluster::dry::best_dry;
use wetcluster::geom::{curvilinear_triangle, PI};
use wetcluster::wetting::{build_wetted, interior_energy_delta, length_deficit_constant};

fn main() -> wetcluster::Result<()> {
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let w = Weights::equal(3);
    let dry = best_dry(&trace, &w, 4)?.best;
    println!("dry energy                  {:.9}", dry.energy);
    println!("length deficit constant     {:.6}", length_deficit_constant());

    for delta in [0.04, 0.02, 0.01, 0.005] {
        let wetted = build_wetted(&dry, &trace, &w, delta)?;
        let r = wetted.params.r;
        println!("\nwet budget {delta}");
        println!("  arc radius r             {:.6}", r);
        println!("  arc curvature            {:.6}", wetted.params.kappa);
        println!("  cusp distance r/sqrt(3)  {:.6}", r / 3.0_f64.sqrt());
        println!("  energy change            {:.6}", interior_energy_delta(r));
        println!("  predicted energy         {:.9}", wetted.predicted_energy);
        println!("  assembled cluster energy {:.9}", wetted.cluster.energy(&w));
        println!("  wet area                 {:.12}", wetted.cluster.wet_area()?);
    }

    // The unit-radius junction piece in isolation.
    let tri = curvilinear_triangle(1.0)?;
    println!("\nunit junction piece: area {:.9}, arc length {:.9}", tri.area, tri.arc_length);
    Ok(())
}
