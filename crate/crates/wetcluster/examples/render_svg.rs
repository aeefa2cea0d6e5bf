//! Renders the dry network and its wetted counterpart as SVG files.

use wetcluster::cluster::{BoundaryTrace, Jump, Weights};
use wetcluster::dry::best_dry;
use wetcluster::geom::PI;
use wetcluster::svg::{render_cluster, render_network};
use wetcluster::wetting::build_wetted;

fn main() -> wetcluster::Result<()> {
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let w = Weights::equal(3);
    let dry = best_dry(&trace, &w, 4)?.best;
    let wetted = build_wetted(&dry, &trace, &w, 0.02)?;

    let dir = std::env::temp_dir().join("wetcluster-example-svg");
    std::fs::create_dir_all(&dir)?;
    let dry_path = dir.join("dry.svg");
    let wet_path = dir.join("wetted.svg");
    std::fs::write(&dry_path, render_network(&dry, &trace))?;
    std::fs::write(&wet_path, render_cluster(&wetted.cluster))?;
    println!("wrote {}", dry_path.display());
    println!("wrote {}", wet_path.display());
    Ok(())
}
