//! Sweeps the wet-area budget at a reduced resolution, comparing oracle
//! energies against the closed-form prediction and printing the summary
//! rows (the command-line `sweep` subcommand writes the same table as CSV).

use std::path::Path;
use wetcluster::cluster::{BoundaryTrace, InstanceSpec, Jump, Weights};
use wetcluster::geom::PI;
use wetcluster::pipeline::{cmd_sweep, RunOptions};

fn main() -> wetcluster::Result<()> {
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let spec = InstanceSpec::ball(Weights::equal(3), 0.01, trace);
    let dir = std::env::temp_dir().join("wetcluster-example-sweep");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir)?;
    let instance = dir.join("instance.json");
    std::fs::write(&instance, spec.to_json())?;

    let opts = RunOptions { resolution: 128, ..RunOptions::default() };
    let rows = cmd_sweep(Path::new(&instance), &dir, &opts)?;
    println!("delta     oracle      predicted   wet area   H(chambers)  H(wet, junctions)");
    for r in &rows {
        println!(
            "{:<8} {:<11.6} {:<11.6} {:<10.6} {:<12.5} {:<12.5}",
            r.delta,
            r.energy_oracle,
            r.energy_predicted,
            r.wet_area,
            r.hausdorff_chambers,
            r.hausdorff_g_sigma
        );
    }
    println!("artifacts under {}", dir.display());
    Ok(())
}
