//! Runs the lattice optimizer on the three-chamber instance and compares
//! its energy against the exact dry and wetted values.

use wetcluster::cluster::{BoundaryTrace, InstanceSpec, Jump, Weights};
use wetcluster::dry::best_dry;
use wetcluster::geom::PI;
use wetcluster::lattice::{optimize, OracleConfig};
use wetcluster::wetting::build_wetted;

fn main() -> wetcluster::Result<()> {
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let w = Weights::equal(3);
    let dry = best_dry(&trace, &w, 4)?.best;
    println!("dry minimizer energy: {:.9}", dry.energy);

    let resolution: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(256);
    let sweeps: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(OracleConfig::default().sweeps);

    for delta in [0.0, 0.01] {
        let spec = InstanceSpec::ball(w.clone(), delta, trace.clone());
        let cfg = OracleConfig { resolution, sweeps, seed: 1, ..OracleConfig::default() };
        let started = std::time::Instant::now();
        let result = optimize(&spec, &cfg)?;
        let elapsed = started.elapsed().as_secs_f64();
        let predicted = build_wetted(&dry, &trace, &w, delta)?.predicted_energy;
        println!(
            "delta {delta}: oracle {:.6} vs predicted {:.6} ({:+.2}%), wet area {:.6}, {:.1}s",
            result.energy,
            predicted,
            (result.energy - predicted) / predicted * 100.0,
            result.field.wet_area(),
            elapsed
        );
    }
    Ok(())
}
