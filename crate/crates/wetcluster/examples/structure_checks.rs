//! Runs the structure-check suite on a constructed wetted cluster and on
//! its rasterization, printing the report table.

use wetcluster::cluster::{validate_cluster, BoundaryTrace, InstanceSpec, Jump, Weights};
use wetcluster::dry::best_dry;
use wetcluster::geom::PI;
use wetcluster::lattice::rasterize_cluster;
use wetcluster::verify::{
    check_convexity, check_curvature_condition, check_cusp_tangency, CheckSource,
    VerificationReport,
};
use wetcluster::wetting::build_wetted;

fn main() -> wetcluster::Result<()> {
    let trace = BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ]);
    let w = Weights::equal(3);
    let dry = best_dry(&trace, &w, 4)?.best;
    let wetted = build_wetted(&dry, &trace, &w, 0.01)?;

    let mut report = VerificationReport::default();
    report.push(check_curvature_condition(&CheckSource::Cluster(&wetted.cluster), &w));
    report.push(check_cusp_tangency(&wetted.cluster));
    report.push(check_convexity(&CheckSource::Cluster(&wetted.cluster), 3));

    // The same curvature condition at raster tolerance, on the cluster's
    // own rasterization.
    let raster = rasterize_cluster(&wetted.cluster, 256);
    report.push(check_curvature_condition(&CheckSource::Field(&raster), &w));

    print!("{}", report.to_text());

    let spec = InstanceSpec::ball(w, 0.01, trace);
    let adm = validate_cluster(&wetted.cluster, &spec)?;
    println!(
        "admissibility: wet area {:.10}, trace ok {}, containment ok {}",
        adm.wet_area, adm.constraint_ok, adm.containment_ok
    );
    std::process::exit(if report.all_passed() && adm.all_ok() { 0 } else { 1 });
}
