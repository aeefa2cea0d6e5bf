//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line with its measured values. Expensive oracle runs
//! are shared between criteria through lazy statics.
//!
//! Criterion 5 contains two sub-checks (fitted arc curvature within 10%
//! and chamber hull excess within 2 cell areas) that measure sub-cell
//! boundary regularity of annealed fields. States within one energy tick
//! of the optimum vary by far more than these tolerances at resolution
//! 256, so an energy-driven search cannot pin them; those sub-checks are
//! asserted as stated and fail honestly. See README, "Known limitations".

use std::sync::LazyLock;
use std::time::Instant;
use wetcluster::cluster::{BoundaryTrace, InstanceSpec, Jump, RegionLabel, Weights};
use wetcluster::dry::{best_dry, enumerate_topologies, DrySolution};
use wetcluster::geom::{
    curvilinear_triangle, hypograph_symmetrize, convex_clip_grid, convex_clip_polygon, GridSet,
    Point2, Polygon, WindowRect, PI, TAU,
};
use wetcluster::lattice::{
    crofton_perimeter_mask, hausdorff, hausdorff_to_points, lattice_energy, measure_curvature,
    optimize, rasterize_cluster, repair_containment, LabelField, OracleConfig, OracleResult,
    Stencil, WET,
};
use wetcluster::verify::{
    check_convexity, check_saturation, convergence_sweep, monotonicity_diagnostic, CheckSource,
    CheckStatus, SweepPoint,
};
use wetcluster::wetting::{
    build_wetted, interior_energy_delta, length_deficit_constant, WettedCluster,
};

const RES: usize = 256;
const CELL: f64 = 1.0 / RES as f64;

fn y_trace() -> BoundaryTrace {
    BoundaryTrace::new(vec![
        Jump { angle: PI / 2.0, label: 1 },
        Jump { angle: 7.0 * PI / 6.0, label: 2 },
        Jump { angle: 11.0 * PI / 6.0, label: 3 },
    ])
}

fn chord_trace() -> BoundaryTrace {
    BoundaryTrace::new(vec![Jump { angle: 0.0, label: 1 }, Jump { angle: PI, label: 2 }])
}

fn y_spec(delta: f64) -> InstanceSpec {
    InstanceSpec::ball(Weights::equal(3), delta, y_trace())
}

struct TimedRun {
    result: OracleResult,
    seconds: f64,
}

fn run_oracle(spec: &InstanceSpec, resolution: usize) -> TimedRun {
    let cfg = OracleConfig { resolution, ..OracleConfig::default() };
    let started = Instant::now();
    let result = optimize(spec, &cfg).expect("oracle run");
    TimedRun { result, seconds: started.elapsed().as_secs_f64() }
}

static DRY_Y: LazyLock<DrySolution> =
    LazyLock::new(|| best_dry(&y_trace(), &Weights::equal(3), 4).expect("dry solve"));

static WETTED_001: LazyLock<WettedCluster> = LazyLock::new(|| {
    build_wetted(&DRY_Y.best, &y_trace(), &Weights::equal(3), 0.01).expect("wetted construction")
});

static ORACLE_Y_DRY: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.0), RES));
static ORACLE_Y_040: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.04), RES));
static ORACLE_Y_020: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.02), RES));
static ORACLE_Y_010: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.01), RES));
static ORACLE_Y_005: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.005), RES));
static ORACLE_Y_010_R128: LazyLock<TimedRun> = LazyLock::new(|| run_oracle(&y_spec(0.01), 128));
static ORACLE_CHORD_010: LazyLock<TimedRun> = LazyLock::new(|| {
    run_oracle(&InstanceSpec::ball(Weights::equal(2), 0.01, chord_trace()), RES)
});

/// Boundary of the wetted-junction region sampled straight from the three
/// tangent circles, independent of the arc machinery under test.
fn triangle_boundary_samples(r: f64, per_arc: usize) -> Vec<Point2> {
    let sqrt3 = 3.0_f64.sqrt();
    let mut pts = Vec::with_capacity(3 * per_arc);
    for k in 0..3 {
        let center =
            Point2::from_angle(PI / 2.0 + k as f64 * 2.0 * PI / 3.0).scale(2.0 * r / sqrt3);
        let cusp_a = Point2::from_angle(PI / 6.0 + k as f64 * 2.0 * PI / 3.0).scale(r / sqrt3);
        let cusp_b =
            Point2::from_angle(5.0 * PI / 6.0 + k as f64 * 2.0 * PI / 3.0).scale(r / sqrt3);
        let a0 = cusp_a.sub(center).angle();
        let mut sweep = cusp_b.sub(center).angle() - a0;
        while sweep > 0.0 {
            sweep -= TAU;
        }
        for i in 0..per_arc {
            let t = i as f64 / per_arc as f64;
            pts.push(center.add(Point2::from_angle(a0 + t * sweep).scale(r)));
        }
    }
    pts
}

#[test]
fn acceptance_1_wetted_junction_geometry() {
    let started = Instant::now();
    let tri = curvilinear_triangle(1.0).expect("triangle");
    // Independent oracle: a million-point polygonal refinement of the
    // boundary, sampled directly from the circle parameterization.
    let pts = triangle_boundary_samples(1.0, 333_334);
    let oracle_area = Polygon::new(pts.clone()).area();
    let mut oracle_len = 0.0;
    let third = pts.len() / 3;
    for i in 0..third {
        oracle_len += pts[i].dist(pts[(i + 1) % pts.len()]);
    }
    let area_err = (tri.area - oracle_area).abs();
    let len_err = (tri.arc_length - oracle_len).abs();
    let chain_area_err = (tri.chain.area().unwrap() - oracle_area).abs();
    let elapsed = started.elapsed().as_secs_f64();
    let pass = area_err < 1e-9 && len_err < 1e-9 && chain_area_err < 1e-9 && elapsed < 1.0;
    println!(
        "acceptance 1 (wetted-junction geometry): {} - area err {area_err:.2e}, \
         arc-length err {len_err:.2e}, {elapsed:.2}s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "area err {area_err}, len err {len_err}, chain err {chain_area_err}, {elapsed}s");
}

#[test]
fn acceptance_2_length_deficit_constant() {
    let c = length_deficit_constant();
    let value_ok = (c - (-0.463688)).abs() < 1e-5;
    let sign_ok = c < 0.0;
    // Identity: 3 c sqrt(piece area) equals the per-junction energy change
    // at the calibrated radius, for ten seeded budgets.
    let mut worst = 0.0f64;
    let mut state = 0x9E3779B97F4A7C15u64;
    for _ in 0..10 {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        let u = (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64;
        let delta = 1e-6 + u * (0.05 - 1e-6);
        let r = (delta / wetcluster::geom::CURVILINEAR_TRIANGLE_AREA).sqrt();
        let lhs = 3.0 * c * (delta / 3.0).sqrt();
        let rhs = interior_energy_delta(r);
        worst = worst.max((lhs - rhs).abs());
    }
    let identity_ok = worst < 1e-12;
    let pass = value_ok && sign_ok && identity_ok;
    println!(
        "acceptance 2 (deficit constant): {} - c = {c:.6}, identity residual {worst:.2e}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "c {c}, identity {worst:.2e}");
}

#[test]
fn acceptance_3_dry_solver_ground_truths() {
    let started = Instant::now();
    // Two jumps, a quarter turn apart: the chord, weighted exactly.
    let trace2 = BoundaryTrace::new(vec![
        Jump { angle: 0.0, label: 1 },
        Jump { angle: PI / 2.0, label: 2 },
    ]);
    let sol2 = best_dry(&trace2, &Weights::equal(2), 4).expect("2-jump solve");
    let chord_err = (sol2.best.energy - 2.0 * 2.0_f64.sqrt()).abs();

    // Symmetric three-jump instance: junction at the center, 120-degree
    // angles, energy 6.
    let soly = &*DRY_Y;
    let energy_err = (soly.best.energy - 6.0).abs();
    let jp = y_trace().jump_points();
    let segs = soly.best.segments(&jp);
    let junction = soly.best.positions[0];
    let mut angle_err = 0.0f64;
    let mut dirs: Vec<f64> = segs
        .iter()
        .map(|s| {
            let far = if s.a.dist(junction) < 1e-9 { s.b } else { s.a };
            far.sub(junction).angle()
        })
        .collect();
    dirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 0..3 {
        let sep = (dirs[(k + 1) % 3] - dirs[k]).rem_euclid(TAU);
        angle_err = angle_err.max((sep - 2.0 * PI / 3.0).abs());
    }

    // General weights: sine-law residual from the solved junction.
    let solw = best_dry(&y_trace(), &Weights(vec![1.0, 1.0, 1.0, 1.2]), 4).expect("weighted");
    let sine_residual = solw.best.angle_residual;
    let elapsed = started.elapsed().as_secs_f64();
    let pass = chord_err < 1e-12
        && energy_err < 1e-9
        && angle_err < 1e-8
        && sine_residual < 1e-8
        && elapsed < 5.0;
    println!(
        "acceptance 3 (dry ground truths): {} - chord err {chord_err:.2e}, Y energy err \
         {energy_err:.2e}, angle err {angle_err:.2e} rad, sine residual {sine_residual:.2e}, \
         {elapsed:.2}s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn acceptance_4_oracle_agreement() {
    let dry = &*ORACLE_Y_DRY;
    let wet = &*ORACLE_Y_010;
    let chord = &*ORACLE_CHORD_010;
    let cell_area = CELL * CELL;

    let e_dry_rel = (dry.result.energy - 6.0).abs() / 6.0;
    let predicted = WETTED_001.predicted_energy;
    let e_wet_rel = (wet.result.energy - predicted).abs() / predicted;
    let wet_area = wet.result.field.wet_area();
    let wet_area_ok = wet_area >= 0.01 - cell_area - 1e-12 && wet_area <= 0.01 + 1e-12;
    let chord_rel = (chord.result.energy - 4.0).abs() / 4.0;
    let chord_wet_cells = chord.result.field.count_label(WET);
    let runtimes_ok = dry.seconds < 90.0 && wet.seconds < 90.0 && chord.seconds < 90.0;
    let pass = e_dry_rel < 0.02
        && e_wet_rel < 0.02
        && wet_area_ok
        && chord_rel < 0.02
        && chord_wet_cells < 3
        && runtimes_ok;
    println!(
        "acceptance 4 (oracle agreement): {} - dry {:.4} ({:+.2}%), wetted {:.4} ({:+.2}% of \
         {predicted:.4}), wet area {wet_area:.6} vs 0.01, chord {:.4} ({:+.2}%), chord wet cells \
         {chord_wet_cells}, runtimes {:.0}/{:.0}/{:.0}s",
        if pass { "PASS" } else { "FAIL" },
        dry.result.energy,
        e_dry_rel * 100.0,
        wet.result.energy,
        e_wet_rel * 100.0,
        chord.result.energy,
        chord_rel * 100.0,
        dry.seconds,
        wet.seconds,
        chord.seconds,
    );
    assert!(pass);
}

/// Distinct meeting points of two chambers and the wet phase: connected
/// clusters of cells whose 5x5 neighborhood holds both chambers and wet.
fn count_cusps(f: &LabelField, n_chambers: u8) -> usize {
    let mut total = 0;
    for a in 1..=n_chambers {
        for b in (a + 1)..=n_chambers {
            let mut marked = vec![false; f.labels.len()];
            for iy in 2..f.ny - 2 {
                for ix in 2..f.nx - 2 {
                    let i = f.idx(ix, iy);
                    if !f.mask[i] {
                        continue;
                    }
                    let (mut has_a, mut has_b, mut has_wet) = (false, false, false);
                    for dy in -2i32..=2 {
                        for dx in -2i32..=2 {
                            let j = f.idx((ix as i32 + dx) as usize, (iy as i32 + dy) as usize);
                            if !f.mask[j] {
                                continue;
                            }
                            match f.labels[j] {
                                l if l == a => has_a = true,
                                l if l == b => has_b = true,
                                l if l == WET => has_wet = true,
                                _ => {}
                            }
                        }
                    }
                    marked[i] = has_a && has_b && has_wet;
                }
            }
            // Connected components of the marked set.
            let mut seen = vec![false; f.labels.len()];
            for start in 0..marked.len() {
                if !marked[start] || seen[start] {
                    continue;
                }
                total += 1;
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(i) = stack.pop() {
                    let (ix, iy) = ((i % f.nx) as i32, (i / f.nx) as i32);
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            let (jx, jy) = (ix + dx, iy + dy);
                            if jx < 0 || jy < 0 || jx >= f.nx as i32 || jy >= f.ny as i32 {
                                continue;
                            }
                            let j = (jy as usize) * f.nx + jx as usize;
                            if marked[j] && !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
        }
    }
    total
}

#[test]
fn acceptance_5_structure_checks_on_optimized_field() {
    let field = &ORACLE_Y_010.result.field;
    let kappa_pred = WETTED_001.params.kappa;
    let mut failures: Vec<String> = Vec::new();

    // Fitted curvature of each chamber-wet arc within 10% of the predicted
    // shared curvature.
    let mut kappas = Vec::new();
    for l in 1..=3u8 {
        let (k, _) = measure_curvature(field, l, WET, Point2::new(0.0, 0.0), 0.45)
            .expect("curvature fit");
        kappas.push(k);
        if (k - kappa_pred).abs() / kappa_pred > 0.10 {
            failures.push(format!(
                "chamber {l} curvature {k:.3} outside 10% of {kappa_pred:.3}"
            ));
        }
    }

    // Exactly three cusps.
    let cusps = count_cusps(field, 3);
    if cusps != 3 {
        failures.push(format!("cusp count {cusps} != 3"));
    }

    // Chamber convexity: hull excess within 2 cell areas.
    let conv = check_convexity(&CheckSource::Field(field), 3);
    let excess_cells = conv.measured.get(1).copied().unwrap_or(f64::NAN);
    if conv.status != CheckStatus::Pass {
        failures.push(format!("chamber hull excess {excess_cells:.0} cells > 2"));
    }

    // Hausdorff distance to the constructed wetted cluster, chambers and
    // wet region, within 4 cells.
    let praster = rasterize_cluster(&WETTED_001.cluster, RES);
    let mut worst_chamber = 0.0f64;
    for l in 1..=3u8 {
        if let Some(h) = hausdorff(field, &praster, l) {
            worst_chamber = worst_chamber.max(h);
        }
    }
    let wet_h = hausdorff(field, &praster, WET).unwrap_or(f64::INFINITY);
    if worst_chamber > 4.0 * CELL + 1e-12 {
        failures.push(format!(
            "chamber Hausdorff {:.1} cells > 4",
            worst_chamber / CELL
        ));
    }
    if wet_h > 4.0 * CELL + 1e-12 {
        failures.push(format!("wet Hausdorff {:.1} cells > 4", wet_h / CELL));
    }

    let pass = failures.is_empty();
    println!(
        "acceptance 5 (structure checks): {} - kappas {:?} vs {kappa_pred:.3}, cusps {cusps}, \
         hull excess {excess_cells:.0} cells, Hausdorff chambers {:.1} / wet {:.1} cells{}",
        if pass { "PASS" } else { "FAIL" },
        kappas.iter().map(|k| format!("{k:.2}")).collect::<Vec<_>>(),
        worst_chamber / CELL,
        wet_h / CELL,
        if pass { String::new() } else { format!("; failures: {}", failures.join("; ")) },
    );
    assert!(
        pass,
        "structure checks failed: {}. The curvature and hull-excess tolerances demand sub-cell \
         boundary regularity that annealed fields cannot reach at this resolution: states within \
         one energy tick of the optimum differ by several cells of boundary wobble. The same \
         checks pass at machine precision on the constructed cluster (see the verify module \
         tests) and on the rasterized construction, which bounds the defect to the lattice tier.",
        failures.join("; ")
    );
}

#[test]
fn acceptance_6_convergence_sweep() {
    let runs = [
        (0.04, &*ORACLE_Y_040),
        (0.02, &*ORACLE_Y_020),
        (0.01, &*ORACLE_Y_010),
        (0.005, &*ORACLE_Y_005),
    ];
    let dry_raster = rasterize_cluster(&DRY_Y.best.to_cluster(&y_trace()), RES);
    let sigma = DRY_Y.best.triple_junctions();
    let mut points = Vec::new();
    for (delta, run) in &runs {
        let mut chamber = 0.0f64;
        for l in 1..=3u8 {
            if let Some(h) = hausdorff(&run.result.field, &dry_raster, l) {
                chamber = chamber.max(h);
            }
        }
        let g_sigma =
            hausdorff_to_points(&run.result.field, WET, &sigma).unwrap_or(f64::INFINITY);
        points.push(SweepPoint {
            delta: *delta,
            chamber_hausdorff: chamber,
            g_sigma_hausdorff: g_sigma,
            energy: run.result.energy,
        });
    }
    let entry = convergence_sweep(&points, CELL);
    // The dry run bounds the sweep from above: minimum energy decreases
    // in the wet budget.
    let dry_bound_ok =
        points.iter().all(|p| p.energy <= ORACLE_Y_DRY.result.energy + CELL);
    let pass = entry.status == CheckStatus::Pass && dry_bound_ok;
    println!(
        "acceptance 6 (convergence sweep): {} - slopes chamber {:.3} / wet {:.3}, energies {:?}, \
         note: {}",
        if pass { "PASS" } else { "FAIL" },
        entry.measured.first().unwrap_or(&f64::NAN),
        entry.measured.get(1).unwrap_or(&f64::NAN),
        points.iter().map(|p| format!("{:.4}", p.energy)).collect::<Vec<_>>(),
        entry.note,
    );
    assert!(pass, "{entry:?}, dry bound ok: {dry_bound_ok}");
}

#[test]
fn acceptance_7_rearrangement_property_suites() {
    let started = Instant::now();
    let mut state = 0xDEADBEEFu64;
    let mut rnd = move || {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    };

    // Column rearrangement: area exact, perimeter never up, strictly down
    // whenever some column splits into several runs.
    for case in 0..1000 {
        let nx = 12 + case % 9;
        let ny = 14;
        let mut g = GridSet::empty(Point2::new(0.0, 0.0), 1.0, nx, ny);
        for ix in 0..nx {
            g.set(ix, 0, true);
            for iy in 1..ny - 1 {
                g.set(ix, iy, rnd() < 0.45);
            }
        }
        let w = WindowRect::full(&g);
        let out = hypograph_symmetrize(&g, w).expect("admissible raster");
        assert_eq!(out.cell_count(), g.cell_count(), "case {case}: area changed");
        let before = crofton_perimeter_mask(&g, Stencil::Sixteen);
        let after = crofton_perimeter_mask(&out, Stencil::Sixteen);
        assert!(after <= before + 1e-9, "case {case}: perimeter increased");
        let non_interval = (0..nx).any(|ix| {
            let col: Vec<bool> = (0..ny).map(|iy| g.get(ix, iy)).collect();
            wetcluster::geom::runs(&col).len() > 1
        });
        if non_interval {
            assert!(after < before - 1e-9, "case {case}: no strict decrease");
        }
    }
    // Convex clipping: perimeter never up; equality exactly when nothing
    // is clipped. Half the cases on polygons, half on rasters.
    for case in 0..500 {
        let n = 5 + (case % 9);
        let poly = Polygon::new(
            (0..n)
                .map(|i| {
                    Point2::from_angle(i as f64 / n as f64 * TAU).scale(0.2 + 0.8 * rnd())
                })
                .collect(),
        );
        let clip = Polygon::new(vec![
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ]);
        let (_, rep) = convex_clip_polygon(&poly, &clip).expect("clip");
        assert!(rep.perimeter_after <= rep.perimeter_before + 1e-9, "case {case}");
        if rep.removed < 1e-9 {
            assert!(
                (rep.perimeter_after - rep.perimeter_before).abs() < 1e-9,
                "case {case}: clipped nothing but perimeter changed"
            );
        } else {
            assert!(rep.strict, "case {case}: clipped {} but equal perimeter", rep.removed);
        }
    }
    for case in 0..500 {
        let mut g = GridSet::empty(Point2::new(-1.0, -1.0), 0.03125, 64, 64);
        let blobs = 1 + case % 3;
        let centers: Vec<(Point2, f64)> = (0..blobs)
            .map(|_| {
                (Point2::new(rnd() * 1.2 - 0.6, rnd() * 1.2 - 0.6), 0.15 + 0.35 * rnd())
            })
            .collect();
        g.fill_where(|p| centers.iter().any(|(c, r)| p.dist(*c) < *r));
        if g.cell_count() == 0 {
            continue;
        }
        let half = 0.9 * rnd() - 0.2;
        let clip = Polygon::new(vec![
            Point2::new(-2.0, -2.0),
            Point2::new(2.0, -2.0),
            Point2::new(2.0, half),
            Point2::new(-2.0, half),
        ]);
        let (out, rep) = convex_clip_grid(&g, &clip).expect("grid clip");
        assert!(rep.perimeter_after <= rep.perimeter_before + 1e-9, "case {case}");
        if rep.removed < 1e-12 {
            assert_eq!(out.cell_count(), g.cell_count());
            assert!((rep.perimeter_after - rep.perimeter_before).abs() < 1e-12);
        }
    }
    // Containment repair: segment cells end up owned by their chamber,
    // cell-exactly, and the energy never rises beyond one cell-length.
    let w2 = Weights::equal(2);
    for case in 0..1000 {
        let sep = 0.6 + 2.0 * rnd();
        let start = rnd() * TAU;
        let trace = BoundaryTrace::new(vec![
            Jump { angle: 0.0, label: 1 },
            Jump { angle: sep.min(TAU - 0.6), label: 2 },
        ])
        .rotated(start);
        let mut f = LabelField::ball_grid(64);
        for i in 0..f.labels.len() {
            if f.mask[i] {
                f.labels[i] = 1 + (rnd() < 0.5) as u8;
            }
        }
        let before = lattice_energy(&f, &w2, Stencil::Sixteen);
        let repaired = repair_containment(&f, &trace);
        let after = lattice_energy(&repaired, &w2, Stencil::Sixteen);
        assert!(
            after <= before + f.cell,
            "case {case}: energy rose {before} -> {after}"
        );
        // Cell-exact containment of each segment.
        for (a, b, label) in trace.arcs() {
            let pa = Point2::from_angle(a);
            let pb = Point2::from_angle(b);
            let chord = pb.sub(pa);
            let side = chord.cross(Point2::from_angle((a + b) / 2.0).sub(pa)).signum();
            for i in 0..repaired.labels.len() {
                if !repaired.mask[i] {
                    continue;
                }
                let q = repaired.center_of(i);
                if chord.cross(q.sub(pa)).signum() == side {
                    assert_eq!(repaired.labels[i], label as u8, "case {case}");
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = elapsed < 30.0;
    println!(
        "acceptance 7 (rearrangement property suites): {} - 1000+1000+1000 seeded cases in {elapsed:.1}s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "suites took {elapsed}s");
}

#[test]
fn acceptance_8_monotonicity_diagnostic() {
    let w3 = Weights::equal(3);
    let (lambda_256, entry_256) = monotonicity_diagnostic(
        &ORACLE_Y_010.result.field,
        &w3,
        Stencil::Sixteen,
        20,
        0.3,
    );
    let (lambda_128, entry_128) = monotonicity_diagnostic(
        &ORACLE_Y_010_R128.result.field,
        &w3,
        Stencil::Sixteen,
        20,
        0.3,
    );
    let bounded = lambda_256 <= (2.0 * lambda_128).max(1.0);
    let pass = entry_256.status == CheckStatus::Pass
        && entry_128.status == CheckStatus::Pass
        && bounded;
    println!(
        "acceptance 8 (monotonicity diagnostic): {} - lambda 256 = {lambda_256:.3}, lambda 128 = \
         {lambda_128:.3}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "lambda256 {lambda_256}, lambda128 {lambda_128}");
}

#[test]
fn acceptance_saturation_and_validation_extras() {
    // Saturation checks ride on the shared runs: the wetted instance uses
    // its whole budget, the chord instance stays dry.
    let sat = check_saturation(&ORACLE_Y_010.result.field, 0.01, true);
    let dry_sat = check_saturation(&ORACLE_CHORD_010.result.field, 0.01, false);
    // The constructed wetted cluster validates against its instance.
    let report =
        wetcluster::cluster::validate_cluster(&WETTED_001.cluster, &y_spec(0.01)).unwrap();
    let pass = sat.status == CheckStatus::Pass
        && dry_sat.status == CheckStatus::Pass
        && report.all_ok()
        && (report.wet_area - 0.01).abs() < 1e-10;
    println!(
        "acceptance extras (saturation + admissibility): {} - wet area {:.6}, chord wet {:.6}, \
         constructed |G| = {:.10}",
        if pass { "PASS" } else { "FAIL" },
        ORACLE_Y_010.result.field.wet_area(),
        ORACLE_CHORD_010.result.field.wet_area(),
        report.wet_area,
    );
    assert!(pass);
}

#[test]
fn acceptance_enumeration_oracle_counts() {
    // Frozen exhaustive counts for small jump patterns.
    let two = enumerate_topologies(&chord_trace(), 4).unwrap();
    let three = enumerate_topologies(&y_trace(), 4).unwrap();
    let four_alt = enumerate_topologies(
        &BoundaryTrace::new(vec![
            Jump { angle: 0.0, label: 1 },
            Jump { angle: PI / 2.0, label: 2 },
            Jump { angle: PI, label: 1 },
            Jump { angle: 3.0 * PI / 2.0, label: 2 },
        ]),
        4,
    )
    .unwrap();
    let pass = two.len() == 1 && three.len() == 4 && four_alt.len() == 2;
    println!(
        "acceptance extras (topology enumeration): {} - counts {}/{}/{}",
        if pass { "PASS" } else { "FAIL" },
        two.len(),
        three.len(),
        four_alt.len()
    );
    assert!(pass);
}

#[test]
fn acceptance_wetted_cluster_passes_exact_tier() {
    // The arc-level tier of every structure check passes at machine
    // tolerance on the constructed cluster.
    let w3 = Weights::equal(3);
    let cur = wetcluster::verify::check_curvature_condition(
        &CheckSource::Cluster(&WETTED_001.cluster),
        &w3,
    );
    let tan = wetcluster::verify::check_cusp_tangency(&WETTED_001.cluster);
    let conv = check_convexity(&CheckSource::Cluster(&WETTED_001.cluster), 3);
    // The lattice tier of the curvature condition passes on the exact
    // construction's raster, bounding the check itself.
    let praster = rasterize_cluster(&WETTED_001.cluster, RES);
    let cur_raster =
        wetcluster::verify::check_curvature_condition(&CheckSource::Field(&praster), &w3);
    let pass = cur.status == CheckStatus::Pass
        && tan.status == CheckStatus::Pass
        && conv.status == CheckStatus::Pass
        && cur_raster.status == CheckStatus::Pass;
    println!(
        "acceptance extras (exact-tier structure checks): {} - curvature {:?}, tangency {:?}, \
         convexity {:?}, raster curvature {:?}",
        if pass { "PASS" } else { "FAIL" },
        cur.status,
        tan.status,
        conv.status,
        cur_raster.status
    );
    assert!(pass);
}
