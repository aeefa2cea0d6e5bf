//! Constructs the predicted small-`delta` minimizer from a dry one by
//! replacing each triple junction with a wetted configuration: a
//! curvilinear triangle of three mutually tangent arcs at interior
//! junctions, and a tangent disk touching the circle at boundary-pinned
//! junctions. All wet boundary arcs share a single curvature, calibrated
//! so the total wet area is exactly `delta`.

use crate::cluster::{
    ArcCluster, BoundaryTrace, Interface, Junction, JunctionKind, RegionLabel, Weights,
};
use crate::dry::{EndRef, JunctionNetwork};
use crate::geom::{
    curvilinear_triangle, ArcChain, CircArc, Point2, CURVILINEAR_TRIANGLE_AREA, PI, TAU,
};
use crate::{Error, Result};

/// Calibrated wetting geometry shared by all junction pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct WettingParams {
    /// Arc radius; every wet boundary arc has curvature `1/r`.
    pub r: f64,
    pub kappa: f64,
    /// Wet area placed at each junction (triangle or disk).
    pub per_junction_area: Vec<f64>,
    /// Total wet area, equal to the requested budget after calibration.
    pub total_area: f64,
    /// Set when the dry network has no triple junctions: there is nothing
    /// to wet and the minimizer keeps its dry shape.
    pub nothing_to_wet: bool,
}

/// Ratio of the boundary-length change of one third of a wetted interior
/// junction to the square root of its area: each of the three congruent
/// pieces trades two straight spokes for one arc, changing the length by
/// this (negative) constant times `sqrt(piece area)`.
pub fn length_deficit_constant() -> f64 {
    let sqrt3 = 3.0_f64.sqrt();
    (PI / 3.0 - 2.0 / sqrt3) / (CURVILINEAR_TRIANGLE_AREA / 3.0).sqrt()
}

/// Energy change of wetting one interior junction at radius `r` with equal
/// unit weights: three spokes of length `r/sqrt(3)` at pair cost 2 are
/// replaced by three arcs of length `pi r / 3` at cost 1.
pub fn interior_energy_delta(r: f64) -> f64 {
    (PI - 2.0 * 3.0_f64.sqrt()) * r
}

/// One wetted junction: tagged boundary arcs, cusp points on the retained
/// segments, and the boundary corner for disk pieces.
#[derive(Debug, Clone)]
pub struct WetPiece {
    /// Wet boundary arcs, counterclockwise around the piece, each tagged
    /// with the chamber on its outside.
    pub arcs: Vec<(CircArc, usize)>,
    /// Cusp points, paired with the incident edge of the dry topology.
    pub cusps: Vec<(Point2, Option<usize>)>,
    /// Corner point on the unit circle (boundary pieces only).
    pub corner: Option<Point2>,
    pub area: f64,
    /// Per-edge replacement endpoints: the retained segment of edge `e`
    /// now terminates at this point instead of the junction.
    pub segment_cuts: Vec<(usize, Point2)>,
    pub energy_delta: f64,
}

/// Calibrates the shared arc radius so the junction pieces of `dry` hold
/// exactly `delta` of wet area: interior pieces contribute
/// `(sqrt(3)-pi/2) r^2`, boundary disks `pi r^2`. Solved by bisection on
/// `r` to machine tolerance.
pub fn calibrate_radius(dry: &JunctionNetwork, delta: f64) -> Result<WettingParams> {
    if delta < 0.0 {
        return Err(Error::InvalidInstance(format!("negative delta {delta}")));
    }
    let n_int = dry.topology.junctions.iter().filter(|j| j.pinned.is_none()).count();
    let n_bd = dry.topology.junctions.len() - n_int;
    if dry.topology.junctions.is_empty() || delta == 0.0 {
        return Ok(WettingParams {
            r: 0.0,
            kappa: 0.0,
            per_junction_area: vec![0.0; dry.topology.junctions.len()],
            total_area: 0.0,
            nothing_to_wet: dry.topology.junctions.is_empty(),
        });
    }
    let coeff = |r: f64| -> f64 {
        n_int as f64 * CURVILINEAR_TRIANGLE_AREA * r * r + n_bd as f64 * PI * r * r
    };
    let (mut lo, mut hi) = (0.0, 2.0);
    while coeff(hi) < delta {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Solver("wet-area calibration diverged".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if coeff(mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let per: Vec<f64> = dry
        .topology
        .junctions
        .iter()
        .map(|j| {
            if j.pinned.is_none() {
                CURVILINEAR_TRIANGLE_AREA * r * r
            } else {
                PI * r * r
            }
        })
        .collect();
    Ok(WettingParams {
        r,
        kappa: 1.0 / r,
        total_area: per.iter().sum(),
        per_junction_area: per,
        nothing_to_wet: false,
    })
}

/// Wets one interior triple junction: a curvilinear triangle centered at
/// the junction, rotated so its cusps sit on the three incident segments
/// at distance `r/sqrt(3)`, tangent to them by construction.
///
/// `spokes` are `(edge id, outward unit direction, wedge chamber)` triples
/// in counterclockwise order; the wedge chamber sits between this spoke
/// and the next. Requires the 120-degree equal-weights geometry.
pub fn wet_interior_junction(
    center: Point2,
    spokes: &[(usize, Point2, usize); 3],
    r: f64,
    min_incident_len: f64,
) -> Result<WetPiece> {
    if r < 0.0 {
        return Err(Error::InvalidInstance(format!("negative radius {r}")));
    }
    if r > 0.5 * min_incident_len {
        return Err(Error::Infeasible(format!(
            "wet radius {r} exceeds half the shortest incident segment {min_incident_len}"
        )));
    }
    for k in 0..3 {
        let a = spokes[k].1.angle();
        let b = spokes[(k + 1) % 3].1.angle();
        let sep = (b - a).rem_euclid(TAU);
        if (sep - 2.0 * PI / 3.0).abs() > 1e-6 {
            return Err(Error::Hypothesis(format!(
                "incident segments are {sep} rad apart, not 2pi/3 (equal weights required)"
            )));
        }
    }
    if r == 0.0 {
        return Ok(WetPiece {
            arcs: vec![],
            cusps: spokes.iter().map(|&(e, _, _)| (center, Some(e))).collect(),
            corner: None,
            area: 0.0,
            segment_cuts: spokes.iter().map(|&(e, _, _)| (e, center)).collect(),
            energy_delta: 0.0,
        });
    }
    let tri = curvilinear_triangle(r)?;
    // Canonical cusp 0 points at 30 degrees; rotate it onto spoke 0.
    let rot = spokes[0].1.angle() - PI / 6.0;
    let place = |p: Point2| p.rotated(rot).add(center);
    let cusps: Vec<Point2> = tri.cusps.iter().map(|&p| place(p)).collect();
    let arcs: Vec<(CircArc, usize)> = tri
        .chain
        .arcs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            // Arc k runs from cusp k to cusp k+1 and faces the wedge
            // between spoke k and spoke k+1.
            (CircArc::new(place(a.start), place(a.end), a.kappa), spokes[k].2)
        })
        .collect();
    Ok(WetPiece {
        arcs,
        cusps: cusps.iter().zip(spokes).map(|(&c, &(e, _, _))| (c, Some(e))).collect(),
        corner: None,
        area: tri.area,
        segment_cuts: cusps.iter().zip(spokes).map(|(&c, &(e, _, _))| (e, c)).collect(),
        energy_delta: interior_energy_delta(r),
    })
}

/// Wets a boundary junction pinned at jump point `x`: a disk of the shared
/// curvature internally tangent to the unit circle at `x`, with every
/// retained segment re-anchored from its far endpoint tangentially to the
/// disk (the tangency points are the interior cusps). The circle through
/// `x` splits into arcs at the cusps; `before`/`after` are the trace
/// chambers on the clockwise/counterclockwise sides of `x`.
///
/// `anchors` are `(edge id, far endpoint, pair cost)` for each incident
/// segment, ordered counterclockwise around `x` starting from the `after`
/// side; `wedges` are the chamber labels between consecutive anchors.
pub fn wet_boundary_junction(
    x: Point2,
    anchors: &[(usize, Point2, f64)],
    after: usize,
    before: usize,
    wedges: &[usize],
    area_target: f64,
    w: &Weights,
) -> Result<WetPiece> {
    if !w.is_equal() {
        return Err(Error::Hypothesis(
            "boundary wetting requires equal weights (single shared curvature)".into(),
        ));
    }
    if (x.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInstance("boundary junction is not on the circle".into()));
    }
    if area_target == 0.0 {
        return Ok(WetPiece {
            arcs: vec![],
            cusps: vec![],
            corner: Some(x),
            area: 0.0,
            segment_cuts: anchors.iter().map(|&(e, _, _)| (e, x)).collect(),
            energy_delta: 0.0,
        });
    }
    if wedges.len() + 1 != anchors.len().max(1) && !anchors.is_empty() {
        return Err(Error::InvalidInstance("one wedge label between consecutive anchors".into()));
    }
    // Bisection on the radius; the enclosed area is measured by the arc
    // chain itself rather than trusting pi r^2.
    let piece_area = |rr: f64| -> Result<f64> {
        let o = x.scale(1.0 - rr);
        let chain = split_circle(o, rr, &[x, x.scale(1.0 - 2.0 * rr)]);
        ArcChain::closed(chain).signed_area().map(f64::abs)
    };
    let (mut lo, mut hi) = (1e-12, 0.499);
    if piece_area(hi)? < area_target {
        return Err(Error::Infeasible("boundary wet piece does not fit in the disk".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if piece_area(mid)? < area_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (piece_area(0.5 * (lo + hi))? - area_target).abs() < 1e-14 {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    let o = x.scale(1.0 - r);

    // Tangency point of the segment re-anchored from each far endpoint.
    let mut cusp_pts: Vec<Point2> = Vec::new();
    let mut cuts = Vec::new();
    let mut removed_cost = 0.0;
    let mut added_segments = 0.0;
    for &(e, q, cost) in anchors {
        let dq = q.sub(o);
        let d = dq.norm();
        if d <= r {
            return Err(Error::Infeasible(
                "segment endpoint inside the boundary wet disk".into(),
            ));
        }
        let gamma = (r / d).acos();
        let beta = dq.angle();
        let p1 = o.add(Point2::from_angle(beta + gamma).scale(r));
        let p2 = o.add(Point2::from_angle(beta - gamma).scale(r));
        // Keep the tangency on the same side as the original segment q-x.
        let side = q.sub(x).cross(o.sub(x));
        let p = if side * q.sub(x).cross(p1.sub(x)) >= 0.0 { p1 } else { p2 };
        cusp_pts.push(p);
        cuts.push((e, p));
        removed_cost += cost * q.dist(x);
        added_segments += cost * q.dist(p);
    }

    // Split the circle at the corner and the cusps, counterclockwise.
    let mut split_at = vec![x];
    split_at.extend(cusp_pts.iter().copied());
    let arcs_raw = split_circle(o, r, &split_at);
    // Tag each arc with the chamber outside it: walk counterclockwise from
    // x; the first sector borders `after`, then the wedge labels, then
    // `before`.
    let mut sector_labels = vec![after];
    sector_labels.extend_from_slice(wedges);
    sector_labels.push(before);
    // Sector of an arc = which pair of consecutive split points it lies in.
    let angle_of = |p: Point2| (p.sub(o).angle() - x.sub(o).angle()).rem_euclid(TAU);
    let mut cusp_angles: Vec<(f64, usize)> =
        cusp_pts.iter().enumerate().map(|(i, &p)| (angle_of(p), i)).collect();
    cusp_angles.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let arcs: Vec<(CircArc, usize)> = arcs_raw
        .into_iter()
        .map(|a| {
            let mid = a.point_at(0.5);
            let am = angle_of(mid);
            let sector = cusp_angles.iter().filter(|&&(ca, _)| ca < am).count();
            let label = sector_labels[sector.min(sector_labels.len() - 1)];
            (a, label)
        })
        .collect();
    let area = piece_area(r)?;
    // Arcs cost their length (chamber weight 1, wet side free).
    let added_arcs: f64 = arcs.iter().map(|(a, _)| a.length()).sum();
    Ok(WetPiece {
        arcs,
        cusps: cusp_pts
            .iter()
            .zip(anchors)
            .map(|(&p, &(e, _, _))| (p, Some(e)))
            .collect(),
        corner: Some(x),
        area,
        segment_cuts: cuts,
        energy_delta: added_arcs + added_segments - removed_cost,
    })
}

/// Counterclockwise arcs of the circle `(o, r)` split at the given points
/// (each assumed on the circle); arcs longer than a half turn are halved
/// so every piece subtends at most pi.
fn split_circle(o: Point2, r: f64, points: &[Point2]) -> Vec<CircArc> {
    let mut angles: Vec<f64> = points.iter().map(|p| p.sub(o).angle()).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let kappa = 1.0 / r;
    let mut arcs = Vec::new();
    let n = angles.len();
    for i in 0..n {
        let a0 = angles[i];
        let mut a1 = angles[(i + 1) % n];
        if n == 1 {
            a1 = a0 + TAU;
        } else if a1 <= a0 {
            a1 += TAU;
        }
        let sweep = a1 - a0;
        let parts = if sweep > PI { 2 } else { 1 };
        for k in 0..parts {
            let s = a0 + sweep * k as f64 / parts as f64;
            let e = a0 + sweep * (k + 1) as f64 / parts as f64;
            arcs.push(CircArc::new(
                o.add(Point2::from_angle(s).scale(r)),
                o.add(Point2::from_angle(e).scale(r)),
                kappa,
            ));
        }
    }
    arcs
}

/// A dry network together with its wetted junction pieces and the
/// assembled arc cluster.
#[derive(Debug, Clone)]
pub struct WettedCluster {
    pub base: JunctionNetwork,
    pub params: WettingParams,
    pub pieces: Vec<WetPiece>,
    pub cluster: ArcCluster,
    pub predicted_energy: f64,
}

/// Builds the predicted wetted minimizer for a small wet-area budget:
/// calibrates the shared curvature, wets every triple junction, truncates
/// the dry segments at the cusps, and assembles the tagged cluster.
pub fn build_wetted(
    dry: &JunctionNetwork,
    trace: &BoundaryTrace,
    w: &Weights,
    delta: f64,
) -> Result<WettedCluster> {
    if !w.is_equal() {
        return Err(Error::Hypothesis("wetting construction requires equal weights".into()));
    }
    let jp = trace.jump_points();
    let params = calibrate_radius(dry, delta)?;
    if params.nothing_to_wet || delta == 0.0 {
        return Ok(WettedCluster {
            base: dry.clone(),
            params,
            pieces: vec![],
            cluster: dry.to_cluster(trace),
            predicted_energy: dry.energy,
        });
    }
    let r = params.r;
    // Incident segment lengths per junction for the feasibility guard.
    let seg_len = |e: usize| -> f64 {
        let edge = &dry.topology.edges[e];
        dry.endpoint(edge.a, &jp).dist(dry.endpoint(edge.b, &jp))
    };
    let mut pieces = Vec::new();
    for (j, junc) in dry.topology.junctions.iter().enumerate() {
        let active: Vec<usize> =
            junc.edges.iter().copied().filter(|&e| dry.topology.edges[e].active).collect();
        let min_len = active.iter().map(|&e| seg_len(e)).fold(f64::INFINITY, f64::min);
        if r > 0.5 * min_len {
            return Err(Error::Infeasible(format!(
                "delta {delta} too large: wet radius {r} exceeds half the shortest segment \
                 at junction {j}"
            )));
        }
        match junc.pinned {
            None => {
                // Counterclockwise spokes with their wedge chambers.
                let mut spokes: Vec<(usize, Point2, usize)> = Vec::with_capacity(3);
                for &e in &junc.edges {
                    let edge = &dry.topology.edges[e];
                    let o = if edge.a == EndRef::Junction(j) { edge.b } else { edge.a };
                    let dir = dry.endpoint(o, &jp).sub(dry.positions[j]).normalized();
                    // Wedge between this spoke and the counterclockwise-next
                    // one: left of the edge when oriented outward.
                    let outward = edge.a == EndRef::Junction(j);
                    let wedge = if outward { edge.left } else { edge.right };
                    spokes.push((e, dir, wedge));
                }
                spokes.sort_by(|a, b| a.1.angle().partial_cmp(&b.1.angle()).unwrap());
                let arr: [(usize, Point2, usize); 3] =
                    [spokes[0], spokes[1], spokes[2]];
                pieces.push(wet_interior_junction(dry.positions[j], &arr, r, min_len)?);
            }
            Some(t) => {
                let x = jp[t];
                // Anchors counterclockwise from the after-side of x.
                let mut anchors: Vec<(usize, Point2, f64)> = active
                    .iter()
                    .map(|&e| {
                        let edge = &dry.topology.edges[e];
                        let o = if edge.a == EndRef::Junction(j) { edge.b } else { edge.a };
                        (e, dry.endpoint(o, &jp), w.0[edge.left] + w.0[edge.right])
                    })
                    .collect();
                let tangent_ccw = Point2::new(-x.y, x.x);
                anchors.sort_by(|a, b| {
                    let aa = (a.1.sub(x).angle() - tangent_ccw.angle()).rem_euclid(TAU);
                    let bb = (b.1.sub(x).angle() - tangent_ccw.angle()).rem_euclid(TAU);
                    aa.partial_cmp(&bb).unwrap()
                });
                // Chamber labels: after the jump, wedges between segments,
                // before the jump.
                let after = trace.label_at(x.angle() + 1e-9);
                let before = trace.label_at(x.angle() - 1e-9);
                let wedges: Vec<usize> = anchors
                    .windows(2)
                    .map(|pair| {
                        let e = pair[0].0;
                        let edge = &dry.topology.edges[e];
                        // Wedge counterclockwise of this anchor: right of
                        // the edge when oriented outward from the junction.
                        if edge.a == EndRef::Junction(j) {
                            edge.right
                        } else {
                            edge.left
                        }
                    })
                    .collect();
                let target = params.per_junction_area[j];
                pieces.push(wet_boundary_junction(
                    x, &anchors, after, before, &wedges, target, w,
                )?);
            }
        }
    }
    // Wet pieces must stay pairwise disjoint.
    for (i, a) in pieces.iter().enumerate() {
        for b in pieces.iter().skip(i + 1) {
            for (aa, _) in &a.arcs {
                for (bb, _) in &b.arcs {
                    if aa.point_at(0.5).dist(bb.point_at(0.5)) < 2.0 * r {
                        let d = min_arc_dist(aa, bb);
                        if d < 1e-9 {
                            return Err(Error::Infeasible(
                                "wet pieces collide; reduce delta".into(),
                            ));
                        }
                    }
                }
            }
        }
    }

    // Assemble: truncated dry segments plus wet arcs.
    let mut cuts: Vec<Vec<(usize, Point2)>> = vec![vec![]; dry.topology.edges.len()];
    for (pi, piece) in pieces.iter().enumerate() {
        for &(e, p) in &piece.segment_cuts {
            cuts[e].push((pi, p));
        }
    }
    let mut interfaces: Vec<Interface> = Vec::new();
    let mut junctions: Vec<Junction> = Vec::new();
    let mut edge_itf = vec![usize::MAX; dry.topology.edges.len()];
    for (e, edge) in dry.topology.active_edges() {
        let mut a = dry.endpoint(edge.a, &jp);
        let mut b = dry.endpoint(edge.b, &jp);
        for &(_, p) in &cuts[e] {
            // Replace whichever endpoint is nearer to the cut.
            if p.dist(a) < p.dist(b) {
                a = p;
            } else {
                b = p;
            }
        }
        if a.dist(b) < 1e-12 {
            continue; // segment fully absorbed
        }
        edge_itf[e] = interfaces.len();
        interfaces.push(Interface {
            arcs: vec![CircArc::segment(a, b)],
            left: RegionLabel::Chamber(edge.left),
            right: RegionLabel::Chamber(edge.right),
        });
    }
    for piece in &pieces {
        let first_arc_itf = interfaces.len();
        for (arc, chamber) in &piece.arcs {
            interfaces.push(Interface {
                arcs: vec![*arc],
                left: RegionLabel::Wet,
                right: RegionLabel::Chamber(*chamber),
            });
        }
        for &(p, e) in &piece.cusps {
            let mut incident: Vec<usize> = (first_arc_itf..interfaces.len())
                .filter(|&k| {
                    interfaces[k].start().dist(p) < 1e-9 || interfaces[k].end().dist(p) < 1e-9
                })
                .collect();
            if let Some(e) = e {
                if edge_itf[e] != usize::MAX {
                    incident.push(edge_itf[e]);
                }
            }
            junctions.push(Junction { point: p, kind: JunctionKind::InteriorCusp, interfaces: incident });
        }
        if let Some(c) = piece.corner {
            let incident: Vec<usize> = (first_arc_itf..interfaces.len())
                .filter(|&k| {
                    interfaces[k].start().dist(c) < 1e-9 || interfaces[k].end().dist(c) < 1e-9
                })
                .collect();
            junctions.push(Junction {
                point: c,
                kind: JunctionKind::BoundaryCorner,
                interfaces: incident,
            });
        }
    }
    // Boundary attachment points of untouched segments.
    for (t, p) in jp.iter().enumerate() {
        let incident: Vec<usize> = dry
            .topology
            .active_edges()
            .filter(|(_, e)| e.a == EndRef::Jump(t) || e.b == EndRef::Jump(t))
            .filter_map(|(e, _)| (edge_itf[e] != usize::MAX).then_some(edge_itf[e]))
            .collect();
        let pinned_here = dry.topology.junctions.iter().any(|jn| jn.pinned == Some(t));
        if !incident.is_empty() && !pinned_here {
            junctions.push(Junction {
                point: *p,
                kind: JunctionKind::BoundaryJump,
                interfaces: incident,
            });
        }
    }
    let background = RegionLabel::Chamber(trace.label_at(0.0));
    let cluster = ArcCluster { interfaces, junctions, background };
    let predicted_energy = dry.energy + pieces.iter().map(|p| p.energy_delta).sum::<f64>();
    Ok(WettedCluster { base: dry.clone(), params, pieces, cluster, predicted_energy })
}

fn min_arc_dist(a: &CircArc, b: &CircArc) -> f64 {
    let mut d = f64::INFINITY;
    for k in 0..=16 {
        let p = a.point_at(k as f64 / 16.0);
        d = d.min(b.distance_to(p));
    }
    d
}
