//! Structure checks on computed minimizers: equal weighted curvature along
//! wet boundaries, cusp tangency, chamber convexity, wet-area saturation,
//! and the small-budget convergence sweep. Arc-level inputs are checked at
//! machine tolerance, lattice inputs at raster tolerance; no check mixes
//! the two tiers.

use crate::cluster::{ArcCluster, JunctionKind, RegionLabel, Weights};
use crate::geom::{Point2, PI, TAU};
use crate::lattice::{measure_curvature, LabelField, Stencil, WET};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One named check with its measured values and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    /// The mathematical statement being verified.
    pub criterion: String,
    pub status: CheckStatus,
    pub measured: Vec<f64>,
    pub tolerance: f64,
    pub note: String,
    /// Window `(x, y, radius)` the measurement came from, when localized.
    pub evidence: Option<(f64, f64, f64)>,
}

impl CheckEntry {
    fn pass(mut self, ok: bool) -> Self {
        self.status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self
    }
}

/// A bundle of check entries with JSON and text renderings.
#[derive(Debug, Clone, Serialize, Default)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn push(&mut self, e: CheckEntry) {
        self.entries.push(e);
    }

    /// True when no non-skipped check failed.
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {:<8} {:<12} {}\n",
            "check", "status", "tolerance", "measured / note"
        ));
        for e in &self.entries {
            let status = match e.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skipped",
            };
            let measured = e
                .measured
                .iter()
                .map(|v| format!("{v:.6}"))
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!(
                "{:<28} {:<8} {:<12.2e} [{}] {}\n",
                e.name, status, e.tolerance, measured, e.note
            ));
        }
        out
    }
}

/// Input to a check: exact arc cluster or rasterized field.
pub enum CheckSource<'a> {
    Cluster(&'a ArcCluster),
    Field(&'a LabelField),
}

// ---------------------------------------------------------------------------
// Curvature condition
// ---------------------------------------------------------------------------

/// Equal weighted curvature along chamber-wet interfaces: the spread of
/// `c_l * kappa_l` across chambers stays within tolerance (exact 1e-9 for
/// arc clusters, 10% relative for lattice fields).
pub fn check_curvature_condition(src: &CheckSource, w: &Weights) -> CheckEntry {
    let base = CheckEntry {
        name: "curvature-condition".into(),
        criterion: "weighted curvature c_l * kappa_l equal across all chamber-wet interfaces"
            .into(),
        status: CheckStatus::Skipped,
        measured: vec![],
        tolerance: 0.0,
        note: String::new(),
        evidence: None,
    };
    match src {
        CheckSource::Cluster(c) => {
            let mut weighted: Vec<f64> = Vec::new();
            for itf in c.interfaces.iter().filter(|i| i.is_wet()) {
                let chamber = match (itf.left, itf.right) {
                    (RegionLabel::Chamber(l), _) => l,
                    (_, RegionLabel::Chamber(l)) => l,
                    _ => continue,
                };
                for a in &itf.arcs {
                    weighted.push(w.0[chamber] * a.kappa.abs());
                }
            }
            if weighted.is_empty() {
                return CheckEntry {
                    note: "no wet interfaces; check skipped".into(),
                    ..base
                };
            }
            let max = weighted.iter().cloned().fold(f64::MIN, f64::max);
            let min = weighted.iter().cloned().fold(f64::MAX, f64::min);
            let spread = max - min;
            CheckEntry {
                measured: vec![min, max, spread],
                tolerance: 1e-9,
                note: format!("{} wet arcs", weighted.len()),
                ..base
            }
            .pass(spread <= 1e-9)
        }
        CheckSource::Field(f) => {
            let comps = wet_components(f);
            if comps.is_empty() {
                return CheckEntry { note: "wet region empty; check skipped".into(), ..base };
            }
            let mut weighted: Vec<f64> = Vec::new();
            let mut evidence = None;
            for (centroid, radius) in &comps {
                for l in 1..w.0.len() as u8 {
                    if let Ok((kappa, _)) =
                        measure_curvature(f, l, WET, *centroid, radius * 1.8)
                    {
                        if kappa.abs() > 1e-9 {
                            weighted.push(w.0[l as usize] * kappa.abs());
                            evidence = Some((centroid.x, centroid.y, radius * 1.8));
                        }
                    }
                }
            }
            if weighted.is_empty() {
                return CheckEntry {
                    note: "no fittable chamber-wet interfaces".into(),
                    ..base
                };
            }
            let max = weighted.iter().cloned().fold(f64::MIN, f64::max);
            let min = weighted.iter().cloned().fold(f64::MAX, f64::min);
            let rel = (max - min) / max;
            CheckEntry {
                measured: vec![min, max, rel],
                tolerance: 0.10,
                note: format!("{} fitted arcs over {} wet components", weighted.len(), comps.len()),
                evidence,
                ..base
            }
            .pass(rel <= 0.10)
        }
    }
}

/// Connected wet components (8-connected, so thin rasterized cusp tapers
/// stay attached) as `(centroid, bounding radius)`. Fragments too small to
/// carry a fittable arc are dropped.
fn wet_components(f: &LabelField) -> Vec<(Point2, f64)> {
    let mut seen = vec![false; f.labels.len()];
    let mut out = Vec::new();
    for start in 0..f.labels.len() {
        if seen[start] || !f.mask[start] || f.labels[start] != WET {
            continue;
        }
        let mut stack = vec![start];
        let mut cells = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            cells.push(i);
            let (ix, iy) = ((i % f.nx) as i32, (i / f.nx) as i32);
            for dy in -1i32..=1 {
                for dx in -1i32..=1 {
                    let (jx, jy) = (ix + dx, iy + dy);
                    if jx < 0 || jy < 0 || jx >= f.nx as i32 || jy >= f.ny as i32 {
                        continue;
                    }
                    let j = jy as usize * f.nx + jx as usize;
                    if !seen[j] && f.mask[j] && f.labels[j] == WET {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if cells.len() < 16 {
            continue;
        }
        let centroid = cells
            .iter()
            .fold(Point2::new(0.0, 0.0), |s, &i| s.add(f.center_of(i)))
            .scale(1.0 / cells.len() as f64);
        let radius = cells
            .iter()
            .map(|&i| f.center_of(i).dist(centroid))
            .fold(0.0f64, f64::max)
            .max(4.0 * f.cell);
        out.push((centroid, radius));
    }
    out
}

// ---------------------------------------------------------------------------
// Cusp tangency
// ---------------------------------------------------------------------------

/// At every interior cusp the two wet arcs leave in opposite directions and
/// the retained dry segment shares their tangent line. Corner points on the
/// boundary circle are exempt.
pub fn check_cusp_tangency(c: &ArcCluster) -> CheckEntry {
    let mut worst: f64 = 0.0;
    let mut n_cusps = 0;
    let mut note = String::new();
    for j in &c.junctions {
        if j.kind != JunctionKind::InteriorCusp {
            continue;
        }
        n_cusps += 1;
        // Tangent directions (mod pi) of every incident interface at the
        // cusp point.
        let mut dirs: Vec<f64> = Vec::new();
        for &k in &j.interfaces {
            let itf = &c.interfaces[k];
            // Whichever end sits at (or nearest to, for perturbed input)
            // the cusp carries the tangent to compare.
            let t = if itf.start().dist(j.point) <= itf.end().dist(j.point) {
                itf.arcs[0].endpoint_tangent(true)
            } else {
                itf.arcs[itf.arcs.len() - 1].endpoint_tangent(false)
            };
            if let Ok(t) = t {
                dirs.push(t.angle().rem_euclid(PI));
            }
        }
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                let mut d = (dirs[j] - dirs[i]).abs();
                d = d.min(PI - d);
                worst = worst.max(d);
            }
        }
    }
    if n_cusps == 0 {
        note = "no interior cusps".into();
    }
    CheckEntry {
        name: "cusp-tangency".into(),
        criterion: "wet arcs and the retained segment share one tangent line at every interior \
                    cusp"
            .into(),
        status: if n_cusps == 0 { CheckStatus::Skipped } else { CheckStatus::Pass },
        measured: vec![worst],
        tolerance: 1e-8,
        note: if note.is_empty() { format!("{n_cusps} cusps") } else { note },
        evidence: None,
    }
    .pass(n_cusps == 0 || worst <= 1e-8)
}

// ---------------------------------------------------------------------------
// Convexity
// ---------------------------------------------------------------------------

/// Convexity of every chamber component. Arc clusters: boundary walks with
/// the chamber on the left turn left everywhere (exact). Lattice fields:
/// cells inside the convex hull of a component but outside it cover at
/// most 2 cell areas.
pub fn check_convexity(src: &CheckSource, n_chambers: usize) -> CheckEntry {
    let base = CheckEntry {
        name: "chamber-convexity".into(),
        criterion: "every connected component of every chamber is convex".into(),
        status: CheckStatus::Pass,
        measured: vec![],
        tolerance: 0.0,
        note: String::new(),
        evidence: None,
    };
    match src {
        CheckSource::Cluster(c) => match cluster_convexity_worst_turn(c, n_chambers) {
            Ok(worst) => CheckEntry {
                measured: vec![worst],
                tolerance: 1e-9,
                note: "smallest boundary turn (negative = right turn)".into(),
                ..base
            }
            .pass(worst >= -1e-9),
            Err(e) => CheckEntry {
                measured: vec![],
                tolerance: 1e-9,
                note: format!("boundary walk failed: {e}"),
                ..base
            }
            .pass(false),
        },
        CheckSource::Field(f) => {
            let mut worst_excess = 0.0f64;
            for l in 1..=n_chambers as u8 {
                for comp in label_components(f, l) {
                    let excess = hull_excess_cells(f, &comp);
                    worst_excess = worst_excess.max(excess);
                }
            }
            let tol = 2.0 * f.cell_area();
            CheckEntry {
                measured: vec![worst_excess, worst_excess / f.cell_area()],
                tolerance: tol,
                note: "largest hull excess (area, cells)".into(),
                ..base
            }
            .pass(worst_excess <= tol)
        }
    }
}

/// Walks each chamber's boundary loops (chamber on the left, circle gaps
/// closed along the boundary) and returns the most negative vertex turn.
fn cluster_convexity_worst_turn(c: &ArcCluster, n_chambers: usize) -> crate::Result<f64> {
    let mut worst: f64 = f64::INFINITY;
    let mut any = false;
    for l in 1..=n_chambers {
        let label = RegionLabel::Chamber(l);
        // Oriented pieces: chamber on the left.
        #[derive(Clone)]
        struct Piece {
            arcs: Vec<crate::geom::CircArc>,
        }
        let mut pieces: Vec<Piece> = Vec::new();
        for itf in &c.interfaces {
            if itf.left == label {
                pieces.push(Piece { arcs: itf.arcs.clone() });
            } else if itf.right == label {
                pieces.push(Piece {
                    arcs: itf.arcs.iter().rev().map(|a| a.reversed()).collect(),
                });
            }
        }
        if pieces.is_empty() {
            continue;
        }
        any = true;
        let on_circle = |p: Point2| (p.norm() - 1.0).abs() < 1e-7;
        let mut used = vec![false; pieces.len()];
        for s in 0..pieces.len() {
            if used[s] {
                continue;
            }
            // Walk a loop starting from piece s.
            let mut order: Vec<usize> = vec![s];
            used[s] = true;
            let start_pt = pieces[s].arcs[0].start;
            let mut cur = *pieces[s].arcs.last().map(|a| &a.end).unwrap();
            let mut circle_gaps: Vec<(usize, usize)> = Vec::new(); // (after piece idx in order, next piece)
            for _guard in 0..10 * pieces.len() {
                if cur.dist(start_pt) < 1e-9 && order.len() > 1 {
                    break;
                }
                // Exact endpoint continuation.
                if let Some(n) =
                    (0..pieces.len()).find(|&k| !used[k] && pieces[k].arcs[0].start.dist(cur) < 1e-9)
                {
                    used[n] = true;
                    order.push(n);
                    cur = pieces[n].arcs.last().unwrap().end;
                    continue;
                }
                // Gap along the boundary circle: continue counterclockwise
                // to the nearest piece start on the circle (or close the
                // loop at the start point).
                if on_circle(cur) {
                    let cur_ang = cur.angle();
                    let mut best: Option<(f64, usize)> = None;
                    for k in 0..pieces.len() {
                        if used[k] || !on_circle(pieces[k].arcs[0].start) {
                            continue;
                        }
                        let d = (pieces[k].arcs[0].start.angle() - cur_ang).rem_euclid(TAU);
                        if best.map_or(true, |(bd, _)| d < bd) {
                            best = Some((d, k));
                        }
                    }
                    let close_d = if on_circle(start_pt) {
                        (start_pt.angle() - cur_ang).rem_euclid(TAU)
                    } else {
                        f64::INFINITY
                    };
                    match best {
                        Some((d, k)) if d < close_d => {
                            circle_gaps.push((order.len() - 1, k));
                            used[k] = true;
                            order.push(k);
                            cur = pieces[k].arcs.last().unwrap().end;
                            continue;
                        }
                        _ if close_d.is_finite() => {
                            circle_gaps.push((order.len() - 1, usize::MAX));
                            break;
                        }
                        _ => {
                            return Err(crate::Error::InvalidChain(format!(
                                "chamber {l} boundary walk is stuck at ({:.6},{:.6})",
                                cur.x, cur.y
                            )));
                        }
                    }
                }
                return Err(crate::Error::InvalidChain(format!(
                    "chamber {l} boundary does not continue at ({:.6},{:.6})",
                    cur.x, cur.y
                )));
            }
            // Turning angles at the connection points of consecutive
            // pieces (circle gaps join tangentially through the convex
            // boundary arc, so the two turns at a gap are each checked
            // against the circle tangent).
            let m = order.len();
            for i in 0..m {
                let cur_piece = &pieces[order[i]];
                let next_piece = &pieces[order[(i + 1) % m]];
                let p_end = cur_piece.arcs.last().unwrap();
                let n_start = &next_piece.arcs[0];
                let gap_here = circle_gaps.iter().any(|&(at, _)| at == i);
                let t_in = p_end.endpoint_tangent(false)?;
                let t_out = n_start.endpoint_tangent(true)?;
                if gap_here {
                    // Into the circle arc (counterclockwise tangent) and
                    // out of it at the next piece.
                    let c_in = Point2::new(-p_end.end.y, p_end.end.x);
                    let c_out = Point2::new(-n_start.start.y, n_start.start.x);
                    let turn1 = (c_in.angle() - t_in.angle() + PI).rem_euclid(TAU) - PI;
                    let turn2 = (t_out.angle() - c_out.angle() + PI).rem_euclid(TAU) - PI;
                    worst = worst.min(turn1).min(turn2);
                } else {
                    let turn = (t_out.angle() - t_in.angle() + PI).rem_euclid(TAU) - PI;
                    worst = worst.min(turn);
                }
                // Arc pieces themselves must curve left (chamber inside).
                for a in &cur_piece.arcs {
                    if a.kappa < -1e-12 {
                        worst = worst.min(-1.0);
                    }
                }
            }
        }
    }
    if !any {
        return Ok(0.0);
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}

fn label_components(f: &LabelField, label: u8) -> Vec<Vec<usize>> {
    let mut seen = vec![false; f.labels.len()];
    let mut out = Vec::new();
    for start in 0..f.labels.len() {
        if seen[start] || !f.mask[start] || f.labels[start] != label {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut cells = Vec::new();
        while let Some(i) = stack.pop() {
            cells.push(i);
            let (ix, iy) = ((i % f.nx) as i32, (i / f.nx) as i32);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (jx, jy) = (ix + dx, iy + dy);
                if jx < 0 || jy < 0 || jx >= f.nx as i32 || jy >= f.ny as i32 {
                    continue;
                }
                let j = jy as usize * f.nx + jx as usize;
                if !seen[j] && f.mask[j] && f.labels[j] == label {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        out.push(cells);
    }
    out
}

/// Area of cells whose centers lie strictly inside the convex hull of the
/// component but do not belong to it.
fn hull_excess_cells(f: &LabelField, comp: &[usize]) -> f64 {
    if comp.len() < 4 {
        return 0.0;
    }
    let pts: Vec<Point2> = comp.iter().map(|&i| f.center_of(i)).collect();
    let hull = convex_hull(&pts);
    if hull.len() < 3 {
        return 0.0;
    }
    let in_comp: std::collections::HashSet<usize> = comp.iter().copied().collect();
    // Bounding box scan.
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &hull {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let ix0 = (((x0 - f.origin.x) / f.cell).floor().max(0.0)) as usize;
    let ix1 = ((((x1 - f.origin.x) / f.cell).ceil()) as usize).min(f.nx);
    let iy0 = (((y0 - f.origin.y) / f.cell).floor().max(0.0)) as usize;
    let iy1 = ((((y1 - f.origin.y) / f.cell).ceil()) as usize).min(f.ny);
    let mut excess = 0usize;
    for iy in iy0..iy1 {
        for ix in ix0..ix1 {
            let i = f.idx(ix, iy);
            if !f.mask[i] || in_comp.contains(&i) {
                continue;
            }
            let q = f.center(ix, iy);
            // Strictly inside the hull, half a cell away from its edges,
            // to keep boundary jitter out of the count.
            let mut inside = true;
            let n = hull.len();
            for k in 0..n {
                let a = hull[k];
                let b = hull[(k + 1) % n];
                let d = b.sub(a);
                if d.cross(q.sub(a)) < 0.55 * f.cell * d.norm() {
                    inside = false;
                    break;
                }
            }
            if inside {
                excess += 1;
            }
        }
    }
    excess as f64 * f.cell_area()
}

fn convex_hull(pts: &[Point2]) -> Vec<Point2> {
    let mut p: Vec<Point2> = pts.to_vec();
    p.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    p.dedup_by(|a, b| a.dist(*b) < 1e-12);
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Point2> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 {
            let (a, b) = (lower[lower.len() - 2], lower[lower.len() - 1]);
            if b.sub(a).cross(q.sub(a)) <= 0.0 {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(q);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 {
            let (a, b) = (upper[upper.len() - 2], upper[upper.len() - 1]);
            if b.sub(a).cross(q.sub(a)) <= 0.0 {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

/// Wet-area saturation: with triple junctions present, the optimizer uses
/// its whole wet budget (up to one cell); without them, the wet region is
/// empty up to stray cells.
pub fn check_saturation(f: &LabelField, delta: f64, expect_wetting: bool) -> CheckEntry {
    let area = f.wet_area();
    let ca = f.cell_area();
    let base = CheckEntry {
        name: "wet-saturation".into(),
        criterion: "wet area saturates the budget at wetted junctions and vanishes otherwise"
            .into(),
        status: CheckStatus::Pass,
        measured: vec![area, delta],
        tolerance: ca,
        note: String::new(),
        evidence: None,
    };
    if delta == 0.0 {
        return CheckEntry { note: "delta = 0".into(), ..base }.pass(area == 0.0);
    }
    if expect_wetting {
        CheckEntry { note: "expects saturation".into(), ..base }
            .pass(area >= delta - ca - 1e-12 && area <= delta + 1e-12)
    } else {
        CheckEntry {
            note: "no junctions: expects an empty wet region".into(),
            tolerance: 3.0 * ca,
            ..base
        }
        .pass(area < 3.0 * ca)
    }
}

// ---------------------------------------------------------------------------
// Convergence sweep
// ---------------------------------------------------------------------------

/// One measured point of a wet-budget sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub delta: f64,
    /// Symmetric Hausdorff distance of the optimized chambers to the dry
    /// minimizer (worst chamber).
    pub chamber_hausdorff: f64,
    /// Two-sided gap between the wet region and the dry triple junctions.
    pub g_sigma_hausdorff: f64,
    pub energy: f64,
}

/// Checks a sweep (decreasing `delta`): both distances decrease to within
/// one cell, their log-log slopes against `delta` sit in `[0.4, 0.6]`, and
/// the optimized energy is non-increasing in `delta` within one
/// cell-length of energy.
pub fn convergence_sweep(points: &[SweepPoint], cell: f64) -> CheckEntry {
    let base = CheckEntry {
        name: "convergence-sweep".into(),
        criterion: "chamber and wet-region distances to the dry minimizer shrink like \
                    sqrt(delta); minimum energy decreases in delta"
            .into(),
        status: CheckStatus::Skipped,
        measured: vec![],
        tolerance: cell,
        note: String::new(),
        evidence: None,
    };
    if points.len() < 3 {
        return CheckEntry { note: "need at least 3 sweep points".into(), ..base };
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.delta.partial_cmp(&a.delta).unwrap());
    let mut ok = true;
    let mut note = String::new();
    for w in sorted.windows(2) {
        // delta decreases across the window; distances must too.
        if w[1].chamber_hausdorff > w[0].chamber_hausdorff + cell {
            ok = false;
            note.push_str("chamber distance not decreasing; ");
        }
        if w[1].g_sigma_hausdorff > w[0].g_sigma_hausdorff + cell {
            ok = false;
            note.push_str("wet-region distance not decreasing; ");
        }
        if w[0].energy > w[1].energy + cell {
            // larger delta must not have larger energy
            ok = false;
            note.push_str("energy not monotone in delta; ");
        }
    }
    let slope_chamber = loglog_slope(&sorted, |p| p.chamber_hausdorff);
    let slope_g = loglog_slope(&sorted, |p| p.g_sigma_hausdorff);
    for s in [slope_chamber, slope_g] {
        if !(0.4..=0.6).contains(&s) {
            ok = false;
            note.push_str(&format!("log-log slope {s:.3} outside [0.4, 0.6]; "));
        }
    }
    CheckEntry {
        measured: vec![slope_chamber, slope_g],
        note: if note.is_empty() { "slopes (chamber, wet)".into() } else { note },
        ..base
    }
    .pass(ok)
}

fn loglog_slope(points: &[SweepPoint], f: impl Fn(&SweepPoint) -> f64) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| f(p).max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Monotonicity diagnostic
// ---------------------------------------------------------------------------

/// Fits the smallest `lambda >= 0` making `r -> E(B_r(x))/r + lambda r`
/// non-decreasing over the radius grid at each of the sampled interface
/// points, and reports the largest such `lambda`.
pub fn monotonicity_diagnostic(
    f: &LabelField,
    w: &Weights,
    stencil: Stencil,
    n_points: usize,
    r_max: f64,
) -> (f64, CheckEntry) {
    // Deterministic interface point sample: chamber-chamber midpoints,
    // evenly spaced along the collected list.
    let mut pts: Vec<Point2> = Vec::new();
    for a in 1..16u8 {
        for b in (a + 1)..17u8 {
            let b = if b == 16 { WET } else { b };
            pts.extend(crate::lattice::interface_points(
                f,
                a,
                b,
                Point2::new(0.0, 0.0),
                2.0,
            ));
        }
    }
    pts.retain(|p| p.norm() < 1.0 - r_max - 2.0 * f.cell);
    let sample: Vec<Point2> = if pts.len() <= n_points {
        pts
    } else {
        (0..n_points).map(|k| pts[k * pts.len() / n_points]).collect()
    };
    let r_min = 4.0 * f.cell;
    let radii: Vec<f64> = (0..24)
        .map(|k| r_min + (r_max - r_min) * k as f64 / 23.0)
        .collect();
    let mut lambda: f64 = 0.0;
    for x in &sample {
        let energies = crate::lattice::energy_profile(f, w, stencil, *x, &radii);
        for i in 0..radii.len() {
            for j in i + 1..radii.len() {
                let (ri, rj) = (radii[i], radii[j]);
                let (pi, pj) = (energies[i] / ri, energies[j] / rj);
                if pi > pj {
                    lambda = lambda.max((pi - pj) / (rj - ri));
                }
            }
        }
    }
    let entry = CheckEntry {
        name: "monotonicity-profile".into(),
        criterion: "E(B_r(x))/r + lambda r is non-decreasing in r at interface points for a \
                    bounded lambda"
            .into(),
        status: CheckStatus::Pass,
        measured: vec![lambda, sample.len() as f64],
        tolerance: f64::INFINITY,
        note: format!("fitted lambda over {} points, r in [{:.4}, {:.4}]", sample.len(), r_min, r_max),
        evidence: None,
    }
    .pass(lambda.is_finite());
    (lambda, entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{BoundaryTrace, Jump};
    use crate::dry::best_dry;
    use crate::wetting::build_wetted;

    fn wetted_y() -> (crate::wetting::WettedCluster, Weights, BoundaryTrace) {
        let trace = BoundaryTrace::new(vec![
            Jump { angle: PI / 2.0, label: 1 },
            Jump { angle: 7.0 * PI / 6.0, label: 2 },
            Jump { angle: 11.0 * PI / 6.0, label: 3 },
        ]);
        let w = Weights::equal(3);
        let dry = best_dry(&trace, &w, 4).unwrap().best;
        let wet = build_wetted(&dry, &trace, &w, 0.01).unwrap();
        (wet, w, trace)
    }

    #[test]
    fn curvature_condition_on_wetted_cluster() {
        let (wet, w, _) = wetted_y();
        let e = check_curvature_condition(&CheckSource::Cluster(&wet.cluster), &w);
        assert_eq!(e.status, CheckStatus::Pass, "{e:?}");
    }

    #[test]
    fn curvature_condition_skips_dry_cluster() {
        let (wet, w, trace) = wetted_y();
        let dry_cluster = wet.base.to_cluster(&trace);
        let e = check_curvature_condition(&CheckSource::Cluster(&dry_cluster), &w);
        assert_eq!(e.status, CheckStatus::Skipped);
    }

    #[test]
    fn cusp_tangency_passes_and_detects_defects() {
        let (wet, _, _) = wetted_y();
        let e = check_cusp_tangency(&wet.cluster);
        assert_eq!(e.status, CheckStatus::Pass, "{e:?}");
        assert!(e.measured[0] <= 1e-10);

        // Rotate one wet arc rigidly about its far endpoint by 0.01 rad:
        // the cusp tangency fails by that same angle.
        let mut corrupted = wet.cluster.clone();
        let idx = corrupted
            .interfaces
            .iter()
            .position(|i| i.is_wet())
            .expect("wet interface");
        let arc = &mut corrupted.interfaces[idx].arcs[0];
        let pivot = arc.end;
        arc.start = pivot.add(arc.start.sub(pivot).rotated(0.01));
        let e2 = check_cusp_tangency(&corrupted);
        assert_eq!(e2.status, CheckStatus::Fail);
        assert!((e2.measured[0] - 0.01).abs() < 2e-3, "measured {}", e2.measured[0]);
    }

    #[test]
    fn convexity_of_dry_and_wetted_chambers() {
        let (wet, _, trace) = wetted_y();
        let dry_cluster = wet.base.to_cluster(&trace);
        let e = check_convexity(&CheckSource::Cluster(&dry_cluster), 3);
        assert_eq!(e.status, CheckStatus::Pass, "{e:?}");
        let e2 = check_convexity(&CheckSource::Cluster(&wet.cluster), 3);
        assert_eq!(e2.status, CheckStatus::Pass, "{e2:?}");
    }

    #[test]
    fn convexity_detects_injected_dent() {
        // A chamber with a rectangular bite out of its side.
        let mut f = crate::lattice::LabelField::ball_grid(96);
        for i in 0..f.labels.len() {
            if f.mask[i] {
                let p = f.center_of(i);
                let dent = p.x > 0.0 && p.x < 0.4 && p.y.abs() < 0.12;
                f.labels[i] = if p.y > 0.0 || dent { 1 } else { 2 };
            }
        }
        let e = check_convexity(&CheckSource::Field(&f), 2);
        assert_eq!(e.status, CheckStatus::Fail, "{e:?}");
        // The clean split passes.
        let mut clean = crate::lattice::LabelField::ball_grid(96);
        for i in 0..clean.labels.len() {
            if clean.mask[i] {
                clean.labels[i] = if clean.center_of(i).y > 0.0 { 1 } else { 2 };
            }
        }
        let e2 = check_convexity(&CheckSource::Field(&clean), 2);
        assert_eq!(e2.status, CheckStatus::Pass, "{e2:?}");
    }

    #[test]
    fn saturation_variants() {
        let mut f = crate::lattice::LabelField::ball_grid(64);
        for i in 0..f.labels.len() {
            if f.mask[i] {
                f.labels[i] = 1;
            }
        }
        // delta = 0 with empty wet region passes.
        assert_eq!(check_saturation(&f, 0.0, true).status, CheckStatus::Pass);
        // Saturated case: fill the budget exactly.
        let ca = f.cell_area();
        let budget = 40.0 * ca;
        let mut count = 0;
        for i in 0..f.labels.len() {
            if f.mask[i] && count < 40 {
                f.labels[i] = WET;
                count += 1;
            }
        }
        assert_eq!(check_saturation(&f, budget, true).status, CheckStatus::Pass);
        assert_eq!(check_saturation(&f, budget, false).status, CheckStatus::Fail);
        assert_eq!(check_saturation(&f, budget * 4.0, true).status, CheckStatus::Fail);
    }

    #[test]
    fn sweep_check_accepts_sqrt_law() {
        let cell = 1.0 / 256.0;
        let pts: Vec<SweepPoint> = [0.04, 0.02, 0.01, 0.005]
            .iter()
            .map(|&d: &f64| SweepPoint {
                delta: d,
                chamber_hausdorff: 0.4 * d.sqrt(),
                g_sigma_hausdorff: 1.4 * d.sqrt(),
                energy: 6.0 - 0.32 * d.sqrt(),
            })
            .collect();
        let e = convergence_sweep(&pts, cell);
        assert_eq!(e.status, CheckStatus::Pass, "{e:?}");
        // A flat sequence fails the slope test.
        let flat: Vec<SweepPoint> = pts
            .iter()
            .map(|p| SweepPoint { chamber_hausdorff: 0.05, ..*p })
            .collect();
        assert_eq!(convergence_sweep(&flat, cell).status, CheckStatus::Fail);
        // Too few points: skipped.
        assert_eq!(convergence_sweep(&pts[..2], cell).status, CheckStatus::Skipped);
    }

    #[test]
    fn report_rendering_is_reproducible() {
        let (wet, w, _) = wetted_y();
        let mut r1 = VerificationReport::default();
        r1.push(check_curvature_condition(&CheckSource::Cluster(&wet.cluster), &w));
        r1.push(check_cusp_tangency(&wet.cluster));
        let mut r2 = VerificationReport::default();
        r2.push(check_curvature_condition(&CheckSource::Cluster(&wet.cluster), &w));
        r2.push(check_cusp_tangency(&wet.cluster));
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(r1.all_passed());
        assert!(r1.to_text().contains("curvature-condition"));
    }
}
