//! Exact computational geometry: points, constant-curvature arcs, closed
//! arc chains, raster sets, and the rearrangement/clipping primitives the
//! rest of the crate is built on.
//!
//! Curvature convention: a [`CircArc`] stores signed curvature `kappa`
//! along the traversal from `start` to `end`. `kappa = 0` is a straight
//! segment; `kappa > 0` turns left (counterclockwise, center 90 degrees to
//! the left of the tangent). An arc always subtends at most a half turn;
//! full circles are two arcs.

use crate::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;
pub const PI: f64 = std::f64::consts::PI;

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn add(self, v: Point2) -> Point2 {
        Point2::new(self.x + v.x, self.y + v.y)
    }

    pub fn sub(self, v: Point2) -> Point2 {
        Point2::new(self.x - v.x, self.y - v.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, v: Point2) -> f64 {
        self.x * v.x + self.y * v.y
    }

    /// z-component of the cross product `self x v`.
    pub fn cross(self, v: Point2) -> f64 {
        self.x * v.y - self.y * v.x
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    /// Rotation by `angle` about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(angle: f64) -> Point2 {
        Point2::new(angle.cos(), angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// An arc of constant curvature between two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircArc {
    pub start: Point2,
    pub end: Point2,
    /// Signed curvature; zero for a straight segment, positive turning left.
    pub kappa: f64,
}

/// Threshold below which `|kappa| * chord` switches length/area formulas to
/// series expansions, keeping them continuous through `kappa = 0`.
const SERIES_CUTOFF: f64 = 1e-6;

impl CircArc {
    pub fn segment(start: Point2, end: Point2) -> Self {
        CircArc { start, end, kappa: 0.0 }
    }

    pub fn new(start: Point2, end: Point2, kappa: f64) -> Self {
        CircArc { start, end, kappa }
    }

    pub fn chord(&self) -> f64 {
        self.start.dist(self.end)
    }

    /// Checks endpoint finiteness, the chord-fits-on-circle guard
    /// `|kappa| * chord <= 2`, and non-degeneracy.
    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() || !self.kappa.is_finite() {
            return Err(Error::InvalidArc("non-finite data".into()));
        }
        let c = self.chord();
        if c == 0.0 {
            return Err(Error::InvalidArc("zero-length arc".into()));
        }
        if self.kappa.abs() * c > 2.0 + 1e-12 {
            return Err(Error::InvalidArc(format!(
                "chord {} too long for curvature {}",
                c, self.kappa
            )));
        }
        Ok(())
    }

    /// Subtended angle in `(0, pi]`; zero for segments.
    pub fn subtended_angle(&self) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        let x = (self.kappa.abs() * self.chord() / 2.0).min(1.0);
        2.0 * x.asin()
    }

    /// Arc length: chord for segments, `R * theta` otherwise, with a series
    /// fallback so length is continuous through `kappa = 0`.
    pub fn length(&self) -> f64 {
        let c = self.chord();
        let kc = self.kappa.abs() * c;
        if kc < SERIES_CUTOFF {
            // c * asin(x)/x with x = kc/2
            return c * (1.0 + kc * kc / 24.0 + 3.0 * kc.powi(4) / 640.0);
        }
        self.subtended_angle() / self.kappa.abs()
    }

    /// Center of the supporting circle. Requires `kappa != 0`.
    pub fn center(&self) -> Point2 {
        debug_assert!(self.kappa != 0.0);
        let r = 1.0 / self.kappa.abs();
        let c = self.chord();
        let mid = self.start.add(self.end).scale(0.5);
        let d = self.end.sub(self.start).scale(1.0 / c);
        let left = Point2::new(-d.y, d.x);
        let h2 = (r * r - c * c / 4.0).max(0.0);
        mid.add(left.scale(self.kappa.signum() * h2.sqrt()))
    }

    /// Unit tangent in traversal direction at the start or end point.
    pub fn endpoint_tangent(&self, at_start: bool) -> Result<Point2> {
        self.validate()?;
        let d = self.end.sub(self.start).normalized();
        if self.kappa == 0.0 {
            return Ok(d);
        }
        let half = self.subtended_angle() / 2.0;
        let turn = if at_start { -self.kappa.signum() * half } else { self.kappa.signum() * half };
        Ok(d.rotated(turn))
    }

    /// Point at parameter `t` in `[0, 1]` along the arc.
    pub fn point_at(&self, t: f64) -> Point2 {
        if self.kappa == 0.0 {
            return self.start.add(self.end.sub(self.start).scale(t));
        }
        let o = self.center();
        let r = 1.0 / self.kappa.abs();
        let a0 = self.start.sub(o).angle();
        let sweep = self.kappa.signum() * self.subtended_angle();
        o.add(Point2::from_angle(a0 + t * sweep).scale(r))
    }

    /// Signed area between the arc and its chord; positive when the arc
    /// turns left. Zero for segments.
    pub fn segment_area(&self) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        let c = self.chord();
        let kc = self.kappa.abs() * c;
        if kc < SERIES_CUTOFF {
            // R^2 (theta - sin theta)/2 ~ c^3 |k| /12 for small angles
            return self.kappa.signum() * c.powi(3) * self.kappa.abs() / 12.0;
        }
        let theta = self.subtended_angle();
        let r = 1.0 / self.kappa.abs();
        self.kappa.signum() * r * r * (theta - theta.sin()) / 2.0
    }

    /// Contribution of this arc to the Green's-theorem area line integral
    /// `1/2 (x dy - y dx)`.
    fn area_integral(&self) -> f64 {
        0.5 * self.start.cross(self.end) + self.segment_area()
    }

    /// Distance from `q` to the nearest point of the arc.
    pub fn distance_to(&self, q: Point2) -> f64 {
        if self.kappa == 0.0 {
            let d = self.end.sub(self.start);
            let t = (q.sub(self.start).dot(d) / d.dot(d)).clamp(0.0, 1.0);
            return q.dist(self.start.add(d.scale(t)));
        }
        let o = self.center();
        let r = 1.0 / self.kappa.abs();
        let a0 = self.start.sub(o).angle();
        let sweep = self.kappa.signum() * self.subtended_angle();
        let aq = q.sub(o).angle();
        // Is the projection of q onto the circle within the angular span?
        let mut rel = (aq - a0) * sweep.signum();
        rel = rel.rem_euclid(TAU);
        if rel <= sweep.abs() {
            (q.dist(o) - r).abs()
        } else {
            q.dist(self.start).min(q.dist(self.end))
        }
    }

    /// Which side of the arc `q` lies on: positive = left of traversal.
    pub fn side_of(&self, q: Point2) -> f64 {
        if self.kappa == 0.0 {
            let d = self.end.sub(self.start);
            return d.cross(q.sub(self.start));
        }
        // Left of traversal is the center side iff kappa > 0.
        let inside = 1.0 / self.kappa.abs() - q.dist(self.center());
        inside * self.kappa.signum()
    }

    pub fn reversed(&self) -> CircArc {
        CircArc { start: self.end, end: self.start, kappa: -self.kappa }
    }

    /// Splits the arc at parameter `t`, preserving geometry.
    pub fn split_at(&self, t: f64) -> (CircArc, CircArc) {
        let p = self.point_at(t);
        (
            CircArc { start: self.start, end: p, kappa: self.kappa },
            CircArc { start: p, end: self.end, kappa: self.kappa },
        )
    }
}

/// A chain of arcs with matching endpoints, optionally closed.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArcChain {
    pub arcs: Vec<CircArc>,
    pub closed: bool,
}

impl ArcChain {
    pub fn open(arcs: Vec<CircArc>) -> Self {
        ArcChain { arcs, closed: false }
    }

    pub fn closed(arcs: Vec<CircArc>) -> Self {
        ArcChain { arcs, closed: true }
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.arcs {
            a.validate()?;
        }
        let n = self.arcs.len();
        let last = if self.closed { n } else { n.saturating_sub(1) };
        for i in 0..last {
            let a = &self.arcs[i];
            let b = &self.arcs[(i + 1) % n];
            if a.end.dist(b.start) > 1e-9 {
                return Err(Error::InvalidChain(format!(
                    "arcs {} and {} do not share endpoints",
                    i,
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.arcs.iter().map(|a| a.length()).sum()
    }

    /// Signed enclosed area of a closed chain (positive = counterclockwise).
    pub fn signed_area(&self) -> Result<f64> {
        if !self.closed {
            return Err(Error::InvalidChain("area of an open chain".into()));
        }
        if self.arcs.is_empty() {
            return Ok(0.0);
        }
        self.validate()?;
        Ok(self.arcs.iter().map(|a| a.area_integral()).sum())
    }

    /// Positive enclosed area of a closed simple chain.
    pub fn area(&self) -> Result<f64> {
        let a = self.signed_area()?;
        if self.simple_polyline_check(64).is_err() {
            return Err(Error::InvalidChain("self-intersecting chain".into()));
        }
        Ok(a.abs())
    }

    /// Cheap self-intersection screen on a polyline refinement of the chain.
    fn simple_polyline_check(&self, per_arc: usize) -> Result<()> {
        let mut pts: Vec<Point2> = Vec::new();
        for a in &self.arcs {
            for k in 0..per_arc {
                pts.push(a.point_at(k as f64 / per_arc as f64));
            }
        }
        let n = pts.len();
        if n < 3 {
            return Ok(());
        }
        for i in 0..n {
            let (a1, a2) = (pts[i], pts[(i + 1) % n]);
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (b1, b2) = (pts[j], pts[(j + 1) % n]);
                if segments_properly_intersect(a1, a2, b1, b2) {
                    return Err(Error::InvalidChain("self-intersection".into()));
                }
            }
        }
        Ok(())
    }
}

fn segments_properly_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = a2.sub(a1);
    let d2 = b2.sub(b1);
    let denom = d1.cross(d2);
    if denom.abs() < 1e-15 {
        return false;
    }
    let t = b1.sub(a1).cross(d2) / denom;
    let u = b1.sub(a1).cross(d1) / denom;
    let eps = 1e-12;
    t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps
}

/// Concave region bounded by three mutually tangent circles of radius `r`,
/// centered at the origin in its canonical frame: cusps in the directions
/// 30, 150 and 270 degrees at distance `r/sqrt(3)`, circle centers at 90,
/// 210 and 330 degrees at distance `2r/sqrt(3)`.
#[derive(Debug, Clone)]
pub struct CurvilinearTriangle {
    pub r: f64,
    /// Counterclockwise boundary chain (empty when `r = 0`).
    pub chain: ArcChain,
    /// Cusp points in canonical order (30, 150, 270 degrees).
    pub cusps: [Point2; 3],
    /// Centers of the three tangent circles (90, 210, 330 degrees).
    pub centers: [Point2; 3],
    /// Length of each of the three boundary arcs, `(pi/3) r`.
    pub arc_length: f64,
    /// Enclosed area, `(sqrt(3) - pi/2) r^2`.
    pub area: f64,
    /// Distance from the centroid to each cusp, `r/sqrt(3)`.
    pub cusp_dist: f64,
}

/// Area of the curvilinear triangle per unit `r^2`.
pub const CURVILINEAR_TRIANGLE_AREA: f64 = 1.732_050_807_568_877_2_f64 - PI / 2.0;

/// Builds the canonical curvilinear triangle of circle radius `r`.
pub fn curvilinear_triangle(r: f64) -> Result<CurvilinearTriangle> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArc(format!("negative radius {r}")));
    }
    let sqrt3 = 3.0_f64.sqrt();
    let cusp_dist = r / sqrt3;
    let cusp_angles = [PI / 6.0, 5.0 * PI / 6.0, 3.0 * PI / 2.0];
    let center_angles = [PI / 2.0, 7.0 * PI / 6.0, 11.0 * PI / 6.0];
    let cusps = [
        Point2::from_angle(cusp_angles[0]).scale(cusp_dist),
        Point2::from_angle(cusp_angles[1]).scale(cusp_dist),
        Point2::from_angle(cusp_angles[2]).scale(cusp_dist),
    ];
    let centers = [
        Point2::from_angle(center_angles[0]).scale(2.0 * r / sqrt3),
        Point2::from_angle(center_angles[1]).scale(2.0 * r / sqrt3),
        Point2::from_angle(center_angles[2]).scale(2.0 * r / sqrt3),
    ];
    let chain = if r > 0.0 {
        // Counterclockwise around the region; each arc runs clockwise around
        // its own circle, so the curvature is negative.
        ArcChain::closed(vec![
            CircArc::new(cusps[0], cusps[1], -1.0 / r),
            CircArc::new(cusps[1], cusps[2], -1.0 / r),
            CircArc::new(cusps[2], cusps[0], -1.0 / r),
        ])
    } else {
        ArcChain::closed(vec![])
    };
    if r > 0.0 {
        chain.validate()?;
    }
    Ok(CurvilinearTriangle {
        r,
        chain,
        cusps,
        centers,
        arc_length: PI / 3.0 * r,
        area: CURVILINEAR_TRIANGLE_AREA * r * r,
        cusp_dist,
    })
}

// ---------------------------------------------------------------------------
// Raster sets
// ---------------------------------------------------------------------------

/// A subset of a square grid: `mask[iy * nx + ix]` marks cells, cell centers
/// at `origin + (ix + 0.5, iy + 0.5) * cell`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    pub origin: Point2,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
}

impl GridSet {
    pub fn empty(origin: Point2, cell: f64, nx: usize, ny: usize) -> Self {
        assert!(cell > 0.0 && nx >= 1 && ny >= 1);
        GridSet { origin, cell, nx, ny, mask: vec![false; nx * ny] }
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: bool) {
        self.mask[iy * self.nx + ix] = v;
    }

    pub fn center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.cell,
            self.origin.y + (iy as f64 + 0.5) * self.cell,
        )
    }

    pub fn cell_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.cell * self.cell
    }

    /// Fills cells whose centers satisfy `pred`.
    pub fn fill_where(&mut self, pred: impl Fn(Point2) -> bool) {
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if pred(self.center(ix, iy)) {
                    self.set(ix, iy, true);
                }
            }
        }
    }
}

/// Index-space window into a grid: columns `ix0..ix1`, rows `iy0..iy1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowRect {
    pub ix0: usize,
    pub ix1: usize,
    pub iy0: usize,
    pub iy1: usize,
}

impl WindowRect {
    pub fn full(g: &GridSet) -> Self {
        WindowRect { ix0: 0, ix1: g.nx, iy0: 0, iy1: g.ny }
    }
}

/// Column-wise rearrangement into bottom-anchored intervals inside `window`.
///
/// Requires the raster band hypothesis: the window's bottom row is entirely
/// inside the set and its top row entirely outside, so no column content can
/// spill out of the window. Cell counts per column (hence area) are
/// preserved exactly; the discrete perimeter never increases.
pub fn hypograph_symmetrize(e: &GridSet, window: WindowRect) -> Result<GridSet> {
    let WindowRect { ix0, ix1, iy0, iy1 } = window;
    if ix1 > e.nx || iy1 > e.ny || ix0 >= ix1 || iy0 >= iy1 {
        return Err(Error::Hypothesis("window out of grid bounds".into()));
    }
    for ix in ix0..ix1 {
        if !e.get(ix, iy0) {
            return Err(Error::Hypothesis(format!(
                "bottom window row not contained in the set at column {ix}"
            )));
        }
        if e.get(ix, iy1 - 1) {
            return Err(Error::Hypothesis(format!(
                "top window row not disjoint from the set at column {ix}"
            )));
        }
    }
    let mut out = e.clone();
    for ix in ix0..ix1 {
        let count = (iy0..iy1).filter(|&iy| e.get(ix, iy)).count();
        for (k, iy) in (iy0..iy1).enumerate() {
            out.set(ix, iy, k < count);
        }
    }
    Ok(out)
}

/// Slicing axis for [`slice_traces`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    /// Slice along a horizontal line `y = t` (returns a row).
    Horizontal,
    /// Slice along a vertical line `x = t` (returns a column).
    Vertical,
}

/// A one-dimensional raster slice with its two one-cell-in trace surrogates.
#[derive(Debug, Clone)]
pub struct Slice {
    /// Index of the sliced row/column.
    pub index: usize,
    pub cell: f64,
    pub cells: Vec<bool>,
    /// One row/column towards negative axis direction.
    pub minus: Vec<bool>,
    /// One row/column towards positive axis direction.
    pub plus: Vec<bool>,
}

impl Slice {
    /// Total length (cell count times cell size) of the slice.
    pub fn measure(&self) -> f64 {
        self.cells.iter().filter(|&&b| b).count() as f64 * self.cell
    }

    /// Maximal runs of set cells as index ranges.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        runs(&self.cells)
    }

    pub fn traces_agree(&self) -> bool {
        self.minus == self.plus
    }
}

pub fn runs(cells: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        if cells[i] {
            let s = i;
            while i < cells.len() && cells[i] {
                i += 1;
            }
            out.push((s, i));
        } else {
            i += 1;
        }
    }
    out
}

/// Extracts the raster slice through `t` together with the adjacent
/// rows/columns as surrogates for the one-sided traces. `t` must be at
/// least one cell away from the grid border so both surrogates exist.
pub fn slice_traces(e: &GridSet, t: f64, axis: SliceAxis) -> Result<Slice> {
    let (coord0, n, m) = match axis {
        SliceAxis::Horizontal => (e.origin.y, e.ny, e.nx),
        SliceAxis::Vertical => (e.origin.x, e.nx, e.ny),
    };
    let fidx = (t - coord0) / e.cell;
    if fidx < 1.0 || fidx >= (n - 1) as f64 {
        return Err(Error::Hypothesis(format!("slice coordinate {t} outside grid interior")));
    }
    let idx = fidx as usize;
    let line = |k: usize| -> Vec<bool> {
        (0..m)
            .map(|j| match axis {
                SliceAxis::Horizontal => e.get(j, k),
                SliceAxis::Vertical => e.get(k, j),
            })
            .collect()
    };
    Ok(Slice {
        index: idx,
        cell: e.cell,
        cells: line(idx),
        minus: line(idx - 1),
        plus: line(idx + 1),
    })
}

// ---------------------------------------------------------------------------
// Polygons and convex clipping
// ---------------------------------------------------------------------------

/// A simple polygon given by its vertex loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Self {
        Polygon { vertices }
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n])).sum()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Turning-direction scan: every cross product of consecutive edges has
    /// the same sign (collinear vertices allowed).
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let mut sign = 0.0_f64;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let cr = b.sub(a).cross(c.sub(b));
            if cr.abs() < 1e-14 {
                continue;
            }
            if sign == 0.0 {
                sign = cr.signum();
            } else if cr.signum() != sign {
                return false;
            }
        }
        sign != 0.0
    }

    pub fn contains(&self, q: Point2) -> bool {
        // Crossing number; adequate away from edges.
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > q.y) != (b.y > q.y) {
                let xi = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if q.x < xi {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Perimeter comparison emitted by the convex clipping operations.
#[derive(Debug, Clone)]
pub struct ClipReport {
    pub perimeter_before: f64,
    pub perimeter_after: f64,
    /// Area (polygon) or cell count times cell area (raster) removed.
    pub removed: f64,
    pub strict: bool,
}

/// Clips a simple polygon by a convex polygon (Sutherland-Hodgman) and
/// reports the perimeter comparison.
pub fn convex_clip_polygon(e: &Polygon, k: &Polygon) -> Result<(Polygon, ClipReport)> {
    if !k.is_convex() {
        return Err(Error::Hypothesis("clip polygon is not convex".into()));
    }
    let mut clip = k.clone();
    if clip.signed_area() < 0.0 {
        clip.vertices.reverse();
    }
    let mut out = e.vertices.clone();
    let n = clip.vertices.len();
    for i in 0..n {
        let a = clip.vertices[i];
        let b = clip.vertices[(i + 1) % n];
        let dir = b.sub(a);
        let inside = |p: Point2| dir.cross(p.sub(a)) >= -1e-15;
        let input = std::mem::take(&mut out);
        if input.is_empty() {
            break;
        }
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in {
                if !prev_in {
                    out.push(line_intersect(prev, cur, a, b));
                }
                out.push(cur);
            } else if prev_in {
                out.push(line_intersect(prev, cur, a, b));
            }
        }
    }
    let clipped = Polygon::new(out);
    let before = e.perimeter();
    let after = clipped.perimeter();
    let removed = e.area() - clipped.area();
    Ok((
        clipped,
        ClipReport {
            perimeter_before: before,
            perimeter_after: after,
            removed,
            strict: after < before - 1e-12,
        },
    ))
}

fn line_intersect(p1: Point2, p2: Point2, a: Point2, b: Point2) -> Point2 {
    let d1 = p2.sub(p1);
    let d2 = b.sub(a);
    let t = a.sub(p1).cross(d2) / d1.cross(d2);
    p1.add(d1.scale(t))
}

/// Clips a raster set to a convex polygon (cell centers in `k` survive) and
/// reports the Crofton perimeter comparison.
pub fn convex_clip_grid(e: &GridSet, k: &Polygon) -> Result<(GridSet, ClipReport)> {
    if !k.is_convex() {
        return Err(Error::Hypothesis("clip polygon is not convex".into()));
    }
    let mut out = e.clone();
    let mut removed_cells = 0usize;
    for iy in 0..e.ny {
        for ix in 0..e.nx {
            if e.get(ix, iy) && !k.contains(e.center(ix, iy)) {
                out.set(ix, iy, false);
                removed_cells += 1;
            }
        }
    }
    let before = crate::lattice::crofton_perimeter_mask(e, crate::lattice::Stencil::Sixteen);
    let after = crate::lattice::crofton_perimeter_mask(&out, crate::lattice::Stencil::Sixteen);
    Ok((
        out,
        ClipReport {
            perimeter_before: before,
            perimeter_after: after,
            removed: removed_cells as f64 * e.cell * e.cell,
            strict: after < before - 1e-12,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::seeded;

    const TOL: f64 = 1e-12;

    #[test]
    fn segment_length_is_chord() {
        let a = CircArc::segment(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        assert!((a.length() - 1.0).abs() < TOL);
    }

    #[test]
    fn half_circle_length() {
        let a = CircArc::new(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), 1.0);
        a.validate().unwrap();
        assert!((a.length() - PI).abs() < TOL);
    }

    #[test]
    fn sixty_degree_arc_radius_two() {
        // chord = 2 R sin(30 deg) = 2, length = R * pi/3 = 2 pi/3
        let chord = 2.0;
        let a = CircArc::new(Point2::new(0.0, 0.0), Point2::new(chord, 0.0), 0.5);
        assert!((a.length() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_chord_for_curvature() {
        let a = CircArc::new(Point2::new(0.0, 0.0), Point2::new(3.0, 0.0), 1.0);
        assert!(a.validate().is_err());
    }

    #[test]
    fn arc_length_at_least_chord() {
        let mut rng = seeded(7);
        for _ in 0..500 {
            let s = Point2::new(rng.f64_in(-2.0, 2.0), rng.f64_in(-2.0, 2.0));
            let e = Point2::new(rng.f64_in(-2.0, 2.0), rng.f64_in(-2.0, 2.0));
            if s.dist(e) < 1e-6 {
                continue;
            }
            let kmax = 2.0 / s.dist(e);
            let k = rng.f64_in(-kmax, kmax);
            let a = CircArc::new(s, e, k);
            let (len, chord) = (a.length(), a.chord());
            assert!(len >= chord - 1e-12);
            if k == 0.0 {
                assert!((len - chord).abs() < TOL);
            }
        }
    }

    #[test]
    fn length_continuous_through_zero_curvature() {
        let s = Point2::new(0.0, 0.0);
        let e = Point2::new(1.0, 0.0);
        let l0 = CircArc::new(s, e, 0.0).length();
        let l1 = CircArc::new(s, e, 1e-9).length();
        let l2 = CircArc::new(s, e, 1e-5).length();
        assert!((l0 - l1).abs() < 1e-15);
        assert!((l1 - l2).abs() < 1e-10);
    }

    #[test]
    fn tangent_of_segment() {
        let a = CircArc::segment(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0));
        let t = a.endpoint_tangent(true).unwrap();
        assert!((t.x - 1.0).abs() < TOL && t.y.abs() < TOL);
    }

    #[test]
    fn tangent_of_quarter_circle() {
        // Counterclockwise quarter of the unit circle.
        let a = CircArc::new(Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), 1.0);
        let c = a.center();
        assert!(c.norm() < 1e-12, "center {c:?}");
        let t = a.endpoint_tangent(true).unwrap();
        assert!(t.x.abs() < TOL && (t.y - 1.0).abs() < TOL, "tangent {t:?}");
        let te = a.endpoint_tangent(false).unwrap();
        assert!((te.x + 1.0).abs() < TOL && te.y.abs() < TOL, "end tangent {te:?}");
    }

    #[test]
    fn zero_length_arc_rejected() {
        let a = CircArc::new(Point2::new(0.5, 0.5), Point2::new(0.5, 0.5), 1.0);
        assert!(a.endpoint_tangent(true).is_err());
    }

    #[test]
    fn unit_square_area() {
        let p = |x, y| Point2::new(x, y);
        let chain = ArcChain::closed(vec![
            CircArc::segment(p(0.0, 0.0), p(1.0, 0.0)),
            CircArc::segment(p(1.0, 0.0), p(1.0, 1.0)),
            CircArc::segment(p(1.0, 1.0), p(0.0, 1.0)),
            CircArc::segment(p(0.0, 1.0), p(0.0, 0.0)),
        ]);
        assert!((chain.area().unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn circle_area_from_two_half_arcs() {
        for r in [0.5, 1.0, 2.0] {
            let chain = ArcChain::closed(vec![
                CircArc::new(Point2::new(-r, 0.0), Point2::new(r, 0.0), 1.0 / r),
                CircArc::new(Point2::new(r, 0.0), Point2::new(-r, 0.0), 1.0 / r),
            ]);
            assert!((chain.area().unwrap() - PI * r * r).abs() < 1e-10);
        }
    }

    #[test]
    fn open_chain_area_rejected() {
        let chain = ArcChain::open(vec![CircArc::segment(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
        )]);
        assert!(chain.area().is_err());
    }

    /// Independent oracle: polygonal refinement of the curvilinear triangle
    /// boundary sampled straight from the three circles.
    fn curvilinear_triangle_polygon_area(r: f64, points_per_arc: usize) -> f64 {
        let sqrt3 = 3.0_f64.sqrt();
        let centers = [
            Point2::from_angle(PI / 2.0).scale(2.0 * r / sqrt3),
            Point2::from_angle(7.0 * PI / 6.0).scale(2.0 * r / sqrt3),
            Point2::from_angle(11.0 * PI / 6.0).scale(2.0 * r / sqrt3),
        ];
        // Arc k runs clockwise around centers[k] between the two cusp
        // directions; cusp angles seen from the center.
        let mut pts = Vec::with_capacity(3 * points_per_arc);
        for (k, &c) in centers.iter().enumerate() {
            // Directions from the circle center to its two adjacent cusps.
            let cusp_dist = r / sqrt3;
            let cusp_a = Point2::from_angle(PI / 6.0 + k as f64 * 2.0 * PI / 3.0).scale(cusp_dist);
            let cusp_b =
                Point2::from_angle(5.0 * PI / 6.0 + k as f64 * 2.0 * PI / 3.0).scale(cusp_dist);
            let ang_a = cusp_a.sub(c).angle();
            let ang_b = cusp_b.sub(c).angle();
            // Clockwise from cusp_a to cusp_b spans 60 degrees.
            let mut sweep = ang_b - ang_a;
            while sweep > 0.0 {
                sweep -= TAU;
            }
            while sweep < -TAU {
                sweep += TAU;
            }
            assert!((sweep.abs() - PI / 3.0).abs() < 1e-9, "sweep {sweep}");
            for i in 0..points_per_arc {
                let t = i as f64 / points_per_arc as f64;
                pts.push(c.add(Point2::from_angle(ang_a + t * sweep).scale(r)));
            }
        }
        Polygon::new(pts).area()
    }

    #[test]
    fn curvilinear_triangle_area_against_polygon_oracle() {
        let tri = curvilinear_triangle(1.0).unwrap();
        let oracle = curvilinear_triangle_polygon_area(1.0, 333_334);
        assert!(
            (tri.area - oracle).abs() < 1e-9,
            "closed form {} vs oracle {}",
            tri.area,
            oracle
        );
        assert!((tri.chain.area().unwrap() - oracle).abs() < 1e-9);
        assert!((tri.area - (3.0_f64.sqrt() - PI / 2.0)).abs() < TOL);
    }

    #[test]
    fn curvilinear_triangle_arc_length() {
        let tri = curvilinear_triangle(1.0).unwrap();
        for a in &tri.chain.arcs {
            assert!((a.length() - PI / 3.0).abs() < TOL);
        }
        // Independent chord-sum oracle on one arc.
        let a = &tri.chain.arcs[0];
        let n = 200_000;
        let total: f64 =
            (0..n).map(|i| a.point_at(i as f64 / n as f64).dist(a.point_at((i + 1) as f64 / n as f64))).sum();
        assert!((total - PI / 3.0).abs() < 1e-9, "chord sum {total}");
    }

    #[test]
    fn curvilinear_triangle_degenerate_and_scaling() {
        let t0 = curvilinear_triangle(0.0).unwrap();
        assert_eq!(t0.area, 0.0);
        assert_eq!(t0.arc_length, 0.0);
        let t1 = curvilinear_triangle(1.3).unwrap();
        let t2 = curvilinear_triangle(2.6).unwrap();
        assert!((t2.area - 4.0 * t1.area).abs() < TOL);
    }

    #[test]
    fn curvilinear_triangle_cusp_tangents_hit_centroid() {
        let tri = curvilinear_triangle(1.0).unwrap();
        // At each cusp, the shared tangent of the adjacent arcs passes
        // through the centroid (the origin in the canonical frame).
        for k in 0..3 {
            let incoming = &tri.chain.arcs[(k + 2) % 3];
            let outgoing = &tri.chain.arcs[k];
            let t_in = incoming.endpoint_tangent(false).unwrap();
            let t_out = outgoing.endpoint_tangent(true).unwrap();
            assert!(
                (t_in.dot(t_out) + 1.0).abs() < 1e-12,
                "cusp tangents not opposite: {t_in:?} {t_out:?}"
            );
            let cusp = tri.cusps[k];
            // Line through cusp with direction t_out passes through origin.
            let dist = t_out.cross(Point2::new(0.0, 0.0).sub(cusp)).abs();
            assert!(dist < 1e-10, "cusp tangent misses centroid by {dist}");
        }
    }

    #[test]
    fn chain_area_rigid_motion_and_scaling() {
        let mut rng = seeded(11);
        for _ in 0..50 {
            let r = rng.f64_in(0.2, 2.0);
            let tri = curvilinear_triangle(r).unwrap();
            let base = tri.chain.area().unwrap();
            let angle = rng.f64_in(0.0, TAU);
            let shift = Point2::new(rng.f64_in(-3.0, 3.0), rng.f64_in(-3.0, 3.0));
            let moved = ArcChain::closed(
                tri.chain
                    .arcs
                    .iter()
                    .map(|a| CircArc::new(
                        a.start.rotated(angle).add(shift),
                        a.end.rotated(angle).add(shift),
                        a.kappa,
                    ))
                    .collect(),
            );
            assert!((moved.area().unwrap() - base).abs() < 1e-10);
            let lam = rng.f64_in(0.5, 2.0);
            let scaled = ArcChain::closed(
                tri.chain
                    .arcs
                    .iter()
                    .map(|a| CircArc::new(a.start.scale(lam), a.end.scale(lam), a.kappa / lam))
                    .collect(),
            );
            assert!((scaled.area().unwrap() - lam * lam * base).abs() < 1e-9);
        }
    }

    #[test]
    fn hypograph_identity_on_hypograph() {
        let mut g = GridSet::empty(Point2::new(0.0, 0.0), 1.0, 8, 8);
        for ix in 0..8 {
            let h = 1 + (ix % 5);
            for iy in 0..h {
                g.set(ix, iy, true);
            }
        }
        let w = WindowRect { ix0: 0, ix1: 8, iy0: 0, iy1: 8 };
        let out = hypograph_symmetrize(&g, w).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn hypograph_preserves_area_and_rejects_bad_band() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            let mut g = GridSet::empty(Point2::new(0.0, 0.0), 0.5, 12, 10);
            for ix in 0..12 {
                g.set(ix, 0, true);
                for iy in 1..9 {
                    g.set(ix, iy, rng.f64_in(0.0, 1.0) < 0.4);
                }
            }
            let w = WindowRect { ix0: 0, ix1: 12, iy0: 0, iy1: 10 };
            let out = hypograph_symmetrize(&g, w).unwrap();
            assert_eq!(out.cell_count(), g.cell_count());
        }
        let mut bad = GridSet::empty(Point2::new(0.0, 0.0), 1.0, 4, 4);
        bad.set(0, 3, true);
        bad.set(0, 0, true);
        let w = WindowRect { ix0: 0, ix1: 4, iy0: 0, iy1: 4 };
        assert!(hypograph_symmetrize(&bad, w).is_err());
    }

    #[test]
    fn hypograph_strictly_decreases_on_split_column() {
        // 16 x 16 raster, one column split into two runs.
        let mut g = GridSet::empty(Point2::new(0.0, 0.0), 1.0, 16, 16);
        for ix in 0..16 {
            g.set(ix, 0, true);
            for iy in 1..6 {
                g.set(ix, iy, true);
            }
        }
        g.set(7, 6, false);
        g.set(7, 5, false);
        g.set(7, 9, true);
        g.set(7, 10, true);
        let w = WindowRect { ix0: 0, ix1: 16, iy0: 0, iy1: 16 };
        let out = hypograph_symmetrize(&g, w).unwrap();
        let before = crate::lattice::crofton_perimeter_mask(&g, crate::lattice::Stencil::Sixteen);
        let after = crate::lattice::crofton_perimeter_mask(&out, crate::lattice::Stencil::Sixteen);
        assert_eq!(out.cell_count(), g.cell_count());
        assert!(after < before - 1e-9, "perimeter {before} -> {after}");
    }

    #[test]
    fn slice_of_rectangle_interior() {
        let mut g = GridSet::empty(Point2::new(0.0, 0.0), 1.0, 10, 10);
        for ix in 2..8 {
            for iy in 2..8 {
                g.set(ix, iy, true);
            }
        }
        let s = slice_traces(&g, 5.0, SliceAxis::Horizontal).unwrap();
        assert_eq!(s.intervals(), vec![(2, 8)]);
        assert!(s.traces_agree());
        let empty = slice_traces(&g, 1.2, SliceAxis::Horizontal).unwrap();
        assert_eq!(empty.intervals(), vec![]);
        assert!(slice_traces(&g, 40.0, SliceAxis::Horizontal).is_err());
    }

    #[test]
    fn slice_of_disk_matches_chord() {
        let n = 256;
        let cell = 2.4 / n as f64;
        let mut g = GridSet::empty(Point2::new(-1.2, -1.2), cell, n, n);
        let r = 1.0;
        g.fill_where(|p| p.norm() < r);
        let s = slice_traces(&g, 0.0, SliceAxis::Horizontal).unwrap();
        assert!((s.measure() - 2.0 * r).abs() < 2.0 * cell, "chord {}", s.measure());
        assert_eq!(s.intervals().len(), 1);
    }

    fn regular_polygon(n: usize, r: f64) -> Polygon {
        Polygon::new(
            (0..n).map(|i| Point2::from_angle(i as f64 / n as f64 * TAU).scale(r)).collect(),
        )
    }

    #[test]
    fn clip_disk_by_half_plane() {
        let disk = regular_polygon(100_000, 1.0);
        let half = Polygon::new(vec![
            Point2::new(-10.0, 0.0),
            Point2::new(10.0, 0.0),
            Point2::new(10.0, 10.0),
            Point2::new(-10.0, 10.0),
        ]);
        let (_, rep) = convex_clip_polygon(&disk, &half).unwrap();
        assert!((rep.perimeter_before - TAU).abs() < 1e-6);
        assert!((rep.perimeter_after - (PI + 2.0)).abs() < 1e-6);
        assert!(rep.strict);
    }

    #[test]
    fn clip_contained_polygon_is_identity() {
        let tri = Polygon::new(vec![
            Point2::new(0.1, 0.1),
            Point2::new(0.4, 0.15),
            Point2::new(0.2, 0.5),
        ]);
        let sq = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]);
        let (out, rep) = convex_clip_polygon(&tri, &sq).unwrap();
        assert!((rep.perimeter_after - rep.perimeter_before).abs() < 1e-12);
        assert!(rep.removed.abs() < 1e-12);
        assert!(!rep.strict);
        assert_eq!(out.vertices.len(), 3);
    }

    #[test]
    fn clip_rejects_nonconvex() {
        let bad = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(2.0, 1.0),
            Point2::new(0.0, 1.0),
        ]);
        let any = regular_polygon(8, 1.0);
        assert!(convex_clip_polygon(&any, &bad).is_err());
    }

    #[test]
    fn clip_never_increases_perimeter_seeded() {
        let sq = Polygon::new(vec![
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ]);
        let mut rng = seeded(17);
        for _ in 0..100 {
            // Star-shaped polygon about the origin stays simple after clipping.
            let n = 5 + (rng.next_u64() % 10) as usize;
            let poly = Polygon::new(
                (0..n)
                    .map(|i| {
                        let ang = i as f64 / n as f64 * TAU;
                        Point2::from_angle(ang).scale(rng.f64_in(0.2, 1.0))
                    })
                    .collect(),
            );
            let (_, rep) = convex_clip_polygon(&poly, &sq).unwrap();
            assert!(rep.perimeter_after <= rep.perimeter_before + 1e-9);
            if rep.removed > 1e-9 {
                assert!(rep.strict, "clipped area {} but perimeter equal", rep.removed);
            }
        }
    }

}
