//! Instance descriptions (weights, wet-area budget, boundary trace or
//! chamber masses), the arc-level cluster representation, and exact energy
//! evaluation.

use crate::geom::{ArcChain, CircArc, Point2, TAU};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Region label: chamber `0..=N` (0 is the exterior) or the wet region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Chamber(usize),
    Wet,
}

impl RegionLabel {
    pub fn is_wet(self) -> bool {
        matches!(self, RegionLabel::Wet)
    }
}

impl Serialize for RegionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RegionLabel::Chamber(i) => s.serialize_u64(*i as u64),
            RegionLabel::Wet => s.serialize_str("G"),
        }
    }
}

impl<'de> Deserialize<'de> for RegionLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|i| RegionLabel::Chamber(i as usize))
                .ok_or_else(|| serde::de::Error::custom("bad chamber index")),
            serde_json::Value::String(s) if s == "G" => Ok(RegionLabel::Wet),
            _ => Err(serde::de::Error::custom("expected chamber index or \"G\"")),
        }
    }
}

/// Perimeter weights `c_0..c_N`, all strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub Vec<f64>);

impl Weights {
    pub fn equal(n_chambers: usize) -> Self {
        Weights(vec![1.0; n_chambers + 1])
    }

    /// Number of interior chambers (excludes the exterior chamber 0).
    pub fn n_chambers(&self) -> usize {
        self.0.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.len() < 2 {
            return Err(Error::InvalidInstance("need at least c0 and c1".into()));
        }
        if self.0.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidInstance("weights must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn is_equal(&self) -> bool {
        self.0.iter().all(|&c| (c - self.0[0]).abs() < 1e-12)
    }

    /// Cost of a region: the chamber weight, or zero for the wet region.
    pub fn cost(&self, l: RegionLabel) -> f64 {
        match l {
            RegionLabel::Chamber(i) => self.0[i],
            RegionLabel::Wet => 0.0,
        }
    }

    /// Cost per unit length of an interface between two regions.
    pub fn pair_cost(&self, a: RegionLabel, b: RegionLabel) -> f64 {
        self.cost(a) + self.cost(b)
    }
}

/// Result of the strict triangle inequality scan over pair costs.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleReport {
    pub ok: bool,
    /// A violating triple `(l, m, i)` with `c_lm >= c_li + c_im`, if any.
    pub violation: Option<(usize, usize, usize)>,
}

/// Checks `c_lm < c_li + c_im` for all distinct triples, which for pair
/// costs `c_lm = c_l + c_m` is equivalent to positivity of every weight.
pub fn check_triangle(w: &Weights) -> TriangleReport {
    let n = w.0.len();
    for l in 0..n {
        for m in 0..n {
            for i in 0..n {
                if l == m || m == i || i == l {
                    continue;
                }
                let clm = w.0[l] + w.0[m];
                let cli = w.0[l] + w.0[i];
                let cim = w.0[i] + w.0[m];
                if !(clm < cli + cim) {
                    return TriangleReport { ok: false, violation: Some((l, m, i)) };
                }
            }
        }
    }
    TriangleReport { ok: true, violation: None }
}

/// One jump of the boundary trace: from this angle on, the trace takes
/// `label` (until the next jump, cyclically).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub angle: f64,
    pub label: usize,
}

/// Boundary condition on the unit circle as an ordered list of jumps.
/// An empty list means the constant trace with label 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub jumps: Vec<Jump>,
}

impl BoundaryTrace {
    pub fn new(jumps: Vec<Jump>) -> Self {
        BoundaryTrace { jumps }
    }

    pub fn constant() -> Self {
        BoundaryTrace { jumps: vec![] }
    }

    pub fn validate(&self, n_chambers: usize) -> Result<()> {
        let n = self.jumps.len();
        if n == 1 {
            return Err(Error::InvalidInstance("a single jump cannot close up".into()));
        }
        for (i, j) in self.jumps.iter().enumerate() {
            if !(0.0..TAU).contains(&j.angle) {
                return Err(Error::InvalidInstance(format!(
                    "jump angle {} outside [0, 2pi)",
                    j.angle
                )));
            }
            if j.label < 1 || j.label > n_chambers {
                return Err(Error::InvalidInstance(format!("label {} out of range", j.label)));
            }
            if i > 0 && j.angle <= self.jumps[i - 1].angle {
                return Err(Error::InvalidInstance("jump angles must strictly increase".into()));
            }
        }
        for i in 0..n {
            if self.jumps[i].label == self.jumps[(i + 1) % n].label {
                return Err(Error::InvalidInstance(format!(
                    "adjacent labels equal at jump {i}"
                )));
            }
        }
        Ok(())
    }

    /// Trace label at angle `theta` (any real angle).
    pub fn label_at(&self, theta: f64) -> usize {
        if self.jumps.is_empty() {
            return 1;
        }
        let t = theta.rem_euclid(TAU);
        // Last jump with angle <= t, wrapping to the final jump below the first.
        let mut label = self.jumps.last().unwrap().label;
        for j in &self.jumps {
            if j.angle <= t {
                label = j.label;
            } else {
                break;
            }
        }
        label
    }

    /// Jump positions on the circle.
    pub fn jump_points(&self) -> Vec<Point2> {
        self.jumps.iter().map(|j| Point2::from_angle(j.angle)).collect()
    }

    /// Arcs `(start_angle, end_angle, label)` with `end > start` (the last
    /// wraps past `2pi`).
    pub fn arcs(&self) -> Vec<(f64, f64, usize)> {
        let n = self.jumps.len();
        if n == 0 {
            return vec![(0.0, TAU, 1)];
        }
        (0..n)
            .map(|i| {
                let a = self.jumps[i].angle;
                let mut b = self.jumps[(i + 1) % n].angle;
                if b <= a {
                    b += TAU;
                }
                (a, b, self.jumps[i].label)
            })
            .collect()
    }

    /// The same trace rotated by `phi`, re-sorted into `[0, 2pi)`.
    pub fn rotated(&self, phi: f64) -> BoundaryTrace {
        let mut jumps: Vec<Jump> = self
            .jumps
            .iter()
            .map(|j| Jump { angle: (j.angle + phi).rem_euclid(TAU), label: j.label })
            .collect();
        jumps.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
        BoundaryTrace { jumps }
    }
}

/// Problem domain: trace-constrained unit ball or mass-constrained plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Ball,
    Plane,
}

/// A full problem instance.
///
/// Serializes to the fixed-field-order JSON document
/// `{"domain":"ball","weights":[...],"delta":...,"trace":[...]}` or
/// `{"domain":"plane","weights":[...],"delta":...,"masses":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub domain: String,
    pub weights: Vec<f64>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Jump>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
}

impl InstanceSpec {
    pub fn ball(weights: Weights, delta: f64, trace: BoundaryTrace) -> Self {
        InstanceSpec {
            domain: "ball".into(),
            weights: weights.0,
            delta,
            trace: Some(trace.jumps),
            masses: None,
        }
    }

    pub fn plane(weights: Weights, delta: f64, masses: Vec<f64>) -> Self {
        InstanceSpec {
            domain: "plane".into(),
            weights: weights.0,
            delta,
            trace: None,
            masses: Some(masses),
        }
    }

    pub fn kind(&self) -> Result<DomainKind> {
        match self.domain.as_str() {
            "ball" => Ok(DomainKind::Ball),
            "plane" => Ok(DomainKind::Plane),
            other => Err(Error::InvalidInstance(format!("unknown domain {other:?}"))),
        }
    }

    pub fn weights_checked(&self) -> Result<Weights> {
        let w = Weights(self.weights.clone());
        w.validate()?;
        Ok(w)
    }

    pub fn trace_checked(&self) -> Result<BoundaryTrace> {
        let t = BoundaryTrace::new(self.trace.clone().unwrap_or_default());
        t.validate(self.weights.len() - 1)?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        self.weights_checked()?;
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidInstance(format!("bad delta {}", self.delta)));
        }
        match kind {
            DomainKind::Ball => {
                if self.masses.is_some() {
                    return Err(Error::InvalidInstance("ball instance carries masses".into()));
                }
                self.trace_checked()?;
            }
            DomainKind::Plane => {
                if self.trace.is_some() {
                    return Err(Error::InvalidInstance("plane instance carries a trace".into()));
                }
                let masses = self
                    .masses
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInstance("plane instance needs masses".into()))?;
                if masses.len() != self.weights.len() - 1 {
                    return Err(Error::InvalidInstance(
                        "need one mass per interior chamber".into(),
                    ));
                }
                if masses.iter().any(|&m| !(m > 0.0)) {
                    return Err(Error::InvalidInstance("masses must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: InstanceSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Junction classification in an arc cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JunctionKind {
    InteriorCusp,
    BoundaryCorner,
    InteriorTriple,
    BoundaryJump,
}

/// A tagged interface curve: a run of arcs with the region labels on each
/// side of the traversal direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub arcs: Vec<CircArc>,
    pub left: RegionLabel,
    pub right: RegionLabel,
}

impl Interface {
    pub fn length(&self) -> f64 {
        self.arcs.iter().map(|a| a.length()).sum()
    }

    pub fn is_wet(&self) -> bool {
        self.left.is_wet() || self.right.is_wet()
    }

    pub fn start(&self) -> Point2 {
        self.arcs.first().expect("non-empty interface").start
    }

    pub fn end(&self) -> Point2 {
        self.arcs.last().expect("non-empty interface").end
    }
}

/// A junction of the interface graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub point: Point2,
    pub kind: JunctionKind,
    /// Indices into the cluster's interface list.
    pub interfaces: Vec<usize>,
}

/// Arc-level cluster: tagged interior interfaces plus a junction graph.
/// On the ball, the boundary circle itself is implicit (relative energy
/// convention); interfaces along it are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcCluster {
    pub interfaces: Vec<Interface>,
    pub junctions: Vec<Junction>,
    /// Label of the whole domain when there are no interfaces.
    pub background: RegionLabel,
}

impl ArcCluster {
    pub fn empty(background: RegionLabel) -> Self {
        ArcCluster { interfaces: vec![], junctions: vec![], background }
    }

    pub fn validate_geometry(&self) -> Result<()> {
        for (i, itf) in self.interfaces.iter().enumerate() {
            if itf.arcs.is_empty() {
                return Err(Error::InvalidChain(format!("interface {i} has no arcs")));
            }
            ArcChain::open(itf.arcs.clone()).validate()?;
            if itf.left == itf.right {
                return Err(Error::InvalidChain(format!(
                    "interface {i} has equal labels on both sides"
                )));
            }
            if itf.left.is_wet() && itf.right.is_wet() {
                return Err(Error::InvalidChain(format!("interface {i} is wet on both sides")));
            }
        }
        Ok(())
    }

    /// Label of the region containing `q`, by the side of the nearest
    /// interface point. Exact for clusters whose interfaces partition the
    /// domain; undefined exactly on interfaces.
    pub fn label_at(&self, q: Point2) -> RegionLabel {
        let mut best = f64::INFINITY;
        let mut label = self.background;
        for itf in &self.interfaces {
            for a in &itf.arcs {
                let d = a.distance_to(q);
                if d < best {
                    best = d;
                    label = if a.side_of(q) >= 0.0 { itf.left } else { itf.right };
                }
            }
        }
        label
    }

    /// Relative energy: interface length times pair cost, wet side free.
    pub fn energy(&self, w: &Weights) -> f64 {
        self.interfaces.iter().map(|i| i.length() * w.pair_cost(i.left, i.right)).sum()
    }

    /// Total wet area: stitches wet-tagged interfaces into closed loops and
    /// sums their areas. Boundary pieces close up at their corner point.
    pub fn wet_area(&self) -> Result<f64> {
        let wet: Vec<&Interface> = self.interfaces.iter().filter(|i| i.is_wet()).collect();
        if wet.is_empty() {
            return Ok(0.0);
        }
        let mut arcs: Vec<CircArc> = Vec::new();
        for itf in &wet {
            // Orient every wet arc with the wet region on the left.
            for a in &itf.arcs {
                arcs.push(if itf.left.is_wet() { *a } else { a.reversed() });
            }
        }
        let mut used = vec![false; arcs.len()];
        let key = |p: Point2| ((p.x / 1e-9).round() as i64, (p.y / 1e-9).round() as i64);
        let mut total = 0.0;
        for s in 0..arcs.len() {
            if used[s] {
                continue;
            }
            let mut loop_arcs = vec![arcs[s]];
            used[s] = true;
            let start_key = key(arcs[s].start);
            let mut cursor = key(arcs[s].end);
            while cursor != start_key {
                let next = (0..arcs.len())
                    .find(|&j| !used[j] && key(arcs[j].start) == cursor)
                    .ok_or_else(|| {
                        Error::InvalidChain("wet interfaces do not close into loops".into())
                    })?;
                used[next] = true;
                cursor = key(arcs[next].end);
                loop_arcs.push(arcs[next]);
            }
            let chain = ArcChain::closed(loop_arcs);
            total += chain.signed_area()?.abs();
        }
        Ok(total)
    }
}

/// Per-check outcome of [`validate_cluster`].
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub wet_area: f64,
    pub wet_ok: bool,
    /// Boundary trace agreement (ball) or chamber masses (plane).
    pub constraint_ok: bool,
    pub constraint_detail: String,
    /// Containment of every boundary circular segment in its chamber.
    pub containment_ok: bool,
    pub containment_detail: String,
}

impl AdmissibilityReport {
    pub fn all_ok(&self) -> bool {
        self.wet_ok && self.constraint_ok && self.containment_ok
    }
}

/// Admissibility of an arc cluster against an instance: wet-area budget,
/// trace (or mass) agreement, and circular-segment containment.
pub fn validate_cluster(cluster: &ArcCluster, spec: &InstanceSpec) -> Result<AdmissibilityReport> {
    spec.validate()?;
    cluster.validate_geometry()?;
    let wet_area = cluster.wet_area()?;
    let wet_ok = wet_area <= spec.delta + 1e-10;

    let (constraint_ok, constraint_detail) = match spec.kind()? {
        DomainKind::Ball => {
            let trace = spec.trace_checked()?;
            let mut mismatches = 0usize;
            let samples = 720;
            let mut checked = 0usize;
            'outer: for k in 0..samples {
                let theta = (k as f64 + 0.5) / samples as f64 * TAU;
                for j in &trace.jumps {
                    if angular_dist(theta, j.angle) < 5e-3 {
                        continue 'outer;
                    }
                }
                checked += 1;
                let q = Point2::from_angle(theta).scale(1.0 - 1e-4);
                if cluster.label_at(q) != RegionLabel::Chamber(trace.label_at(theta)) {
                    mismatches += 1;
                }
            }
            (mismatches == 0, format!("{mismatches} mismatches over {checked} samples"))
        }
        DomainKind::Plane => {
            let masses = spec.masses.clone().unwrap_or_default();
            let areas = chamber_areas(cluster, masses.len())?;
            let mut ok = true;
            let mut detail = String::new();
            for (i, (&m, &a)) in masses.iter().zip(areas.iter()).enumerate() {
                let rel = (a - m).abs() / m.max(1e-300);
                if rel > 1e-8 {
                    ok = false;
                }
                detail.push_str(&format!("chamber {}: area {a:.9} vs mass {m:.9}; ", i + 1));
            }
            (ok, detail)
        }
    };

    let (containment_ok, containment_detail) = match spec.kind()? {
        DomainKind::Ball => segment_containment(cluster, &spec.trace_checked()?),
        DomainKind::Plane => (true, "not applicable".into()),
    };

    Ok(AdmissibilityReport {
        wet_area,
        wet_ok,
        constraint_ok,
        constraint_detail,
        containment_ok,
        containment_detail,
    })
}

fn angular_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Checks that each circular segment bounded by a trace arc and its chord
/// lies inside the corresponding chamber, by deterministic point sampling.
fn segment_containment(cluster: &ArcCluster, trace: &BoundaryTrace) -> (bool, String) {
    let mut ok = true;
    let mut detail = String::new();
    for (idx, (a, b, label)) in trace.arcs().iter().copied().enumerate() {
        if b - a >= TAU - 1e-12 {
            continue; // constant trace, no chord
        }
        let pa = Point2::from_angle(a);
        let pb = Point2::from_angle(b);
        let chord = pb.sub(pa);
        let mid_arc = Point2::from_angle((a + b) / 2.0);
        let seg_side = chord.cross(mid_arc.sub(pa)).signum();
        let mut bad = 0usize;
        let mut total = 0usize;
        // Sample between the chord and the arc along rays from the chord
        // midpoint toward the arc.
        let n_u = 24;
        let n_v = 8;
        for iu in 0..n_u {
            for iv in 0..n_v {
                let u = (iu as f64 + 0.5) / n_u as f64;
                let v = (iv as f64 + 0.5) / n_v as f64;
                let on_chord = pa.add(chord.scale(u));
                let ang = a + (b - a) * u;
                let on_arc = Point2::from_angle(ang);
                let q = on_chord.add(on_arc.sub(on_chord).scale(v));
                // Stay strictly inside the segment.
                if q.norm() > 1.0 - 1e-6 {
                    continue;
                }
                if chord.cross(q.sub(pa)).signum() != seg_side {
                    continue;
                }
                total += 1;
                if cluster.label_at(q) != RegionLabel::Chamber(label) {
                    bad += 1;
                }
            }
        }
        if bad > 0 {
            ok = false;
            detail.push_str(&format!("segment {idx} (label {label}): {bad}/{total} outside; "));
        }
    }
    if detail.is_empty() {
        detail = "all segments contained".into();
    }
    (ok, detail)
}

/// Chamber areas of a plane cluster, by stitching each chamber's boundary
/// interfaces into loops.
fn chamber_areas(cluster: &ArcCluster, n_chambers: usize) -> Result<Vec<f64>> {
    let key = |p: Point2| ((p.x / 1e-9).round() as i64, (p.y / 1e-9).round() as i64);
    let mut areas = vec![0.0; n_chambers];
    for (ci, area) in areas.iter_mut().enumerate() {
        let label = RegionLabel::Chamber(ci + 1);
        let mut arcs: Vec<CircArc> = Vec::new();
        for itf in &cluster.interfaces {
            if itf.left == label {
                arcs.extend(itf.arcs.iter().copied());
            } else if itf.right == label {
                arcs.extend(itf.arcs.iter().map(|a| a.reversed()));
            }
        }
        let mut used = vec![false; arcs.len()];
        for s in 0..arcs.len() {
            if used[s] {
                continue;
            }
            let mut loop_arcs = vec![arcs[s]];
            used[s] = true;
            let start_key = key(arcs[s].start);
            let mut cursor = key(arcs[s].end);
            while cursor != start_key {
                let next = (0..arcs.len())
                    .find(|&j| !used[j] && key(arcs[j].start) == cursor)
                    .ok_or_else(|| {
                        Error::InvalidChain(format!("chamber {} boundary does not close", ci + 1))
                    })?;
                used[next] = true;
                cursor = key(arcs[next].end);
                loop_arcs.push(arcs[next]);
            }
            *area += ArcChain::closed(loop_arcs).signed_area()?;
        }
        *area = area.abs();
    }
    Ok(areas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diameter_cluster() -> ArcCluster {
        ArcCluster {
            interfaces: vec![Interface {
                arcs: vec![CircArc::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0))],
                left: RegionLabel::Chamber(1),
                right: RegionLabel::Chamber(2),
            }],
            junctions: vec![],
            background: RegionLabel::Chamber(1),
        }
    }

    #[test]
    fn diameter_split_energy() {
        let c = diameter_cluster();
        let w = Weights(vec![1.0, 1.0, 1.0]);
        assert!((c.energy(&w) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_invariant_under_resplitting() {
        let mut c = diameter_cluster();
        let w = Weights(vec![1.0, 1.0, 1.0]);
        let base = c.energy(&w);
        let arc = c.interfaces[0].arcs[0];
        let (a, b) = arc.split_at(0.37);
        c.interfaces[0].arcs = vec![a, b];
        assert!((c.energy(&w) - base).abs() < 1e-12);
    }

    #[test]
    fn energy_invariant_under_relabeling() {
        let c = diameter_cluster();
        let w = Weights(vec![1.0, 0.7, 1.3]);
        let base = c.energy(&w);
        // Swap chambers 1 and 2 together with their weights.
        let mut swapped = c.clone();
        swapped.interfaces[0].left = RegionLabel::Chamber(2);
        swapped.interfaces[0].right = RegionLabel::Chamber(1);
        let w2 = Weights(vec![1.0, 1.3, 0.7]);
        assert!((swapped.energy(&w2) - base).abs() < 1e-12);
    }

    #[test]
    fn triangle_inequalities() {
        assert!(check_triangle(&Weights(vec![1.0, 1.0, 1.0, 1.0])).ok);
        assert!(check_triangle(&Weights(vec![1.0, 2.0, 3.0])).ok);
        let bad = check_triangle(&Weights(vec![1.0, -0.5, 3.0]));
        assert!(!bad.ok);
        assert!(bad.violation.is_some());
    }

    #[test]
    fn trace_labels_and_arcs() {
        let t = BoundaryTrace::new(vec![
            Jump { angle: 0.0, label: 1 },
            Jump { angle: std::f64::consts::PI, label: 2 },
        ]);
        t.validate(2).unwrap();
        assert_eq!(t.label_at(1.0), 1);
        assert_eq!(t.label_at(4.0), 2);
        assert_eq!(t.label_at(-0.1), 2);
        assert_eq!(t.arcs().len(), 2);
        assert_eq!(BoundaryTrace::constant().label_at(2.0), 1);
    }

    #[test]
    fn trace_validation_rejects_bad_input() {
        assert!(BoundaryTrace::new(vec![Jump { angle: 0.0, label: 1 }]).validate(2).is_err());
        let same = BoundaryTrace::new(vec![
            Jump { angle: 0.0, label: 1 },
            Jump { angle: 1.0, label: 1 },
        ]);
        assert!(same.validate(2).is_err());
        let unsorted = BoundaryTrace::new(vec![
            Jump { angle: 2.0, label: 1 },
            Jump { angle: 1.0, label: 2 },
        ]);
        assert!(unsorted.validate(2).is_err());
    }

    #[test]
    fn instance_json_schema_is_stable() {
        let spec = InstanceSpec::ball(
            Weights(vec![1.0, 1.0, 1.0]),
            0.01,
            BoundaryTrace::new(vec![
                Jump { angle: 0.0, label: 1 },
                Jump { angle: std::f64::consts::PI, label: 2 },
            ]),
        );
        let json = spec.to_json();
        assert_eq!(
            json,
            "{\"domain\":\"ball\",\"weights\":[1.0,1.0,1.0],\"delta\":0.01,\
             \"trace\":[{\"angle\":0.0,\"label\":1},{\"angle\":3.141592653589793,\"label\":2}]}"
        );
        let back = InstanceSpec::from_json(&json).unwrap();
        assert_eq!(back, spec);

        let plane = InstanceSpec::plane(Weights(vec![1.0, 1.0]), 0.0, vec![0.5]);
        assert_eq!(
            plane.to_json(),
            "{\"domain\":\"plane\",\"weights\":[1.0,1.0],\"delta\":0.0,\"masses\":[0.5]}"
        );
    }

    #[test]
    fn instance_validation() {
        let mut spec = InstanceSpec::ball(Weights(vec![1.0, 1.0]), 0.0, BoundaryTrace::constant());
        spec.validate().unwrap();
        spec.delta = -1.0;
        assert!(spec.validate().is_err());
        let nomass = InstanceSpec {
            domain: "plane".into(),
            weights: vec![1.0, 1.0],
            delta: 0.0,
            trace: None,
            masses: None,
        };
        assert!(nomass.validate().is_err());
    }

    #[test]
    fn label_at_sides_of_diameter() {
        let c = diameter_cluster();
        assert_eq!(c.label_at(Point2::new(0.0, 0.5)), RegionLabel::Chamber(1));
        assert_eq!(c.label_at(Point2::new(0.0, -0.5)), RegionLabel::Chamber(2));
    }

    #[test]
    fn wet_area_of_stitched_triangle() {
        let tri = crate::geom::curvilinear_triangle(0.3).unwrap();
        let interfaces = tri
            .chain
            .arcs
            .iter()
            .enumerate()
            .map(|(k, a)| Interface {
                arcs: vec![*a],
                left: RegionLabel::Wet,
                right: RegionLabel::Chamber(k + 1),
            })
            .collect();
        let c = ArcCluster { interfaces, junctions: vec![], background: RegionLabel::Chamber(1) };
        let area = c.wet_area().unwrap();
        assert!((area - tri.area).abs() < 1e-12);
    }
}
