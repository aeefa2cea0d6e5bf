//! Dry (`delta = 0`) minimizers on the ball: enumerate the straight-segment
//! network topologies compatible with a boundary trace, optimize junction
//! positions by damped Newton on the weighted length, and pick the global
//! minimum.
//!
//! Topologies are non-crossing forests whose leaves are the trace's jump
//! points, with interior junctions of degree exactly three; a junction may
//! also be pinned at a jump point (boundary triple junction), which
//! contracts its leaf edge. Interface cycles would bound island chambers,
//! which are never minimal here, so the forest restriction is exhaustive
//! for this regime. Junction degrees above three are rejected by
//! construction.

use crate::cluster::{
    ArcCluster, BoundaryTrace, Interface, Junction, JunctionKind, RegionLabel, Weights,
};
use crate::geom::{CircArc, Point2, PI, TAU};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Endpoint of a topology edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndRef {
    Jump(usize),
    Junction(usize),
}

/// Edge of the interface graph with the chamber labels of its two faces,
/// oriented `a -> b`. A contracted edge (from pinning a junction to a jump
/// point) stays in the list but is inactive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopoEdge {
    pub a: EndRef,
    pub b: EndRef,
    pub left: usize,
    pub right: usize,
    pub active: bool,
}

/// Interior junction: its three incident edges in counterclockwise order,
/// and an optional jump point it is pinned to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopoJunction {
    pub edges: Vec<usize>,
    pub pinned: Option<usize>,
}

/// One step of a face walk: a tree edge in a direction, or a boundary arc
/// (always traversed forward for inner faces).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceStep {
    Tree { edge: usize, forward: bool },
    Arc { index: usize },
}

/// Combinatorial face of the network: its ordered boundary walk (interior
/// on the left), the boundary arcs it touches, and the chamber label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopoFace {
    pub steps: Vec<FaceStep>,
    pub arcs: Vec<usize>,
    pub label: usize,
}

/// A candidate interface topology for a given trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Topology {
    pub n_jumps: usize,
    pub junctions: Vec<TopoJunction>,
    pub edges: Vec<TopoEdge>,
    pub faces: Vec<TopoFace>,
}

impl Topology {
    pub fn active_edges(&self) -> impl Iterator<Item = (usize, &TopoEdge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.active)
    }

    /// Compact signature for deduplication and test assertions.
    pub fn signature(&self) -> String {
        let mut edges: Vec<String> = self
            .active_edges()
            .map(|(_, e)| format!("{:?}-{:?}", e.a, e.b))
            .collect();
        edges.sort();
        let pins: Vec<String> = self
            .junctions
            .iter()
            .enumerate()
            .filter_map(|(k, j)| j.pinned.map(|p| format!("J{k}@{p}")))
            .collect();
        format!("{}|{}", edges.join(","), pins.join(","))
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Shape {
    Leaf(usize),
    Node(Box<Shape>, Box<Shape>),
}

fn subtree_shapes(leaves: &[usize]) -> Vec<Shape> {
    if leaves.len() == 1 {
        return vec![Shape::Leaf(leaves[0])];
    }
    let mut out = Vec::new();
    for split in 1..leaves.len() {
        for l in subtree_shapes(&leaves[..split]) {
            for r in subtree_shapes(&leaves[split..]) {
                out.push(Shape::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Non-crossing partitions of `items` (circularly ordered) into blocks of
/// at least two elements.
fn noncrossing_blocks(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let rest = &items[1..];
    let mut out = Vec::new();
    let n = rest.len();
    for mask in 0..(1u32 << n) {
        let chosen: Vec<usize> =
            (0..n).filter(|&k| mask & (1 << k) != 0).map(|k| rest[k]).collect();
        if chosen.is_empty() {
            continue; // blocks need at least two elements
        }
        let mut block = vec![first];
        block.extend(&chosen);
        // Gap segments between consecutive chosen elements are partitioned
        // independently (this is exactly the non-crossing condition).
        let mut gaps: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        let mut k = 0;
        for &it in rest {
            if k < chosen.len() && it == chosen[k] {
                gaps.push(std::mem::take(&mut cur));
                k += 1;
            } else {
                cur.push(it);
            }
        }
        gaps.push(cur);
        let mut partials: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for gap in &gaps {
            let sub = noncrossing_blocks(gap);
            let mut next = Vec::new();
            for p in &partials {
                for s in &sub {
                    let mut q = p.clone();
                    q.extend(s.iter().cloned());
                    next.push(q);
                }
            }
            partials = next;
        }
        out.extend(partials);
    }
    // Gaps with a single element cannot form a block; drop partitions
    // containing undersized blocks.
    out.retain(|p| p.iter().all(|b| b.len() >= 2));
    out
}

/// Builder state while materializing one forest.
struct Builder {
    n_jumps: usize,
    junctions: Vec<TopoJunction>,
    edges: Vec<(EndRef, EndRef)>,
    terminal_edge: Vec<Option<usize>>,
}

impl Builder {
    /// Materializes a subtree hanging from `parent_edge`, wiring junction
    /// rotations as `[parent, first-child, second-child]` counterclockwise.
    fn attach(&mut self, shape: &Shape, parent_edge: usize) -> EndRef {
        match shape {
            Shape::Leaf(t) => {
                self.terminal_edge[*t] = Some(parent_edge);
                EndRef::Jump(*t)
            }
            Shape::Node(l, r) => {
                let jid = self.junctions.len();
                self.junctions
                    .push(TopoJunction { edges: vec![parent_edge, 0, 0], pinned: None });
                let el = self.edges.len();
                self.edges.push((EndRef::Junction(jid), EndRef::Junction(usize::MAX)));
                self.junctions[jid].edges[1] = el;
                let end = self.attach(l, el);
                self.edges[el].1 = end;
                let er = self.edges.len();
                self.edges.push((EndRef::Junction(jid), EndRef::Junction(usize::MAX)));
                self.junctions[jid].edges[2] = er;
                let end = self.attach(r, er);
                self.edges[er].1 = end;
                EndRef::Junction(jid)
            }
        }
    }
}

/// Half-edge face extraction over the forest plus the boundary circle.
/// Returns the ordered walk of every inner face (interior on the left);
/// the outer face, which traverses every arc backward, is dropped.
fn extract_faces(
    n_jumps: usize,
    junctions: &[TopoJunction],
    edges: &[(EndRef, EndRef)],
    terminal_edge: &[Option<usize>],
) -> Vec<Vec<FaceStep>> {
    let n_tree = edges.len();
    // Halfedge ids: tree edge e forward = 2e, backward = 2e+1;
    // arc i forward (i -> i+1) = 2(n_tree+i), backward = +1.
    let he_count = 2 * (n_tree + n_jumps);
    let twin = |h: usize| h ^ 1;
    let out_he = |e: usize, v: EndRef| -> usize {
        if edges[e].0 == v {
            2 * e
        } else {
            2 * e + 1
        }
    };
    // Rotation: counterclockwise outgoing halfedges per vertex.
    let mut rot: Vec<Vec<usize>> = Vec::new();
    let mut rot_of_he = vec![(usize::MAX, usize::MAX); he_count];
    for t in 0..n_jumps {
        // At a boundary terminal, counterclockwise order is: arc towards
        // the next terminal, the tree edge (inward), arc towards the
        // previous terminal.
        let mut r = vec![2 * (n_tree + t)];
        if let Some(e) = terminal_edge[t] {
            r.push(out_he(e, EndRef::Jump(t)));
        }
        let prev_arc = (t + n_jumps - 1) % n_jumps;
        r.push(2 * (n_tree + prev_arc) + 1);
        let vid = rot.len();
        for (pos, &h) in r.iter().enumerate() {
            rot_of_he[h] = (vid, pos);
        }
        rot.push(r);
    }
    for (j, junc) in junctions.iter().enumerate() {
        let r: Vec<usize> = junc.edges.iter().map(|&e| out_he(e, EndRef::Junction(j))).collect();
        let vid = rot.len();
        for (pos, &h) in r.iter().enumerate() {
            rot_of_he[h] = (vid, pos);
        }
        rot.push(r);
    }
    // Face on the left: next(h) = counterclockwise-predecessor of twin(h)
    // at the head vertex.
    let next = |h: usize| -> usize {
        let (v, pos) = rot_of_he[twin(h)];
        let r = &rot[v];
        r[(pos + r.len() - 1) % r.len()]
    };
    let mut seen = vec![false; he_count];
    let mut faces = Vec::new();
    for h0 in 0..he_count {
        if seen[h0] {
            continue;
        }
        let mut steps = Vec::new();
        let mut any_fwd_arc = false;
        let mut h = h0;
        loop {
            seen[h] = true;
            let e = h / 2;
            if e < n_tree {
                steps.push(FaceStep::Tree { edge: e, forward: h % 2 == 0 });
            } else if h % 2 == 0 {
                steps.push(FaceStep::Arc { index: e - n_tree });
                any_fwd_arc = true;
            }
            // Backward arc halfedges only occur on the outer face.
            h = next(h);
            if h == h0 {
                break;
            }
        }
        if any_fwd_arc {
            faces.push(steps);
        }
    }
    faces
}

/// All non-isomorphic straight-segment topologies realizing the trace's
/// jump pattern, including boundary-pinned junction variants, with at most
/// `max_junctions` junctions. A constant trace yields the empty network.
pub fn enumerate_topologies(trace: &BoundaryTrace, max_junctions: usize) -> Result<Vec<Topology>> {
    let n = trace.jumps.len();
    let arc_labels: Vec<usize> = trace.arcs().iter().map(|&(_, _, l)| l).collect();
    if n == 0 {
        return Ok(vec![Topology {
            n_jumps: 0,
            junctions: vec![],
            edges: vec![],
            faces: vec![TopoFace { steps: vec![FaceStep::Arc { index: 0 }], arcs: vec![0], label: 1 }],
        }]);
    }
    let items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for partition in noncrossing_blocks(&items) {
        let block_shapes: Vec<Vec<Shape>> =
            partition.iter().map(|b| subtree_shapes(&b[1..])).collect();
        let mut idx = vec![0usize; partition.len()];
        loop {
            let mut b = Builder {
                n_jumps: n,
                junctions: vec![],
                edges: vec![],
                terminal_edge: vec![None; n],
            };
            for (bi, block) in partition.iter().enumerate() {
                let shape = &block_shapes[bi][idx[bi]];
                let eid = b.edges.len();
                b.edges.push((EndRef::Jump(block[0]), EndRef::Junction(usize::MAX)));
                b.terminal_edge[block[0]] = Some(eid);
                let end = b.attach(shape, eid);
                b.edges[eid].1 = end;
            }
            if b.junctions.len() <= max_junctions {
                if let Some(topo) = finish_topology(&b, &arc_labels) {
                    out.extend(pinned_variants(&topo));
                }
            }
            // Advance the mixed-radix shape index.
            let mut carry = true;
            for (i, ix) in idx.iter_mut().enumerate() {
                if !carry {
                    break;
                }
                *ix += 1;
                if *ix == block_shapes[i].len() {
                    *ix = 0;
                } else {
                    carry = false;
                }
            }
            if carry {
                break;
            }
        }
    }
    Ok(out)
}

/// Assigns faces and labels; rejects label-inconsistent forests.
fn finish_topology(b: &Builder, arc_labels: &[usize]) -> Option<Topology> {
    let walks = extract_faces(b.n_jumps, &b.junctions, &b.edges, &b.terminal_edge);
    let mut faces = Vec::with_capacity(walks.len());
    for steps in walks {
        let arcs: Vec<usize> = steps
            .iter()
            .filter_map(|s| match s {
                FaceStep::Arc { index } => Some(*index),
                _ => None,
            })
            .collect();
        let label = arc_labels[arcs[0]];
        if arcs.iter().any(|&a| arc_labels[a] != label) {
            return None;
        }
        faces.push(TopoFace { steps, arcs, label });
    }
    let mut left = vec![usize::MAX; b.edges.len()];
    let mut right = vec![usize::MAX; b.edges.len()];
    for (fi, face) in faces.iter().enumerate() {
        for s in &face.steps {
            if let FaceStep::Tree { edge, forward } = s {
                if *forward {
                    left[*edge] = fi;
                } else {
                    right[*edge] = fi;
                }
            }
        }
    }
    let mut edges = Vec::with_capacity(b.edges.len());
    for (e, &(a, bb)) in b.edges.iter().enumerate() {
        let (lf, rf) = (left[e], right[e]);
        if lf == usize::MAX || rf == usize::MAX {
            return None;
        }
        if faces[lf].label == faces[rf].label {
            return None; // edge would separate a chamber from itself
        }
        edges.push(TopoEdge {
            a,
            b: bb,
            left: faces[lf].label,
            right: faces[rf].label,
            active: true,
        });
    }
    Some(Topology { n_jumps: b.n_jumps, junctions: b.junctions.clone(), edges, faces })
}

/// The base topology plus every variant with a subset of junctions pinned
/// to adjacent jump points (their leaf edges contracted).
fn pinned_variants(base: &Topology) -> Vec<Topology> {
    let mut choices: Vec<Vec<Option<(usize, usize)>>> = Vec::new();
    for (jid, j) in base.junctions.iter().enumerate() {
        let mut c: Vec<Option<(usize, usize)>> = vec![None];
        for &e in &j.edges {
            let edge = &base.edges[e];
            let o = if edge.a == EndRef::Junction(jid) { edge.b } else { edge.a };
            if let EndRef::Jump(t) = o {
                c.push(Some((t, e)));
            }
        }
        choices.push(c);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut topo = base.clone();
        for (jid, &i) in idx.iter().enumerate() {
            if let Some((t, e)) = choices[jid][i] {
                topo.junctions[jid].pinned = Some(t);
                topo.edges[e].active = false;
            }
        }
        out.push(topo);
        let mut carry = true;
        for (i, ix) in idx.iter_mut().enumerate() {
            if !carry {
                break;
            }
            *ix += 1;
            if *ix == choices[i].len() {
                *ix = 0;
            } else {
                carry = false;
            }
        }
        if carry {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Geometric solve
// ---------------------------------------------------------------------------

/// A solved straight-segment network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JunctionNetwork {
    pub topology: Topology,
    /// Position per junction (pinned ones sit at their jump point).
    pub positions: Vec<Point2>,
    pub energy: f64,
    /// Largest sine-law spread over interior junctions.
    pub angle_residual: f64,
    pub converged: bool,
    pub feasible: bool,
    pub flags: Vec<String>,
}

/// A solved segment with its chamber labels.
#[derive(Debug, Clone, Copy)]
pub struct SolvedSegment {
    pub a: Point2,
    pub b: Point2,
    pub left: usize,
    pub right: usize,
}

impl JunctionNetwork {
    pub fn endpoint(&self, r: EndRef, jump_points: &[Point2]) -> Point2 {
        match r {
            EndRef::Jump(t) => jump_points[t],
            EndRef::Junction(j) => self.positions[j],
        }
    }

    pub fn segments(&self, jump_points: &[Point2]) -> Vec<SolvedSegment> {
        self.topology
            .active_edges()
            .map(|(_, e)| SolvedSegment {
                a: self.endpoint(e.a, jump_points),
                b: self.endpoint(e.b, jump_points),
                left: e.left,
                right: e.right,
            })
            .collect()
    }

    /// Triple junction points (interior and boundary-pinned).
    pub fn triple_junctions(&self) -> Vec<Point2> {
        self.positions.clone()
    }

    /// Arc-level cluster view of the network.
    pub fn to_cluster(&self, trace: &BoundaryTrace) -> ArcCluster {
        let jp = trace.jump_points();
        let active: Vec<usize> = self.topology.active_edges().map(|(i, _)| i).collect();
        let itf_of_edge = |e: usize| active.iter().position(|&x| x == e);
        let interfaces: Vec<Interface> = self
            .segments(&jp)
            .iter()
            .map(|s| Interface {
                arcs: vec![CircArc::segment(s.a, s.b)],
                left: RegionLabel::Chamber(s.left),
                right: RegionLabel::Chamber(s.right),
            })
            .collect();
        let mut junctions = Vec::new();
        for (j, junc) in self.topology.junctions.iter().enumerate() {
            junctions.push(Junction {
                point: self.positions[j],
                kind: if junc.pinned.is_some() {
                    JunctionKind::BoundaryJump
                } else {
                    JunctionKind::InteriorTriple
                },
                interfaces: junc.edges.iter().filter_map(|&e| itf_of_edge(e)).collect(),
            });
        }
        for (t, p) in jp.iter().enumerate() {
            let incident: Vec<usize> = active
                .iter()
                .enumerate()
                .filter(|(_, &e)| {
                    let edge = &self.topology.edges[e];
                    edge.a == EndRef::Jump(t) || edge.b == EndRef::Jump(t)
                })
                .map(|(i, _)| i)
                .collect();
            if !incident.is_empty() {
                junctions.push(Junction {
                    point: *p,
                    kind: JunctionKind::BoundaryJump,
                    interfaces: incident,
                });
            }
        }
        let background = RegionLabel::Chamber(trace.label_at(0.0));
        ArcCluster { interfaces, junctions, background }
    }
}

/// Minimizes the weighted segment length of a fixed topology over the free
/// junction positions (damped Newton with backtracking; the objective is
/// convex).
pub fn solve_network(
    topo: &Topology,
    trace: &BoundaryTrace,
    w: &Weights,
) -> Result<JunctionNetwork> {
    w.validate()?;
    trace.validate(w.n_chambers())?;
    let jp = trace.jump_points();
    let nj = topo.junctions.len();
    let free: Vec<bool> = topo.junctions.iter().map(|j| j.pinned.is_none()).collect();
    let mut pos: Vec<Point2> = topo
        .junctions
        .iter()
        .map(|j| match j.pinned {
            Some(t) => jp[t],
            None => Point2::new(0.0, 0.0),
        })
        .collect();
    let edge_w: Vec<f64> = topo.edges.iter().map(|e| w.0[e.left] + w.0[e.right]).collect();
    let active: Vec<usize> = topo.active_edges().map(|(i, _)| i).collect();

    // Neighbor-averaging warm start keeps free junctions distinct.
    for _ in 0..100 {
        let snapshot = pos.clone();
        for (j, junc) in topo.junctions.iter().enumerate() {
            if !free[j] {
                continue;
            }
            let mut acc = Point2::new(0.0, 0.0);
            let mut count = 0.0;
            for &e in &junc.edges {
                if !topo.edges[e].active {
                    continue;
                }
                let o = match other(topo, e, j) {
                    EndRef::Jump(t) => jp[t],
                    EndRef::Junction(k) => snapshot[k],
                };
                acc = acc.add(o);
                count += 1.0;
            }
            if count > 0.0 {
                pos[j] = acc.scale(1.0 / count);
            }
        }
    }

    let vars: Vec<usize> = (0..nj).filter(|&j| free[j]).collect();
    let nvar = 2 * vars.len();
    let mut flags = Vec::new();
    let mut converged = true;
    if nvar > 0 {
        let var_of: Vec<Option<usize>> = {
            let mut v = vec![None; nj];
            for (k, &j) in vars.iter().enumerate() {
                v[j] = Some(k);
            }
            v
        };
        let objective = |pos: &[Point2]| -> f64 {
            active
                .iter()
                .map(|&ei| {
                    let e = &topo.edges[ei];
                    let a = end_pos(e.a, pos, &jp);
                    let b = end_pos(e.b, pos, &jp);
                    edge_w[ei] * a.dist(b)
                })
                .sum()
        };
        let mut iter = 0;
        loop {
            iter += 1;
            let mut grad = vec![0.0; nvar];
            let mut hess = vec![vec![0.0; nvar]; nvar];
            for &ei in &active {
                let e = &topo.edges[ei];
                let wt = edge_w[ei];
                let a = end_pos(e.a, &pos, &jp);
                let b = end_pos(e.b, &pos, &jp);
                let d = b.sub(a);
                let len = d.norm().max(1e-14);
                let u = d.scale(1.0 / len);
                let hxx = wt * (1.0 - u.x * u.x) / len;
                let hxy = wt * (-u.x * u.y) / len;
                let hyy = wt * (1.0 - u.y * u.y) / len;
                let apply = |r: EndRef, sign: f64, grad: &mut Vec<f64>, hess: &mut Vec<Vec<f64>>| {
                    if let EndRef::Junction(j) = r {
                        if let Some(k) = var_of[j] {
                            grad[2 * k] += sign * wt * u.x;
                            grad[2 * k + 1] += sign * wt * u.y;
                            hess[2 * k][2 * k] += hxx;
                            hess[2 * k][2 * k + 1] += hxy;
                            hess[2 * k + 1][2 * k] += hxy;
                            hess[2 * k + 1][2 * k + 1] += hyy;
                        }
                    }
                };
                apply(e.b, 1.0, &mut grad, &mut hess);
                apply(e.a, -1.0, &mut grad, &mut hess);
                if let (EndRef::Junction(ja), EndRef::Junction(jb)) = (e.a, e.b) {
                    if let (Some(ka), Some(kb)) = (var_of[ja], var_of[jb]) {
                        for (r, c, v) in [
                            (2 * ka, 2 * kb, -hxx),
                            (2 * ka, 2 * kb + 1, -hxy),
                            (2 * ka + 1, 2 * kb, -hxy),
                            (2 * ka + 1, 2 * kb + 1, -hyy),
                        ] {
                            hess[r][c] += v;
                            hess[c][r] += v;
                        }
                    }
                }
            }
            let gnorm = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
            if gnorm < 1e-12 {
                break;
            }
            if iter > 200 {
                converged = false;
                flags.push(format!("no convergence after 200 iterations (|g|={gnorm:.2e})"));
                break;
            }
            let tr: f64 = (0..nvar).map(|i| hess[i][i]).sum::<f64>().max(1e-12);
            for i in 0..nvar {
                hess[i][i] += 1e-12 * tr;
            }
            let rhs: Vec<f64> = grad.iter().map(|&g| -g).collect();
            let step = solve_dense(hess, rhs);
            let f0 = objective(&pos);
            let g_dot_s: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial = pos.clone();
                for (k, &j) in vars.iter().enumerate() {
                    trial[j] = pos[j].add(Point2::new(step[2 * k], step[2 * k + 1]).scale(t));
                }
                if objective(&trial) <= f0 + 1e-4 * t * g_dot_s {
                    pos = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                converged = false;
                flags.push("line search stalled".into());
                break;
            }
        }
    }

    let energy: f64 = active
        .iter()
        .map(|&ei| {
            let e = &topo.edges[ei];
            end_pos(e.a, &pos, &jp).dist(end_pos(e.b, &pos, &jp)) * edge_w[ei]
        })
        .sum();
    let mut feasible = converged;
    let mut residual = 0.0f64;
    for (j, junc) in topo.junctions.iter().enumerate() {
        let dirs: Vec<(Point2, f64)> = junc
            .edges
            .iter()
            .filter(|&&e| topo.edges[e].active)
            .map(|&e| {
                let o = end_pos(other(topo, e, j), &pos, &jp);
                let d = o.sub(pos[j]);
                (d.scale(1.0 / d.norm().max(1e-14)), edge_w[e])
            })
            .collect();
        if junc.pinned.is_none() {
            // Sine law: sin(angle opposite edge i)/w_i equal across edges.
            let mut ratios = Vec::new();
            for i in 0..3 {
                let (u, v) = (dirs[(i + 1) % 3].0, dirs[(i + 2) % 3].0);
                let ang = (v.angle() - u.angle()).rem_euclid(TAU);
                let theta = ang.min(TAU - ang);
                ratios.push(theta.sin() / dirs[i].1);
            }
            let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
                - ratios.iter().cloned().fold(f64::MAX, f64::min);
            residual = residual.max(spread.abs());
            // The construction's counterclockwise rotation must be realized.
            let angles: Vec<f64> = dirs.iter().map(|(d, _)| d.angle()).collect();
            let ccw = (angles[1] - angles[0]).rem_euclid(TAU)
                < (angles[2] - angles[0]).rem_euclid(TAU);
            if !ccw {
                feasible = false;
                flags.push(format!("junction {j} embedding is flipped"));
            }
            if pos[j].norm() > 1.0 - 1e-9 {
                feasible = false;
                flags.push(format!("junction {j} leaves the open disk"));
            }
        } else {
            for (d, _) in &dirs {
                if pos[j].dot(*d) >= -1e-9 {
                    feasible = false;
                    flags.push(format!("pinned junction {j} edge does not enter the disk"));
                }
            }
        }
    }
    let segs: Vec<(Point2, Point2)> = active
        .iter()
        .map(|&ei| {
            let e = &topo.edges[ei];
            (end_pos(e.a, &pos, &jp), end_pos(e.b, &pos, &jp))
        })
        .collect();
    for (i, &(a1, b1)) in segs.iter().enumerate() {
        if a1.dist(b1) < 1e-9 {
            feasible = false;
            flags.push(format!("edge {i} collapsed"));
        }
        for (k, &(a2, b2)) in segs.iter().enumerate().skip(i + 1) {
            if segments_cross(a1, b1, a2, b2) {
                feasible = false;
                flags.push(format!("edges {i} and {k} cross"));
            }
        }
    }
    Ok(JunctionNetwork {
        topology: topo.clone(),
        positions: pos,
        energy,
        angle_residual: residual,
        converged,
        feasible,
        flags,
    })
}

fn other(topo: &Topology, e: usize, j: usize) -> EndRef {
    let edge = &topo.edges[e];
    if edge.a == EndRef::Junction(j) {
        edge.b
    } else {
        edge.a
    }
}

fn end_pos(r: EndRef, pos: &[Point2], jp: &[Point2]) -> Point2 {
    match r {
        EndRef::Jump(t) => jp[t],
        EndRef::Junction(j) => pos[j],
    }
}

fn segments_cross(a1: Point2, b1: Point2, a2: Point2, b2: Point2) -> bool {
    // Proper crossings only; shared endpoints are fine.
    let shared = |p: Point2, q: Point2| p.dist(q) < 1e-12;
    if shared(a1, a2) || shared(a1, b2) || shared(b1, a2) || shared(b1, b2) {
        return false;
    }
    let d1 = b1.sub(a1);
    let d2 = b2.sub(a2);
    let den = d1.cross(d2);
    if den.abs() < 1e-15 {
        return false;
    }
    let t = a2.sub(a1).cross(d2) / den;
    let u = a2.sub(a1).cross(d1) / den;
    t > 1e-12 && t < 1.0 - 1e-12 && u > 1e-12 && u < 1.0 - 1e-12
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            return vec![0.0; n];
        }
        for row in col + 1..n {
            let f = a[row][col] / d;
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    x
}

/// Outcome of [`best_dry`]: the minimum network, equal-energy ties, and
/// every other solved candidate ordered by energy.
#[derive(Debug, Clone)]
pub struct DrySolution {
    pub best: JunctionNetwork,
    pub ties: Vec<JunctionNetwork>,
    pub runners_up: Vec<JunctionNetwork>,
}

/// Solves every enumerated topology and returns the global minimum; ties
/// within 1e-9 are all reported, ordered by lexicographic junction
/// coordinates. Chamber convexity of the winner is verified.
pub fn best_dry(trace: &BoundaryTrace, w: &Weights, max_junctions: usize) -> Result<DrySolution> {
    let topologies = enumerate_topologies(trace, max_junctions)?;
    let mut solved: Vec<JunctionNetwork> = Vec::new();
    for t in &topologies {
        let net = solve_network(t, trace, w)?;
        if net.feasible {
            solved.push(net);
        }
    }
    if solved.is_empty() {
        return Err(Error::Solver("no feasible topology for this trace".into()));
    }
    solved.sort_by(|x, y| {
        x.energy
            .partial_cmp(&y.energy)
            .unwrap()
            .then_with(|| lex_positions(x).partial_cmp(&lex_positions(y)).unwrap())
    });
    let best_energy = solved[0].energy;
    let ties: Vec<JunctionNetwork> =
        solved.iter().filter(|n| n.energy <= best_energy + 1e-9).cloned().collect();
    let best = ties[0].clone();
    if !network_chambers_convex(&best, trace) {
        return Err(Error::Solver("winning network has a non-convex chamber".into()));
    }
    let runners_up = solved.into_iter().skip(1).collect();
    Ok(DrySolution { best, ties, runners_up })
}

fn lex_positions(n: &JunctionNetwork) -> Vec<f64> {
    let mut v: Vec<(f64, f64)> = n.positions.iter().map(|p| (p.x, p.y)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.into_iter().flat_map(|(x, y)| [x, y]).collect()
}

/// Convexity of every chamber face: walking each face with the interior on
/// the left, every vertex turn is a left turn (boundary arcs always curve
/// left; contracted edges are skipped as zero-length steps).
pub fn network_chambers_convex(net: &JunctionNetwork, trace: &BoundaryTrace) -> bool {
    let jp = trace.jump_points();
    let jump_angles: Vec<f64> = trace.jumps.iter().map(|j| j.angle).collect();
    for face in &net.topology.faces {
        let steps: Vec<FaceStep> = face
            .steps
            .iter()
            .copied()
            .filter(|s| match s {
                FaceStep::Tree { edge, .. } => net.topology.edges[*edge].active,
                FaceStep::Arc { .. } => true,
            })
            .collect();
        let n = steps.len();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let out_dir = step_dir(&steps[i], net, &jp, &jump_angles, true);
            let in_dir = step_dir(&steps[(i + n - 1) % n], net, &jp, &jump_angles, false);
            let turn = (out_dir - in_dir + PI).rem_euclid(TAU) - PI;
            if turn < -1e-9 {
                return false;
            }
        }
    }
    true
}

/// Traversal direction of a face step at its start or end vertex.
fn step_dir(
    step: &FaceStep,
    net: &JunctionNetwork,
    jp: &[Point2],
    jump_angles: &[f64],
    at_start: bool,
) -> f64 {
    match *step {
        FaceStep::Tree { edge, forward } => {
            let e = &net.topology.edges[edge];
            let (a, b) = if forward { (e.a, e.b) } else { (e.b, e.a) };
            net.endpoint(b, jp).sub(net.endpoint(a, jp)).angle()
        }
        FaceStep::Arc { index } => {
            let n = jump_angles.len();
            let theta = if at_start { jump_angles[index] } else { jump_angles[(index + 1) % n] };
            theta + PI / 2.0
        }
    }
}
