//! Polygonal curve networks: open and closed curves, triple junctions where
//! three curve ends meet, boundary points where a curve touches a free-slip
//! wall, and the region topology induced by the curves.
//!
//! Every segment carries the normal obtained by a clockwise quarter turn of its
//! direction; curve vertex order is chosen so that this normal points into the
//! curve's `plus` region.

mod assumptions;
mod io;
mod measure;

pub use assumptions::AssumptionReport;
pub use measure::{segment_normal, NodalValue};

use crate::error::{FlowError, Result};
use crate::geom::{Domain, Vec2, Wall, WallKind};

/// Vertex positions per curve, in curve order.
pub type CurvePositions = Vec<Vec<Vec2>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveEnd {
    Start,
    End,
}

impl CurveEnd {
    /// 1 for the first vertex, 2 for the last one.
    pub fn code(self) -> usize {
        match self {
            CurveEnd::Start => 1,
            CurveEnd::End => 2,
        }
    }

    pub fn from_code(c: usize) -> Option<Self> {
        match c {
            1 => Some(CurveEnd::Start),
            2 => Some(CurveEnd::End),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Vec2>,
    closed: bool,
}

impl PolyCurve {
    pub fn open(vertices: Vec<Vec2>) -> Self {
        Self { vertices, closed: false }
    }

    /// Closed curve; the first vertex is not repeated at the end.
    pub fn closed(vertices: Vec<Vec2>) -> Self {
        Self { vertices, closed: true }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_segments(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }

    /// Vertex indices of segment `j`.
    pub fn segment_nodes(&self, j: usize) -> (usize, usize) {
        (j, (j + 1) % self.vertices.len())
    }

    pub fn segment(&self, j: usize) -> (Vec2, Vec2) {
        let (a, b) = self.segment_nodes(j);
        (self.vertices[a], self.vertices[b])
    }

    pub fn endpoint_index(&self, end: CurveEnd) -> usize {
        match end {
            CurveEnd::Start => 0,
            CurveEnd::End => self.vertices.len() - 1,
        }
    }

    /// The single segment touching an end of an open curve.
    pub fn end_segment(&self, end: CurveEnd) -> usize {
        match end {
            CurveEnd::Start => 0,
            CurveEnd::End => self.num_segments() - 1,
        }
    }

    pub fn length(&self) -> f64 {
        (0..self.num_segments())
            .map(|j| {
                let (a, b) = self.segment(j);
                a.dist(b)
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JunctionMember {
    pub curve: usize,
    pub end: CurveEnd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleJunction {
    pub members: [JunctionMember; 3],
    /// Entries are +1 or -1.
    pub orientation: [i8; 3],
}

impl TripleJunction {
    pub fn sign(&self, j: usize) -> f64 {
        f64::from(self.orientation[j])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub curve: usize,
    pub end: CurveEnd,
    pub wall: Wall,
}

impl BoundaryPoint {
    pub fn wall_normal(&self) -> Vec2 {
        self.wall.outward_normal()
    }
}

/// Bounding curves of one region with signs: +1 when the curve normal is the
/// outward normal of the region, -1 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub curves: Vec<(usize, i8)>,
}

impl Region {
    pub fn new(curves: Vec<(usize, i8)>) -> Self {
        Self { curves }
    }

    pub fn sign_of(&self, curve: usize) -> Option<f64> {
        self.curves
            .iter()
            .find(|(c, _)| *c == curve)
            .map(|(_, s)| f64::from(*s))
    }
}

/// Role of an open-curve endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndRole {
    Junction { junction: usize, slot: usize },
    Boundary(usize),
}

#[derive(Clone, Debug)]
pub struct CurveNetwork {
    domain: Domain,
    curves: Vec<PolyCurve>,
    junctions: Vec<TripleJunction>,
    boundary_points: Vec<BoundaryPoint>,
    regions: Vec<Region>,
    plus: Vec<usize>,
    minus: Vec<usize>,
    end_roles: Vec<[Option<EndRole>; 2]>,
    /// Sorted perimeter parameters of the boundary points with the region that
    /// follows each one along the counter-clockwise walk.
    wall_intervals: Vec<(f64, usize, Vec2)>,
    wall_region_default: usize,
    dim: usize,
}

fn end_slot(end: CurveEnd) -> usize {
    match end {
        CurveEnd::Start => 0,
        CurveEnd::End => 1,
    }
}

impl CurveNetwork {
    /// Validates and freezes a network. Junction members are snapped onto the
    /// position of the first member and boundary points onto their wall.
    pub fn new(
        domain: Domain,
        curves: Vec<PolyCurve>,
        junctions: Vec<TripleJunction>,
        boundary_points: Vec<(usize, CurveEnd)>,
        regions: Vec<Region>,
    ) -> Result<Self> {
        Self::with_dim(domain, curves, junctions, boundary_points, regions, 2)
    }

    pub fn with_dim(
        domain: Domain,
        mut curves: Vec<PolyCurve>,
        junctions: Vec<TripleJunction>,
        boundary_points: Vec<(usize, CurveEnd)>,
        regions: Vec<Region>,
        dim: usize,
    ) -> Result<Self> {
        if dim != 2 {
            return Err(FlowError::Unsupported(format!("networks of dimension {dim}")));
        }
        if !(domain.width() > 0.0 && domain.height() > 0.0) {
            return Err(FlowError::Argument("domain box has no interior".into()));
        }
        let tol = 1e-12 * domain.diameter();
        let n_curves = curves.len();

        for (i, c) in curves.iter().enumerate() {
            let min_vertices = if c.closed { 3 } else { 2 };
            if c.vertices.len() < min_vertices {
                return Err(FlowError::Topology(format!(
                    "curve {i} has {} vertices, needs at least {min_vertices}",
                    c.vertices.len()
                )));
            }
            if c.vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
                return Err(FlowError::Geometry(format!("curve {i} has a non-finite vertex")));
            }
        }

        let mut end_roles: Vec<[Option<EndRole>; 2]> = vec![[None, None]; n_curves];
        let mut claim = |curve: usize, end: CurveEnd, role: EndRole| -> Result<()> {
            if curve >= n_curves {
                return Err(FlowError::Topology(format!("reference to unknown curve {curve}")));
            }
            if curves[curve].closed {
                return Err(FlowError::Topology(format!("closed curve {curve} has no ends")));
            }
            let slot = &mut end_roles[curve][end_slot(end)];
            if slot.is_some() {
                return Err(FlowError::Topology(format!(
                    "end {:?} of curve {curve} is claimed twice",
                    end
                )));
            }
            *slot = Some(role);
            Ok(())
        };

        for (k, jn) in junctions.iter().enumerate() {
            for (slot, m) in jn.members.iter().enumerate() {
                claim(m.curve, m.end, EndRole::Junction { junction: k, slot })?;
            }
            if jn.orientation.iter().any(|o| o.abs() != 1) {
                return Err(FlowError::Topology(format!("junction {k} orientation must be +-1")));
            }
        }
        let mut bpoints = Vec::with_capacity(boundary_points.len());
        for (b, &(curve, end)) in boundary_points.iter().enumerate() {
            claim(curve, end, EndRole::Boundary(b))?;
            let p = curves[curve].vertices[curves[curve].endpoint_index(end)];
            let walls = domain.walls_at(p, tol);
            let wall = match walls.as_slice() {
                [w] => *w,
                [] => {
                    return Err(FlowError::Topology(format!(
                        "boundary point {b} at ({}, {}) is not on the domain boundary",
                        p.x, p.y
                    )))
                }
                _ => {
                    return Err(FlowError::Topology(format!(
                        "boundary point {b} sits on a domain corner"
                    )))
                }
            };
            if domain.kind(wall) != WallKind::FreeSlip {
                return Err(FlowError::Topology(format!(
                    "boundary point {b} lies on the no-slip {} wall",
                    wall.name()
                )));
            }
            bpoints.push(BoundaryPoint { curve, end, wall });
        }
        for (i, roles) in end_roles.iter().enumerate() {
            if !curves[i].closed && (roles[0].is_none() || roles[1].is_none()) {
                return Err(FlowError::Topology(format!(
                    "curve {i} has a free end (neither junction nor boundary point)"
                )));
            }
        }

        // Snap coincident ends exactly.
        for (k, jn) in junctions.iter().enumerate() {
            let first = jn.members[0];
            let p0 = curves[first.curve].vertices[curves[first.curve].endpoint_index(first.end)];
            for m in &jn.members[1..] {
                let idx = curves[m.curve].endpoint_index(m.end);
                let p = curves[m.curve].vertices[idx];
                if p.dist(p0) > tol {
                    return Err(FlowError::Topology(format!(
                        "junction {k}: member ends do not coincide (distance {:e})",
                        p.dist(p0)
                    )));
                }
                curves[m.curve].vertices[idx] = p0;
            }
        }
        for bp in &bpoints {
            let idx = curves[bp.curve].endpoint_index(bp.end);
            let p = curves[bp.curve].vertices[idx];
            curves[bp.curve].vertices[idx] = domain.snap_to(p, bp.wall);
        }

        for (i, c) in curves.iter().enumerate() {
            for j in 0..c.num_segments() {
                let (a, b) = c.segment(j);
                if a == b {
                    return Err(FlowError::DegenerateSegment { curve: i, segment: j });
                }
            }
        }

        // Region sides.
        let mut plus = vec![usize::MAX; n_curves];
        let mut minus = vec![usize::MAX; n_curves];
        for (l, r) in regions.iter().enumerate() {
            for &(c, s) in &r.curves {
                if c >= n_curves {
                    return Err(FlowError::Topology(format!("region {l} references curve {c}")));
                }
                let side = match s {
                    1 => &mut minus[c],
                    -1 => &mut plus[c],
                    _ => {
                        return Err(FlowError::Topology(format!(
                            "region {l}: orientation of curve {c} must be +-1"
                        )))
                    }
                };
                if *side != usize::MAX {
                    return Err(FlowError::Topology(format!(
                        "curve {c} has the same side in two regions"
                    )));
                }
                *side = l;
            }
        }
        for i in 0..n_curves {
            if plus[i] == usize::MAX || minus[i] == usize::MAX {
                return Err(FlowError::Topology(format!(
                    "curve {i} must bound exactly two regions with opposite signs"
                )));
            }
            if plus[i] == minus[i] {
                return Err(FlowError::Topology(format!("curve {i} separates a region from itself")));
            }
        }
        if regions.is_empty() {
            return Err(FlowError::Topology("network has no regions".into()));
        }

        let mut net = CurveNetwork {
            domain,
            curves,
            junctions,
            boundary_points: bpoints,
            regions,
            plus,
            minus,
            end_roles,
            wall_intervals: Vec::new(),
            wall_region_default: 0,
            dim,
        };
        net.check_junction_orientation()?;
        net.build_wall_intervals()?;
        net.check_areas()?;
        net.probe_sides()?;
        Ok(net)
    }

    /// Same topology with new vertex positions.
    pub fn with_positions(&self, positions: CurvePositions) -> Result<Self> {
        if positions.len() != self.curves.len()
            || positions
                .iter()
                .zip(&self.curves)
                .any(|(p, c)| p.len() != c.vertices.len())
        {
            return Err(FlowError::Argument("positions do not match the network shape".into()));
        }
        let curves = positions
            .into_iter()
            .zip(&self.curves)
            .map(|(v, c)| PolyCurve { vertices: v, closed: c.closed })
            .collect();
        CurveNetwork::with_dim(
            self.domain.clone(),
            curves,
            self.junctions.clone(),
            self.boundary_points.iter().map(|b| (b.curve, b.end)).collect(),
            self.regions.clone(),
            self.dim,
        )
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curves(&self) -> &[PolyCurve] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &PolyCurve {
        &self.curves[i]
    }

    pub fn num_curves(&self) -> usize {
        self.curves.len()
    }

    pub fn junctions(&self) -> &[TripleJunction] {
        &self.junctions
    }

    pub fn boundary_points(&self) -> &[BoundaryPoint] {
        &self.boundary_points
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    /// Region the curve normal points into.
    pub fn plus_region(&self, curve: usize) -> usize {
        self.plus[curve]
    }

    /// Region on the opposite side of the curve normal.
    pub fn minus_region(&self, curve: usize) -> usize {
        self.minus[curve]
    }

    pub fn end_role(&self, curve: usize, end: CurveEnd) -> Option<EndRole> {
        self.end_roles[curve][end_slot(end)]
    }

    pub fn positions(&self) -> CurvePositions {
        self.curves.iter().map(|c| c.vertices.clone()).collect()
    }

    pub fn total_vertices(&self) -> usize {
        self.curves.iter().map(|c| c.vertices.len()).sum()
    }

    pub fn total_segments(&self) -> usize {
        self.curves.iter().map(|c| c.num_segments()).sum()
    }

    /// Whether vertex `k` of curve `i` is neither a junction member nor a
    /// boundary point.
    pub fn is_interior_vertex(&self, i: usize, k: usize) -> bool {
        let c = &self.curves[i];
        c.closed || (k != 0 && k + 1 != c.vertices.len())
    }

    /// Region containing `p`, decided by the first interface crossing of the
    /// ray in the +x direction (vertices on the ray count as lying above it).
    pub fn region_of(&self, p: Vec2) -> usize {
        let mut best: Option<(f64, f64, usize, bool)> = None;
        for (i, c) in self.curves.iter().enumerate() {
            for j in 0..c.num_segments() {
                let (a, b) = c.segment(j);
                if (a.y > p.y) == (b.y > p.y) {
                    continue;
                }
                let dy = b.y - a.y;
                let slope = (b.x - a.x) / dy;
                let xi = a.x + (p.y - a.y) * slope;
                if xi < p.x {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bx, bs, _, _)) => {
                        let scale = 1e-14 * (1.0 + bx.abs());
                        xi < bx - scale || ((xi - bx).abs() <= scale && slope < bs)
                    }
                };
                if better {
                    best = Some((xi, slope, i, dy > 0.0));
                }
            }
        }
        match best {
            Some((_, _, i, upward)) => {
                if upward {
                    self.minus[i]
                } else {
                    self.plus[i]
                }
            }
            None => {
                let q = Vec2::new(self.domain.max.x, p.y.clamp(self.domain.min.y, self.domain.max.y));
                self.wall_region_at(self.domain.perimeter_param(q, Wall::Right))
            }
        }
    }

    /// Region adjacent to the domain boundary at perimeter parameter `s`.
    pub fn wall_region_at(&self, s: f64) -> usize {
        if self.wall_intervals.is_empty() {
            return self.wall_region_default;
        }
        let s = s.rem_euclid(self.domain.perimeter());
        let mut region = self.wall_intervals.last().map(|w| w.1).unwrap_or(0);
        for &(sk, r, _) in &self.wall_intervals {
            if sk <= s {
                region = r;
            } else {
                break;
            }
        }
        region
    }

    /// Perimeter pieces `(start, end, region)` covering the boundary once,
    /// with `end` possibly exceeding the perimeter for the wrapping piece.
    pub fn wall_pieces(&self) -> Vec<(f64, f64, usize)> {
        let per = self.domain.perimeter();
        if self.wall_intervals.is_empty() {
            return vec![(0.0, per, self.wall_region_default)];
        }
        let n = self.wall_intervals.len();
        (0..n)
            .map(|k| {
                let (s0, r, _) = self.wall_intervals[k];
                let s1 = if k + 1 < n { self.wall_intervals[k + 1].0 } else { self.wall_intervals[0].0 + per };
                (s0, s1, r)
            })
            .collect()
    }

    /// Boundary polylines between consecutive boundary points, counter-clockwise,
    /// with the region they belong to. Endpoints are the exact boundary point
    /// coordinates; without boundary points the whole perimeter is returned as
    /// one closed polyline.
    pub fn wall_polylines(&self) -> Vec<(usize, Vec<Vec2>)> {
        let d = &self.domain;
        let per = d.perimeter();
        let corners = d.corners();
        let cparams = d.corner_params();
        if self.wall_intervals.is_empty() {
            let mut pts = corners.to_vec();
            pts.push(corners[0]);
            return vec![(self.wall_region_default, pts)];
        }
        let n = self.wall_intervals.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let (s0, r, p0) = self.wall_intervals[k];
            let (s1, _, p1) = self.wall_intervals[(k + 1) % n];
            let s1 = if k + 1 < n { s1 } else { s1 + per };
            let mut pts = vec![p0];
            for wrap in [0.0, per] {
                for (c, &cp) in corners.iter().zip(&cparams) {
                    let cs = cp + wrap;
                    if cs > s0 && cs < s1 {
                        pts.push(*c);
                    }
                }
            }
            pts.push(p1);
            out.push((r, pts));
        }
        out
    }

    fn check_junction_orientation(&self) -> Result<()> {
        for (k, jn) in self.junctions.iter().enumerate() {
            let mut signs = [0.0; 3];
            for (j, m) in jn.members.iter().enumerate() {
                let c = &self.curves[m.curve];
                let seg = c.end_segment(m.end);
                let (a, b) = c.segment(seg);
                let nu = (b - a).rot_cw();
                let away = match m.end {
                    CurveEnd::Start => b - a,
                    CurveEnd::End => a - b,
                };
                signs[j] = jn.sign(j) * nu.dot(away.rot_ccw()).signum();
            }
            if signs[0] != signs[1] || signs[1] != signs[2] {
                return Err(FlowError::Topology(format!(
                    "junction {k}: orientation triple is inconsistent with the curve normals"
                )));
            }
        }
        Ok(())
    }

    fn build_wall_intervals(&mut self) -> Result<()> {
        let mut entries: Vec<(f64, usize, usize, Vec2)> = Vec::new();
        for (b, bp) in self.boundary_points.iter().enumerate() {
            let c = &self.curves[bp.curve];
            let p = c.vertices[c.endpoint_index(bp.end)];
            let (a, q) = c.segment(c.end_segment(bp.end));
            let nu = (q - a).rot_cw();
            let t = bp.wall.ccw_tangent();
            let (before, after) = if nu.dot(t) > 0.0 {
                (self.minus[bp.curve], self.plus[bp.curve])
            } else {
                (self.plus[bp.curve], self.minus[bp.curve])
            };
            let _ = b;
            entries.push((self.domain.perimeter_param(p, bp.wall), before, after, p));
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = entries.len();
        for k in 0..n {
            let next = &entries[(k + 1) % n];
            if entries[k].2 != next.1 {
                return Err(FlowError::Topology(format!(
                    "wall piece after boundary parameter {} is claimed by regions {} and {}",
                    entries[k].0, entries[k].2, next.1
                )));
            }
            if n > 1 && next.0 == entries[k].0 {
                return Err(FlowError::Topology("two boundary points coincide".into()));
            }
        }
        self.wall_intervals = entries.iter().map(|e| (e.0, e.2, e.3)).collect();
        if n == 0 {
            let raw: Vec<f64> = (0..self.regions.len()).map(|l| self.curve_flux_area(l)).collect();
            let (l, s) = raw
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(l, s)| (l, *s))
                .unwrap_or((0, 0.0));
            if self.regions.len() > 1 && s >= 0.0 {
                return Err(FlowError::Topology("no region touches the domain walls".into()));
            }
            self.wall_region_default = l;
        }
        Ok(())
    }

    fn check_areas(&self) -> Result<()> {
        let total: f64 = (0..self.regions.len())
            .map(|l| self.region_area(l))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum();
        let omega = self.domain.area();
        if (total - omega).abs() > 1e-10 * omega {
            return Err(FlowError::Topology(format!(
                "region areas sum to {total}, domain area is {omega}"
            )));
        }
        Ok(())
    }

    fn probe_sides(&self) -> Result<()> {
        for (i, c) in self.curves.iter().enumerate() {
            let (j, len) = (0..c.num_segments())
                .map(|j| {
                    let (a, b) = c.segment(j);
                    (j, a.dist(b))
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("curve has segments");
            let (a, b) = c.segment(j);
            let mid = a.lerp(b, 0.5);
            let nu = (b - a).rot_cw() / len;
            let eps = 1e-7 * len;
            let p_plus = self.region_of(mid + nu * eps);
            let p_minus = self.region_of(mid - nu * eps);
            if p_plus != self.plus[i] || p_minus != self.minus[i] {
                return Err(FlowError::Topology(format!(
                    "curve {i}: normal side probe finds regions ({p_plus}, {p_minus}), topology says ({}, {})",
                    self.plus[i], self.minus[i]
                )));
            }
        }
        Ok(())
    }
}

/// Orientation entry for a junction member so that the signed normals turn
/// counter-clockwise around the junction.
pub fn junction_orientation(curve: &PolyCurve, end: CurveEnd) -> i8 {
    let (a, b) = curve.segment(curve.end_segment(end));
    let nu = (b - a).rot_cw();
    let away = match end {
        CurveEnd::Start => b - a,
        CurveEnd::End => a - b,
    };
    if nu.dot(away.rot_ccw()) >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn square_domain() -> Domain {
        Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4])
    }

    /// Counter-clockwise regular polygon around `c`.
    pub fn ngon(c: Vec2, r: f64, n: usize) -> Vec<Vec2> {
        (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                c + Vec2::new(t.cos(), t.sin()) * r
            })
            .collect()
    }

    /// One closed bubble: region 0 outside, region 1 inside.
    pub fn bubble(r: f64, n: usize) -> CurveNetwork {
        CurveNetwork::new(
            square_domain(),
            vec![PolyCurve::closed(ngon(Vec2::new(0.5, 0.5), r, n))],
            vec![],
            vec![],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap()
    }

    /// Horizontal line y = 0.5 across a box with free-slip side walls:
    /// region 0 below, region 1 above.
    pub fn flat_line(n: usize) -> CurveNetwork {
        let d = Domain::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
        );
        let pts = (0..=n).map(|k| Vec2::new(k as f64 / n as f64, 0.5)).collect();
        CurveNetwork::new(
            d,
            vec![PolyCurve::open(pts)],
            vec![],
            vec![(0, CurveEnd::Start), (0, CurveEnd::End)],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap()
    }

    /// Three straight curves from (0.5, 0.5) to the left, right and top walls
    /// of a free-slip unit box; regions: 0 lower, 1 upper left, 2 upper right.
    pub fn t_junction() -> CurveNetwork {
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::FreeSlip; 4]);
        let c = Vec2::new(0.5, 0.5);
        let left = PolyCurve::open(vec![c, Vec2::new(0.25, 0.5), Vec2::new(0.0, 0.5)]);
        let right = PolyCurve::open(vec![c, Vec2::new(0.75, 0.5), Vec2::new(1.0, 0.5)]);
        let up = PolyCurve::open(vec![c, Vec2::new(0.5, 0.75), Vec2::new(0.5, 1.0)]);
        // left runs -x: normal (0,1) points up into region 1.
        // right runs +x: normal (0,-1) points down into region 0.
        // up runs +y: normal (1,0) points into region 2.
        let o = [
            junction_orientation(&left, CurveEnd::Start),
            junction_orientation(&right, CurveEnd::Start),
            junction_orientation(&up, CurveEnd::Start),
        ];
        CurveNetwork::new(
            d,
            vec![left, right, up],
            vec![TripleJunction {
                members: [
                    JunctionMember { curve: 0, end: CurveEnd::Start },
                    JunctionMember { curve: 1, end: CurveEnd::Start },
                    JunctionMember { curve: 2, end: CurveEnd::Start },
                ],
                orientation: o,
            }],
            vec![(0, CurveEnd::End), (1, CurveEnd::End), (2, CurveEnd::End)],
            vec![
                Region::new(vec![(0, 1), (1, -1)]),
                Region::new(vec![(0, -1), (2, 1)]),
                Region::new(vec![(1, 1), (2, -1)]),
            ],
        )
        .unwrap()
    }
}
