//! Adaptive bisection meshes of the box domain.
//!
//! The macro mesh splits the box into squares of side `H` (the shorter box
//! side), each cut along its diagonal. Triangles are stored as `[v0, v1, v2]`
//! with refinement edge `(v1, v2)`; bisection at the midpoint `m` yields
//! `[m, v0, v1]` and `[m, v2, v0]`. Every adapted mesh is rebuilt from the
//! macro mesh, so all meshes of a run share one bisection forest.

mod cut;
mod locate;

pub use locate::barycentric;

pub use cut::{
    classify_elements, classify_with, clip_elements, phase_average_coefficients, region_loops,
    CutElement, CutGeometry, RegionIncidence, RegionPiece, SubSegment,
};

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{FlowError, Result};
use crate::geom::{orient, Domain, Vec2, Wall, WallKind};
use crate::network::CurveNetwork;

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub verts: [usize; 3],
    pub children: Option<[usize; 2]>,
    pub level: u32,
}

/// Refinement targets: elements near the interface reach diameter
/// `H / 2^fine`, all others `H / 2^coarse`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdaptLevels {
    pub fine: u32,
    pub coarse: u32,
}

impl AdaptLevels {
    pub fn new(fine: u32, coarse: u32) -> Result<Self> {
        if coarse > fine {
            return Err(FlowError::Argument(format!(
                "coarse level {coarse} exceeds fine level {fine}"
            )));
        }
        if fine > 14 {
            return Err(FlowError::Argument(format!("fine level {fine} is beyond the depth cap")));
        }
        Ok(Self { fine, coarse })
    }
}

#[derive(Clone, Debug)]
pub struct BulkMesh {
    domain: Domain,
    h_macro: f64,
    vertices: Vec<Vec2>,
    nodes: Vec<Node>,
    roots: Vec<usize>,
    triangles: Vec<[usize; 3]>,
    leaf_node: Vec<usize>,
    node_leaf: Vec<usize>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_wall: Vec<Option<Wall>>,
    vertex_walls: Vec<u8>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn tri_diameter(p: [Vec2; 3]) -> f64 {
    p[0].dist(p[1]).max(p[1].dist(p[2])).max(p[2].dist(p[0]))
}

struct Refiner {
    vertices: Vec<Vec2>,
    nodes: Vec<Node>,
    roots: Vec<usize>,
    active: Vec<bool>,
    edge_owner: HashMap<(usize, usize), [usize; 2]>,
    midpoint: HashMap<(usize, usize), usize>,
}

const NONE: usize = usize::MAX;

impl Refiner {
    fn macro_mesh(domain: &Domain) -> Result<(Self, f64)> {
        let (w, h) = (domain.width(), domain.height());
        let hm = w.min(h);
        let nx = (w / hm).round() as usize;
        let ny = (h / hm).round() as usize;
        if ((nx as f64) * hm - w).abs() > 1e-12 * w || ((ny as f64) * hm - h).abs() > 1e-12 * h {
            return Err(FlowError::Mesh(format!(
                "box sides {w} x {h} are not integer multiples of {hm}"
            )));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = if i == nx { domain.max.x } else { domain.min.x + i as f64 * hm };
                let y = if j == ny { domain.max.y } else { domain.min.y + j as f64 * hm };
                vertices.push(Vec2::new(x, y));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut r = Refiner {
            vertices,
            nodes: Vec::new(),
            roots: Vec::new(),
            active: Vec::new(),
            edge_owner: HashMap::new(),
            midpoint: HashMap::new(),
        };
        for j in 0..ny {
            for i in 0..nx {
                let t1 = [id(i + 1, j), id(i + 1, j + 1), id(i, j)];
                let t2 = [id(i, j + 1), id(i, j), id(i + 1, j + 1)];
                for t in [t1, t2] {
                    let n = r.push_node(t, 0);
                    r.roots.push(n);
                }
            }
        }
        Ok((r, hm))
    }

    fn push_node(&mut self, verts: [usize; 3], level: u32) -> usize {
        let n = self.nodes.len();
        self.nodes.push(Node { verts, children: None, level });
        self.active.push(true);
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let e = self.edge_owner.entry(key(verts[a], verts[b])).or_insert([NONE, NONE]);
            if e[0] == NONE {
                e[0] = n;
            } else {
                e[1] = n;
            }
        }
        n
    }

    fn drop_node(&mut self, n: usize) {
        self.active[n] = false;
        let verts = self.nodes[n].verts;
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let k = key(verts[a], verts[b]);
            if let Some(e) = self.edge_owner.get_mut(&k) {
                if e[0] == n {
                    e[0] = e[1];
                    e[1] = NONE;
                } else if e[1] == n {
                    e[1] = NONE;
                }
                if e[0] == NONE {
                    self.edge_owner.remove(&k);
                }
            }
        }
    }

    fn ref_edge(&self, n: usize) -> (usize, usize) {
        let v = self.nodes[n].verts;
        key(v[1], v[2])
    }

    fn neighbour(&self, n: usize, e: (usize, usize)) -> Option<usize> {
        let o = self.edge_owner.get(&e)?;
        [o[0], o[1]].into_iter().find(|&m| m != NONE && m != n)
    }

    fn bisect(&mut self, n: usize) {
        let [v0, v1, v2] = self.nodes[n].verts;
        let k = key(v1, v2);
        let m = match self.midpoint.get(&k) {
            Some(&m) => m,
            None => {
                let m = self.vertices.len();
                self.vertices.push(self.vertices[v1].lerp(self.vertices[v2], 0.5));
                self.midpoint.insert(k, m);
                m
            }
        };
        self.drop_node(n);
        let level = self.nodes[n].level + 1;
        let a = self.push_node([m, v0, v1], level);
        let b = self.push_node([m, v2, v0], level);
        self.nodes[n].children = Some([a, b]);
    }

    /// Bisects `n` together with whatever the conforming closure requires.
    fn refine(&mut self, n: usize, depth: usize) -> Result<()> {
        if !self.active[n] {
            return Ok(());
        }
        if depth > 200 {
            return Err(FlowError::Mesh("conforming closure does not terminate".into()));
        }
        let e = self.ref_edge(n);
        loop {
            match self.neighbour(n, e) {
                Some(nb) if self.ref_edge(nb) != e => self.refine(nb, depth + 1)?,
                _ => break,
            }
        }
        let nb = self.neighbour(n, e);
        self.bisect(n);
        if let Some(nb) = nb {
            self.bisect(nb);
        }
        Ok(())
    }

    fn finish(mut self, domain: Domain, h_macro: f64) -> BulkMesh {
        self.renumber_vertices();
        let mut triangles = Vec::new();
        let mut leaf_node = Vec::new();
        let mut node_leaf = vec![NONE; self.nodes.len()];
        let mut stack: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            match self.nodes[n].children {
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
                None => {
                    node_leaf[n] = triangles.len();
                    triangles.push(self.nodes[n].verts);
                    leaf_node.push(n);
                }
            }
        }
        BulkMesh::assemble(domain, h_macro, self.vertices, self.nodes, self.roots, triangles, leaf_node, node_leaf)
    }
}

impl Refiner {
    /// Numbers vertices by first appearance in the leaf pre-order, so the
    /// numbering depends only on the refinement tree.
    fn renumber_vertices(&mut self) {
        let mut map = vec![NONE; self.vertices.len()];
        let mut next = 0;
        let mut stack: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            match self.nodes[n].children {
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
                None => {
                    for v in self.nodes[n].verts {
                        if map[v] == NONE {
                            map[v] = next;
                            next += 1;
                        }
                    }
                }
            }
        }
        let mut verts = vec![Vec2::ZERO; next];
        for (old, &new) in map.iter().enumerate() {
            if new != NONE {
                verts[new] = self.vertices[old];
            }
        }
        for node in &mut self.nodes {
            node.verts = node.verts.map(|v| map[v]);
        }
        self.vertices = verts;
    }
}

/// Uniform bucket grid over interface segments for distance queries.
struct SegmentGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<(Vec2, Vec2)>>,
}

impl SegmentGrid {
    fn new(domain: &Domain, net: &CurveNetwork, cell: f64) -> Self {
        let nx = ((domain.width() / cell).ceil() as usize).clamp(1, 4096);
        let ny = ((domain.height() / cell).ceil() as usize).clamp(1, 4096);
        let cell = (domain.width() / nx as f64).max(domain.height() / ny as f64);
        let mut g = SegmentGrid { origin: domain.min, cell, nx, ny, buckets: vec![Vec::new(); nx * ny] };
        for c in net.curves() {
            for j in 0..c.num_segments() {
                let (a, b) = c.segment(j);
                let (i0, j0) = g.cell_of(Vec2::new(a.x.min(b.x), a.y.min(b.y)));
                let (i1, j1) = g.cell_of(Vec2::new(a.x.max(b.x), a.y.max(b.y)));
                for jj in j0..=j1 {
                    for ii in i0..=i1 {
                        g.buckets[jj * nx + ii].push((a, b));
                    }
                }
            }
        }
        g
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.cell).floor();
        let j = ((p.y - self.origin.y) / self.cell).floor();
        (
            (i.max(0.0) as usize).min(self.nx - 1),
            (j.max(0.0) as usize).min(self.ny - 1),
        )
    }

    /// Whether some segment passes within `r` of `p`.
    fn any_within(&self, p: Vec2, r: f64) -> bool {
        let (i0, j0) = self.cell_of(p - Vec2::new(r, r));
        let (i1, j1) = self.cell_of(p + Vec2::new(r, r));
        let r2 = r * r;
        for jj in j0..=j1 {
            for ii in i0..=i1 {
                for &(a, b) in &self.buckets[jj * self.nx + ii] {
                    if point_segment_dist_sq(p, a, b) <= r2 {
                        return true;
                    }
                }
            }
        }
        false
    }
}

pub(crate) fn point_segment_dist_sq(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let l2 = d.norm_sq();
    let t = if l2 > 0.0 { ((p - a).dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (a + d * t - p).norm_sq()
}

impl BulkMesh {
    /// The unrefined macro mesh of `domain`.
    pub fn macro_mesh(domain: &Domain) -> Result<Self> {
        let (r, hm) = Refiner::macro_mesh(domain)?;
        Ok(r.finish(domain.clone(), hm))
    }

    /// Uniform mesh with every element bisected `level` times.
    pub fn uniform(domain: &Domain, level: u32) -> Result<Self> {
        let (mut r, hm) = Refiner::macro_mesh(domain)?;
        for _ in 0..level {
            let act: Vec<usize> = (0..r.nodes.len()).filter(|&n| r.active[n]).collect();
            for n in act {
                if r.nodes[n].level < level {
                    r.refine(n, 0)?;
                }
            }
        }
        Ok(r.finish(domain.clone(), hm))
    }

    /// Mesh refined from the macro mesh towards `net`.
    pub fn adapted(domain: &Domain, net: &CurveNetwork, levels: AdaptLevels) -> Result<Self> {
        let (mut r, hm) = Refiner::macro_mesh(domain)?;
        let fine = hm / f64::from(1u32 << levels.fine);
        let coarse = hm / f64::from(1u32 << levels.coarse);
        let grid = SegmentGrid::new(domain, net, 2.0 * fine);
        let max_level = 2 * levels.fine + 4;
        for _pass in 0..(4 * max_level as usize + 8) {
            let mut marked = Vec::new();
            for n in 0..r.nodes.len() {
                if !r.active[n] {
                    continue;
                }
                let v = r.nodes[n].verts.map(|i| r.vertices[i]);
                let diam = tri_diameter(v);
                if diam <= fine * (1.0 + 1e-9) {
                    continue;
                }
                let target = if diam <= coarse * (1.0 + 1e-9) {
                    let c = (v[0] + v[1] + v[2]) / 3.0;
                    let reach = v.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
                    if grid.any_within(c, diam + reach) {
                        fine
                    } else {
                        coarse
                    }
                } else {
                    coarse
                };
                if diam > target * (1.0 + 1e-9) {
                    marked.push(n);
                }
            }
            if marked.is_empty() {
                return Ok(r.finish(domain.clone(), hm));
            }
            for n in marked {
                if r.nodes[n].level >= max_level {
                    return Err(FlowError::Mesh(format!("refinement depth cap {max_level} exceeded")));
                }
                r.refine(n, 0)?;
            }
        }
        Err(FlowError::Mesh("adaptation did not settle".into()))
    }

    /// Re-adapts towards `net` from the shared macro mesh.
    pub fn adapt(&self, net: &CurveNetwork, fine: u32, coarse: u32) -> Result<Self> {
        BulkMesh::adapted(&self.domain, net, AdaptLevels::new(fine, coarse)?)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        domain: Domain,
        h_macro: f64,
        vertices: Vec<Vec2>,
        nodes: Vec<Node>,
        roots: Vec<usize>,
        triangles: Vec<[usize; 3]>,
        leaf_node: Vec<usize>,
        node_leaf: Vec<usize>,
    ) -> Self {
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let mut te = [0; 3];
            for (l, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                let k = key(t[a], t[b]);
                te[l] = *edge_id.entry(k).or_insert_with(|| {
                    edges.push([k.0, k.1]);
                    edges.len() - 1
                });
            }
            tri_edges.push(te);
        }
        let vertex_walls: Vec<u8> = vertices
            .iter()
            .map(|&p| {
                domain
                    .walls_at(p, 0.0)
                    .into_iter()
                    .fold(0u8, |m, w| m | (1 << w.index()))
            })
            .collect();
        let edge_wall = edges
            .iter()
            .map(|&[a, b]| {
                let common = vertex_walls[a] & vertex_walls[b];
                Wall::ALL.into_iter().find(|w| common & (1 << w.index()) != 0)
            })
            .collect();
        BulkMesh {
            domain,
            h_macro,
            vertices,
            nodes,
            roots,
            triangles,
            leaf_node,
            node_leaf,
            edges,
            tri_edges,
            edge_wall,
            vertex_walls,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Side length of the macro squares.
    pub fn macro_size(&self) -> f64 {
        self.h_macro
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Global edge ids of the local edges `(0,1)`, `(1,2)`, `(2,0)`.
    pub fn element_edges(&self, e: usize) -> [usize; 3] {
        self.tri_edges[e]
    }

    pub fn edge_wall(&self, edge: usize) -> Option<Wall> {
        self.edge_wall[edge]
    }

    /// Bit set of the walls vertex `v` lies on.
    pub fn vertex_wall_mask(&self, v: usize) -> u8 {
        self.vertex_walls[v]
    }

    pub fn element_points(&self, e: usize) -> [Vec2; 3] {
        self.triangles[e].map(|i| self.vertices[i])
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let p = self.element_points(e);
        0.5 * orient(p[0], p[1], p[2])
    }

    pub fn element_diameter(&self, e: usize) -> f64 {
        tri_diameter(self.element_points(e))
    }

    pub fn element_level(&self, e: usize) -> u32 {
        self.nodes[self.leaf_node[e]].level
    }

    pub fn element_centroid(&self, e: usize) -> Vec2 {
        let p = self.element_points(e);
        (p[0] + p[1] + p[2]) / 3.0
    }

    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub(crate) fn leaf_of_node(&self, n: usize) -> Option<usize> {
        let l = self.node_leaf[n];
        (l != NONE).then_some(l)
    }

    pub(crate) fn node_points(&self, n: usize) -> [Vec2; 3] {
        self.nodes[n].verts.map(|i| self.vertices[i])
    }

    /// Leaves whose bounding box meets the box `[lo, hi]`.
    pub fn elements_in_box(&self, lo: Vec2, hi: Vec2) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.roots.clone();
        while let Some(n) = stack.pop() {
            let p = self.node_points(n);
            let bx0 = p[0].x.min(p[1].x).min(p[2].x);
            let bx1 = p[0].x.max(p[1].x).max(p[2].x);
            let by0 = p[0].y.min(p[1].y).min(p[2].y);
            let by1 = p[0].y.max(p[1].y).max(p[2].y);
            if bx1 < lo.x || bx0 > hi.x || by1 < lo.y || by0 > hi.y {
                continue;
            }
            match self.nodes[n].children {
                Some([a, b]) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => out.push(self.node_leaf[n]),
            }
        }
        out.sort_unstable();
        out
    }

    /// Pre-order refinement code: one byte per tree node, 1 when bisected.
    pub fn refinement_code(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<usize> = self.roots.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            match self.nodes[n].children {
                Some([a, b]) => {
                    out.push(1);
                    stack.push(b);
                    stack.push(a);
                }
                None => out.push(0),
            }
        }
        out
    }

    /// Rebuilds a mesh from its refinement code.
    pub fn from_refinement_code(domain: &Domain, code: &[u8]) -> Result<Self> {
        let (mut r, hm) = Refiner::macro_mesh(domain)?;
        let mut pos = 0;
        let mut stack: Vec<usize> = r.roots.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            let flag = *code
                .get(pos)
                .ok_or_else(|| FlowError::Mesh("refinement code is truncated".into()))?;
            pos += 1;
            if flag == 1 {
                r.bisect(n);
                let [a, b] = r.nodes[n].children.expect("just bisected");
                stack.push(b);
                stack.push(a);
            } else if flag != 0 {
                return Err(FlowError::Mesh("refinement code holds a value other than 0/1".into()));
            }
        }
        if pos != code.len() {
            return Err(FlowError::Mesh("refinement code has trailing entries".into()));
        }
        Ok(r.finish(domain.clone(), hm))
    }

    /// Plain-text dump: `v x y` lines, then `t i j k flags` with the bit set of
    /// walls touched by the element's edges in `flags`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {}", v.x, v.y);
        }
        for (e, t) in self.triangles.iter().enumerate() {
            let mut flags = 0u8;
            for ed in self.tri_edges[e] {
                if let Some(w) = self.edge_wall[ed] {
                    flags |= 1 << w.index();
                }
            }
            let _ = writeln!(s, "t {} {} {} {}", t[0], t[1], t[2], flags);
        }
        s
    }

    /// Whether wall `w` carries the no-slip condition.
    pub fn is_no_slip(&self, w: Wall) -> bool {
        self.domain.kind(w) == WallKind::NoSlip
    }

    /// Checks that every interior edge has two elements and every boundary
    /// edge one, and that all areas are positive.
    pub fn check_conforming(&self) -> Result<()> {
        let mut count = vec![0u8; self.edges.len()];
        for te in &self.tri_edges {
            for &ed in te {
                count[ed] += 1;
            }
        }
        for (ed, &c) in count.iter().enumerate() {
            let expect = if self.edge_wall[ed].is_some() { 1 } else { 2 };
            if c != expect {
                return Err(FlowError::Mesh(format!("edge {ed} has {c} elements, expected {expect}")));
            }
        }
        for e in 0..self.num_elements() {
            if self.element_area(e) <= 0.0 {
                return Err(FlowError::Mesh(format!("element {e} has non-positive area")));
            }
        }
        let total: f64 = (0..self.num_elements()).map(|e| self.element_area(e)).sum();
        if (total - self.domain.area()).abs() > 1e-12 * self.domain.area() {
            return Err(FlowError::Mesh("elements do not tile the domain".into()));
        }
        Ok(())
    }
}
