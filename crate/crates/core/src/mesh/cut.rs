//! Intersection of the curve network with the bulk mesh: per-segment
//! traversal lists, per-element region polygons and region incidence.

use super::BulkMesh;
use crate::error::{FlowError, Result};
use crate::geom::{orient, Vec2};
use crate::mesh::locate::barycentric;
use crate::network::CurveNetwork;

/// Part `[t0, t1]` (segment parameter) of an interface segment inside one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubSegment {
    pub elem: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Part of an element lying in one region, as clipped boundary loops whose
/// signed areas add up to `area`.
#[derive(Clone, Debug)]
pub struct RegionPiece {
    pub region: usize,
    pub polygons: Vec<Vec<Vec2>>,
    pub area: f64,
}

impl RegionPiece {
    /// Signed fan triangles covering the piece.
    pub fn fan_triangles(&self) -> impl Iterator<Item = [Vec2; 3]> + '_ {
        self.polygons.iter().flat_map(|poly| {
            (1..poly.len().saturating_sub(1)).map(move |k| [poly[0], poly[k], poly[k + 1]])
        })
    }
}

#[derive(Clone, Debug)]
pub struct CutElement {
    pub elem: usize,
    pub pieces: Vec<RegionPiece>,
}

#[derive(Clone, Debug)]
pub struct CutGeometry {
    /// `traversal[curve][segment]` lists the sub-segments in segment order.
    pub traversal: Vec<Vec<Vec<SubSegment>>>,
    pub cut: Vec<CutElement>,
    cut_index: Vec<Option<usize>>,
}

impl CutGeometry {
    pub fn is_cut(&self, e: usize) -> bool {
        self.cut_index[e].is_some()
    }

    pub fn pieces(&self, e: usize) -> Option<&[RegionPiece]> {
        self.cut_index[e].map(|k| self.cut[k].pieces.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionIncidence {
    sets: Vec<Vec<usize>>,
}

impl RegionIncidence {
    pub fn from_sets(sets: Vec<Vec<usize>>) -> Self {
        Self { sets }
    }

    pub fn regions(&self, e: usize) -> &[usize] {
        &self.sets[e]
    }

    pub fn num_elements(&self) -> usize {
        self.sets.len()
    }

    pub fn contains(&self, e: usize, region: usize) -> bool {
        self.sets[e].contains(&region)
    }
}

/// Parameter interval of the segment `a -> b` inside the closed triangle `t`.
/// The triangle is widened by `rel_eps` times its diameter.
fn clip_interval(a: Vec2, b: Vec2, t: [Vec2; 3], rel_eps: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let scale = rel_eps * t[0].dist(t[1]).max(t[1].dist(t[2])).max(t[2].dist(t[0]));
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (p, q) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
        let n = (q - p).rot_ccw();
        let eps = n.norm() * scale;
        let num = n.dot(a - p) + eps;
        let den = n.dot(d);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else {
            let tb = -num / den;
            if den > 0.0 {
                lo = lo.max(tb);
            } else {
                hi = hi.min(tb);
            }
        }
    }
    (hi - lo > 1e-12).then_some((lo, hi))
}

#[cfg(test)]
pub(crate) fn segment_hits_triangle(a: Vec2, b: Vec2, t: [Vec2; 3]) -> bool {
    clip_interval(a, b, t, 1e-12).is_some()
}

fn min3(l: [f64; 3]) -> f64 {
    l[0].min(l[1]).min(l[2])
}

/// Splits the segment `a -> b` into pieces, each assigned to one element.
pub(crate) fn traverse_segment(mesh: &BulkMesh, a: Vec2, b: Vec2) -> Result<Vec<SubSegment>> {
    let pad = 1e-10 * mesh.domain().diameter();
    let lo = Vec2::new(a.x.min(b.x) - pad, a.y.min(b.y) - pad);
    let hi = Vec2::new(a.x.max(b.x) + pad, a.y.max(b.y) + pad);
    let cands = mesh.elements_in_box(lo, hi);
    let mut breaks = vec![0.0, 1.0];
    for &e in &cands {
        if let Some((t0, t1)) = clip_interval(a, b, mesh.element_points(e), 0.0) {
            breaks.push(t0.clamp(0.0, 1.0));
            breaks.push(t1.clamp(0.0, 1.0));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-13);
    if let Some(last) = breaks.last_mut() {
        *last = 1.0;
    }
    breaks[0] = 0.0;
    let mut out: Vec<SubSegment> = Vec::new();
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mid = a.lerp(b, 0.5 * (t0 + t1));
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for &e in &cands {
            let m = min3(barycentric(mesh.element_points(e), mid));
            if m > best.0 {
                best = (m, e);
            }
        }
        if best.0 < -1e-8 {
            return Err(FlowError::Geometry(format!(
                "interface point ({}, {}) is not covered by the mesh",
                mid.x, mid.y
            )));
        }
        match out.last_mut() {
            Some(prev) if prev.elem == best.1 || t1 - t0 < 1e-12 => prev.t1 = t1,
            _ => out.push(SubSegment { elem: best.1, t0, t1 }),
        }
    }
    Ok(out)
}

/// Closed boundary loops of every region, oriented with the region on the left.
pub fn region_loops(net: &CurveNetwork) -> Result<Vec<Vec<Vec<Vec2>>>> {
    let tol = 1e-11 * net.domain().diameter();
    let walls = net.wall_polylines();
    let mut all = Vec::with_capacity(net.num_regions());
    for (l, region) in net.regions().iter().enumerate() {
        let mut loops: Vec<Vec<Vec2>> = Vec::new();
        let mut open: Vec<Vec<Vec2>> = Vec::new();
        for &(i, o) in &region.curves {
            let c = net.curve(i);
            let mut pts = c.vertices().to_vec();
            if o < 0 {
                pts.reverse();
            }
            if c.is_closed() {
                loops.push(pts);
            } else {
                open.push(pts);
            }
        }
        for (r, pts) in &walls {
            if *r == l {
                if pts.first() == pts.last() && pts.len() > 2 {
                    let mut p = pts.clone();
                    p.pop();
                    loops.push(p);
                } else {
                    open.push(pts.clone());
                }
            }
        }
        let mut used = vec![false; open.len()];
        for s in 0..open.len() {
            if used[s] {
                continue;
            }
            used[s] = true;
            let start = open[s][0];
            let mut chain = open[s].clone();
            let mut guard = 0;
            while chain.last().map(|p| p.dist(start)) > Some(tol) {
                guard += 1;
                if guard > open.len() + 1 {
                    return Err(FlowError::Topology(format!("region {l} boundary does not close")));
                }
                let end = *chain.last().expect("chain is non-empty");
                let next = (0..open.len())
                    .filter(|&k| !used[k])
                    .map(|k| (k, open[k][0].dist(end)))
                    .filter(|&(_, d)| d <= tol)
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                let Some((k, _)) = next else {
                    return Err(FlowError::Topology(format!(
                        "region {l} boundary is open at ({}, {})",
                        end.x, end.y
                    )));
                };
                used[k] = true;
                chain.extend_from_slice(&open[k][1..]);
            }
            chain.pop();
            loops.push(chain);
        }
        all.push(loops);
    }
    Ok(all)
}

/// Sutherland-Hodgman clip of a closed polygon against a counter-clockwise triangle.
pub(crate) fn clip_polygon(poly: &[Vec2], t: [Vec2; 3]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = poly.to_vec();
    for (p, q) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
        if out.is_empty() {
            break;
        }
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let dc = orient(p, q, cur);
            let dp = orient(p, q, prev);
            if dc >= 0.0 {
                if dp < 0.0 && dc > 0.0 {
                    out.push(prev + (cur - prev) * (dp / (dp - dc)));
                }
                out.push(cur);
            } else if dp > 0.0 {
                out.push(prev + (cur - prev) * (dp / (dp - dc)));
            }
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

pub(crate) fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let o = poly[0];
    (1..n - 1).map(|k| orient(o, poly[k], poly[k + 1])).sum::<f64>() * 0.5
}

fn bbox(poly: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Traversal lists of all interface segments and region polygons of every
/// element the interface passes through.
pub fn clip_elements(mesh: &BulkMesh, net: &CurveNetwork) -> Result<CutGeometry> {
    let tol = 1e-12 * mesh.domain().diameter();
    let mut traversal = Vec::with_capacity(net.num_curves());
    let mut cut_index: Vec<Option<usize>> = vec![None; mesh.num_elements()];
    let mut cut_elems: Vec<usize> = Vec::new();
    for c in net.curves() {
        for v in c.vertices() {
            if !mesh.domain().contains(*v, tol) {
                return Err(FlowError::OutOfDomain { x: v.x, y: v.y });
            }
        }
        let mut per = Vec::with_capacity(c.num_segments());
        for j in 0..c.num_segments() {
            let (a, b) = c.segment(j);
            let subs = traverse_segment(mesh, a, b)?;
            for s in &subs {
                if cut_index[s.elem].is_none() {
                    cut_index[s.elem] = Some(usize::MAX);
                    cut_elems.push(s.elem);
                }
            }
            per.push(subs);
        }
        traversal.push(per);
    }
    cut_elems.sort_unstable();

    let loops = region_loops(net)?;
    let boxes: Vec<Vec<(Vec2, Vec2)>> =
        loops.iter().map(|ls| ls.iter().map(|p| bbox(p)).collect()).collect();
    let mut cut = Vec::with_capacity(cut_elems.len());
    for &e in &cut_elems {
        let t = mesh.element_points(e);
        let (tlo, thi) = bbox(&t);
        let area_e = mesh.element_area(e);
        let mut pieces = Vec::new();
        let mut total = 0.0;
        for (l, region_loops) in loops.iter().enumerate() {
            let mut polys = Vec::new();
            let mut area = 0.0;
            for (poly, &(lo, hi)) in region_loops.iter().zip(&boxes[l]) {
                if hi.x < tlo.x || lo.x > thi.x || hi.y < tlo.y || lo.y > thi.y {
                    continue;
                }
                let clipped = clip_polygon(poly, t);
                let a = polygon_area(&clipped);
                if clipped.len() >= 3 && a != 0.0 {
                    area += a;
                    polys.push(clipped);
                }
            }
            total += area;
            if area > 1e-13 * area_e {
                pieces.push(RegionPiece { region: l, polygons: polys, area });
            }
        }
        if (total - area_e).abs() > 1e-9 * area_e {
            return Err(FlowError::Geometry(format!(
                "region polygons of element {e} cover {total}, element area is {area_e}"
            )));
        }
        if pieces.is_empty() {
            return Err(FlowError::Geometry(format!("element {e} has no region piece")));
        }
        cut_index[e] = Some(cut.len());
        cut.push(CutElement { elem: e, pieces });
    }
    Ok(CutGeometry { traversal, cut, cut_index })
}

/// Region incidence from precomputed cut geometry.
pub fn classify_with(mesh: &BulkMesh, net: &CurveNetwork, cut: &CutGeometry) -> RegionIncidence {
    let sets = (0..mesh.num_elements())
        .map(|e| match cut.pieces(e) {
            Some(p) => p.iter().map(|r| r.region).collect(),
            None => vec![net.region_of(mesh.element_centroid(e))],
        })
        .collect();
    RegionIncidence { sets }
}

pub fn classify_elements(mesh: &BulkMesh, net: &CurveNetwork) -> Result<RegionIncidence> {
    let cut = clip_elements(mesh, net)?;
    Ok(classify_with(mesh, net, &cut))
}

/// Elementwise averages of the region densities and viscosities over the
/// regions each element meets.
pub fn phase_average_coefficients(
    inc: &RegionIncidence,
    rho: &[f64],
    eta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho.iter().any(|&r| !(r >= 0.0)) || eta.iter().any(|&v| !(v > 0.0)) {
        return Err(FlowError::Argument("densities must be >= 0 and viscosities > 0".into()));
    }
    let mut r_out = Vec::with_capacity(inc.num_elements());
    let mut e_out = Vec::with_capacity(inc.num_elements());
    for e in 0..inc.num_elements() {
        let set = inc.regions(e);
        if set.is_empty() || set.iter().any(|&l| l >= rho.len() || l >= eta.len()) {
            return Err(FlowError::Argument(format!("element {e} has an invalid region set")));
        }
        let n = set.len() as f64;
        r_out.push(set.iter().map(|&l| rho[l]).sum::<f64>() / n);
        e_out.push(set.iter().map(|&l| eta[l]).sum::<f64>() / n);
    }
    Ok((r_out, e_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Domain, WallKind};
    use crate::mesh::AdaptLevels;
    use crate::network::fixtures::{bubble, flat_line, t_junction};

    #[test]
    fn horizontal_cut_of_right_triangle() {
        let t = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        // lower part y < 0.5 and upper part as loops
        let lower = vec![Vec2::new(-1.0, -1.0), Vec2::new(2.0, -1.0), Vec2::new(2.0, 0.5), Vec2::new(-1.0, 0.5)];
        let upper = vec![Vec2::new(-1.0, 0.5), Vec2::new(2.0, 0.5), Vec2::new(2.0, 2.0), Vec2::new(-1.0, 2.0)];
        let a = polygon_area(&clip_polygon(&lower, t));
        let b = polygon_area(&clip_polygon(&upper, t));
        assert!((a - 0.375).abs() < 1e-15);
        assert!((b - 0.125).abs() < 1e-15);
        assert!((a + b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn clipping_keeps_winding() {
        let t = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let cw = vec![Vec2::new(-1.0, -1.0), Vec2::new(-1.0, 2.0), Vec2::new(2.0, 2.0), Vec2::new(2.0, -1.0)];
        assert!((polygon_area(&clip_polygon(&cw, t)) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn segment_inside_one_element() {
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4]);
        let m = BulkMesh::uniform(&d, 2).unwrap();
        let a = Vec2::new(0.6, 0.1);
        let b = Vec2::new(0.7, 0.15);
        let s = traverse_segment(&m, a, b).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].t0, s[0].t1), (0.0, 1.0));
    }

    #[test]
    fn segment_crossing_an_edge() {
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4]);
        let m = BulkMesh::macro_mesh(&d).unwrap();
        // macro diagonal runs from (0,0) to (1,1)
        let a = Vec2::new(0.2, 0.6);
        let b = Vec2::new(0.8, 0.6);
        let s = traverse_segment(&m, a, b).unwrap();
        assert_eq!(s.len(), 2);
        let len = a.dist(b);
        let total: f64 = s.iter().map(|p| (p.t1 - p.t0) * len).sum();
        assert!((total - len).abs() < 1e-15);
        // crossing the diagonal y = x at x = 0.6
        assert!((s[0].t1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn segment_along_mesh_edge_is_assigned_once() {
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4]);
        let m = BulkMesh::uniform(&d, 4).unwrap();
        let s = traverse_segment(&m, Vec2::new(0.5, 0.1), Vec2::new(0.5, 0.9)).unwrap();
        let total: f64 = s.iter().map(|p| p.t1 - p.t0).sum();
        assert!((total - 1.0).abs() < 1e-15);
        for w in s.windows(2) {
            assert_eq!(w[0].t1, w[1].t0);
        }
    }

    #[test]
    fn bubble_pieces_tile_elements() {
        let net = bubble(0.3, 40);
        let m = BulkMesh::adapted(net.domain(), &net, AdaptLevels::new(4, 2).unwrap()).unwrap();
        let cut = clip_elements(&m, &net).unwrap();
        let inc = classify_with(&m, &net, &cut);
        let mut inside = 0.0;
        for e in 0..m.num_elements() {
            match cut.pieces(e) {
                Some(p) => {
                    let s: f64 = p.iter().map(|r| r.area).sum();
                    assert!((s - m.element_area(e)).abs() < 1e-12 * m.element_area(e).max(1e-300) + 1e-17);
                    inside += p.iter().filter(|r| r.region == 1).map(|r| r.area).sum::<f64>();
                }
                None => {
                    if inc.regions(e) == [1] {
                        inside += m.element_area(e);
                    }
                }
            }
        }
        assert!((inside - net.region_area(1).unwrap()).abs() < 1e-13);
        // traversal covers every segment
        for (i, c) in net.curves().iter().enumerate() {
            for j in 0..c.num_segments() {
                let subs = &cut.traversal[i][j];
                assert_eq!(subs[0].t0, 0.0);
                assert_eq!(subs.last().unwrap().t1, 1.0);
            }
        }
    }

    #[test]
    fn junction_element_sees_three_regions() {
        // move the junction off the mesh vertices and edges
        let base = t_junction();
        let shift = |p: Vec2| {
            let x = if p.x == 0.0 || p.x == 1.0 { p.x } else { p.x + 0.013 };
            let y = if p.y == 1.0 { p.y } else { p.y + 0.017 };
            Vec2::new(x, y)
        };
        let pos = base.positions().iter().map(|c| c.iter().map(|&p| shift(p)).collect()).collect();
        let net = base.with_positions(pos).unwrap();
        let m = BulkMesh::uniform(net.domain(), 5).unwrap();
        let inc = classify_elements(&m, &net).unwrap();
        let (e, _) = m.locate_point(Vec2::new(0.513, 0.517)).unwrap();
        assert_eq!(inc.regions(e), [0, 1, 2]);
    }

    #[test]
    fn interface_on_mesh_edges_gives_single_regions() {
        // y = 0.5 is a union of mesh edges
        let net = flat_line(8);
        let m = BulkMesh::uniform(net.domain(), 4).unwrap();
        let inc = classify_elements(&m, &net).unwrap();
        for e in 0..m.num_elements() {
            let c = m.element_centroid(e);
            let expect = if c.y < 0.5 { 0 } else { 1 };
            assert_eq!(inc.regions(e), [expect]);
        }
    }

    #[test]
    fn averaging_formula() {
        let inc = RegionIncidence::from_sets(vec![vec![0], vec![0, 1], vec![0, 1, 2]]);
        let (r, e) = phase_average_coefficients(&inc, &[1000.0, 1.0, 1200.0], &[0.1, 0.15, 1e-4]).unwrap();
        assert_eq!(r[0], 1000.0);
        assert_eq!(r[1], 500.5);
        assert!((e[2] - 0.083_366_666_666_666_67).abs() < 1e-15);
        assert!(phase_average_coefficients(&inc, &[1.0, -1.0, 1.0], &[1.0; 3]).is_err());
    }
}
