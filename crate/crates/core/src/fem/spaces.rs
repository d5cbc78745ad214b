//! Bulk spaces: P2 velocity with wall constraints, P1 pressure with optional
//! per-region enrichment.

use crate::error::{FlowError, Result};
use crate::fem::{p2_node_positions, ElementGeom};
use crate::geom::{Vec2, Wall, WallKind};
use crate::mesh::{BulkMesh, CutGeometry, RegionIncidence};
use crate::network::CurveNetwork;

const NONE: usize = usize::MAX;

/// P2 vector space. Raw dofs are `2 * node + component`, nodes are mesh
/// vertices followed by edge midpoints. Components fixed by wall conditions
/// are eliminated; the rest are numbered in raw order.
#[derive(Clone, Debug)]
pub struct VelocitySpace {
    positions: Vec<Vec2>,
    free_of_raw: Vec<usize>,
    raw_of_free: Vec<usize>,
}

fn fixed_components(mask: u8, kinds: [WallKind; 4]) -> [bool; 2] {
    let mut fixed = [false; 2];
    for w in Wall::ALL {
        if mask & (1 << w.index()) == 0 {
            continue;
        }
        match kinds[w.index()] {
            WallKind::NoSlip => fixed = [true, true],
            WallKind::FreeSlip => match w {
                Wall::Left | Wall::Right => fixed[0] = true,
                Wall::Bottom | Wall::Top => fixed[1] = true,
            },
        }
    }
    fixed
}

impl VelocitySpace {
    pub fn new(mesh: &BulkMesh) -> Self {
        let positions = p2_node_positions(mesh);
        let kinds = Wall::ALL.map(|w| mesh.domain().kind(w));
        let nv = mesh.num_vertices();
        let mut masks: Vec<u8> = (0..nv).map(|v| mesh.vertex_wall_mask(v)).collect();
        masks.extend((0..mesh.edges().len()).map(|e| mesh.edge_wall(e).map_or(0, |w| 1 << w.index())));
        let mut free_of_raw = vec![NONE; 2 * positions.len()];
        let mut raw_of_free = Vec::new();
        for (n, &m) in masks.iter().enumerate() {
            let fixed = fixed_components(m, kinds);
            for c in 0..2 {
                if !fixed[c] {
                    free_of_raw[2 * n + c] = raw_of_free.len();
                    raw_of_free.push(2 * n + c);
                }
            }
        }
        Self { positions, free_of_raw, raw_of_free }
    }

    pub fn num_nodes(&self) -> usize {
        self.positions.len()
    }

    pub fn num_raw(&self) -> usize {
        2 * self.positions.len()
    }

    pub fn num_free(&self) -> usize {
        self.raw_of_free.len()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn free_index(&self, raw: usize) -> Option<usize> {
        let f = self.free_of_raw[raw];
        (f != NONE).then_some(f)
    }

    pub fn raw_index(&self, free: usize) -> usize {
        self.raw_of_free[free]
    }

    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut raw = vec![0.0; self.num_raw()];
        for (f, &r) in self.raw_of_free.iter().enumerate() {
            raw[r] = free[f];
        }
        raw
    }

    pub fn restrict(&self, raw: &[f64]) -> Vec<f64> {
        self.raw_of_free.iter().map(|&r| raw[r]).collect()
    }

    /// Zeroes the constrained components of a raw field.
    pub fn enforce(&self, raw: &mut [f64]) {
        for (r, v) in raw.iter_mut().enumerate() {
            if self.free_of_raw[r] == NONE {
                *v = 0.0;
            }
        }
    }

    /// Nodal interpolant of `f`, without constraint enforcement.
    pub fn interpolate(&self, f: impl Fn(Vec2) -> Vec2) -> Vec<f64> {
        let mut raw = Vec::with_capacity(self.num_raw());
        for &p in &self.positions {
            let v = f(p);
            raw.push(v.x);
            raw.push(v.y);
        }
        raw
    }

    /// Largest nodal velocity magnitude.
    pub fn max_nodal_norm(raw: &[f64]) -> f64 {
        raw.chunks_exact(2).map(|c| c[0].hypot(c[1])).fold(0.0, f64::max)
    }
}

/// P1 pressure space, optionally enriched by the characteristic functions of
/// all regions but one. One P1 coefficient is pinned to remove the constant.
#[derive(Clone, Debug)]
pub struct PressureSpace {
    num_p1: usize,
    pinned: usize,
    enriched: Vec<usize>,
    region_areas: Vec<f64>,
    p1_integrals: Vec<f64>,
    domain_area: f64,
}

/// Discrete pressure: P1 nodal values plus one constant per region (zero for
/// regions without enrichment).
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    pub p1: Vec<f64>,
    pub enrich: Vec<f64>,
}

impl PressureSpace {
    pub fn new(mesh: &BulkMesh, net: &CurveNetwork, xfem: bool) -> Result<Self> {
        let region_areas = net.region_areas()?;
        let scale = mesh.domain().area();
        let mut enriched = Vec::new();
        if xfem {
            for (l, &a) in region_areas.iter().enumerate() {
                if a <= 1e-14 * scale {
                    return Err(FlowError::Space(format!("region {l} has zero area")));
                }
            }
            // the largest region carries no enrichment
            let drop = region_areas
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (l, &a)| if a > b.1 { (l, a) } else { b })
                .0;
            enriched = (0..region_areas.len()).filter(|&l| l != drop).collect();
        }
        let mut p1_integrals = vec![0.0; mesh.num_vertices()];
        for (e, t) in mesh.triangles().iter().enumerate() {
            let a = mesh.element_area(e) / 3.0;
            for &v in t {
                p1_integrals[v] += a;
            }
        }
        Ok(Self {
            num_p1: mesh.num_vertices(),
            pinned: 0,
            enriched,
            region_areas,
            p1_integrals,
            domain_area: mesh.domain().area(),
        })
    }

    pub fn num_p1(&self) -> usize {
        self.num_p1
    }

    /// Dimension of the spanned space (P1 plus the independent enrichments).
    pub fn dim(&self) -> usize {
        self.num_p1 + self.enriched.len()
    }

    /// Number of unknowns in the linear system (the constant removed).
    pub fn num_unknowns(&self) -> usize {
        self.dim() - 1
    }

    pub fn enriched_regions(&self) -> &[usize] {
        &self.enriched
    }

    pub fn is_enriched(&self) -> bool {
        !self.enriched.is_empty()
    }

    pub fn region_areas(&self) -> &[f64] {
        &self.region_areas
    }

    /// Unknown index of P1 vertex `v`, `None` for the pinned vertex.
    pub fn p1_unknown(&self, v: usize) -> Option<usize> {
        match v.cmp(&self.pinned) {
            std::cmp::Ordering::Less => Some(v),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(v - 1),
        }
    }

    /// Unknown index of the `k`-th enrichment.
    pub fn enrichment_unknown(&self, k: usize) -> usize {
        self.num_p1 - 1 + k
    }

    /// Field from the unknown vector, shifted to zero mean.
    pub fn field(&self, x: &[f64]) -> PressureField {
        let mut p1 = vec![0.0; self.num_p1];
        for (v, p) in p1.iter_mut().enumerate() {
            if let Some(i) = self.p1_unknown(v) {
                *p = x[i];
            }
        }
        let mut enrich = vec![0.0; self.region_areas.len()];
        for (k, &l) in self.enriched.iter().enumerate() {
            enrich[l] = x[self.enrichment_unknown(k)];
        }
        let mut f = PressureField { p1, enrich };
        let mean = self.integral(&f) / self.domain_area;
        for p in &mut f.p1 {
            *p -= mean;
        }
        f
    }

    /// Integral of a pressure field over the domain.
    pub fn integral(&self, f: &PressureField) -> f64 {
        let a: f64 = f.p1.iter().zip(&self.p1_integrals).map(|(p, w)| p * w).sum();
        a + f.enrich.iter().zip(&self.region_areas).map(|(c, r)| c * r).sum::<f64>()
    }
}

/// Integral of a pressure field over region `l`, using clipped polygons in
/// cut elements.
pub fn region_pressure_integral(
    mesh: &BulkMesh,
    cut: &CutGeometry,
    inc: &RegionIncidence,
    f: &PressureField,
    l: usize,
) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let t = mesh.triangles()[e];
        let vals = [f.p1[t[0]], f.p1[t[1]], f.p1[t[2]]];
        match cut.pieces(e) {
            Some(pieces) => {
                let geom = ElementGeom::of(mesh, e);
                for piece in pieces.iter().filter(|p| p.region == l) {
                    for tri in piece.fan_triangles() {
                        let a = 0.5 * crate::geom::orient(tri[0], tri[1], tri[2]);
                        let c = (tri[0] + tri[1] + tri[2]) / 3.0;
                        let lam = geom.barycentric(c);
                        total += a * (lam[0] * vals[0] + lam[1] * vals[1] + lam[2] * vals[2]);
                    }
                    total += f.enrich[l] * piece.area;
                }
            }
            None if inc.regions(e) == [l] => {
                let a = mesh.element_area(e);
                total += a * ((vals[0] + vals[1] + vals[2]) / 3.0 + f.enrich[l]);
            }
            None => {}
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Domain;
    use crate::mesh::{classify_with, clip_elements};
    use crate::network::fixtures::{bubble, flat_line};

    #[test]
    fn no_slip_box_fixes_all_boundary_nodes() {
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4]);
        let m = BulkMesh::uniform(&d, 2).unwrap();
        let s = VelocitySpace::new(&m);
        // level 2 on the unit square: 5x5 P2 grid, 9 interior nodes
        assert_eq!(s.num_nodes(), 25);
        assert_eq!(s.num_free(), 18);
        for f in 0..s.num_free() {
            let p = s.positions()[s.raw_index(f) / 2];
            assert!(!d.contains(p, 0.0) || (p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0));
        }
    }

    #[test]
    fn free_slip_sides_keep_tangential_components() {
        let net = flat_line(4);
        let m = BulkMesh::uniform(net.domain(), 2).unwrap();
        let s = VelocitySpace::new(&m);
        let mut raw = s.interpolate(|_| Vec2::new(1.0, 1.0));
        s.enforce(&mut raw);
        for (n, p) in s.positions().iter().enumerate() {
            let u = Vec2::new(raw[2 * n], raw[2 * n + 1]);
            let on_lr = p.x == 0.0 || p.x == 1.0;
            let on_bt = p.y == 0.0 || p.y == 1.0;
            let kinds = Wall::ALL.map(|w| m.domain().kind(w));
            if on_lr && !on_bt && kinds[0] == WallKind::FreeSlip {
                assert_eq!(u, Vec2::new(0.0, 1.0));
            }
            if on_bt && kinds[2] == WallKind::NoSlip {
                assert_eq!(u, Vec2::ZERO);
            }
        }
        assert_eq!(s.restrict(&s.expand(&vec![2.0; s.num_free()])), vec![2.0; s.num_free()]);
    }

    #[test]
    fn pressure_dimensions() {
        let net = bubble(0.3, 32);
        let m = BulkMesh::uniform(net.domain(), 4).unwrap();
        let plain = PressureSpace::new(&m, &net, false).unwrap();
        assert_eq!(plain.dim(), m.num_vertices());
        let x = PressureSpace::new(&m, &net, true).unwrap();
        assert_eq!(x.dim(), m.num_vertices() + 2 - 1);
        assert_eq!(x.num_unknowns(), x.dim() - 1);
        // the outer region is the larger one, so the bubble is enriched
        assert_eq!(x.enriched_regions(), &[1]);
    }

    #[test]
    fn field_has_zero_mean_and_region_integrals_add_up() {
        let net = bubble(0.3, 32);
        let m = BulkMesh::uniform(net.domain(), 4).unwrap();
        let cut = clip_elements(&m, &net).unwrap();
        let inc = classify_with(&m, &net, &cut);
        let s = PressureSpace::new(&m, &net, true).unwrap();
        let x: Vec<f64> = (0..s.num_unknowns()).map(|i| (i as f64 * 0.37).sin()).collect();
        let f = s.field(&x);
        assert!(s.integral(&f).abs() < 1e-13);
        let parts: f64 = (0..2).map(|l| region_pressure_integral(&m, &cut, &inc, &f, l)).sum();
        assert!(parts.abs() < 1e-13);
        // a pure enrichment of the bubble integrates to its shifted area
        let mut g = PressureField { p1: vec![0.0; s.num_p1()], enrich: vec![0.0, 1.0] };
        let inside = region_pressure_integral(&m, &cut, &inc, &g, 1);
        assert!((inside - net.region_area(1).unwrap()).abs() < 1e-13);
        g.p1.iter_mut().for_each(|p| *p = 2.0);
        let all = s.integral(&g);
        assert!((all - 2.0 * m.domain().area() - net.region_area(1).unwrap()).abs() < 1e-12);
    }
}
