//! Interface forms: surface-to-bulk coupling, lumped normal mass and the
//! surface stiffness.
//!
//! Interface scalars are indexed by the global curve vertex `g`, vectors by
//! `2 * g + component` (see `SurfaceSpaces`).

use crate::error::{FlowError, Result};
use crate::fem::{line_rule, ElementGeom, SurfaceSpaces, VelocitySpace};
use crate::geom::Vec2;
use crate::mesh::{BulkMesh, CutGeometry};
use crate::network::{CurveNetwork, CurvePositions};
use crate::solver::{CsrMatrix, TripletBuilder};

/// One quadrature point of the surface-to-bulk rule.
struct SurfacePoint {
    elem: usize,
    bary: [f64; 3],
    /// Weights of the two segment end vertices, times the quadrature weight.
    hat: [f64; 2],
}

/// Exact quadrature points on each traversed piece of segment `j` of curve `i`.
fn segment_points(mesh: &BulkMesh, net: &CurveNetwork, cut: &CutGeometry, i: usize, j: usize) -> Vec<SurfacePoint> {
    let (a, b) = net.curve(i).segment(j);
    let len = a.dist(b);
    let mut out = Vec::new();
    for sub in &cut.traversal[i][j] {
        let geom = ElementGeom::of(mesh, sub.elem);
        for (s, w) in line_rule() {
            let t = sub.t0 + (sub.t1 - sub.t0) * s;
            let wt = w * (sub.t1 - sub.t0) * len;
            out.push(SurfacePoint { elem: sub.elem, bary: geom.barycentric(a.lerp(b, t)), hat: [wt * (1.0 - t), wt * t] });
        }
    }
    out
}

/// `<phi_g nu, chi>` for every interface vertex `g` and every raw velocity
/// dof, as a `raw x vertices` matrix.
pub fn coupling_raw(mesh: &BulkMesh, net: &CurveNetwork, cut: &CutGeometry) -> Result<CsrMatrix> {
    let spaces = SurfaceSpaces::new(net);
    let num_raw = 2 * (mesh.num_vertices() + mesh.edges().len());
    let mut b = TripletBuilder::new(num_raw, spaces.num_vertices());
    if cut.traversal.len() != net.num_curves() {
        return Err(FlowError::Context("cut geometry belongs to a different network".into()));
    }
    for (i, c) in net.curves().iter().enumerate() {
        let off = spaces.offset(i);
        for j in 0..c.num_segments() {
            let nu = net.segment_normal(i, j)?;
            let (ka, kb) = c.segment_nodes(j);
            let gv = [off + ka, off + kb];
            for p in segment_points(mesh, net, cut, i, j) {
                let nodes = crate::fem::p2_nodes(mesh, p.elem);
                let phi = ElementGeom::p2_values(p.bary);
                for (g, &h) in gv.iter().zip(&p.hat) {
                    for k in 0..6 {
                        let w = h * phi[k];
                        b.add(2 * nodes[k], *g, w * nu.x);
                        b.add(2 * nodes[k] + 1, *g, w * nu.y);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Restriction of a raw-row matrix to the free velocity dofs.
pub fn free_rows(m: &CsrMatrix, vel: &VelocitySpace) -> CsrMatrix {
    let mut b = TripletBuilder::new(vel.num_free(), m.ncols());
    for f in 0..vel.num_free() {
        for (c, v) in m.row(vel.raw_index(f)) {
            b.add(f, c, v);
        }
    }
    b.build()
}

/// `<w nu, chi>` over raw bulk dofs for a per-curve nodal weight `w`.
pub fn surface_bulk_coupling(
    mesh: &BulkMesh,
    net: &CurveNetwork,
    cut: &CutGeometry,
    weight: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if weight.len() != net.num_curves() || weight.iter().zip(net.curves()).any(|(w, c)| w.len() != c.num_vertices()) {
        return Err(FlowError::Argument("weight does not match the network shape".into()));
    }
    let flat: Vec<f64> = weight.iter().flatten().copied().collect();
    Ok(coupling_raw(mesh, net, cut)?.matvec(&flat))
}

/// Per-segment lumped weights `|sigma| / 2 * nu*`: the current normal, or the
/// time-weighted normal towards `new` positions.
pub fn lumped_normal_weights(net: &CurveNetwork, new: Option<&CurvePositions>) -> Result<Vec<Vec<Vec2>>> {
    match new {
        None => Ok((0..net.num_curves())
            .map(|i| (0..net.curve(i).num_segments()).map(|j| net.area_vector(i, j) * 0.5).collect())
            .collect()),
        Some(x) => {
            let nu = net.time_weighted_normals(x)?;
            Ok(nu
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.into_iter().enumerate().map(|(j, n)| n * (0.5 * net.segment_length(i, j))).collect())
                .collect())
        }
    }
}

/// Lumped normal mass `<phi_g, Y . nu*>^h` as a `vertices x 2 vertices`
/// matrix; contributions are one-sided per curve.
pub fn normal_mass(net: &CurveNetwork, new: Option<&CurvePositions>) -> Result<CsrMatrix> {
    let spaces = SurfaceSpaces::new(net);
    let n = spaces.num_vertices();
    let weights = lumped_normal_weights(net, new)?;
    let mut b = TripletBuilder::new(n, 2 * n);
    for (i, c) in net.curves().iter().enumerate() {
        let off = spaces.offset(i);
        for j in 0..c.num_segments() {
            let w = weights[i][j];
            let (ka, kb) = c.segment_nodes(j);
            for g in [off + ka, off + kb] {
                b.add(g, 2 * g, w.x);
                b.add(g, 2 * g + 1, w.y);
            }
        }
    }
    Ok(b.build())
}

/// Surface stiffness `<gamma grad_s X, grad_s zeta>` on the current curves.
pub fn stiffness(net: &CurveNetwork, gamma: &[f64]) -> Result<CsrMatrix> {
    if gamma.len() != net.num_curves() {
        return Err(FlowError::Argument(format!("{} tensions for {} curves", gamma.len(), net.num_curves())));
    }
    let spaces = SurfaceSpaces::new(net);
    let n = spaces.num_vertices();
    let mut b = TripletBuilder::new(2 * n, 2 * n);
    for (i, c) in net.curves().iter().enumerate() {
        let off = spaces.offset(i);
        for j in 0..c.num_segments() {
            let len = net.segment_length(i, j);
            if len == 0.0 {
                return Err(FlowError::DegenerateSegment { curve: i, segment: j });
            }
            let k = gamma[i] / len;
            let (ka, kb) = c.segment_nodes(j);
            let (ga, gb) = (off + ka, off + kb);
            for comp in 0..2 {
                let (ra, rb) = (2 * ga + comp, 2 * gb + comp);
                b.add(ra, ra, k);
                b.add(rb, rb, k);
                b.add(ra, rb, -k);
                b.add(rb, ra, -k);
            }
        }
    }
    Ok(b.build())
}
