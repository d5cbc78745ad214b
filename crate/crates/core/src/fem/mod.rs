//! Finite element building blocks: quadrature rules, the P2 basis, degree of
//! freedom spaces and inter-mesh transfers.

pub mod spaces;
pub mod surface;
pub mod transfer;

pub use spaces::{PressureSpace, VelocitySpace};
pub use surface::SurfaceSpaces;
pub use transfer::{interpolate_velocity, project_density};

use crate::geom::{orient, Vec2};
use crate::mesh::BulkMesh;

/// Seven-point rule on the reference triangle, exact for degree 5. Each entry
/// holds barycentric coordinates and a weight summing to one over the rule.
pub fn triangle_rule() -> [([f64; 3], f64); 7] {
    let s = 15f64.sqrt();
    let b1 = (6.0 + s) / 21.0;
    let a1 = 1.0 - 2.0 * b1;
    let w1 = (155.0 + s) / 1200.0;
    let b2 = (6.0 - s) / 21.0;
    let a2 = 1.0 - 2.0 * b2;
    let w2 = (155.0 - s) / 1200.0;
    let t = 1.0 / 3.0;
    [
        ([t, t, t], 9.0 / 40.0),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

/// Three-point Gauss rule on `[0, 1]`, exact for degree 5.
pub fn line_rule() -> [(f64, f64); 3] {
    let r = (0.6f64).sqrt() / 2.0;
    [(0.5 - r, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + r, 5.0 / 18.0)]
}

/// Local P2 node pairs: vertices 0..3, then edges (0,1), (1,2), (2,0).
pub const EDGE_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Affine data of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeom {
    pub pts: [Vec2; 3],
    pub area: f64,
    pub grad_lambda: [Vec2; 3],
}

impl ElementGeom {
    pub fn new(pts: [Vec2; 3]) -> Self {
        let two_a = orient(pts[0], pts[1], pts[2]);
        let g = |i: usize| {
            let (p, q) = (pts[(i + 1) % 3], pts[(i + 2) % 3]);
            (q - p).rot_ccw() / two_a
        };
        Self { pts, area: 0.5 * two_a, grad_lambda: [g(0), g(1), g(2)] }
    }

    pub fn of(mesh: &BulkMesh, e: usize) -> Self {
        Self::new(mesh.element_points(e))
    }

    pub fn point(&self, l: [f64; 3]) -> Vec2 {
        self.pts[0] * l[0] + self.pts[1] * l[1] + self.pts[2] * l[2]
    }

    pub fn barycentric(&self, p: Vec2) -> [f64; 3] {
        crate::mesh::barycentric(self.pts, p)
    }

    /// Values of the six P2 basis functions.
    pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
        let mut v = [0.0; 6];
        for i in 0..3 {
            v[i] = l[i] * (2.0 * l[i] - 1.0);
        }
        for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
            v[3 + k] = 4.0 * l[i] * l[j];
        }
        v
    }

    /// Gradients of the six P2 basis functions.
    pub fn p2_grads(&self, l: [f64; 3]) -> [Vec2; 6] {
        let g = &self.grad_lambda;
        let mut out = [Vec2::ZERO; 6];
        for i in 0..3 {
            out[i] = g[i] * (4.0 * l[i] - 1.0);
        }
        for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
            out[3 + k] = (g[j] * l[i] + g[i] * l[j]) * 4.0;
        }
        out
    }
}

/// Global P2 node numbers of element `e`: its vertices, then its edge
/// midpoints offset by the vertex count.
pub fn p2_nodes(mesh: &BulkMesh, e: usize) -> [usize; 6] {
    let t = mesh.triangles()[e];
    let ed = mesh.element_edges(e);
    let nv = mesh.num_vertices();
    [t[0], t[1], t[2], nv + ed[0], nv + ed[1], nv + ed[2]]
}

/// Positions of all P2 nodes of `mesh`.
pub fn p2_node_positions(mesh: &BulkMesh) -> Vec<Vec2> {
    let v = mesh.vertices();
    let mut out = v.to_vec();
    out.extend(mesh.edges().iter().map(|&[a, b]| (v[a] + v[b]) * 0.5));
    out
}

/// Evaluates a P2 vector field stored as `[node * 2 + component]` at `p`.
pub fn eval_p2_vector(mesh: &BulkMesh, field: &[f64], p: Vec2) -> crate::Result<Vec2> {
    let (e, l) = mesh.locate_point(p)?;
    Ok(eval_p2_in(mesh, field, e, l))
}

/// Evaluates a P2 vector field in element `e` at barycentric coordinates `l`.
pub fn eval_p2_in(mesh: &BulkMesh, field: &[f64], e: usize, l: [f64; 3]) -> Vec2 {
    let nodes = p2_nodes(mesh, e);
    let phi = ElementGeom::p2_values(l);
    let mut u = Vec2::ZERO;
    for k in 0..6 {
        u += Vec2::new(field[2 * nodes[k]], field[2 * nodes[k] + 1]) * phi[k];
    }
    u
}
