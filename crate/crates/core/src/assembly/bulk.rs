//! Bulk forms on the P2 velocity space with elementwise constant
//! coefficients, integrated by the degree-5 triangle rule.

use crate::fem::{p2_nodes, triangle_rule, ElementGeom, VelocitySpace};
use crate::geom::Vec2;
use crate::mesh::BulkMesh;
use crate::solver::{CsrMatrix, TripletBuilder};

/// Basis values and gradients at the quadrature points of one element.
pub(crate) struct ElementBasis {
    pub geom: ElementGeom,
    pub nodes: [usize; 6],
    pub weights: [f64; 7],
    pub bary: [[f64; 3]; 7],
    pub phi: [[f64; 6]; 7],
    pub grad: [[Vec2; 6]; 7],
}

impl ElementBasis {
    pub fn new(mesh: &BulkMesh, e: usize) -> Self {
        let geom = ElementGeom::of(mesh, e);
        let rule = triangle_rule();
        let mut weights = [0.0; 7];
        let mut bary = [[0.0; 3]; 7];
        let mut phi = [[0.0; 6]; 7];
        let mut grad = [[Vec2::ZERO; 6]; 7];
        for (q, &(l, w)) in rule.iter().enumerate() {
            weights[q] = w * geom.area;
            bary[q] = l;
            phi[q] = ElementGeom::p2_values(l);
            grad[q] = geom.p2_grads(l);
        }
        Self { geom, nodes: p2_nodes(mesh, e), weights, bary, phi, grad }
    }

    /// Raw dof of local node `k`, component `c`.
    pub fn raw(&self, k: usize, c: usize) -> usize {
        2 * self.nodes[k] + c
    }

    /// Vector field value at quadrature point `q`.
    pub fn value(&self, field: &[f64], q: usize) -> Vec2 {
        let mut u = Vec2::ZERO;
        for k in 0..6 {
            u += Vec2::new(field[self.raw(k, 0)], field[self.raw(k, 1)]) * self.phi[q][k];
        }
        u
    }

    /// Gradient `[du_c/dx_d]` of a vector field at quadrature point `q`.
    pub fn gradient(&self, field: &[f64], q: usize) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for k in 0..6 {
            let dphi = self.grad[q][k];
            for (c, row) in g.iter_mut().enumerate() {
                let u = field[self.raw(k, c)];
                row[0] += u * dphi.x;
                row[1] += u * dphi.y;
            }
        }
        g
    }
}

fn comp(v: Vec2, c: usize) -> f64 {
    if c == 0 {
        v.x
    } else {
        v.y
    }
}

/// Scatters a local 12x12 matrix (local dof `2k + c`) into free dofs.
fn scatter(b: &mut TripletBuilder, vel: &VelocitySpace, eb: &ElementBasis, local: &[[f64; 12]; 12]) {
    for i in 0..12 {
        let Some(r) = vel.free_index(eb.raw(i / 2, i % 2)) else { continue };
        for j in 0..12 {
            if let Some(c) = vel.free_index(eb.raw(j / 2, j % 2)) {
                b.add(r, c, local[i][j]);
            }
        }
    }
}

fn capacity(mesh: &BulkMesh) -> usize {
    mesh.num_elements() * 144
}

/// `(coef u, chi)` on free dofs.
pub fn mass_matrix(mesh: &BulkMesh, vel: &VelocitySpace, coef: &[f64]) -> CsrMatrix {
    let n = vel.num_free();
    let mut b = TripletBuilder::with_capacity(n, n, capacity(mesh));
    for e in 0..mesh.num_elements() {
        if coef[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        let mut local = [[0.0; 12]; 12];
        for q in 0..7 {
            let w = coef[e] * eb.weights[q];
            for a in 0..6 {
                for bb in 0..6 {
                    let v = w * eb.phi[q][a] * eb.phi[q][bb];
                    for c in 0..2 {
                        local[2 * a + c][2 * bb + c] += v;
                    }
                }
            }
        }
        scatter(&mut b, vel, &eb, &local);
    }
    b.build()
}

/// Antisymmetric advection `1/2 [(rho (v.grad) u, chi) - (rho (v.grad) chi, u)]`
/// with `v` a raw P2 field.
pub fn advection_matrix(mesh: &BulkMesh, vel: &VelocitySpace, rho: &[f64], v: &[f64]) -> CsrMatrix {
    let n = vel.num_free();
    let mut b = TripletBuilder::with_capacity(n, n, capacity(mesh));
    for e in 0..mesh.num_elements() {
        if rho[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        let mut local = [[0.0; 12]; 12];
        for q in 0..7 {
            let w = 0.5 * rho[e] * eb.weights[q];
            let vq = eb.value(v, q);
            let dv: [f64; 6] = std::array::from_fn(|k| vq.dot(eb.grad[q][k]));
            for a in 0..6 {
                for bb in 0..6 {
                    let val = w * (dv[bb] * eb.phi[q][a] - dv[a] * eb.phi[q][bb]);
                    for c in 0..2 {
                        local[2 * a + c][2 * bb + c] += val;
                    }
                }
            }
        }
        scatter(&mut b, vel, &eb, &local);
    }
    b.build()
}

/// Viscous form `2 (eta D(u), D(chi))`.
pub fn viscous_matrix(mesh: &BulkMesh, vel: &VelocitySpace, eta: &[f64]) -> CsrMatrix {
    let n = vel.num_free();
    let mut b = TripletBuilder::with_capacity(n, n, capacity(mesh));
    for e in 0..mesh.num_elements() {
        let eb = ElementBasis::new(mesh, e);
        let mut local = [[0.0; 12]; 12];
        for q in 0..7 {
            let w = eta[e] * eb.weights[q];
            let g = &eb.grad[q];
            for a in 0..6 {
                for bb in 0..6 {
                    let lap = g[a].dot(g[bb]);
                    for r in 0..2 {
                        for s in 0..2 {
                            let mut v = comp(g[a], s) * comp(g[bb], r);
                            if r == s {
                                v += lap;
                            }
                            local[2 * a + r][2 * bb + s] += w * v;
                        }
                    }
                }
            }
        }
        scatter(&mut b, vel, &eb, &local);
    }
    b.build()
}

/// `(coef u, chi)` for a raw field `u`, on free test functions.
pub fn mass_times(mesh: &BulkMesh, vel: &VelocitySpace, coef: &[f64], u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; vel.num_free()];
    for e in 0..mesh.num_elements() {
        if coef[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            let uq = eb.value(u, q) * (coef[e] * eb.weights[q]);
            add_load(&mut out, vel, &eb, q, uq);
        }
    }
    out
}

/// Body force `(rho g, chi)` on free test functions.
pub fn body_force(mesh: &BulkMesh, vel: &VelocitySpace, rho: &[f64], g: Vec2) -> Vec<f64> {
    let mut out = vec![0.0; vel.num_free()];
    if g == Vec2::ZERO {
        return out;
    }
    for e in 0..mesh.num_elements() {
        if rho[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            add_load(&mut out, vel, &eb, q, g * (rho[e] * eb.weights[q]));
        }
    }
    out
}

fn add_load(out: &mut [f64], vel: &VelocitySpace, eb: &ElementBasis, q: usize, f: Vec2) {
    for k in 0..6 {
        for c in 0..2 {
            if let Some(i) = vel.free_index(eb.raw(k, c)) {
                out[i] += comp(f, c) * eb.phi[q][k];
            }
        }
    }
}

/// Scalar value of the antisymmetric advection form for raw fields.
pub fn advection_form(mesh: &BulkMesh, rho: &[f64], v: &[f64], u: &[f64], chi: &[f64]) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        if rho[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            let vq = eb.value(v, q);
            let gu = eb.gradient(u, q);
            let gc = eb.gradient(chi, q);
            let uq = eb.value(u, q);
            let cq = eb.value(chi, q);
            let vgu = Vec2::new(gu[0][0] * vq.x + gu[0][1] * vq.y, gu[1][0] * vq.x + gu[1][1] * vq.y);
            let vgc = Vec2::new(gc[0][0] * vq.x + gc[0][1] * vq.y, gc[1][0] * vq.x + gc[1][1] * vq.y);
            total += 0.5 * rho[e] * eb.weights[q] * (vgu.dot(cq) - vgc.dot(uq));
        }
    }
    total
}

/// Kinetic energy `1/2 (rho u, u)` of a raw field.
pub fn kinetic_energy(mesh: &BulkMesh, rho: &[f64], u: &[f64]) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        if rho[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            total += 0.5 * rho[e] * eb.weights[q] * eb.value(u, q).norm_sq();
        }
    }
    total
}

/// Dissipation `2 (eta D(u), D(u))` of a raw field.
pub fn viscous_dissipation(mesh: &BulkMesh, eta: &[f64], u: &[f64]) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            let g = eb.gradient(u, q);
            let off = 0.5 * (g[0][1] + g[1][0]);
            let dd = g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * off * off;
            total += 2.0 * eta[e] * eb.weights[q] * dd;
        }
    }
    total
}

/// Work `(rho g, u)` of a raw field.
pub fn body_work(mesh: &BulkMesh, rho: &[f64], g: Vec2, u: &[f64]) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        if rho[e] == 0.0 {
            continue;
        }
        let eb = ElementBasis::new(mesh, e);
        for q in 0..7 {
            total += rho[e] * eb.weights[q] * g.dot(eb.value(u, q));
        }
    }
    total
}
