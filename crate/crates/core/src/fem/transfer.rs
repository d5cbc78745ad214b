//! Transfers between meshes of one bisection forest: nodal interpolation of
//! P2 velocities and elementwise means of piecewise constant densities.

use crate::error::{FlowError, Result};
use crate::fem::{eval_p2_in, p2_node_positions};
use crate::geom::orient;
use crate::mesh::BulkMesh;

/// Nodal interpolation of the P2 field `old` (raw layout) onto `new_mesh`.
pub fn interpolate_velocity(old_mesh: &BulkMesh, old: &[f64], new_mesh: &BulkMesh) -> Result<Vec<f64>> {
    let expect = 2 * (old_mesh.num_vertices() + old_mesh.edges().len());
    if old.len() != expect {
        return Err(FlowError::Argument(format!("velocity has {} entries, expected {expect}", old.len())));
    }
    let mut out = Vec::with_capacity(2 * (new_mesh.num_vertices() + new_mesh.edges().len()));
    let mut clamped = 0usize;
    for p in p2_node_positions(new_mesh) {
        let (e, l) = old_mesh.locate_point(p)?;
        let geom_l = crate::mesh::barycentric(old_mesh.element_points(e), p);
        if geom_l.iter().any(|&x| x < -1e-9) {
            clamped += 1;
        }
        let u = eval_p2_in(old_mesh, old, e, l);
        out.push(u.x);
        out.push(u.y);
    }
    if clamped > 0 {
        log::debug!("velocity transfer clamped {clamped} nodes");
    }
    Ok(out)
}

fn same_forest(a: &BulkMesh, b: &BulkMesh) -> bool {
    a.roots().len() == b.roots().len()
        && a.roots().iter().zip(b.roots()).all(|(&ra, &rb)| a.node_points(ra) == b.node_points(rb))
}

fn node_area(m: &BulkMesh, n: usize) -> f64 {
    let p = m.node_points(n);
    0.5 * orient(p[0], p[1], p[2])
}

/// Area-weighted integral of `rho` over the subtree of `n`.
fn subtree_integral(m: &BulkMesh, rho: &[f64], n: usize) -> f64 {
    match m.nodes()[n].children {
        Some([a, b]) => subtree_integral(m, rho, a) + subtree_integral(m, rho, b),
        None => {
            let leaf = m.leaf_of_node(n).expect("childless node is a leaf");
            rho[leaf] * node_area(m, n)
        }
    }
}

fn fill_subtree(m: &BulkMesh, n: usize, value: f64, out: &mut [f64]) {
    match m.nodes()[n].children {
        Some([a, b]) => {
            fill_subtree(m, a, value, out);
            fill_subtree(m, b, value, out);
        }
        None => out[m.leaf_of_node(n).expect("childless node is a leaf")] = value,
    }
}

fn descend(old: &BulkMesh, rho: &[f64], new: &BulkMesh, no: usize, nn: usize, out: &mut [f64]) {
    match (old.nodes()[no].children, new.nodes()[nn].children) {
        (_, None) => {
            let v = subtree_integral(old, rho, no) / node_area(new, nn);
            out[new.leaf_of_node(nn).expect("childless node is a leaf")] = v;
        }
        (None, Some(_)) => {
            let v = rho[old.leaf_of_node(no).expect("childless node is a leaf")];
            fill_subtree(new, nn, v, out);
        }
        (Some([oa, ob]), Some([na, nb])) => {
            descend(old, rho, new, oa, na, out);
            descend(old, rho, new, ob, nb, out);
        }
    }
}

/// Elementwise mean of the piecewise constant `rho_old` on `new_mesh`,
/// computed exactly through the shared bisection forest.
pub fn project_density(old_mesh: &BulkMesh, rho_old: &[f64], new_mesh: &BulkMesh) -> Result<Vec<f64>> {
    if rho_old.len() != old_mesh.num_elements() {
        return Err(FlowError::Argument("density length differs from the element count".into()));
    }
    if !same_forest(old_mesh, new_mesh) {
        return Err(FlowError::Mesh("meshes do not share a macro mesh".into()));
    }
    let mut out = vec![0.0; new_mesh.num_elements()];
    for (&ro, &rn) in old_mesh.roots().iter().zip(new_mesh.roots()) {
        descend(old_mesh, rho_old, new_mesh, ro, rn, &mut out);
    }
    Ok(out)
}
