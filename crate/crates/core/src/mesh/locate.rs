//! Point location by descent through the bisection forest.

use super::BulkMesh;
use crate::error::{FlowError, Result};
use crate::geom::{orient, Vec2};

/// Barycentric coordinates of `p` in the triangle `t`.
pub fn barycentric(t: [Vec2; 3], p: Vec2) -> [f64; 3] {
    let area = orient(t[0], t[1], t[2]);
    let l0 = orient(p, t[1], t[2]) / area;
    let l1 = orient(t[0], p, t[2]) / area;
    [l0, l1, 1.0 - l0 - l1]
}

fn min3(l: [f64; 3]) -> f64 {
    l[0].min(l[1]).min(l[2])
}

impl BulkMesh {
    /// Containing element of `p` and its barycentric coordinates, clamped to
    /// the element. Points within a rounding distance of the box are accepted.
    pub fn locate_point(&self, p: Vec2) -> Result<(usize, [f64; 3])> {
        let tol = 1e-12 * self.domain().diameter();
        if !self.domain().contains(p, tol) {
            return Err(FlowError::OutOfDomain { x: p.x, y: p.y });
        }
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for &r in self.roots() {
            let m = min3(barycentric(self.node_points(r), p));
            if m > best.0 {
                best = (m, r);
            }
        }
        let mut n = best.1;
        while let Some([a, b]) = self.nodes()[n].children {
            let la = min3(barycentric(self.node_points(a), p));
            let lb = min3(barycentric(self.node_points(b), p));
            n = if la >= lb { a } else { b };
        }
        let e = self.leaf_of_node(n).expect("descent ends in a leaf");
        let mut l = barycentric(self.element_points(e), p);
        if min3(l) < -1e-9 {
            log::debug!("point ({}, {}) clamped into element {e}", p.x, p.y);
        }
        for v in l.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        let s = l[0] + l[1] + l[2];
        for v in l.iter_mut() {
            *v /= s;
        }
        Ok((e, l))
    }
}
