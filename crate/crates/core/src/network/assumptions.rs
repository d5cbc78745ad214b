//! Non-degeneracy checks on a curve network that guarantee a uniquely
//! solvable discrete system.

use super::{CurveEnd, CurveNetwork, EndRole};
use crate::error::{FlowError, Result};
use crate::geom::Vec2;

const TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssumptionReport {
    /// Interior vertices `(curve, vertex)` whose vertex normal vanishes.
    pub zero_vertex_normals: Vec<(usize, usize)>,
    /// Boundary points whose vertex normal has no component along the wall.
    pub boundary_contact_failures: Vec<usize>,
    /// Junctions whose W-vector differences do not span the plane.
    pub junction_rank_failures: Vec<usize>,
    /// Connected components (lists of curves) whose normals do not span the plane.
    pub component_span_failures: Vec<Vec<usize>>,
    pub components: usize,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.zero_vertex_normals.is_empty()
            && self.boundary_contact_failures.is_empty()
            && self.junction_rank_failures.is_empty()
            && self.component_span_failures.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let mut parts = Vec::new();
        if !self.zero_vertex_normals.is_empty() {
            parts.push(format!("vanishing vertex normals at {:?}", self.zero_vertex_normals));
        }
        if !self.boundary_contact_failures.is_empty() {
            parts.push(format!(
                "normal contact at boundary points {:?}",
                self.boundary_contact_failures
            ));
        }
        if !self.junction_rank_failures.is_empty() {
            parts.push(format!("rank-deficient junctions {:?}", self.junction_rank_failures));
        }
        if !self.component_span_failures.is_empty() {
            parts.push(format!(
                "normals of components {:?} do not span the plane",
                self.component_span_failures
            ));
        }
        Err(FlowError::AssumptionViolated(parts.join("; ")))
    }
}

fn spans_plane(vs: &[Vec2]) -> bool {
    let Some(r) = vs.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return false;
    };
    let rn = r.norm();
    if rn <= TOL {
        return false;
    }
    vs.iter().any(|v| {
        let n = v.norm();
        n > TOL && (r.cross(*v) / (rn * n)).abs() > 1e-10
    })
}

impl CurveNetwork {
    pub fn check_assumptions(&self) -> AssumptionReport {
        let mut rep = AssumptionReport::default();
        for (i, c) in self.curves.iter().enumerate() {
            for k in 0..c.num_vertices() {
                if !self.is_interior_vertex(i, k) {
                    continue;
                }
                let w = self.vertex_area_normal(i, k);
                let scale: f64 = {
                    let (b, a) = self.incident_segments(i, k);
                    [b, a].into_iter().flatten().map(|j| self.segment_length(i, j)).sum()
                };
                if w.norm() <= TOL * scale {
                    rep.zero_vertex_normals.push((i, k));
                }
            }
        }
        for (b, bp) in self.boundary_points.iter().enumerate() {
            let c = &self.curves[bp.curve];
            let w = self.vertex_area_normal(bp.curve, c.endpoint_index(bp.end));
            let n = bp.wall_normal();
            let tangential = w - n * w.dot(n);
            if tangential.norm() <= TOL * w.norm().max(f64::MIN_POSITIVE) {
                rep.boundary_contact_failures.push(b);
            }
        }
        for k in 0..self.junctions.len() {
            let w = self.junction_w_vectors(k).expect("junction index in range");
            let d1 = w[0] - w[2];
            let d2 = w[1] - w[2];
            let scale = d1.norm() * d2.norm();
            if scale <= 0.0 || d1.cross(d2).abs() <= 1e-10 * scale {
                rep.junction_rank_failures.push(k);
            }
        }

        // connected components through junctions
        let n = self.curves.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for jn in &self.junctions {
            let a = find(&mut parent, jn.members[0].curve);
            for m in &jn.members[1..] {
                let b = find(&mut parent, m.curve);
                parent[b] = a;
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            let idx = match root_of[r] {
                Some(idx) => idx,
                None => {
                    comps.push(Vec::new());
                    root_of[r] = Some(comps.len() - 1);
                    comps.len() - 1
                }
            };
            comps[idx].push(i);
        }
        rep.components = comps.len();
        for comp in comps {
            let mut vs = Vec::new();
            for &i in &comp {
                let c = &self.curves[i];
                for k in 0..c.num_vertices() {
                    if self.is_interior_vertex(i, k) {
                        vs.push(self.vertex_area_normal(i, k));
                    }
                }
                for end in [CurveEnd::Start, CurveEnd::End] {
                    if let Some(EndRole::Boundary(b)) = self.end_role(i, end) {
                        vs.push(self.boundary_points[b].wall_normal());
                    }
                }
            }
            if !spans_plane(&vs) {
                rep.component_span_failures.push(comp);
            }
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{PolyCurve, Region};
    use super::*;
    use crate::geom::{Domain, WallKind};

    #[test]
    fn bubble_passes() {
        let rep = bubble(0.3, 24).check_assumptions();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.components, 1);
    }

    #[test]
    fn t_junction_passes() {
        assert!(t_junction().check_assumptions().passed());
    }

    #[test]
    fn straight_single_segment_fails_span() {
        // no interior vertices and both wall normals horizontal
        let d = Domain::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
        );
        let net = CurveNetwork::new(
            d,
            vec![PolyCurve::open(vec![Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.5)])],
            vec![],
            vec![(0, CurveEnd::Start), (0, CurveEnd::End)],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap();
        let rep = net.check_assumptions();
        assert_eq!(rep.component_span_failures.len(), 1);
        assert!(rep.boundary_contact_failures.is_empty());
        assert!(matches!(rep.into_result(), Err(FlowError::AssumptionViolated(_))));
    }

    #[test]
    fn zigzag_vertex_fails() {
        // closed curve with a spike that doubles back at vertex 2
        let pts = vec![
            Vec2::new(0.1, 0.1),
            Vec2::new(0.6, 0.1),
            Vec2::new(0.6, 0.4),
            Vec2::new(0.6, 0.1),
            Vec2::new(0.1, 0.9),
        ];
        let net = CurveNetwork::new(
            square_domain(),
            vec![PolyCurve::closed(pts)],
            vec![],
            vec![],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap();
        let rep = net.check_assumptions();
        assert!(rep.zero_vertex_normals.contains(&(0, 2)));
    }
}
