//! Normals, inner products, lengths and areas on a curve network.

use super::{CurveEnd, CurveNetwork, CurvePositions};
use crate::error::{FlowError, Result};
use crate::geom::{Vec2, Wall};

/// Values that can be paired pointwise in a surface inner product.
pub trait NodalValue: Copy {
    fn pair(&self, other: &Self) -> f64;
}

impl NodalValue for f64 {
    fn pair(&self, other: &f64) -> f64 {
        self * other
    }
}

impl NodalValue for Vec2 {
    fn pair(&self, other: &Vec2) -> f64 {
        self.dot(*other)
    }
}

/// Unit normal of the oriented segment `a -> b` (clockwise quarter turn).
pub fn segment_normal(a: Vec2, b: Vec2) -> Option<Vec2> {
    let d = b - a;
    let len = d.norm();
    if len > 0.0 {
        Some(d.rot_cw() / len)
    } else {
        None
    }
}

impl CurveNetwork {
    pub fn segment_length(&self, i: usize, j: usize) -> f64 {
        let (a, b) = self.curves[i].segment(j);
        a.dist(b)
    }

    /// Rotated edge vector: length times unit normal.
    pub fn area_vector(&self, i: usize, j: usize) -> Vec2 {
        let (a, b) = self.curves[i].segment(j);
        (b - a).rot_cw()
    }

    pub fn segment_normal(&self, i: usize, j: usize) -> Result<Vec2> {
        let (a, b) = self.curves[i].segment(j);
        segment_normal(a, b).ok_or(FlowError::DegenerateSegment { curve: i, segment: j })
    }

    /// Segments of curve `i` that contain vertex `k`.
    pub fn incident_segments(&self, i: usize, k: usize) -> (Option<usize>, Option<usize>) {
        let c = &self.curves[i];
        let n = c.num_vertices();
        if c.is_closed() {
            (Some((k + n - 1) % n), Some(k))
        } else {
            let before = if k > 0 { Some(k - 1) } else { None };
            let after = if k + 1 < n { Some(k) } else { None };
            (before, after)
        }
    }

    /// Sum of the rotated edge vectors of the segments around a vertex; this
    /// is the vertex normal scaled by the length of its neighbourhood.
    pub fn vertex_area_normal(&self, i: usize, k: usize) -> Vec2 {
        let (b, a) = self.incident_segments(i, k);
        let mut w = Vec2::ZERO;
        for j in [b, a].into_iter().flatten() {
            w += self.area_vector(i, j);
        }
        w
    }

    /// Length-weighted average of the incident segment normals.
    pub fn vertex_normal(&self, i: usize, k: usize) -> Result<Vec2> {
        if i >= self.curves.len() || k >= self.curves[i].num_vertices() {
            return Err(FlowError::Argument(format!("vertex {k} of curve {i} does not exist")));
        }
        let (b, a) = self.incident_segments(i, k);
        let mut len = 0.0;
        for j in [b, a].into_iter().flatten() {
            len += self.segment_length(i, j);
        }
        if len <= 0.0 {
            return Err(FlowError::Topology(format!("vertex {k} of curve {i} is isolated")));
        }
        Ok(self.vertex_area_normal(i, k) / len)
    }

    /// Normals averaged over the linear motion from the current positions to
    /// `new`, normalised by the current segment lengths.
    pub fn time_weighted_normals(&self, new: &CurvePositions) -> Result<Vec<Vec<Vec2>>> {
        self.check_shape(new)?;
        let mut out = Vec::with_capacity(self.curves.len());
        for (i, c) in self.curves.iter().enumerate() {
            let mut v = Vec::with_capacity(c.num_segments());
            for j in 0..c.num_segments() {
                let (a, b) = c.segment_nodes(j);
                let old = self.area_vector(i, j);
                let len = old.norm();
                if len == 0.0 {
                    return Err(FlowError::DegenerateSegment { curve: i, segment: j });
                }
                let fresh = (new[i][b] - new[i][a]).rot_cw();
                v.push((old + fresh) / (2.0 * len));
            }
            out.push(v);
        }
        Ok(out)
    }

    fn check_shape<T>(&self, u: &[Vec<T>]) -> Result<()> {
        if u.len() != self.curves.len()
            || u.iter().zip(&self.curves).any(|(x, c)| x.len() != c.num_vertices())
        {
            return Err(FlowError::Argument("nodal field does not match the network shape".into()));
        }
        Ok(())
    }

    /// Vertex-lumped inner product of per-curve nodal values.
    pub fn lumped_inner<T: NodalValue>(&self, u: &[Vec<T>], v: &[Vec<T>]) -> Result<f64> {
        self.check_shape(u)?;
        self.check_shape(v)?;
        let mut s = 0.0;
        for (i, c) in self.curves.iter().enumerate() {
            for j in 0..c.num_segments() {
                let (a, b) = c.segment_nodes(j);
                let h = self.segment_length(i, j);
                s += 0.5 * h * (u[i][a].pair(&v[i][a]) + u[i][b].pair(&v[i][b]));
            }
        }
        Ok(s)
    }

    /// Exact inner product of piecewise-linear nodal fields.
    pub fn exact_inner<T: NodalValue>(&self, u: &[Vec<T>], v: &[Vec<T>]) -> Result<f64> {
        self.check_shape(u)?;
        self.check_shape(v)?;
        let mut s = 0.0;
        for (i, c) in self.curves.iter().enumerate() {
            for j in 0..c.num_segments() {
                let (a, b) = c.segment_nodes(j);
                let h = self.segment_length(i, j);
                let (ua, ub, va, vb) = (u[i][a], u[i][b], v[i][a], v[i][b]);
                s += h / 6.0
                    * (2.0 * ua.pair(&va) + ua.pair(&vb) + ub.pair(&va) + 2.0 * ub.pair(&vb));
            }
        }
        Ok(s)
    }

    pub fn curve_length(&self, i: usize) -> f64 {
        self.curves[i].length()
    }

    pub fn total_length(&self) -> f64 {
        (0..self.curves.len()).map(|i| self.curve_length(i)).sum()
    }

    /// Tension-weighted total curve length.
    pub fn interfacial_energy(&self, gamma: &[f64]) -> Result<f64> {
        if gamma.len() != self.curves.len() {
            return Err(FlowError::Argument(format!(
                "{} tensions for {} curves",
                gamma.len(),
                self.curves.len()
            )));
        }
        Ok(gamma.iter().enumerate().map(|(i, g)| g * self.curve_length(i)).sum())
    }

    /// Signed flux of `(x - xmin, 0)` through the bounding curves of region `l`.
    pub(super) fn curve_flux_area(&self, l: usize) -> f64 {
        let x0 = self.domain.min.x;
        let mut s = 0.0;
        for &(i, o) in &self.regions[l].curves {
            let c = &self.curves[i];
            let mut ci = 0.0;
            for j in 0..c.num_segments() {
                let (a, b) = c.segment(j);
                ci += (b.y - a.y) * (0.5 * (a.x + b.x) - x0);
            }
            s += f64::from(o) * ci;
        }
        s
    }

    /// Length of the right wall belonging to region `l`.
    fn right_wall_share(&self, l: usize) -> f64 {
        let d = &self.domain;
        let lo = d.perimeter_param(Vec2::new(d.max.x, d.min.y), Wall::Right);
        let hi = lo + d.height();
        let per = d.perimeter();
        let mut len = 0.0;
        for (s0, s1, r) in self.wall_pieces() {
            if r != l {
                continue;
            }
            for shift in [0.0, per] {
                let a = s0.max(lo + shift);
                let b = s1.min(hi + shift);
                if b > a {
                    len += b - a;
                }
            }
        }
        len
    }

    /// Area of region `l` by the divergence theorem.
    pub fn region_area(&self, l: usize) -> Result<f64> {
        if l >= self.regions.len() {
            return Err(FlowError::Argument(format!("region {l} does not exist")));
        }
        let a = self.curve_flux_area(l) + self.domain.width() * self.right_wall_share(l);
        if a < -1e-12 * self.domain.area() {
            return Err(FlowError::Topology(format!("region {l} has negative area {a}")));
        }
        Ok(a)
    }

    pub fn region_areas(&self) -> Result<Vec<f64>> {
        (0..self.regions.len()).map(|l| self.region_area(l)).collect()
    }

    /// Lumped pairing of the displacement to `new` with the time-weighted
    /// normals, weighted by the region orientation of each curve.
    pub fn volume_difference_discrete(&self, new: &CurvePositions, l: usize) -> Result<f64> {
        self.check_shape(new)?;
        if l >= self.regions.len() {
            return Err(FlowError::Argument(format!("region {l} does not exist")));
        }
        let mut s = 0.0;
        for &(i, o) in &self.regions[l].curves {
            let c = &self.curves[i];
            let old = c.vertices();
            let mut ci = 0.0;
            for j in 0..c.num_segments() {
                let (a, b) = c.segment_nodes(j);
                let area_old = (old[b] - old[a]).rot_cw();
                let area_new = (new[i][b] - new[i][a]).rot_cw();
                let da = new[i][a] - old[a];
                let db = new[i][b] - old[b];
                // |sigma|/2 * sum_k dX(q_k) . nu^{m+1/2}, with |sigma| nu^{m+1/2} = (A_old + A_new)/2
                ci += 0.25 * (da + db).dot(area_old + area_new);
            }
            s += f64::from(o) * ci;
        }
        Ok(s)
    }

    /// Signed rotated edge vectors of the three junction members: orientation
    /// times the neighbourhood length times the vertex normal.
    pub fn junction_w_vectors(&self, k: usize) -> Result<[Vec2; 3]> {
        let jn = self
            .junctions
            .get(k)
            .ok_or_else(|| FlowError::Argument(format!("junction {k} does not exist")))?;
        let mut w = [Vec2::ZERO; 3];
        for (j, m) in jn.members.iter().enumerate() {
            let c = &self.curves[m.curve];
            let idx = c.endpoint_index(m.end);
            w[j] = self.vertex_area_normal(m.curve, idx) * jn.sign(j);
        }
        Ok(w)
    }

    /// Position of the shared vertex of junction `k`.
    pub fn junction_position(&self, k: usize) -> Vec2 {
        let m = self.junctions[k].members[0];
        let c = &self.curves[m.curve];
        c.vertices()[c.endpoint_index(m.end)]
    }

    pub fn endpoint(&self, curve: usize, end: CurveEnd) -> Vec2 {
        let c = &self.curves[curve];
        c.vertices()[c.endpoint_index(end)]
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{PolyCurve, Region};
    use super::*;
    use crate::geom::Domain;
    use crate::geom::WallKind;
    use std::f64::consts::PI;

    fn single_segment() -> CurveNetwork {
        // a line across a free-slip box, split into one segment of length 2
        let d = Domain::new(
            Vec2::new(0.0, -1.0),
            Vec2::new(2.0, 1.0),
            [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
        );
        CurveNetwork::new(
            d,
            vec![PolyCurve::open(vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)])],
            vec![],
            vec![(0, CurveEnd::Start), (0, CurveEnd::End)],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap()
    }

    #[test]
    fn normal_convention() {
        let n = segment_normal(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap();
        assert_eq!(n, Vec2::new(0.0, -1.0));
        let n = segment_normal(Vec2::ZERO, Vec2::new(0.0, 2.0)).unwrap();
        assert_eq!(n, Vec2::new(1.0, 0.0));
        let n = segment_normal(Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        let h = 0.5f64.sqrt();
        assert!((n.x - h).abs() < 1e-15 && (n.y + h).abs() < 1e-15);
        assert!(segment_normal(Vec2::ZERO, Vec2::ZERO).is_none());
    }

    #[test]
    fn vertex_normal_at_corner() {
        let net = t_junction();
        // curve 2 is straight: interior vertex normal equals segment normal
        let w = net.vertex_normal(2, 1).unwrap();
        assert!((w - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        // endpoint with one segment
        let w = net.vertex_normal(0, 2).unwrap();
        assert!((w - net.segment_normal(0, 1).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn right_angle_vertex_normal() {
        // square corner: segments (0,1)->(0,0) has normal (-1,0) ... use explicit case
        // path (0,0.5)->(0.5,0.5)->(0.5,0): normals (0,-1) and (-1,0) -> use a turn giving (0,-1),(1,0)
        // path (0,0.5)->(0.5,0.5) has normal (0,-1); (0.5,0.5)->(0.5,1.0) has normal (1,0)
        let d = Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [WallKind::FreeSlip; 4]);
        let net = CurveNetwork::new(
            d,
            vec![PolyCurve::open(vec![
                Vec2::new(0.0, 0.5),
                Vec2::new(0.5, 0.5),
                Vec2::new(0.5, 1.0),
            ])],
            vec![],
            vec![(0, CurveEnd::Start), (0, CurveEnd::End)],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap();
        let w = net.vertex_normal(0, 1).unwrap();
        assert!((w - Vec2::new(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn time_weighted_normal_cases() {
        let net = single_segment();
        let same = net.time_weighted_normals(&net.positions()).unwrap();
        assert_eq!(same[0][0], Vec2::new(0.0, -1.0));
        let shrunk = vec![vec![Vec2::new(0.5, 0.0), Vec2::new(1.5, 0.0)]];
        let tw = net.time_weighted_normals(&shrunk).unwrap();
        assert!((tw[0][0] - Vec2::new(0.0, -0.75)).norm() < 1e-15);
        let moved = vec![vec![Vec2::new(0.0, 0.3), Vec2::new(2.0, 0.3)]];
        let tw = net.time_weighted_normals(&moved).unwrap();
        assert!((tw[0][0] - Vec2::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_products_on_single_segment() {
        let net = single_segment();
        let u = vec![vec![1.0, 3.0]];
        let v = vec![vec![1.0, 1.0]];
        assert_eq!(net.lumped_inner(&u, &v).unwrap(), 4.0);
        assert!((net.exact_inner(&u, &v).unwrap() - 4.0).abs() < 1e-15);
        let z = vec![vec![0.0, 0.0]];
        assert_eq!(net.lumped_inner(&z, &v).unwrap(), 0.0);
        let bad = vec![vec![1.0]];
        assert!(matches!(net.lumped_inner(&bad, &v), Err(FlowError::Argument(_))));
    }

    #[test]
    fn lumped_and_exact_differ_for_quadratic_products() {
        let net = single_segment();
        let u = vec![vec![1.0, 3.0]];
        // u*u is quadratic: exact = 2/6*(2+3+3+18) = 26/3, lumped = 1+9 = 10
        assert_eq!(net.lumped_inner(&u, &u).unwrap(), 10.0);
        assert!((net.exact_inner(&u, &u).unwrap() - 26.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn square_perimeter_measure() {
        let sq = vec![
            Vec2::new(0.25, 0.25),
            Vec2::new(0.75, 0.25),
            Vec2::new(0.75, 0.75),
            Vec2::new(0.25, 0.75),
        ];
        let net = CurveNetwork::new(
            square_domain(),
            vec![PolyCurve::closed(sq)],
            vec![],
            vec![],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap();
        let one = vec![vec![1.0; 4]];
        assert_eq!(net.lumped_inner(&one, &one).unwrap(), 2.0);
        assert!((net.region_area(1).unwrap() - 0.25).abs() < 1e-15);
        assert!((net.region_area(0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ngon_energy_and_area() {
        let n = 40;
        let net = bubble(0.3, n);
        let e = net.interfacial_energy(&[1.0]).unwrap();
        let expect = 2.0 * n as f64 * 0.3 * (PI / n as f64).sin();
        assert!((e - expect).abs() < 1e-13);
        let area = net.region_area(1).unwrap();
        let expect = 0.5 * n as f64 * 0.09 * (2.0 * PI / n as f64).sin();
        assert!((area - expect).abs() < 1e-14);
        let areas = net.region_areas().unwrap();
        assert!((areas.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(net.interfacial_energy(&[]).is_err());
    }

    #[test]
    fn tension_weighted_sum() {
        let net = t_junction();
        // lengths 0.5, 0.5, 0.5
        let e = net.interfacial_energy(&[3.0, 0.5, 1.0]).unwrap();
        assert!((e - 2.25).abs() < 1e-15);
    }

    #[test]
    fn wall_regions_partition_box() {
        let net = t_junction();
        let a = net.region_areas().unwrap();
        assert!((a[0] - 0.5).abs() < 1e-15);
        assert!((a[1] - 0.25).abs() < 1e-15);
        assert!((a[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn scaled_square_volume_difference() {
        let sq = vec![
            Vec2::new(0.25, 0.25),
            Vec2::new(0.75, 0.25),
            Vec2::new(0.75, 0.75),
            Vec2::new(0.25, 0.75),
        ];
        let net = CurveNetwork::new(
            square_domain(),
            vec![PolyCurve::closed(sq.clone())],
            vec![],
            vec![],
            vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
        )
        .unwrap();
        let c = Vec2::new(0.5, 0.5);
        let eps = 0.1;
        let new: CurvePositions = vec![sq.iter().map(|&p| c + (p - c) * (1.0 + eps)).collect()];
        let d = net.volume_difference_discrete(&new, 1).unwrap();
        let moved = net.with_positions(new.clone()).unwrap();
        let geo = moved.region_area(1).unwrap() - net.region_area(1).unwrap();
        // side 0.5 -> 0.55: 0.3025 - 0.25
        assert!((d - 0.0525).abs() < 1e-15);
        assert!((geo - d).abs() < 1e-15);
        // relative to the unit square the scaling gives (1+eps)^2-1 = 0.21
        assert!((d / 0.25 - 0.21).abs() < 1e-14);
    }

    #[test]
    fn w_vectors_at_symmetric_fan() {
        let d = Domain::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0), [WallKind::FreeSlip; 4]);
        let dirs: Vec<Vec2> = [90.0f64, 210.0, 330.0]
            .iter()
            .map(|a| Vec2::new(a.to_radians().cos(), a.to_radians().sin()))
            .collect();
        // each curve runs from the centre along dirs[k] through a unit segment to the wall
        let mut curves = Vec::new();
        for v in &dirs {
            let p1 = *v;
            let t = 2.0 / v.x.abs().max(v.y.abs());
            curves.push(PolyCurve::open(vec![Vec2::ZERO, p1, *v * t]));
        }
        let o: Vec<i8> = curves.iter().map(|c| super::super::junction_orientation(c, CurveEnd::Start)).collect();
        use super::super::{JunctionMember, TripleJunction};
        // sectors: region k between dirs[k] and dirs[k+1]
        // curve k runs along dirs[k]; its normal points clockwise, into sector k-1
        let regions = (0..3)
            .map(|k| Region::new(vec![(k, 1), ((k + 1) % 3, -1)]))
            .collect();
        let net = CurveNetwork::new(
            d,
            curves,
            vec![TripleJunction {
                members: [0, 1, 2].map(|c| JunctionMember { curve: c, end: CurveEnd::Start }),
                orientation: [o[0], o[1], o[2]],
            }],
            vec![(0, CurveEnd::End), (1, CurveEnd::End), (2, CurveEnd::End)],
            regions,
        )
        .unwrap();
        let w = net.junction_w_vectors(0).unwrap();
        assert!((w[0] + w[1] + w[2]).norm() < 1e-14);
        assert!((w[0] - w[2]).cross(w[1] - w[2]).abs() > 0.5);
        for v in w {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }
}
