//! Initial interface networks of the benchmark setups.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{FlowError, Result};
use crate::geom::{Domain, Vec2};
use crate::network::{junction_orientation, CurveEnd, CurveNetwork, JunctionMember, PolyCurve, Region, TripleJunction};

fn segments(len: f64, h: f64) -> usize {
    ((len / h).round() as usize).max(1)
}

/// `n + 1` equispaced points from `a` to `b`.
fn straight(a: Vec2, b: Vec2, n: usize) -> Vec<Vec2> {
    (0..=n).map(|k| if k == n { b } else { a.lerp(b, k as f64 / n as f64) }).collect()
}

/// `n + 1` points on the circle around `c` from angle `t0` to `t1`.
fn arc(c: Vec2, r: f64, t0: f64, t1: f64, n: usize) -> Vec<Vec2> {
    (0..=n)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / n as f64;
            c + Vec2::new(t.cos(), t.sin()) * r
        })
        .collect()
}

fn with_ends(mut pts: Vec<Vec2>, a: Vec2, b: Vec2) -> Vec<Vec2> {
    pts[0] = a;
    let n = pts.len() - 1;
    pts[n] = b;
    pts
}

fn junction(curves: &[PolyCurve], members: [(usize, CurveEnd); 3]) -> TripleJunction {
    TripleJunction {
        members: members.map(|(curve, end)| JunctionMember { curve, end }),
        orientation: members.map(|(c, e)| junction_orientation(&curves[c], e)),
    }
}

fn check_size(vertices: usize, min: usize) -> Result<()> {
    if vertices < min {
        return Err(FlowError::Argument(format!("at least {min} interface vertices are needed, got {vertices}")));
    }
    Ok(())
}

/// Junction angle of the polygonal symmetric double bubble: the angle at the
/// arc centre between the axis and the junction, chosen so that the lumped
/// junction balance holds exactly for `n` equal arc segments.
pub fn double_bubble_junction_angle(n: usize) -> f64 {
    let mut phi = PI / 3.0;
    for _ in 0..200 {
        let theta = 2.0 * (PI - phi) / n as f64;
        let next = (0.5 * (0.5 * theta).cos()).acos();
        if (next - phi).abs() < 1e-16 {
            return next;
        }
        phi = next;
    }
    phi
}

/// Symmetric standard double bubble of two equal circular arcs of radius `r`
/// joined by a straight vertical interface through `centre`.
///
/// Curves: 0 left arc, 1 right arc, 2 middle segment. Regions: 0 exterior,
/// 1 left bubble, 2 right bubble. Arc vertices are equispaced and the
/// junction angle is tuned so that the polygon is an exact discrete
/// equilibrium of the equal-tension curvature equations.
pub fn standard_double_bubble(domain: Domain, centre: Vec2, r: f64, vertices: usize) -> Result<CurveNetwork> {
    check_size(vertices, 9)?;
    if !(r > 0.0) {
        return Err(FlowError::Argument("bubble radius must be positive".into()));
    }
    let (arc_len, mid_len) = (4.0 * PI / 3.0 * r, 3f64.sqrt() * r);
    let h = (2.0 * arc_len + mid_len) / (vertices - 3) as f64;
    let n_arc = segments(arc_len, h).max(3);
    let n_mid = (vertices - 3).saturating_sub(2 * n_arc).max(1);
    let phi = double_bubble_junction_angle(n_arc);
    let (d, a) = (r * phi.cos(), r * phi.sin());
    let top = centre + Vec2::new(0.0, a);
    let bottom = centre - Vec2::new(0.0, a);
    let left = with_ends(arc(centre - Vec2::new(d, 0.0), r, phi, 2.0 * PI - phi, n_arc), top, bottom);
    let right = with_ends(arc(centre + Vec2::new(d, 0.0), r, PI + phi, 3.0 * PI - phi, n_arc), bottom, top);
    let middle = straight(top, bottom, n_mid);
    let curves = vec![PolyCurve::open(left), PolyCurve::open(right), PolyCurve::open(middle)];
    let junctions = vec![
        junction(&curves, [(0, CurveEnd::Start), (1, CurveEnd::End), (2, CurveEnd::Start)]),
        junction(&curves, [(0, CurveEnd::End), (1, CurveEnd::Start), (2, CurveEnd::End)]),
    ];
    let regions = vec![
        Region::new(vec![(0, -1), (1, -1)]),
        Region::new(vec![(0, 1), (2, -1)]),
        Region::new(vec![(1, 1), (2, 1)]),
    ];
    CurveNetwork::new(domain, curves, junctions, vec![], regions)
}

/// Spoke length of the symmetric standard triple bubble whose bubbles each
/// enclose `area`: a bubble is the spoke triangle plus a half disk over the
/// outer chord.
pub fn triple_bubble_spoke(area: f64) -> f64 {
    (area / (3f64.sqrt() / 4.0 + 3.0 * PI / 8.0)).sqrt()
}

/// Symmetric standard triple bubble around `centre`, each bubble of `area`.
///
/// Three straight spokes leave the centre at 120 degrees; neighbouring outer
/// junctions are joined by half circles. Curves: 0..3 outer arcs, 3..6
/// spokes. Regions: 0 exterior, `k + 1` the bubble between spokes `k` and
/// `k + 1`.
pub fn standard_triple_bubble(domain: Domain, centre: Vec2, area: f64, vertices: usize) -> Result<CurveNetwork> {
    check_size(vertices, 18)?;
    if !(area > 0.0) {
        return Err(FlowError::Argument("bubble area must be positive".into()));
    }
    let l = triple_bubble_spoke(area);
    let r = 0.5 * 3f64.sqrt() * l;
    let h = 3.0 * (l + PI * r) / (vertices - 6) as f64;
    let n_spoke = segments(l, h);
    let n_arc = (vertices / 3).saturating_sub(n_spoke + 2).max(3);
    let angle = |k: usize| FRAC_PI_2 + 2.0 * PI / 3.0 * k as f64;
    let outer: Vec<Vec2> = (0..3).map(|k| centre + Vec2::new(angle(k).cos(), angle(k).sin()) * l).collect();
    let mut curves = Vec::with_capacity(6);
    let mut arc_sign = [0i8; 3];
    for k in 0..3 {
        let (a, b) = (outer[k], outer[(k + 1) % 3]);
        let m = (a + b) * 0.5;
        let t0 = (a.y - m.y).atan2(a.x - m.x);
        // sweep the half circle on the side away from the centre
        let probe = m + Vec2::new((t0 + FRAC_PI_2).cos(), (t0 + FRAC_PI_2).sin()) * r;
        let s = if probe.dist(centre) > m.dist(centre) { 1.0 } else { -1.0 };
        arc_sign[k] = s as i8;
        curves.push(PolyCurve::open(with_ends(arc(m, r, t0, t0 + s * PI, n_arc), a, b)));
    }
    for &p in &outer {
        curves.push(PolyCurve::open(straight(centre, p, n_spoke)));
    }
    let junctions = vec![
        junction(&curves, [(3, CurveEnd::Start), (4, CurveEnd::Start), (5, CurveEnd::Start)]),
        junction(&curves, [(3, CurveEnd::End), (0, CurveEnd::Start), (2, CurveEnd::End)]),
        junction(&curves, [(4, CurveEnd::End), (1, CurveEnd::Start), (0, CurveEnd::End)]),
        junction(&curves, [(5, CurveEnd::End), (2, CurveEnd::Start), (1, CurveEnd::End)]),
    ];
    let mut regions = vec![Region::new((0..3).map(|k| (k, -arc_sign[k])).collect())];
    for k in 0..3 {
        regions.push(Region::new(vec![(3 + k, 1), (3 + (k + 1) % 3, -1), (k, arc_sign[k])]));
    }
    CurveNetwork::new(domain, curves, junctions, vec![], regions)
}

/// Junction between a flat two-piece interface at height `y0` and a curve
/// made of a quarter circle of radius `q` and a straight line, in a box
/// `[0, w] x [0, 1]`: the flat pieces have lengths `q` and `w - q`.
///
/// Curves: 0 left flat piece, 1 right flat piece, 2 the bent curve.
/// Regions: 0 below the flat interface, 1 the band, 2 above.
pub fn junction_migration(domain: Domain, y0: f64, q: f64, vertices: usize) -> Result<CurveNetwork> {
    check_size(vertices, 8)?;
    let (x0, x1) = (domain.min.x, domain.max.x);
    let j = Vec2::new(x0 + q, y0);
    let corner = Vec2::new(x0 + 2.0 * q, y0 + q);
    let right_end = Vec2::new(x1, y0 + q);
    let lens = [q, x1 - x0 - q, 0.5 * PI * q, right_end.x - corner.x];
    let h = lens.iter().sum::<f64>() / (vertices - 3) as f64;
    let left = straight(Vec2::new(x0, y0), j, segments(lens[0], h));
    let right = straight(j, Vec2::new(x1, y0), segments(lens[1], h));
    let mut bent = with_ends(arc(Vec2::new(x0 + 2.0 * q, y0), q, PI, FRAC_PI_2, segments(lens[2], h)), j, corner);
    bent.extend(straight(corner, right_end, segments(lens[3], h)).into_iter().skip(1));
    let curves = vec![PolyCurve::open(left), PolyCurve::open(right), PolyCurve::open(bent)];
    let junctions = vec![junction(&curves, [(0, CurveEnd::End), (1, CurveEnd::Start), (2, CurveEnd::Start)])];
    let regions = vec![
        Region::new(vec![(0, -1), (1, -1)]),
        Region::new(vec![(1, 1), (2, -1)]),
        Region::new(vec![(0, 1), (2, 1)]),
    ];
    CurveNetwork::new(domain, curves, junctions, vec![(0, CurveEnd::Start), (1, CurveEnd::End), (2, CurveEnd::End)], regions)
}

/// Circular bubble of radius `r` centred on a flat interface at height `y0`
/// spanning the box.
///
/// Curves: 0 left flat piece, 1 right flat piece, 2 upper arc, 3 lower arc.
/// Regions: 0 upper fluid, 1 lower fluid, 2 bubble.
pub fn trapped_bubble(domain: Domain, centre: Vec2, r: f64, vertices: usize) -> Result<CurveNetwork> {
    check_size(vertices, 10)?;
    let (x0, x1) = (domain.min.x, domain.max.x);
    let jl = centre - Vec2::new(r, 0.0);
    let jr = centre + Vec2::new(r, 0.0);
    let lens = [jl.x - x0, x1 - jr.x, PI * r, PI * r];
    let h = lens.iter().sum::<f64>() / (vertices - 4) as f64;
    let curves = vec![
        PolyCurve::open(straight(Vec2::new(x0, centre.y), jl, segments(lens[0], h))),
        PolyCurve::open(straight(jr, Vec2::new(x1, centre.y), segments(lens[1], h))),
        PolyCurve::open(with_ends(arc(centre, r, PI, 0.0, segments(lens[2], h)), jl, jr)),
        PolyCurve::open(with_ends(arc(centre, r, PI, 2.0 * PI, segments(lens[3], h)), jl, jr)),
    ];
    let junctions = vec![
        junction(&curves, [(0, CurveEnd::End), (2, CurveEnd::Start), (3, CurveEnd::Start)]),
        junction(&curves, [(1, CurveEnd::Start), (2, CurveEnd::End), (3, CurveEnd::End)]),
    ];
    let regions = vec![
        Region::new(vec![(0, 1), (1, 1), (2, 1)]),
        Region::new(vec![(0, -1), (1, -1), (3, -1)]),
        Region::new(vec![(2, -1), (3, 1)]),
    ];
    CurveNetwork::new(domain, curves, junctions, vec![(0, CurveEnd::Start), (1, CurveEnd::End)], regions)
}

/// Double bubble of a half disk of radius `r` on the left and a half ellipse
/// with horizontal semi-axis `a` and vertical semi-axis `r` on the right,
/// sharing a vertical interface through `centre`.
///
/// Curves: 0 disk arc, 1 ellipse arc, 2 shared interface. Regions: 0 disk
/// bubble, 1 ellipse bubble, 2 exterior.
pub fn disk_ellipse_double(domain: Domain, centre: Vec2, r: f64, a: f64, vertices: usize) -> Result<CurveNetwork> {
    check_size(vertices, 9)?;
    let top = centre + Vec2::new(0.0, r);
    let bottom = centre - Vec2::new(0.0, r);
    // Ramanujan's perimeter approximation is accurate enough for spacing
    let ellipse_half = 0.5 * PI * (3.0 * (a + r) - ((3.0 * a + r) * (a + 3.0 * r)).sqrt());
    let lens = [PI * r, ellipse_half, 2.0 * r];
    let h = lens.iter().sum::<f64>() / (vertices - 3) as f64;
    let n_e = segments(lens[1], h).div_ceil(2) * 2;
    let ellipse: Vec<Vec2> = (0..=n_e)
        .map(|k| {
            let t = -FRAC_PI_2 + PI * k as f64 / n_e as f64;
            centre + Vec2::new(a * t.cos(), r * t.sin())
        })
        .collect();
    let curves = vec![
        PolyCurve::open(with_ends(arc(centre, r, FRAC_PI_2, 1.5 * PI, segments(lens[0], h)), top, bottom)),
        PolyCurve::open(with_ends(ellipse, bottom, top)),
        PolyCurve::open(straight(top, bottom, segments(lens[2], h))),
    ];
    let junctions = vec![
        junction(&curves, [(0, CurveEnd::Start), (1, CurveEnd::End), (2, CurveEnd::Start)]),
        junction(&curves, [(0, CurveEnd::End), (1, CurveEnd::Start), (2, CurveEnd::End)]),
    ];
    let regions = vec![
        Region::new(vec![(0, 1), (2, -1)]),
        Region::new(vec![(1, 1), (2, 1)]),
        Region::new(vec![(0, -1), (1, -1)]),
    ];
    CurveNetwork::new(domain, curves, junctions, vec![], regions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::WallKind;

    fn square() -> Domain {
        Domain::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4])
    }

    fn tall() -> Domain {
        Domain::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 2.0),
            [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
        )
    }

    /// Angle at `p` between the rays to `a` and `b`, in degrees.
    fn angle(p: Vec2, a: Vec2, b: Vec2) -> f64 {
        let (u, v) = (a - p, b - p);
        u.cross(v).atan2(u.dot(v)).abs().to_degrees()
    }

    #[test]
    fn junction_angle_tends_to_sixty_degrees() {
        let coarse = double_bubble_junction_angle(8);
        let fine = double_bubble_junction_angle(4096);
        assert!((fine - PI / 3.0).abs() < 1e-6);
        assert!(coarse > PI / 3.0);
        let theta = 2.0 * (PI - coarse) / 8.0;
        assert!((coarse.cos() - 0.5 * (0.5 * theta).cos()).abs() < 1e-15);
    }

    #[test]
    fn double_bubble_layout() {
        let net = standard_double_bubble(square(), Vec2::ZERO, 0.3, 128).unwrap();
        assert!(net.total_vertices().abs_diff(128) <= 2, "{}", net.total_vertices());
        net.check_assumptions().into_result().unwrap();
        let areas = net.region_areas().unwrap();
        assert!((areas[1] - areas[2]).abs() < 1e-14);
        // continuous standard double bubble with radii 0.3
        let lens = 0.09 * (2.0 * PI / 3.0 + 3f64.sqrt() / 4.0);
        assert!((areas[1] - lens).abs() / lens < 5e-3);
        // every arc vertex lies on its circle
        for (i, sign) in [(0usize, -1.0), (1, 1.0)] {
            let c = Vec2::new(sign * 0.3 * double_bubble_junction_angle(net.curve(i).num_segments()).cos(), 0.0);
            assert!(net.curve(i).vertices().iter().all(|p| (p.dist(c) - 0.3).abs() < 1e-14));
        }
        // the middle interface is straight on the axis
        assert!(net.curve(2).vertices().iter().all(|p| p.x == 0.0));
    }

    #[test]
    fn double_bubble_junction_angles_are_near_120() {
        let net = standard_double_bubble(square(), Vec2::ZERO, 0.3, 128).unwrap();
        let v = |i: usize, k: usize| net.curve(i).vertices()[k];
        let j = v(2, 0);
        let n0 = net.curve(0).num_segments();
        let step = 360.0 / n0 as f64;
        let a = [angle(j, v(0, 1), v(2, 1)), angle(j, v(1, net.curve(1).num_vertices() - 2), v(2, 1))];
        for x in a {
            assert!((x - 120.0).abs() <= step, "{x}");
        }
    }

    #[test]
    fn triple_bubble_areas() {
        let area = 3.0 * PI / 400.0;
        let coarse = standard_triple_bubble(tall(), Vec2::new(0.5, 0.5), area, 96).unwrap();
        let fine = standard_triple_bubble(tall(), Vec2::new(0.5, 0.5), area, 3000).unwrap();
        coarse.check_assumptions().into_result().unwrap();
        for net in [&coarse, &fine] {
            let a = net.region_areas().unwrap();
            assert!((a[1] - a[2]).abs() < 1e-12 * area && (a[2] - a[3]).abs() < 1e-12 * area);
        }
        let total: f64 = fine.region_areas().unwrap()[1..].iter().sum();
        assert!((total - 9.0 * PI / 400.0).abs() / total < 1e-5, "{total}");
        let total_coarse: f64 = coarse.region_areas().unwrap()[1..].iter().sum();
        assert!((total_coarse - 9.0 * PI / 400.0).abs() / total_coarse < 1e-2);
    }

    #[test]
    fn triple_bubble_junction_angles_are_near_120() {
        let net = standard_triple_bubble(square(), Vec2::ZERO, 3.0 * PI / 25.0, 144).unwrap();
        let step = 180.0 / net.curve(0).num_segments() as f64;
        for jn in net.junctions() {
            let p = net.curve(jn.members[0].curve).vertices()[net.curve(jn.members[0].curve).endpoint_index(jn.members[0].end)];
            let nb: Vec<Vec2> = jn
                .members
                .iter()
                .map(|m| {
                    let c = net.curve(m.curve);
                    let k = c.endpoint_index(m.end);
                    c.vertices()[if k == 0 { 1 } else { k - 1 }]
                })
                .collect();
            let sum: f64 = (0..3).map(|s| angle(p, nb[s], nb[(s + 1) % 3])).sum();
            assert!((sum - 360.0).abs() < 1e-9);
            for s in 0..3 {
                let a = angle(p, nb[s], nb[(s + 1) % 3]);
                assert!((a - 120.0).abs() <= step * (1.0 + 1e-9), "{a} {step}");
            }
        }
    }

    #[test]
    fn junction_migration_lengths() {
        let d = Domain::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 1.0),
            [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
        );
        let net = junction_migration(d, 0.375, 0.25, 130).unwrap();
        net.check_assumptions().into_result().unwrap();
        assert!((net.curve_length(0) - 0.25).abs() < 1e-14);
        assert!((net.curve_length(1) - 1.75).abs() < 1e-14);
        let bent = net.curve_length(2);
        assert!(bent < 1.5 + 0.125 * PI && bent > 1.5 + 0.125 * PI - 1e-3);
        assert_eq!(net.junction_position(0), Vec2::new(0.25, 0.375));
        // band between the flat interface and the bent curve
        assert!((net.region_area(1).unwrap() - (0.25 * 1.5 + 0.0625 * PI / 4.0)).abs() < 1e-3);
    }

    #[test]
    fn trapped_bubble_regions() {
        let net = trapped_bubble(tall(), Vec2::new(0.5, 1.0), 3.0 / 16.0, 96).unwrap();
        net.check_assumptions().into_result().unwrap();
        assert_eq!(net.region_of(Vec2::new(0.5, 1.5)), 0);
        assert_eq!(net.region_of(Vec2::new(0.5, 0.5)), 1);
        assert_eq!(net.region_of(Vec2::new(0.5, 1.0)), 2);
        let a = net.region_areas().unwrap();
        assert!((a[2] - PI * (3.0f64 / 16.0).powi(2)).abs() < 1e-2 * a[2]);
        assert!((a.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn disk_ellipse_regions() {
        let net = disk_ellipse_double(tall(), Vec2::new(0.35, 0.7), 0.15, 0.45, 96).unwrap();
        net.check_assumptions().into_result().unwrap();
        assert_eq!(net.region_of(Vec2::new(0.3, 0.7)), 0);
        assert_eq!(net.region_of(Vec2::new(0.6, 0.7)), 1);
        assert_eq!(net.region_of(Vec2::new(0.5, 1.5)), 2);
        let a = net.region_areas().unwrap();
        assert!((a[0] - 0.5 * PI * 0.0225).abs() < 2e-2 * a[0]);
        assert!((a[1] - 0.5 * PI * 0.15 * 0.45).abs() < 2e-2 * a[1]);
        assert_eq!(net.junction_position(0), Vec2::new(0.35, 0.85));
    }
}
