//! Random geometries, fields and the defect measures shared by the property
//! and acceptance targets. Every check returns the largest defect found so
//! that callers decide on the tolerance.

#![allow(dead_code)]

use std::f64::consts::PI;

use frontflow::assembly::bulk::advection_form;
use frontflow::fem::{interpolate_velocity, project_density, VelocitySpace};
use frontflow::network::{CurvePositions, PolyCurve, Region};
use frontflow::scenario::shapes::standard_double_bubble;
use frontflow::{AdaptLevels, BulkMesh, CurveNetwork, Domain, Vec2, WallKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn unit_box(kind: WallKind) -> Domain {
    Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), [kind; 4])
}

/// Sum of a few plane waves with random amplitudes, wave vectors and phases.
pub struct SmoothField {
    modes: Vec<(Vec2, Vec2, f64)>,
}

impl SmoothField {
    pub fn random(r: &mut StdRng, amplitude: f64) -> Self {
        let modes = (0..4)
            .map(|_| {
                let a = Vec2::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)) * (amplitude / 4.0);
                let k = Vec2::new(r.random_range(-6.0..6.0), r.random_range(-6.0..6.0));
                (a, k, r.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { modes }
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        self.modes.iter().fold(Vec2::ZERO, |s, &(a, k, ph)| s + a * (k.dot(p) + ph).sin())
    }
}

/// Closed star-shaped polygon around the box centre with random radii,
/// traversed counter-clockwise: region 0 outside, region 1 inside.
pub fn random_polygon(r: &mut StdRng, n: usize) -> CurveNetwork {
    let c = Vec2::new(0.5, 0.5);
    let pts = (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + r.random_range(-0.3..0.3)) / n as f64;
            c + Vec2::new(t.cos(), t.sin()) * r.random_range(0.15..0.35)
        })
        .collect();
    CurveNetwork::new(
        unit_box(WallKind::NoSlip),
        vec![PolyCurve::closed(pts)],
        vec![],
        vec![],
        vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
    )
    .expect("star polygon is admissible")
}

pub fn double_bubble(vertices: usize) -> CurveNetwork {
    let d = Domain::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), [WallKind::NoSlip; 4]);
    standard_double_bubble(d, Vec2::ZERO, 0.3, vertices).expect("double bubble")
}

pub fn displaced(net: &CurveNetwork, field: &SmoothField) -> CurvePositions {
    net.positions().iter().map(|c| c.iter().map(|&p| p + field.eval(p)).collect()).collect()
}

/// Area enclosed by the closed boundary of a bubble region, from the
/// boundary formula `1/2 * sum over segments of midpoint . outward normal * length`.
pub fn enclosed_area(net: &CurveNetwork, positions: &CurvePositions, region: usize) -> f64 {
    let mut s = 0.0;
    for &(i, o) in &net.regions()[region].curves {
        let c = net.curve(i);
        for j in 0..c.num_segments() {
            let (a, b) = c.segment_nodes(j);
            let (pa, pb) = (positions[i][a], positions[i][b]);
            s += f64::from(o) * 0.5 * ((pa + pb) * 0.5).dot((pb - pa).rot_cw());
        }
    }
    s
}

/// Largest gap, over the bubble regions, between the true change of the
/// enclosed area and its discrete prediction from time-weighted normals.
pub fn volume_identity_defect(net: &CurveNetwork, new: &CurvePositions, bubbles: &[usize]) -> f64 {
    let old = net.positions();
    bubbles
        .iter()
        .map(|&l| {
            let exact = enclosed_area(net, new, l) - enclosed_area(net, &old, l);
            (exact - net.volume_difference_discrete(new, l).expect("shapes match")).abs()
        })
        .fold(0.0, f64::max)
}

/// Runs `cases` volume checks, alternating random polygons and a displaced
/// double bubble.
pub fn volume_identity_sweep(seed: u64, cases: usize) -> f64 {
    let mut r = rng(seed);
    let bubble = double_bubble(128);
    let mut worst: f64 = 0.0;
    for k in 0..cases {
        let field = SmoothField::random(&mut r, 0.05);
        let d = if k % 2 == 0 {
            let n = r.random_range(3..80);
            let net = random_polygon(&mut r, n);
            volume_identity_defect(&net, &displaced(&net, &field), &[1])
        } else {
            volume_identity_defect(&bubble, &displaced(&bubble, &field), &[1, 2])
        };
        worst = worst.max(d);
    }
    worst
}

/// Adapted mesh around a random bubble in the unit box.
pub fn random_adapted_mesh(r: &mut StdRng, fine: u32, coarse: u32) -> BulkMesh {
    let n = r.random_range(12..40);
    let net = random_polygon(r, n);
    BulkMesh::adapted(net.domain(), &net, AdaptLevels::new(fine, coarse).unwrap()).unwrap()
}

fn random_velocity(r: &mut StdRng, vel: &VelocitySpace) -> Vec<f64> {
    let mut u: Vec<f64> = (0..vel.num_raw()).map(|_| r.random_range(-1.0..1.0)).collect();
    vel.enforce(&mut u);
    u
}

/// Largest `|a(v; u, chi) + a(v; chi, u)|` and `|a(v; u, u)|` relative to
/// `|a(v; u, chi)|`, for random discrete fields and densities.
pub fn skew_defect(seed: u64) -> f64 {
    let mut r = rng(seed);
    let mesh = random_adapted_mesh(&mut r, 4, 2);
    let vel = VelocitySpace::new(&mesh);
    let rho: Vec<f64> = (0..mesh.num_elements()).map(|_| r.random_range(0.1..10.0)).collect();
    let v = random_velocity(&mut r, &vel);
    let u = random_velocity(&mut r, &vel);
    let chi = random_velocity(&mut r, &vel);
    let a = advection_form(&mesh, &rho, &v, &u, &chi);
    let b = advection_form(&mesh, &rho, &v, &chi, &u);
    let c = advection_form(&mesh, &rho, &v, &u, &u);
    (a + b).abs().max(c.abs()) / a.abs().max(1.0)
}

/// Random quadratic vector field, six coefficients per component.
pub fn random_quadratic(r: &mut StdRng) -> impl Fn(Vec2) -> Vec2 {
    let c: [f64; 12] = std::array::from_fn(|_| r.random_range(-2.0..2.0));
    move |p: Vec2| {
        let m = [1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y];
        let dot = |o: usize| (0..6).map(|k| c[o + k] * m[k]).sum::<f64>();
        Vec2::new(dot(0), dot(6))
    }
}

/// Largest nodal error after carrying a quadratic interpolant from a uniform
/// mesh to an adapted one and on to a differently adapted one.
pub fn quadratic_transfer_defect(seed: u64) -> f64 {
    let mut r = rng(seed);
    let q = random_quadratic(&mut r);
    let d = unit_box(WallKind::FreeSlip);
    let coarse = BulkMesh::uniform(&d, 2).unwrap();
    let a = random_adapted_mesh(&mut r, 5, 1);
    let b = random_adapted_mesh(&mut r, 4, 2);
    let u0 = VelocitySpace::new(&coarse).interpolate(&q);
    let ua = interpolate_velocity(&coarse, &u0, &a).unwrap();
    let ub = interpolate_velocity(&a, &ua, &b).unwrap();
    let back = interpolate_velocity(&b, &ub, &coarse).unwrap();
    let err = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
    err(&ua, &VelocitySpace::new(&a).interpolate(&q))
        .max(err(&ub, &VelocitySpace::new(&b).interpolate(&q)))
        .max(err(&back, &u0))
}

/// Relative change of the density integral under the element-mean transfer
/// between two randomly adapted meshes.
pub fn density_transfer_defect(seed: u64) -> f64 {
    let mut r = rng(seed);
    let a = random_adapted_mesh(&mut r, 5, 1);
    let b = random_adapted_mesh(&mut r, 4, 2);
    let rho: Vec<f64> = (0..a.num_elements()).map(|_| r.random_range(0.5..1200.0)).collect();
    let total = |m: &BulkMesh, x: &[f64]| (0..m.num_elements()).map(|e| x[e] * m.element_area(e)).sum::<f64>();
    let rb = project_density(&a, &rho, &b).unwrap();
    let ia = total(&a, &rho);
    (ia - total(&b, &rb)).abs() / ia
}
