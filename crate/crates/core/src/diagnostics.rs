//! Observables of a run: energies, the discrete energy balance, per-phase
//! volumes and benchmark quantities, region pressure means and CSV records.

use std::fmt::Write as _;

use crate::assembly::bulk::{self, ElementBasis};
use crate::error::Result;
use crate::fem::spaces::{region_pressure_integral, PressureField};
use crate::fem::{triangle_rule, ElementGeom};
use crate::geom::{orient, Vec2};
use crate::mesh::{BulkMesh, CutGeometry, RegionIncidence};
use crate::network::CurveNetwork;

/// `1/2 (rho u, u) + sum_i gamma_i |Gamma_i|`.
pub fn total_energy(mesh: &BulkMesh, rho: &[f64], u: &[f64], net: &CurveNetwork, gamma: &[f64]) -> Result<f64> {
    Ok(bulk::kinetic_energy(mesh, rho, u) + net.interfacial_energy(gamma)?)
}

/// Terms of the discrete energy inequality of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBalance {
    /// Energy of the lagged density and transferred velocity on the old interface.
    pub before: f64,
    /// Energy of the new velocity with the current density on the new interface.
    pub after: f64,
    /// `2 dt (eta D(U), D(U))`.
    pub dissipation: f64,
    /// `dt (rho g, U)`.
    pub work: f64,
}

impl EnergyBalance {
    /// Right-hand side minus left-hand side; nonnegative for solutions.
    pub fn slack(&self) -> f64 {
        self.before + self.work - self.after - self.dissipation
    }
}

/// Largest nodal velocity magnitude.
pub fn max_velocity(u: &[f64]) -> f64 {
    crate::fem::VelocitySpace::max_nodal_norm(u)
}

/// Integrals over one region by clipped sub-polygons.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RegionMoments {
    pub area: f64,
    /// Integral of the vertical velocity component.
    pub velocity: f64,
    /// Integral of the vertical coordinate.
    pub height: f64,
}

pub fn region_moments(mesh: &BulkMesh, cut: &CutGeometry, inc: &RegionIncidence, u: &[f64], l: usize) -> RegionMoments {
    let mut m = RegionMoments::default();
    let rule = triangle_rule();
    for e in 0..mesh.num_elements() {
        match cut.pieces(e) {
            Some(pieces) => {
                let eb = ElementBasis::new(mesh, e);
                for piece in pieces.iter().filter(|p| p.region == l) {
                    for tri in piece.fan_triangles() {
                        let a = 0.5 * orient(tri[0], tri[1], tri[2]);
                        let sub = ElementGeom::new(tri);
                        for &(lam, w) in &rule {
                            let p = sub.point(lam);
                            let phi = ElementGeom::p2_values(eb.geom.barycentric(p));
                            let uy: f64 = (0..6).map(|k| u[eb.raw(k, 1)] * phi[k]).sum();
                            m.area += a * w;
                            m.velocity += a * w * uy;
                            m.height += a * w * p.y;
                        }
                    }
                }
            }
            None if inc.regions(e) == [l] => {
                let eb = ElementBasis::new(mesh, e);
                for q in 0..7 {
                    let w = eb.weights[q];
                    m.area += w;
                    m.velocity += w * eb.value(u, q).y;
                    m.height += w * eb.geom.point(eb.bary[q]).y;
                }
            }
            None => {}
        }
    }
    m
}

/// Rise velocity, centre of mass height and relative volume change of a
/// region with initial volume `vol0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Benchmark {
    pub volume: f64,
    pub rise_velocity: f64,
    pub centre: f64,
    pub volume_change: f64,
}

pub fn benchmark_quantities(
    mesh: &BulkMesh,
    net: &CurveNetwork,
    cut: &CutGeometry,
    inc: &RegionIncidence,
    u: &[f64],
    l: usize,
    vol0: f64,
) -> Result<Benchmark> {
    let m = region_moments(mesh, cut, inc, u, l);
    let volume = net.region_area(l)?;
    Ok(Benchmark {
        volume,
        rise_velocity: m.velocity / m.area,
        centre: m.height / m.area,
        volume_change: (volume - vol0) / vol0,
    })
}

/// Area-weighted mean pressure over region `l`.
pub fn region_pressure_mean(
    mesh: &BulkMesh,
    cut: &CutGeometry,
    inc: &RegionIncidence,
    p: &PressureField,
    l: usize,
    area: f64,
) -> f64 {
    region_pressure_integral(mesh, cut, inc, p, l) / area
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRecord {
    pub vol: f64,
    pub vdelta: f64,
    pub vc: f64,
    pub yc: f64,
    pub pmean: f64,
}

/// One row of the time series.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub energy_slack: f64,
    pub u_max: f64,
    pub phases: Vec<PhaseRecord>,
    pub junctions: Vec<Vec2>,
    pub picard_iters: usize,
    pub krylov_iters: usize,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(num_phases: usize, num_junctions: usize) -> String {
    let mut h = String::from("step,t,E,energy_slack,u_max");
    for l in 0..num_phases {
        for key in ["vol", "vdelta", "Vc", "yc", "pmean"] {
            let _ = write!(h, ",{key}_{l}");
        }
    }
    for k in 0..num_junctions {
        let _ = write!(h, ",x_{k},y_{k}");
    }
    h.push_str(",picard_iters,krylov_iters");
    h
}

impl StepRecord {
    pub fn csv_row(&self) -> String {
        let mut r = format!("{},{},{},{},{}", self.step, num(self.t), num(self.energy), num(self.energy_slack), num(self.u_max));
        for p in &self.phases {
            for v in [p.vol, p.vdelta, p.vc, p.yc, p.pmean] {
                r.push(',');
                r.push_str(&num(v));
            }
        }
        for j in &self.junctions {
            let _ = write!(r, ",{},{}", num(j.x), num(j.y));
        }
        let _ = write!(r, ",{},{}", self.picard_iters, self.krylov_iters);
        r
    }

    /// Largest relative volume change over the phases.
    pub fn max_volume_change(&self) -> f64 {
        self.phases.iter().map(|p| p.vdelta.abs()).fold(0.0, f64::max)
    }
}

/// Full CSV text for a series of records.
pub fn to_csv(records: &[StepRecord]) -> String {
    let (np, nj) = records.first().map_or((0, 0), |r| (r.phases.len(), r.junctions.len()));
    let mut s = csv_header(np, nj);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}
