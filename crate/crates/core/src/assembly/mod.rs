//! Assembly of the coupled step system: momentum, divergence, kinematic and
//! curvature equations, with interface constraints applied by congruence.
//!
//! Unknowns are ordered as free velocity dofs, pressure unknowns, reduced
//! curvature coefficients and reduced displacement rates `(X^{m+1} - X^m)/dt`.
//! The system reads
//!
//! ```text
//! [  A   -B^T  -C    0   ] [u]   [f]
//! [ -B    0     0    0   ] [p] = [0]
//! [ -C^T  0     0    N   ] [k]   [0]
//! [  0    0     N^T  dt S] [y]   [-Z_V^T S X^m]
//! ```

pub mod bulk;
pub mod interface;

use crate::error::{FlowError, Result};
use crate::fem::{PressureSpace, SurfaceSpaces, VelocitySpace};
use crate::geom::Vec2;
use crate::mesh::{BulkMesh, CutGeometry};
use crate::network::{CurveNetwork, CurvePositions};
use crate::solver::{CsrMatrix, TripletBuilder};

/// Everything the forms of one time step depend on.
#[derive(Clone, Copy, Debug)]
pub struct FormContext<'a> {
    pub mesh: &'a BulkMesh,
    pub net: &'a CurveNetwork,
    pub cut: &'a CutGeometry,
    pub velocity: &'a VelocitySpace,
    pub pressure: &'a PressureSpace,
    pub surface: &'a SurfaceSpaces,
    /// Elementwise density of the current interface.
    pub rho: &'a [f64],
    /// Previous density transferred to the current mesh.
    pub rho_prev: &'a [f64],
    pub eta: &'a [f64],
    /// Surface tension per curve.
    pub gamma: &'a [f64],
    pub gravity: Vec2,
    pub dt: f64,
    /// Previous velocity transferred to the current mesh (raw layout).
    pub u_prev: &'a [f64],
}

impl FormContext<'_> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(FlowError::Context(format!("time step {} is not positive", self.dt)));
        }
        let ne = self.mesh.num_elements();
        for (name, f) in [("density", self.rho), ("previous density", self.rho_prev), ("viscosity", self.eta)] {
            if f.len() != ne {
                return Err(FlowError::Context(format!("{name} has {} values for {ne} elements", f.len())));
            }
        }
        if self.u_prev.len() != self.velocity.num_raw() {
            return Err(FlowError::Context("previous velocity is missing or on another mesh".into()));
        }
        if self.gamma.len() != self.net.num_curves() {
            return Err(FlowError::Context("one surface tension per curve is required".into()));
        }
        if self.cut.traversal.len() != self.net.num_curves() {
            return Err(FlowError::Context("cut geometry belongs to a different network".into()));
        }
        Ok(())
    }
}

/// Momentum blocks: `A = (rho + rho_prev)/(2 dt) M + advection + viscous`
/// and `f = (rho_prev u_prev, chi)/dt + (rho g, chi)`.
pub fn assemble_momentum(ctx: &FormContext) -> Result<(CsrMatrix, Vec<f64>)> {
    ctx.validate()?;
    let (mesh, vel) = (ctx.mesh, ctx.velocity);
    let mass_coef: Vec<f64> = ctx.rho.iter().zip(ctx.rho_prev).map(|(a, b)| 0.5 * (a + b) / ctx.dt).collect();
    let m = bulk::mass_matrix(mesh, vel, &mass_coef);
    let adv = bulk::advection_matrix(mesh, vel, ctx.rho, ctx.u_prev);
    let visc = bulk::viscous_matrix(mesh, vel, ctx.eta);
    let n = vel.num_free();
    let mut b = TripletBuilder::with_capacity(n, n, m.nnz() + adv.nnz() + visc.nnz());
    b.add_block(0, 0, &m, 1.0);
    b.add_block(0, 0, &adv, 1.0);
    b.add_block(0, 0, &visc, 1.0);
    let inertia: Vec<f64> = ctx.rho_prev.iter().map(|r| r / ctx.dt).collect();
    let mut f = bulk::mass_times(mesh, vel, &inertia, ctx.u_prev);
    for (fi, gi) in f.iter_mut().zip(bulk::body_force(mesh, vel, ctx.rho, ctx.gravity)) {
        *fi += gi;
    }
    Ok((b.build(), f))
}

/// Surface-to-bulk coupling on free velocity dofs and interface vertices.
pub fn assemble_coupling(ctx: &FormContext) -> Result<CsrMatrix> {
    let raw = interface::coupling_raw(ctx.mesh, ctx.net, ctx.cut)?;
    Ok(interface::free_rows(&raw, ctx.velocity))
}

/// `(div chi, psi_v)` for every P1 hat `psi_v` and raw velocity dof.
pub fn divergence_p1_raw(mesh: &BulkMesh) -> CsrMatrix {
    let num_raw = 2 * (mesh.num_vertices() + mesh.edges().len());
    let mut b = TripletBuilder::with_capacity(mesh.num_vertices(), num_raw, mesh.num_elements() * 36);
    for e in 0..mesh.num_elements() {
        let eb = bulk::ElementBasis::new(mesh, e);
        let tri = mesh.triangles()[e];
        for (i, &v) in tri.iter().enumerate() {
            for k in 0..6 {
                let (mut sx, mut sy) = (0.0, 0.0);
                for q in 0..7 {
                    let w = eb.weights[q] * eb.bary[q][i];
                    sx += w * eb.grad[q][k].x;
                    sy += w * eb.grad[q][k].y;
                }
                b.add(v, eb.raw(k, 0), sx);
                b.add(v, eb.raw(k, 1), sy);
            }
        }
    }
    b.build()
}

/// Divergence block `(div chi, q)` over pressure unknowns and free velocity
/// dofs. The row of the enrichment of region `l` is the flux of `chi`
/// through the region boundary, assembled from the coupling matrix; walls
/// carry no flux since free fields have zero wall-normal component.
pub fn assemble_divergence(ctx: &FormContext, coupling: &CsrMatrix) -> Result<CsrMatrix> {
    let (mesh, vel, ps) = (ctx.mesh, ctx.velocity, ctx.pressure);
    if ps.num_p1() != mesh.num_vertices() {
        return Err(FlowError::Context("pressure space belongs to another mesh".into()));
    }
    let raw = divergence_p1_raw(mesh);
    let mut b = TripletBuilder::with_capacity(ps.num_unknowns(), vel.num_free(), raw.nnz());
    for v in 0..mesh.num_vertices() {
        let Some(row) = ps.p1_unknown(v) else { continue };
        for (r, val) in raw.row(v) {
            if let Some(col) = vel.free_index(r) {
                b.add(row, col, val);
            }
        }
    }
    if ps.is_enriched() {
        let t = coupling.transpose();
        for (k, &l) in ps.enriched_regions().iter().enumerate() {
            let row = ps.enrichment_unknown(k);
            for &(i, o) in &ctx.net.regions()[l].curves {
                let off = ctx.surface.offset(i);
                for g in off..off + ctx.net.curve(i).num_vertices() {
                    for (col, v) in t.row(g) {
                        b.add(row, col, f64::from(o) * v);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Reduced lumped normal mass `Z_W^T N Z_V` with the current normals, or the
/// time-weighted normals towards `new`.
pub fn assemble_kinematic(ctx: &FormContext, new: Option<&CurvePositions>) -> Result<CsrMatrix> {
    let n = interface::normal_mass(ctx.net, new)?;
    Ok(n.congruence(&ctx.surface.w.to_csr(), &ctx.surface.v.to_csr()))
}

/// Reduced stiffness `Z_V^T S Z_V` and the load `-Z_V^T S X^m`.
pub fn assemble_curvature(ctx: &FormContext) -> Result<(CsrMatrix, Vec<f64>)> {
    let s = interface::stiffness(ctx.net, ctx.gamma)?;
    let zv = ctx.surface.v.to_csr();
    let x = ctx.surface.flatten_vectors(&ctx.net.positions());
    let load: Vec<f64> = zv.matvec_t(&s.matvec(&x)).into_iter().map(|v| -v).collect();
    Ok((s.congruence(&zv, &zv), load))
}

/// Block sizes of the step system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub velocity: usize,
    pub pressure: usize,
    pub curvature: usize,
    pub displacement: usize,
}

impl Layout {
    pub fn total(&self) -> usize {
        self.velocity + self.pressure + self.curvature + self.displacement
    }

    pub fn offsets(&self) -> [usize; 4] {
        let a = self.velocity;
        let b = a + self.pressure;
        let c = b + self.curvature;
        [0, a, b, c]
    }
}

/// Assembled step system with constraints eliminated.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    /// Reduced coupling `C Z_W`.
    pub c: CsrMatrix,
    /// Reduced lumped normal mass.
    pub n: CsrMatrix,
    /// Reduced stiffness.
    pub s: CsrMatrix,
    pub dt: f64,
    pub f: Vec<f64>,
    pub load: Vec<f64>,
}

/// Solution blocks of the step system.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleParts {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub kappa: Vec<f64>,
    pub y: Vec<f64>,
}

impl SaddleSystem {
    pub fn layout(&self) -> Layout {
        Layout { velocity: self.a.nrows(), pressure: self.b.nrows(), curvature: self.n.nrows(), displacement: self.s.nrows() }
    }

    /// The full sparse matrix.
    pub fn matrix(&self) -> CsrMatrix {
        let l = self.layout();
        let [ou, op, ok, oy] = l.offsets();
        let nnz = self.a.nnz() + 2 * (self.b.nnz() + self.c.nnz() + self.n.nnz()) + self.s.nnz();
        let mut m = TripletBuilder::with_capacity(l.total(), l.total(), nnz);
        m.add_block(ou, ou, &self.a, 1.0);
        m.add_block_t(ou, op, &self.b, -1.0);
        m.add_block(ou, ok, &self.c, -1.0);
        m.add_block(op, ou, &self.b, -1.0);
        m.add_block_t(ok, ou, &self.c, -1.0);
        m.add_block(ok, oy, &self.n, 1.0);
        m.add_block_t(oy, ok, &self.n, 1.0);
        m.add_block(oy, oy, &self.s, self.dt);
        m.build()
    }

    pub fn rhs(&self) -> Vec<f64> {
        let l = self.layout();
        let mut r = Vec::with_capacity(l.total());
        r.extend_from_slice(&self.f);
        r.resize(l.velocity + l.pressure + l.curvature, 0.0);
        r.extend_from_slice(&self.load);
        r
    }

    pub fn split(&self, x: &[f64]) -> SaddleParts {
        let [_, op, ok, oy] = self.layout().offsets();
        SaddleParts { u: x[..op].to_vec(), p: x[op..ok].to_vec(), kappa: x[ok..oy].to_vec(), y: x[oy..].to_vec() }
    }

    /// Replaces the kinematic and curvature normal blocks.
    pub fn set_normal_mass(&mut self, n: CsrMatrix) {
        debug_assert_eq!((n.nrows(), n.ncols()), (self.n.nrows(), self.n.ncols()));
        self.n = n;
    }
}

/// Assembles the full step system. `new` selects time-weighted normals
/// towards the given positions for the lumped terms.
pub fn assemble_system(ctx: &FormContext, new: Option<&CurvePositions>) -> Result<SaddleSystem> {
    ctx.validate()?;
    let (a, f) = assemble_momentum(ctx)?;
    let coupling = assemble_coupling(ctx)?;
    let b = assemble_divergence(ctx, &coupling)?;
    let c = coupling.matmul(&ctx.surface.w.to_csr());
    let n = assemble_kinematic(ctx, new)?;
    let (s, load) = assemble_curvature(ctx)?;
    Ok(SaddleSystem { a, b, c, n, s, dt: ctx.dt, f, load })
}
