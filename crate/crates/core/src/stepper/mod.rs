//! Time stepping: per step the bulk mesh is adapted to the interface, fields
//! are transferred, the step system is assembled and solved (once for the
//! linear scheme, by lagged Picard iteration for the structure-preserving
//! scheme) and the interface is moved.

mod solve;

pub use solve::{solve_direct_system, solve_system, system_condition, LinearSolver, SaddleSolution, SolverSettings, WarmStart};

use std::time::Instant;

use crate::assembly::{assemble_kinematic, assemble_system, bulk, FormContext, Layout, SaddleSystem};
use crate::diagnostics::{self, EnergyBalance, PhaseRecord, StepRecord};
use crate::error::{FlowError, Result};
use crate::fem::spaces::PressureField;
use crate::fem::{interpolate_velocity, project_density, PressureSpace, SurfaceSpaces, VelocitySpace};
use crate::geom::Vec2;
use crate::mesh::{classify_with, clip_elements, phase_average_coefficients, AdaptLevels, BulkMesh, CutGeometry, RegionIncidence};
use crate::network::{CurveNetwork, CurvePositions};
use crate::solver::DirectLu;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Linear,
    StructurePreserving,
}

impl Scheme {
    pub fn keyword(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::StructurePreserving => "sp",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Self::Linear),
            "sp" | "structure_preserving" => Some(Self::StructurePreserving),
            _ => None,
        }
    }
}

/// Material data: density and viscosity per region, tension per curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseParams {
    pub rho: Vec<f64>,
    pub eta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gravity: Vec2,
}

impl PhaseParams {
    pub fn validate(&self, net: &CurveNetwork) -> Result<()> {
        if self.rho.len() != net.num_regions() || self.eta.len() != net.num_regions() {
            return Err(FlowError::Argument(format!(
                "{} densities and {} viscosities for {} regions",
                self.rho.len(),
                self.eta.len(),
                net.num_regions()
            )));
        }
        if self.gamma.len() != net.num_curves() {
            return Err(FlowError::Argument(format!("{} tensions for {} curves", self.gamma.len(), net.num_curves())));
        }
        if self.rho.iter().any(|&r| !(r >= 0.0)) || self.eta.iter().any(|&e| !(e > 0.0)) || self.gamma.iter().any(|&g| !(g > 0.0)) {
            return Err(FlowError::Argument("densities must be >= 0, viscosities and tensions > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub xfem: bool,
    /// Largest vertex update accepted as converged by the Picard loop.
    pub picard_tol: f64,
    pub picard_max: usize,
    pub adapt: AdaptLevels,
    pub solver: SolverSettings,
    /// Step rejections with halved time step before giving up.
    pub max_halvings: u32,
    pub max_steps: Option<usize>,
    /// Wall-clock budget in seconds.
    pub wall_clock: Option<f64>,
}

impl SchemeConfig {
    /// Defaults for a domain of the given diameter.
    pub fn new(scheme: Scheme, dt: f64, t_end: f64, adapt: AdaptLevels, diameter: f64) -> Self {
        Self {
            scheme,
            dt,
            t_end,
            xfem: true,
            picard_tol: 1e-8 * diameter,
            picard_max: 50,
            adapt,
            solver: SolverSettings::default(),
            max_halvings: 3,
            max_steps: None,
            wall_clock: None,
        }
    }

    /// `n adapt_{k,l}`: time step `1e-3 / n` with fine level `k` and coarse level `l`.
    pub fn with_adapt_notation(mut self, n: u32, k: u32, l: u32) -> Result<Self> {
        if n == 0 {
            return Err(FlowError::Argument("adapt multiplier must be positive".into()));
        }
        self.dt = 1e-3 / f64::from(n);
        self.adapt = AdaptLevels::new(k, l)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return Err(FlowError::Argument("time step must be positive and end time nonnegative".into()));
        }
        if !(self.picard_tol > 0.0) || self.picard_max == 0 {
            return Err(FlowError::Argument("picard tolerance and iteration cap must be positive".into()));
        }
        if !(self.solver.tol > 0.0) {
            return Err(FlowError::Argument("solver tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// State at time `t_m`: interface, velocity on the mesh of the previous step
/// and the density used on that mesh.
#[derive(Clone, Debug)]
pub struct SimState {
    pub step: usize,
    pub t: f64,
    pub net: CurveNetwork,
    pub mesh: BulkMesh,
    /// Velocity in raw P2 layout on `mesh`.
    pub u: Vec<f64>,
    /// Elementwise density on `mesh`; absent before the first step.
    pub rho_prev: Option<Vec<f64>>,
    pub pressure: Option<PressureField>,
    /// Region volumes of the initial interface.
    pub initial_volumes: Vec<f64>,
}

impl SimState {
    /// Initial state with velocity interpolated from `u0`.
    pub fn new(net: CurveNetwork, adapt: AdaptLevels, u0: impl Fn(Vec2) -> Vec2) -> Result<Self> {
        let mesh = BulkMesh::adapted(net.domain(), &net, adapt)?;
        let vel = VelocitySpace::new(&mesh);
        let mut u = vel.interpolate(u0);
        vel.enforce(&mut u);
        let initial_volumes = net.region_areas()?;
        Ok(Self { step: 0, t: 0.0, net, mesh, u, rho_prev: None, pressure: None, initial_volumes })
    }
}

/// Geometry and coefficients of one step on the adapted mesh.
struct StepSetup {
    mesh: BulkMesh,
    cut: CutGeometry,
    inc: RegionIncidence,
    rho: Vec<f64>,
    eta: Vec<f64>,
    rho_prev: Vec<f64>,
    u_prev: Vec<f64>,
    velocity: VelocitySpace,
    pressure: PressureSpace,
    surface: SurfaceSpaces,
}

impl StepSetup {
    fn new(state: &SimState, params: &PhaseParams, cfg: &SchemeConfig) -> Result<Self> {
        let net = &state.net;
        let mesh = state.mesh.adapt(net, cfg.adapt.fine, cfg.adapt.coarse)?;
        let cut = clip_elements(&mesh, net)?;
        let inc = classify_with(&mesh, net, &cut);
        let (rho, eta) = phase_average_coefficients(&inc, &params.rho, &params.eta)?;
        let velocity = VelocitySpace::new(&mesh);
        let mut u_prev = interpolate_velocity(&state.mesh, &state.u, &mesh)?;
        velocity.enforce(&mut u_prev);
        let rho_prev = match &state.rho_prev {
            Some(r) => project_density(&state.mesh, r, &mesh)?,
            None => rho.clone(),
        };
        let pressure = PressureSpace::new(&mesh, net, cfg.xfem)?;
        let surface = SurfaceSpaces::new(net);
        Ok(Self { mesh, cut, inc, rho, eta, rho_prev, u_prev, velocity, pressure, surface })
    }

    fn ctx<'a>(&'a self, net: &'a CurveNetwork, params: &'a PhaseParams, dt: f64) -> FormContext<'a> {
        FormContext {
            mesh: &self.mesh,
            net,
            cut: &self.cut,
            velocity: &self.velocity,
            pressure: &self.pressure,
            surface: &self.surface,
            rho: &self.rho,
            rho_prev: &self.rho_prev,
            eta: &self.eta,
            gamma: &params.gamma,
            gravity: params.gravity,
            dt,
            u_prev: &self.u_prev,
        }
    }

    /// Lumped pressure mass over viscosity per pressure unknown.
    fn pressure_diag(&self, params: &PhaseParams) -> Vec<f64> {
        let mut d = vec![0.0; self.mesh.num_vertices()];
        for (e, t) in self.mesh.triangles().iter().enumerate() {
            let w = self.mesh.element_area(e) / (3.0 * self.eta[e]);
            for &v in t {
                d[v] += w;
            }
        }
        let mut out: Vec<f64> = (0..d.len()).filter(|&v| self.pressure.p1_unknown(v).is_some()).map(|v| d[v]).collect();
        for &l in self.pressure.enriched_regions() {
            out.push(self.pressure.region_areas()[l] / params.eta[l]);
        }
        out
    }
}

/// First linear system of a step from `state`, on the adapted mesh and with
/// the current normals.
pub fn step_system(state: &SimState, params: &PhaseParams, cfg: &SchemeConfig) -> Result<SaddleSystem> {
    state.net.check_assumptions().into_result()?;
    params.validate(&state.net)?;
    let setup = StepSetup::new(state, params, cfg)?;
    assemble_system(&setup.ctx(&state.net, params, cfg.dt), None)
}

/// Result of one accepted step.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub state: SimState,
    pub record: StepRecord,
    pub balance: EnergyBalance,
    /// Curvature values per curve on the old interface.
    pub kappa: Vec<Vec<f64>>,
    pub dt: f64,
}

fn positions_from(surface: &SurfaceSpaces, flat: &[f64]) -> CurvePositions {
    surface.split_vectors(flat)
}

fn max_vertex_change(a: &[f64], b: &[f64]) -> f64 {
    a.chunks_exact(2).zip(b.chunks_exact(2)).map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1])).fold(0.0, f64::max)
}

/// Factorization and solution of the last solved system, reused as GMRES
/// preconditioner and initial guess while the mesh, the unknown layout and
/// the time step stay unchanged.
#[derive(Default)]
pub struct SolverCache {
    key: Option<(Vec<u8>, Layout, u64)>,
    lu: Option<DirectLu>,
    x: Vec<f64>,
}

impl SolverCache {
    fn prepare(&mut self, key: (Vec<u8>, Layout, u64)) {
        if self.key.as_ref() != Some(&key) {
            *self = Self { key: Some(key), lu: None, x: Vec::new() };
        }
    }

    fn warm<'a>(&'a self, x: Option<&'a [f64]>) -> Option<WarmStart<'a>> {
        let x = x.unwrap_or(&self.x);
        let lu = self.lu.as_ref()?;
        (x.len() == lu.dim()).then_some(WarmStart { lu, x })
    }
}

/// Solves one step with time step `dt`.
fn advance(state: &SimState, params: &PhaseParams, cfg: &SchemeConfig, dt: f64, cache: &mut SolverCache) -> Result<StepOutput> {
    let net = &state.net;
    net.check_assumptions().into_result()?;
    let setup = StepSetup::new(state, params, cfg)?;
    let ctx = setup.ctx(net, params, dt);
    let mut sys: SaddleSystem = assemble_system(&ctx, None)?;
    let pdiag = setup.pressure_diag(params);
    let x_old = setup.surface.flatten_vectors(&net.positions());
    let new_positions = |sys: &SaddleSystem, x: &[f64]| -> Vec<f64> {
        let y = setup.surface.v.apply(&sys.split(x).y);
        x_old.iter().zip(&y).map(|(a, b)| a + dt * b).collect()
    };
    cache.prepare((setup.mesh.refinement_code(), sys.layout(), dt.to_bits()));
    let (mut sol, lu) = solve_system(&sys, &cfg.solver, &pdiag, cache.warm(None))?;
    if lu.is_some() {
        cache.lu = lu;
    }
    let mut krylov = sol.krylov_iters;
    let mut picard = 1;
    if cfg.scheme == Scheme::StructurePreserving {
        let mut prev = x_old.clone();
        let mut next = new_positions(&sys, &sol.x);
        loop {
            let change = max_vertex_change(&next, &prev);
            if change <= cfg.picard_tol {
                break;
            }
            if picard >= cfg.picard_max {
                return Err(FlowError::PicardDiverged { iterations: picard, last_update: change });
            }
            sys.set_normal_mass(assemble_kinematic(&ctx, Some(&positions_from(&setup.surface, &next)))?);
            let (s, lu) = solve_system(&sys, &cfg.solver, &pdiag, cache.warm(Some(&sol.x)))?;
            if lu.is_some() {
                cache.lu = lu;
            }
            sol = s;
            krylov += sol.krylov_iters;
            picard += 1;
            prev = next;
            next = new_positions(&sys, &sol.x);
        }
    }
    let parts = sys.split(&sol.x);
    cache.x.clone_from(&sol.x);
    let u_new = setup.velocity.expand(&parts.u);
    let p_field = setup.pressure.field(&parts.p);
    let kappa = setup.surface.split_scalars(&setup.surface.w.apply(&parts.kappa));
    let x_new = new_positions(&sys, &sol.x);
    let new_net = net.with_positions(positions_from(&setup.surface, &x_new))?;

    let mesh = &setup.mesh;
    let balance = EnergyBalance {
        before: diagnostics::total_energy(mesh, &setup.rho_prev, &setup.u_prev, net, &params.gamma)?,
        after: diagnostics::total_energy(mesh, &setup.rho, &u_new, &new_net, &params.gamma)?,
        dissipation: dt * bulk::viscous_dissipation(mesh, &setup.eta, &u_new),
        work: dt * bulk::body_work(mesh, &setup.rho, params.gravity, &u_new),
    };

    let new_cut = clip_elements(mesh, &new_net)?;
    let new_inc = classify_with(mesh, &new_net, &new_cut);
    let old_areas = net.region_areas()?;
    let mut phases = Vec::with_capacity(net.num_regions());
    for l in 0..net.num_regions() {
        let b = diagnostics::benchmark_quantities(mesh, &new_net, &new_cut, &new_inc, &u_new, l, state.initial_volumes[l])?;
        let pmean = diagnostics::region_pressure_mean(mesh, &setup.cut, &setup.inc, &p_field, l, old_areas[l]);
        phases.push(PhaseRecord { vol: b.volume, vdelta: b.volume_change, vc: b.rise_velocity, yc: b.centre, pmean });
    }
    let record = StepRecord {
        step: state.step + 1,
        t: state.t + dt,
        energy: balance.after,
        energy_slack: balance.slack(),
        u_max: diagnostics::max_velocity(&u_new),
        phases,
        junctions: (0..new_net.junctions().len()).map(|k| new_net.junction_position(k)).collect(),
        picard_iters: picard,
        krylov_iters: krylov,
    };
    let next_state = SimState {
        step: state.step + 1,
        t: state.t + dt,
        net: new_net,
        mesh: setup.mesh,
        u: u_new,
        rho_prev: Some(setup.rho),
        pressure: Some(p_field),
        initial_volumes: state.initial_volumes.clone(),
    };
    Ok(StepOutput { state: next_state, record, balance, kappa, dt })
}

/// One step of the configured scheme. Picard stalls are retried with halved
/// time steps up to `max_halvings` times.
pub fn step(state: &SimState, params: &PhaseParams, cfg: &SchemeConfig, dt: f64) -> Result<StepOutput> {
    step_cached(state, params, cfg, dt, &mut SolverCache::default())
}

/// [`step`] reusing factorizations across calls through `cache`.
pub fn step_cached(
    state: &SimState,
    params: &PhaseParams,
    cfg: &SchemeConfig,
    dt: f64,
    cache: &mut SolverCache,
) -> Result<StepOutput> {
    params.validate(&state.net)?;
    cfg.validate()?;
    let mut dt_try = dt;
    let mut halvings = 0;
    loop {
        match advance(state, params, cfg, dt_try, cache) {
            Err(FlowError::PicardDiverged { iterations, last_update }) if halvings < cfg.max_halvings => {
                log::warn!(
                    "step {}: picard stalled after {iterations} iterations (update {last_update:e}), halving dt to {:e}",
                    state.step + 1,
                    dt_try / 2.0
                );
                dt_try /= 2.0;
                halvings += 1;
            }
            r => return r,
        }
    }
}

/// Record of the initial state.
pub fn initial_record(state: &SimState, params: &PhaseParams) -> Result<StepRecord> {
    let net = &state.net;
    let cut = clip_elements(&state.mesh, net)?;
    let inc = classify_with(&state.mesh, net, &cut);
    let (rho, _) = phase_average_coefficients(&inc, &params.rho, &params.eta)?;
    let mut phases = Vec::with_capacity(net.num_regions());
    for l in 0..net.num_regions() {
        let b = diagnostics::benchmark_quantities(&state.mesh, net, &cut, &inc, &state.u, l, state.initial_volumes[l])?;
        phases.push(PhaseRecord { vol: b.volume, vdelta: b.volume_change, vc: b.rise_velocity, yc: b.centre, pmean: 0.0 });
    }
    Ok(StepRecord {
        step: state.step,
        t: state.t,
        energy: diagnostics::total_energy(&state.mesh, &rho, &state.u, net, &params.gamma)?,
        energy_slack: 0.0,
        u_max: diagnostics::max_velocity(&state.u),
        phases,
        junctions: (0..net.junctions().len()).map(|k| net.junction_position(k)).collect(),
        picard_iters: 0,
        krylov_iters: 0,
    })
}

/// Why a run ended before its end time.
#[derive(Clone, Debug, PartialEq)]
pub enum StopReason {
    Completed,
    StepCap,
    WallClock,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    pub state: SimState,
    pub stop: StopReason,
}

/// Runs from `initial` to the end time, calling `observe` after every step.
pub fn run(
    initial: SimState,
    params: &PhaseParams,
    cfg: &SchemeConfig,
    mut observe: impl FnMut(&StepOutput) -> Result<()>,
) -> Result<RunOutput> {
    params.validate(&initial.net)?;
    cfg.validate()?;
    let started = Instant::now();
    let mut records = vec![initial_record(&initial, params)?];
    let mut state = initial;
    let eps = 1e-9 * cfg.dt;
    let mut stop = StopReason::Completed;
    let mut cache = SolverCache::default();
    while state.t < cfg.t_end - eps {
        if cfg.max_steps.is_some_and(|n| state.step >= n) {
            stop = StopReason::StepCap;
            break;
        }
        if cfg.wall_clock.is_some_and(|w| started.elapsed().as_secs_f64() > w) {
            stop = StopReason::WallClock;
            break;
        }
        let dt = cfg.dt.min(cfg.t_end - state.t);
        let out = step_cached(&state, params, cfg, dt, &mut cache).map_err(|e| FlowError::AtStep { step: state.step + 1, source: Box::new(e) })?;
        log::info!(
            "step {} t={:.6} E={:.10e} slack={:.3e} u_max={:.3e} picard={}",
            out.record.step,
            out.record.t,
            out.record.energy,
            out.record.energy_slack,
            out.record.u_max,
            out.record.picard_iters
        );
        observe(&out)?;
        records.push(out.record);
        state = out.state;
    }
    Ok(RunOutput { records, state, stop })
}
