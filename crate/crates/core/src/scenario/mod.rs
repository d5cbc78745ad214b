//! Benchmark setups: presets with their physical parameters, desk-scale run
//! settings, run configuration files, checkpoints and the invariant suite.

mod checkpoint;
mod config;
mod invariants;
pub mod shapes;

pub use checkpoint::Checkpoint;
pub use config::RunConfig;
pub use invariants::{check_invariants, InvariantCheck};

use std::f64::consts::PI;

use crate::error::{FlowError, Result};
use crate::geom::{Domain, Vec2, WallKind};
use crate::network::CurveNetwork;
use crate::stepper::{PhaseParams, SchemeConfig, SimState};

/// Gravity of the buoyancy-driven setups.
pub const GRAVITY: Vec2 = Vec2 { x: 0.0, y: -0.98 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Stokes flow around a symmetric double bubble at rest.
    Ex1DoubleBubble,
    /// Stokes flow around a symmetric triple bubble at rest.
    Ex1TripleBubble,
    /// Double bubble with unequal tensions.
    Ex1NonsymDouble,
    /// Triple bubble with unequal tensions.
    Ex1NonsymTriple,
    /// Triple junction sliding along a flat interface.
    Ex2JunctionMigration,
    /// Light bubble rising into a two-layer liquid.
    Ex3TrappedBubble,
    /// Gas bubble pulling up a heavy liquid bubble.
    Ex4GasLiquidDouble,
    /// Rising triple bubble, moderate density contrast.
    Ex5TripleRiseA,
    /// Rising triple bubble, low tension and high contrast.
    Ex5TripleRiseB,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Ex1DoubleBubble,
        Preset::Ex1TripleBubble,
        Preset::Ex1NonsymDouble,
        Preset::Ex1NonsymTriple,
        Preset::Ex2JunctionMigration,
        Preset::Ex3TrappedBubble,
        Preset::Ex4GasLiquidDouble,
        Preset::Ex5TripleRiseA,
        Preset::Ex5TripleRiseB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ex1DoubleBubble => "ex1_double_bubble",
            Preset::Ex1TripleBubble => "ex1_triple_bubble",
            Preset::Ex1NonsymDouble => "ex1_nonsym_double",
            Preset::Ex1NonsymTriple => "ex1_nonsym_triple",
            Preset::Ex2JunctionMigration => "ex2_junction_migration",
            Preset::Ex3TrappedBubble => "ex3_trapped_bubble",
            Preset::Ex4GasLiquidDouble => "ex4_gas_liquid_double",
            Preset::Ex5TripleRiseA => "ex5_triple_rise_a",
            Preset::Ex5TripleRiseB => "ex5_triple_rise_b",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            FlowError::Argument(format!("unknown preset '{s}' (expected one of {})", names.join(", ")))
        })
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Ex1DoubleBubble => "Stokes flow, symmetric standard double bubble with radii 0.3 in (-1,1)^2",
            Preset::Ex1TripleBubble => "Stokes flow, symmetric standard triple bubble with bubble areas 3pi/25",
            Preset::Ex1NonsymDouble => "Stokes flow, standard double bubble with tensions (1.5, 2, 1)",
            Preset::Ex1NonsymTriple => "Stokes flow, standard triple bubble with tensions (1.4, 1.6, 1.8, 1, 1, 1)",
            Preset::Ex2JunctionMigration => "triple junction migrating along a flat interface in (0,2)x(0,1)",
            Preset::Ex3TrappedBubble => "bubble of radius 3/16 rising through a two-layer liquid",
            Preset::Ex4GasLiquidDouble => "gas half disk and liquid half ellipse rising together",
            Preset::Ex5TripleRiseA => "rising standard triple bubble, gamma 24.5",
            Preset::Ex5TripleRiseB => "rising standard triple bubble, gamma 1.96",
        }
    }

    pub fn domain(self) -> Domain {
        use WallKind::{FreeSlip, NoSlip};
        match self {
            Preset::Ex1DoubleBubble | Preset::Ex1TripleBubble | Preset::Ex1NonsymDouble | Preset::Ex1NonsymTriple => {
                Domain::new(Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0), [NoSlip; 4])
            }
            Preset::Ex2JunctionMigration => {
                Domain::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0), [FreeSlip, FreeSlip, NoSlip, NoSlip])
            }
            _ => Domain::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 2.0), [FreeSlip, FreeSlip, NoSlip, NoSlip]),
        }
    }

    /// Default number of interface vertices.
    pub fn default_vertices(self) -> usize {
        match self {
            Preset::Ex1DoubleBubble | Preset::Ex1NonsymDouble => 128,
            Preset::Ex1TripleBubble | Preset::Ex1NonsymTriple => 144,
            Preset::Ex2JunctionMigration => 66,
            _ => 96,
        }
    }

    pub fn network(self, vertices: usize) -> Result<CurveNetwork> {
        let d = self.domain();
        match self {
            Preset::Ex1DoubleBubble | Preset::Ex1NonsymDouble => shapes::standard_double_bubble(d, Vec2::ZERO, 0.3, vertices),
            Preset::Ex1TripleBubble | Preset::Ex1NonsymTriple => {
                shapes::standard_triple_bubble(d, Vec2::ZERO, 3.0 * PI / 25.0, vertices)
            }
            Preset::Ex2JunctionMigration => shapes::junction_migration(d, 0.375, 0.25, vertices),
            Preset::Ex3TrappedBubble => shapes::trapped_bubble(d, Vec2::new(0.5, 1.0), 3.0 / 16.0, vertices),
            Preset::Ex4GasLiquidDouble => shapes::disk_ellipse_double(d, Vec2::new(0.35, 0.7), 0.15, 0.45, vertices),
            Preset::Ex5TripleRiseA | Preset::Ex5TripleRiseB => {
                shapes::standard_triple_bubble(d, Vec2::new(0.5, 0.5), 3.0 * PI / 400.0, vertices)
            }
        }
    }

    /// Densities and viscosities per region, tensions per curve, gravity.
    pub fn physics(self) -> PhaseParams {
        let p = |rho: &[f64], eta: &[f64], gamma: &[f64], gravity| PhaseParams {
            rho: rho.to_vec(),
            eta: eta.to_vec(),
            gamma: gamma.to_vec(),
            gravity,
        };
        match self {
            Preset::Ex1DoubleBubble => p(&[0.0; 3], &[1.0; 3], &[1.0; 3], Vec2::ZERO),
            Preset::Ex1TripleBubble => p(&[0.0; 4], &[1.0; 4], &[1.0; 6], Vec2::ZERO),
            Preset::Ex1NonsymDouble => p(&[0.0; 3], &[1.0; 3], &[1.5, 2.0, 1.0], Vec2::ZERO),
            Preset::Ex1NonsymTriple => p(&[0.0; 4], &[1.0; 4], &[1.4, 1.6, 1.8, 1.0, 1.0, 1.0], Vec2::ZERO),
            Preset::Ex2JunctionMigration => p(&[1.0; 3], &[1.0; 3], &[1.0; 3], GRAVITY),
            Preset::Ex3TrappedBubble => p(&[1000.0, 1200.0, 1.0], &[0.1, 0.15, 1e-4], &[5.0; 4], GRAVITY),
            Preset::Ex4GasLiquidDouble => p(&[1.0, 1100.0, 1000.0], &[0.1, 10.0, 10.0], &[24.5; 3], GRAVITY),
            Preset::Ex5TripleRiseA => p(&[1000.0, 100.0, 100.0, 100.0], &[1.0; 4], &[24.5; 6], GRAVITY),
            Preset::Ex5TripleRiseB => p(&[1000.0, 1.0, 1.0, 1.0], &[10.0, 0.1, 0.1, 0.1], &[1.96; 6], GRAVITY),
        }
    }

    /// Desk-scale defaults: `(dt, fine, coarse, end time)`.
    pub fn desk_settings(self) -> (f64, u32, u32, f64) {
        match self {
            Preset::Ex1DoubleBubble | Preset::Ex1TripleBubble | Preset::Ex1NonsymDouble | Preset::Ex1NonsymTriple => {
                (1e-3, 4, 4, 0.05)
            }
            Preset::Ex2JunctionMigration => (1e-2, 4, 2, 5.0),
            Preset::Ex3TrappedBubble => (2e-3, 4, 2, 3.0),
            Preset::Ex4GasLiquidDouble => (2e-3, 4, 2, 1.0),
            Preset::Ex5TripleRiseA | Preset::Ex5TripleRiseB => (2e-3, 4, 2, 1.0),
        }
    }
}

/// A fully specified run: initial network, physics and scheme settings.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub preset: Preset,
    pub net: CurveNetwork,
    pub params: PhaseParams,
    pub config: SchemeConfig,
}

impl Scenario {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let net = cfg.preset.network(cfg.vertices)?;
        let params = cfg.preset.physics();
        params.validate(&net)?;
        let config = cfg.scheme_config()?;
        config.validate()?;
        Ok(Self { preset: cfg.preset, net, params, config })
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::from_config(&RunConfig::preset(Preset::from_name(name)?))
    }

    /// Initial state at rest.
    pub fn initial_state(&self) -> Result<SimState> {
        SimState::new(self.net.clone(), self.config.adapt, |_| Vec2::ZERO)
    }
}
