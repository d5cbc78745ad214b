//! Front-tracking finite element solver for two-dimensional multiphase
//! incompressible flow with triple junctions.
//!
//! Interfaces are polygonal curve networks moved by a parametric scheme; the
//! bulk flow uses unfitted P2-P1 Taylor-Hood elements on an adaptive
//! bisection mesh, optionally with per-phase pressure enrichment.

pub mod assembly;
pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod geom;
pub mod mesh;
pub mod network;
pub mod scenario;
pub mod solver;
pub mod stepper;

pub use error::{FlowError, Result};
pub use geom::{Domain, Vec2, Wall, WallKind};
pub use mesh::{AdaptLevels, BulkMesh};
pub use network::CurveNetwork;
pub use scenario::{Preset, RunConfig, Scenario};
