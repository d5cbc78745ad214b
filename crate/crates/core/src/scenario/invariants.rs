//! Short runs that verify the structural properties every step must have.

use super::Scenario;
use crate::diagnostics::StepRecord;
use crate::error::Result;
use crate::stepper::{run, Scheme};

/// Outcome of one invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl InvariantCheck {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Relative energy slack accepted per step.
pub const ENERGY_TOL: f64 = 1e-10;
/// Relative volume change accepted by the structure-preserving scheme.
pub const VOLUME_TOL: f64 = 1e-8;

/// Runs `steps` steps with a tightened Picard tolerance and reports the
/// admissibility of the network, the discrete energy law, finiteness and,
/// for the structure-preserving scheme with enrichment, volume preservation.
/// Solver failures are returned as errors.
pub fn check_invariants(scenario: &Scenario, steps: usize) -> Result<Vec<InvariantCheck>> {
    let mut out = Vec::new();
    let report = scenario.net.check_assumptions();
    out.push(InvariantCheck::new("network assumptions", report.passed(), format!("{report:?}")));
    if !report.passed() {
        return Ok(out);
    }
    let mut cfg = scenario.config.clone();
    cfg.picard_tol = cfg.picard_tol.min(1e-10 * scenario.net.domain().diameter());
    cfg.max_steps = Some(steps);
    cfg.t_end = cfg.t_end.max(cfg.dt * steps as f64);
    cfg.wall_clock = None;
    let result = run(scenario.initial_state()?, &scenario.params, &cfg, |_| Ok(()))?;
    let recs: &[StepRecord] = &result.records;

    let worst = recs
        .iter()
        .skip(1)
        .map(|r| r.energy_slack / r.energy.abs().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    out.push(InvariantCheck::new(
        "energy law",
        worst >= -ENERGY_TOL,
        format!("smallest relative slack {worst:e} over {} steps", recs.len() - 1),
    ));

    let finite = recs.iter().all(|r| {
        r.energy.is_finite()
            && r.u_max.is_finite()
            && r.phases.iter().all(|p| p.vol.is_finite() && p.pmean.is_finite())
            && r.junctions.iter().all(|j| j.x.is_finite() && j.y.is_finite())
    });
    out.push(InvariantCheck::new("finite fields", finite, String::new()));

    let dvol = recs.iter().map(StepRecord::max_volume_change).fold(0.0, f64::max);
    if cfg.scheme == Scheme::StructurePreserving && cfg.xfem {
        out.push(InvariantCheck::new("volume preservation", dvol <= VOLUME_TOL, format!("max |vdelta| {dvol:e}")));
    }
    let after = result.state.net.check_assumptions();
    out.push(InvariantCheck::new("final network assumptions", after.passed(), format!("{after:?}")));
    Ok(out)
}
