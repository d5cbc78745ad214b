//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! preset = ex1_double_bubble
//! scheme = sp
//! xfem = true
//! dt = 0.001
//! ```
//!
//! `preset` selects the defaults every other key overrides. Optional keys
//! take `none`.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::Preset;
use crate::error::{FlowError, Result};
use crate::mesh::AdaptLevels;
use crate::stepper::{LinearSolver, Scheme, SchemeConfig, SolverSettings};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub scheme: Scheme,
    pub xfem: bool,
    pub dt: f64,
    pub t_end: f64,
    pub fine: u32,
    pub coarse: u32,
    /// Target number of interface vertices.
    pub vertices: usize,
    /// Picard tolerance relative to the domain diameter.
    pub picard_tol: f64,
    pub picard_max: usize,
    pub solver: LinearSolver,
    pub solver_tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub max_halvings: u32,
    pub max_steps: Option<usize>,
    pub wall_clock: Option<f64>,
    /// Steps between checkpoints; 0 disables them.
    pub checkpoint_every: usize,
}

const KEYS: [&str; 18] = [
    "preset",
    "scheme",
    "xfem",
    "dt",
    "t_end",
    "fine",
    "coarse",
    "vertices",
    "picard_tol",
    "picard_max",
    "solver",
    "solver_tol",
    "restart",
    "max_iter",
    "max_halvings",
    "max_steps",
    "wall_clock",
    "checkpoint_every",
];

fn perr(line: usize, msg: impl Into<String>) -> FlowError {
    FlowError::Parse { line, msg: msg.into() }
}

fn value<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| perr(line, format!("bad value '{v}' for {key}")))
}

fn optional<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<Option<T>> {
    if v == "none" {
        Ok(None)
    } else {
        value(v, line, key).map(Some)
    }
}

fn show<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

impl RunConfig {
    /// Desk-scale defaults of a preset.
    pub fn preset(preset: Preset) -> Self {
        let (dt, fine, coarse, t_end) = preset.desk_settings();
        let defaults = SolverSettings::default();
        Self {
            preset,
            scheme: Scheme::StructurePreserving,
            xfem: true,
            dt,
            t_end,
            fine,
            coarse,
            vertices: preset.default_vertices(),
            picard_tol: 1e-8,
            picard_max: 50,
            solver: defaults.kind,
            solver_tol: defaults.tol,
            restart: defaults.restart,
            max_iter: defaults.max_iter,
            max_halvings: 3,
            max_steps: None,
            wall_clock: None,
            checkpoint_every: 0,
        }
    }

    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, v: &str, line: usize) -> Result<()> {
        match key {
            "preset" => self.preset = Preset::from_name(v).map_err(|e| perr(line, e.to_string()))?,
            "scheme" => self.scheme = Scheme::from_keyword(v).ok_or_else(|| perr(line, format!("unknown scheme '{v}'")))?,
            "xfem" => {
                self.xfem = match v {
                    "true" | "on" => true,
                    "false" | "off" => false,
                    _ => return Err(perr(line, format!("bad value '{v}' for xfem"))),
                }
            }
            "dt" => self.dt = value(v, line, key)?,
            "t_end" => self.t_end = value(v, line, key)?,
            "fine" => self.fine = value(v, line, key)?,
            "coarse" => self.coarse = value(v, line, key)?,
            "vertices" => self.vertices = value(v, line, key)?,
            "picard_tol" => self.picard_tol = value(v, line, key)?,
            "picard_max" => self.picard_max = value(v, line, key)?,
            "solver" => {
                self.solver = LinearSolver::from_keyword(v).ok_or_else(|| perr(line, format!("unknown solver '{v}'")))?
            }
            "solver_tol" => self.solver_tol = value(v, line, key)?,
            "restart" => self.restart = value(v, line, key)?,
            "max_iter" => self.max_iter = value(v, line, key)?,
            "max_halvings" => self.max_halvings = value(v, line, key)?,
            "max_steps" => self.max_steps = optional(v, line, key)?,
            "wall_clock" => self.wall_clock = optional(v, line, key)?,
            "checkpoint_every" => self.checkpoint_every = value(v, line, key)?,
            _ => return Err(perr(line, format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| perr(i + 1, "expected 'key = value'"))?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let (line, _, name) = pairs
            .iter()
            .find(|(_, k, _)| k == "preset")
            .ok_or_else(|| perr(0, "missing 'preset' key"))?;
        let mut cfg = Self::preset(Preset::from_name(name).map_err(|e| perr(*line, e.to_string()))?);
        for (line, k, v) in &pairs {
            cfg.set(k, v, *line)?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let v = match key {
                "preset" => self.preset.name().to_string(),
                "scheme" => self.scheme.keyword().to_string(),
                "xfem" => self.xfem.to_string(),
                "dt" => self.dt.to_string(),
                "t_end" => self.t_end.to_string(),
                "fine" => self.fine.to_string(),
                "coarse" => self.coarse.to_string(),
                "vertices" => self.vertices.to_string(),
                "picard_tol" => self.picard_tol.to_string(),
                "picard_max" => self.picard_max.to_string(),
                "solver" => self.solver.keyword().to_string(),
                "solver_tol" => self.solver_tol.to_string(),
                "restart" => self.restart.to_string(),
                "max_iter" => self.max_iter.to_string(),
                "max_halvings" => self.max_halvings.to_string(),
                "max_steps" => show(self.max_steps),
                "wall_clock" => show(self.wall_clock),
                _ => self.checkpoint_every.to_string(),
            };
            let _ = writeln!(s, "{key} = {v}");
        }
        s
    }

    /// Sets the time step and levels from `n adapt_{k,l}`.
    pub fn set_adapt(&mut self, n: u32, fine: u32, coarse: u32) -> Result<()> {
        if n == 0 {
            return Err(FlowError::Argument("adapt multiplier must be positive".into()));
        }
        AdaptLevels::new(fine, coarse)?;
        self.dt = 1e-3 / f64::from(n);
        self.fine = fine;
        self.coarse = coarse;
        Ok(())
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let diameter = self.preset.domain().diameter();
        let mut c = SchemeConfig::new(self.scheme, self.dt, self.t_end, AdaptLevels::new(self.fine, self.coarse)?, diameter);
        c.xfem = self.xfem;
        c.picard_tol = self.picard_tol * diameter;
        c.picard_max = self.picard_max;
        c.solver = SolverSettings { kind: self.solver, tol: self.solver_tol, restart: self.restart, max_iter: self.max_iter };
        c.max_halvings = self.max_halvings;
        c.max_steps = self.max_steps;
        c.wall_clock = self.wall_clock;
        Ok(c)
    }

    /// SHA-256 of the settings that determine the trajectory, in hex.
    /// Run-length limits and checkpoint spacing are excluded so that a run
    /// can be resumed with a different budget.
    pub fn trajectory_hash(&self) -> String {
        let mut c = self.clone();
        c.t_end = 0.0;
        c.max_steps = None;
        c.wall_clock = None;
        c.checkpoint_every = 0;
        let digest = Sha256::digest(c.to_text().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_round_trips() {
        for p in Preset::ALL {
            let cfg = RunConfig::preset(p);
            assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        }
    }

    #[test]
    fn overrides_and_comments() {
        let text = "# desk run\nscheme = linear\npreset = ex2_junction_migration\nxfem = off\nmax_steps = 7 # cap\nwall_clock = 2.5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.preset, Preset::Ex2JunctionMigration);
        assert_eq!(cfg.scheme, Scheme::Linear);
        assert!(!cfg.xfem);
        assert_eq!(cfg.max_steps, Some(7));
        assert_eq!(cfg.wall_clock, Some(2.5));
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = RunConfig::parse("preset = ex1_double_bubble\ndt = fast\n").unwrap_err();
        assert!(matches!(e, FlowError::Parse { line: 2, .. }), "{e}");
        assert!(matches!(RunConfig::parse("dt = 1\n"), Err(FlowError::Parse { .. })));
        assert!(matches!(RunConfig::parse("preset = ex1_double_bubble\nbogus = 1\n"), Err(FlowError::Parse { line: 2, .. })));
        assert!(matches!(RunConfig::parse("preset = nope\n"), Err(FlowError::Parse { line: 1, .. })));
    }

    #[test]
    fn adapt_notation() {
        let mut cfg = RunConfig::preset(Preset::Ex4GasLiquidDouble);
        cfg.set_adapt(2, 9, 4).unwrap();
        assert_eq!((cfg.dt, cfg.fine, cfg.coarse), (5e-4, 9, 4));
        assert!(cfg.set_adapt(1, 2, 4).is_err());
    }

    #[test]
    fn hash_ignores_run_length_only() {
        let a = RunConfig::preset(Preset::Ex1DoubleBubble);
        let mut b = a.clone();
        b.t_end = 9.0;
        b.max_steps = Some(3);
        assert_eq!(a.trajectory_hash(), b.trajectory_hash());
        assert_eq!(a.trajectory_hash().len(), 64);
        b.dt *= 2.0;
        assert_ne!(a.trajectory_hash(), b.trajectory_hash());
    }
}
