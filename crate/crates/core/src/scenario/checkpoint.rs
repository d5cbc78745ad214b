//! Plain-text restart files.
//!
//! ```text
//! checkpoint 1
//! hash <trajectory hash of the run configuration>
//! step <m>
//! t <t_m>
//! mesh <hex refinement code>
//! volumes <v_0> <v_1> ...
//! velocity <count>
//! <values, one per line>
//! density <count | none>
//! <values>
//! network
//! <network text>
//! ```

use std::fmt::Write as _;

use crate::error::{FlowError, Result};
use crate::mesh::BulkMesh;
use crate::network::CurveNetwork;
use crate::stepper::SimState;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub hash: String,
    pub step: usize,
    pub t: f64,
    pub mesh_code: Vec<u8>,
    pub volumes: Vec<f64>,
    pub velocity: Vec<f64>,
    pub density: Option<Vec<f64>>,
    pub network: String,
}

fn perr(line: usize, msg: impl Into<String>) -> FlowError {
    FlowError::Parse { line, msg: msg.into() }
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self.it.next().ok_or_else(|| perr(self.last + 1, "unexpected end of checkpoint"))?;
        self.last = i + 1;
        Ok(l)
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ if l == key => Ok(""),
            _ => Err(perr(self.last, format!("expected '{key}'"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, v: &str, what: &str) -> Result<T> {
        v.parse().map_err(|_| perr(self.last, format!("bad {what}")))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.next().and_then(|l| self.parse(l.trim(), "value"))).collect()
    }
}

impl Checkpoint {
    pub fn capture(state: &SimState, hash: &str) -> Self {
        Self {
            hash: hash.to_string(),
            step: state.step,
            t: state.t,
            mesh_code: state.mesh.refinement_code(),
            volumes: state.initial_volumes.clone(),
            velocity: state.u.clone(),
            density: state.rho_prev.clone(),
            network: state.net.to_text(),
        }
    }

    /// Rebuilds the state; `hash` must match the one the checkpoint was taken with.
    pub fn restore(&self, hash: &str) -> Result<SimState> {
        if self.hash != hash {
            return Err(FlowError::Argument(
                "checkpoint was written with a different run configuration".into(),
            ));
        }
        let net = CurveNetwork::from_text(&self.network)?;
        let mesh = BulkMesh::from_refinement_code(net.domain(), &self.mesh_code)?;
        let num_raw = 2 * (mesh.num_vertices() + mesh.edges().len());
        if self.velocity.len() != num_raw {
            return Err(FlowError::Argument(format!(
                "checkpoint velocity has {} values, mesh needs {num_raw}",
                self.velocity.len()
            )));
        }
        if self.density.as_ref().is_some_and(|d| d.len() != mesh.num_elements()) {
            return Err(FlowError::Argument("checkpoint density does not match its mesh".into()));
        }
        if self.volumes.len() != net.num_regions() {
            return Err(FlowError::Argument("checkpoint volumes do not match the network".into()));
        }
        Ok(SimState {
            step: self.step,
            t: self.t,
            net,
            mesh,
            u: self.velocity.clone(),
            rho_prev: self.density.clone(),
            pressure: None,
            initial_volumes: self.volumes.clone(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("checkpoint 1\n");
        let _ = writeln!(s, "hash {}", self.hash);
        let _ = writeln!(s, "step {}", self.step);
        let _ = writeln!(s, "t {}", self.t);
        let code: String = self.mesh_code.iter().map(|b| format!("{b:02x}")).collect();
        let _ = writeln!(s, "mesh {code}");
        let vols: Vec<String> = self.volumes.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "volumes {}", vols.join(" "));
        let _ = writeln!(s, "velocity {}", self.velocity.len());
        for v in &self.velocity {
            let _ = writeln!(s, "{v}");
        }
        match &self.density {
            Some(d) => {
                let _ = writeln!(s, "density {}", d.len());
                for v in d {
                    let _ = writeln!(s, "{v}");
                }
            }
            None => s.push_str("density none\n"),
        }
        s.push_str("network\n");
        s.push_str(&self.network);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut ls = Lines { it: text.lines().enumerate(), last: 0 };
        if ls.field("checkpoint")? != "1" {
            return Err(perr(1, "unsupported checkpoint version"));
        }
        let hash = ls.field("hash")?.to_string();
        let step = { let v = ls.field("step")?; ls.parse(v, "step")? };
        let t = { let v = ls.field("t")?; ls.parse(v, "time")? };
        let hex = ls.field("mesh")?;
        if hex.len() % 2 != 0 {
            return Err(perr(ls.last, "odd-length mesh code"));
        }
        let mesh_code = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|_| perr(ls.last, "bad mesh code")))
            .collect::<Result<Vec<u8>>>()?;
        let vols = ls.field("volumes")?;
        let volumes = vols.split_whitespace().map(|v| ls.parse(v, "volume")).collect::<Result<Vec<f64>>>()?;
        let n = { let v = ls.field("velocity")?; ls.parse(v, "velocity count")? };
        let velocity = ls.floats(n)?;
        let density = match ls.field("density")? {
            "none" => None,
            v => {
                let n = ls.parse(v, "density count")?;
                Some(ls.floats(n)?)
            }
        };
        ls.field("network")?;
        let network: String = ls.it.map(|(_, l)| format!("{l}\n")).collect();
        Ok(Self { hash, step, t, mesh_code, volumes, velocity, density, network })
    }
}
