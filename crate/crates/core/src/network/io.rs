//! Plain-text network format.
//!
//! ```text
//! domain <xmin> <ymin> <xmax> <ymax> <left> <right> <bottom> <top>
//! curve <id> [closed]
//! <x> <y>
//! ...
//! junction <k> <s1> <p1> <s2> <p2> <s3> <p3> <o1> <o2> <o3>
//! bpoint <k> <s> <p>
//! region <l> : <+-i> <+-j> ...
//! ```
//!
//! Ids are 1-based, `p` is 1 for the first vertex and 2 for the last, wall
//! kinds are `noslip` or `freeslip`. Floats are written in shortest
//! round-trip form.

use std::fmt::Write as _;

use super::{CurveEnd, CurveNetwork, JunctionMember, PolyCurve, Region, TripleJunction};
use crate::error::{FlowError, Result};
use crate::geom::{Domain, Vec2, Wall, WallKind};

fn perr(line: usize, msg: impl Into<String>) -> FlowError {
    FlowError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

impl CurveNetwork {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        let _ = write!(s, "domain {} {} {} {}", d.min.x, d.min.y, d.max.x, d.max.y);
        for w in Wall::ALL {
            let _ = write!(s, " {}", d.kind(w).keyword());
        }
        s.push('\n');
        for (i, c) in self.curves.iter().enumerate() {
            let _ = writeln!(s, "curve {}{}", i + 1, if c.is_closed() { " closed" } else { "" });
            for v in c.vertices() {
                let _ = writeln!(s, "{} {}", v.x, v.y);
            }
        }
        for (k, jn) in self.junctions.iter().enumerate() {
            let _ = write!(s, "junction {}", k + 1);
            for m in &jn.members {
                let _ = write!(s, " {} {}", m.curve + 1, m.end.code());
            }
            for o in &jn.orientation {
                let _ = write!(s, " {o}");
            }
            s.push('\n');
        }
        for (k, bp) in self.boundary_points.iter().enumerate() {
            let _ = writeln!(s, "bpoint {} {} {}", k + 1, bp.curve + 1, bp.end.code());
        }
        for (l, r) in self.regions.iter().enumerate() {
            let _ = write!(s, "region {} :", l + 1);
            for &(c, o) in &r.curves {
                let _ = write!(s, " {}{}", if o > 0 { "+" } else { "-" }, c + 1);
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut domain: Option<Domain> = None;
        let mut curves: Vec<(usize, PolyCurve)> = Vec::new();
        let mut junctions: Vec<(usize, TripleJunction)> = Vec::new();
        let mut bpoints: Vec<(usize, (usize, CurveEnd))> = Vec::new();
        let mut regions: Vec<(usize, Region)> = Vec::new();

        let end_of = |code: usize, line: usize| {
            CurveEnd::from_code(code).ok_or_else(|| perr(line, "curve end must be 1 or 2"))
        };
        let index = |id: usize, line: usize| {
            id.checked_sub(1).ok_or_else(|| perr(line, "ids are 1-based"))
        };

        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut tok = body.split_whitespace();
            let head = tok.next().unwrap_or("");
            match head {
                "domain" => {
                    let x0: f64 = num(tok.next(), line, "xmin")?;
                    let y0: f64 = num(tok.next(), line, "ymin")?;
                    let x1: f64 = num(tok.next(), line, "xmax")?;
                    let y1: f64 = num(tok.next(), line, "ymax")?;
                    let mut walls = [WallKind::NoSlip; 4];
                    for w in walls.iter_mut() {
                        let k = tok.next().ok_or_else(|| perr(line, "missing wall kind"))?;
                        *w = WallKind::from_keyword(k)
                            .ok_or_else(|| perr(line, format!("unknown wall kind {k}")))?;
                    }
                    domain = Some(Domain::new(Vec2::new(x0, y0), Vec2::new(x1, y1), walls));
                }
                "curve" => {
                    let id: usize = num(tok.next(), line, "curve id")?;
                    let closed = match tok.next() {
                        None => false,
                        Some("closed") => true,
                        Some(t) => return Err(perr(line, format!("unexpected token {t}"))),
                    };
                    curves.push((index(id, line)?, PolyCurve { vertices: Vec::new(), closed }));
                }
                "junction" => {
                    let k: usize = num(tok.next(), line, "junction id")?;
                    let mut members = [JunctionMember { curve: 0, end: CurveEnd::Start }; 3];
                    for m in members.iter_mut() {
                        let s: usize = num(tok.next(), line, "curve id")?;
                        let p: usize = num(tok.next(), line, "curve end")?;
                        *m = JunctionMember { curve: index(s, line)?, end: end_of(p, line)? };
                    }
                    let mut orientation = [0i8; 3];
                    for o in orientation.iter_mut() {
                        *o = num(tok.next(), line, "orientation")?;
                    }
                    junctions.push((index(k, line)?, TripleJunction { members, orientation }));
                }
                "bpoint" => {
                    let k: usize = num(tok.next(), line, "boundary point id")?;
                    let s: usize = num(tok.next(), line, "curve id")?;
                    let p: usize = num(tok.next(), line, "curve end")?;
                    bpoints.push((index(k, line)?, (index(s, line)?, end_of(p, line)?)));
                }
                "region" => {
                    let l: usize = num(tok.next(), line, "region id")?;
                    if tok.next() != Some(":") {
                        return Err(perr(line, "expected ':' after region id"));
                    }
                    let mut rc = Vec::new();
                    for t in tok {
                        let v: i64 = t.parse().map_err(|_| perr(line, format!("bad curve ref {t}")))?;
                        if v == 0 {
                            return Err(perr(line, "curve ref 0"));
                        }
                        rc.push(((v.unsigned_abs() - 1) as usize, if v > 0 { 1 } else { -1 }));
                    }
                    regions.push((index(l, line)?, Region::new(rc)));
                }
                _ => {
                    let x: f64 = head.parse().map_err(|_| perr(line, format!("unknown keyword {head}")))?;
                    let y: f64 = num(tok.next(), line, "y coordinate")?;
                    let c = curves
                        .last_mut()
                        .ok_or_else(|| perr(line, "vertex before any curve block"))?;
                    c.1.vertices.push(Vec2::new(x, y));
                }
            }
        }
        fn ordered<T>(mut v: Vec<(usize, T)>, what: &str) -> Result<Vec<T>> {
            v.sort_by_key(|e| e.0);
            for (k, e) in v.iter().enumerate() {
                if e.0 != k {
                    return Err(FlowError::Parse { line: 0, msg: format!("{what} ids are not 1..n") });
                }
            }
            Ok(v.into_iter().map(|e| e.1).collect())
        }
        let domain = domain.ok_or_else(|| perr(0, "missing domain line"))?;
        CurveNetwork::new(
            domain,
            ordered(curves, "curve")?,
            ordered(junctions, "junction")?,
            ordered(bpoints, "bpoint")?,
            ordered(regions, "region")?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        for net in [t_junction(), bubble(0.3, 17), flat_line(7)] {
            let text = net.to_text();
            let back = CurveNetwork::from_text(&text).unwrap();
            assert_eq!(back.positions(), net.positions());
            assert_eq!(back.junctions(), net.junctions());
            assert_eq!(back.regions(), net.regions());
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = CurveNetwork::from_text("domain 0 0 1 1 noslip noslip noslip noslip\ncurve 1\n0 x\n");
        assert!(matches!(err, Err(FlowError::Parse { line: 3, .. })));
        let err = CurveNetwork::from_text("curve 1\n");
        assert!(matches!(err, Err(FlowError::Parse { .. })));
    }
}
