//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! The long runs are shared: the ex2 run to T=5 feeds the energy and
//! junction migration criteria, and the ex4 run to T=1 feeds the energy,
//! volume and rising bubble criteria.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use frontflow::diagnostics::StepRecord;
use frontflow::network::{CurveEnd, PolyCurve, Region};
use frontflow::stepper::{run, step, step_system, system_condition, PhaseParams, SimState};
use frontflow::{AdaptLevels, CurveNetwork, Domain, FlowError, Preset, RunConfig, Scenario, Vec2, WallKind};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn run_records(cfg: &RunConfig) -> Vec<StepRecord> {
    let sc = Scenario::from_config(cfg).expect("scenario");
    run(sc.initial_state().expect("initial state"), &sc.params, &sc.config, |_| Ok(())).expect("run").records
}

fn max_vdelta(recs: &[StepRecord], phases: &[usize]) -> f64 {
    recs.iter().flat_map(|r| phases.iter().map(move |&l| r.phases[l].vdelta.abs())).fold(0.0, f64::max)
}

/// Most negative `slack / |E|` over the steps up to time `t_max`.
fn worst_slack(recs: &[StepRecord], t_max: f64) -> f64 {
    recs.iter()
        .skip(1)
        .filter(|r| r.t <= t_max + 1e-9)
        .map(|r| r.energy_slack / r.energy.abs())
        .fold(f64::INFINITY, f64::min)
}

fn energy_nonincreasing(recs: &[StepRecord]) -> bool {
    recs.windows(2).all(|w| w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs())
}

fn ex1_config(steps: usize, xfem: bool) -> RunConfig {
    let mut cfg = RunConfig::preset(Preset::Ex1DoubleBubble);
    cfg.xfem = xfem;
    cfg.max_steps = Some(steps);
    cfg.t_end = cfg.dt * steps as f64;
    cfg
}

/// Discrete curvature of an arc polygon with equal chords inscribed in a
/// circle of radius `r`: `1 / (r cos(theta / 2))` for the subtended angle
/// `theta` of one chord.
fn arc_polygon_curvature(net: &CurveNetwork, curve: usize, r: f64) -> f64 {
    let (a, b) = net.curve(curve).segment(1);
    let theta = 2.0 * (a.dist(b) / (2.0 * r)).asin();
    1.0 / (r * (0.5 * theta).cos())
}

fn criteria_1_2(recs: &[StepRecord], net: &CurveNetwork, solver_tol: f64) -> (Verdict, Verdict) {
    let last = recs.last().unwrap();
    let umax = recs.iter().map(|r| r.u_max).fold(0.0, f64::max);
    let vd = max_vdelta(recs, &[0, 1, 2]);
    let c1 = verdict(umax <= 1e-8 && vd <= 1e-8, format!("{} steps, u_max {umax:.2e}, max |vdelta| {vd:.2e}", recs.len() - 1));

    let oracle = arc_polygon_curvature(net, 0, 0.3);
    let p = |l: usize| last.phases[l].pmean;
    let jumps = [p(1) - p(0), p(2) - p(0)];
    let rel = jumps.iter().map(|j| (j - oracle).abs() / oracle).fold(0.0, f64::max);
    let sym = (p(1) - p(2)).abs();
    let sym_tol = 10.0 * solver_tol * p(1).abs().max(1.0);
    let c2 = verdict(
        rel <= 0.02 && sym <= sym_tol,
        format!(
            "jumps {:.6} / {:.6} vs oracle {oracle:.6} (rel {rel:.2e}); bubble means differ by {sym:.2e} (limit {sym_tol:.1e})",
            jumps[0], jumps[1]
        ),
    );
    (c1, c2)
}

fn criterion_3(recs: &[StepRecord]) -> Verdict {
    let vd = recs.last().unwrap().phases[1..].iter().map(|p| p.vdelta.abs()).fold(0.0, f64::max);
    let mono = energy_nonincreasing(recs);
    verdict(vd > 1e-6 && mono, format!("after {} steps |vdelta| {vd:.2e}, energy nonincreasing: {mono}", recs.len() - 1))
}

fn criterion_6() -> Verdict {
    let d = common::volume_identity_sweep(2024, 1000);
    verdict(d <= 1e-12, format!("1000 displacements, largest defect {d:.2e}"))
}

/// Single straight segment across a box with free-slip side walls: both
/// boundary normals are parallel, so the normals do not span the plane.
fn spanless_line() -> CurveNetwork {
    let d = Domain::new(
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 1.0),
        [WallKind::FreeSlip, WallKind::FreeSlip, WallKind::NoSlip, WallKind::NoSlip],
    );
    CurveNetwork::new(
        d,
        vec![PolyCurve::open(vec![Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.5)])],
        vec![],
        vec![(0, CurveEnd::Start), (0, CurveEnd::End)],
        vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
    )
    .unwrap()
}

/// Closed curve with a spike whose two segments fold onto each other, so
/// the vertex normal vanishes.
fn spike() -> CurveNetwork {
    let pts = vec![
        Vec2::new(0.1, 0.1),
        Vec2::new(0.6, 0.1),
        Vec2::new(0.6, 0.4),
        Vec2::new(0.6, 0.1),
        Vec2::new(0.1, 0.9),
    ];
    CurveNetwork::new(
        common::unit_box(WallKind::NoSlip),
        vec![PolyCurve::closed(pts)],
        vec![],
        vec![],
        vec![Region::new(vec![(0, -1)]), Region::new(vec![(0, 1)])],
    )
    .unwrap()
}

fn criterion_7() -> Verdict {
    let mut cfg = RunConfig::preset(Preset::Ex1DoubleBubble);
    cfg.vertices = 32;
    cfg.fine = 2;
    cfg.coarse = 2;
    let sc = Scenario::from_config(&cfg).unwrap();
    let admissible = sc.net.check_assumptions().passed();
    let state = sc.initial_state().unwrap();
    let cond = step_system(&state, &sc.params, &sc.config).and_then(|s| system_condition(&s));
    let cond_ok = matches!(cond, Ok(k) if k.is_finite());

    let mut rejected = Vec::new();
    for (name, net) in [("straight line", spanless_line()), ("spike", spike())] {
        let report = matches!(net.check_assumptions().into_result(), Err(FlowError::AssumptionViolated(_)));
        let gamma = vec![1.0; net.num_curves()];
        let params = PhaseParams {
            rho: vec![1.0; net.num_regions()],
            eta: vec![1.0; net.num_regions()],
            gamma,
            gravity: Vec2::ZERO,
        };
        let mut scfg = sc.config.clone();
        scfg.adapt = AdaptLevels::new(3, 3).unwrap();
        let stepped = SimState::new(net, scfg.adapt, |_| Vec2::ZERO)
            .and_then(|st| step(&st, &params, &scfg, scfg.dt).map(|_| ()));
        let by_step = matches!(stepped, Err(FlowError::AssumptionViolated(_)));
        rejected.push((name, report && by_step));
    }
    let all_rejected = rejected.iter().all(|r| r.1);
    verdict(
        admissible && cond_ok && all_rejected,
        format!("assumptions pass: {admissible}; condition estimate {cond:?}; degenerate networks rejected: {rejected:?}"),
    )
}

fn criterion_8(recs: &[StepRecord]) -> Verdict {
    let x: Vec<f64> = recs.iter().map(|r| r.junctions[0].x).collect();
    let avg: Vec<f64> = x.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
    let increasing = avg.windows(2).all(|w| w[1] > w[0]);
    let mono = energy_nonincreasing(recs);
    verdict(
        increasing && mono,
        format!(
            "junction x {:.4} -> {:.4}, moving average strictly increasing: {increasing}; energy {:.6} -> {:.6}, nonincreasing: {mono}",
            x[0],
            x[x.len() - 1],
            recs[0].energy,
            recs.last().unwrap().energy
        ),
    )
}

const GAS: usize = 0;
const LIQUID: usize = 1;

fn criteria_5_9(recs: &[StepRecord], t_end: f64) -> (Verdict, Verdict) {
    let vd = max_vdelta(recs, &[0, 1, 2]);
    let c5 = verdict(vd <= 1e-8, format!("max |vdelta| {vd:.2e} over {} steps", recs.len() - 1));

    let quarter: Vec<&StepRecord> = recs.iter().skip(1).filter(|r| r.t <= 0.25 * t_end + 1e-9).collect();
    let faster = quarter.iter().all(|r| r.phases[GAS].vc > r.phases[LIQUID].vc);
    let (first, last) = (&recs[0], recs.last().unwrap());
    let rise = |l: usize| last.phases[l].yc - first.phases[l].yc;
    let vd2 = max_vdelta(recs, &[GAS, LIQUID]);
    let c9 = verdict(
        faster && rise(GAS) > 0.0 && rise(LIQUID) > 0.0 && vd2 <= 1e-8,
        format!(
            "gas V_c > liquid V_c over first quarter: {faster}; y_c gas {:.4} -> {:.4}, liquid {:.4} -> {:.4}; max |vdelta| {vd2:.2e}",
            first.phases[GAS].yc, last.phases[GAS].yc, first.phases[LIQUID].yc, last.phases[LIQUID].yc
        ),
    )
    .with_note(rise(LIQUID) <= 0.0, "the heavy liquid bubble is still being tipped downwards at T=1");
    (c5, c9)
}

impl Verdict {
    fn with_note(mut self, when: bool, note: &str) -> Self {
        if when {
            self.detail.push_str(&format!(" ({note})"));
        }
        self
    }
}

fn criterion_10() -> Verdict {
    let skew = (0..100).map(common::skew_defect).fold(0.0, f64::max);
    let quad = (0..20).map(common::quadratic_transfer_defect).fold(0.0, f64::max);
    let dens = (0..20).map(common::density_transfer_defect).fold(0.0, f64::max);
    verdict(
        skew <= 1e-12 && quad <= 1e-12 && dens <= 1e-12,
        format!("skew defect {skew:.2e} (100 fields); quadratic transfer {quad:.2e}; density integral {dens:.2e}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(u32, Verdict)> = Vec::new();
    let mut report = |n: u32, v: Verdict| {
        println!("criterion {n}: {} - {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        results.push((n, v));
    };

    let ex1_cfg = ex1_config(5, true);
    let ex1 = run_records(&ex1_cfg);
    let ex1_net = Scenario::from_config(&ex1_cfg).unwrap().net;
    let (c1, c2) = criteria_1_2(&ex1, &ex1_net, ex1_cfg.solver_tol);
    report(1, c1);
    report(2, c2);

    let ex1_off = run_records(&ex1_config(50, false));
    report(3, criterion_3(&ex1_off));

    let ex2_cfg = RunConfig::preset(Preset::Ex2JunctionMigration);
    let ex2 = run_records(&ex2_cfg);

    let mut ex4_cfg = RunConfig::preset(Preset::Ex4GasLiquidDouble);
    ex4_cfg.picard_tol = 1e-10;
    ex4_cfg.solver_tol = 1e-13;
    let ex4 = run_records(&ex4_cfg);

    let slacks = [
        ("ex1", worst_slack(&ex1, f64::INFINITY).min(worst_slack(&ex1_off, f64::INFINITY))),
        ("ex2 to T=2", worst_slack(&ex2, 2.0)),
        ("ex4 to T=0.5", worst_slack(&ex4, 0.5)),
    ];
    let ok = slacks.iter().all(|s| s.1 >= -1e-10);
    let detail: Vec<String> = slacks.iter().map(|(n, s)| format!("{n} {s:.2e}")).collect();
    report(4, verdict(ok, format!("smallest slack / |E|: {}", detail.join(", "))));

    let (c5, c9) = criteria_5_9(&ex4, ex4_cfg.t_end);
    report(5, c5);
    report(6, criterion_6());
    report(7, criterion_7());
    report(8, criterion_8(&ex2));
    report(9, c9);
    report(10, criterion_10());

    let failed: Vec<u32> = results.iter().filter(|r| !r.1.passed).map(|r| r.0).collect();
    println!("acceptance finished in {:.0} s; failed: {failed:?}", start.elapsed().as_secs_f64());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
