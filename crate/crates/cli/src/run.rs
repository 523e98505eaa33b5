//! Runs scenarios and renders their CSV outputs.
//!
//! Trajectory CSV columns: `t`, the eight independent real entries of the
//! X state (`rho11..rho44`, `re14`, `im14`, `re23`, `im23`), the absolute
//! correlation functions `tau1..tau3`, `tdd`, `concurrence`, and `physical`
//! (1 when the minimum eigenvalue is at least `-1e-9`). Sweep CSVs are long
//! format: one column per axis, then `t`, `tdd`, `concurrence`, `physical`,
//! row-major by axes then time. Numbers use `{:.16e}`, 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tdd_core::analysis::{
    analytic_change_points, analytic_transition_time, classify_regime, detect_events, EventReport, Regime,
    MIN_SAMPLES,
};
use tdd_core::correlations::tdd_x;
use tdd_core::dynamics::{sample_trajectory_unchecked, Trajectory};
use tdd_core::oracle::{tdd_bruteforce, MinimizeOptions, OracleError};
use tdd_core::states::{random_x_state, XState, EVOLVED_STATE_TOL};

use crate::error::{CliError, ConfigError};
use crate::presets::preset;
use crate::scenario::{ModelSpec, Overrides, Scenario, StateSpec};

/// Oracle gaps at or below this count as agreement.
pub const ORACLE_GAP_TOL: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub files: Vec<Artifact>,
    /// Non-physical rows whose trajectory started from a physical state.
    pub violations: usize,
    /// Non-physical rows of trajectories started from a formal state.
    pub formal_rows: usize,
}

impl RunOutput {
    fn merge(&mut self, other: RunOutput) {
        self.files.extend(other.files);
        self.violations += other.violations;
        self.formal_rows += other.formal_rows;
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
        for f in &self.files {
            let path = dir.join(&f.name);
            fs::write(&path, &f.contents).map_err(|source| CliError::Io { path, source })?;
        }
        Ok(())
    }

    /// The error to report after the files are written, if any.
    pub fn physicality_error(&self) -> Option<CliError> {
        (self.violations > 0).then(|| {
            CliError::Numerical(format!(
                "{} sampled states left the physical region (minimum eigenvalue below -{EVOLVED_STATE_TOL:e}); rows flagged with physical = 0",
                self.violations
            ))
        })
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn is_physical(s: &XState) -> bool {
    s.min_eigenvalue() >= -EVOLVED_STATE_TOL
}

/// Trajectory from `s0`, plus counts of non-physical samples.
struct Slice {
    trajectory: Trajectory,
    physical_start: bool,
    nonphysical: usize,
    events: Option<EventReport>,
}

fn simulate(scenario: &Scenario, state: &StateSpec, model: &ModelSpec) -> Result<Slice, CliError> {
    let s0 = state.build()?;
    let m = model.build()?;
    let trajectory = sample_trajectory_unchecked(&s0, &m, scenario.t_max, scenario.samples)
        .map_err(|e| ConfigError::scenario("grid", e))?;
    let nonphysical = trajectory.states().iter().filter(|s| !is_physical(s)).count();
    let events = if scenario.outputs.events {
        let series = trajectory.series();
        Some(
            detect_events(&series.times, &series.tdd, &scenario.events)
                .map_err(|e| CliError::Numerical(format!("event detection: {e}")))?,
        )
    } else {
        None
    };
    Ok(Slice { trajectory, physical_start: is_physical(&s0), nonphysical, events })
}

fn check_event_samples(scenario: &Scenario) -> Result<(), ConfigError> {
    if scenario.outputs.events && scenario.samples < MIN_SAMPLES {
        return Err(ConfigError::scenario(
            "grid.samples",
            format!("event detection needs at least {MIN_SAMPLES} samples; set output.events = false for shorter grids"),
        ));
    }
    Ok(())
}

fn event_rows(out: &mut String, prefix: &str, report: &EventReport) {
    for &t in &report.kink_times {
        let _ = writeln!(out, "{prefix}kink,{},{},", num(t), num(t));
    }
    for p in &report.plateaus {
        let _ = writeln!(out, "{prefix}plateau,{},{},{}", num(p.start), num(p.end), num(p.level));
    }
}

fn tally(out: &mut RunOutput, slice: &Slice) {
    if slice.physical_start {
        out.violations += slice.nonphysical;
    } else {
        out.formal_rows += slice.nonphysical;
    }
}

pub fn run_evolve(scenario: &Scenario, stem: &str) -> Result<RunOutput, CliError> {
    if !scenario.sweep.is_empty() {
        return Err(ConfigError::scenario("sweep", "evolve takes no sweep axes; use the sweep subcommand").into());
    }
    check_event_samples(scenario)?;
    let slice = simulate(scenario, &scenario.state, &scenario.model)?;
    let o = scenario.outputs;

    let mut csv = String::from("t,rho11,rho22,rho33,rho44,re14,im14,re23,im23");
    if o.taus {
        csv += ",tau1,tau2,tau3";
    }
    if o.tdd {
        csv += ",tdd";
    }
    if o.concurrence {
        csv += ",concurrence";
    }
    csv += ",physical\n";
    let series = slice.trajectory.series();
    for (i, s) in slice.trajectory.states().iter().enumerate() {
        let [r11, r22, r33, r44] = s.diagonals();
        let (r14, r23) = (s.rho14(), s.rho23());
        csv += &[series.times[i], r11, r22, r33, r44, r14.re, r14.im, r23.re, r23.im].map(num).join(",");
        if o.taus {
            for tau in series.tau_abs[i] {
                csv += ",";
                csv += &num(tau);
            }
        }
        if o.tdd {
            csv += ",";
            csv += &num(series.tdd[i]);
        }
        if o.concurrence {
            csv += ",";
            csv += &num(series.concurrence[i]);
        }
        csv += if is_physical(s) { ",1\n" } else { ",0\n" };
    }

    let mut out = RunOutput::default();
    tally(&mut out, &slice);
    out.files.push(Artifact { name: format!("{stem}.csv"), contents: csv });
    if let Some(report) = &slice.events {
        let mut events = String::from("kind,t_start,t_end,level\n");
        event_rows(&mut events, "", report);
        out.files.push(Artifact { name: format!("{stem}_events.csv"), contents: events });
    }
    Ok(out)
}

pub fn run_sweep(scenario: &Scenario, stem: &str) -> Result<RunOutput, CliError> {
    if scenario.sweep.is_empty() {
        return Err(ConfigError::scenario("sweep", "sweep needs axis1 (and optionally axis2)").into());
    }
    check_event_samples(scenario)?;
    let axes = &scenario.sweep;
    let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let points: Vec<Vec<f64>> = match values.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
        _ => unreachable!("at most two axes"),
    };

    let slices: Vec<Result<Slice, CliError>> = points
        .par_iter()
        .map(|point| {
            let (state, model) = scenario.at(point);
            simulate(scenario, &state, &model)
        })
        .collect();

    let o = scenario.outputs;
    let axis_header: Vec<&str> = axes.iter().map(|a| a.axis.name()).collect();
    let mut csv = axis_header.join(",") + ",t";
    if o.tdd {
        csv += ",tdd";
    }
    if o.concurrence {
        csv += ",concurrence";
    }
    csv += ",physical\n";
    let mut events = axis_header.join(",") + ",kind,t_start,t_end,level\n";

    let mut out = RunOutput::default();
    for (point, slice) in points.iter().zip(slices) {
        let slice = slice?;
        tally(&mut out, &slice);
        let prefix: String = point.iter().map(|&v| num(v) + ",").collect();
        let series = slice.trajectory.series();
        for (i, s) in slice.trajectory.states().iter().enumerate() {
            csv += &prefix;
            csv += &num(series.times[i]);
            if o.tdd {
                csv += ",";
                csv += &num(series.tdd[i]);
            }
            if o.concurrence {
                csv += ",";
                csv += &num(series.concurrence[i]);
            }
            csv += if is_physical(s) { ",1\n" } else { ",0\n" };
        }
        if let Some(report) = &slice.events {
            event_rows(&mut events, &prefix, report);
        }
    }
    out.files.push(Artifact { name: format!("{stem}.csv"), contents: csv });
    if o.events {
        out.files.push(Artifact { name: format!("{stem}_events.csv"), contents: events });
    }
    Ok(out)
}

/// Runs a scenario with or without sweep axes.
pub fn run_scenario(scenario: &Scenario, stem: &str) -> Result<RunOutput, CliError> {
    if scenario.sweep.is_empty() {
        run_evolve(scenario, stem)
    } else {
        run_sweep(scenario, stem)
    }
}

pub fn run_figure(id: &str, overrides: &Overrides) -> Result<RunOutput, CliError> {
    let p = preset(id)?;
    let scenario = p.scenario(overrides)?;
    let mut out = run_scenario(&scenario, p.id)?;
    out.files.push(Artifact { name: format!("{}_provenance.txt", p.id), contents: p.provenance(&scenario) });
    Ok(out)
}

pub fn run_figures(ids: &[&str], overrides: &Overrides) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    for id in ids {
        out.merge(run_figure(id, overrides)?);
    }
    Ok(out)
}

/// Closed form against the brute-force search. States are `count` seeded
/// random X states, or the single given state.
pub fn run_oracle(
    count: usize,
    seed: u64,
    opts: &MinimizeOptions,
    state: Option<XState>,
) -> Result<RunOutput, CliError> {
    if count == 0 {
        return Err(ConfigError::scenario("count", "at least one state").into());
    }
    let states: Vec<XState> = match state {
        Some(s) => vec![s],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| random_x_state(&mut rng)).collect()
        }
    };
    let opts = MinimizeOptions { seed, ..*opts };
    let results: Vec<Result<_, OracleError>> =
        states.par_iter().map(|s| tdd_bruteforce(&s.to_matrix(), &opts).map(|r| (tdd_x(s), r))).collect();

    let mut csv = String::from("id,closed_form,oracle,gap,within_tol,restarts,seed\n");
    let (mut max_gap, mut within, mut restarts) = (f64::NEG_INFINITY, 0usize, 0usize);
    for (id, r) in results.into_iter().enumerate() {
        let (closed, r) = r.map_err(|e| match e {
            OracleError::NotPhysical(report) => ConfigError::scenario("state", report).into(),
            OracleError::Options { .. } => CliError::from(ConfigError::scenario("oracle options", e)),
            other => CliError::Numerical(other.to_string()),
        })?;
        let gap = r.value - closed;
        let ok = (-1e-6..=ORACLE_GAP_TOL).contains(&gap);
        max_gap = max_gap.max(gap);
        within += ok as usize;
        restarts += r.restarts;
        let _ = writeln!(csv, "{id},{},{},{},{},{},{}", num(closed), num(r.value), num(gap), ok as u8, r.restarts, r.seed);
    }
    let fraction = within as f64 / states.len() as f64;
    let _ = writeln!(csv, "summary,,,{},{},{restarts},{seed}", num(max_gap), num(fraction));
    Ok(RunOutput { files: vec![Artifact { name: "oracle.csv".into(), contents: csv }], ..Default::default() })
}

/// Regime of an MMM triple and its closed-form event times for `g = 0`.
pub fn classify_report(c1: f64, c2: f64, c3: f64, t_s: f64) -> Result<String, CliError> {
    for (name, c) in [("c1", c1), ("c2", c2), ("c3", c3)] {
        if !(c.is_finite() && c.abs() <= 1.0) {
            return Err(ConfigError::invalid("classify", name, &c.to_string(), "a value in [-1, 1]").into());
        }
    }
    let bad_t_s = |e| ConfigError::scenario("t_s", e);
    let regime = classify_regime(c1, c2, c3);
    let mut out = format!("regime: {}\n", regime.name());
    match regime {
        Regime::SmoothDecay => {}
        Regime::SuddenTransition => {
            let t = analytic_transition_time(c1, c2, c3, t_s).map_err(bad_t_s)?;
            let _ = writeln!(out, "plateau level: {}\ntransition time: {t}", c3.abs());
        }
        Regime::DoubleSuddenChanges if c3 == 0.0 => {
            out += "plateau level: 0\n";
        }
        Regime::DoubleSuddenChanges => {
            let (t1, t2) = analytic_change_points(c1, c2, c3, t_s).map_err(bad_t_s)?;
            let _ = writeln!(out, "plateau level: {}\nchange points: {t1} {t2}", c3.abs());
        }
    }
    Ok(out)
}
