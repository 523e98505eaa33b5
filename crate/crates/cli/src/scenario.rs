//! Scenario description: initial state, decoherence model, time grid,
//! optional sweep axes and requested outputs.

use std::f64::consts::PI;
use std::fmt;

use tdd_core::analysis::{EventOptions, DEFAULT_KINK_TOL, EVOLVED_LEVEL_TOL};
use tdd_core::dynamics::{Decoherence, DephasingModel, FactorModel};
use tdd_core::states::{ewl_state, mmm_state_formal, BellKind, EwlParams, MmmParams, XState};
use tdd_core::Complex;

use crate::config::{parse_number, Ini};
use crate::error::ConfigError;

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_AXIS_POINTS: usize = 101;

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    (
        "state",
        &[
            "family", "c1", "c2", "c3", "kind", "r", "theta", "phi", "rho11", "rho22", "rho33", "rho44", "re14",
            "im14", "re23", "im23",
        ],
    ),
    ("model", &["kind", "omega0", "g", "t_s", "t_r", "d1_rate", "d2_rate"]),
    ("grid", &["t_max", "samples"]),
    ("sweep", &["axis1", "axis2"]),
    ("output", &["tdd", "concurrence", "taus", "events", "level_tol", "kink_tol"]),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Mmm { c1: f64, c2: f64, c3: f64 },
    Ewl { kind: BellKind, r: f64, theta: f64, phi: f64 },
    X { diag: [f64; 4], rho14: Complex, rho23: Complex },
}

impl StateSpec {
    /// The initial state. MMM and explicit X states are built without the
    /// positivity check so published parameter sets outside the physical
    /// region still run; rows are flagged instead.
    pub fn build(&self) -> Result<XState, ConfigError> {
        match *self {
            StateSpec::Mmm { c1, c2, c3 } => MmmParams::initial(c1, c2, c3)
                .and_then(|p| mmm_state_formal(&p))
                .map_err(|e| ConfigError::scenario("state", e)),
            StateSpec::Ewl { kind, r, theta, phi } => EwlParams::new(kind, r, theta, phi)
                .map(|p| ewl_state(&p))
                .map_err(|e| ConfigError::scenario("state", e)),
            StateSpec::X { diag, rho14, rho23 } => {
                XState::formal(diag, rho14, rho23).map_err(|e| ConfigError::scenario("state", e))
            }
        }
    }

    fn family(&self) -> &'static str {
        match self {
            StateSpec::Mmm { .. } => "mmm",
            StateSpec::Ewl { .. } => "ewl",
            StateSpec::X { .. } => "x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Dephasing { omega0: f64, g: f64, t_s: f64, t_r: f64 },
    /// `d1(t) = e^{-d1_rate t}`, `d2(t) = e^{-d2_rate t}`.
    Factors { d1_rate: f64, d2_rate: f64 },
}

/// A concrete decoherence model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Dephasing(DephasingModel),
    Factors(FactorModel),
}

impl Decoherence for Model {
    fn propagate(&self, s0: &XState, t: f64) -> XState {
        match self {
            Model::Dephasing(m) => m.propagate(s0, t),
            Model::Factors(m) => m.propagate(s0, t),
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model, ConfigError> {
        match *self {
            ModelSpec::Dephasing { omega0, g, t_s, t_r } => DephasingModel::new(omega0, g, t_s, t_r)
                .map(Model::Dephasing)
                .map_err(|e| ConfigError::scenario("model", e)),
            ModelSpec::Factors { d1_rate, d2_rate } => FactorModel::new(d1_rate, d2_rate)
                .map(Model::Factors)
                .map_err(|e| ConfigError::scenario("model", e)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    C3,
    G,
    R,
    Theta,
    Phi,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::C3, Axis::G, Axis::R, Axis::Theta, Axis::Phi];

    pub fn name(self) -> &'static str {
        match self {
            Axis::C3 => "c3",
            Axis::G => "g",
            Axis::R => "r",
            Axis::Theta => "theta",
            Axis::Phi => "phi",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub axis: Axis,
    pub start: f64,
    pub end: f64,
    pub count: usize,
    /// Excludes `end`: points are `start + (end - start) k / count`.
    pub half_open: bool,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let span = self.end - self.start;
        if self.half_open {
            (0..n).map(|k| self.start + span * k as f64 / n as f64).collect()
        } else {
            (0..n)
                .map(|k| if k == n - 1 { self.end } else { self.start + span * k as f64 / (n - 1) as f64 })
                .collect()
        }
    }

    pub fn parse(key: &str, text: &str) -> Result<Self, ConfigError> {
        let bad = |what: &str| ConfigError::invalid("sweep", key, text, what);
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if !(3..=5).contains(&tokens.len()) {
            return Err(bad("\"<axis> <start> <end> [count] [open|closed]\""));
        }
        let axis = Axis::parse(tokens[0]).ok_or_else(|| bad("axis one of c3, g, r, theta, phi"))?;
        let start = parse_number(tokens[1]).ok_or_else(|| bad("a numeric start"))?;
        let end = parse_number(tokens[2]).ok_or_else(|| bad("a numeric end"))?;
        let mut count = DEFAULT_AXIS_POINTS;
        let mut half_open = false;
        for tok in &tokens[3..] {
            match *tok {
                "open" => half_open = true,
                "closed" => half_open = false,
                t => count = t.parse().map_err(|_| bad("an integer count or open/closed"))?,
            }
        }
        if count < 2 {
            return Err(bad("at least 2 points"));
        }
        if start == end {
            return Err(bad("distinct endpoints"));
        }
        Ok(Self { axis, start, end, count, half_open })
    }

    fn config_line(self) -> String {
        format!(
            "{} {} {} {} {}",
            self.axis,
            self.start,
            self.end,
            self.count,
            if self.half_open { "open" } else { "closed" }
        )
    }
}

/// Column groups to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub tdd: bool,
    pub concurrence: bool,
    pub taus: bool,
    pub events: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { tdd: true, concurrence: true, taus: true, events: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub state: StateSpec,
    pub model: ModelSpec,
    pub t_max: f64,
    pub samples: usize,
    pub sweep: Vec<SweepAxis>,
    pub outputs: Outputs,
    pub events: EventOptions,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub level_tol: Option<f64>,
    pub kink_tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, ini: &mut Ini) {
        if let Some(v) = self.t_max {
            ini.set("grid", "t_max", format!("{v:e}"));
        }
        if let Some(v) = self.samples {
            ini.set("grid", "samples", v.to_string());
        }
        if let Some(v) = self.level_tol {
            ini.set("output", "level_tol", format!("{v:e}"));
        }
        if let Some(v) = self.kink_tol {
            ini.set("output", "kink_tol", format!("{v:e}"));
        }
    }
}

fn check_keys(ini: &Ini) -> Result<(), ConfigError> {
    for section in ini.sections() {
        let allowed = KNOWN_KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, k)| *k)
            .ok_or_else(|| ConfigError::scenario(section, "unknown section"))?;
        for key in ini.keys(section) {
            if !allowed.contains(&key) {
                return Err(ConfigError::scenario(&format!("{section}.{key}"), "unknown key"));
            }
        }
    }
    Ok(())
}

/// The `[state]` section alone.
pub fn state_from_ini(ini: &Ini) -> Result<StateSpec, ConfigError> {
    let family = ini
        .get("state", "family")
        .ok_or_else(|| ConfigError::Missing { section: "state".into(), key: "family".into() })?;
    let n = |key| ini.require_number("state", key);
    match family {
        "mmm" => Ok(StateSpec::Mmm { c1: n("c1")?, c2: n("c2")?, c3: n("c3")? }),
        "ewl" => {
            let kind = match ini.get("state", "kind").unwrap_or("psi") {
                "psi" => BellKind::Psi,
                "phi" => BellKind::Phi,
                other => return Err(ConfigError::invalid("state", "kind", other, "psi or phi")),
            };
            Ok(StateSpec::Ewl { kind, r: n("r")?, theta: n("theta")?, phi: ini.number_or("state", "phi", 0.0)? })
        }
        "x" => Ok(StateSpec::X {
            diag: [n("rho11")?, n("rho22")?, n("rho33")?, n("rho44")?],
            rho14: Complex::new(ini.number_or("state", "re14", 0.0)?, ini.number_or("state", "im14", 0.0)?),
            rho23: Complex::new(ini.number_or("state", "re23", 0.0)?, ini.number_or("state", "im23", 0.0)?),
        }),
        other => Err(ConfigError::invalid("state", "family", other, "mmm, ewl or x")),
    }
}

fn model_from_ini(ini: &Ini) -> Result<ModelSpec, ConfigError> {
    match ini.get("model", "kind").unwrap_or("dephasing") {
        "dephasing" => Ok(ModelSpec::Dephasing {
            omega0: ini.number_or("model", "omega0", 1.0)?,
            g: ini.number_or("model", "g", 0.0)?,
            t_s: ini.number_or("model", "t_s", 2.0)?,
            t_r: ini.number_or("model", "t_r", 1.0)?,
        }),
        "factors" => Ok(ModelSpec::Factors {
            d1_rate: ini.require_number("model", "d1_rate")?,
            d2_rate: ini.require_number("model", "d2_rate")?,
        }),
        other => Err(ConfigError::invalid("model", "kind", other, "dephasing or factors")),
    }
}

impl Scenario {
    pub fn from_ini(ini: &Ini) -> Result<Self, ConfigError> {
        check_keys(ini)?;
        let state = state_from_ini(ini)?;
        let model = model_from_ini(ini)?;
        let t_max = ini.require_number("grid", "t_max")?;
        if !(t_max > 0.0) {
            return Err(ConfigError::invalid("grid", "t_max", &t_max.to_string(), "a positive duration"));
        }
        let samples = ini.count("grid", "samples")?.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(ConfigError::invalid("grid", "samples", &samples.to_string(), "at least 2"));
        }
        let mut sweep = Vec::new();
        for key in ["axis1", "axis2"] {
            if let Some(text) = ini.get("sweep", key) {
                sweep.push(SweepAxis::parse(key, text)?);
            }
        }
        if ini.get("sweep", "axis2").is_some() && ini.get("sweep", "axis1").is_none() {
            return Err(ConfigError::scenario("sweep.axis2", "axis2 given without axis1"));
        }
        if sweep.len() == 2 && sweep[0].axis == sweep[1].axis {
            return Err(ConfigError::scenario("sweep.axis2", "repeats axis1"));
        }
        let outputs = Outputs {
            tdd: ini.flag("output", "tdd", true)?,
            concurrence: ini.flag("output", "concurrence", true)?,
            taus: ini.flag("output", "taus", true)?,
            events: ini.flag("output", "events", true)?,
        };
        let events = EventOptions {
            level_tol: ini.number_or("output", "level_tol", EVOLVED_LEVEL_TOL)?,
            kink_tol: ini.number_or("output", "kink_tol", DEFAULT_KINK_TOL)?,
        };
        for (key, v) in [("level_tol", events.level_tol), ("kink_tol", events.kink_tol)] {
            if !(v > 0.0) {
                return Err(ConfigError::invalid("output", key, &v.to_string(), "a positive tolerance"));
            }
        }
        let scenario = Self { state, model, t_max, samples, sweep, outputs, events };
        scenario.validate_sweep()?;
        Ok(scenario)
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut ini = Ini::parse(text)?;
        overrides.apply(&mut ini);
        Self::from_ini(&ini)
    }

    fn validate_sweep(&self) -> Result<(), ConfigError> {
        self.state.build()?;
        self.model.build()?;
        for (i, ax) in self.sweep.iter().enumerate() {
            let field = format!("sweep.axis{}", i + 1);
            let fits = match ax.axis {
                Axis::C3 => matches!(self.state, StateSpec::Mmm { .. }),
                Axis::R | Axis::Theta | Axis::Phi => matches!(self.state, StateSpec::Ewl { .. }),
                Axis::G => matches!(self.model, ModelSpec::Dephasing { .. }),
            };
            if !fits {
                return Err(ConfigError::scenario(
                    &field,
                    format!("axis {} does not apply to family {} with this model", ax.axis, self.state.family()),
                ));
            }
            for v in ax.values() {
                let (state, model) = self.with_axis(ax.axis, v);
                state.build().map_err(|e| ConfigError::scenario(&field, format!("{} = {v}: {e}", ax.axis)))?;
                model.build().map_err(|e| ConfigError::scenario(&field, format!("{} = {v}: {e}", ax.axis)))?;
            }
        }
        Ok(())
    }

    /// State and model with one swept parameter replaced.
    pub fn with_axis(&self, axis: Axis, value: f64) -> (StateSpec, ModelSpec) {
        apply_axis(self.state, self.model, axis, value)
    }

    /// State and model at one sweep grid point, one value per axis.
    pub fn at(&self, point: &[f64]) -> (StateSpec, ModelSpec) {
        self.sweep
            .iter()
            .zip(point)
            .fold((self.state, self.model), |(s, m), (ax, &v)| apply_axis(s, m, ax.axis, v))
    }

    /// Canonical INI text of this scenario.
    pub fn to_config(&self) -> String {
        let mut out = String::from("[state]\n");
        match self.state {
            StateSpec::Mmm { c1, c2, c3 } => {
                out += &format!("family = mmm\nc1 = {c1}\nc2 = {c2}\nc3 = {c3}\n");
            }
            StateSpec::Ewl { kind, r, theta, phi } => {
                let kind = if kind == BellKind::Psi { "psi" } else { "phi" };
                out += &format!("family = ewl\nkind = {kind}\nr = {r}\ntheta = {theta}\nphi = {phi}\n");
            }
            StateSpec::X { diag, rho14, rho23 } => {
                out += &format!(
                    "family = x\nrho11 = {}\nrho22 = {}\nrho33 = {}\nrho44 = {}\nre14 = {}\nim14 = {}\nre23 = {}\nim23 = {}\n",
                    diag[0], diag[1], diag[2], diag[3], rho14.re, rho14.im, rho23.re, rho23.im
                );
            }
        }
        out += "\n[model]\n";
        match self.model {
            ModelSpec::Dephasing { omega0, g, t_s, t_r } => {
                out += &format!("kind = dephasing\nomega0 = {omega0}\ng = {g}\nt_s = {t_s}\nt_r = {t_r}\n");
            }
            ModelSpec::Factors { d1_rate, d2_rate } => {
                out += &format!("kind = factors\nd1_rate = {d1_rate}\nd2_rate = {d2_rate}\n");
            }
        }
        out += &format!("\n[grid]\nt_max = {}\nsamples = {}\n", self.t_max, self.samples);
        if !self.sweep.is_empty() {
            out += "\n[sweep]\n";
            for (i, ax) in self.sweep.iter().enumerate() {
                out += &format!("axis{} = {}\n", i + 1, ax.config_line());
            }
        }
        let o = self.outputs;
        out += &format!(
            "\n[output]\ntdd = {}\nconcurrence = {}\ntaus = {}\nevents = {}\nlevel_tol = {:e}\nkink_tol = {}\n",
            o.tdd, o.concurrence, o.taus, o.events, self.events.level_tol, self.events.kink_tol
        );
        out
    }
}

fn apply_axis(mut state: StateSpec, mut model: ModelSpec, axis: Axis, value: f64) -> (StateSpec, ModelSpec) {
    match (axis, &mut state, &mut model) {
        (Axis::C3, StateSpec::Mmm { c3, .. }, _) => *c3 = value,
        (Axis::R, StateSpec::Ewl { r, .. }, _) => *r = value,
        (Axis::Theta, StateSpec::Ewl { theta, .. }, _) => *theta = value,
        (Axis::Phi, StateSpec::Ewl { phi, .. }, _) => *phi = value,
        (Axis::G, _, ModelSpec::Dephasing { g, .. }) => *g = value,
        _ => unreachable!("axis compatibility checked at parse time"),
    }
    (state, model)
}

/// `theta` or `phi` axes reaching the excluded endpoint of the EWL domain.
pub fn angle_domain_end(axis: Axis) -> Option<f64> {
    match axis {
        Axis::Theta => Some(PI),
        Axis::Phi => Some(2.0 * PI),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MMM: &str = "[state]\nfamily = mmm\nc1 = 0.8\nc2 = 0.4\nc3 = 0.2\n[grid]\nt_max = 3\n";

    #[test]
    fn parses_defaults() {
        let s = Scenario::parse(MMM, &Overrides::default()).unwrap();
        assert_eq!(s.state, StateSpec::Mmm { c1: 0.8, c2: 0.4, c3: 0.2 });
        assert_eq!(s.model, ModelSpec::Dephasing { omega0: 1.0, g: 0.0, t_s: 2.0, t_r: 1.0 });
        assert_eq!((s.t_max, s.samples), (3.0, DEFAULT_SAMPLES));
        assert!(s.sweep.is_empty());
        assert_eq!(s.outputs, Outputs::default());
    }

    #[test]
    fn flags_win_over_file() {
        let o = Overrides { t_max: Some(5.0), samples: Some(64), level_tol: Some(1e-5), kink_tol: Some(20.0) };
        let s = Scenario::parse(MMM, &o).unwrap();
        assert_eq!((s.t_max, s.samples), (5.0, 64));
        assert_eq!((s.events.level_tol, s.events.kink_tol), (1e-5, 20.0));
    }

    #[test]
    fn round_trips_through_config_text() {
        let text = "[state]\nfamily = ewl\nr = 2/3\ntheta = pi/2\n[model]\ng = 1/2\n[grid]\nt_max = 10\n[sweep]\naxis1 = phi 0 2pi 101 open\n";
        let s = Scenario::parse(text, &Overrides::default()).unwrap();
        let again = Scenario::parse(&s.to_config(), &Overrides::default()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn rejections_name_the_field() {
        let cases = [
            (MMM.replace("t_max = 3", "t_max = 0"), "grid.t_max"),
            (format!("{MMM}[sweep]\naxis1 = g 0.5 0.5 2\n"), "sweep.axis1"),
            (format!("{MMM}[sweep]\naxis1 = g 0 1 1\n"), "sweep.axis1"),
            (format!("{MMM}[sweep]\naxis1 = r 0 1 5\n"), "sweep.axis1"),
            (format!("{MMM}[sweep]\naxis2 = g 0 1 5\n"), "sweep.axis2"),
            (format!("{MMM}[sweep]\naxis1 = g 0 1 5\naxis2 = g 0 1 5\n"), "sweep.axis2"),
            (MMM.replace("c3 = 0.2", ""), "state.c3"),
            (MMM.replace("c3 = 0.2", "c3 = 1.5"), "state"),
            (format!("{MMM}[model]\nt_s = -1\n"), "model"),
            (format!("{MMM}[model]\ncoupling = 1\n"), "model.coupling"),
            (format!("{MMM}[extra]\n"), "extra"),
            (MMM.replace("mmm", "bell"), "state.family"),
        ];
        for (text, field) in cases {
            let err = Scenario::parse(&text, &Overrides::default()).unwrap_err();
            assert!(err.to_string().contains(field), "{err} should mention {field}");
        }
        let ewl = "[state]\nfamily = ewl\nr = 2/3\ntheta = 0\n[grid]\nt_max = 1\n[sweep]\naxis1 = theta 0 pi 11\n";
        let err = Scenario::parse(ewl, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("sweep.axis1"), "{err}");
        assert!(Scenario::parse(&ewl.replace("11", "11 open"), &Overrides::default()).is_ok());
    }

    #[test]
    fn axis_values() {
        let ax = SweepAxis { axis: Axis::Phi, start: 0.0, end: 2.0 * PI, count: 4, half_open: true };
        assert_eq!(ax.values(), vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0]);
        let ax = SweepAxis { axis: Axis::G, start: 0.0, end: 1.0, count: 5, half_open: false };
        assert_eq!(ax.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(angle_domain_end(Axis::Theta), Some(PI));
    }
}
