//! Figure presets. The caption table lives in `docs/presets.md` and is
//! compiled in, so provenance notes quote the same text the tests check.

use crate::config::parse_number;
use crate::error::ConfigError;
use crate::scenario::{ModelSpec, Overrides, Scenario, StateSpec};

pub const PRESET_DOC: &str = include_str!("../docs/presets.md");

pub const PRESET_IDS: [&str; 10] =
    ["fig1a", "fig1b", "fig1c", "fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7"];

const FIG1_MODEL: &str = "[model]\nkind = factors\nd1_rate = 1\nd2_rate = 1/2\n";
const DEPHASING: &str = "omega0 = 1\nt_s = 2\nt_r = 1\n";

fn config_text(id: &str) -> Option<String> {
    let mmm = |c: &str| format!("[state]\nfamily = mmm\n{c}\n");
    let ewl = |p: &str| format!("[state]\nfamily = ewl\nkind = psi\n{p}\n");
    let dephasing = |g: Option<&str>| {
        let g = g.map(|g| format!("g = {g}\n")).unwrap_or_default();
        format!("[model]\nkind = dephasing\n{DEPHASING}{g}")
    };
    let grid = |t_max: &str| format!("[grid]\nt_max = {t_max}\nsamples = 512\n");
    let sweep = |axis: &str| format!("[sweep]\naxis1 = {axis}\n");
    let text = match id {
        "fig1a" => mmm("c1 = 0.4\nc2 = 0.8\nc3 = 0.8") + FIG1_MODEL + &grid("3"),
        "fig1b" => mmm("c1 = 0.4\nc2 = 0.8\nc3 = 0.4") + FIG1_MODEL + &grid("3"),
        "fig1c" => mmm("c1 = 0.4\nc2 = 0.8\nc3 = 0.3") + FIG1_MODEL + &grid("3"),
        "fig2" => mmm("c1 = 0.8\nc2 = 0.4\nc3 = 0") + &dephasing(Some("0")) + &grid("3") + &sweep("c3 0 1 101 closed"),
        "fig3a" => mmm("c1 = 0.8\nc2 = 0.5\nc3 = 0.5") + &dephasing(None) + &grid("6") + &sweep("g 0 1 101 closed"),
        "fig3b" => mmm("c1 = 0.8\nc2 = 0.4\nc3 = 0.2") + &dephasing(None) + &grid("6") + &sweep("g 0 1 101 closed"),
        "fig4" => ewl("r = 0\ntheta = pi/2\nphi = 0") + &dephasing(Some("1/2")) + &grid("10") + &sweep("r 0 1 91 closed"),
        "fig5" => ewl("r = 2/3\ntheta = 0\nphi = 0") + &dephasing(Some("1/2")) + &grid("10") + &sweep("theta 0 pi 101 open"),
        "fig6" => ewl("r = 2/3\ntheta = 0\nphi = 0") + &dephasing(None) + &grid("10") + &sweep("g 0 2 101 closed"),
        "fig7" => ewl("r = 2/3\ntheta = pi/2\nphi = 0") + &dephasing(Some("1/2")) + &grid("10") + &sweep("phi 0 2pi 101 open"),
        _ => return None,
    };
    Some(text)
}

/// One row of the caption table.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionRow {
    pub id: String,
    pub caption: String,
    pub bindings: Vec<(String, f64)>,
    pub sweep: Option<String>,
    pub t_max: f64,
}

pub fn caption_table() -> Vec<CaptionRow> {
    PRESET_DOC
        .lines()
        .filter_map(|line| {
            let cells: Vec<&str> = line.trim().strip_prefix('|')?.strip_suffix('|')?.split('|').map(str::trim).collect();
            if cells.len() != 5 || !PRESET_IDS.contains(&cells[0]) {
                return None;
            }
            let bindings = cells[2]
                .split_whitespace()
                .map(|b| {
                    let (k, v) = b.split_once('=').expect("binding is key=value");
                    (k.to_string(), parse_number(v).expect("numeric binding"))
                })
                .collect();
            Some(CaptionRow {
                id: cells[0].to_string(),
                caption: cells[1].trim_matches('"').to_string(),
                bindings,
                sweep: (cells[3] != "-").then(|| cells[3].to_string()),
                t_max: parse_number(cells[4]).expect("numeric t_max"),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: &'static str,
    pub caption: String,
    pub config: String,
}

impl Preset {
    pub fn scenario(&self, overrides: &Overrides) -> Result<Scenario, ConfigError> {
        Scenario::parse(&self.config, overrides)
    }

    /// Plain-text provenance note for the emitted files.
    pub fn provenance(&self, scenario: &Scenario) -> String {
        let row = caption_table().into_iter().find(|r| r.id == self.id).expect("every preset has a caption row");
        let bindings: Vec<String> = row.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        format!(
            "preset: {}\ncaption: \"{}\"\ncaption parameters: {}\nchosen window: t_max = {}, sweep = {}\n\nscenario:\n{}",
            self.id,
            row.caption,
            bindings.join(", "),
            scenario.t_max,
            row.sweep.as_deref().unwrap_or("none"),
            scenario.to_config()
        )
    }
}

pub fn preset(id: &str) -> Result<Preset, ConfigError> {
    let id = PRESET_IDS
        .iter()
        .copied()
        .find(|p| *p == id)
        .ok_or_else(|| ConfigError::UnknownPreset { id: id.to_string(), valid: PRESET_IDS.join(", ") })?;
    let row = caption_table().into_iter().find(|r| r.id == id).expect("every preset has a caption row");
    Ok(Preset { id, caption: row.caption, config: config_text(id).expect("every preset has a config") })
}

/// The value a scenario assigns to a named parameter.
pub fn binding(s: &Scenario, key: &str) -> Option<f64> {
    let from_state = match (s.state, key) {
        (StateSpec::Mmm { c1, .. }, "c1") => Some(c1),
        (StateSpec::Mmm { c2, .. }, "c2") => Some(c2),
        (StateSpec::Mmm { c3, .. }, "c3") => Some(c3),
        (StateSpec::Ewl { r, .. }, "r") => Some(r),
        (StateSpec::Ewl { theta, .. }, "theta") => Some(theta),
        (StateSpec::Ewl { phi, .. }, "phi") => Some(phi),
        _ => None,
    };
    from_state.or(match (s.model, key) {
        (ModelSpec::Dephasing { omega0, .. }, "omega0") => Some(omega0),
        (ModelSpec::Dephasing { g, .. }, "g") => Some(g),
        (ModelSpec::Dephasing { t_s, .. }, "t_s") => Some(t_s),
        (ModelSpec::Dephasing { t_r, .. }, "t_r") => Some(t_r),
        (ModelSpec::Factors { d1_rate, .. }, "d1_rate") => Some(d1_rate),
        (ModelSpec::Factors { d2_rate, .. }, "d2_rate") => Some(d2_rate),
        _ => None,
    })
}
