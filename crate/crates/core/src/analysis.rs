//! Regimes of MMM discord dynamics, analytic change points for the
//! uncoupled model, and detection of kinks and plateaus in sampled series.

use thiserror::Error;

use crate::correlations::intermediate;

pub const DEFAULT_KINK_TOL: f64 = 10.0;
pub const ANALYTIC_LEVEL_TOL: f64 = 1e-6;
pub const EVOLVED_LEVEL_TOL: f64 = 1e-4;

/// Fewest samples accepted by [`detect_events`].
pub const MIN_SAMPLES: usize = 16;

/// Fewest samples that make a plateau.
pub const MIN_PLATEAU_SAMPLES: usize = 4;

/// Half width of the window used for the local second-difference scale.
const SCALE_HALF_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("|c3| must be positive for a finite transition time")]
    ZeroC3,
    #[error("parameters ({c1}, {c2}, {c3}) are in regime {found:?}, expected {expected}")]
    Regime { c1: f64, c2: f64, c3: f64, found: Regime, expected: &'static str },
    #[error("parameter {name} = {value} outside {range}")]
    Parameter { name: &'static str, value: f64, range: &'static str },
    #[error("series has {0} samples, need at least {MIN_SAMPLES}")]
    TooFewSamples(usize),
    #[error("times and values differ in length ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error("series contains a non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("time grid is not uniform at index {0}")]
    NonUniform(usize),
    #[error("tolerance {name} = {value} must be positive")]
    Tolerance { name: &'static str, value: f64 },
}

/// Qualitative behaviour of MMM discord under dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `|c3| >= max{|c1|, |c2|}`: no sudden transition.
    SmoothDecay,
    /// `min <= |c3| < max`: frozen, then a single transition to decay.
    SuddenTransition,
    /// `|c3| < min`: decay, frozen plateau, decay.
    DoubleSuddenChanges,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SmoothDecay => "SmoothDecay",
            Regime::SuddenTransition => "SuddenTransition",
            Regime::DoubleSuddenChanges => "DoubleSuddenChanges",
        }
    }
}

fn extremes(c1: f64, c2: f64) -> (f64, f64) {
    let (a, b) = (c1.abs(), c2.abs());
    (a.min(b), a.max(b))
}

pub fn classify_regime(c1: f64, c2: f64, c3: f64) -> Regime {
    let (lo, hi) = extremes(c1, c2);
    let a3 = c3.abs();
    if a3 >= hi {
        Regime::SmoothDecay
    } else if a3 >= lo {
        Regime::SuddenTransition
    } else {
        Regime::DoubleSuddenChanges
    }
}

fn check_t_s(t_s: f64) -> Result<(), AnalysisError> {
    if t_s.is_finite() && t_s > 0.0 {
        Ok(())
    } else {
        Err(AnalysisError::Parameter { name: "T_S", value: t_s, range: "(0, inf)" })
    }
}

/// `t_c = (T_S/2) ln(max{|c1|,|c2|}/|c3|)`, the end of the frozen plateau
/// for the uncoupled model.
pub fn analytic_transition_time(c1: f64, c2: f64, c3: f64, t_s: f64) -> Result<f64, AnalysisError> {
    check_t_s(t_s)?;
    let (_, hi) = extremes(c1, c2);
    let a3 = c3.abs();
    if a3 == 0.0 {
        return Err(AnalysisError::ZeroC3);
    }
    if a3 > hi {
        return Err(AnalysisError::Regime {
            c1,
            c2,
            c3,
            found: classify_regime(c1, c2, c3),
            expected: "|c3| <= max{|c1|, |c2|}",
        });
    }
    Ok(0.5 * t_s * (hi / a3).ln())
}

/// `(t_c1, t_c2)`: the start and end of the plateau in the double sudden
/// change regime.
pub fn analytic_change_points(c1: f64, c2: f64, c3: f64, t_s: f64) -> Result<(f64, f64), AnalysisError> {
    check_t_s(t_s)?;
    let (lo, hi) = extremes(c1, c2);
    let a3 = c3.abs();
    if a3 == 0.0 {
        return Err(AnalysisError::ZeroC3);
    }
    let found = classify_regime(c1, c2, c3);
    if found != Regime::DoubleSuddenChanges {
        return Err(AnalysisError::Regime { c1, c2, c3, found, expected: "DoubleSuddenChanges" });
    }
    Ok((0.5 * t_s * (lo / a3).ln(), 0.5 * t_s * (hi / a3).ln()))
}

/// Closed-form discord of an uncoupled MMM trajectory, written per regime.
pub fn piecewise_tdd_g0(c1: f64, c2: f64, c3: f64, t_s: f64, t: f64) -> f64 {
    let u = 1.0 / t_s;
    let a = 0.5 * (c1 + c2).abs() * (-2.0 * u * t).exp();
    let b = 0.5 * (c1 - c2).abs() * (-2.0 * t / t_s).exp();
    let d1 = a + b;
    let d0 = (a - b).abs();
    let a3 = c3.abs();
    match classify_regime(c1, c2, c3) {
        Regime::SmoothDecay => d1,
        Regime::SuddenTransition => a3.min(d1),
        Regime::DoubleSuddenChanges => intermediate(a3, d0, d1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventOptions {
    /// Maximum deviation of plateau samples from the plateau mean.
    pub level_tol: f64,
    /// Ratio of a second difference to the local scale that marks a kink.
    pub kink_tol: f64,
}

impl EventOptions {
    /// Tolerances for series built from closed-form expressions.
    pub fn analytic() -> Self {
        Self { level_tol: ANALYTIC_LEVEL_TOL, kink_tol: DEFAULT_KINK_TOL }
    }

    /// Tolerances for series built from evolved states.
    pub fn evolved() -> Self {
        Self { level_tol: EVOLVED_LEVEL_TOL, kink_tol: DEFAULT_KINK_TOL }
    }
}

impl Default for EventOptions {
    fn default() -> Self {
        Self::evolved()
    }
}

/// A maximal run of samples within `level_tol` of their mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: f64,
    pub end: f64,
    pub level: f64,
}

impl Plateau {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventReport {
    pub kink_times: Vec<f64>,
    pub plateaus: Vec<Plateau>,
    pub level_tol: f64,
    pub kink_tol: f64,
}

impl EventReport {
    /// Longest plateau whose level is within `tol` of `level`.
    pub fn longest_plateau_at(&self, level: f64, tol: f64) -> Option<&Plateau> {
        self.plateaus
            .iter()
            .filter(|p| (p.level - level).abs() <= tol)
            .max_by(|a, b| a.length().total_cmp(&b.length()))
    }
}

fn validate(times: &[f64], values: &[f64], opts: &EventOptions) -> Result<(), AnalysisError> {
    if times.len() != values.len() {
        return Err(AnalysisError::LengthMismatch { times: times.len(), values: values.len() });
    }
    if times.len() < MIN_SAMPLES {
        return Err(AnalysisError::TooFewSamples(times.len()));
    }
    for (name, value) in [("level_tol", opts.level_tol), ("kink_tol", opts.kink_tol)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(AnalysisError::Tolerance { name, value });
        }
    }
    if let Some(i) = (0..times.len()).find(|&i| !times[i].is_finite() || !values[i].is_finite()) {
        return Err(AnalysisError::NonFinite(i));
    }
    let n = times.len();
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(AnalysisError::NonUniform(1));
    }
    let slack = 1e-9 * h.max(times[n - 1].abs());
    for i in 1..n {
        let expected = times[0] + h * i as f64;
        if (times[i] - expected).abs() > slack {
            return Err(AnalysisError::NonUniform(i));
        }
    }
    Ok(())
}

fn median(buf: &mut [f64]) -> f64 {
    buf.sort_by(f64::total_cmp);
    let m = buf.len() / 2;
    if buf.len() % 2 == 1 {
        buf[m]
    } else {
        0.5 * (buf[m - 1] + buf[m])
    }
}

fn kink_indices(values: &[f64], kink_tol: f64) -> Vec<usize> {
    let n = values.len();
    let second: Vec<f64> =
        (1..n - 1).map(|i| (values[i + 1] - 2.0 * values[i] + values[i - 1]).abs()).collect();
    let floor = 1e-12 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut flagged: Vec<(usize, f64)> = Vec::new();
    let mut buf = Vec::with_capacity(2 * SCALE_HALF_WINDOW + 1);
    for (k, &s) in second.iter().enumerate() {
        let lo = k.saturating_sub(SCALE_HALF_WINDOW);
        let hi = (k + SCALE_HALF_WINDOW + 1).min(second.len());
        buf.clear();
        buf.extend_from_slice(&second[lo..hi]);
        let scale = median(&mut buf).max(floor);
        if s > kink_tol * scale {
            flagged.push((k + 1, s / scale));
        }
    }
    let mut peaks = Vec::new();
    let mut group: Option<(usize, usize, f64)> = None;
    for (i, ratio) in flagged {
        group = match group {
            Some((last, best, best_ratio)) if i <= last + 2 => {
                if ratio > best_ratio {
                    Some((i, i, ratio))
                } else {
                    Some((i, best, best_ratio))
                }
            }
            Some((_, best, _)) => {
                peaks.push(best);
                Some((i, i, ratio))
            }
            None => Some((i, i, ratio)),
        };
    }
    if let Some((_, best, _)) = group {
        peaks.push(best);
    }
    peaks
}

/// Sub-grid kink position: intersection of the chords through the two
/// samples on either side, kept within one step of the peak sample.
fn refine_kink(times: &[f64], values: &[f64], p: usize) -> f64 {
    let n = times.len();
    if p < 2 || p + 2 >= n {
        return times[p];
    }
    let h = times[1] - times[0];
    let left = (values[p - 1] - values[p - 2]) / h;
    let right = (values[p + 2] - values[p + 1]) / h;
    if left == right {
        return times[p];
    }
    // v[p-1] + left (t - t[p-1]) = v[p+1] + right (t - t[p+1])
    let t = (values[p + 1] - values[p - 1] + left * times[p - 1] - right * times[p + 1]) / (left - right);
    t.clamp(times[p] - h, times[p] + h)
}

fn plateaus(times: &[f64], values: &[f64], level_tol: f64) -> Vec<Plateau> {
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut lo, mut hi, mut sum) = (values[i], values[i], values[i]);
        let mut j = i + 1;
        while j < n {
            let (nlo, nhi, nsum) = (lo.min(values[j]), hi.max(values[j]), sum + values[j]);
            let mean = nsum / (j - i + 1) as f64;
            if nhi - mean > level_tol || mean - nlo > level_tol {
                break;
            }
            (lo, hi, sum) = (nlo, nhi, nsum);
            j += 1;
        }
        let len = j - i;
        if len >= MIN_PLATEAU_SAMPLES {
            out.push(Plateau { start: times[i], end: times[j - 1], level: sum / len as f64 });
            i = j;
        } else {
            i += 1;
        }
    }
    out
}

/// Kinks and plateaus of a series sampled on a uniform grid.
pub fn detect_events(times: &[f64], values: &[f64], opts: &EventOptions) -> Result<EventReport, AnalysisError> {
    validate(times, values, opts)?;
    let kink_times = kink_indices(values, opts.kink_tol)
        .into_iter()
        .map(|p| refine_kink(times, values, p))
        .collect();
    Ok(EventReport {
        kink_times,
        plateaus: plateaus(times, values, opts.level_tol),
        level_tol: opts.level_tol,
        kink_tol: opts.kink_tol,
    })
}
