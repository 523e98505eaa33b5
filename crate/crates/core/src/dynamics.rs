//! Exact dephasing dynamics of two dipole-dipole coupled qubits, each in
//! its own reservoir.
//!
//! The propagator is closed form, so every time point is evaluated
//! independently; trajectories are sampled in parallel and assembled in time
//! order.

use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::correlations::{concurrence_x, tdd_x, TauTriple};
use crate::qmat::Complex;
use crate::states::{XState, EVOLVED_STATE_TOL};

/// Below this value of `|d| t` the hyperbolic functions use their Taylor series.
const SERIES_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("model parameter {name} = {value} outside {range}")]
    Parameter { name: &'static str, value: f64, range: &'static str },
    #[error("time {0} must be finite and non-negative")]
    Time(f64),
    #[error("time grid needs t_max > 0 and at least 2 samples (got t_max = {t_max}, n = {n})")]
    Grid { t_max: f64, n: usize },
    #[error("evolved state at t = {t} is not physical: minimum eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NotPhysical { t: f64, min_eigenvalue: f64, tol: f64 },
    #[error("the closed-form decoherence factors require g = 0 (got g = {0})")]
    CoupledModel(f64),
}

/// Anything that maps an initial X state to its state at time `t`.
pub trait Decoherence: Sync {
    /// Unchecked propagation; the result is Hermitian and trace preserving
    /// but positivity is not verified.
    fn propagate(&self, s0: &XState, t: f64) -> XState;
}

/// Two qubits with frequency `omega0` and exchange coupling `g`, each
/// dephased by a reservoir with system and reservoir relaxation times
/// `t_s`, `t_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingModel {
    omega0: f64,
    g: f64,
    t_s: f64,
    t_r: f64,
}

/// Rates entering the propagator. `d` is real and non-negative when
/// `u^2 >= 4g(g+v)` and purely imaginary otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub u: f64,
    pub v: f64,
    pub d: Complex,
}

impl DephasingModel {
    pub fn new(omega0: f64, g: f64, t_s: f64, t_r: f64) -> Result<Self, DynamicsError> {
        let check = |name, value: f64, ok: bool, range| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(DynamicsError::Parameter { name, value, range })
            }
        };
        check("omega0", omega0, omega0 >= 0.0, "[0, inf)")?;
        check("g", g, g >= 0.0, "[0, inf)")?;
        check("T_S", t_s, t_s > 0.0, "(0, inf)")?;
        check("T_R", t_r, t_r > 0.0, "(0, inf)")?;
        Ok(Self { omega0, g, t_s, t_r })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    pub fn t_r(&self) -> f64 {
        self.t_r
    }

    pub fn with_g(&self, g: f64) -> Result<Self, DynamicsError> {
        Self::new(self.omega0, g, self.t_s, self.t_r)
    }

    pub fn derived_params(&self) -> DerivedParams {
        let g = self.g;
        let k = self.t_s * (1.0 + 4.0 * g * g * self.t_r * self.t_r);
        let u = 1.0 / k;
        let v = 2.0 * g * self.t_r / k;
        let arg = u * u - 4.0 * g * (g + v);
        let d = if arg >= 0.0 {
            Complex::new(arg.sqrt(), 0.0)
        } else {
            Complex::new(0.0, (-arg).sqrt())
        };
        DerivedParams { u, v, d }
    }
}

/// `(e^{-ut} cosh(dt), e^{-ut} sinh(dt)/d)`, both real for real or purely
/// imaginary `d`.
fn damped_hyperbolics(u: f64, d: Complex, t: f64) -> (f64, f64) {
    let decay = (-u * t).exp();
    if d.norm() * t < SERIES_CUTOFF {
        let (ch, sh) = hyperbolic_series(d, t);
        return (decay * ch.re, decay * sh.re);
    }
    damped_hyperbolics_exact(u, d, t)
}

fn hyperbolic_series(d: Complex, t: f64) -> (Complex, Complex) {
    let z2 = d * d * t * t;
    let ch = 1.0 + z2 / 2.0 + z2 * z2 / 24.0 + z2 * z2 * z2 / 720.0;
    let sh = (1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0) * t;
    (ch, sh)
}

fn damped_hyperbolics_exact(u: f64, d: Complex, t: f64) -> (f64, f64) {
    let z = d * t;
    if z.re > 20.0 {
        let grow = ((d - u) * t).exp();
        let shrink = ((-d - u) * t).exp();
        return (((grow + shrink) * 0.5).re, ((grow - shrink) / (d * 2.0)).re);
    }
    let decay = (-u * t).exp();
    ((z.cosh() * decay).re, (z.sinh() / d * decay).re)
}

impl Decoherence for DephasingModel {
    fn propagate(&self, s0: &XState, t: f64) -> XState {
        if t == 0.0 {
            return *s0;
        }
        let DerivedParams { u, v, d } = self.derived_params();
        let g = self.g;
        let (ch, sh) = damped_hyperbolics(u, d, t);
        let [r11, r22, r33, r44] = s0.diagonals();
        let mu_plus = 0.5 * (r22 + r33);
        let mu_minus = 0.5 * (r22 - r33);
        let im23 = s0.rho23().im;
        let re23 = s0.rho23().re;

        let nu_plus = ch + u * sh;
        let nu_minus = ch - u * sh;
        let shift = mu_minus * nu_plus - im23 * 2.0 * g * sh;
        let phase = Complex::new(-2.0 * t / self.t_s, -2.0 * self.omega0 * t).exp();
        let rho14 = s0.rho14() * phase;
        let rho23 = Complex::new(
            re23 * (-2.0 * u * t).exp(),
            im23 * nu_minus + mu_minus * 2.0 * (g + v) * sh,
        );
        XState::from_parts([r11, mu_plus + shift, mu_plus - shift, r44], rho14, rho23)
    }
}

/// Abstract decoherence with real exponential factors:
/// `rho14 -> rho14 e^{-d1_rate t}`, `rho23 -> rho23 e^{-d2_rate t}`,
/// populations fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorModel {
    pub d1_rate: f64,
    pub d2_rate: f64,
}

impl FactorModel {
    pub fn new(d1_rate: f64, d2_rate: f64) -> Result<Self, DynamicsError> {
        for (name, value) in [("d1_rate", d1_rate), ("d2_rate", d2_rate)] {
            if !value.is_finite() || value < 0.0 {
                return Err(DynamicsError::Parameter { name, value, range: "[0, inf)" });
            }
        }
        Ok(Self { d1_rate, d2_rate })
    }

    /// `(d1(t), d2(t))`.
    pub fn factors(&self, t: f64) -> (f64, f64) {
        ((-self.d1_rate * t).exp(), (-self.d2_rate * t).exp())
    }
}

impl Decoherence for FactorModel {
    fn propagate(&self, s0: &XState, t: f64) -> XState {
        if t == 0.0 {
            return *s0;
        }
        let (d1, d2) = self.factors(t);
        XState::from_parts(s0.diagonals(), s0.rho14() * d1, s0.rho23() * d2)
    }
}

/// Propagates `s0` to time `t` and checks positivity at the evolved-state
/// tolerance.
pub fn evolve<M: Decoherence + ?Sized>(s0: &XState, m: &M, t: f64) -> Result<XState, DynamicsError> {
    if !t.is_finite() || t < 0.0 {
        return Err(DynamicsError::Time(t));
    }
    let s = m.propagate(s0, t);
    let min_eigenvalue = s.min_eigenvalue();
    if !(min_eigenvalue >= -EVOLVED_STATE_TOL) {
        return Err(DynamicsError::NotPhysical { t, min_eigenvalue, tol: EVOLVED_STATE_TOL });
    }
    Ok(s)
}

/// `(d1(t), d2(t)) = (exp(-2i omega0 t - 2t/T_S), e^{-2ut})` for an
/// uncoupled model; MMM states stay MMM with these factors.
pub fn decoherence_factors_g0(m: &DephasingModel, t: f64) -> Result<(Complex, Complex), DynamicsError> {
    if m.g != 0.0 {
        return Err(DynamicsError::CoupledModel(m.g));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(DynamicsError::Time(t));
    }
    let u = m.derived_params().u;
    let d1 = Complex::new(-2.0 * t / m.t_s, -2.0 * m.omega0 * t).exp();
    let d2 = Complex::new((-2.0 * u * t).exp(), 0.0);
    Ok((d1, d2))
}

/// `n` equally spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, n: usize) -> Result<Vec<f64>, DynamicsError> {
    if !(t_max.is_finite() && t_max > 0.0) || n < 2 {
        return Err(DynamicsError::Grid { t_max, n });
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { t_max } else { t_max * i as f64 / last }).collect())
}

/// Unchecked states at each time, in input order.
pub fn sample_states<M: Decoherence + ?Sized>(s0: &XState, m: &M, times: &[f64]) -> Vec<XState> {
    times.par_iter().map(|&t| m.propagate(s0, t)).collect()
}

/// Correlation quantifiers along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub times: Vec<f64>,
    pub tdd: Vec<f64>,
    pub concurrence: Vec<f64>,
    /// `[|tau1|, |tau2|, |tau3|]` per sample.
    pub tau_abs: Vec<[f64; 3]>,
}

impl CorrelationSeries {
    pub fn of(times: &[f64], states: &[XState]) -> Self {
        let rows: Vec<(f64, f64, [f64; 3])> = states
            .par_iter()
            .map(|s| (tdd_x(s), concurrence_x(s), TauTriple::of(s).abs()))
            .collect();
        Self {
            times: times.to_vec(),
            tdd: rows.iter().map(|r| r.0).collect(),
            concurrence: rows.iter().map(|r| r.1).collect(),
            tau_abs: rows.iter().map(|r| r.2).collect(),
        }
    }
}

/// Sampled states on a time grid with lazily computed correlation series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<XState>,
    series: OnceLock<CorrelationSeries>,
}

impl Trajectory {
    /// Pairs times with states; times must be strictly increasing.
    pub fn from_parts(times: Vec<f64>, states: Vec<XState>) -> Self {
        assert_eq!(times.len(), states.len(), "one state per time");
        assert!(times.windows(2).all(|w| w[0] < w[1]), "times must be strictly increasing");
        Self { times, states, series: OnceLock::new() }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[XState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self) -> &CorrelationSeries {
        self.series.get_or_init(|| CorrelationSeries::of(&self.times, &self.states))
    }
}

/// Samples `n` uniform times on `[0, t_max]`, rejecting the trajectory at
/// the earliest non-physical sample.
pub fn sample_trajectory<M: Decoherence + ?Sized>(
    s0: &XState,
    m: &M,
    t_max: f64,
    n: usize,
) -> Result<Trajectory, DynamicsError> {
    let times = uniform_grid(t_max, n)?;
    let states: Vec<Result<XState, DynamicsError>> =
        times.par_iter().map(|&t| evolve(s0, m, t)).collect();
    let states = states.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Trajectory::from_parts(times, states))
}

/// Like [`sample_trajectory`] but without positivity checks, for formal
/// initial states and for flagging violations row by row.
pub fn sample_trajectory_unchecked<M: Decoherence + ?Sized>(
    s0: &XState,
    m: &M,
    t_max: f64,
    n: usize,
) -> Result<Trajectory, DynamicsError> {
    let times = uniform_grid(t_max, n)?;
    let states = sample_states(s0, m, &times);
    Ok(Trajectory::from_parts(times, states))
}
