//! Brute-force trace-distance discord by direct minimisation over
//! classical-quantum states, and physicality reports for arbitrary 4x4
//! matrices.
//!
//! The classical-quantum family is `p Π+ ⊗ ρ(b1) + (1-p) Π- ⊗ ρ(b2)` with
//! `Π± = (I ± n·σ)/2` on qubit A and Bloch-ball states on qubit B: nine real
//! parameters once `n` is written in spherical angles. The search is a
//! coarse grid seeded from post-measurement states, followed by
//! Nelder-Mead refinement from several starting points.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::qmat::{
    expectation, hermitian_eigenvalues, pauli_tensor, trace_norm_hermitian, Complex, ComplexMatrix2,
    ComplexMatrix4, Pauli, RealVector3,
};

/// Tolerance used to accept oracle inputs as density matrices.
pub const ORACLE_INPUT_TOL: f64 = 1e-9;

const DIM: usize = 9;
const MAX_REINITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("input is not a density matrix: {0}")]
    NotPhysical(PhysicalityReport),
    #[error("option {name} = {value} must be positive")]
    Options { name: &'static str, value: f64 },
    #[error("classical-quantum parameter {name} = {value} outside {range}")]
    Parameter { name: &'static str, value: f64, range: &'static str },
}

/// Deviations of a matrix from being a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    /// `max |M_ij - conj(M_ji)|`.
    pub hermiticity_deviation: f64,
    /// `|Tr M - 1|`.
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// Tolerance the report was requested with.
    pub tol: f64,
}

impl PhysicalityReport {
    /// All three deviations within the requested tolerance.
    pub fn is_physical(&self) -> bool {
        self.is_within(self.tol)
    }

    pub fn is_within(&self, tol: f64) -> bool {
        self.hermiticity_deviation <= tol && self.trace_deviation <= tol && self.min_eigenvalue >= -tol
    }
}

impl std::fmt::Display for PhysicalityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Hermiticity deviation {:e}, trace deviation {:e}, minimum eigenvalue {:e}",
            self.hermiticity_deviation, self.trace_deviation, self.min_eigenvalue
        )
    }
}

/// Reports how far `rho` is from a density matrix. Non-finite input gives
/// NaN fields, which fail every tolerance.
pub fn check_physical(rho: &ComplexMatrix4, tol: f64) -> PhysicalityReport {
    if !rho.is_finite() {
        return PhysicalityReport {
            hermiticity_deviation: f64::NAN,
            trace_deviation: f64::NAN,
            min_eigenvalue: f64::NAN,
            tol,
        };
    }
    let hermiticity_deviation = rho.hermiticity_deviation();
    let trace = rho.trace();
    let trace_deviation = (trace - Complex::new(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(&rho.hermitian_part(), f64::INFINITY)
        .expect("finite Hermitian part")[3];
    PhysicalityReport { hermiticity_deviation, trace_deviation, min_eigenvalue, tol }
}

/// Parameters of a two-projector classical-quantum state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqParams {
    /// Measurement direction on qubit A.
    pub n: RealVector3,
    /// Weight of the `+n` outcome.
    pub p: f64,
    /// Bloch vector of the B state paired with `+n`.
    pub b1: RealVector3,
    /// Bloch vector of the B state paired with `-n`.
    pub b2: RealVector3,
}

fn norm3(v: &RealVector3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl CqParams {
    pub fn new(n: RealVector3, p: f64, b1: RealVector3, b2: RealVector3) -> Result<Self, OracleError> {
        let nn = norm3(&n);
        if !nn.is_finite() || (nn - 1.0).abs() > 1e-12 {
            return Err(OracleError::Parameter { name: "|n|", value: nn, range: "{1}" });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(OracleError::Parameter { name: "p", value: p, range: "[0, 1]" });
        }
        for (name, b) in [("|b1|", b1), ("|b2|", b2)] {
            let nb = norm3(&b);
            if !(nb <= 1.0 + 1e-12) {
                return Err(OracleError::Parameter { name, value: nb, range: "[0, 1]" });
            }
        }
        Ok(Self { n, p, b1, b2 })
    }

    fn from_point(x: &[f64; DIM]) -> Self {
        let (st, ct) = x[0].sin_cos();
        let (sp, cp) = x[1].sin_cos();
        Self {
            n: [st * cp, st * sp, ct],
            p: x[2],
            b1: [x[3], x[4], x[5]],
            b2: [x[6], x[7], x[8]],
        }
    }
}

fn bloch_matrix(b: &RealVector3, sign: f64) -> ComplexMatrix2 {
    let s = |v: f64| Complex::new(0.5 * sign * v, 0.0);
    let i = Complex::new(0.0, 0.5 * sign);
    ComplexMatrix2([
        [Complex::new(0.5, 0.0) + s(b[2]), s(b[0]) - i * b[1]],
        [s(b[0]) + i * b[1], Complex::new(0.5, 0.0) - s(b[2])],
    ])
}

/// `p Π+ ⊗ ρ(b1) + (1-p) Π- ⊗ ρ(b2)`.
pub fn cq_state(q: &CqParams) -> ComplexMatrix4 {
    let plus = bloch_matrix(&q.n, 1.0);
    let minus = bloch_matrix(&q.n, -1.0);
    let b1 = bloch_matrix(&q.b1, 1.0);
    let b2 = bloch_matrix(&q.b2, 1.0);
    ComplexMatrix4::kron(&plus, &b1).scale(Complex::new(q.p, 0.0))
        + ComplexMatrix4::kron(&minus, &b2).scale(Complex::new(1.0 - q.p, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Grid points per coordinate of the coarse search.
    pub grid_points: usize,
    /// Nelder-Mead iterations per refinement round.
    pub iterations: usize,
    /// Independent refinements started from the best grid candidates.
    pub restarts: usize,
    /// Convergence tolerance on the objective.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { grid_points: 6, iterations: 400, restarts: 8, tolerance: 1e-6, seed: 0 }
    }
}

impl MinimizeOptions {
    fn validate(&self) -> Result<(), OracleError> {
        for (name, value) in [
            ("grid_points", self.grid_points as f64),
            ("iterations", self.iterations as f64),
            ("restarts", self.restarts as f64),
            ("tolerance", self.tolerance),
        ] {
            if !(value > 0.0) {
                return Err(OracleError::Options { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Smallest trace distance found; an upper bound on the discord.
    pub value: f64,
    /// The minimising classical-quantum state.
    pub best: CqParams,
    pub restarts: usize,
    pub evaluations: usize,
    pub seed: u64,
}

/// Keeps `p` in `[0, 1]` and both Bloch vectors in the unit ball.
fn project(x: &mut [f64; DIM]) {
    x[2] = x[2].clamp(0.0, 1.0);
    for k in [3, 6] {
        let n = (x[k] * x[k] + x[k + 1] * x[k + 1] + x[k + 2] * x[k + 2]).sqrt();
        if n > 1.0 {
            for v in &mut x[k..k + 3] {
                *v /= n;
            }
        }
    }
}

struct Objective<'a> {
    rho: &'a ComplexMatrix4,
    evaluations: usize,
}

impl Objective<'_> {
    fn eval(&mut self, x: &[f64; DIM]) -> f64 {
        self.evaluations += 1;
        let chi = cq_state(&CqParams::from_point(x));
        trace_norm_hermitian(&(*self.rho - chi), f64::INFINITY).expect("finite difference")
    }
}

/// Local Bloch data of `rho`: `x_i`, `y_j`, `T_ij`.
struct Correlations {
    x: RealVector3,
    y: RealVector3,
    t: [[f64; 3]; 3],
}

impl Correlations {
    fn of(rho: &ComplexMatrix4) -> Self {
        let s = [Pauli::X, Pauli::Y, Pauli::Z];
        let e = |a, b| expectation(rho, &pauli_tensor(a, b)).re;
        let mut c = Self { x: [0.0; 3], y: [0.0; 3], t: [[0.0; 3]; 3] };
        for i in 0..3 {
            c.x[i] = e(s[i], Pauli::I);
            c.y[i] = e(Pauli::I, s[i]);
            for j in 0..3 {
                c.t[i][j] = e(s[i], s[j]);
            }
        }
        c
    }

    /// Parameters of the post-measurement state for direction `(theta, phi)`.
    fn measured(&self, theta: f64, phi: f64) -> [f64; DIM] {
        let mut x = [0.0; DIM];
        x[0] = theta;
        x[1] = phi;
        let n = CqParams::from_point(&x).n;
        let nx: f64 = (0..3).map(|i| n[i] * self.x[i]).sum();
        x[2] = 0.5 * (1.0 + nx);
        for j in 0..3 {
            let nt: f64 = (0..3).map(|i| n[i] * self.t[i][j]).sum();
            let (wp, wm) = (1.0 + nx, 1.0 - nx);
            x[3 + j] = if wp > 1e-12 { (self.y[j] + nt) / wp } else { 0.0 };
            x[6 + j] = if wm > 1e-12 { (self.y[j] - nt) / wm } else { 0.0 };
        }
        project(&mut x);
        x
    }
}

fn coarse_candidates(obj: &mut Objective<'_>, opts: &MinimizeOptions) -> Vec<(f64, [f64; DIM])> {
    let g = opts.grid_points;
    let corr = Correlations::of(obj.rho);
    let mut out = Vec::new();
    for i in 0..g {
        let theta = PI * (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            let phi = 2.0 * PI * j as f64 / g as f64;
            let seed = corr.measured(theta, phi);
            out.push((obj.eval(&seed), seed));
            for k in 0..g {
                let mut x = seed;
                x[2] = if g == 1 { 0.5 } else { k as f64 / (g - 1) as f64 };
                out.push((obj.eval(&x), x));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn nelder_mead(
    obj: &mut Objective<'_>,
    start: [f64; DIM],
    steps: [f64; DIM],
    iterations: usize,
    tol: f64,
) -> (f64, [f64; DIM]) {
    let n = DIM as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n);
    let mut simplex: Vec<(f64, [f64; DIM])> = Vec::with_capacity(DIM + 1);
    simplex.push((obj.eval(&start), start));
    for i in 0..DIM {
        let mut x = start;
        x[i] += steps[i];
        project(&mut x);
        simplex.push((obj.eval(&x), x));
    }
    let point = |obj: &mut Objective<'_>, base: &[f64; DIM], dir: &[f64; DIM], k: f64| {
        let mut x = [0.0; DIM];
        for i in 0..DIM {
            x[i] = base[i] + k * (dir[i] - base[i]);
        }
        project(&mut x);
        (obj.eval(&x), x)
    };
    for _ in 0..iterations {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        if simplex[DIM].0 - simplex[0].0 <= tol {
            break;
        }
        let mut centroid = [0.0; DIM];
        for (_, x) in &simplex[..DIM] {
            for i in 0..DIM {
                centroid[i] += x[i] / n;
            }
        }
        let worst = simplex[DIM];
        let reflected = point(obj, &centroid, &worst.1, -alpha);
        if reflected.0 < simplex[0].0 {
            let expanded = point(obj, &centroid, &worst.1, -alpha * beta);
            simplex[DIM] = if expanded.0 < reflected.0 { expanded } else { reflected };
        } else if reflected.0 < simplex[DIM - 1].0 {
            simplex[DIM] = reflected;
        } else {
            let contracted = if reflected.0 < worst.0 {
                point(obj, &centroid, &reflected.1, gamma)
            } else {
                point(obj, &centroid, &worst.1, gamma)
            };
            if contracted.0 < reflected.0.min(worst.0) {
                simplex[DIM] = contracted;
            } else {
                let best = simplex[0].1;
                for v in simplex.iter_mut().skip(1) {
                    *v = point(obj, &best, &v.1, delta);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    simplex[0]
}

fn refine(
    rho: &ComplexMatrix4,
    start: [f64; DIM],
    opts: &MinimizeOptions,
    rng: &mut ChaCha8Rng,
) -> (f64, [f64; DIM], usize) {
    let mut obj = Objective { rho, evaluations: 0 };
    let mut best = (obj.eval(&start), start);
    let mut scale = 0.3;
    for _ in 0..MAX_REINITS {
        let mut steps = [0.0; DIM];
        for s in steps.iter_mut() {
            *s = scale * rng.gen_range(0.5..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        let (f, x) = nelder_mead(&mut obj, best.1, steps, opts.iterations, 1e-3 * opts.tolerance);
        let gain = best.0 - f;
        if f < best.0 {
            best = (f, x);
        }
        if gain <= opts.tolerance {
            scale *= 0.5;
            if scale < 1e-3 {
                break;
            }
        }
    }
    (best.0, best.1, obj.evaluations)
}

/// Smallest trace distance from `rho` to a classical-quantum state.
pub fn tdd_bruteforce(rho: &ComplexMatrix4, opts: &MinimizeOptions) -> Result<OracleResult, OracleError> {
    opts.validate()?;
    let report = check_physical(rho, ORACLE_INPUT_TOL);
    if !report.is_physical() {
        return Err(OracleError::NotPhysical(report));
    }
    let rho = rho.hermitian_part();
    let mut obj = Objective { rho: &rho, evaluations: 0 };
    let candidates = coarse_candidates(&mut obj, opts);
    let grid_evaluations = obj.evaluations;

    let runs: Vec<(f64, [f64; DIM], usize)> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let start = match candidates.get(k) {
                Some(&(_, x)) => x,
                None => {
                    let mut x = [0.0; DIM];
                    x[0] = rng.gen_range(0.0..PI);
                    x[1] = rng.gen_range(0.0..2.0 * PI);
                    x[2] = rng.gen_range(0.0..=1.0);
                    for v in &mut x[3..] {
                        *v = rng.gen_range(-0.5..0.5);
                    }
                    x
                }
            };
            refine(&rho, start, opts, &mut rng)
        })
        .collect();

    let evaluations = grid_evaluations + runs.iter().map(|r| r.2).sum::<usize>();
    let (value, x, _) = runs
        .into_iter()
        .fold(None::<(f64, [f64; DIM], usize)>, |acc, r| match acc {
            Some(a) if a.0 <= r.0 => Some(a),
            _ => Some(r),
        })
        .expect("at least one restart");
    Ok(OracleResult {
        value,
        best: CqParams::from_point(&x),
        restarts: opts.restarts,
        evaluations,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::tdd_x;
    use crate::states::{mmm_state, random_x_state, MmmParams, XState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn random_cq(rng: &mut ChaCha8Rng) -> CqParams {
        let ball = |rng: &mut ChaCha8Rng| loop {
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if norm3(&v) <= 1.0 {
                return v;
            }
        };
        let mut x = [0.0; DIM];
        x[0] = rng.gen_range(0.0..PI);
        x[1] = rng.gen_range(0.0..2.0 * PI);
        let n = CqParams::from_point(&x).n;
        CqParams::new(n, rng.gen_range(0.0..=1.0), ball(rng), ball(rng)).unwrap()
    }

    #[test]
    fn cq_state_examples() {
        let z = [0.0, 0.0, 1.0];
        let mixed = cq_state(&CqParams::new(z, 0.5, [0.0; 3], [0.0; 3]).unwrap());
        assert!(mixed.max_abs_diff(&ComplexMatrix4::from_diagonal([0.25; 4])) <= 1e-15);
        let pure = cq_state(&CqParams::new(z, 1.0, z, [0.0; 3]).unwrap());
        assert!(pure.max_abs_diff(&ComplexMatrix4::from_diagonal([1.0, 0.0, 0.0, 0.0])) <= 1e-15);
        assert!(CqParams::new([1.0, 1.0, 0.0], 0.5, [0.0; 3], [0.0; 3]).is_err());
        assert!(CqParams::new(z, 1.5, [0.0; 3], [0.0; 3]).is_err());
        assert!(CqParams::new(z, 0.5, [1.0, 1.0, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn physicality_examples() {
        let mixed = ComplexMatrix4::from_diagonal([0.25; 4]);
        assert!(check_physical(&mixed, 1e-12).is_physical());
        let bad = ComplexMatrix4::from_diagonal([0.6, 0.6, -0.1, -0.1]);
        let r = check_physical(&bad, 1e-9);
        assert!(!r.is_within(1e-9));
        assert_abs_diff_eq!(r.min_eigenvalue, -0.1, epsilon = 1e-15);
        assert!(r.trace_deviation <= 1e-15);
        let mut nan = mixed;
        nan[(0, 0)] = c(f64::NAN);
        assert!(!check_physical(&nan, 1.0).is_within(1.0));
    }

    #[test]
    fn bruteforce_examples() {
        let opts = MinimizeOptions::default();
        let mixed = ComplexMatrix4::from_diagonal([0.25; 4]);
        assert!(tdd_bruteforce(&mixed, &opts).unwrap().value <= 1e-6);

        let bell = XState::new([0.5, 0.0, 0.0, 0.5], c(0.5), c(0.0)).unwrap();
        let r = tdd_bruteforce(&bell.to_matrix(), &opts).unwrap();
        assert!(r.value >= 1.0 - 1e-6 && r.value <= 1.0 + 5e-3, "{}", r.value);

        let s = mmm_state(&MmmParams::initial(0.6, -0.5, 0.2).unwrap()).unwrap();
        assert_abs_diff_eq!(tdd_x(&s), 0.5, epsilon = 1e-15);
        let r = tdd_bruteforce(&s.to_matrix(), &opts).unwrap();
        assert!(r.value >= 0.5 - 1e-6 && r.value <= 0.5 + 5e-3, "{}", r.value);

        let bad = ComplexMatrix4::from_diagonal([0.6, 0.6, -0.1, -0.1]);
        assert!(matches!(tdd_bruteforce(&bad, &opts), Err(OracleError::NotPhysical(_))));
        let zero = MinimizeOptions { restarts: 0, ..opts };
        assert!(matches!(tdd_bruteforce(&mixed, &zero), Err(OracleError::Options { .. })));
    }

    #[test]
    fn zero_discord_self_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let q = random_cq(&mut rng);
            let r = tdd_bruteforce(&cq_state(&q), &MinimizeOptions::default()).unwrap();
            assert!(r.value <= 1e-4, "{q:?}: {}", r.value);
        }
    }

    #[test]
    fn bruteforce_brackets_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let s = random_x_state(&mut rng);
            let r = tdd_bruteforce(&s.to_matrix(), &MinimizeOptions::default()).unwrap();
            let gap = r.value - tdd_x(&s);
            assert!((-1e-6..=5e-3).contains(&gap), "{s:?}: gap {gap}");
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let s = random_x_state(&mut rng);
        let opts = MinimizeOptions { seed: 99, ..Default::default() };
        let a = tdd_bruteforce(&s.to_matrix(), &opts).unwrap();
        let b = tdd_bruteforce(&s.to_matrix(), &opts).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cq_states_are_density_matrices(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = cq_state(&random_cq(&mut rng));
            prop_assert!(check_physical(&rho, 1e-12).is_within(1e-12));
        }
    }
}
