//! Closed-form correlation quantifiers for two-qubit states.
//!
//! Trace-distance discord is measured on qubit A and uses the trace norm
//! without a factor of one half, so a Bell state has discord 1.

use thiserror::Error;

use crate::oracle::check_physical;
use crate::qmat::{hermitian_eigenvalues, hermitian_sqrt, pauli_tensor, ComplexMatrix4, Pauli};
use crate::states::{bloch_decompose, MmmParams, XState};

/// Tolerance used to validate inputs of [`concurrence_general`].
pub const DENSITY_TOL: f64 = 1e-9;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("input is not a density matrix: Hermiticity deviation {hermiticity:e}, trace deviation {trace:e}, minimum eigenvalue {min_eigenvalue:e} (tolerance {tol:e})")]
    NotPhysical { hermiticity: f64, trace: f64, min_eigenvalue: f64, tol: f64 },
}

/// Diagonal of the correlation matrix of an X state in real form, together
/// with the z component of the Bloch vector of qubit A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauTriple {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub x3: f64,
}

impl TauTriple {
    pub fn of(s: &XState) -> Self {
        let b = bloch_decompose(s);
        let [tau1, tau2, tau3] = b.taus();
        Self { tau1, tau2, tau3, x3: b.x[2] }
    }

    /// `sqrt(tau2^2 + x3^2)`.
    pub fn tau2_prime(&self) -> f64 {
        self.tau2.hypot(self.x3)
    }

    pub fn abs(&self) -> [f64; 3] {
        [self.tau1.abs(), self.tau2.abs(), self.tau3.abs()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Tau1,
    Mixed,
    Tau3,
}

fn branch_value(t: &TauTriple, b: Branch) -> f64 {
    let a1 = t.tau1.abs();
    let a3 = t.tau3.abs();
    match b {
        Branch::Tau1 => a1,
        Branch::Tau3 => a3,
        Branch::Mixed => {
            let delta = (a1 - a3) * (a1 + a3);
            let x2 = t.x3 * t.x3;
            let den = delta + x2;
            debug_assert!(den > 0.0, "branch-2 denominator {den} not positive");
            ((t.tau2 * t.tau2 * delta + t.tau1 * t.tau1 * x2) / den).sqrt()
        }
    }
}

fn select_branch(t: &TauTriple) -> Branch {
    let a1 = t.tau1.abs();
    let a3 = t.tau3.abs();
    if a1 <= a3 {
        Branch::Tau1
    } else if t.tau2_prime() > a3 {
        Branch::Mixed
    } else {
        Branch::Tau3
    }
}

/// Trace-distance discord from the correlation-matrix diagonal.
pub fn tdd_from_taus(t: &TauTriple) -> f64 {
    let branch = select_branch(t);
    let value = branch_value(t, branch);
    if cfg!(debug_assertions) {
        let a1 = t.tau1.abs();
        let a3 = t.tau3.abs();
        let p2 = t.tau2_prime();
        let den = (a1 - a3) * (a1 + a3) + t.x3 * t.x3;
        let holds = [
            (Branch::Tau1, a1 <= a3 + TIE_TOL),
            (Branch::Mixed, a1.min(p2) > a3 - TIE_TOL && den > 0.0),
            (Branch::Tau3, p2 <= a3 + TIE_TOL && a3 < a1 + TIE_TOL),
        ];
        for (b, ok) in holds {
            if ok && b != branch {
                let alt = branch_value(t, b);
                debug_assert!(
                    (alt * alt - value * value).abs() <= 1e-9,
                    "branch tie disagreement: {value} vs {alt} for {t:?}"
                );
            }
        }
    }
    value
}

/// Trace-distance discord of an X state.
pub fn tdd_x(s: &XState) -> f64 {
    tdd_from_taus(&TauTriple::of(s))
}

/// Middle element of three values.
pub fn intermediate(a: f64, b: f64, c: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_by(f64::total_cmp);
    v[1]
}

/// Trace-distance discord of an MMM state: the intermediate of `|tau1|`,
/// `|tau2|`, `|c3|`.
pub fn tdd_mmm(p: &MmmParams) -> f64 {
    let a = ((p.c1 + p.c2) * 0.5 * p.d2).norm();
    let b = ((p.c1 - p.c2) * 0.5 * p.d1).norm();
    intermediate(a + b, (a - b).abs(), p.c3.abs())
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
pub fn concurrence_general(rho: &ComplexMatrix4) -> Result<f64, CorrelationError> {
    let report = check_physical(rho, DENSITY_TOL);
    if !report.is_physical() {
        return Err(CorrelationError::NotPhysical {
            hermiticity: report.hermiticity_deviation,
            trace: report.trace_deviation,
            min_eigenvalue: report.min_eigenvalue,
            tol: DENSITY_TOL,
        });
    }
    let rho = rho.hermitian_part();
    let root = hermitian_sqrt(&rho, DENSITY_TOL).expect("validated density matrix");
    let yy = pauli_tensor(Pauli::Y, Pauli::Y);
    let flipped = (yy * rho.conj()) * yy;
    let r = ((root * flipped) * root).hermitian_part();
    let lambda = hermitian_eigenvalues(&r, DENSITY_TOL).expect("hermitian by construction");
    let s = lambda.map(|x| x.max(0.0).sqrt());
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Closed-form concurrence of an X state.
pub fn concurrence_x(s: &XState) -> f64 {
    let [r11, r22, r33, r44] = s.diagonals();
    let outer = s.rho14().norm() - (r22 * r33).max(0.0).sqrt();
    let inner = s.rho23().norm() - (r11 * r44).max(0.0).sqrt();
    2.0 * outer.max(inner).max(0.0)
}

/// Necessary condition for a sudden transition of entropic discord in MMM
/// states: `c2 = -c1 c3` and `|d1| = |d2|`.
pub fn entropic_freezing_predicate(c1: f64, c2: f64, c3: f64, d1_abs_equals_d2_abs: bool) -> bool {
    (c2 + c1 * c3).abs() <= 1e-12 && d1_abs_equals_d2_abs
}
