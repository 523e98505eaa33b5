//! Two-qubit X states and the state families built on them.
//!
//! An X state is nonzero only on the diagonal and anti-diagonal of the
//! computational basis, so it is fully described by four populations and
//! the two coherences `rho14` and `rho23`.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::qmat::{Complex, ComplexMatrix4, RealMatrix3, RealVector3};

/// Validation tolerance for freshly constructed states.
pub const STATE_TOL: f64 = 1e-12;

/// Validation tolerance for states produced by long time evolution.
pub const EVOLVED_STATE_TOL: f64 = 1e-9;

/// Which anti-diagonal coherence a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coherence {
    /// `rho14`, bounded by `rho11 * rho44`.
    Outer,
    /// `rho23`, bounded by `rho22 * rho33`.
    Inner,
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coherence::Outer => f.write_str("rho11*rho44 >= |rho14|^2"),
            Coherence::Inner => f.write_str("rho22*rho33 >= |rho23|^2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state has a non-finite element")]
    NonFinite,
    #[error("populations sum to {trace}, not 1 (deviation {deviation:e})")]
    Trace { trace: f64, deviation: f64 },
    #[error("population rho{index}{index} = {value:e} is negative")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("constraint {which} violated: product {product:e} < modulus^2 {modulus_sq:e} (margin {margin:e})")]
    CoherenceBound { which: Coherence, product: f64, modulus_sq: f64, margin: f64 },
    #[error("parameter {name} = {value} outside {range}")]
    Parameter { name: &'static str, value: f64, range: &'static str },
}

/// A two-qubit X state.
///
/// Constructed either through [`XState::new`], which enforces unit trace,
/// non-negative populations and the two coherence bounds, or through
/// [`XState::formal`], which only enforces unit trace. Formal states exist
/// because several published parameter sets lie outside the physical region
/// while still defining meaningful correlation curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    diag: [f64; 4],
    rho14: Complex,
    rho23: Complex,
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl XState {
    /// Validated constructor with the default tolerance.
    pub fn new(diag: [f64; 4], rho14: Complex, rho23: Complex) -> Result<Self, StateError> {
        Self::with_tolerance(diag, rho14, rho23, STATE_TOL)
    }

    pub fn with_tolerance(
        diag: [f64; 4],
        rho14: Complex,
        rho23: Complex,
        tol: f64,
    ) -> Result<Self, StateError> {
        let s = Self::formal_with_tolerance(diag, rho14, rho23, tol)?;
        s.check_physical(tol)?;
        Ok(s)
    }

    /// Unit-trace X matrix without the positivity constraints.
    pub fn formal(diag: [f64; 4], rho14: Complex, rho23: Complex) -> Result<Self, StateError> {
        Self::formal_with_tolerance(diag, rho14, rho23, STATE_TOL)
    }

    fn formal_with_tolerance(
        diag: [f64; 4],
        rho14: Complex,
        rho23: Complex,
        tol: f64,
    ) -> Result<Self, StateError> {
        if !diag.iter().all(|x| x.is_finite()) || !finite(rho14) || !finite(rho23) {
            return Err(StateError::NonFinite);
        }
        let trace: f64 = diag.iter().sum();
        let deviation = (trace - 1.0).abs();
        if deviation > tol {
            return Err(StateError::Trace { trace, deviation });
        }
        Ok(Self { diag, rho14, rho23 })
    }

    /// Assembles a state whose trace is known to be correct by construction.
    pub(crate) fn from_parts(diag: [f64; 4], rho14: Complex, rho23: Complex) -> Self {
        Self { diag, rho14, rho23 }
    }

    /// Checks non-negative populations and both coherence bounds.
    pub fn check_physical(&self, tol: f64) -> Result<(), StateError> {
        for (i, &p) in self.diag.iter().enumerate() {
            if p < -tol {
                return Err(StateError::NegativeDiagonal { index: i + 1, value: p });
            }
        }
        let [r11, r22, r33, r44] = self.diag;
        for (which, product, coh) in [
            (Coherence::Outer, r11 * r44, self.rho14),
            (Coherence::Inner, r22 * r33, self.rho23),
        ] {
            let modulus_sq = coh.norm_sqr();
            let margin = product - modulus_sq;
            if margin < -tol {
                return Err(StateError::CoherenceBound { which, product, modulus_sq, margin });
            }
        }
        Ok(())
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.check_physical(tol).is_ok()
    }

    /// Populations `[rho11, rho22, rho33, rho44]`.
    pub fn diagonals(&self) -> [f64; 4] {
        self.diag
    }

    pub fn rho11(&self) -> f64 {
        self.diag[0]
    }

    pub fn rho22(&self) -> f64 {
        self.diag[1]
    }

    pub fn rho33(&self) -> f64 {
        self.diag[2]
    }

    pub fn rho44(&self) -> f64 {
        self.diag[3]
    }

    pub fn rho14(&self) -> Complex {
        self.rho14
    }

    pub fn rho23(&self) -> Complex {
        self.rho23
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn to_matrix(&self) -> ComplexMatrix4 {
        let mut m = ComplexMatrix4::from_diagonal(self.diag);
        m[(0, 3)] = self.rho14;
        m[(3, 0)] = self.rho14.conj();
        m[(1, 2)] = self.rho23;
        m[(2, 1)] = self.rho23.conj();
        m
    }

    /// Eigenvalues of the two 2x2 blocks, in decreasing order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let block = |a: f64, b: f64, c: Complex| {
            let mean = 0.5 * (a + b);
            let half = 0.5 * (a - b);
            let r = (half * half + c.norm_sqr()).sqrt();
            [mean + r, mean - r]
        };
        let [r11, r22, r33, r44] = self.diag;
        let [a, b] = block(r11, r44, self.rho14);
        let [c, d] = block(r22, r33, self.rho23);
        let mut ev = [a, b, c, d];
        ev.sort_by(|x, y| y.total_cmp(x));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }
}

/// Removes the coherence phases with a local unitary: `rho14 -> |rho14|`,
/// `rho23 -> |rho23|`.
pub fn to_real_form(s: &XState) -> XState {
    XState {
        diag: s.diag,
        rho14: Complex::new(s.rho14.norm(), 0.0),
        rho23: Complex::new(s.rho23.norm(), 0.0),
    }
}

/// Bloch representation `rho = (I⊗I + x·σ⊗I + I⊗y·σ + Σ T_ij σ_i⊗σ_j) / 4`
/// of the real form of an X state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub x: RealVector3,
    pub y: RealVector3,
    pub t: RealMatrix3,
}

impl BlochForm {
    /// `(tau1, tau2, tau3)`, the diagonal of the correlation matrix.
    pub fn taus(&self) -> [f64; 3] {
        [self.t[0][0], self.t[1][1], self.t[2][2]]
    }
}

pub fn bloch_decompose(s: &XState) -> BlochForm {
    let [r11, r22, r33, r44] = s.diag;
    let a14 = s.rho14.norm();
    let a23 = s.rho23.norm();
    let mut t = [[0.0; 3]; 3];
    t[0][0] = 2.0 * (a23 + a14);
    t[1][1] = 2.0 * (a23 - a14);
    t[2][2] = 2.0 * (r11 + r44) - 1.0;
    BlochForm {
        x: [0.0, 0.0, 2.0 * (r11 + r22) - 1.0],
        y: [0.0, 0.0, 2.0 * (r11 + r33) - 1.0],
        t,
    }
}

/// Maximally-mixed-marginal X state parameters: correlation coefficients
/// `c1, c2, c3` and the complex decoherence factors `d1, d2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmmParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub d1: Complex,
    pub d2: Complex,
}

impl MmmParams {
    pub fn new(c1: f64, c2: f64, c3: f64, d1: Complex, d2: Complex) -> Result<Self, StateError> {
        for (name, c) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !c.is_finite() || c.abs() > 1.0 {
                return Err(StateError::Parameter { name, value: c, range: "[-1, 1]" });
            }
        }
        for (name, d) in [("|d1|", d1), ("|d2|", d2)] {
            if !finite(d) || d.norm() > 1.0 + STATE_TOL {
                return Err(StateError::Parameter { name, value: d.norm(), range: "[0, 1]" });
            }
        }
        Ok(Self { c1, c2, c3, d1, d2 })
    }

    /// Undecohered parameters, `d1 = d2 = 1`.
    pub fn initial(c1: f64, c2: f64, c3: f64) -> Result<Self, StateError> {
        let one = Complex::new(1.0, 0.0);
        Self::new(c1, c2, c3, one, one)
    }

    pub fn with_factors(&self, d1: Complex, d2: Complex) -> Result<Self, StateError> {
        Self::new(self.c1, self.c2, self.c3, d1, d2)
    }

    fn elements(&self) -> ([f64; 4], Complex, Complex) {
        let p = (1.0 + self.c3) / 4.0;
        let q = (1.0 - self.c3) / 4.0;
        (
            [p, q, q, p],
            self.d1 * ((self.c1 - self.c2) / 4.0),
            self.d2 * ((self.c1 + self.c2) / 4.0),
        )
    }
}

/// The MMM X state; rejects parameter combinations outside the physical region.
pub fn mmm_state(p: &MmmParams) -> Result<XState, StateError> {
    let (diag, r14, r23) = p.elements();
    XState::new(diag, r14, r23)
}

/// The MMM X state matrix without the positivity constraints.
pub fn mmm_state_formal(p: &MmmParams) -> Result<XState, StateError> {
    let (diag, r14, r23) = p.elements();
    XState::formal(diag, r14, r23)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// `cos(θ/2)|01> + sin(θ/2) e^{iφ}|10>`
    Psi,
    /// `cos(θ/2)|00> + sin(θ/2) e^{iφ}|11>`
    Phi,
}

/// Extended Werner-like state `(1-r) I/4 + r |ξ><ξ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwlParams {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub kind: BellKind,
}

impl EwlParams {
    pub fn new(kind: BellKind, r: f64, theta: f64, phi: f64) -> Result<Self, StateError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(StateError::Parameter { name: "r", value: r, range: "[0, 1]" });
        }
        if !(0.0..PI).contains(&theta) {
            return Err(StateError::Parameter { name: "theta", value: theta, range: "[0, pi)" });
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(StateError::Parameter { name: "phi", value: phi, range: "[0, 2pi)" });
        }
        Ok(Self { r, theta, phi, kind })
    }
}

pub fn ewl_state(p: &EwlParams) -> XState {
    let a = (1.0 - p.r) / 4.0;
    let half = p.theta / 2.0;
    let hi = a + p.r * half.cos().powi(2);
    let lo = a + p.r * half.sin().powi(2);
    let coh = Complex::from_polar(p.r / 2.0 * p.theta.sin(), -p.phi);
    let zero = Complex::new(0.0, 0.0);
    let (diag, r14, r23) = match p.kind {
        BellKind::Psi => ([a, hi, lo, a], zero, coh),
        BellKind::Phi => ([hi, a, a, lo], coh, zero),
    };
    XState::new(diag, r14, r23).expect("EWL parameters always give a physical state")
}

/// Samples a physical X state: populations uniform on the simplex, coherence
/// moduli uniform up to their bounds, phases uniform.
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> XState {
    let mut cuts = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
    cuts.sort_by(f64::total_cmp);
    let diag = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
    let m14 = rng.gen::<f64>() * (diag[0] * diag[3]).sqrt();
    let m23 = rng.gen::<f64>() * (diag[1] * diag[2]).sqrt();
    let rho14 = Complex::from_polar(m14, rng.gen_range(0.0..2.0 * PI));
    let rho23 = Complex::from_polar(m23, rng.gen_range(0.0..2.0 * PI));
    XState::new(diag, rho14, rho23).expect("sampler respects the X-state constraints")
}

/// Samples `(c1, c2, c3)` uniformly from the physical tetrahedron, with
/// `d1 = d2 = 1`.
pub fn random_mmm_params<R: Rng + ?Sized>(rng: &mut R) -> MmmParams {
    loop {
        let c = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        let p = MmmParams::initial(c[0], c[1], c[2]).expect("coefficients drawn in range");
        if mmm_state(&p).is_ok() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{expectation, partial_trace, pauli_tensor, Pauli, Subsystem, HERMITIAN_TOL};
    use crate::qmat::{hermitian_eigenvalues, ComplexMatrix2};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn constructor_examples() {
        let mixed = XState::new([0.25; 4], c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(mixed.trace(), 1.0);

        let bell = XState::new([0.5, 0.0, 0.0, 0.5], c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(bell.rho14(), c(0.5, 0.0));

        let err = XState::new([0.5, 0.0, 0.0, 0.5], c(0.6, 0.0), c(0.0, 0.0)).unwrap_err();
        match err {
            StateError::CoherenceBound { which, product, modulus_sq, margin } => {
                assert_eq!(which, Coherence::Outer);
                assert_eq!(product, 0.25);
                assert_abs_diff_eq!(modulus_sq, 0.36, epsilon = 1e-15);
                assert_abs_diff_eq!(margin, -0.11, epsilon = 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constructor_rejections() {
        assert!(matches!(
            XState::new([0.3, 0.3, 0.3, 0.3], c(0.0, 0.0), c(0.0, 0.0)),
            Err(StateError::Trace { .. })
        ));
        assert!(matches!(
            XState::new([0.6, -0.1, 0.25, 0.25], c(0.0, 0.0), c(0.0, 0.0)),
            Err(StateError::NegativeDiagonal { index: 2, .. })
        ));
        assert!(matches!(
            XState::new([0.25, 0.25, 0.25, 0.25], c(0.0, 0.0), c(f64::NAN, 0.0)),
            Err(StateError::NonFinite)
        ));
        // Looser tolerance for evolved states.
        let slightly_off = [0.25, 0.25, 0.25, 0.25 + 1e-10];
        assert!(XState::new(slightly_off, c(0.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(XState::with_tolerance(slightly_off, c(0.0, 0.0), c(0.0, 0.0), EVOLVED_STATE_TOL).is_ok());
    }

    #[test]
    fn real_form_examples() {
        let s = XState::new([0.3, 0.2, 0.2, 0.3], c(0.1, 0.0), c(0.15, 0.0)).unwrap();
        assert_eq!(to_real_form(&s), s);

        let rho14 = Complex::from_polar(0.3, PI / 3.0);
        let s = XState::new([0.4, 0.1, 0.1, 0.4], rho14, c(0.0, 0.0)).unwrap();
        let r = to_real_form(&s);
        assert_abs_diff_eq!(r.rho14().re, 0.3, epsilon = 1e-15);
        assert_eq!(r.rho14().im, 0.0);
        assert_eq!(r.diagonals(), s.diagonals());
    }

    #[test]
    fn bloch_examples() {
        let mixed = XState::new([0.25; 4], c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let b = bloch_decompose(&mixed);
        assert_eq!(b.x, [0.0; 3]);
        assert_eq!(b.y, [0.0; 3]);
        assert_eq!(b.t, [[0.0; 3]; 3]);

        let bell = XState::new([0.5, 0.0, 0.0, 0.5], c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        let b = bloch_decompose(&bell);
        assert_eq!(b.x[2], 0.0);
        assert_eq!(b.y[2], 0.0);
        assert_eq!(b.taus(), [1.0, -1.0, 1.0]);

        // MMM at t = 0: tau = (|c1+c2|/2 + |c1-c2|/2, |c1+c2|/2 - |c1-c2|/2, c3).
        let p = MmmParams::initial(0.3, -0.2, 0.4).unwrap();
        let b = bloch_decompose(&mmm_state(&p).unwrap());
        let [t1, t2, t3] = b.taus();
        assert_abs_diff_eq!(t1, 0.05 + 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t2, 0.05 - 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t3, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn bloch_matches_pauli_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = random_x_state(&mut rng);
            let real = to_real_form(&s).to_matrix();
            let b = bloch_decompose(&s);
            let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
            for (i, &pi) in paulis.iter().enumerate() {
                let xi = expectation(&real, &pauli_tensor(pi, Pauli::I));
                let yi = expectation(&real, &pauli_tensor(Pauli::I, pi));
                assert!((xi.re - b.x[i]).abs() <= 1e-12 && xi.im.abs() <= 1e-12);
                assert!((yi.re - b.y[i]).abs() <= 1e-12);
                for (j, &pj) in paulis.iter().enumerate() {
                    let tij = expectation(&real, &pauli_tensor(pi, pj));
                    assert!((tij.re - b.t[i][j]).abs() <= 1e-12, "T{i}{j}");
                }
            }
            assert!(b.taus()[0].abs() >= b.taus()[1].abs());
        }
    }

    #[test]
    fn mmm_examples() {
        let bell = mmm_state(&MmmParams::initial(1.0, -1.0, 1.0).unwrap()).unwrap();
        assert_eq!(bell.diagonals(), [0.5, 0.0, 0.0, 0.5]);
        assert_eq!(bell.rho14(), c(0.5, 0.0));
        assert_eq!(bell.rho23(), c(0.0, 0.0));

        let mixed = mmm_state(&MmmParams::initial(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(mixed.diagonals(), [0.25; 4]);

        // The Fig. 1(b) caption triple is outside the physical region: the
        // element formulas still hold but the strict constructor refuses it.
        let p = MmmParams::initial(0.4, 0.8, 0.4).unwrap();
        let formal = mmm_state_formal(&p).unwrap();
        let [r11, r22, r33, r44] = formal.diagonals();
        assert_abs_diff_eq!(r11, 0.35, epsilon = 1e-15);
        assert_abs_diff_eq!(r44, 0.35, epsilon = 1e-15);
        assert_abs_diff_eq!(r22, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(r33, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(formal.rho14().re, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(formal.rho23().re, 0.3, epsilon = 1e-15);
        assert!(matches!(
            mmm_state(&p),
            Err(StateError::CoherenceBound { which: Coherence::Inner, .. })
        ));

        // c3 = 1 forces rho22 = rho33 = 0, so rho23 must vanish.
        let p = MmmParams::initial(0.5, 0.5, 1.0).unwrap();
        assert!(mmm_state(&p).is_err());
        assert!(MmmParams::initial(1.2, 0.0, 0.0).is_err());
        assert!(MmmParams::new(0.1, 0.1, 0.1, c(1.1, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn ewl_examples() {
        let bell = ewl_state(&EwlParams::new(BellKind::Psi, 1.0, PI / 2.0, 0.0).unwrap());
        let [r11, r22, r33, r44] = bell.diagonals();
        assert_abs_diff_eq!(r11, 0.0);
        assert_abs_diff_eq!(r44, 0.0);
        assert_abs_diff_eq!(r22, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r33, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.rho23().re, 0.5, epsilon = 1e-15);

        let mixed = ewl_state(&EwlParams::new(BellKind::Psi, 0.0, 1.0, 2.0).unwrap());
        assert_eq!(mixed.diagonals(), [0.25; 4]);
        assert_eq!(mixed.rho23().norm(), 0.0);

        assert!(EwlParams::new(BellKind::Psi, 1.1, 0.0, 0.0).is_err());
        assert!(EwlParams::new(BellKind::Psi, 0.5, PI, 0.0).is_err());
        assert!(EwlParams::new(BellKind::Psi, 0.5, 0.0, 2.0 * PI).is_err());

        // Phase convention: rho23 = (r/2) sin(theta) e^{-i phi}.
        let s = ewl_state(&EwlParams::new(BellKind::Psi, 0.5, PI / 2.0, PI / 2.0).unwrap());
        assert_abs_diff_eq!(s.rho23().im, -0.25, epsilon = 1e-15);
    }

    #[test]
    fn eigenvalues_closed_form_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let s = random_x_state(&mut rng);
            let jac = hermitian_eigenvalues(&s.to_matrix(), HERMITIAN_TOL).unwrap();
            for (a, b) in s.eigenvalues().iter().zip(&jac) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-13);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn mmm_marginals_are_maximally_mixed(seed in any::<u64>(), a1 in 0.0..1.0f64, a2 in 0.0..1.0f64, p1 in 0.0..TAU, p2 in 0.0..TAU) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_mmm_params(&mut rng)
                .with_factors(Complex::from_polar(a1, p1), Complex::from_polar(a2, p2))
                .unwrap();
            let s = mmm_state(&p).unwrap();
            let half = ComplexMatrix2::identity().scale(c(0.5, 0.0));
            for sub in [Subsystem::A, Subsystem::B] {
                prop_assert!(partial_trace(&s.to_matrix(), sub).max_abs_diff(&half) <= 1e-12);
            }
            let b = bloch_decompose(&s);
            prop_assert_eq!(b.x[2], 0.0);
            prop_assert_eq!(b.y[2], 0.0);
        }

        #[test]
        fn real_form_preserves_spectrum(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_x_state(&mut rng);
            let r = to_real_form(&s);
            prop_assert_eq!(r.diagonals(), s.diagonals());
            prop_assert!((r.rho14().norm() - s.rho14().norm()).abs() <= 1e-12);
            prop_assert!((r.rho23().norm() - s.rho23().norm()).abs() <= 1e-12);
            let a = hermitian_eigenvalues(&s.to_matrix(), HERMITIAN_TOL).unwrap();
            let b = hermitian_eigenvalues(&r.to_matrix(), HERMITIAN_TOL).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn ewl_psi_and_phi_share_spectrum(r in 0.0..=1.0f64, theta in 0.0..PI, phi in 0.0..TAU) {
            let psi = ewl_state(&EwlParams::new(BellKind::Psi, r, theta, phi).unwrap());
            let phi_state = ewl_state(&EwlParams::new(BellKind::Phi, r, theta, phi).unwrap());
            for (x, y) in psi.eigenvalues().iter().zip(&phi_state.eigenvalues()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn sampler_emits_valid_states(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let s = random_x_state(&mut rng);
                prop_assert!(s.is_physical(STATE_TOL));
                prop_assert!(s.min_eigenvalue() >= -1e-12);
            }
        }
    }
}
