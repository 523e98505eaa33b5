//! Exact dynamics of trace-distance discord (TDD) and concurrence for two
//! dipole-dipole coupled qubits under independent dephasing reservoirs.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmat`]: fixed-size complex linear algebra (Jacobi eigensolver, trace
//!   norm, square root, partial trace, Pauli products).
//! * [`states`]: validated two-qubit X states and the state families used
//!   throughout (maximally-mixed-marginal, extended Werner-like).
//! * [`correlations`]: closed-form TDD and Wootters concurrence.
//! * [`dynamics`]: the exact dephasing propagator and trajectory sampling.
//! * [`analysis`]: regimes, analytic transition times, kink and plateau
//!   detection on sampled series.
//! * [`oracle`]: brute-force TDD by direct minimisation over
//!   classical-quantum states, used to cross-check the closed forms.

pub mod analysis;
pub mod correlations;
pub mod dynamics;
pub mod oracle;
pub mod qmat;
pub mod states;

pub use analysis::{classify_regime, detect_events, EventOptions, EventReport, Plateau, Regime};
pub use correlations::{concurrence_general, concurrence_x, tdd_mmm, tdd_x, TauTriple};
pub use dynamics::{evolve, Decoherence, DephasingModel, FactorModel, Trajectory};
pub use qmat::{Complex, ComplexMatrix2, ComplexMatrix4};
pub use states::{ewl_state, mmm_state, mmm_state_formal, BellKind, EwlParams, MmmParams, XState};
