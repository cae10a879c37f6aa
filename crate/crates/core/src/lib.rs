//! Transport simulation for quantum dots under continuous charge detection.
//!
//! The crate builds the rate/Bloch-equation generators for a single dot or a
//! coupled double dot measured by a nearby single-electron detector, evolves
//! density vectors under them, solves for stationary states, and provides the
//! closed-form reference currents together with the detector-traced reduction
//! of the full system. Units: `hbar = e = 1`; rates and energies in units of
//! a reference width `Gamma0`; currents in `e * Gamma0`.

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod models;
pub mod observables;
pub mod reduction;

pub use error::{Error, Result};
pub use models::{
    build_double_dot, build_double_dot_detector, build_reduced_double_dot,
    build_single_dot_detector, classify_regime, classify_regime_energies, DetectorRegime,
    DoubleDotDetectorParams, DoubleDotParams, EnergyConfig, Liouvillian, ModelKind,
    SingleDotDetectorParams, StateSpace,
};

pub use dynamics::{
    decoherence_rate, default_fit_window, evolve, steady_state, time_grid, DensityVector, Method,
    Trajectory,
};

pub use observables::{accumulated_charge, coherence_envelope, current, Collector, CurrentSpec};

pub use analytics::{dephased_double_dot_dc, double_dot_dc, single_dot_dc};

pub use reduction::{compare_reduction, trace_detector, LadderPoint, ReductionReport};
