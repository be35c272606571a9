//! Finite-difference solver for the semiclassical cubic nonlinear
//! Schrödinger equation written in phase/amplitude form.
//!
//! The unknown is a complex amplitude `a` and a velocity `v`. Spatial
//! operators are second-order central differences on a periodic square
//! grid, time stepping is forward Euler with `k ~ h^2`, and after each step
//! the amplitude and velocity are rescaled so that mass and momentum keep
//! their initial values. The discretization does not depend on `eps`, and
//! `eps = 0` gives the symmetrized compressible Euler system.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod phase;
pub mod state;

pub use dynamics::{
    advance, euler_step, evolve, rhs, MomentumRule, Observer, StepControl, Tendency,
};
pub use error::{Error, Result};
pub use experiments::{CaseId, ExperimentCase, SweepResult};
pub use grid::{ComplexField, Grid, ScalarField, VectorField};
pub use phase::{wave_function, PhaseAccumulator};
pub use state::{ConstraintRatios, Invariants, SemiclassicalState};
