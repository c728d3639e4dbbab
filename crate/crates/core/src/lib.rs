//! Numerical calculus of support functions on `S¹` and `S²`: curvature
//! functions, mixed volumes, integral inequalities and soliton flows.

pub mod calculus;
pub mod config;
pub mod error;
pub mod flow;
pub mod grid;
pub mod harmonics;
pub mod inequality;
pub mod integral;
pub mod phi;
pub mod refine;
pub mod report;
pub mod zoo;

pub use calculus::{assemble, BodyGeometry};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowError, FlowOutcome, FlowTrace, ProblemSpec};
pub use grid::{build_grid, build_grid_with, DiffMethod, Grid, Resolution, ScalarField};
pub use report::{CheckKind, SlackReport, SuiteSummary};
pub use zoo::{make_body, BodyKind, BodySpec};
