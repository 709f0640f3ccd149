//! G2-structure flow engine.
//!
//! Exterior calculus on 7-dimensional Lie frames, G2 torsion and Bryant's
//! Ricci formula, Koszul curvature, the four reduced geometric flows on the
//! contact Calabi-Yau and Heisenberg ansätze, their closed-form solutions,
//! an adaptive integrator and singularity classification.

pub mod closedform;
pub mod error;
pub mod exterior;
pub mod flows;
pub mod g2;
pub mod leviciv;
pub mod linalg;
pub mod odeint;
pub mod reference;
pub mod scalar;
pub mod symbolic;

pub use closedform::{
    classify, classify_profile, closed_solution, ClosedSolution, Horizon, SingularityReport,
    SingularityType,
};
pub use error::{Error, Result};
pub use exterior::{Array, FrameAlgebra, KForm, Metric, Sym2, Tensor2, Vector};
pub use flows::{
    reduce_to_ode, symbolic_ansatz, AnsatzKind, DiagnosticSample, Diagnostics, FlowKind, ODESystem,
};
pub use g2::G2Data;
pub use odeint::{integrate, sweep, Output, Settings, Termination, Trajectory};
pub use reference::{verify, Check, Status, VerifyReport};
pub use scalar::{q, Rational, Scalar};
pub use symbolic::{Laurent, Param};
