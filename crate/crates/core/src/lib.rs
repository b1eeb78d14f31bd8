//! Finite-volume Poisson solver whose discrete solution lives in the reduced
//! discontinuous Galerkin (RDG) space: the trial functions are even-degree
//! polynomials reconstructed from cell averages on a centered stencil, the test
//! functions are cell indicators.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: uniform Cartesian meshes on the unit square/interval with a ghost layer.
//! - [`basis`]: exact rational polynomials, Lagrange stencil bases, Gauss rules.
//! - [`reconstruction`]: stencil weight operators, ghost filling, field evaluation.
//! - [`coeff_oracle`]: exact verifier for the flux-coefficient identities.
//! - [`assembly`]: Petrov–Galerkin system assembly (Dirichlet and periodic).
//! - [`linsolve`]: sparse direct and Krylov solvers.
//! - [`norms`]: L², broken H¹, sip, sip,* and |·|₁,ₕ error measures.
//! - [`problems`] and [`study`]: manufactured solutions and convergence studies.

pub mod assembly;
pub mod basis;
pub mod coeff_oracle;
mod error;
pub mod linsolve;
pub mod mesh;
pub mod norms;
pub mod problems;
pub mod properties;
pub mod rational;
pub mod reconstruction;
pub mod study;

pub use assembly::{apply_operator, assemble, rhs_only, PeriodicForm, SchemeConfig, SparseSystem};
pub use basis::{gauss_rule, lagrange_basis, legendre_moment, QuadratureRule, RationalPoly};
pub use error::{Error, Result};
pub use linsolve::{residual, solve, SolveMethod, SolveOptions, SolveReport};
pub use mesh::{build_mesh, CartesianMesh, Face, MultiIndex};
pub use norms::ErrorReport;
pub use rational::Rational;
pub use reconstruction::{
    derivative_flux_coeffs, AvgField, Bc, FluxCoefficients, GhostRule, Reconstruction, StencilKind,
    StencilOperator,
};
