//! Discrete analytic function theory on rhombic quad-graphs.
//!
//! Two classical discretizations of complex analysis live on bipartite
//! quad-graphs: a linear one built on discrete Cauchy-Riemann equations with
//! rhombus weights, and a nonlinear one built on circle patterns described by
//! cross-ratio or Hirota equations. On rhombic (isoradial) embeddings both
//! families of equations are multidimensionally consistent, which makes the
//! whole apparatus of integrable systems available: extension of solutions to
//! a lattice `Z^d` (one dimension per edge slope), zero-curvature
//! representations, Bäcklund transformations, and isomonodromic special
//! solutions — a discrete exponential, a discrete logarithm whose real part
//! is the lattice Green's function, and discrete power functions.
//!
//! The crate is organized by subject:
//!
//! - [`graph`] — cell decompositions, quad-graph doubles, strips, and the
//!   combinatorial rhombic-embeddability test.
//! - [`labeling`] — edge labelings, realizations, Cauchy-Riemann weights,
//!   slope data, hulls, sectors, and the lift to `Z^d`.
//! - [`linear`] — discrete Laplacian, Cauchy-Riemann residuals, extension of
//!   holomorphic functions to bricks, the discrete exponential, and contour
//!   reconstruction from axis data.
//! - [`special`] — the discrete logarithm on a branched covering of lattice
//!   octants, Green's function, and discrete power functions.
//! - [`integrability`] — elementary-cube consistency checks, Bäcklund
//!   transformations, transition matrices, zero curvature, and isomonodromy
//!   verification.
//! - [`nonlinear`] — cross-ratio and Hirota systems on quad-graphs and
//!   circle-pattern extraction.
//! - [`linearization`] — discrete derivatives/antiderivatives and tangent
//!   vectors to solution families.
//! - [`tiling`] — square, kagome-dual, and multigrid quasiperiodic patch
//!   generators.
//! - [`document`] — the JSON tiling document and canonical persistence.
//! - [`render`] — deterministic SVG output.
//!
//! Numeric kernels are generic over the floating scalar (see [`num::Scalar`]);
//! the axis recursions are generic over any field so tests can replay them in
//! exact rational arithmetic. `f64` aliases are provided at the crate root.

pub mod error;
pub mod num;

pub mod graph;
pub mod integrability;
pub mod labeling;
pub mod linear;
pub mod linearization;
pub mod nonlinear;
pub mod special;

pub mod document;
pub mod render;
pub mod tiling;

pub use error::{Error, Result};

/// Default floating scalar.
pub type Real = f64;
/// Default complex scalar.
pub type C64 = num_complex::Complex<f64>;
