//! Numerical laboratory for the energy density of Brody curves.
//!
//! A Brody curve is an entire holomorphic map `ℂ → ℂPᴺ` whose spherical
//! derivative is bounded by one.  The moduli space of such curves carries a
//! translation action of the plane, and its mean dimension equals
//! `2(N+1)·ρ(ℂPᴺ)` where `ρ` is the supremal energy density.  This crate
//! implements the computational side of that story at desk scale:
//!
//! * projective-space geometry, curve evaluation and spherical derivatives
//!   ([`geometry`], [`curve`]),
//! * energy and energy-density quadrature ([`energy`]),
//! * Weierstrass elliptic functions for doubly periodic curves ([`lattice`]),
//! * a spectral Helmholtz toolkit on flat tori and the Chern-integral
//!   dimension count ([`pde`]),
//! * the quantitative blow-up / resolution procedure ([`blowup`]),
//! * separated-set and covering machinery with entropy-at-scale estimates
//!   ([`entropy`]),
//! * a derivative-free search for certified lower bounds on `ρ(ℂPᴺ)`
//!   ([`rho`]).
//!
//! The companion `book/` directory walks through the concepts with runnable
//! snippets; those snippets double as doctests of this crate.

pub mod blowup;
pub mod curve;
pub mod domain;
pub mod energy;
pub mod entropy;
pub mod error;
pub mod field;
pub mod geometry;
pub mod lattice;
pub mod pde;
pub mod poly;
pub mod rho;

pub use curve::HoloCurve;
pub use domain::Domain;
pub use error::{BrodyError, Result};
pub use field::ScalarField;
pub use geometry::ProjectivePoint;
pub use lattice::PlaneLattice;
