//! Exact-arithmetic bounds for the obstruction to semistable reduction.
//!
//! Given the numeric reduction data of an abelian variety at a discrete
//! valuation (dimension, residue characteristic, toric and abelian ranks
//! before and after semistable reduction), this crate computes certified
//! divisibility bounds on the finite obstruction group, enumerates the
//! candidate orders compatible with its linear-algebra constraints, and
//! reports which kinds of field extension can remove the obstruction.
//!
//! The supporting machinery is general and exposed in its own right:
//!
//! - [`snf`]: Smith normal form, kernels and saturation over Z, Z_(ell)
//!   and Z/ell^k, with one elimination loop routed through [`ring::LocalRing`];
//! - [`pairing`]: perfect bilinear forms on lattices, orthogonal
//!   complements, induced quotient pairings, and the inductive
//!   perfectization of an invariant form;
//! - [`group`]: finite matrix groups from generators, averaging
//!   idempotents, and equivariant splittings at finite ell-adic precision;
//! - [`classical`]: element-order criteria for general linear and
//!   symplectic groups over prime fields, their order formulas, cyclotomic
//!   factor profiles, and brute-force spectrum oracles that keep the
//!   criteria honest;
//! - [`bounds`]: the bound pipeline itself;
//! - [`verify`]: the oracle suites wiring the cheap and expensive routes
//!   against each other.
//!
//! Every computation is exact: arbitrary-precision integers and rationals
//! throughout, with finite quotients Z/ell^k where an ell-adic limit cannot
//! be represented finitely. No floating point anywhere.

pub mod arith;
pub mod bounds;
pub mod classical;
pub mod error;
pub mod factored;
pub mod group;
pub mod matrix;
pub mod pairing;
pub mod ring;
pub mod snf;
pub mod verify;

pub use bounds::{BoundReport, ReductionData, ReportOptions};
pub use error::{Error, Result};
pub use factored::FactoredInt;
pub use matrix::Mat;
pub use ring::LocalRing;
pub use snf::SnfDecomposition;
