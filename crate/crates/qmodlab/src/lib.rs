//! qmodlab: a desk-scale laboratory for the quantum invariants of hyperbolic knots.
//!
//! The library computes Kashaev invariants and their descendants exactly over
//! cyclotomic rings, evaluates the associated state sums and perturbative
//! series to hundreds of digits, sums the divergent series by optimal and
//! smoothed truncation, assembles the matrix-valued cocycle that measures
//! their quantum modularity, and recognizes the resulting numbers as exact
//! algebraic quantities by lattice reduction.
//!
//! Module layering, bottom up:
//!
//! * [`mpcore`]: precision contract, formal power series, special functions.
//! * [`fields`]: exact number-field arithmetic, embeddings, Dedekind sums.
//! * [`knotdb`]: triangulation combinatorics and shape data for the three
//!   resident knots.
//! * [`habiro`]: exact q-series invariants and their evaluation at roots of
//!   unity.
//! * [`statesum`]: cyclic quantum dilogarithms and root-of-unity state sums.
//! * [`perturb`]: perturbative power series attached to flat connections.
//! * [`asymptotics`]: extrapolation of asymptotic expansions and resurgence
//!   coefficient extraction.
//! * [`truncation`]: evaluation of divergent series near their natural rays.
//! * [`modularity`]: the automorphy factors and the matrix cocycle.
//! * [`recognition`]: LLL-based recognition of algebraic numbers and the
//!   arithmetic normalization of series coefficients.

pub mod asymptotics;
pub mod fields;
pub mod habiro;
pub mod knotdb;
pub mod modularity;
pub mod mpcore;
pub mod perturb;
pub mod recognition;
pub mod statesum;
pub mod truncation;
