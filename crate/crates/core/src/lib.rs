//! Exact dimensional analysis.
//!
//! Quantities carry a floating-point magnitude (stored as a logarithm) and an
//! exact rational dimension vector. All linear algebra over dimensions is done
//! in exact rational arithmetic, so ranks, kernels and bases are never subject
//! to rounding.
//!
//! * [`exactlin`]: rational matrices, RREF, kernels, solving and inversion.
//! * [`quantity`]: dimension systems, dimensioned quantities and monomial maps.
//! * [`units`]: unit registries, consistency checks and expressing units in a base.
//! * [`pigroups`]: pi-group bases, the special basis and transition matrices.
//! * [`nondim`]: pi values, equivalence, canonical representatives and
//!   nondimensionalized relations.
//! * [`dsl`]: the text syntax for dimensions, quantities and relations.
//! * [`harness`]: randomized invariance testing and an independent
//!   equivalence oracle.
//! * [`cli`]: the `piforge` command line.

pub mod cli;
pub mod dsl;
pub mod exactlin;
pub mod harness;
pub mod nondim;
pub mod pigroups;
pub mod quantity;
pub mod units;
