//! Augmented cones, their dual and one-sided dual cones, and sampling
//! harnesses for the inclusions relating them.

mod ampliation;
mod augmented;
mod hull;
mod one_sided;
pub mod sampling;

pub use ampliation::{ampliation_crosscheck, AmpliationReport, PredicateResult, Side};
pub use augmented::{in_cone, in_dual, in_ldual, in_rdual, AugmentedCone, Closure, Cone, ConeJson};
pub use hull::{in_smallest_lmc, in_smallest_rmc};
pub use one_sided::{check_one_sided_equivalences, find_nonpositive_dual_member, CheckResult, EquivalenceReport};
