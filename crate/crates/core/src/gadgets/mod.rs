//! Instance generators and checkers for the two hardness reductions.

pub mod ov;
pub mod sat;

pub use ov::{
    build_ov_curves, check_parallel_coupling_lemma, distance_claims, verify_ov_gadget, CouplingReport,
    DistanceClaim, GadgetPointSet, OVInstance, OvReport,
};
pub use sat::{build_sat_gadget, verify_sat_gadget, CNFFormula, Literal, SatGadget, SatReport};
