//! Joint vertical and horizontal reservation allocation for heterogeneous
//! positions.
//!
//! The crate builds up from the data model ([`model`]) through HR rank
//! computations ([`hr`]) and choice rules ([`choice`]) to complete
//! allocation mechanisms ([`mechanisms`]). [`axioms`] turns the fairness
//! requirements into executable checkers, and [`oracle`] certifies the
//! mechanisms against brute-force enumeration on small instances.

pub mod axioms;
pub mod choice;
pub mod generator;
pub mod hr;
pub mod mechanisms;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scenarios;

pub use choice::{BoostConfig, ChoiceError, ChoiceResult};
pub use mechanisms::{MechanismError, MechanismKind, MechanismRun};
pub use model::{
    validate_instance, Assignment, CategoryId, IndividualId, Instance, InstanceSpec, JobId, Seat,
    TraitId, ValidationError, Vertical,
};
