pub mod catalog;
pub mod chains;
pub mod cli;
pub mod congruence;
pub mod consistency;
pub mod dnf;
pub mod dot;
pub mod dsl;
pub mod error;
pub mod euler;
pub mod lattice;
pub mod poset;
mod presented;
pub mod term;
pub mod universal;
