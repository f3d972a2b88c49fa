pub mod automodels;
pub mod cli;
pub mod emit;
pub mod kernel;
pub mod lang;
pub mod refinement;
pub mod semantics;
pub mod testgen;
