//! Simulation and transformation workbench for network coding on undirected
//! networks: exact-rational instances, finite-blocklength codes, the code
//! transforms behind edge-removal arguments, and the edge-removal analysis.

pub mod analysis;
pub mod cli;
pub mod code;
pub mod graph;
pub mod rational;
pub mod transforms;
