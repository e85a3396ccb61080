//! Maximum parsimony distance between unrooted binary phylogenetic trees:
//! parsing, Fitch scoring, kernelization, witness construction, exact
//! oracles, and a constant-factor approximation driver.

pub mod approx;
pub mod error;
pub mod gen;
pub mod kernel;
pub mod newick;
pub mod oracle;
pub mod parsimony;
pub mod reduction;
pub mod suite;
pub mod tree;

pub use error::{Error, Result};
pub use tree::PhyloTree;
