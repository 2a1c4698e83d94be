//! Kernel similarity graphs, RatioCut/NCut semidefinite relaxations,
//! spectral clustering, and certificates of exact recovery.

pub mod certify;
pub mod datagen;
pub mod error;
pub mod experiment;
pub mod io;
pub mod kernel_graph;
pub mod linalg;
pub mod partition;
pub mod rng;
pub mod sdp;
pub mod spectral;

pub use error::{Error, Result};
