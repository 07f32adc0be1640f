//! Flow graphs, walls and reduced flow graphs of transverse veering triangulations.

pub mod perm;
pub mod sigparse;
pub mod spectral;
pub mod triangulation;
pub mod branched;
pub mod flowgraph;
pub mod walls;

pub use sigparse::{decode, encode, GluingTable, SigError, TautSignature};
