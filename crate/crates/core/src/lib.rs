//! Region-based forward and backward reachability for timed automata.
//!
//! The library represents regions as ordered clock partitions that record the
//! order in which clocks become unbounded, which caps the number of immediate
//! delay predecessors of any region at three. On top of the single-region
//! algorithms it provides product semantics for networks with shared integer
//! variables and binary channel synchronization, forward and backward search
//! engines, a model and query text format, benchmark model generators, and
//! exact-arithmetic test oracles.

pub mod bench;
pub mod explore;
pub mod kinematics;
pub mod model;
pub mod network;
pub mod oracle;
pub mod region;
pub mod textio;

pub use model::{Network, Query};
pub use region::{Region, RegionClass, SearchState};
