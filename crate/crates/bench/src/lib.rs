//! Benchmark-only crate; see `benches/reachability.rs`.
