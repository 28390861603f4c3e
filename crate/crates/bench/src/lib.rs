//! Benchmark harness crate; see `benches/constructions.rs`.
