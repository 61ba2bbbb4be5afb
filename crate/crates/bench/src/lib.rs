//! Benchmark-only crate; see `benches/coherence.rs`.
