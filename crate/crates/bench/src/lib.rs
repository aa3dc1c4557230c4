//! Benchmark-only crate; the suites live in `benches/pipeline.rs`.
//!
//! Run with `cargo bench -p shadow-bench`.
