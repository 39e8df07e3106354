//! Criterion benchmarks for the reactive-paths library; see `benches/`.
