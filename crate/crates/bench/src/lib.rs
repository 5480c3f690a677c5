//! Criterion benchmarks for the counting engines; see `benches/`.
