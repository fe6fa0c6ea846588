//! Criterion benchmarks for the proof kernel live in `benches/`.
