//! Criterion benchmarks for `priorsens`; see `benches/`.
