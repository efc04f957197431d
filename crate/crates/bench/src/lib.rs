//! Criterion benchmarks for the mvgraph workspace live in `benches/`.
