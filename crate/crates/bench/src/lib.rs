//! Criterion benchmarks for `charpoly-core`; the benchmarks live in `benches/`.
