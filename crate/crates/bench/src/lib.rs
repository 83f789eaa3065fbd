//! Criterion benchmarks for sbg-core; see `benches/`.
