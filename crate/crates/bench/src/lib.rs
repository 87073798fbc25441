//! Criterion benchmarks for the search, decoding and simulation kernels; see `benches/`.
