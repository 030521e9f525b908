//! Benchmarks for `hbm-core`; see `benches/`.
