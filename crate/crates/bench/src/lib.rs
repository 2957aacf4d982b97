//! Benchmarks for the shock-profile solver live under `benches/`.
