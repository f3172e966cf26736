//! Criterion benchmarks for the qcarpet propagator live under `benches/`.
