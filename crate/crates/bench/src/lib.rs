//! Criterion benchmarks for the spectral, energy and projection kernels; see `benches/`.
