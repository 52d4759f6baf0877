//! Benchmarks for the hot paths of `blackstock-core`; see `benches/`.

pub use blackstock_core;
