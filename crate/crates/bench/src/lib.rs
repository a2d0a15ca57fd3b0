//! Criterion benchmarks for the refinement, construction, and verification
//! pipeline live in `benches/`; this crate has no library code of its own.
