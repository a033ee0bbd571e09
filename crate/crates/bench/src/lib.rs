//! Empty by design; the crate exists to host `benches/solvers.rs`.
