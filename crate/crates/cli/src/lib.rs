//! HTTP service shared by the `qlattice` binary and its tests.

pub mod service;
