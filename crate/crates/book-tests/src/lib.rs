//! Compiles the guide's code listings as doc-tests, so `cargo test` keeps
//! the book honest. One module per chapter makes failures easier to place.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/measurement-model.md")]
pub mod measurement_model {}
#[doc = include_str!("../../../book/src/projections.md")]
pub mod projections {}
#[doc = include_str!("../../../book/src/solvers.md")]
pub mod solvers {}
#[doc = include_str!("../../../book/src/flip-correction.md")]
pub mod flip_correction {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
