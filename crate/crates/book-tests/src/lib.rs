//! Each chapter of `book/` is a module here, so `cargo test --doc` runs every
//! listing in the guide and a failure names the chapter it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/problem.md")]
pub mod problem {}
#[doc = include_str!("../../../book/src/residuals.md")]
pub mod residuals {}
#[doc = include_str!("../../../book/src/delta.md")]
pub mod delta {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/generator.md")]
pub mod generator {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
