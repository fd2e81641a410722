//! The chapters of `book/` as modules, so `cargo test` runs their snippets.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/terms.md")]
pub mod terms {}
#[doc = include_str!("../../../book/src/requisites.md")]
pub mod requisites {}
#[doc = include_str!("../../../book/src/catalog.md")]
pub mod catalog {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/rules.md")]
pub mod rules {}
#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}
#[doc = include_str!("../../../book/src/interfaces.md")]
pub mod interfaces {}
