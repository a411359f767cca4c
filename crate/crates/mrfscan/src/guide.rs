//! The user guide, compiled.
//!
//! The mdbook sources under `book/` are included here verbatim, one chapter
//! per module, so `cargo test --doc` compiles and runs every `rust` code
//! block in the book. mdbook itself cannot test snippets against the crate
//! they document; routing the chapters through rustdoc closes that gap, and
//! a chapter that drifts out of sync with the API fails the test suite by
//! name. The rendered book (`mdbook build book`) stays the comfortable way
//! to *read* the guide; this module is the way the guide is *checked*.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/pseudolikelihood.md")]
pub mod pseudolikelihood {}

#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}

#[doc = include_str!("../../../book/src/scanning.md")]
pub mod scanning {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
