//! The chapters of the guide in `book/src`, compiled so their snippets run
//! as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/maps_and_cocycles.md")]
pub mod maps_and_cocycles {}

#[doc = include_str!("../../../book/src/transfer_operator.md")]
pub mod transfer_operator {}

#[doc = include_str!("../../../book/src/resonances.md")]
pub mod resonances {}

#[doc = include_str!("../../../book/src/spin.md")]
pub mod spin {}

#[doc = include_str!("../../../book/src/phase_space.md")]
pub mod phase_space {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
