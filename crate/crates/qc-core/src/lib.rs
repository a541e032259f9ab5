//! λQC: choreographies with first-class location sets, their typing,
//! centralized semantics, endpoint projection and network semantics.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod kind;
pub mod local;
pub mod locset;
pub mod names;
pub mod chor;
pub mod pretty;
pub mod statics;
pub mod sem;
pub mod net;
pub mod proj;
pub mod conformance;
