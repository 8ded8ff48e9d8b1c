//! Exact arithmetic for `×q` orbits on the circle and the combinatorial,
//! p-adic and measure-theoretic diagnostics built on top of them.
//!
//! Everything here is `no_std` with `alloc`. Results that end up as
//! floating point are computed with exact integers or the fixed-point
//! [`hp::Real`] type and only converted at the boundary.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod density;
pub mod entropy;
pub mod error;
pub mod hp;
pub mod measure;
pub mod padic;
pub mod seqgen;
pub mod torus;

pub use error::{Error, ErrorKind, Result};
pub use seqgen::SequenceSpec;
pub use torus::{CirclePoint, IrrationalSurrogate, TargetTag};
