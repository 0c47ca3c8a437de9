//! Scalar-wave mode solutions in Kasner spacetimes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod closedform;
pub mod geodesics;
pub mod integrate;
pub mod kasner;
pub mod modes;
pub mod specfun;
