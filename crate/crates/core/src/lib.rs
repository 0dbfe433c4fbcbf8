#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod dynamics;
pub mod emotion;
pub mod error;
pub mod kinematics;
pub mod lattice;
pub mod path_integral;
pub mod reduce;
