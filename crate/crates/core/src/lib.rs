#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod acquisition;
pub mod bench;
pub mod bo;
pub mod cli;
pub mod error;
pub mod gp;
pub mod linalg;
pub mod maxvalue;
pub mod normal;
pub mod rng;
