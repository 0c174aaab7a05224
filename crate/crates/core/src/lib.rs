// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod matkernel;
pub mod jacobi;
pub mod json;
pub mod polys;
pub mod series;
pub mod measures;
pub mod moments;
pub mod spectral;
pub mod nevanlinna;
