//! Chordal Loewner flows, monotone convolution of probability measures and
//! comb products of spidernets.
//!
//! The analytic layers ([`halfplane`], [`loewner`], [`discretize`]) are generic
//! over a [`Scalar`]; the aliases at the crate root fix `f64`. Walk counts in
//! [`moments`] are exact big integers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod discretize;
pub mod error;
pub mod graph;
pub mod halfplane;
pub mod loewner;
pub mod moments;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Complex = num_complex::Complex<f64>;
pub type HalfPlaneMap = halfplane::HalfPlaneMap<f64>;
pub type DiscreteMeasure = halfplane::DiscreteMeasure<f64>;
pub type MomentSequence = halfplane::MomentSequence<f64>;
pub type IntegerMoments = halfplane::MomentSequence<num_bigint::BigInt>;
pub type DrivingFunction = loewner::DrivingFunction<f64>;
pub type HerglotzField = loewner::HerglotzField<f64>;
pub type LoewnerField = loewner::LoewnerField<f64>;
pub type SolverSettings = loewner::SolverSettings<f64>;
pub type ContourSettings = halfplane::ContourSettings<f64>;
pub type MultiSlit = discretize::MultiSlit<f64>;
pub type DriverQuantization = discretize::DriverQuantization<f64>;
