//! Exact convex calculus on the real line and range certificates for sums
//! of maximal monotone operators, built on piecewise-quadratic functions
//! and piecewise-linear graphs.

pub mod error;
pub mod ext;
pub mod fitzpatrick;
pub mod grid;
pub mod interval;
pub mod parallel;
pub mod operators;
pub mod plq;
pub mod poly2;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use fitzpatrick::{
    conjugate_bivariate, fenchel_representative, fitzpatrick_fn, hat_transform, psi_T,
    representative_validity_check, BivariateFn,
};
pub use interval::{Interval, SetOnLine};
pub use operators::{maximality_check, sum_range_oracle, Operator, Segment};
pub use plq::{inf_convolution, pointwise_max, pointwise_min, PlqFunction};
pub use verify::{
    classical_conditions, normal_cone_driver, range_membership, single_surjectivity,
    subdiff_driver, surjectivity_sweep, total_duality_check, zero_in_range, CheckConfig,
    RepChoice, Route, TiltPlacement, Verdict,
};
