//! Balayages of positive measures on the upper half-plane, Carleson constants,
//! BMO and dyadic-BMO norms, and the algebra of dyadic paraproducts.
//!
//! Everything on the dyadic side is exact: breakpoints are dyadic rationals,
//! values are arbitrary-precision rationals. The Poisson side uses closed-form
//! kernels and antiderivatives in `f64`, with quadrature kept as a cross-check.

pub mod dyadic;
pub mod error;
pub mod haar;
pub mod rational;
pub mod step;
pub mod report;
pub mod measure;
pub mod quadrature;
pub mod balayage;
pub mod norms;
pub mod constructions;
pub mod paraproduct;
pub mod characterization;
pub mod corpus;
pub mod verify;

pub use dyadic::{relatives, DyadicInterval, DyadicRational, Relatives};
pub use error::{Error, Result};
pub use haar::{dilate, haar_coefficients, project, square_function, HaarCoefficients, Window};
pub use rational::Q;
pub use step::{mean_on, StepFunction};
