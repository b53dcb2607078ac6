//! Exact arithmetic: integer lattices, cyclotomic numbers, Laurent
//! polynomials with fractional exponents, rational characters and
//! truncated graded series.

pub mod cone;
pub mod cyclotomic;
pub mod intmatrix;
pub mod laurent;
pub mod monomial;
pub mod rational;
pub mod series;

pub use cone::cone_contains;
pub use cyclotomic::CycNumber;
pub use intmatrix::{rational_solve, smith_normal_form, IntMatrix, Smith, Q};
pub use laurent::LaurentPoly;
pub use monomial::FracMonomial;
pub use rational::{rat_equal, DenFactor, RationalCharacter};
pub use series::{GradedSeries, HomRational};
