//! Transgression of twisted cocycles to loop groupoids of finite ℤ₂-graded
//! groupoids, with exact arithmetic in ℚ/ℤ.

pub mod cochain;
pub mod error;
pub mod groupoid;
pub mod phase;
pub mod transgress;
pub mod algebra;
pub mod counting;
pub mod suite;
pub mod torsion;

pub use cochain::{Cochain, Twist};
pub use error::{Error, Result};
pub use groupoid::{FiniteGroupoid, Functor, GradedGroup, GradedGroupoid, LoopGroupoid, LoopKind};
pub use phase::{Phase, PhaseSum, Rational, Sign};
