//! Finite weakly unital dg categories and functors.

pub mod adjunction;
mod axioms;
mod category;
mod coequalizer;
pub mod construct;
pub mod free;
pub mod gensets;
mod functor;
pub mod model;
pub mod h0;
pub mod json;
pub mod limits;
pub mod subspace;
pub mod vector;

pub use axioms::{check_wu_axioms, strict_units, AxiomCheck, WuReport};
pub use category::{composable, Arg, FinWuDgCat, HomSpace, Undefined, Val};
pub use functor::{check_functor, FunctorReport, WuFunctor};
pub use subspace::Subspace;
pub use vector::Vector;
pub use h0::{h0_category, H0Category};
pub use coequalizer::{check_conditions, good_coequalizer, kernel_pair, matrix_counterexample, CoeqError, ConditionReport, GoodCoequalizer, ReflexivePair};
pub use model::{predicates, sample_family, Flag, Predicates, Sample};
